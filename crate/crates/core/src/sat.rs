//! Monotone not-all-equal 3-SAT instances, the classical cost function,
//! exhaustive solving and rejection-sampled instance generation.
//!
//! Basis convention shared by every module of this crate: qubit `j`
//! (1-based) is bit `j - 1` of the basis index, bit value `0` means
//! `z_j = +1` and bit value `1` means `z_j = -1`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest qubit count accepted by the brute-force routines.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

/// A clause over three distinct qubits, stored sorted (`i < j < m`, 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct Clause([usize; 3]);

impl Clause {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        let mut idx = [a, b, c];
        idx.sort_unstable();
        if idx[0] == 0 || idx[0] == idx[1] || idx[1] == idx[2] {
            return Err(Error::InvalidClause(a, b, c));
        }
        Ok(Self(idx))
    }

    pub fn indices(&self) -> [usize; 3] {
        self.0
    }

    /// Largest qubit index touched by the clause.
    pub fn max_index(&self) -> usize {
        self.0[2]
    }

    /// Basis-index mask with the three clause bits set.
    pub fn mask(&self) -> usize {
        self.0.iter().fold(0, |acc, &q| acc | (1 << (q - 1)))
    }

    /// True when the basis state `index` has all three clause bits equal.
    #[inline]
    pub fn violated_by_index(&self, index: usize) -> bool {
        let mask = self.mask();
        let bits = index & mask;
        bits == 0 || bits == mask
    }
}

impl TryFrom<[usize; 3]> for Clause {
    type Error = Error;

    fn try_from(v: [usize; 3]) -> Result<Self> {
        Clause::new(v[0], v[1], v[2])
    }
}

impl From<Clause> for [usize; 3] {
    fn from(c: Clause) -> Self {
        c.0
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// A set of clauses over `n_qubits` qubits, kept in insertion order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    n_qubits: usize,
    clauses: Vec<Clause>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n_qubits: usize,
    clauses: Vec<[usize; 3]>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let clauses = raw.clauses.into_iter().map(Clause::try_from).collect::<Result<Vec<_>>>()?;
        Instance::new(raw.n_qubits, clauses)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance { n_qubits: inst.n_qubits, clauses: inst.clauses.into_iter().map(Into::into).collect() }
    }
}

impl Instance {
    pub fn new(n_qubits: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        let mut seen = BTreeSet::new();
        for &c in &clauses {
            if c.max_index() > n_qubits {
                return Err(Error::ClauseOutOfRange { clause: c, n_qubits });
            }
            if !seen.insert(c) {
                return Err(Error::DuplicateClause(c));
            }
        }
        Ok(Self { n_qubits, clauses })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Cost of the basis state `index`: the number of violated clauses.
    pub fn cost_of_index(&self, index: usize) -> usize {
        self.clauses.iter().filter(|c| c.violated_by_index(index)).count()
    }

    /// Parses the text format: a header line `N M` followed by `M` lines `i j m`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines =
            text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hline, header) =
            lines.next().ok_or(Error::Parse { line: 1, msg: "missing `N M` header".into() })?;
        let head = parse_fields(hline, header)?;
        if head.len() != 2 {
            return Err(Error::Parse { line: hline, msg: "header must be `N M`".into() });
        }
        let (n, m) = (head[0], head[1]);
        let mut clauses = Vec::with_capacity(m);
        for (line, l) in lines {
            let f = parse_fields(line, l)?;
            if f.len() != 3 {
                return Err(Error::Parse { line, msg: "clause line must be `i j m`".into() });
            }
            clauses.push(Clause::new(f[0], f[1], f[2])?);
        }
        if clauses.len() != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header declares {m} clauses, found {}", clauses.len()),
            });
        }
        Instance::new(n, clauses)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_qubits, self.clauses.len());
        for c in &self.clauses {
            let [i, j, m] = c.indices();
            out.push_str(&format!("{i} {j} {m}\n"));
        }
        out
    }

    /// Reads an instance, choosing JSON for `.json` paths and the text format otherwise.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if is_json(path) {
            Ok(serde_json::from_str(&text)?)
        } else {
            Instance::from_text(&text)
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = if is_json(path) { serde_json::to_string_pretty(self)? + "\n" } else { self.to_text() };
        std::fs::write(path, body)?;
        Ok(())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn parse_fields(line: usize, l: &str) -> Result<Vec<usize>> {
    l.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse { line, msg: format!("`{t}`: {e}") }))
        .collect()
}

/// An assignment `z` over `{+1, -1}`; doubles as a computational basis label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct BitString(Vec<i8>);

impl TryFrom<Vec<i64>> for BitString {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        v.into_iter()
            .map(|b| match b {
                1 => Ok(1),
                -1 => Ok(-1),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<i8>>>()
            .map(BitString)
    }
}

impl From<BitString> for Vec<i64> {
    fn from(b: BitString) -> Self {
        b.0.into_iter().map(i64::from).collect()
    }
}

impl BitString {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b != 1 && b != -1) {
            return Err(Error::InvalidBit(b.into()));
        }
        Ok(Self(bits))
    }

    pub fn from_index(index: usize, n_qubits: usize) -> Result<Self> {
        if n_qubits < usize::BITS as usize && index >> n_qubits != 0 {
            return Err(Error::BasisIndexOutOfRange { index, n_qubits });
        }
        Ok(Self((0..n_qubits).map(|q| if index >> q & 1 == 0 { 1 } else { -1 }).collect()))
    }

    pub fn index(&self) -> usize {
        self.0.iter().enumerate().fold(0, |acc, (q, &b)| if b == -1 { acc | (1 << q) } else { acc })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.0
    }

    /// Value of qubit `q` (1-based).
    pub fn get(&self, q: usize) -> Option<i8> {
        q.checked_sub(1).and_then(|k| self.0.get(k).copied())
    }

    /// The globally flipped string `-z`.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|b| -b).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *b == 1 { "+1" } else { "-1" })?;
        }
        Ok(())
    }
}

/// Returns 1 when `z_i = z_j = z_m`, 0 otherwise.
pub fn eval_clause(z: &BitString, c: &Clause) -> Result<u8> {
    if c.max_index() > z.len() {
        return Err(Error::ClauseOutOfRange { clause: *c, n_qubits: z.len() });
    }
    let [i, j, m] = c.indices();
    let (a, b, d) = (z.0[i - 1], z.0[j - 1], z.0[m - 1]);
    Ok(u8::from(a == b && b == d))
}

/// Number of clauses of `inst` violated by `z`.
pub fn classical_cost(z: &BitString, inst: &Instance) -> Result<usize> {
    if z.len() != inst.n_qubits() {
        return Err(Error::LengthMismatch { expected: inst.n_qubits(), found: z.len() });
    }
    inst.clauses().iter().map(|c| eval_clause(z, c).map(usize::from)).sum()
}

fn check_cap(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::ExhaustiveCapExceeded { n_qubits, cap });
    }
    Ok(())
}

/// Basis indices of all zero-cost strings, ascending.
pub fn satisfying_indices(inst: &Instance, cap: usize) -> Result<Vec<usize>> {
    check_cap(inst.n_qubits(), cap)?;
    let masks: Vec<usize> = inst.clauses().iter().map(Clause::mask).collect();
    Ok((0..inst.dim())
        .filter(|&b| {
            masks.iter().all(|&m| {
                let bits = b & m;
                bits != 0 && bits != m
            })
        })
        .collect())
}

/// All satisfying assignments in ascending basis-index order, under the default cap.
pub fn enumerate_satisfying(inst: &Instance) -> Result<Vec<BitString>> {
    enumerate_satisfying_with_cap(inst, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn enumerate_satisfying_with_cap(inst: &Instance, cap: usize) -> Result<Vec<BitString>> {
    satisfying_indices(inst, cap)?.into_iter().map(|b| BitString::from_index(b, inst.n_qubits())).collect()
}

/// Counts satisfying assignments, giving up once the count passes `limit`.
fn count_satisfying_up_to(n_qubits: usize, masks: &[usize], limit: usize) -> usize {
    let mut count = 0;
    for b in 0..1usize << n_qubits {
        if masks.iter().all(|&m| {
            let bits = b & m;
            bits != 0 && bits != m
        }) {
            count += 1;
            if count > limit {
                break;
            }
        }
    }
    count
}

/// Parameters of the rejection-sampling instance generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n_qubits: usize,
    pub n_clauses: usize,
    pub target_solutions: usize,
    pub seed: u64,
    pub max_tries: usize,
}

/// A generated instance together with the attempt (1-based) that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub instance: Instance,
    pub attempts: usize,
}

fn all_triples(n: usize) -> Vec<Clause> {
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
    for i in 1..=n {
        for j in i + 1..=n {
            for m in j + 1..=n {
                out.push(Clause([i, j, m]));
            }
        }
    }
    out
}

/// Samples `n_clauses` distinct triples uniformly without replacement until the
/// instance has exactly `target_solutions` satisfying assignments.
///
/// Attempt `k` draws from a ChaCha8 stream keyed by `(seed, k)`, so the result
/// depends only on the parameters.
pub fn generate(params: &GeneratorParams) -> Result<Generated> {
    generate_with_cap(params, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn generate_with_cap(params: &GeneratorParams, cap: usize) -> Result<Generated> {
    let &GeneratorParams { n_qubits: n, n_clauses: m, target_solutions: target, seed, max_tries } = params;
    if n < 3 {
        return Err(Error::InvalidGenerator(format!("need n >= 3, got {n}")));
    }
    if m == 0 {
        return Err(Error::InvalidGenerator("need m >= 1".into()));
    }
    if target < 2 || target % 2 != 0 {
        return Err(Error::InvalidGenerator(format!(
            "target solution count must be even and >= 2, got {target}"
        )));
    }
    check_cap(n, cap)?;
    let triples = all_triples(n);
    if m > triples.len() {
        return Err(Error::InvalidGenerator(format!(
            "only {} distinct triples exist over {n} qubits, asked for {m}",
            triples.len()
        )));
    }

    for attempt in 0..max_tries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let mut picks = index::sample(&mut rng, triples.len(), m).into_vec();
        picks.sort_unstable();
        let clauses: Vec<Clause> = picks.into_iter().map(|k| triples[k]).collect();
        let masks: Vec<usize> = clauses.iter().map(Clause::mask).collect();
        if count_satisfying_up_to(n, &masks, target) == target {
            return Ok(Generated { instance: Instance::new(n, clauses)?, attempts: attempt + 1 });
        }
    }
    Err(Error::GenerationFailed { attempts: max_tries })
}

pub fn random_instance(
    n: usize,
    m: usize,
    target_solutions: usize,
    seed: u64,
    max_tries: usize,
) -> Result<Instance> {
    let params = GeneratorParams { n_qubits: n, n_clauses: m, target_solutions, seed, max_tries };
    generate(&params).map(|g| g.instance)
}
