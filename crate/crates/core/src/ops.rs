//! Operators on `n` qubits as explicit real symmetric `2^n x 2^n` matrices in
//! the computational basis.
//!
//! Three storage variants: a diagonal vector for clause projectors and the
//! diagonal problem Hamiltonian, a row-compressed sparse matrix for Pauli-X
//! type operators, and dense column-major storage for the entangling
//! Hamiltonians. Every builder produces bitwise-symmetric output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use faer::Mat;

use crate::error::{Error, Result};
use crate::sat::{Clause, Instance};

/// Row-compressed sparse storage with sorted column indices in each row.
#[derive(Clone, Debug, PartialEq)]
pub struct Sparse {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Sparse {
    fn from_rows(dim: usize, mut row: impl FnMut(usize, &mut Vec<(usize, f64)>)) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut buf = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            buf.clear();
            row(r, &mut buf);
            buf.sort_by_key(|e| e.0);
            for &(c, v) in &buf {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { row_ptr, cols, vals }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Diagonal(Vec<f64>),
    Sparse(Sparse),
    Dense(Mat<f64>),
}

/// A real symmetric operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    n_qubits: usize,
    storage: Storage,
}

fn dim_to_qubits(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl OperatorMatrix {
    pub fn from_diagonal(diag: Vec<f64>) -> Result<Self> {
        let n_qubits = dim_to_qubits(diag.len())?;
        Ok(Self { n_qubits, storage: Storage::Diagonal(diag) })
    }

    /// Wraps a dense matrix after checking it is exactly symmetric.
    pub fn from_dense(m: Mat<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let n_qubits = dim_to_qubits(m.nrows())?;
        for c in 0..m.ncols() {
            for r in c + 1..m.nrows() {
                if m[(r, c)] != m[(c, r)] {
                    return Err(Error::NotSymmetric { row: r, col: c });
                }
            }
        }
        Ok(Self { n_qubits, storage: Storage::Dense(m) })
    }

    /// Builds an operator from `(row, col, value)` triplets; repeated entries add up.
    /// A purely diagonal triplet set yields diagonal storage.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let n_qubits = dim_to_qubits(dim)?;
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.max(c) + 1 });
            }
            *map.entry((r, c)).or_insert(0.0) += v;
        }
        for (&(r, c), &v) in &map {
            if map.get(&(c, r)).copied().unwrap_or(0.0) != v {
                return Err(Error::NotSymmetric { row: r, col: c });
            }
        }
        if map.keys().all(|(r, c)| r == c) {
            let mut diag = vec![0.0; dim];
            for ((r, _), v) in map {
                diag[r] = v;
            }
            return Ok(Self { n_qubits, storage: Storage::Diagonal(diag) });
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for ((r, c), v) in map {
            rows[r].push((c, v));
        }
        let sparse = Sparse::from_rows(dim, |r, buf| buf.extend_from_slice(&rows[r]));
        Ok(Self { n_qubits, storage: Storage::Sparse(sparse) })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, storage: Storage::Diagonal(vec![1.0; 1 << n_qubits]) }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        Self { n_qubits, storage: Storage::Diagonal(vec![0.0; 1 << n_qubits]) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.storage, Storage::Diagonal(_))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match &self.storage {
            Storage::Diagonal(d) => {
                if r == c {
                    d[r]
                } else {
                    0.0
                }
            }
            Storage::Sparse(s) => s.row(r).find(|&(k, _)| k == c).map_or(0.0, |(_, v)| v),
            Storage::Dense(m) => m[(r, c)],
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Diagonal(d) => d.clone(),
            _ => (0..self.dim()).map(|k| self.get(k, k)).collect(),
        }
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let dim = self.dim();
        match &self.storage {
            Storage::Diagonal(d) => Mat::from_fn(dim, dim, |r, c| if r == c { d[r] } else { 0.0 }),
            Storage::Sparse(s) => {
                let mut m = Mat::zeros(dim, dim);
                for r in 0..dim {
                    for (c, v) in s.row(r) {
                        m[(r, c)] = v;
                    }
                }
                m
            }
            Storage::Dense(m) => m.clone(),
        }
    }

    /// Converts to dense storage in place of a clone when already dense.
    pub fn into_dense(self) -> Mat<f64> {
        match self.storage {
            Storage::Dense(m) => m,
            _ => self.to_dense(),
        }
    }

    /// All structurally stored nonzero entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let dim = self.dim();
        match &self.storage {
            Storage::Diagonal(d) => {
                d.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, &v)| (k, k, v)).collect()
            }
            Storage::Sparse(s) => {
                (0..dim).flat_map(|r| s.row(r).filter(|e| e.1 != 0.0).map(move |(c, v)| (r, c, v))).collect()
            }
            Storage::Dense(m) => (0..dim)
                .flat_map(|r| (0..dim).map(move |c| (r, c)))
                .filter_map(|(r, c)| {
                    let v = m[(r, c)];
                    (v != 0.0).then_some((r, c, v))
                })
                .collect(),
        }
    }

    /// Entrywise symmetry check, `entry(a, b) == entry(b, a)` bit for bit.
    pub fn is_symmetric(&self) -> bool {
        match &self.storage {
            Storage::Diagonal(_) => true,
            Storage::Sparse(s) => (0..self.dim()).all(|r| s.row(r).all(|(c, v)| self.get(c, r) == v)),
            Storage::Dense(m) => (0..self.dim()).all(|c| (c + 1..self.dim()).all(|r| m[(r, c)] == m[(c, r)])),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        Ok(match &self.storage {
            Storage::Diagonal(d) => d.iter().zip(v).map(|(a, b)| a * b).collect(),
            Storage::Sparse(s) => (0..dim).map(|r| s.row(r).map(|(c, a)| a * v[c]).sum()).collect(),
            Storage::Dense(m) => {
                let mut out = vec![0.0; dim];
                for (c, &vc) in v.iter().enumerate() {
                    if vc == 0.0 {
                        continue;
                    }
                    for (o, &a) in out.iter_mut().zip(m.col_as_slice(c)) {
                        *o += a * vc;
                    }
                }
                out
            }
        })
    }

    /// Column `c`, i.e. the operator applied to basis vector `e_c`.
    pub fn column(&self, c: usize) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(m) => m.col_as_slice(c).to_vec(),
            Storage::Diagonal(d) => {
                let mut out = vec![0.0; self.dim()];
                out[c] = d[c];
                out
            }
            // symmetric, so the row is the column
            Storage::Sparse(s) => {
                let mut out = vec![0.0; self.dim()];
                for (k, v) in s.row(c) {
                    out[k] = v;
                }
                out
            }
        }
    }

    /// `alpha * x + beta * y`, keeping the sparsest storage both inputs allow.
    pub fn linear_combination(alpha: f64, x: &Self, beta: f64, y: &Self) -> Result<Self> {
        if x.n_qubits != y.n_qubits {
            return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
        }
        let dim = x.dim();
        let storage = match (&x.storage, &y.storage) {
            (Storage::Diagonal(a), Storage::Diagonal(b)) => {
                Storage::Diagonal(a.iter().zip(b).map(|(p, q)| alpha * p + beta * q).collect())
            }
            (Storage::Dense(_), _) | (_, Storage::Dense(_)) => {
                let mut m = x.to_dense();
                for c in 0..dim {
                    for r in 0..dim {
                        m[(r, c)] *= alpha;
                    }
                }
                y.add_scaled_into(beta, &mut m);
                Storage::Dense(m)
            }
            _ => Storage::Sparse(Sparse::from_rows(dim, |r, buf| {
                x.for_each_in_row(r, |c, v| buf.push((c, alpha * v)));
                y.for_each_in_row(r, |c, v| match buf.iter_mut().find(|e| e.0 == c) {
                    Some(e) => e.1 += beta * v,
                    None => buf.push((c, beta * v)),
                });
            })),
        };
        Ok(Self { n_qubits: x.n_qubits, storage })
    }

    fn for_each_in_row(&self, r: usize, mut f: impl FnMut(usize, f64)) {
        match &self.storage {
            Storage::Diagonal(d) => f(r, d[r]),
            Storage::Sparse(s) => s.row(r).for_each(|(c, v)| f(c, v)),
            Storage::Dense(m) => (0..self.dim()).for_each(|c| f(c, m[(r, c)])),
        }
    }

    fn add_scaled_into(&self, beta: f64, m: &mut Mat<f64>) {
        match &self.storage {
            Storage::Diagonal(d) => d.iter().enumerate().for_each(|(k, v)| m[(k, k)] += beta * v),
            Storage::Sparse(s) => {
                for r in 0..self.dim() {
                    for (c, v) in s.row(r) {
                        m[(r, c)] += beta * v;
                    }
                }
            }
            Storage::Dense(a) => {
                for c in 0..self.dim() {
                    for r in 0..self.dim() {
                        m[(r, c)] += beta * a[(r, c)];
                    }
                }
            }
        }
    }

    /// Adds `self[r, c]` to `out[r, c]` for `r` in `rows`, `c` in `cols`, `r >= c`.
    fn add_masked_lower(&self, rows: &[bool], cols: &[bool], out: &mut Mat<f64>) {
        let dim = self.dim();
        match &self.storage {
            Storage::Diagonal(d) => {
                for k in 0..dim {
                    if rows[k] && cols[k] {
                        out[(k, k)] += d[k];
                    }
                }
            }
            Storage::Sparse(s) => {
                for r in (0..dim).filter(|&r| rows[r]) {
                    for (c, v) in s.row(r) {
                        if c <= r && cols[c] {
                            out[(r, c)] += v;
                        }
                    }
                }
            }
            Storage::Dense(a) => {
                for c in (0..dim).filter(|&c| cols[c]) {
                    let src = a.col_as_slice(c);
                    for r in (c..dim).filter(|&r| rows[r]) {
                        out[(r, c)] += src[r];
                    }
                }
            }
        }
    }

    /// Writes the coordinate text format: header `dim nnz` (plus ` diagonal` for
    /// diagonal storage), then one 0-based `row col value` triplet per line.
    pub fn to_coo_string(&self) -> String {
        let trips = self.triplets();
        let mut out = format!("{} {}", self.dim(), trips.len());
        if self.is_diagonal() {
            out.push_str(" diagonal");
        }
        out.push('\n');
        for (r, c, v) in trips {
            let _ = writeln!(out, "{r} {c} {v:e}");
        }
        out
    }

    pub fn write_coo(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_coo_string())?;
        Ok(())
    }

    pub fn from_coo_reader(reader: impl BufRead) -> Result<Self> {
        let mut header: Option<(usize, usize, bool)> = None;
        let mut trips = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = k + 1;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
            let uint = |s: &str| s.parse::<usize>().map_err(|e| bad(&format!("`{s}`: {e}")));
            match header {
                None => {
                    let diag = match t.as_slice() {
                        [_, _] => false,
                        [_, _, "diagonal"] => true,
                        _ => return Err(bad("header must be `dim nnz [diagonal]`")),
                    };
                    header = Some((uint(t[0])?, uint(t[1])?, diag));
                }
                Some((_, _, diag)) => {
                    if t.len() != 3 {
                        return Err(bad("entry must be `row col value`"));
                    }
                    let (r, c) = (uint(t[0])?, uint(t[1])?);
                    let v = t[2].parse::<f64>().map_err(|e| bad(&format!("`{}`: {e}", t[2])))?;
                    if diag && r != c {
                        return Err(bad("off-diagonal entry in a diagonal file"));
                    }
                    trips.push((r, c, v));
                }
            }
        }
        let (dim, nnz, _) = header.ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
        if trips.len() != nnz {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {nnz} entries, found {}", trips.len()),
            });
        }
        Self::from_triplets(dim, &trips)
    }

    pub fn read_coo(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_coo_reader(BufReader::new(f))
    }
}

/// Clause projector `C_ijm`: 1 on basis states where the three bits agree, else 0.
pub fn build_clause_projector(n_qubits: usize, c: &Clause) -> Result<OperatorMatrix> {
    if c.max_index() > n_qubits {
        return Err(Error::ClauseOutOfRange { clause: *c, n_qubits });
    }
    let diag = (0..1usize << n_qubits).map(|b| f64::from(u8::from(c.violated_by_index(b)))).collect();
    Ok(OperatorMatrix { n_qubits, storage: Storage::Diagonal(diag) })
}

/// Diagonal problem Hamiltonian, the sum of clause projectors.
pub fn build_hp(inst: &Instance) -> OperatorMatrix {
    let diag = (0..inst.dim()).map(|b| inst.cost_of_index(b) as f64).collect();
    OperatorMatrix { n_qubits: inst.n_qubits(), storage: Storage::Diagonal(diag) }
}

fn single_flip_operator(n: usize, diag: impl Fn(usize) -> f64, hop: f64) -> OperatorMatrix {
    let sparse = Sparse::from_rows(1 << n, |r, buf| {
        buf.push((r, diag(r)));
        buf.extend((0..n).map(|q| (r ^ (1 << q), hop)));
    });
    OperatorMatrix { n_qubits: n, storage: Storage::Sparse(sparse) }
}

/// `1 + (1/n) * sum_i X_i`.
pub fn build_a_uniform_x(n: usize) -> OperatorMatrix {
    assert!(n >= 1, "need at least one qubit");
    single_flip_operator(n, |_| 1.0, 1.0 / n as f64)
}

pub const ISING_TRANSVERSE: f64 = 0.9;
pub const ISING_LONGITUDINAL: f64 = 0.8;
pub const ISING_GRADIENT: f64 = 0.3;

/// Longitudinal field on qubit `j` (1-based) of an `n`-site chain.
pub fn ising_field(j: usize, n: usize) -> f64 {
    ISING_LONGITUDINAL * (1.0 - ISING_GRADIENT * j as f64 / n as f64)
}

/// Non-integrable Ising chain with open boundaries:
/// `0.9 sum X_j + 0.8 sum (1 - 0.3 j/n) Z_j + sum Z_j Z_{j+1}`.
pub fn build_ising(n: usize) -> OperatorMatrix {
    assert!(n >= 1, "need at least one qubit");
    let fields: Vec<f64> = (1..=n).map(|j| ising_field(j, n)).collect();
    let z = |b: usize, q: usize| if b >> q & 1 == 0 { 1.0 } else { -1.0 };
    single_flip_operator(
        n,
        |b| {
            let field: f64 = (0..n).map(|q| fields[q] * z(b, q)).sum();
            let bond: f64 = (0..n.saturating_sub(1)).map(|q| z(b, q) * z(b, q + 1)).sum();
            field + bond
        },
        ISING_TRANSVERSE,
    )
}

/// Transverse driver `sum_j (1 - X_j) / 2`, ground state the uniform superposition.
pub fn build_h0_transverse(n: usize) -> OperatorMatrix {
    assert!(n >= 1, "need at least one qubit");
    single_flip_operator(n, |_| 0.5 * n as f64, -0.5)
}

pub fn apply(op: &OperatorMatrix, v: &[f64]) -> Result<Vec<f64>> {
    op.apply(v)
}

/// Per-clause operators `A_ijm`. Operators are shared, so one global `A`
/// costs a single matrix.
#[derive(Clone, Debug, Default)]
pub struct ClauseOperators {
    ops: BTreeMap<Clause, Arc<OperatorMatrix>>,
}

impl ClauseOperators {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns the same operator to every clause of `inst`.
    pub fn uniform(inst: &Instance, op: OperatorMatrix) -> Self {
        let op = Arc::new(op);
        Self { ops: inst.clauses().iter().map(|&c| (c, Arc::clone(&op))).collect() }
    }

    pub fn insert(&mut self, c: Clause, op: impl Into<Arc<OperatorMatrix>>) {
        self.ops.insert(c, op.into());
    }

    pub fn get(&self, c: &Clause) -> Option<&Arc<OperatorMatrix>> {
        self.ops.get(c)
    }
}

/// Pair operators `A^{nlq}_{ijm}` keyed by `(ijm, nlq)`. Pairs without an
/// entry contribute nothing.
#[derive(Clone, Debug, Default)]
pub struct PairOperators {
    ops: BTreeMap<(Clause, Clause), Arc<OperatorMatrix>>,
}

impl PairOperators {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts one entry. Callers are responsible for inserting the mirrored pair.
    pub fn insert(&mut self, a: Clause, b: Clause, op: impl Into<Arc<OperatorMatrix>>) {
        self.ops.insert((a, b), op.into());
    }

    /// Inserts `op` under both `(a, b)` and `(b, a)`.
    pub fn insert_symmetric(&mut self, a: Clause, b: Clause, op: impl Into<Arc<OperatorMatrix>>) {
        let op = op.into();
        self.ops.insert((b, a), Arc::clone(&op));
        self.ops.insert((a, b), op);
    }

    /// Diagonal-only pair map taken from a per-clause assignment.
    pub fn diagonal(inst: &Instance, per_clause: &ClauseOperators) -> Result<Self> {
        let mut out = Self::new();
        for c in inst.clauses() {
            let op = per_clause.get(c).ok_or(Error::MissingClauseOperator(*c))?;
            out.ops.insert((*c, *c), Arc::clone(op));
        }
        Ok(out)
    }

    /// The same operator on every ordered pair of clauses.
    pub fn uniform(inst: &Instance, op: OperatorMatrix) -> Self {
        let op = Arc::new(op);
        let cl = inst.clauses();
        Self {
            ops: cl
                .iter()
                .flat_map(|&a| cl.iter().map(move |&b| (a, b)))
                .map(|k| (k, Arc::clone(&op)))
                .collect(),
        }
    }

    fn validate(&self, inst: &Instance) -> Result<()> {
        for (&(a, b), op) in &self.ops {
            for c in [a, b] {
                if !inst.clauses().contains(&c) {
                    return Err(Error::MissingClauseOperator(c));
                }
            }
            match self.ops.get(&(b, a)) {
                Some(mirror) if Arc::ptr_eq(op, mirror) || **op == **mirror => {}
                _ => return Err(Error::AsymmetricPairMap(a, b)),
            }
            if op.n_qubits() != inst.n_qubits() {
                return Err(Error::DimensionMismatch { expected: inst.dim(), found: op.dim() });
            }
        }
        Ok(())
    }
}

fn clause_mask(inst: &Instance, c: &Clause) -> Vec<bool> {
    (0..inst.dim()).map(|b| c.violated_by_index(b)).collect()
}

fn mirror_lower(mut m: Mat<f64>) -> Mat<f64> {
    let dim = m.nrows();
    for c in 0..dim {
        for r in c + 1..dim {
            m[(c, r)] = m[(r, c)];
        }
    }
    m
}

/// Entangling problem Hamiltonian `sum_c C_c A_c C_c`.
///
/// Each term is `A_c` with rows and columns outside the clause mask zeroed.
pub fn build_hent(inst: &Instance, a: &ClauseOperators) -> Result<OperatorMatrix> {
    let dim = inst.dim();
    let mut m = Mat::zeros(dim, dim);
    for c in inst.clauses() {
        let op = a.get(c).ok_or(Error::MissingClauseOperator(*c))?;
        if op.n_qubits() != inst.n_qubits() {
            return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
        }
        let mask = clause_mask(inst, c);
        op.add_masked_lower(&mask, &mask, &mut m);
    }
    Ok(OperatorMatrix { n_qubits: inst.n_qubits(), storage: Storage::Dense(mirror_lower(m)) })
}

/// Generalized entangling Hamiltonian `sum_{a, b} C_b A^{b}_{a} C_a`.
pub fn build_hent_general(inst: &Instance, a: &PairOperators) -> Result<OperatorMatrix> {
    a.validate(inst)?;
    let dim = inst.dim();
    let masks: BTreeMap<Clause, Vec<bool>> =
        inst.clauses().iter().map(|c| (*c, clause_mask(inst, c))).collect();
    let mut m = Mat::zeros(dim, dim);
    for ((ca, cb), op) in &a.ops {
        op.add_masked_lower(&masks[cb], &masks[ca], &mut m);
    }
    Ok(OperatorMatrix { n_qubits: inst.n_qubits(), storage: Storage::Dense(mirror_lower(m)) })
}
