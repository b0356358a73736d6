//! Full exact diagonalization, reduced density matrices, eigenstate
//! entanglement entropy and the ground-space verification predicates.

use std::borrow::Cow;
use std::fmt;
use std::io::{Read, Write};
use std::ops::Range;

use faer::{Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{OperatorMatrix, Storage};
use crate::sat::{satisfying_indices, Clause, Instance, DEFAULT_EXHAUSTIVE_CAP};

/// Largest matrix dimension handed to the dense eigensolver by default.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Reduced-density eigenvalues below this are exact zeros in the entropy sum.
pub const DENSITY_CLAMP: f64 = 1e-12;

/// Relative threshold (times `max(1, |lambda|_max)`) for flagging degeneracies.
pub const DEGENERACY_REL: f64 = 1e-12;

/// Tolerance on the norm of states passed to the partial trace.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum Eigenvectors {
    /// Eigenvector `k` is the basis vector `e_{perm[k]}`.
    Basis(Vec<usize>),
    /// Eigenvector `k` is column `k`.
    Dense(Mat<f64>),
}

/// Ascending eigenvalues with aligned orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    eigenvalues: Vec<f64>,
    vectors: Eigenvectors,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &Eigenvectors {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Cow<'_, [f64]> {
        match &self.vectors {
            Eigenvectors::Basis(perm) => {
                let mut v = vec![0.0; self.dim()];
                v[perm[k]] = 1.0;
                Cow::Owned(v)
            }
            Eigenvectors::Dense(m) => Cow::Borrowed(m.col_as_slice(k)),
        }
    }

    /// Largest `||H v_k - lambda_k v_k||_2` over all eigenpairs.
    pub fn max_residual(&self, h: &OperatorMatrix) -> Result<f64> {
        (0..self.dim())
            .into_par_iter()
            .map(|k| {
                let v = self.vector(k);
                let hv = h.apply(&v)?;
                let lam = self.eigenvalues[k];
                Ok(hv.iter().zip(v.iter()).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt())
            })
            .try_reduce(|| 0.0, |a, b| Ok(f64::max(a, b)))
    }

    /// `max |V^T V - I|` entrywise.
    pub fn orthonormality_error(&self) -> f64 {
        match &self.vectors {
            Eigenvectors::Basis(_) => 0.0,
            Eigenvectors::Dense(v) => {
                let gram = v.transpose() * v;
                let dim = self.dim();
                (0..dim)
                    .flat_map(|c| (0..dim).map(move |r| (r, c)))
                    .map(|(r, c)| (gram[(r, c)] - if r == c { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `max(1, |lambda|_max)`.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(1.0, |a: f64, l| a.max(l.abs()))
    }

    /// `flags[k]` is true when `lambda_k` is within the degeneracy threshold of a neighbour.
    pub fn degeneracy_flags(&self) -> Vec<bool> {
        let thr = DEGENERACY_REL * self.scale();
        let ev = &self.eigenvalues;
        (0..ev.len())
            .map(|k| (k > 0 && ev[k] - ev[k - 1] <= thr) || (k + 1 < ev.len() && ev[k + 1] - ev[k] <= thr))
            .collect()
    }
}

fn check_dim(h: &OperatorMatrix, cap: usize) -> Result<()> {
    if h.dim() > cap {
        return Err(Error::DimensionCapExceeded { dim: h.dim(), cap });
    }
    Ok(())
}

pub fn full_spectrum(h: &OperatorMatrix) -> Result<SpectrumResult> {
    full_spectrum_with_cap(h, DEFAULT_DIM_CAP)
}

/// All eigenpairs. Diagonal operators are sorted directly and keep
/// computational basis vectors as eigenvectors.
pub fn full_spectrum_with_cap(h: &OperatorMatrix, cap: usize) -> Result<SpectrumResult> {
    check_dim(h, cap)?;
    if let Storage::Diagonal(d) = h.storage() {
        let mut perm: Vec<usize> = (0..d.len()).collect();
        perm.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let eigenvalues = perm.iter().map(|&k| d[k]).collect();
        return Ok(SpectrumResult { eigenvalues, vectors: Eigenvectors::Basis(perm) });
    }
    let m = match h.storage() {
        Storage::Dense(m) => Cow::Borrowed(m),
        _ => Cow::Owned(h.to_dense()),
    };
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let eigenvalues = evd.S().column_vector().iter().copied().collect();
    Ok(SpectrumResult { eigenvalues, vectors: Eigenvectors::Dense(evd.U().to_owned()) })
}

/// Ascending eigenvalues without eigenvectors.
pub fn eigenvalues(h: &OperatorMatrix, cap: usize) -> Result<Vec<f64>> {
    check_dim(h, cap)?;
    match h.storage() {
        Storage::Diagonal(d) => {
            let mut v = d.clone();
            v.sort_by(f64::total_cmp);
            Ok(v)
        }
        Storage::Dense(m) => {
            m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))
        }
        Storage::Sparse(_) => {
            h.to_dense().self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))
        }
    }
}

/// A bipartition of `n_qubits` qubits given by the kept set (1-based, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    n_qubits: usize,
    keep: Vec<usize>,
}

impl Cut {
    pub fn new(n_qubits: usize, keep: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut keep: Vec<usize> = keep.into_iter().collect();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.len() >= n_qubits {
            return Err(Error::InvalidCut(format!(
                "kept set must be a nonempty proper subset of 1..={n_qubits}"
            )));
        }
        if keep[0] == 0 || *keep.last().unwrap() > n_qubits {
            return Err(Error::InvalidCut(format!("qubit indices must lie in 1..={n_qubits}")));
        }
        Ok(Self { n_qubits, keep })
    }

    /// Traces out qubits `1..=n/2` and keeps the rest.
    pub fn half(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, n_qubits / 2 + 1..=n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn keep(&self) -> &[usize] {
        &self.keep
    }

    pub fn traced(&self) -> Vec<usize> {
        (1..=self.n_qubits).filter(|q| !self.keep.contains(q)).collect()
    }

    pub fn complement(&self) -> Self {
        Self { n_qubits: self.n_qubits, keep: self.traced() }
    }

    /// Upper bound `min(|kept|, |traced|)` on the entropy in bits.
    pub fn max_entropy(&self) -> f64 {
        self.keep.len().min(self.n_qubits - self.keep.len()) as f64
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let keep: Vec<String> = self.keep.iter().map(usize::to_string).collect();
        write!(f, "keep {{{}}} of {}", keep.join(","), self.n_qubits)
    }
}

/// Density matrix of the kept subsystem.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: Mat<f64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.matrix[(r, c)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.matrix[(k, k)]).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))
    }
}

/// Reshapes `state` into the `2^|keep| x 2^|traced|` amplitude matrix.
fn amplitude_matrix(state: &[f64], cut: &Cut) -> Result<Mat<f64>> {
    let n = cut.n_qubits;
    if state.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: state.len() });
    }
    let norm = state.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let keep: Vec<usize> = cut.keep.iter().map(|q| q - 1).collect();
    let traced: Vec<usize> = cut.traced().iter().map(|q| q - 1).collect();
    let mut psi = Mat::zeros(1 << keep.len(), 1 << traced.len());
    for (b, &amp) in state.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let gather = |qs: &[usize]| qs.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((b >> q & 1) << k));
        psi[(gather(&keep), gather(&traced))] = amp;
    }
    Ok(psi)
}

fn gram_symmetric(psi: &Mat<f64>) -> Mat<f64> {
    let g = psi * psi.transpose();
    let d = g.nrows();
    Mat::from_fn(d, d, |r, c| 0.5 * (g[(r, c)] + g[(c, r)]))
}

/// Partial trace over the complement of the kept set.
pub fn reduced_density(state: &[f64], cut: &Cut) -> Result<DensityMatrix> {
    let psi = amplitude_matrix(state, cut)?;
    Ok(DensityMatrix { matrix: gram_symmetric(&psi) })
}

fn entropy_bits(probs: &[f64]) -> f64 {
    let s: f64 = probs.iter().filter(|&&p| p > DENSITY_CLAMP).map(|&p| -p * p.log2()).sum();
    s.max(0.0)
}

/// Von Neumann entropy (base 2) of the reduced state on the kept qubits.
pub fn entanglement_entropy(state: &[f64], cut: &Cut) -> Result<f64> {
    let psi = amplitude_matrix(state, cut)?;
    // both reduced states share their nonzero spectrum; use the smaller one
    let rho = if psi.nrows() <= psi.ncols() {
        gram_symmetric(&psi)
    } else {
        gram_symmetric(&psi.transpose().to_owned())
    };
    let probs = rho.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(entropy_bits(&probs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub index: usize,
    pub energy: f64,
    pub entropy_bits: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyProfile {
    pub cut: Cut,
    pub records: Vec<EntropyRecord>,
    /// Number of zero-energy eigenvectors replaced by satisfying basis states.
    pub rebased: usize,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    index: usize,
    energy: String,
    entropy_bits: String,
    degenerate_flag: u8,
}

/// Formats with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

impl EntropyProfile {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(CsvRow {
                index: r.index,
                energy: fmt12(r.energy),
                entropy_bits: fmt12(r.entropy_bits),
                degenerate_flag: u8::from(r.degenerate),
            })
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses records written by [`EntropyProfile::write_csv`].
    pub fn read_csv_records(r: impl Read) -> Result<Vec<EntropyRecord>> {
        let mut rd = csv::Reader::from_reader(r);
        rd.deserialize::<CsvRow>()
            .enumerate()
            .map(|(k, row)| {
                let row = row.map_err(csv_err)?;
                let num =
                    |s: &str| s.parse::<f64>().map_err(|e| Error::Parse { line: k + 2, msg: e.to_string() });
                Ok(EntropyRecord {
                    index: row.index,
                    energy: num(&row.energy)?,
                    entropy_bits: num(&row.entropy_bits)?,
                    degenerate: row.degenerate_flag != 0,
                })
            })
            .collect()
    }

    /// Records in the lowest `ceil(len / 4)` eigenstates.
    pub fn first_quarter(&self) -> &[EntropyRecord] {
        &self.records[..self.records.len().div_ceil(4)]
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line: 0, msg: format!("{other:?}") },
    }
}

fn profile_from_vectors(
    spec: &SpectrumResult,
    cut: &Cut,
    replace: &[(usize, usize)],
) -> Result<Vec<EntropyRecord>> {
    if spec.dim() != 1 << cut.n_qubits {
        return Err(Error::DimensionMismatch { expected: 1 << cut.n_qubits, found: spec.dim() });
    }
    let flags = spec.degeneracy_flags();
    (0..spec.dim())
        .into_par_iter()
        .map(|k| {
            let entropy_bits = match (replace.iter().find(|r| r.0 == k), &spec.vectors) {
                // basis states are product states
                (Some(_), _) | (None, Eigenvectors::Basis(_)) => 0.0,
                (None, Eigenvectors::Dense(_)) => entanglement_entropy(&spec.vector(k), cut)?,
            };
            Ok(EntropyRecord { index: k, energy: spec.eigenvalues[k], entropy_bits, degenerate: flags[k] })
        })
        .collect()
}

/// Entropy of every eigenstate as returned by the eigensolver.
pub fn entropy_profile(spec: &SpectrumResult, cut: &Cut) -> Result<EntropyProfile> {
    Ok(EntropyProfile { cut: cut.clone(), records: profile_from_vectors(spec, cut, &[])?, rebased: 0 })
}

/// Like [`entropy_profile`], but when the numerical ground space (eigenvalues
/// `<= tol`) spans exactly the satisfying basis states of `inst`, those
/// eigenvectors are replaced by the satisfying basis states themselves.
/// Excited degenerate subspaces are left as returned.
pub fn entropy_profile_rebased(
    spec: &SpectrumResult,
    inst: &Instance,
    cut: &Cut,
    tol: f64,
) -> Result<(EntropyProfile, GroundSpaceReport)> {
    let report = ground_space_check(inst, spec, tol)?;
    let replace: Vec<(usize, usize)> = if report.pass {
        let sat = satisfying_indices(inst, DEFAULT_EXHAUSTIVE_CAP)?;
        (0..report.ground_count).zip(sat).collect()
    } else {
        Vec::new()
    };
    let records = profile_from_vectors(spec, cut, &replace)?;
    Ok((EntropyProfile { cut: cut.clone(), records, rebased: replace.len() }, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    VacuouslyInapplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub basis_index: usize,
    /// `None` for a violation of the Hamiltonian residual rather than a clause.
    pub clause: Option<Clause>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrustrationReport {
    pub status: CheckStatus,
    pub tolerance: f64,
    pub satisfying_assignments: usize,
    pub clause_checks: usize,
    pub max_clause_norm: f64,
    pub max_hamiltonian_residual: f64,
    pub violations: Vec<Violation>,
}

/// Checks `C|z> = 0` for every clause and `||H|z>|| <= tol` for every satisfying `z`.
pub fn verify_frustration_free(inst: &Instance, h: &OperatorMatrix, tol: f64) -> Result<FrustrationReport> {
    if h.dim() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: h.dim() });
    }
    let sat = satisfying_indices(inst, DEFAULT_EXHAUSTIVE_CAP)?;
    let mut report = FrustrationReport {
        status: CheckStatus::VacuouslyInapplicable,
        tolerance: tol,
        satisfying_assignments: sat.len(),
        clause_checks: 0,
        max_clause_norm: 0.0,
        max_hamiltonian_residual: 0.0,
        violations: Vec::new(),
    };
    if sat.is_empty() {
        return Ok(report);
    }
    for &b in &sat {
        for c in inst.clauses() {
            report.clause_checks += 1;
            // C is a 0/1 diagonal mask, so ||C|z>|| is its entry at z
            if c.violated_by_index(b) {
                report.max_clause_norm = 1.0;
                report.violations.push(Violation { basis_index: b, clause: Some(*c), magnitude: 1.0 });
            }
        }
        let norm = h.column(b).iter().map(|x| x * x).sum::<f64>().sqrt();
        report.max_hamiltonian_residual = report.max_hamiltonian_residual.max(norm);
        if norm > tol {
            report.violations.push(Violation { basis_index: b, clause: None, magnitude: norm });
        }
    }
    report.status = if report.violations.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundSpaceReport {
    pub pass: bool,
    pub tolerance: f64,
    pub min_eigenvalue: f64,
    pub min_eigenvalue_ok: bool,
    pub ground_count: usize,
    pub satisfying_count: usize,
    pub count_ok: bool,
    /// `max |P_numeric - P_satisfying|` over all entries.
    pub projector_diff_max: f64,
    pub span_ok: bool,
}

/// Projector difference `max |sum_k v_k v_k^T - sum_z e_z e_z^T|`.
fn projector_diff(spec: &SpectrumResult, ground: usize, sat: &[usize]) -> f64 {
    let dim = spec.dim();
    let mut in_sat = vec![false; dim];
    sat.iter().for_each(|&b| in_sat[b] = true);
    match &spec.vectors {
        Eigenvectors::Basis(perm) => {
            let mut in_ground = vec![false; dim];
            perm[..ground].iter().for_each(|&b| in_ground[b] = true);
            if in_ground == in_sat {
                0.0
            } else {
                1.0
            }
        }
        Eigenvectors::Dense(v) => {
            // P = I - (excited projector) when that side is smaller
            let (cols, complement) =
                if ground <= dim - ground { (0..ground, false) } else { (ground..dim, true) };
            let sub = v.subcols(cols.start, cols.len());
            let p = sub * sub.transpose();
            let mut worst: f64 = 0.0;
            for c in 0..dim {
                for r in 0..dim {
                    let target = if r == c && (in_sat[r] != complement) { 1.0 } else { 0.0 };
                    worst = worst.max((p[(r, c)] - target).abs());
                }
            }
            worst
        }
    }
}

/// Compares the numerical zero-energy eigenspace with the span of satisfying basis states.
pub fn ground_space_check(inst: &Instance, spec: &SpectrumResult, tol: f64) -> Result<GroundSpaceReport> {
    if spec.dim() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: spec.dim() });
    }
    let sat = satisfying_indices(inst, DEFAULT_EXHAUSTIVE_CAP)?;
    let min_eigenvalue = spec.eigenvalues[0];
    let ground_count = spec.eigenvalues.iter().take_while(|&&l| l <= tol).count();
    let min_eigenvalue_ok = min_eigenvalue.abs() <= tol;
    let count_ok = ground_count == sat.len();
    let projector_diff_max = projector_diff(spec, ground_count, &sat);
    let span_ok = count_ok && projector_diff_max <= tol;
    Ok(GroundSpaceReport {
        pass: min_eigenvalue_ok && count_ok && span_ok,
        tolerance: tol,
        min_eigenvalue,
        min_eigenvalue_ok,
        ground_count,
        satisfying_count: sat.len(),
        count_ok,
        projector_diff_max,
        span_ok,
    })
}

/// Gaps smaller than this are treated as exact degeneracies and skipped.
pub const GAP_DEGENERACY: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRatio {
    pub mean: f64,
    pub ratios: usize,
    pub degenerate_gaps_excluded: usize,
}

/// Mean of `min(d_k, d_{k+1}) / max(d_k, d_{k+1})` over consecutive level
/// spacings inside `window`.
pub fn gap_ratio_stat(eigenvalues: &[f64], window: Range<usize>) -> Result<GapRatio> {
    let w = eigenvalues
        .get(window.clone())
        .ok_or(Error::DimensionMismatch { expected: eigenvalues.len(), found: window.end })?;
    if w.len() < 3 {
        return Err(Error::WindowTooShort(w.len()));
    }
    let all: Vec<f64> = w.windows(2).map(|p| p[1] - p[0]).collect();
    let gaps: Vec<f64> = all.iter().copied().filter(|&d| d >= GAP_DEGENERACY).collect();
    if gaps.len() < 2 {
        return Err(Error::WindowTooShort(gaps.len() + 1));
    }
    let rs: Vec<f64> = gaps.windows(2).map(|p| p[0].min(p[1]) / p[0].max(p[1])).collect();
    Ok(GapRatio {
        mean: rs.iter().sum::<f64>() / rs.len() as f64,
        ratios: rs.len(),
        degenerate_gaps_excluded: all.len() - gaps.len(),
    })
}
