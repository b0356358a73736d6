//! Python bindings. Matrices cross the boundary as nested lists; heavy work
//! runs with the interpreter detached.

use std::path::PathBuf;

use mnae::anneal::{gap_scan_with_cap, uniform_grid};
use mnae::ops::{self, build_hent, build_hent_general};
use mnae::sat::{self, Clause, DEFAULT_EXHAUSTIVE_CAP};
use mnae::spectra::{self, Cut, DEFAULT_DIM_CAP};
use mnae::{BitString, ClauseOperators, Instance, OperatorMatrix, PairOperators};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList};
use serde_json::Value;

create_exception!(mnae, MnaeError, PyValueError);

fn err(e: mnae::Error) -> PyErr {
    MnaeError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, x) in o {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py>(py: Python<'py>, x: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| MnaeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn cut_for(n: usize, keep: Option<Vec<usize>>) -> PyResult<Cut> {
    match keep {
        Some(k) => Cut::new(n, k),
        None => Cut::half(n),
    }
    .map_err(err)
}

/// Monotone NAE-3SAT instance: `n_qubits` and a list of 1-based triples.
#[pyclass(name = "Instance", module = "mnae", frozen)]
struct PyInstance {
    inner: Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(n_qubits: usize, clauses: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        let clauses = clauses
            .into_iter()
            .map(|(i, j, m)| Clause::new(i, j, m))
            .collect::<mnae::Result<Vec<_>>>()
            .map_err(err)?;
        Ok(Self { inner: Instance::new(n_qubits, clauses).map_err(err)? })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: Instance::from_text(text).map_err(err)? })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: Instance::read(path).map_err(err)? })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write(path).map_err(err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn n_clauses(&self) -> usize {
        self.inner.n_clauses()
    }

    #[getter]
    fn clauses(&self) -> Vec<(usize, usize, usize)> {
        self.inner.clauses().iter().map(|c| c.indices().into()).collect()
    }

    /// Number of violated clauses for a `+1/-1` assignment.
    fn cost(&self, bits: Vec<i8>) -> PyResult<usize> {
        classical_cost(bits, self)
    }

    fn satisfying(&self, py: Python<'_>) -> PyResult<Vec<Vec<i8>>> {
        enumerate_satisfying(py, self)
    }

    fn __repr__(&self) -> String {
        format!("Instance(n_qubits={}, n_clauses={})", self.inner.n_qubits(), self.inner.n_clauses())
    }
}

/// Real symmetric operator on `n_qubits` qubits.
#[pyclass(name = "Operator", module = "mnae", frozen)]
struct PyOperator {
    inner: OperatorMatrix,
}

impl From<OperatorMatrix> for PyOperator {
    fn from(inner: OperatorMatrix) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyOperator {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn is_diagonal(&self) -> bool {
        self.inner.is_diagonal()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<f64> {
        if row >= self.inner.dim() || col >= self.inner.dim() {
            return Err(MnaeError::new_err(format!("({row}, {col}) outside dimension {}", self.inner.dim())));
        }
        Ok(self.inner.get(row, col))
    }

    fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.inner.dim();
        let m = self.inner.to_dense();
        (0..d).map(|r| (0..d).map(|c| m[(r, c)]).collect()).collect()
    }

    fn apply(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&v).map_err(err)
    }

    /// Coordinate-format text.
    fn to_coo(&self) -> String {
        self.inner.to_coo_string()
    }

    #[staticmethod]
    fn from_coo(text: &str) -> PyResult<Self> {
        Ok(OperatorMatrix::from_coo_reader(text.as_bytes()).map_err(err)?.into())
    }

    fn write_coo(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write_coo(path).map_err(err)
    }

    #[staticmethod]
    fn read_coo(path: PathBuf) -> PyResult<Self> {
        Ok(OperatorMatrix::read_coo(path).map_err(err)?.into())
    }

    #[pyo3(signature = (dim_cap = DEFAULT_DIM_CAP))]
    fn eigenvalues(&self, py: Python<'_>, dim_cap: usize) -> PyResult<Vec<f64>> {
        py.detach(|| spectra::eigenvalues(&self.inner, dim_cap)).map_err(err)
    }

    fn __repr__(&self) -> String {
        let kind = match self.inner.storage() {
            ops::Storage::Diagonal(_) => "diagonal",
            ops::Storage::Sparse(_) => "sparse",
            ops::Storage::Dense(_) => "dense",
        };
        format!("Operator(n_qubits={}, {kind})", self.inner.n_qubits())
    }
}

#[pyfunction]
#[pyo3(signature = (n, m, solutions = 2, seed = 0, max_tries = 10_000))]
fn random_instance(
    py: Python<'_>,
    n: usize,
    m: usize,
    solutions: usize,
    seed: u64,
    max_tries: usize,
) -> PyResult<PyInstance> {
    let inner = py.detach(|| sat::random_instance(n, m, solutions, seed, max_tries)).map_err(err)?;
    Ok(PyInstance { inner })
}

#[pyfunction]
fn classical_cost(bits: Vec<i8>, inst: &PyInstance) -> PyResult<usize> {
    let z = BitString::new(bits).map_err(err)?;
    sat::classical_cost(&z, &inst.inner).map_err(err)
}

#[pyfunction]
fn enumerate_satisfying(py: Python<'_>, inst: &PyInstance) -> PyResult<Vec<Vec<i8>>> {
    let sols = py.detach(|| sat::enumerate_satisfying(&inst.inner)).map_err(err)?;
    Ok(sols.into_iter().map(|z| z.bits().to_vec()).collect())
}

#[pyfunction]
fn clause_projector(n_qubits: usize, clause: (usize, usize, usize)) -> PyResult<PyOperator> {
    let c = Clause::new(clause.0, clause.1, clause.2).map_err(err)?;
    Ok(ops::build_clause_projector(n_qubits, &c).map_err(err)?.into())
}

#[pyfunction]
fn hp(inst: &PyInstance) -> PyOperator {
    ops::build_hp(&inst.inner).into()
}

fn a_or_default(inst: &Instance, a: Option<&PyOperator>) -> OperatorMatrix {
    a.map_or_else(|| ops::build_a_uniform_x(inst.n_qubits()), |op| op.inner.clone())
}

/// Sum of `C A C` over clauses, with `A = 1 + (1/N) sum X` unless given.
#[pyfunction]
#[pyo3(signature = (inst, a = None))]
fn hent(py: Python<'_>, inst: &PyInstance, a: Option<&PyOperator>) -> PyResult<PyOperator> {
    let a = ClauseOperators::uniform(&inst.inner, a_or_default(&inst.inner, a));
    Ok(py.detach(|| build_hent(&inst.inner, &a)).map_err(err)?.into())
}

/// Sum of `C_b A C_a` over all ordered clause pairs, same `A` everywhere.
#[pyfunction]
#[pyo3(signature = (inst, a = None))]
fn hent_general(py: Python<'_>, inst: &PyInstance, a: Option<&PyOperator>) -> PyResult<PyOperator> {
    let a = PairOperators::uniform(&inst.inner, a_or_default(&inst.inner, a));
    Ok(py.detach(|| build_hent_general(&inst.inner, &a)).map_err(err)?.into())
}

#[pyfunction]
fn a_uniform_x(n_qubits: usize) -> PyOperator {
    ops::build_a_uniform_x(n_qubits).into()
}

#[pyfunction]
fn identity(n_qubits: usize) -> PyOperator {
    OperatorMatrix::identity(n_qubits).into()
}

#[pyfunction]
fn ising(n_qubits: usize) -> PyOperator {
    ops::build_ising(n_qubits).into()
}

#[pyfunction]
fn h0(n_qubits: usize) -> PyOperator {
    ops::build_h0_transverse(n_qubits).into()
}

#[pyfunction]
#[pyo3(signature = (op, dim_cap = DEFAULT_DIM_CAP))]
fn eigenvalues(py: Python<'_>, op: &PyOperator, dim_cap: usize) -> PyResult<Vec<f64>> {
    op.eigenvalues(py, dim_cap)
}

/// Von Neumann entropy in bits of the subsystem `keep` (default: upper half).
#[pyfunction]
#[pyo3(signature = (state, n_qubits, keep = None))]
fn entanglement_entropy(state: Vec<f64>, n_qubits: usize, keep: Option<Vec<usize>>) -> PyResult<f64> {
    spectra::entanglement_entropy(&state, &cut_for(n_qubits, keep)?).map_err(err)
}

/// Column-oriented entropy profile. With `inst`, the zero-energy eigenspace
/// is re-based onto satisfying basis states when it matches them.
#[pyfunction]
#[pyo3(signature = (op, inst = None, keep = None, tol = 1e-8, dim_cap = DEFAULT_DIM_CAP))]
fn entropy_profile<'py>(
    py: Python<'py>,
    op: &PyOperator,
    inst: Option<&PyInstance>,
    keep: Option<Vec<usize>>,
    tol: f64,
    dim_cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cut = cut_for(op.inner.n_qubits(), keep)?;
    let (profile, report) = py
        .detach(|| -> mnae::Result<_> {
            let spec = spectra::full_spectrum_with_cap(&op.inner, dim_cap)?;
            match inst {
                Some(i) => {
                    let (p, r) = spectra::entropy_profile_rebased(&spec, &i.inner, &cut, tol)?;
                    Ok((p, Some(r)))
                }
                None => Ok((spectra::entropy_profile(&spec, &cut)?, None)),
            }
        })
        .map_err(err)?;
    let out = PyDict::new(py);
    let r = &profile.records;
    out.set_item("index", r.iter().map(|x| x.index).collect::<Vec<_>>())?;
    out.set_item("energy", r.iter().map(|x| x.energy).collect::<Vec<_>>())?;
    out.set_item("entropy_bits", r.iter().map(|x| x.entropy_bits).collect::<Vec<_>>())?;
    out.set_item("degenerate", r.iter().map(|x| x.degenerate).collect::<Vec<_>>())?;
    out.set_item("keep", cut.keep().to_vec())?;
    out.set_item("rebased", profile.rebased)?;
    out.set_item("ground_space", serialize(py, &report)?)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (inst, op, tol = 1e-10))]
fn verify_frustration_free<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    op: &PyOperator,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = spectra::verify_frustration_free(&inst.inner, &op.inner, tol).map_err(err)?;
    serialize(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (inst, op, tol = 1e-8))]
fn ground_space_check<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    op: &PyOperator,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = py
        .detach(|| spectra::ground_space_check(&inst.inner, &spectra::full_spectrum(&op.inner)?, tol))
        .map_err(err)?;
    serialize(py, &rep)
}

/// Gaps of `(1 - s) h0 + s hp` on a uniform grid; `h0` defaults to the transverse driver.
#[pyfunction]
#[pyo3(signature = (hp, grid = mnae::anneal::DEFAULT_GRID_POINTS, h0 = None, dim_cap = DEFAULT_DIM_CAP))]
fn gap_scan<'py>(
    py: Python<'py>,
    hp: &PyOperator,
    grid: usize,
    h0: Option<&PyOperator>,
    dim_cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let driver = h0.map_or_else(|| ops::build_h0_transverse(hp.inner.n_qubits()), |h| h.inner.clone());
    let scan =
        py.detach(|| gap_scan_with_cap(&driver, &hp.inner, &uniform_grid(grid), dim_cap)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("s", scan.records.iter().map(|r| r.s).collect::<Vec<_>>())?;
    out.set_item("gap01", scan.records.iter().map(|r| r.gap01).collect::<Vec<_>>())?;
    out.set_item("gap02", scan.records.iter().map(|r| r.gap02).collect::<Vec<_>>())?;
    out.set_item("min_gap01", serialize(py, &scan.min_gap01)?)?;
    out.set_item("min_gap02", serialize(py, &scan.min_gap02)?)?;
    Ok(out)
}

/// Mean adjacent gap ratio over `eigenvalues[start:stop]` (default: middle half).
#[pyfunction]
#[pyo3(signature = (eigenvalues, start = None, stop = None))]
fn gap_ratio<'py>(
    py: Python<'py>,
    eigenvalues: Vec<f64>,
    start: Option<usize>,
    stop: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = eigenvalues.len();
    let window = start.unwrap_or(d / 4)..stop.unwrap_or(3 * d / 4);
    serialize(py, &spectra::gap_ratio_stat(&eigenvalues, window).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "mnae")]
fn mnae_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MnaeError", m.py().get_type::<MnaeError>())?;
    m.add("DEFAULT_EXHAUSTIVE_CAP", DEFAULT_EXHAUSTIVE_CAP)?;
    m.add("DEFAULT_DIM_CAP", DEFAULT_DIM_CAP)?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyOperator>()?;
    m.add_function(wrap_pyfunction!(random_instance, m)?)?;
    m.add_function(wrap_pyfunction!(classical_cost, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_satisfying, m)?)?;
    m.add_function(wrap_pyfunction!(clause_projector, m)?)?;
    m.add_function(wrap_pyfunction!(hp, m)?)?;
    m.add_function(wrap_pyfunction!(hent, m)?)?;
    m.add_function(wrap_pyfunction!(hent_general, m)?)?;
    m.add_function(wrap_pyfunction!(a_uniform_x, m)?)?;
    m.add_function(wrap_pyfunction!(identity, m)?)?;
    m.add_function(wrap_pyfunction!(ising, m)?)?;
    m.add_function(wrap_pyfunction!(h0, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_profile, m)?)?;
    m.add_function(wrap_pyfunction!(verify_frustration_free, m)?)?;
    m.add_function(wrap_pyfunction!(ground_space_check, m)?)?;
    m.add_function(wrap_pyfunction!(gap_scan, m)?)?;
    m.add_function(wrap_pyfunction!(gap_ratio, m)?)?;
    Ok(())
}
