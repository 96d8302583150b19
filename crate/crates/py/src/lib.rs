//! Python module `gcs`.

use gcs_core::codec::{parse_gcs_records, write_gcs};
use gcs_core::constructions::{execute_plan, golay_pair_plan, ArbitraryConfig, GcsSet, Planner};
use gcs_core::golay::{golay_numbers, is_golay};
use gcs_core::hadamard::{goethals_seidel_8n, verify_hadamard_full, PMMatrix};
use gcs_core::seq::{auto_profile, CorrMode};
use gcs_core::QSeq;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Sequence over `{0, ±1, ±i}`.
#[pyclass(name = "QSeq", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyQSeq(QSeq);

#[pymethods]
impl PyQSeq {
    /// Parses `1,-1,i,-i,0`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse::<QSeq>().map(PyQSeq).map_err(value_err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QSeq('{}')", self.0)
    }

    /// Entries as `(re, im)` pairs.
    fn entries(&self) -> Vec<(i64, i64)> {
        self.0.iter().map(|g| (g.re, g.im)).collect()
    }

    /// Autocorrelation at `lag` as `(re, im)`.
    #[pyo3(signature = (lag, periodic = false))]
    fn autocorr(&self, lag: i64, periodic: bool) -> (i64, i64) {
        let mode = if periodic { CorrMode::Periodic } else { CorrMode::Aperiodic };
        let g = auto_profile(&self.0, mode).at(lag);
        (g.re, g.im)
    }

    fn kron(&self, other: &PyQSeq) -> PyQSeq {
        PyQSeq(self.0.kron(&other.0))
    }

    fn flip_conj(&self) -> PyQSeq {
        PyQSeq(self.0.flip_conj())
    }
}

/// Certified complementary set.
#[pyclass(name = "GcsSet", frozen)]
pub struct PyGcsSet(GcsSet);

#[pymethods]
impl PyGcsSet {
    /// Certifies the given sequences; raises `ValueError` when they are not complementary.
    #[new]
    fn new(seqs: Vec<PyRef<'_, PyQSeq>>) -> PyResult<Self> {
        GcsSet::certify(seqs.iter().map(|s| s.0.clone()).collect()).map(PyGcsSet).map_err(value_err)
    }

    /// Parses the first record of a sequence file.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let rec = parse_gcs_records(text).map_err(value_err)?;
        let seqs = rec.into_iter().next().ok_or_else(|| value_err("no records"))?;
        GcsSet::certify(seqs).map(PyGcsSet).map_err(value_err)
    }

    fn __len__(&self) -> usize {
        self.0.cardinality()
    }

    #[getter]
    fn length(&self) -> usize {
        self.0.max_len()
    }

    fn seqs(&self) -> Vec<PyQSeq> {
        self.0.seqs().iter().cloned().map(PyQSeq).collect()
    }

    /// Re-runs the full correlation check.
    fn verify(&self) -> PyResult<bool> {
        self.0.verify().map(|r| r.ok).map_err(runtime_err)
    }

    fn to_text(&self) -> String {
        write_gcs(self.0.seqs())
    }
}

/// Complementary pair of a 4-phase Golay-number length.
#[pyfunction]
fn pair(n: u64) -> PyResult<PyGcsSet> {
    let plan = golay_pair_plan(n).ok_or_else(|| value_err(format!("{n} is not a 4-phase Golay number")))?;
    execute_plan(&plan, None).map(PyGcsSet).map_err(runtime_err)
}

fn planner(bound: u64) -> PyResult<Planner> {
    Planner::new(ArbitraryConfig { p: None, verified_bound: bound }, None).map_err(runtime_err)
}

/// Complementary quad of length `n`.
#[pyfunction]
fn quad(n: u64) -> PyResult<PyGcsSet> {
    let pl = planner(100_000)?;
    let plan = pl.quad_plan(n).ok_or_else(|| value_err(format!("no quad recipe for length {n}")))?;
    execute_plan(&plan, Some(pl.corpus())).map(PyGcsSet).map_err(runtime_err)
}

/// Complementary set of any length `n`.
#[pyfunction]
#[pyo3(signature = (n, bound = 100_000))]
fn build(n: u64, bound: u64) -> PyResult<PyGcsSet> {
    let pl = planner(bound)?;
    let plan = pl.plan(n).map_err(value_err)?;
    execute_plan(&plan, Some(pl.corpus())).map(PyGcsSet).map_err(runtime_err)
}

/// Hadamard matrix of order `8n` as rows of `±1`.
#[pyfunction]
fn hadamard(n: u64) -> PyResult<Vec<Vec<i8>>> {
    let q = quad(n)?;
    goethals_seidel_8n(&q.0).map(|h| h.to_rows()).map_err(runtime_err)
}

/// Whether rows of `±1` form a Hadamard matrix.
#[pyfunction]
fn is_hadamard(rows: Vec<Vec<i8>>) -> PyResult<bool> {
    let h = PMMatrix::from_rows(&rows).ok_or_else(|| value_err("rows must be square and ±1"))?;
    Ok(verify_hadamard_full(&h).ok)
}

#[pyfunction(name = "is_golay")]
fn py_is_golay(n: u64) -> bool {
    is_golay(n)
}

#[pyfunction(name = "golay_numbers")]
fn py_golay_numbers(n: u64) -> Vec<u64> {
    golay_numbers(n)
}

#[pymodule]
pub fn gcs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQSeq>()?;
    m.add_class::<PyGcsSet>()?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(quad, m)?)?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(is_hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(py_is_golay, m)?)?;
    m.add_function(wrap_pyfunction!(py_golay_numbers, m)?)?;
    Ok(())
}
