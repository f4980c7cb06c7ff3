//! Python bindings: documents, the command stages and a few exact-algebra
//! helpers. Reports come back as JSON text.

use dlw::cli::{self, Cli, Command, Format, SynthKind};
use dlw::exactalg::{cohomology_at, smith_diagonal, Int, Matrix};
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: dlw::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn command(name: &str) -> PyResult<Command> {
    Ok(match name {
        "lim" => Command::Lim,
        "coherence" => Command::Coherence,
        "delta" => Command::Delta,
        "partition" => Command::Partition,
        "propagate" => Command::Propagate,
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    })
}

fn synth_kind(name: &str) -> PyResult<SynthKind> {
    Ok(match name {
        "pipeline" => SynthKind::Pipeline,
        "lim" => SynthKind::Lim,
        "delta" => SynthKind::Delta,
        other => return Err(PyValueError::new_err(format!("unknown synth kind {other:?}"))),
    })
}

fn matrix(rows: Vec<Vec<BigInt>>, nrows: usize, ncols: usize) -> PyResult<Matrix<Int>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(format!("expected a {nrows}x{ncols} matrix")));
    }
    Matrix::from_vec(nrows, ncols, rows.into_iter().flatten().collect()).map_err(value_err)
}

/// A validated input document.
#[pyclass(name = "Document", module = "dlw_py")]
struct PyDocument {
    inner: cli::Document,
}

#[pymethods]
impl PyDocument {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = cli::Document::from_json(text).map_err(value_err)?;
        inner.load().map_err(value_err)?;
        Ok(PyDocument { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (kind = "pipeline", seed = 0))]
    fn synth(kind: &str, seed: u64) -> PyResult<Self> {
        let inner = cli::synth_document(synth_kind(kind)?, seed).map_err(value_err)?;
        Ok(PyDocument { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Canonical form: parse, rebuild, serialize.
    fn normalized(&self) -> PyResult<Self> {
        let inner = self.inner.normalized().map_err(value_err)?;
        Ok(PyDocument { inner })
    }

    /// Run a stage; returns `(exit_code, report_json)`.
    #[pyo3(signature = (name, n_max = None))]
    fn run(&self, name: &str, n_max: Option<usize>) -> PyResult<(i32, String)> {
        run(name, &self.inner.to_json(), n_max)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Run a stage on document text; returns `(exit_code, report_json)`.
#[pyfunction]
#[pyo3(signature = (name, text, n_max = None))]
fn run(name: &str, text: &str, n_max: Option<usize>) -> PyResult<(i32, String)> {
    let command = command(name)?;
    let cli = Cli {
        command,
        input: None,
        n_max,
        seed: 0,
        output: None,
        format: Format::Json,
    };
    let out = cli::run_on_text(command, text, &cli);
    Ok((out.code, out.output))
}

/// `[(name, cases, failures, passed)]` for the built-in suite.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn selftest(seed: u64) -> Vec<(String, usize, usize, bool)> {
    cli::selftest(seed)
        .into_iter()
        .map(|c| (c.name.to_string(), c.cases, c.failures, c.passed()))
        .collect()
}

/// Nonzero invariant factors of an integer matrix.
#[pyfunction]
fn smith(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let nrows = rows.len();
    Ok(smith_diagonal(&matrix(rows, nrows, ncols)?))
}

/// `ker d_next / im d_prev` over the integers as `(free_rank, torsion)`;
/// `dim` is the rank of the middle group.
#[pyfunction]
fn cohomology(d_prev: Vec<Vec<BigInt>>, d_next: Vec<Vec<BigInt>>, dim: usize) -> PyResult<(usize, Vec<BigInt>)> {
    let prev_cols = d_prev.first().map_or(0, Vec::len);
    let prev = matrix(d_prev, dim, prev_cols)?;
    let next_rows = d_next.len();
    let next = matrix(d_next, next_rows, dim)?;
    let g = cohomology_at(&prev, &next).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((g.free_rank, g.invariant_factors))
}

#[pymodule]
pub fn dlw_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDocument>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_function(wrap_pyfunction!(smith, m)?)?;
    m.add_function(wrap_pyfunction!(cohomology, m)?)?;
    Ok(())
}
