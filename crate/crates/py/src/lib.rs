//! Python bindings. Documents go in and reports come out as JSON strings.

use logmoduli::document::parse_document;
use logmoduli::report::{self, Command, Options};
use logmoduli::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Run one analysis on a graph document. Returns (report_json, violation).
#[pyfunction]
#[pyo3(signature = (command, document, characters=None, bound=None, expect_trivial=false))]
fn run(
    command: &str,
    document: &str,
    characters: Option<Vec<Vec<i64>>>,
    bound: Option<i64>,
    expect_trivial: bool,
) -> PyResult<(String, bool)> {
    let cmd: Command = command.parse().map_err(py_err)?;
    let doc = parse_document(document).map_err(py_err)?;
    let opts = Options { characters, bound, expect_trivial };
    let out = report::run(cmd, &doc, &opts).map_err(py_err)?;
    Ok((out.report.to_string(), out.violation))
}

#[pyfunction]
fn commands() -> Vec<&'static str> {
    Command::ALL.iter().map(|c| c.name()).collect()
}

#[pymodule]
fn logmoduli_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(commands, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
