use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use zetahopf_core::bigfloat::{bits_for_digits, BigFloat};
use zetahopf_core::exact::{LinComb, Rational};
use zetahopf_core::graph::OrderedRootedGraph;
use zetahopf_core::matrix::TraceWord;
use zetahopf_core::numerics::{NumericResult, Rigor, ZetaCache};
use zetahopf_core::selberg::SelbergSpec;
use zetahopf_core::trees::RootedTree;
use zetahopf_core::words::{Composition, Word};
use zetahopf_core::{matrix, numerics, quadrature, relation, selberg, trees, verify, words, Error};

create_exception!(zetahopf, ComputationError, PyException, "A computation failed: divergence, envelope or precision limits.");

fn to_py(e: Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    if e.is_usage() {
        PyValueError::new_err(msg)
    } else {
        ComputationError::new_err(msg)
    }
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((q.to_string(),))
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let s: String = x.str()?.extract()?;
    s.parse().map_err(to_py)
}

fn lincomb_dict<'py, B: Ord + Clone + std::fmt::Display>(py: Python<'py>, l: &LinComb<B>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (b, c) in l.iter() {
        d.set_item(b.to_string(), fraction(py, c)?)?;
    }
    Ok(d)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((v.to_string(),))
}

/// A number with a certified (or, for quadrature, estimated) error bound.
#[pyclass(name = "NumericResult", frozen)]
struct PyNumeric(NumericResult);

#[pymethods]
impl PyNumeric {
    /// Decimal string with `digits` significant digits.
    #[getter]
    fn value(&self) -> String {
        self.0.value_string()
    }

    #[getter]
    fn error_bound(&self) -> String {
        self.0.error_string()
    }

    #[getter]
    fn rigor(&self) -> &'static str {
        self.0.rigor.as_str()
    }

    #[getter]
    fn digits(&self) -> u32 {
        self.0.digits
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __repr__(&self) -> String {
        format!("NumericResult({} ± {}, {})", self.0.value_string(), self.0.error_string(), self.0.rigor)
    }
}

#[pyclass(name = "Word", frozen, eq, ord, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyWord(Word);

#[pymethods]
impl PyWord {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyWord).map_err(to_py)
    }

    #[getter]
    fn weight(&self) -> usize {
        self.0.weight()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    fn is_admissible(&self) -> bool {
        words::is_admissible(&self.0)
    }

    fn dual(&self) -> PyResult<PyWord> {
        words::dual(&self.0).map(PyWord).map_err(to_py)
    }

    fn composition(&self) -> PyResult<PyComposition> {
        words::composition_from_word(&self.0).map(PyComposition).map_err(to_py)
    }

    /// Shuffle product as {word: Fraction}.
    fn shuffle<'py>(&self, py: Python<'py>, other: &PyWord) -> PyResult<Bound<'py, PyDict>> {
        lincomb_dict(py, &words::shuffle(&self.0, &other.0))
    }

    /// Deconcatenation coproduct as a list of (left, right) words.
    fn deconcatenate(&self) -> Vec<(String, String)> {
        words::deconcat_coproduct(&self.0).into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}')", self.0)
    }
}

#[pyclass(name = "Composition", frozen, eq, ord, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyComposition(Composition);

#[pymethods]
impl PyComposition {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyComposition).map_err(to_py)
    }

    #[getter]
    fn parts(&self) -> Vec<u32> {
        self.0.parts().to_vec()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.0.weight()
    }

    fn word(&self) -> PyWord {
        PyWord(words::word_from_composition(&self.0))
    }

    /// Stuffle product as {composition: Fraction}.
    fn stuffle<'py>(&self, py: Python<'py>, other: &PyComposition) -> PyResult<Bound<'py, PyDict>> {
        lincomb_dict(py, &words::stuffle(&self.0, &other.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Composition('{}')", self.0)
    }
}

#[pyclass(name = "RootedTree", frozen, eq, ord, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyTree(RootedTree);

#[pymethods]
impl PyTree {
    /// Parenthesis encoding, e.g. "(()())".
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyTree).map_err(to_py)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    /// Connes–Kreimer coproduct as a list of (coefficient, forest, tree).
    fn coproduct<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Bound<'py, PyAny>, String, String)>> {
        trees::coproduct(&self.0)
            .iter()
            .map(|((a, b), c)| Ok((fraction(py, c)?, a.to_string(), b.to_string())))
            .collect()
    }

    /// Antipode as {forest: Fraction}.
    fn antipode<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        lincomb_dict(py, &trees::antipode(&self.0))
    }

    /// Pre-Lie grafting of `other` onto each vertex, as {tree: Fraction}.
    fn graft<'py>(&self, py: Python<'py>, other: &PyTree) -> PyResult<Bound<'py, PyDict>> {
        lincomb_dict(py, &trees::graft(&self.0, &other.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RootedTree('{}')", self.0)
    }
}

#[pyfunction]
fn generate_trees(n: usize) -> PyResult<Vec<PyTree>> {
    trees::generate_trees(n).map(|v| v.into_iter().map(PyTree).collect()).map_err(to_py)
}

/// Ordered rooted graph for Selberg-type integrals.
#[pyclass(name = "Graph", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph(OrderedRootedGraph);

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        OrderedRootedGraph::from_json(text).map(PyGraph).map_err(to_py)
    }

    /// ∫₀¹ t^{aε} (1−t)^{bε} dt.
    #[staticmethod]
    fn beta(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyGraph(OrderedRootedGraph::beta(rational(a)?, rational(b)?)))
    }

    #[staticmethod]
    fn selberg(n: usize, alpha: &Bound<'_, PyAny>, beta: &Bound<'_, PyAny>, gamma: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyGraph(OrderedRootedGraph::selberg_symmetric(n, &rational(alpha)?, &rational(beta)?, &rational(gamma)?)))
    }

    #[staticmethod]
    fn empty() -> Self {
        PyGraph(OrderedRootedGraph::empty())
    }

    #[staticmethod]
    fn from_word(word: &PyWord) -> PyResult<Self> {
        zetahopf_core::bridge::word_graph(&word.0).map(PyGraph).map_err(to_py)
    }

    fn disjoint_union(&self, other: &PyGraph) -> PyGraph {
        PyGraph(self.0.disjoint_union(&other.0))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Graph({})", self.0)
    }
}

fn spec(g: &PyGraph, x: Option<f64>) -> PyResult<SelbergSpec> {
    SelbergSpec::new(g.0.clone(), x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (composition, digits = 30))]
fn zeta(py: Python<'_>, composition: &str, digits: u32) -> PyResult<PyNumeric> {
    let c: Composition = composition.parse().map_err(to_py)?;
    py.detach(|| numerics::zeta(&c, digits)).map(PyNumeric).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (word, digits = 12))]
fn iterated_integral(py: Python<'_>, word: &str, digits: u32) -> PyResult<PyNumeric> {
    let w: Word = word.parse().map_err(to_py)?;
    py.detach(|| quadrature::iterated_integral(&w, digits)).map(PyNumeric).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (graph, eps = 0.0, digits = 12, x = None))]
fn selberg_value(py: Python<'_>, graph: &PyGraph, eps: f64, digits: u32, x: Option<f64>) -> PyResult<PyNumeric> {
    let s = spec(graph, x)?;
    py.detach(|| selberg::selberg_value(&s, eps, digits)).map(PyNumeric).map_err(to_py)
}

/// Taylor coefficients in ε, raw or with the Γ-type normalization divided out.
#[pyfunction]
#[pyo3(signature = (graph, order, digits = 12, normalized = false, x = None))]
fn epsilon_expand(
    py: Python<'_>,
    graph: &PyGraph,
    order: usize,
    digits: u32,
    normalized: bool,
    x: Option<f64>,
) -> PyResult<Vec<PyNumeric>> {
    let s = spec(graph, x)?;
    let e = py.detach(|| {
        if normalized {
            selberg::normalized_expand(&s, order, digits)
        } else {
            selberg::epsilon_expand(&s, order, digits)
        }
    });
    Ok(e.map_err(to_py)?.coefficients.into_iter().map(PyNumeric).collect())
}

/// ⟨∏ Tr X^{k}⟩ as {power of N: coefficient}.
#[pyfunction]
fn gue_moment(trace_word: &str) -> PyResult<BTreeMap<u32, String>> {
    let tw: TraceWord = trace_word.parse().map_err(to_py)?;
    let p = matrix::gue_moment(&tw).map_err(to_py)?;
    Ok(p.coeffs.iter().map(|(k, c)| (*k, c.to_string())).collect())
}

#[pyfunction]
fn genus_expansion(trace_word: &str) -> PyResult<BTreeMap<u32, u64>> {
    let tw: TraceWord = trace_word.parse().map_err(to_py)?;
    matrix::genus_expansion(&tw).map_err(to_py)
}

/// Monte Carlo estimate and standard error.
#[pyfunction]
#[pyo3(signature = (trace_word, n, samples = 100_000, seed = 0, jobs = 1))]
fn mc_moment(py: Python<'_>, trace_word: &str, n: usize, samples: u64, seed: u64, jobs: usize) -> PyResult<(f64, f64)> {
    let tw: TraceWord = trace_word.parse().map_err(to_py)?;
    let r = py.detach(|| matrix::mc_moment(&tw, n, samples, seed, jobs)).map_err(to_py)?;
    Ok((r.estimate, r.stderr))
}

/// Integer relation among decimal strings, or None.
#[pyfunction]
#[pyo3(signature = (values, digits = 30, max_height = 100))]
fn find_relation(py: Python<'_>, values: Vec<String>, digits: u32, max_height: u64) -> PyResult<Option<Vec<String>>> {
    let prec = bits_for_digits(digits + 10);
    let vals = values.iter().map(|v| BigFloat::parse_decimal(v, prec)).collect::<Result<Vec<_>, _>>().map_err(to_py)?;
    let r = py.detach(|| relation::find_relation(&vals, digits, max_height)).map_err(to_py)?;
    Ok(r.map(|r| r.coefficients.iter().map(|c| c.to_string()).collect()))
}

/// Rational MZV combination of one weight equal to `value`, as {word: Fraction}.
#[pyfunction]
#[pyo3(signature = (value, weight, digits = 20, max_height = 50, error_bound = None))]
fn fit_to_mzv<'py>(
    py: Python<'py>,
    value: &str,
    weight: usize,
    digits: u32,
    max_height: u64,
    error_bound: Option<&str>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let prec = bits_for_digits(digits + 10);
    let v = BigFloat::parse_decimal(value, prec).map_err(to_py)?;
    let e = match error_bound {
        Some(s) => BigFloat::parse_decimal(s, 64).map_err(to_py)?,
        None => BigFloat::zero(64),
    };
    let target = NumericResult::new(v, e, Rigor::RigorousTail, digits);
    let cache = ZetaCache::new();
    let fit = py.detach(|| relation::fit_to_mzv(&target, weight, digits, max_height, &cache)).map_err(to_py)?;
    fit.map(|f| lincomb_dict(py, &f.combo)).transpose()
}

/// Run a verification suite ("all" for every suite) and return its JSON report.
#[pyfunction]
#[pyo3(signature = (suite, digits = 25, seed = 0, jobs = 1))]
fn run_verify<'py>(py: Python<'py>, suite: &str, digits: u32, seed: u64, jobs: usize) -> PyResult<Bound<'py, PyAny>> {
    let names: Vec<&str> = if suite == "all" { verify::SUITES.to_vec() } else { vec![suite] };
    let cfg = verify::VerifyConfig { digits, seed, jobs };
    let cache = ZetaCache::new();
    let reports = py
        .detach(|| names.iter().map(|s| verify::run_suite(s, &cfg, &cache)).collect::<Result<Vec<_>, _>>())
        .map_err(to_py)?;
    let v = serde_json::json!({
        "pass": reports.iter().all(verify::SuiteReport::pass),
        "suites": reports.iter().map(verify::SuiteReport::to_json).collect::<Vec<_>>(),
    });
    json_to_py(py, &v)
}

#[pymodule]
fn zetahopf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ComputationError", m.py().get_type::<ComputationError>())?;
    m.add_class::<PyNumeric>()?;
    m.add_class::<PyWord>()?;
    m.add_class::<PyComposition>()?;
    m.add_class::<PyTree>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(generate_trees, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(iterated_integral, m)?)?;
    m.add_function(wrap_pyfunction!(selberg_value, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_expand, m)?)?;
    m.add_function(wrap_pyfunction!(gue_moment, m)?)?;
    m.add_function(wrap_pyfunction!(genus_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(mc_moment, m)?)?;
    m.add_function(wrap_pyfunction!(find_relation, m)?)?;
    m.add_function(wrap_pyfunction!(fit_to_mzv, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
