//! Python bindings. Reports come back as plain dicts.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use contcalc_core::chain::{chain_unary, counterexample_bz2};
use contcalc_core::container::{self as cont, io as cio, law_leibniz, law_sum};
use contcalc_core::dsl::{no_files, parse_signature, SignatureAst};
use contcalc_core::fixpoint::{decompose, mu_rule as core_mu_rule, Signature, WPath};
use contcalc_core::groupoid::{self as grp, io as gio, FinGroupoid};
use contcalc_core::points::is_isolated;
use contcalc_core::Limits;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "Groupoid", frozen)]
struct PyGroupoid(Arc<FinGroupoid>);

#[pymethods]
impl PyGroupoid {
    /// The discrete groupoid on `n` objects.
    #[staticmethod]
    fn disc(n: usize) -> Self {
        PyGroupoid(Arc::new(grp::disc(n)))
    }

    /// `n` objects, exactly one morphism between any two.
    #[staticmethod]
    fn codisc(n: usize) -> Self {
        PyGroupoid(Arc::new(grp::codisc(n)))
    }

    /// One object with the cyclic group of order `n`.
    #[staticmethod]
    fn bz(n: usize) -> Self {
        PyGroupoid(Arc::new(grp::bz(n)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGroupoid(Arc::new(gio::load_groupoid(text, &Limits::from_env()).map_err(err)?)))
    }

    fn to_json(&self) -> String {
        gio::write_groupoid(&self.0)
    }

    #[getter]
    fn num_objects(&self) -> usize {
        self.0.num_objects()
    }

    #[getter]
    fn num_morphisms(&self) -> usize {
        self.0.num_morphisms()
    }

    #[getter]
    fn num_components(&self) -> usize {
        self.0.num_components()
    }

    fn aut_order(&self, a: usize) -> PyResult<usize> {
        self.check(a)?;
        Ok(self.0.aut_order(a))
    }

    fn is_isolated(&self, a: usize) -> PyResult<bool> {
        self.check(a)?;
        Ok(is_isolated(&self.0, a))
    }

    fn __repr__(&self) -> String {
        format!(
            "Groupoid(objects={}, morphisms={})",
            self.0.num_objects(),
            self.0.num_morphisms()
        )
    }
}

impl PyGroupoid {
    fn check(&self, a: usize) -> PyResult<()> {
        if a < self.0.num_objects() {
            Ok(())
        } else {
            Err(err(format!("no object {a}")))
        }
    }
}

#[pyclass(name = "Container", frozen)]
struct PyContainer(Arc<cont::Container>);

#[pymethods]
impl PyContainer {
    /// Discrete container; `sizes[k][s]` is the number of positions of shape
    /// `s` at `indices[k]`.
    #[staticmethod]
    fn discrete(indices: Vec<String>, sizes: Vec<Vec<usize>>) -> PyResult<Self> {
        if sizes.len() != indices.len() || sizes.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(err("need one row of equal length per index"));
        }
        let names: Vec<&str> = indices.iter().map(String::as_str).collect();
        Ok(PyContainer(Arc::new(cont::Container::discrete(&names, &sizes))))
    }

    /// Parses a declaration or a JSON document.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let c = if text.trim_start().starts_with('{') {
            cio::load_container(text, &Limits::from_env())
        } else {
            parse_signature(text).and_then(|ast| ast.to_container(&no_files))
        };
        Ok(PyContainer(Arc::new(c.map_err(err)?)))
    }

    #[staticmethod]
    fn identity() -> Self {
        PyContainer(Arc::new(cont::idc()))
    }

    /// One shape with positions `g` in the single index `x`.
    #[staticmethod]
    fn single_shape(g: &PyGroupoid) -> Self {
        PyContainer(Arc::new(cont::single_shape_groupoid((*g.0).clone())))
    }

    /// Multisets of exactly `n` elements.
    #[staticmethod]
    fn bag(n: usize) -> PyResult<Self> {
        Ok(PyContainer(Arc::new(cont::bag_container(n).map_err(err)?)))
    }

    #[pyo3(signature = (index = "x"))]
    fn derivative(&self, index: &str) -> PyResult<Self> {
        let d = cont::derivative(&self.0, index).map_err(err)?;
        Ok(PyContainer(Arc::new(d.container)))
    }

    #[getter]
    fn indices(&self) -> Vec<String> {
        self.0.indices.clone()
    }

    #[getter]
    fn num_shapes(&self) -> usize {
        self.0.num_shapes()
    }

    #[getter]
    fn shapes(&self) -> PyGroupoid {
        PyGroupoid(self.0.shapes.clone())
    }

    /// Number of positions of every shape at `index`.
    fn sizes(&self, index: &str) -> PyResult<Vec<usize>> {
        let k = self.index(index)?;
        Ok((0..self.0.num_shapes()).map(|s| self.0.fiber(k, s).num_objects()).collect())
    }

    fn positions(&self, index: &str, shape: usize) -> PyResult<PyGroupoid> {
        let k = self.index(index)?;
        if shape >= self.0.num_shapes() {
            return Err(err(format!("no shape {shape}")));
        }
        Ok(PyGroupoid(self.0.fiber(k, shape).clone()))
    }

    fn is_valid(&self) -> bool {
        self.0.validate().is_valid()
    }

    fn to_json(&self) -> String {
        cio::write_container(&self.0)
    }

    /// The declaration text, for discrete containers.
    #[pyo3(signature = (name = "f", params = None))]
    fn to_dsl(&self, name: &str, params: Option<Vec<String>>) -> PyResult<String> {
        let params = params.unwrap_or_else(|| self.0.indices.clone());
        SignatureAst::from_container(name, &self.0, &params)
            .map(|ast| ast.pretty())
            .ok_or_else(|| err("only discrete containers have a declaration"))
    }

    fn __repr__(&self) -> String {
        format!("Container(indices={:?}, shapes={})", self.0.indices, self.0.num_shapes())
    }
}

impl PyContainer {
    fn index(&self, i: &str) -> PyResult<usize> {
        self.0
            .indices
            .iter()
            .position(|x| x == i)
            .ok_or_else(|| err(format!("no index `{i}`")))
    }
}

fn signature(spec: &str) -> PyResult<Signature> {
    Ok(match spec {
        "list" => Signature::list(1),
        "list2" => Signature::list(2),
        "tree" => Signature::binary_tree(),
        "twisted" => Signature::twisted(),
        text => parse_signature(text)
            .and_then(|ast| ast.to_signature(&no_files))
            .map_err(err)?,
    })
}

fn param(sig: &Signature, index: Option<&str>) -> PyResult<String> {
    match index {
        Some(i) => Ok(i.to_string()),
        None => sig
            .params()
            .into_iter()
            .next()
            .ok_or_else(|| err("signature has no parameter")),
    }
}

/// `∂(F + G) ≃ ∂F + ∂G`.
#[pyfunction]
#[pyo3(signature = (f, g, index = "x"))]
fn check_sum(py: Python<'_>, f: &PyContainer, g: &PyContainer, index: &str) -> PyResult<Py<PyAny>> {
    let r = law_sum(&f.0, &g.0, index).map_err(err)?;
    let mut v = r.to_json();
    v["holds"] = r.holds().into();
    to_py(py, &v)
}

/// `∂(F × G) ≃ ∂F × G + F × ∂G`.
#[pyfunction]
#[pyo3(signature = (f, g, index = "x"))]
fn check_leibniz(py: Python<'_>, f: &PyContainer, g: &PyContainer, index: &str) -> PyResult<Py<PyAny>> {
    let r = law_leibniz(&f.0, &g.0, index).map_err(err)?;
    let mut v = r.to_json();
    v["holds"] = r.holds().into();
    to_py(py, &v)
}

/// Number of cartesian morphisms `f ⊸ g`.
#[pyfunction]
fn hom_count(f: &PyContainer, g: &PyContainer) -> PyResult<usize> {
    cont::hom_count(&f.0, &g.0, &Limits::from_env()).map_err(err)
}

/// The chain rule comparison `∂F[G] × ∂G -> ∂(F[G])` for unary `f` and `g`.
#[pyfunction]
fn chain_rule(py: Python<'_>, f: &PyContainer, g: &PyContainer) -> PyResult<Py<PyAny>> {
    let r = chain_unary(&f.0, &g.0, &Limits::from_env()).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
fn counterexample(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &counterexample_bz2().map_err(err)?.to_json())
}

/// The rule for `∂μ` on the depth-bounded fixed point of a signature: a
/// builtin name (list, list2, tree, twisted) or declaration text.
#[pyfunction]
#[pyo3(signature = (signature_spec, depth = 4, index = None))]
fn mu_rule(py: Python<'_>, signature_spec: &str, depth: usize, index: Option<&str>) -> PyResult<Py<PyAny>> {
    let sig = signature(signature_spec)?;
    let i = param(&sig, index)?;
    let rule = core_mu_rule(&sig, &i, depth, &Limits::from_env()).map_err(err)?;
    let report = rule.report().map_err(err)?;
    let mut v = report.to_json();
    v["passed"] = report.passed().into();
    to_py(py, &v)
}

/// Splits `tree` at `path` into its layers and the focused subtree.
#[pyfunction]
#[pyo3(signature = (signature_spec, tree, path, index = None))]
fn zipper(py: Python<'_>, signature_spec: &str, tree: &str, path: &str, index: Option<&str>) -> PyResult<Py<PyAny>> {
    let sig = signature(signature_spec)?;
    let i = param(&sig, index)?;
    let w = sig.parse_tree(tree).map_err(err)?;
    let p = WPath::parse(path).map_err(err)?;
    let z = decompose(&sig, &i, &w, &p).map_err(err)?;
    let mut v = serde_json::to_value(&z).map_err(err)?;
    v["rendered"] = z.render(&sig).into();
    to_py(py, &v)
}

#[pymodule]
fn contcalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupoid>()?;
    m.add_class::<PyContainer>()?;
    m.add_function(wrap_pyfunction!(check_sum, m)?)?;
    m.add_function(wrap_pyfunction!(check_leibniz, m)?)?;
    m.add_function(wrap_pyfunction!(hom_count, m)?)?;
    m.add_function(wrap_pyfunction!(chain_rule, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(mu_rule, m)?)?;
    m.add_function(wrap_pyfunction!(zipper, m)?)?;
    Ok(())
}
