//! Python bindings: systems, trace tables, builders, checks, decomposition
//! and the oracle.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use cptrace_core::algebra::CrossedProduct;
use cptrace_core::analyze::{self, DEFAULT_SEED};
use cptrace_core::corpus;
use cptrace_core::dynamics::{Action, MeasureOnX};
use cptrace_core::groups::{Angle, Character};
use cptrace_core::io::{self, BuildSpec, SystemSpec, TraceSpec, ZDataSpec, ZSystemSpec};
use cptrace_core::states::{induce_state, PositiveDefiniteFunction};
use cptrace_core::tracebuild::{self as tb, ExtremalTriple, StateField, TraceFunctional};
use cptrace_core::zsystems::{self, ZSystem};
use cptrace_core::{Error, Tolerances};

create_exception!(cptrace, ConditionError, PyException, "A mathematical condition failed.");

fn err(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        ConditionError::new_err(format!("{}: {e}", e.kind()))
    }
}

fn tolerances(tol: Option<f64>, psd_tol: Option<f64>) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(v) = tol {
        t.tol = v;
    }
    if let Some(v) = psd_tol {
        t.psd_tol = v;
    }
    t
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A finite group acting on `{0, …, n−1}`.
#[pyclass(module = "cptrace", frozen)]
struct System {
    inner: Arc<Action>,
}

#[pymethods]
impl System {
    /// Parses a system file (`{"group": …, "space_size": …, "action": …}` or `{"corpus": name}`).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(System { inner: io::load_system(text).map_err(err)? })
    }

    #[staticmethod]
    fn corpus(name: &str) -> PyResult<Self> {
        corpus::system(name)
            .map(|s| System { inner: s.action })
            .ok_or_else(|| PyValueError::new_err(format!("unknown corpus system {name:?}")))
    }

    #[staticmethod]
    fn corpus_names() -> Vec<&'static str> {
        corpus::systems().iter().map(|s| s.name).collect()
    }

    #[getter]
    fn group_order(&self) -> usize {
        self.inner.group().order()
    }

    #[getter]
    fn space_size(&self) -> usize {
        self.inner.space_size()
    }

    #[getter]
    fn is_abelian(&self) -> bool {
        self.inner.group().is_abelian()
    }

    fn apply(&self, g: usize, x: usize) -> PyResult<usize> {
        if g >= self.group_order() || x >= self.space_size() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.apply(g, x))
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        self.inner.orbits()
    }

    fn stabilizer(&self, x: usize) -> PyResult<Vec<usize>> {
        if x >= self.space_size() {
            return Err(PyValueError::new_err("point out of range"));
        }
        Ok(self.inner.stabilizer(x).members().to_vec())
    }

    fn to_json(&self) -> String {
        io::to_value(&SystemSpec::from_action(&self.inner)).to_string()
    }

    fn __repr__(&self) -> String {
        format!("System(group_order={}, space_size={})", self.group_order(), self.space_size())
    }
}

/// A functional on `C(X) ⋊ G` given by its table `t(x, g)`.
#[pyclass(module = "cptrace", frozen)]
struct Trace {
    inner: TraceFunctional,
}

#[pymethods]
impl Trace {
    #[staticmethod]
    fn from_json(system: &System, text: &str) -> PyResult<Self> {
        let spec: TraceSpec = io::parse(text, "trace").map_err(err)?;
        Ok(Trace { inner: spec.build(&system.inner).map_err(err)? })
    }

    /// Values in `x`-major order, `|X| · |G|` of them.
    #[staticmethod]
    fn from_values(system: &System, values: Vec<Complex64>) -> PyResult<Self> {
        Ok(Trace { inner: TraceFunctional::from_values(system.inner.clone(), values).map_err(err)? })
    }

    #[getter]
    fn system(&self) -> System {
        System { inner: self.inner.system().clone() }
    }

    fn value(&self, x: usize, g: usize) -> PyResult<Complex64> {
        let a = self.inner.system();
        if x >= a.space_size() || g >= a.group().order() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.value(x, g))
    }

    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    fn distance(&self, other: &Trace) -> f64 {
        self.inner.distance(&other.inner)
    }

    /// Check reports as a list of dicts; `state=True` skips the trace-only checks.
    #[pyo3(signature = (state = false, tol = None, psd_tol = None))]
    fn checks<'py>(&self, py: Python<'py>, state: bool, tol: Option<f64>, psd_tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let t = tolerances(tol, psd_tol);
        let reports = if state { analyze::run_state_checks(&self.inner, &t) } else { analyze::run_trace_checks(&self.inner, &t) };
        json_to_py(py, &io::to_value(&reports))
    }

    #[pyo3(signature = (state = false))]
    fn is_valid(&self, state: bool) -> bool {
        let t = Tolerances::default();
        let reports = if state { analyze::run_state_checks(&self.inner, &t) } else { analyze::run_trace_checks(&self.inner, &t) };
        reports.iter().all(|r| r.pass)
    }

    /// `(measure, field)` with `field[x][g] = ψ_x(g)` on the stabilizer of `x`.
    fn decompose(&self) -> PyResult<(Vec<f64>, BTreeMap<usize, BTreeMap<usize, Complex64>>)> {
        let d = analyze::decompose_to_field(&self.inner, &Tolerances::default()).map_err(err)?;
        let field = d
            .field
            .entries()
            .map(|(x, psi)| (x, psi.domain().members().iter().copied().zip(psi.values().iter().copied()).collect()))
            .collect();
        Ok((d.measure.weights().to_vec(), field))
    }

    fn gns_dimension(&self) -> PyResult<usize> {
        Ok(analyze::gns(&self.inner, &Tolerances::default()).map_err(err)?.dimension)
    }

    /// Largest defects of the GNS representation: `(functional, star)`.
    fn gns_residuals(&self) -> PyResult<(f64, f64)> {
        let g = analyze::gns(&self.inner, &Tolerances::default()).map_err(err)?;
        let alg = CrossedProduct::new(self.inner.system().clone());
        Ok((g.functional_residual(self.inner.values()), g.star_residual(&alg)))
    }

    fn to_json(&self) -> String {
        io::to_value(&TraceSpec::from_trace(&self.inner)).to_string()
    }

    fn __repr__(&self) -> String {
        let a = self.inner.system();
        format!("Trace(space_size={}, group_order={})", a.space_size(), a.group().order())
    }
}

/// Builds from a build spec (`{"kind": "field" | "extremal" | "abelian" | "group-state", …}`).
#[pyfunction]
#[pyo3(signature = (system, spec, state = false))]
fn build(system: &System, spec: &str, state: bool) -> PyResult<Trace> {
    let a = &system.inner;
    let psd = Tolerances::default().psd_tol;
    let spec: BuildSpec = io::parse(spec, "build").map_err(err)?;
    let t = match spec {
        BuildSpec::Field(fs) => {
            let (nu, field) = fs.build(a).map_err(err)?;
            if state {
                tb::build_from_field(&nu, &field, psd)
            } else {
                tb::build_trace_from_field(&nu, &field, psd)
            }
        }
        BuildSpec::Extremal { character, point } => {
            if point >= a.space_size() {
                return Err(PyValueError::new_err("point out of range"));
            }
            character
                .build(&a.stabilizer(point))
                .and_then(|chi| ExtremalTriple::new(a.clone(), chi, point))
                .map(|e| tb::build_extremal(&e))
        }
        BuildSpec::Abelian { measure, duals } => MeasureOnX::new(measure)
            .and_then(|nu| tb::build_cabel(&nu, &BuildSpec::abelian_duals(a, &duals)?, a)),
        BuildSpec::GroupState { psi } => psi.build_in(a.group()).and_then(|w| tb::embed_group_state(&w)),
    };
    Ok(Trace { inner: t.map_err(err)? })
}

/// `t(x, g) = ν(x) ψ_x(g)`; `field[x]` maps stabilizer elements to values (missing ones are 0).
#[pyfunction]
#[pyo3(signature = (system, measure, field, state = false))]
fn build_from_field(system: &System, measure: Vec<f64>, field: HashMap<usize, HashMap<usize, Complex64>>, state: bool) -> PyResult<Trace> {
    let a = &system.inner;
    if measure.len() != a.space_size() {
        return Err(PyValueError::new_err("measure length differs from the number of points"));
    }
    let mut entries = BTreeMap::new();
    for (x, vals) in field {
        if x >= a.space_size() {
            return Err(PyValueError::new_err(format!("point {x} out of range")));
        }
        let stab = a.stabilizer(x);
        if let Some(g) = vals.keys().find(|g| !stab.contains(**g)) {
            return Err(PyValueError::new_err(format!("element {g} does not fix point {x}")));
        }
        let v = stab.members().iter().map(|g| vals.get(g).copied().unwrap_or_default()).collect();
        entries.insert(x, PositiveDefiniteFunction::new(stab, v).map_err(err)?);
    }
    let nu = MeasureOnX::new(measure).map_err(err)?;
    let field = StateField::new(a.clone(), entries).map_err(err)?;
    let psd = Tolerances::default().psd_tol;
    let t = if state { tb::build_from_field(&nu, &field, psd) } else { tb::build_trace_from_field(&nu, &field, psd) };
    Ok(Trace { inner: t.map_err(err)? })
}

/// The extremal trace of the orbit of `point` and a character of its stabilizer,
/// given by angles `"p/q"` on generators.
#[pyfunction]
fn build_extremal(system: &System, point: usize, angles: HashMap<usize, String>) -> PyResult<Trace> {
    let a = &system.inner;
    if point >= a.space_size() {
        return Err(PyValueError::new_err("point out of range"));
    }
    let mut given = HashMap::new();
    for (g, s) in angles {
        let angle: Angle = s.parse().map_err(|_| PyValueError::new_err(format!("angle {s:?} is not p/q")))?;
        given.insert(g, angle);
    }
    let chi = Character::from_angle_map(a.stabilizer(point), &given).map_err(err)?;
    let e = ExtremalTriple::new(a.clone(), chi, point).map_err(err)?;
    Ok(Trace { inner: tb::build_extremal(&e) })
}

#[pyfunction]
fn enumerate_extremal(system: &System) -> PyResult<Vec<Trace>> {
    Ok(analyze::enumerate_extremal(&system.inner).map_err(err)?.into_iter().map(|(_, t)| Trace { inner: t }).collect())
}

/// Block dimensions and normalized block traces of the crossed product.
#[pyfunction]
#[pyo3(signature = (system, seed = DEFAULT_SEED))]
fn oracle(system: &System, seed: u64) -> PyResult<(Vec<usize>, Vec<Trace>)> {
    let (dec, traces) = analyze::oracle_traces(&system.inner, seed, &Tolerances::default()).map_err(err)?;
    Ok((dec.blocks.iter().map(|b| b.dim).collect(), traces.into_iter().map(|t| Trace { inner: t }).collect()))
}

/// `Ind ψ` on the whole group: `ψ` on the subgroup and zero elsewhere.
#[pyfunction]
fn induce(system: &System, subgroup: Vec<usize>, values: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let g = system.inner.group();
    let h = cptrace_core::groups::Subgroup::from_members(g.clone(), subgroup.iter().copied()).map_err(err)?;
    if h.members() != subgroup.as_slice() {
        return Err(PyValueError::new_err("subgroup members must be listed in increasing order"));
    }
    let psi = PositiveDefiniteFunction::new(h, values).map_err(err)?;
    Ok(induce_state(g, &psi, Tolerances::default().psd_tol).map_err(err)?.values().to_vec())
}

/// A trace on a permutation system `C(X) ⋊ ℤ`, truncated to `|m| ≤ window`.
#[pyclass(module = "cptrace", frozen)]
struct ZTrace {
    inner: zsystems::ZTrace,
}

#[pymethods]
impl ZTrace {
    #[getter]
    fn window(&self) -> usize {
        self.inner.system().window()
    }

    fn value(&self, x: usize, m: i64) -> PyResult<Complex64> {
        let z = self.inner.system();
        if x >= z.space_size() || m.unsigned_abs() as usize > z.window() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.value(x, m))
    }

    /// `(normalization, hermitian, traciality, gram margin)`.
    fn residuals(&self) -> (f64, f64, f64, f64) {
        let t = &self.inner;
        (t.normalization_residual(), t.hermitian_residual(), t.traciality_residual(), t.gram_psd_margin())
    }

    /// Per-orbit circle measures in the `zdata` JSON format, as a dict.
    fn decompose<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let (data, _) = zsystems::decompose_ztrace(&self.inner, &Tolerances::default()).map_err(err)?;
        json_to_py(py, &io::to_value(&ZDataSpec::from_data(&data)))
    }

    fn to_json(&self) -> String {
        io::to_value(&TraceSpec::from_ztrace(&self.inner)).to_string()
    }
}

/// Builds a trace on the system of the permutation `perm` from `zdata` JSON.
#[pyfunction]
#[pyo3(signature = (perm, zdata, window = None))]
fn zbuild(perm: Vec<usize>, zdata: &str, window: Option<usize>) -> PyResult<ZTrace> {
    let z: Arc<ZSystem> = ZSystemSpec { perm, window }.build(None).map_err(err)?;
    let psd = Tolerances::default().psd_tol;
    let data = io::parse::<ZDataSpec>(zdata, "zdata").and_then(|s| s.build(&z, psd)).map_err(err)?;
    Ok(ZTrace { inner: zsystems::build_ztrace(&z, &data, psd).map_err(err)? })
}

#[pymodule]
fn cptrace(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_class::<Trace>()?;
    m.add_class::<ZTrace>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(build_from_field, m)?)?;
    m.add_function(wrap_pyfunction!(build_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(induce, m)?)?;
    m.add_function(wrap_pyfunction!(zbuild, m)?)?;
    m.add("ConditionError", m.py().get_type::<ConditionError>())?;
    Ok(())
}
