//! JSON formats for systems, functionals, fields and `ℤ` data.
//!
//! Group elements and points are integer indices; complex numbers are given
//! as `re`/`im` fields or `[re, im]` pairs; angles are rotation numbers
//! `"p/q"` in turns.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::CrossedElement;
use crate::corpus;
use crate::dynamics::{Action, MeasureOnX};
use crate::groups::{Angle, Character, FiniteGroup, Subgroup};
use crate::linalg::{c, C64, ZERO};
use crate::states::{moments_from_atoms, Atom, DualMeasure, MomentSequence, PositiveDefiniteFunction};
use crate::tracebuild::{StateField, TraceFunctional};
use crate::zsystems::{ZOrbitData, ZSystem, ZTrace, ZTraceData};
use crate::{Error, Result};

/// Parses JSON, reporting the position and field of the first problem.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Error::Input(format!("{what}: {inner}"))
        } else {
            Error::Input(format!("{what}: field `{path}`: {inner}"))
        }
    })?;
    de.end().map_err(|e| Error::Input(format!("{what}: {e}")))?;
    Ok(value)
}

fn index_key(key: &str, what: &str) -> Result<usize> {
    key.parse().map_err(|_| Error::Input(format!("{what}: key {key:?} is not an index")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic(usize),
    Product(Vec<usize>),
    Symmetric(usize),
    Cayley(Vec<Vec<usize>>),
}

impl GroupSpec {
    pub fn build(&self) -> Result<Arc<FiniteGroup>> {
        let bad = |n: &usize| *n == 0;
        Ok(Arc::new(match self {
            GroupSpec::Cyclic(n) if bad(n) => return Err(Error::Input("cyclic order must be positive".into())),
            GroupSpec::Cyclic(n) => FiniteGroup::cyclic(*n),
            GroupSpec::Product(ns) if ns.is_empty() || ns.iter().any(bad) => {
                return Err(Error::Input("product orders must be positive".into()))
            }
            GroupSpec::Product(ns) => FiniteGroup::product(ns),
            GroupSpec::Symmetric(n) if *n == 0 || *n > 5 => return Err(Error::Input("symmetric degree must be 1..=5".into())),
            GroupSpec::Symmetric(n) => FiniteGroup::symmetric(*n),
            GroupSpec::Cayley(t) => FiniteGroup::from_table(t.clone())?,
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SubgroupSpec {
    Members(Vec<usize>),
    Generators(Vec<usize>),
}

impl SubgroupSpec {
    pub fn build(&self, g: &Arc<FiniteGroup>) -> Result<Subgroup> {
        match self {
            SubgroupSpec::Members(m) => Subgroup::from_members(g.clone(), m.iter().copied()),
            SubgroupSpec::Generators(gens) => Subgroup::generated(g.clone(), gens),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupSpec>,
    /// Angles on generators (or on every element) of the subgroup.
    pub angles: BTreeMap<String, String>,
}

impl CharacterSpec {
    /// Builds on `default_domain` unless a subgroup is named.
    pub fn build(&self, default_domain: &Subgroup) -> Result<Character> {
        let domain = match &self.subgroup {
            Some(s) => s.build(default_domain.group())?,
            None => default_domain.clone(),
        };
        let mut given = HashMap::new();
        for (k, v) in &self.angles {
            let angle: Angle = v.parse().map_err(|_| Error::Input(format!("character: angle {v:?} is not p/q")))?;
            given.insert(index_key(k, "character")?, angle);
        }
        Character::from_angle_map(domain, &given)
    }

    pub fn from_character(chi: &Character) -> Self {
        CharacterSpec {
            subgroup: Some(SubgroupSpec::Members(chi.domain().members().to_vec())),
            angles: chi.domain().members().iter().map(|&g| (g.to_string(), chi.angle(g).unwrap().to_string())).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub group: GroupSpec,
    pub space_size: usize,
    /// Image rows keyed by group element; all elements, or generators only.
    #[serde(default)]
    pub action: BTreeMap<String, Vec<usize>>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<Arc<Action>> {
        let g = self.group.build()?;
        let mut rows = Vec::with_capacity(self.action.len());
        for (k, row) in &self.action {
            rows.push((index_key(k, "action")?, row.clone()));
        }
        if rows.is_empty() {
            return Ok(Arc::new(Action::trivial(g, self.space_size)));
        }
        if rows.len() == g.order() {
            rows.sort_by_key(|r| r.0);
            if rows.iter().enumerate().all(|(i, r)| r.0 == i) {
                return Ok(Arc::new(Action::new(g, self.space_size, rows.into_iter().map(|r| r.1).collect())?));
            }
        }
        if !g.is_abelian() {
            return Err(Error::InvalidAction("a nonabelian group needs one image row per element".into()));
        }
        Ok(Arc::new(Action::from_generators(g, self.space_size, &rows)?))
    }

    pub fn from_action(a: &Action) -> Self {
        SystemSpec {
            group: GroupSpec::Cayley(a.group().table()),
            space_size: a.space_size(),
            action: a.rows().into_iter().enumerate().map(|(g, r)| (g.to_string(), r)).collect(),
        }
    }
}

/// A system file: either an explicit [`SystemSpec`] or `{"corpus": name}`.
pub fn load_system(text: &str) -> Result<Arc<Action>> {
    let v: Value = parse(text, "system")?;
    if let Some(name) = v.get("corpus") {
        let name = name.as_str().ok_or_else(|| Error::Input("system: corpus must be a string".into()))?;
        return corpus::system(name).map(|s| s.action).ok_or_else(|| Error::Input(format!("system: unknown corpus system {name:?}")));
    }
    // reparse from text so that errors carry line and column
    parse::<SystemSpec>(text, "system")?.build()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub x: usize,
    pub g: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl TermSpec {
    fn value(&self) -> C64 {
        c(self.re, self.im)
    }

    fn group_index(&self, order: usize) -> Result<usize> {
        usize::try_from(self.g).ok().filter(|&g| g < order).ok_or_else(|| Error::Input(format!("group element {} out of range", self.g)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub terms: Vec<TermSpec>,
}

impl ElementSpec {
    pub fn build(&self, a: &Arc<Action>) -> Result<CrossedElement> {
        let n = a.group().order();
        let terms = self.terms.iter().map(|t| Ok((t.x, t.group_index(n)?, t.value()))).collect::<Result<Vec<_>>>()?;
        CrossedElement::from_terms(a.clone(), terms)
    }
}

/// Value tables; missing entries are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub values: Vec<TermSpec>,
}

impl TraceSpec {
    pub fn build(&self, a: &Arc<Action>) -> Result<TraceFunctional> {
        if self.window.is_some() {
            return Err(Error::Input("trace: a window only applies to ℤ systems".into()));
        }
        let mut t = TraceFunctional::zero(a.clone());
        for v in &self.values {
            if v.x >= a.space_size() {
                return Err(Error::Input(format!("trace: point {} out of range", v.x)));
            }
            t.set(v.x, v.group_index(a.group().order())?, v.value());
        }
        Ok(t)
    }

    pub fn build_z(&self, z: &Arc<ZSystem>) -> Result<ZTrace> {
        if let Some(w) = self.window {
            if w != z.window() {
                return Err(Error::Input(format!("trace: window {w} differs from the system window {}", z.window())));
            }
        }
        let mut t = ZTrace::zero(z.clone());
        for v in &self.values {
            if v.x >= z.space_size() {
                return Err(Error::Input(format!("trace: point {} out of range", v.x)));
            }
            if v.g.unsigned_abs() as usize > z.window() {
                return Err(Error::WindowExceeded(v.g, z.window()));
            }
            t.set(v.x, v.g, v.value());
        }
        Ok(t)
    }

    pub fn from_trace(t: &TraceFunctional) -> Self {
        let a = t.system();
        let values = (0..a.space_size())
            .flat_map(|x| a.group().elements().map(move |g| (x, g)))
            .map(|(x, g)| {
                let v = t.value(x, g);
                TermSpec { x, g: g as i64, re: v.re, im: v.im }
            })
            .collect();
        TraceSpec { window: None, values }
    }

    pub fn from_ztrace(t: &ZTrace) -> Self {
        let z = t.system();
        let w = z.window() as i64;
        let values = (0..z.space_size())
            .flat_map(|x| (-w..=w).map(move |m| (x, m)))
            .map(|(x, m)| {
                let v = t.value(x, m);
                TermSpec { x, g: m, re: v.re, im: v.im }
            })
            .collect();
        TraceSpec { window: Some(z.window()), values }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupValue {
    pub g: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A function on a subgroup; missing values are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<usize>>,
    pub values: Vec<GroupValue>,
}

impl PsiSpec {
    /// Builds on `domain`; a listed subgroup must agree with it.
    pub fn build(&self, domain: &Subgroup) -> Result<PositiveDefiniteFunction> {
        if let Some(m) = &self.subgroup {
            let given = Subgroup::from_members(domain.group().clone(), m.iter().copied())?;
            if &given != domain {
                return Err(Error::Input(format!("psi: subgroup {:?} differs from {:?}", given.members(), domain.members())));
            }
        }
        let mut vals = vec![ZERO; domain.order()];
        for v in &self.values {
            let i = domain.position(v.g).ok_or_else(|| Error::Input(format!("psi: element {} not in the subgroup", v.g)))?;
            vals[i] = c(v.re, v.im);
        }
        PositiveDefiniteFunction::new(domain.clone(), vals)
    }

    /// A standalone function, on the whole group unless a subgroup is listed.
    pub fn build_in(&self, g: &Arc<FiniteGroup>) -> Result<PositiveDefiniteFunction> {
        let h = match &self.subgroup {
            Some(m) => Subgroup::from_members(g.clone(), m.iter().copied())?,
            None => Subgroup::whole(g.clone()),
        };
        self.build(&h)
    }

    pub fn from_function(psi: &PositiveDefiniteFunction) -> Self {
        PsiSpec {
            subgroup: Some(psi.domain().members().to_vec()),
            values: psi.domain().members().iter().zip(psi.values()).map(|(&g, v)| GroupValue { g, re: v.re, im: v.im }).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub measure: Vec<f64>,
    pub field: BTreeMap<String, PsiSpec>,
    /// Entries are given on orbit representatives and transported along orbits.
    #[serde(default)]
    pub orbit_representatives: bool,
}

impl FieldSpec {
    pub fn build(&self, a: &Arc<Action>) -> Result<(MeasureOnX, StateField)> {
        if self.measure.len() != a.space_size() {
            return Err(Error::Input(format!("field: {} weights for {} points", self.measure.len(), a.space_size())));
        }
        let nu = MeasureOnX::new(self.measure.clone())?;
        let mut entries = BTreeMap::new();
        for (k, spec) in &self.field {
            let x = index_key(k, "field")?;
            if x >= a.space_size() {
                return Err(Error::FieldDomainMismatch(x));
            }
            entries.insert(x, spec.build(&a.stabilizer(x))?);
        }
        let field = if self.orbit_representatives {
            StateField::from_orbit_representatives(a.clone(), entries)?
        } else {
            StateField::new(a.clone(), entries)?
        };
        Ok((nu, field))
    }

    pub fn from_field(nu: &MeasureOnX, field: &StateField) -> Self {
        FieldSpec {
            measure: nu.weights().to_vec(),
            field: field.entries().map(|(x, psi)| (x.to_string(), PsiSpec::from_function(psi))).collect(),
            orbit_representatives: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualAtomSpec {
    pub angles: BTreeMap<String, String>,
    pub weight: f64,
}

/// Inputs to the `build` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BuildSpec {
    Field(FieldSpec),
    Extremal { character: CharacterSpec, point: usize },
    Abelian { measure: Vec<f64>, duals: BTreeMap<String, Vec<DualAtomSpec>> },
    GroupState { psi: PsiSpec },
}

impl BuildSpec {
    /// Dual measures on the stabilizers, keyed by point.
    pub fn abelian_duals(a: &Arc<Action>, duals: &BTreeMap<String, Vec<DualAtomSpec>>) -> Result<BTreeMap<usize, DualMeasure>> {
        let mut out = BTreeMap::new();
        for (k, atoms) in duals {
            let x = index_key(k, "duals")?;
            if x >= a.space_size() {
                return Err(Error::FieldDomainMismatch(x));
            }
            let stab = a.stabilizer(x);
            let chars = atoms
                .iter()
                .map(|d| CharacterSpec { subgroup: None, angles: d.angles.clone() }.build(&stab))
                .collect::<Result<Vec<_>>>()?;
            out.insert(x, DualMeasure::new(chars, atoms.iter().map(|d| d.weight).collect())?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub angle: Angle,
    pub weight: f64,
}

impl From<AtomSpec> for Atom {
    fn from(a: AtomSpec) -> Atom {
        Atom { angle: a.angle, weight: a.weight }
    }
}

/// `c` lists `c_{−M}, …, c_M`, or just `c_0, …, c_M`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSpec {
    #[serde(rename = "M")]
    pub window: usize,
    pub n: usize,
    pub c: Vec<[f64; 2]>,
}

impl MomentsSpec {
    pub fn build(&self, psd_tol: f64) -> Result<MomentSequence> {
        let vals: Vec<C64> = self.c.iter().map(|p| c(p[0], p[1])).collect();
        if vals.len() == 2 * self.window + 1 {
            MomentSequence::new(self.window, self.n, vals, psd_tol)
        } else if vals.len() == self.window + 1 {
            MomentSequence::from_nonnegative(self.n, &vals, psd_tol)
        } else {
            Err(Error::InvalidMoments(format!("{} moments for window {}", vals.len(), self.window)))
        }
    }

    pub fn from_moments(m: &MomentSequence) -> Self {
        MomentsSpec { window: m.window(), n: m.period(), c: m.values().iter().map(|v| [v.re, v.im]).collect() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZSystemSpec {
    #[serde(rename = "T")]
    pub perm: Vec<usize>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

impl ZSystemSpec {
    /// `window_override` (if any) takes precedence over the file's `M`; the
    /// default is `max(8, 2 · max period)`.
    pub fn build(&self, window_override: Option<usize>) -> Result<Arc<ZSystem>> {
        Ok(Arc::new(match window_override.or(self.window) {
            Some(w) => ZSystem::new(self.perm.clone(), w)?,
            None => ZSystem::with_default_window(self.perm.clone(), 8)?,
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZOrbitSpec {
    pub rep: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomSpec>>,
}

/// Per-orbit circle measures. An orbit with only a mass gets Lebesgue measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZDataSpec {
    pub orbits: Vec<ZOrbitSpec>,
}

impl ZDataSpec {
    pub fn build(&self, z: &ZSystem, psd_tol: f64) -> Result<ZTraceData> {
        let summary = z.orbits_and_periods();
        let period_of = |rep: usize| summary.orbits.iter().find(|o| o.points.contains(&rep)).map(|o| o.period);
        let mut orbits = Vec::with_capacity(self.orbits.len());
        for o in &self.orbits {
            let period = period_of(o.rep).ok_or_else(|| Error::Input(format!("zdata: point {} out of range", o.rep)))?;
            let moments = match (&o.moments, &o.atoms) {
                (Some(_), Some(_)) => return Err(Error::Input(format!("zdata: orbit {} has both moments and atoms", o.rep))),
                (Some(m), None) => m.build(psd_tol)?,
                (None, Some(atoms)) => {
                    let atoms: Vec<Atom> = atoms.iter().copied().map(Atom::from).collect();
                    moments_from_atoms(&atoms, z.window(), period, psd_tol)?
                }
                (None, None) => {
                    let mass = o.mass.ok_or_else(|| Error::Input(format!("zdata: orbit {} needs moments, atoms or a mass", o.rep)))?;
                    MomentSequence::lebesgue(mass, z.window(), period)
                }
            };
            if let Some(mass) = o.mass {
                if (mass - moments.mass()).abs() > crate::tracebuild::MASS_TOL {
                    return Err(Error::MassError(format!("orbit {}: mass {mass} but c_0 = {}", o.rep, moments.mass())));
                }
            }
            orbits.push(ZOrbitData { rep: o.rep, moments });
        }
        Ok(ZTraceData::new(orbits))
    }

    pub fn from_data(d: &ZTraceData) -> Self {
        ZDataSpec {
            orbits: d
                .orbits
                .iter()
                .map(|o| ZOrbitSpec { rep: o.rep, mass: Some(o.mass()), moments: Some(MomentsSpec::from_moments(&o.moments)), atoms: None })
                .collect(),
        }
    }
}

/// Serializes any spec type to a JSON value.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("spec types serialize")
}

/// `{"re": …, "im": …}`.
pub fn complex_json(v: C64) -> Value {
    json!({"re": v.re, "im": v.im})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_round_trip() {
        let a = load_system(r#"{"group": {"cyclic": 4}, "space_size": 2, "action": {"1": [1, 0]}}"#).unwrap();
        assert_eq!(a.apply(3, 0), 1);
        let again = SystemSpec::from_action(&a).build().unwrap();
        assert_eq!(again.rows(), a.rows());
        assert_eq!(load_system(r#"{"corpus": "z3-cycle"}"#).unwrap().space_size(), 3);
    }

    #[test]
    fn malformed_inputs_name_the_problem() {
        let e = load_system(r#"{"group": {"cyclic": 4}, "space_size": 2, "actoin": {}}"#).unwrap_err();
        assert!(matches!(&e, Error::Input(m) if m.contains("actoin") && m.contains("line 1")));
        let bad = r#"{"group": {"cayley": [[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}, "space_size": 1}"#;
        assert!(matches!(load_system(bad), Err(Error::NonAssociative(..))));
        let s3 = r#"{"group": {"symmetric": 3}, "space_size": 3, "action": {"1": [0, 2, 1]}}"#;
        assert!(matches!(load_system(s3), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn build_specs_parse() {
        let spec: BuildSpec = parse(r#"{"kind": "extremal", "character": {"angles": {"2": "1/2"}}, "point": 0}"#, "build").unwrap();
        assert!(matches!(spec, BuildSpec::Extremal { point: 0, .. }));
        let spec: BuildSpec = parse(
            r#"{"kind": "field", "measure": [0.5, 0.5], "field": {"0": {"values": [{"g": 0, "re": 1}]}}, "orbit_representatives": true}"#,
            "build",
        )
        .unwrap();
        let BuildSpec::Field(f) = spec else { panic!() };
        let a = crate::corpus::system("z2-swap").unwrap().action;
        let (_, field) = f.build(&a).unwrap();
        assert!(field.get(1).is_some());
    }

    #[test]
    fn zdata_forms() {
        let z = ZSystemSpec { perm: vec![1, 0, 2], window: None }.build(None).unwrap();
        let d: ZDataSpec = parse(
            r#"{"orbits": [{"rep": 0, "mass": 0.5, "atoms": [{"angle": "0", "weight": 0.25}, {"angle": "1/2", "weight": 0.25}]},
                           {"rep": 2, "mass": 0.5}]}"#,
            "zdata",
        )
        .unwrap();
        let data = d.build(&z, 1e-9).unwrap();
        assert_eq!(data.orbits[1].moments.get(0), c(0.5, 0.0));
        let back: ZDataSpec = parse(&serde_json::to_string(&ZDataSpec::from_data(&data)).unwrap(), "zdata").unwrap();
        assert!(back.build(&z, 1e-9).unwrap().distance(&data) == 0.0);
    }
}
