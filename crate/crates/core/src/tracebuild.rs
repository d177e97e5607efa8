//! Functionals on `C(X) ⋊ G` built from classifying data: a measure with a
//! field of stabilizer states, an extremal triple `(H, χ, orbit)`, or (for
//! abelian `G`) a measure with a field of measures on the dual group.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::CrossedElement;
use crate::dynamics::{Action, MeasureOnX};
use crate::groups::{annihilator, dual_group, Character, FiniteGroup, Subgroup};
use crate::linalg::{c, C64, ZERO};
use crate::states::{dual_invariance_check, DualMeasure, PositiveDefiniteFunction};
use crate::{Error, Result};

/// Tolerance for the normalization and mass checks of builders.
pub const MASS_TOL: f64 = 1e-12;

/// The value table `t(x, g) = τ(δ_x u_g)` of a linear functional.
#[derive(Debug, Clone)]
pub struct TraceFunctional {
    system: Arc<Action>,
    values: Vec<C64>,
}

impl TraceFunctional {
    pub fn zero(system: Arc<Action>) -> Self {
        let n = system.space_size() * system.group().order();
        TraceFunctional { system, values: vec![ZERO; n] }
    }

    pub fn from_fn(system: Arc<Action>, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut t = Self::zero(system);
        let n = t.system.group().order();
        for x in 0..t.system.space_size() {
            for g in 0..n {
                t.values[x * n + g] = f(x, g);
            }
        }
        t
    }

    /// Values in basis order `x·|G| + g`.
    pub fn from_values(system: Arc<Action>, values: Vec<C64>) -> Result<Self> {
        if values.len() != system.space_size() * system.group().order() {
            return Err(Error::Input(format!("{} values for a basis of size {}", values.len(), system.space_size() * system.group().order())));
        }
        Ok(TraceFunctional { system, values })
    }

    pub fn system(&self) -> &Arc<Action> {
        &self.system
    }

    #[inline]
    pub fn value(&self, x: usize, g: usize) -> C64 {
        self.values[x * self.system.group().order() + g]
    }

    pub fn set(&mut self, x: usize, g: usize, v: C64) {
        let n = self.system.group().order();
        self.values[x * n + g] = v;
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `|Σ_x t(x, e) − 1|`.
    pub fn normalization_residual(&self) -> f64 {
        let e = self.system.group().identity();
        let total: C64 = (0..self.system.space_size()).map(|x| self.value(x, e)).sum();
        (total - c(1.0, 0.0)).norm()
    }

    /// `max |conj t(x, g) − t(g⁻¹·x, g⁻¹)|` and the worst `(x, g)`.
    pub fn hermitian_residual(&self) -> (f64, (usize, usize)) {
        let a = &self.system;
        let mut worst = (0.0, (0, a.group().identity()));
        for x in 0..a.space_size() {
            for g in a.group().elements() {
                let gi = a.group().inv(g);
                let r = (self.value(x, g).conj() - self.value(a.apply(gi, x), gi)).norm();
                if r > worst.0 {
                    worst = (r, (x, g));
                }
            }
        }
        worst
    }

    /// Linear extension from the monomial basis.
    pub fn evaluate(&self, a: &CrossedElement) -> Result<C64> {
        if !Arc::ptr_eq(a.system(), &self.system) && **a.system() != *self.system {
            return Err(Error::SystemMismatch);
        }
        Ok(a.terms().map(|(x, g, v)| v * self.value(x, g)).sum())
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &TraceFunctional) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `Σ w_i t_i` over functionals on one system.
    pub fn combine(parts: &[(f64, &TraceFunctional)]) -> Result<TraceFunctional> {
        let first = parts.first().ok_or_else(|| Error::Input("empty combination".into()))?.1;
        let mut out = TraceFunctional::zero(first.system.clone());
        for (w, t) in parts {
            if t.values.len() != out.values.len() {
                return Err(Error::SystemMismatch);
            }
            for (o, v) in out.values.iter_mut().zip(&t.values) {
                *o += v * *w;
            }
        }
        Ok(out)
    }
}

/// Per-point states `ψ_x` on `C*(G_x)`, present where the measure is positive.
#[derive(Debug, Clone)]
pub struct StateField {
    system: Arc<Action>,
    per_point: BTreeMap<usize, PositiveDefiniteFunction>,
}

impl StateField {
    /// Per-point input; each entry must live on the stabilizer of its point.
    pub fn new(system: Arc<Action>, per_point: BTreeMap<usize, PositiveDefiniteFunction>) -> Result<Self> {
        for (&x, psi) in &per_point {
            if x >= system.space_size() || *psi.domain() != system.stabilizer(x) {
                return Err(Error::FieldDomainMismatch(x));
            }
        }
        Ok(StateField { system, per_point })
    }

    /// One entry per orbit, transported along the orbit by
    /// `ψ_{g·x} = ψ_x ∘ Ad(λ_g)⁻¹`. Entries must be class functions on
    /// their stabilizer so that the transport does not depend on `g`.
    pub fn from_orbit_representatives(
        system: Arc<Action>,
        reps: BTreeMap<usize, PositiveDefiniteFunction>,
    ) -> Result<Self> {
        let mut per_point = BTreeMap::new();
        for (&x, psi) in &reps {
            if x >= system.space_size() || *psi.domain() != system.stabilizer(x) {
                return Err(Error::FieldDomainMismatch(x));
            }
            if psi.conjugation_residual() > MASS_TOL {
                return Err(Error::NotConjugationInvariant(x));
            }
            for y in system.orbit_of(x) {
                let g = system.transporter(x, y).expect("same orbit");
                if per_point.insert(y, psi.transported(g)).is_some() {
                    return Err(Error::Input(format!("two entries given for the orbit of {x}")));
                }
            }
        }
        Ok(StateField { system, per_point })
    }

    pub fn system(&self) -> &Arc<Action> {
        &self.system
    }

    pub fn get(&self, x: usize) -> Option<&PositiveDefiniteFunction> {
        self.per_point.get(&x)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &PositiveDefiniteFunction)> {
        self.per_point.iter().map(|(&x, p)| (x, p))
    }

    /// `t'(x, k) = ν(x) ψ_x(k) [k ∈ G_x]`, zero where no entry exists.
    pub fn weighted_value(&self, nu: &MeasureOnX, x: usize, k: usize) -> C64 {
        self.per_point.get(&x).map_or(ZERO, |psi| psi.value_or_zero(k) * nu.weight(x))
    }

    /// Largest deviation from `ψ_{g·x}(g k g⁻¹) = ψ_x(k)` and from conjugation
    /// invariance, over points carrying entries. Zero for trace data.
    pub fn trace_compatibility_residual(&self) -> f64 {
        let group = self.system.group();
        let mut worst = 0.0f64;
        for (&x, psi) in &self.per_point {
            worst = worst.max(psi.conjugation_residual());
            for g in group.elements() {
                let Some(moved) = self.per_point.get(&self.system.apply(g, x)) else { continue };
                for (&k, &v) in psi.domain().members().iter().zip(psi.values()) {
                    let w = moved.value(group.conjugate(g, k)).expect("conjugate stabilizer");
                    worst = worst.max((w - v).norm());
                }
            }
        }
        worst
    }
}

/// `t(x, g) = ν(x) ψ_x(g)` for `g ∈ G_x` and `0` otherwise.
pub fn build_from_field(nu: &MeasureOnX, field: &StateField, psd_tol: f64) -> Result<TraceFunctional> {
    let system = field.system().clone();
    if nu.len() != system.space_size() {
        return Err(Error::Input(format!("measure has {} points, system has {}", nu.len(), system.space_size())));
    }
    if (nu.total_mass() - 1.0).abs() > MASS_TOL {
        return Err(Error::MassError(format!("total mass {} is not 1", nu.total_mass())));
    }
    for x in 0..system.space_size() {
        if nu.weight(x) > 0.0 {
            let psi = field.get(x).ok_or(Error::MissingFieldEntry(x))?;
            if !psi.is_state(psd_tol) {
                return Err(Error::NotPositiveDefinite(psi.check_positive_definite().unwrap_or(f64::NEG_INFINITY)));
            }
        }
    }
    Ok(TraceFunctional::from_fn(system, |x, g| field.weighted_value(nu, x, g)))
}

/// As [`build_from_field`], first checking the extra conditions for a trace:
/// `ν` is invariant and the field is equivariant with conjugation-invariant entries.
pub fn build_trace_from_field(nu: &MeasureOnX, field: &StateField, psd_tol: f64) -> Result<TraceFunctional> {
    let system = field.system();
    let r = system.check_invariant_measure(nu);
    if r > MASS_TOL {
        return Err(Error::InvarianceViolation {
            condition: "measure invariance".into(),
            detail: format!("max |ν(g·x) − ν(x)| = {r:e}"),
        });
    }
    let r = field.trace_compatibility_residual();
    if r > MASS_TOL {
        return Err(Error::InvarianceViolation {
            condition: "field equivariance".into(),
            detail: format!("max |ψ_(g·x)(g k g⁻¹) − ψ_x(k)| = {r:e}"),
        });
    }
    build_from_field(nu, field, psd_tol)
}

/// A subgroup `H`, a character `χ ∈ Ĥ` and an orbit on which `H` is the stabilizer.
#[derive(Debug, Clone)]
pub struct ExtremalTriple {
    system: Arc<Action>,
    subgroup: Subgroup,
    character: Character,
    orbit: Vec<usize>,
}

impl ExtremalTriple {
    pub fn new(system: Arc<Action>, character: Character, orbit_point: usize) -> Result<Self> {
        if !system.group().is_abelian() {
            return Err(Error::NotAbelian);
        }
        if orbit_point >= system.space_size() {
            return Err(Error::Input(format!("point {orbit_point} outside the system")));
        }
        let subgroup = character.domain().clone();
        let orbit = system.orbit_of(orbit_point);
        for &y in &orbit {
            if system.stabilizer(y) != subgroup {
                return Err(Error::StabilizerMismatch(y));
            }
        }
        Ok(ExtremalTriple { system, subgroup, character, orbit })
    }

    pub fn system(&self) -> &Arc<Action> {
        &self.system
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn character(&self) -> &Character {
        &self.character
    }

    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    /// The uniform probability measure on the orbit.
    pub fn measure(&self) -> MeasureOnX {
        let mut w = vec![0.0; self.system.space_size()];
        for &y in &self.orbit {
            w[y] = 1.0 / self.orbit.len() as f64;
        }
        MeasureOnX::new(w).expect("nonnegative")
    }
}

/// `t(x, g) = [x ∈ orbit][g ∈ H] χ(g) / |orbit|`.
pub fn build_extremal(e: &ExtremalTriple) -> TraceFunctional {
    let size = e.orbit.len() as f64;
    TraceFunctional::from_fn(e.system.clone(), |x, g| {
        if e.orbit.binary_search(&x).is_ok() {
            e.character.value(g).map_or(ZERO, |v| v / size)
        } else {
            ZERO
        }
    })
}

/// `t(x, g) = ν(x) Σ_χ ν_x(χ) χ(g)` from a measure on `X` and, per orbit
/// (keyed by its smallest point), a probability measure on `Ĝ`.
pub fn build_cabel(nu: &MeasureOnX, duals: &BTreeMap<usize, DualMeasure>, system: &Arc<Action>) -> Result<TraceFunctional> {
    let group = system.group();
    let all_chars = dual_group(group)?;
    if nu.len() != system.space_size() {
        return Err(Error::Input(format!("measure has {} points, system has {}", nu.len(), system.space_size())));
    }
    if (nu.total_mass() - 1.0).abs() > MASS_TOL {
        return Err(Error::MassError(format!("total mass {} is not 1", nu.total_mass())));
    }
    let r = system.check_invariant_measure(nu);
    if r > MASS_TOL {
        return Err(Error::InvarianceViolation {
            condition: "G-invariance of the measure on X".into(),
            detail: format!("max |ν(g·x) − ν(x)| = {r:e}"),
        });
    }
    let mut t = TraceFunctional::zero(system.clone());
    for x in 0..system.space_size() {
        if nu.weight(x) == 0.0 {
            continue;
        }
        let rep = system.representative(x);
        let m = duals.get(&rep).ok_or(Error::MissingFieldEntry(rep))?;
        if m.domain().order() != group.order() {
            return Err(Error::Input(format!("dual measure for orbit {rep} is not a measure on the dual of G")));
        }
        if (m.mass() - 1.0).abs() > MASS_TOL {
            return Err(Error::MassError(format!("dual measure for orbit {rep} has mass {}", m.mass())));
        }
        let stab = system.stabilizer(x);
        let r = dual_invariance_check(m, &annihilator(&stab, &all_chars));
        if r > MASS_TOL {
            return Err(Error::InvarianceViolation {
                condition: "invariance under the annihilator of the stabilizer".into(),
                detail: format!("orbit {rep}: residual {r:e}"),
            });
        }
        for g in group.elements() {
            // off G_x the Fourier transform vanishes by annihilator invariance; store exact zeros there
            if stab.contains(g) {
                t.set(x, g, m.fourier_value(g).expect("whole group") * nu.weight(x));
            }
        }
    }
    Ok(t)
}

/// The functional `t(pt, g) = ω(g)` on the one-point system (via `λ_g ↦ u_g`).
pub fn embed_group_state(omega: &PositiveDefiniteFunction) -> Result<TraceFunctional> {
    let group: Arc<FiniteGroup> = omega.domain().group().clone();
    if omega.domain().order() != group.order() {
        return Err(Error::Input("state must be defined on the whole group".into()));
    }
    let system = Arc::new(Action::trivial(group, 1));
    Ok(TraceFunctional::from_fn(system, |_, g| omega.value_or_zero(g)))
}
