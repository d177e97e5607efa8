use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::gram_matrix;
use crate::dynamics::MeasureOnX;
use crate::linalg::{min_eigenvalue, C64, ZERO};
use crate::tracebuild::{build_from_field, StateField, TraceFunctional};
use crate::{Result, Tolerances};

/// A residual together with the basis indices where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub worst: BTreeMap<String, i64>,
}

impl Residual {
    fn zero() -> Self {
        Residual { value: 0.0, worst: BTreeMap::new() }
    }

    fn offer(&mut self, value: f64, at: &[(&str, usize)]) {
        if value > self.value {
            self.value = value;
            self.worst = at.iter().map(|&(k, v)| (k.to_string(), v as i64)).collect();
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    /// The mathematical condition being tested.
    pub condition: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub worst: BTreeMap<String, i64>,
    /// Set when a failure sits below the warning tolerance and may be rounding.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: &str, condition: &str, r: Residual, threshold: f64, warn_tol: f64) -> Self {
        let pass = r.value <= threshold;
        let note = (!pass && r.value <= warn_tol).then(|| "tolerance-related: residual below the warning level".to_string());
        CheckReport {
            check: check.into(),
            condition: condition.into(),
            residual: r.value,
            threshold,
            pass,
            worst: r.worst,
            note,
        }
    }

    /// A lower-bound check (minimal eigenvalue must be ≥ −threshold).
    pub fn margin(check: &str, condition: &str, margin: f64, threshold: f64, warn_tol: f64) -> Self {
        let pass = margin >= -threshold;
        let note = (!pass && margin >= -warn_tol).then(|| "tolerance-related: margin below the warning level".to_string());
        CheckReport {
            check: check.into(),
            condition: condition.into(),
            residual: margin,
            threshold: -threshold,
            pass,
            worst: BTreeMap::new(),
            note,
        }
    }
}

/// `max |t((δ_x u_g)(δ_y u_h)) − t((δ_y u_h)(δ_x u_g))|`
/// `= max |[x = g·y] t(x, gh) − [y = h·x] t(y, hg)|`.
pub fn check_traciality(t: &TraceFunctional) -> Residual {
    let a = t.system();
    let group = a.group();
    let mut r = Residual::zero();
    for x in 0..a.space_size() {
        for g in group.elements() {
            for y in 0..a.space_size() {
                for h in group.elements() {
                    let lhs = if x == a.apply(g, y) { t.value(x, group.mul(g, h)) } else { ZERO };
                    let rhs = if y == a.apply(h, x) { t.value(y, group.mul(h, g)) } else { ZERO };
                    r.offer((lhs - rhs).norm(), &[("x", x), ("g", g), ("y", y), ("h", h)]);
                }
            }
        }
    }
    r
}

/// `max |t(δ_y · δ_x u_g) − t(δ_x u_g · δ_y)| = max |[y = x] t(x,g) − [x = g·y] t(x,g)|`.
pub fn check_centralizer_contains_functions(t: &TraceFunctional) -> Residual {
    let a = t.system();
    let mut r = Residual::zero();
    for y in 0..a.space_size() {
        for x in 0..a.space_size() {
            for g in a.group().elements() {
                let lhs = if y == x { t.value(x, g) } else { ZERO };
                let rhs = if x == a.apply(g, y) { t.value(x, g) } else { ZERO };
                r.offer((lhs - rhs).norm(), &[("y", y), ("x", x), ("g", g)]);
            }
        }
    }
    r
}

/// `max_{g·x ≠ x} |t(x, g)|`.
pub fn support_condition_check(t: &TraceFunctional) -> Residual {
    let a = t.system();
    let mut r = Residual::zero();
    for x in 0..a.space_size() {
        for g in a.group().elements() {
            if !a.fixes(g, x) {
                r.offer(t.value(x, g).norm(), &[("x", x), ("g", g)]);
            }
        }
    }
    r
}

/// `max |t(g·x, g h g⁻¹) − t(x, h)|`.
pub fn alpha_invariance_check(t: &TraceFunctional) -> Residual {
    let a = t.system();
    let group = a.group();
    let mut r = Residual::zero();
    for x in 0..a.space_size() {
        for g in group.elements() {
            for h in group.elements() {
                let moved = t.value(a.apply(g, x), group.conjugate(g, h));
                r.offer((moved - t.value(x, h)).norm(), &[("x", x), ("g", g), ("h", h)]);
            }
        }
    }
    r
}

/// Minimal eigenvalue of the basis Gram matrix (`None` if `t` is not Hermitian).
pub fn gram_psd_margin(t: &TraceFunctional, tol: f64) -> Option<f64> {
    gram_matrix(t, tol).ok().map(|g| min_eigenvalue(&g))
}

/// Checks that make `t` a state whose centralizer contains `C(X)`.
pub fn run_state_checks(t: &TraceFunctional, tol: &Tolerances) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let norm = Residual { value: t.normalization_residual(), worst: BTreeMap::new() };
    out.push(CheckReport::new("normalization", "functional takes the value 1 on the unit", norm, tol.tol, tol.warn_tol));
    let (h, (x, g)) = t.hermitian_residual();
    let herm = Residual { value: h, worst: BTreeMap::from([("x".into(), x as i64), ("g".into(), g as i64)]) };
    out.push(CheckReport::new("hermitian", "t(a*) = conj t(a)", herm, tol.tol, tol.warn_tol));
    if let Some(m) = gram_psd_margin(t, tol.tol) {
        out.push(CheckReport::margin("positivity", "t(a*a) >= 0 (basis Gram matrix is PSD)", m, tol.psd_tol, tol.warn_tol));
    }
    out.push(CheckReport::new(
        "centralizer",
        "C(X) lies in the centralizer of the state",
        check_centralizer_contains_functions(t),
        tol.tol,
        tol.warn_tol,
    ));
    out.push(CheckReport::new(
        "support",
        "support condition: t(x, g) = 0 unless g fixes x",
        support_condition_check(t),
        tol.tol,
        tol.warn_tol,
    ));
    out
}

/// State checks plus traciality and invariance of the associated tensor state.
pub fn run_trace_checks(t: &TraceFunctional, tol: &Tolerances) -> Vec<CheckReport> {
    let mut out = run_state_checks(t, tol);
    out.push(CheckReport::new("traciality", "t(ab) = t(ba) on basis pairs", check_traciality(t), tol.tol, tol.warn_tol));
    out.push(CheckReport::new(
        "alpha-invariance",
        "invariance under alpha_g(f ⊗ a) = f(g⁻¹·) ⊗ λ_g a λ_g*",
        alpha_invariance_check(t),
        tol.tol,
        tol.warn_tol,
    ));
    out
}

/// The scalar-product identity behind the commuting representation of `C(X)`:
/// `Σ_x f(gx) f₁(x) conj f₂(x) t'(x, h⁻¹g) = Σ_x f(hx) f₁(x) conj f₂(x) t'(x, h⁻¹g)`
/// over `f, f₁, f₂ ∈ {δ_y}`, with `t'(x, k) = ν(x) ψ_x(k) [k ∈ G_x]`.
pub fn escalarpr_check(nu: &MeasureOnX, field: &StateField) -> Residual {
    let a = field.system();
    let group = a.group();
    let mut r = Residual::zero();
    // f₁ = f₂ = δ_x is forced for a nonzero summand
    for x in 0..a.space_size() {
        for g in group.elements() {
            for h in group.elements() {
                let w = field.weighted_value(nu, x, group.mul(group.inv(h), g));
                for y in 0..a.space_size() {
                    let lhs = if a.apply(g, x) == y { w } else { ZERO };
                    let rhs = if a.apply(h, x) == y { w } else { ZERO };
                    r.offer((lhs - rhs).norm(), &[("f", y), ("x", x), ("g", g), ("h", h)]);
                }
            }
        }
    }
    r
}

/// Result of building `φ = Σ_x ν(x) ω_x` from the induced states `ω_x`.
#[derive(Debug, Clone, Serialize)]
pub struct InducedConstruction {
    /// Max deviation from [`build_from_field`].
    pub residual: f64,
    /// Smallest Gram eigenvalue over the individual `ω_x`.
    pub min_psd_margin: f64,
}

/// Builds `θ_x(δ_y u_k) = [y = x] ψ_x(k)` on `C(X) ⋊ G_x`, extends each by
/// zero to `ω_x` on `C(X) ⋊ G`, and compares `Σ ν(x) ω_x` with the direct builder.
pub fn induced_construction_check(nu: &MeasureOnX, field: &StateField, psd_tol: f64) -> Result<InducedConstruction> {
    let a = field.system().clone();
    let direct = build_from_field(nu, field, psd_tol)?;
    let mut sum = TraceFunctional::zero(a.clone());
    let mut margin = f64::INFINITY;
    for (x, psi) in field.entries() {
        let stab = psi.domain();
        // θ_x on the restricted crossed product, as a table over (y, k ∈ G_x)
        let theta: Vec<Vec<C64>> = (0..a.space_size())
            .map(|y| stab.members().iter().map(|&k| if y == x { psi.value(k).expect("in domain") } else { ZERO }).collect())
            .collect();
        let omega = TraceFunctional::from_fn(a.clone(), |y, g| stab.position(g).map_or(ZERO, |i| theta[y][i]));
        if let Some(m) = gram_psd_margin(&omega, 1e-12) {
            margin = margin.min(m);
        }
        for y in 0..a.space_size() {
            for g in a.group().elements() {
                let v = sum.value(y, g) + omega.value(y, g) * nu.weight(x);
                sum.set(y, g, v);
            }
        }
    }
    Ok(InducedConstruction { residual: sum.distance(&direct), min_psd_margin: margin })
}
