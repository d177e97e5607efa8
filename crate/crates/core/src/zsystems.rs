//! Crossed products `C(X) ⋊_T ℤ` for a permutation `T` of a finite set,
//! certified on a window `|m| ≤ M` of powers of the implementing unitary.
//!
//! Every point is periodic, so a trace is determined by one circle measure
//! `λ_i` per orbit, invariant under rotation by the orbit period, through its
//! moments: `t(x, m) = c^{(i)}_m / n_i` for `x ∈ O_i`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::dynamics::Action;
use crate::groups::FiniteGroup;
use crate::linalg::{c, min_eigenvalue, CMatrix, C64, ZERO};
use crate::states::MomentSequence;
use crate::tracebuild::{TraceFunctional, MASS_TOL};
use crate::{Error, Result, Tolerances};

/// Moments `c_m` with `n ∤ m` up to this size count as zero.
pub const ROTATION_TOL: f64 = 1e-9;

/// A permutation `T` of `{0, …, n−1}` with a certification window `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSystem {
    perm: Vec<usize>,
    inverse: Vec<usize>,
    window: usize,
}

/// A `T`-orbit with its smallest point as representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZOrbit {
    pub rep: usize,
    pub period: usize,
    pub points: Vec<usize>,
}

/// Orbit structure: periodic orbits and the (always empty) aperiodic set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub orbits: Vec<ZOrbit>,
    pub aperiodic: Vec<usize>,
}

impl ZSystem {
    /// Requires a bijection and `M ≥ 2 · max period`.
    pub fn new(perm: Vec<usize>, window: usize) -> Result<Self> {
        let n = perm.len();
        let mut inverse = vec![usize::MAX; n];
        for (x, &y) in perm.iter().enumerate() {
            if y >= n || inverse[y] != usize::MAX {
                return Err(Error::InvalidAction(format!("T is not a permutation of {n} points")));
            }
            inverse[y] = x;
        }
        let z = ZSystem { perm, inverse, window };
        let max_period = z.orbits_and_periods().orbits.iter().map(|o| o.period).max().unwrap_or(1);
        if window < 2 * max_period {
            return Err(Error::Input(format!("window {window} is below twice the largest period {max_period}")));
        }
        Ok(z)
    }

    /// The smallest admissible window, `2 · max period`, but at least `min_window`.
    pub fn with_default_window(perm: Vec<usize>, min_window: usize) -> Result<Self> {
        let probe = ZSystem { perm: perm.clone(), inverse: Vec::new(), window: 0 };
        let max_period = probe.orbits_raw().iter().map(|o| o.len()).max().unwrap_or(1);
        Self::new(perm, min_window.max(2 * max_period))
    }

    pub fn space_size(&self) -> usize {
        self.perm.len()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `T^m x` for any integer `m`.
    pub fn apply(&self, m: i64, x: usize) -> usize {
        let mut y = x;
        let (step, k) = if m >= 0 { (&self.perm, m) } else { (&self.inverse, -m) };
        for _ in 0..k {
            y = step[y];
        }
        y
    }

    fn orbits_raw(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = Vec::new();
        for x in 0..self.perm.len() {
            if seen[x] {
                continue;
            }
            let mut orbit = vec![x];
            seen[x] = true;
            let mut y = self.perm[x];
            while y != x {
                seen[y] = true;
                orbit.push(y);
                y = self.perm[y];
            }
            out.push(orbit);
        }
        out
    }

    /// Orbits in order of their smallest point; points listed along `T`.
    pub fn orbits_and_periods(&self) -> OrbitSummary {
        let orbits = self
            .orbits_raw()
            .into_iter()
            .map(|points| ZOrbit { rep: points[0], period: points.len(), points })
            .collect();
        OrbitSummary { orbits, aperiodic: Vec::new() }
    }

    fn orbit_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.perm.len()];
        for (i, o) in self.orbits_raw().iter().enumerate() {
            for &x in o {
                idx[x] = i;
            }
        }
        idx
    }

    /// `ℤ/N` acting by `g·x = T^g x`; every period must divide `N`.
    pub fn to_cyclic_action(&self, n: usize) -> Result<Action> {
        if let Some(o) = self.orbits_and_periods().orbits.iter().find(|o| n % o.period != 0) {
            return Err(Error::Input(format!("period {} of the orbit of {} does not divide {n}", o.period, o.rep)));
        }
        Action::from_fn(Arc::new(FiniteGroup::cyclic(n)), self.space_size(), |g, x| self.apply(g as i64, x))
    }
}

/// `Σ a(x, m) δ_x u^m` with `|m| ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZElement {
    system: Arc<ZSystem>,
    coeffs: BTreeMap<(usize, i64), C64>,
}

impl ZElement {
    pub fn zero(system: Arc<ZSystem>) -> Self {
        ZElement { system, coeffs: BTreeMap::new() }
    }

    pub fn monomial(system: Arc<ZSystem>, x: usize, m: i64) -> Result<Self> {
        Self::from_terms(system, [(x, m, c(1.0, 0.0))])
    }

    pub fn from_terms(system: Arc<ZSystem>, terms: impl IntoIterator<Item = (usize, i64, C64)>) -> Result<Self> {
        let mut el = Self::zero(system);
        for (x, m, v) in terms {
            if x >= el.system.space_size() {
                return Err(Error::Input(format!("point {x} out of range")));
            }
            el.check_window(m)?;
            *el.coeffs.entry((x, m)).or_insert(ZERO) += v;
        }
        el.coeffs.retain(|_, v| v.norm() > 0.0);
        Ok(el)
    }

    fn check_window(&self, m: i64) -> Result<()> {
        if m.unsigned_abs() as usize > self.system.window() {
            return Err(Error::WindowExceeded(m, self.system.window()));
        }
        Ok(())
    }

    pub fn system(&self) -> &Arc<ZSystem> {
        &self.system
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64, C64)> + '_ {
        self.coeffs.iter().map(|(&(x, m), &v)| (x, m, v))
    }

    pub fn coeff(&self, x: usize, m: i64) -> C64 {
        self.coeffs.get(&(x, m)).copied().unwrap_or(ZERO)
    }

    /// `(δ_x u^m)(δ_y u^k) = [x = T^m y] δ_x u^{m+k}`; products leaving the
    /// window are an error rather than being wrapped.
    pub fn multiply(&self, other: &ZElement) -> Result<ZElement> {
        if self.system != other.system {
            return Err(Error::SystemMismatch);
        }
        let mut out = ZElement::zero(self.system.clone());
        for (&(x, m), &a) in &self.coeffs {
            for (&(y, k), &b) in &other.coeffs {
                if x == self.system.apply(m, y) {
                    out.check_window(m + k)?;
                    *out.coeffs.entry((x, m + k)).or_insert(ZERO) += a * b;
                }
            }
        }
        out.coeffs.retain(|_, v| v.norm() > 0.0);
        Ok(out)
    }

    /// `(δ_x u^m)^* = δ_{T^{−m} x} u^{−m}`.
    pub fn adjoint(&self) -> ZElement {
        let mut out = ZElement::zero(self.system.clone());
        for (&(x, m), &a) in &self.coeffs {
            *out.coeffs.entry((self.system.apply(-m, x), -m)).or_insert(ZERO) += a.conj();
        }
        out
    }
}

/// The canonical conditional expectation onto `C(X)`: keeps the `m = 0` terms.
pub fn conditional_expectation_e(a: &ZElement) -> ZElement {
    let mut out = ZElement::zero(a.system.clone());
    out.coeffs = a.coeffs.iter().filter(|(&(_, m), _)| m == 0).map(|(&k, &v)| (k, v)).collect();
    out
}

/// `E_x(f u^m) = (1/n) Σ_{k<n} f(T^k x) u^m`, returned as `b_{−M}, …, b_M`.
pub fn conditional_expectation_ex(z: &ZSystem, x: usize, a: &ZElement) -> Vec<C64> {
    let w = z.window() as i64;
    let orbit: Vec<usize> = z.orbits_and_periods().orbits.into_iter().find(|o| o.points.contains(&x)).map(|o| o.points).unwrap_or_default();
    let n = orbit.len() as f64;
    (-w..=w).map(|m| orbit.iter().map(|&y| a.coeff(y, m)).sum::<C64>() / n).collect()
}

/// Values `t(x, m) = t(δ_x u^m)` for `|m| ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTrace {
    system: Arc<ZSystem>,
    values: Vec<C64>,
}

impl ZTrace {
    pub fn zero(system: Arc<ZSystem>) -> Self {
        let n = system.space_size() * (2 * system.window() + 1);
        ZTrace { system, values: vec![ZERO; n] }
    }

    pub fn from_fn(system: Arc<ZSystem>, f: impl Fn(usize, i64) -> C64) -> Self {
        let mut t = Self::zero(system);
        let w = t.system.window() as i64;
        for x in 0..t.system.space_size() {
            for m in -w..=w {
                t.set(x, m, f(x, m));
            }
        }
        t
    }

    pub fn system(&self) -> &Arc<ZSystem> {
        &self.system
    }

    fn slot(&self, x: usize, m: i64) -> usize {
        let w = self.system.window() as i64;
        assert!(m.abs() <= w, "exponent {m} outside window {w}");
        x * (2 * w as usize + 1) + (m + w) as usize
    }

    pub fn value(&self, x: usize, m: i64) -> C64 {
        self.values[self.slot(x, m)]
    }

    pub fn set(&mut self, x: usize, m: i64, v: C64) {
        let i = self.slot(x, m);
        self.values[i] = v;
    }

    pub fn evaluate(&self, a: &ZElement) -> Result<C64> {
        if a.system != self.system {
            return Err(Error::SystemMismatch);
        }
        Ok(a.terms().map(|(x, m, v)| v * self.value(x, m)).sum())
    }

    pub fn distance(&self, other: &ZTrace) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn normalization_residual(&self) -> f64 {
        let total: C64 = (0..self.system.space_size()).map(|x| self.value(x, 0)).sum();
        (total - c(1.0, 0.0)).norm()
    }

    /// `max |conj t(x, m) − t(T^{−m} x, −m)|`.
    pub fn hermitian_residual(&self) -> f64 {
        let w = self.system.window() as i64;
        let mut worst = 0.0f64;
        for x in 0..self.system.space_size() {
            for m in -w..=w {
                worst = worst.max((self.value(x, m).conj() - self.value(self.system.apply(-m, x), -m)).norm());
            }
        }
        worst
    }

    /// `|t(ab) − t(ba)|` over monomial pairs whose product stays in the window.
    pub fn traciality_residual(&self) -> f64 {
        let z = &self.system;
        let w = z.window() as i64;
        let mut worst = 0.0f64;
        for x in 0..z.space_size() {
            for m in -w..=w {
                for y in 0..z.space_size() {
                    for k in -w..=w {
                        if (m + k).abs() > w {
                            continue;
                        }
                        let lhs = if x == z.apply(m, y) { self.value(x, m + k) } else { ZERO };
                        let rhs = if y == z.apply(k, x) { self.value(y, m + k) } else { ZERO };
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }

    /// Gram matrix on the basis `δ_x u^m`, `0 ≤ m ≤ M`:
    /// `t((δ_x u^m)^*(δ_y u^k)) = [x = y] t(T^{−m} x, k − m)`.
    ///
    /// Every entry is an in-window product; the window `[0, M]` is a
    /// translate of the symmetric one, so nothing is lost by the shift.
    pub fn gram(&self) -> CMatrix {
        let z = &self.system;
        let w = z.window();
        let d = w + 1;
        CMatrix::from_fn(z.space_size() * d, z.space_size() * d, |r, s| {
            let (x, m) = (r / d, (r % d) as i64);
            let (y, k) = (s / d, (s % d) as i64);
            if x == y {
                self.value(z.apply(-m, x), k - m)
            } else {
                ZERO
            }
        })
    }

    pub fn gram_psd_margin(&self) -> f64 {
        min_eigenvalue(&self.gram())
    }
}

/// The measure `λ_i` of one orbit, through its moment window.
#[derive(Debug, Clone, PartialEq)]
pub struct ZOrbitData {
    pub rep: usize,
    pub moments: MomentSequence,
}

impl ZOrbitData {
    pub fn period(&self) -> usize {
        self.moments.period()
    }

    pub fn mass(&self) -> f64 {
        self.moments.mass()
    }
}

/// Classifying data of a trace on `C(X) ⋊ ℤ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTraceData {
    pub orbits: Vec<ZOrbitData>,
    /// The part of `ν` on aperiodic points; always empty for finite `X`.
    pub aperiodic: Vec<(usize, f64)>,
}

impl ZTraceData {
    pub fn new(orbits: Vec<ZOrbitData>) -> Self {
        ZTraceData { orbits, aperiodic: Vec::new() }
    }

    pub fn total_mass(&self) -> f64 {
        self.orbits.iter().map(ZOrbitData::mass).sum()
    }

    /// Largest moment difference over matching orbits.
    pub fn distance(&self, other: &ZTraceData) -> f64 {
        if self.orbits.len() != other.orbits.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.orbits.iter().zip(&other.orbits) {
            if a.rep != b.rep || a.period() != b.period() {
                return f64::INFINITY;
            }
            let w = a.moments.window().min(b.moments.window()) as i64;
            for m in -w..=w {
                worst = worst.max((a.moments.get(m) - b.moments.get(m)).norm());
            }
        }
        worst
    }
}

/// `t(x, m) = c^{(i)}_m / n_i` for `x ∈ O_i`.
///
/// Orbits absent from the data carry no mass.
pub fn build_ztrace(z: &Arc<ZSystem>, data: &ZTraceData, psd_tol: f64) -> Result<ZTrace> {
    let summary = z.orbits_and_periods();
    let index = z.orbit_index();
    let mut per_orbit: Vec<Option<&MomentSequence>> = vec![None; summary.orbits.len()];
    for d in &data.orbits {
        if d.rep >= z.space_size() {
            return Err(Error::Input(format!("orbit representative {} out of range", d.rep)));
        }
        let i = index[d.rep];
        let orbit = &summary.orbits[i];
        if orbit.rep != d.rep {
            return Err(Error::Input(format!("{} is not the smallest point of its orbit (use {})", d.rep, orbit.rep)));
        }
        if per_orbit[i].is_some() {
            return Err(Error::Input(format!("orbit of {} given twice", d.rep)));
        }
        if d.period() != orbit.period {
            return Err(Error::PeriodMismatch { rep: d.rep, expected: orbit.period, got: d.period() });
        }
        if d.moments.window() < z.window() {
            return Err(Error::WindowExceeded(z.window() as i64, d.moments.window()));
        }
        d.moments.validate(psd_tol)?;
        per_orbit[i] = Some(&d.moments);
    }
    let mass = data.total_mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MassError(format!("orbit masses sum to {mass}")));
    }
    Ok(ZTrace::from_fn(z.clone(), |x, m| {
        let i = index[x];
        per_orbit[i].map_or(ZERO, |c| c.get(m) / summary.orbits[i].period as f64)
    }))
}

/// Diagnostics of [`decompose_ztrace`].
#[derive(Debug, Clone, Serialize)]
pub struct ZDecompositionReport {
    pub orbits: Vec<ZOrbit>,
    pub aperiodic: Vec<usize>,
    pub rotation_residual: f64,
    /// Smallest Toeplitz eigenvalue of `(c_{n·k})_k` per orbit representative.
    pub toeplitz_margins: BTreeMap<usize, f64>,
    /// Uniqueness holds for the moments inside the window only.
    pub window_level_uniqueness: bool,
}

/// Inverse of [`build_ztrace`]: `c^{(i)}_m = n_i · t(x_i, m)`.
///
/// Traciality on the window amounts to `t` being constant along orbits and
/// vanishing at `n_i ∤ m`; positivity amounts to Toeplitz positivity per
/// orbit. Each is reported by its own error.
pub fn decompose_ztrace(t: &ZTrace, tol: &Tolerances) -> Result<(ZTraceData, ZDecompositionReport)> {
    let z = t.system();
    let norm = t.normalization_residual();
    if norm > tol.tol {
        return Err(Error::NotAState(format!("normalization residual {norm:.3e}")));
    }
    let herm = t.hermitian_residual();
    if herm > tol.tol {
        return Err(Error::NotAState(format!("not Hermitian: residual {herm:.3e}")));
    }
    let w = z.window() as i64;
    let summary = z.orbits_and_periods();
    for o in &summary.orbits {
        for m in -w..=w {
            let v = t.value(o.rep, m);
            if o.points.iter().any(|&y| (t.value(y, m) - v).norm() > tol.tol) {
                return Err(Error::OrbitInconsistency { rep: o.rep, m });
            }
        }
    }
    let mut rotation = 0.0f64;
    let mut margins = BTreeMap::new();
    let mut orbits = Vec::with_capacity(summary.orbits.len());
    for o in &summary.orbits {
        let n = o.period as i64;
        let mut cs = Vec::with_capacity(2 * w as usize + 1);
        for m in -w..=w {
            let v = t.value(o.rep, m) * n as f64;
            if m.rem_euclid(n) != 0 {
                if v.norm() > ROTATION_TOL {
                    return Err(Error::RotationViolation { rep: o.rep, m, period: o.period, value: v.norm() });
                }
                rotation = rotation.max(v.norm());
                cs.push(ZERO);
            } else {
                cs.push(v);
            }
        }
        let seq = MomentSequence::unchecked(z.window(), o.period, cs)?;
        let margin = min_eigenvalue(&seq.decimated().toeplitz());
        if margin < -tol.psd_tol {
            return Err(Error::MomentNotPSD(margin));
        }
        margins.insert(o.rep, margin);
        orbits.push(ZOrbitData { rep: o.rep, moments: seq });
    }
    let report = ZDecompositionReport {
        orbits: summary.orbits.clone(),
        aperiodic: summary.aperiodic.clone(),
        rotation_residual: rotation,
        toeplitz_margins: margins,
        window_level_uniqueness: true,
    };
    Ok((ZTraceData::new(orbits), report))
}

/// `max |t_ℤ(x, m) − t_{ℤ/N}(x, m mod N)|` over the window.
pub fn cyclic_consistency_residual(t: &ZTrace, cyclic: &TraceFunctional) -> Result<f64> {
    let z = t.system();
    let a = cyclic.system();
    let n = a.group().order() as i64;
    if a.space_size() != z.space_size() || (0..z.space_size()).any(|x| a.apply(1 % n as usize, x) != z.apply(1, x)) {
        return Err(Error::SystemMismatch);
    }
    let w = z.window() as i64;
    let mut worst = 0.0f64;
    for x in 0..z.space_size() {
        for m in -w..=w {
            worst = worst.max((t.value(x, m) - cyclic.value(x, m.rem_euclid(n) as usize)).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Angle;
    use crate::states::{moments_from_atoms, Atom};

    fn sys(perm: Vec<usize>) -> Arc<ZSystem> {
        Arc::new(ZSystem::with_default_window(perm, 8).unwrap())
    }

    #[test]
    fn orbit_examples() {
        let s = sys(vec![0, 1, 2]).orbits_and_periods();
        assert_eq!(s.orbits.iter().map(|o| o.period).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert!(s.aperiodic.is_empty());
        let s = sys(vec![1, 2, 0]).orbits_and_periods();
        assert_eq!(s.orbits.len(), 1);
        assert_eq!(s.orbits[0].period, 3);
        let s = sys(vec![1, 0, 3, 4, 2]).orbits_and_periods();
        assert_eq!(s.orbits[0].points, vec![0, 1]);
        assert_eq!(s.orbits[1].points, vec![2, 3, 4]);
        assert!(ZSystem::new(vec![1, 1], 8).is_err());
        assert!(ZSystem::new(vec![1, 2, 0], 5).is_err());
    }

    #[test]
    fn expectations() {
        let z = sys(vec![1, 0]);
        let a = ZElement::monomial(z.clone(), 0, 0).unwrap();
        assert_eq!(conditional_expectation_e(&a), a);
        let b = ZElement::monomial(z.clone(), 0, 3).unwrap();
        assert_eq!(conditional_expectation_e(&b), ZElement::zero(z.clone()));
        let w = z.window() as usize;
        let ex = conditional_expectation_ex(&z, 0, &ZElement::monomial(z.clone(), 0, 1).unwrap());
        assert_eq!(ex[w + 1], c(0.5, 0.0));
        assert_eq!(ex.iter().filter(|v| v.norm() > 0.0).count(), 1);
        let full = ZElement::from_terms(z.clone(), [(0, 2, c(1.0, 0.0)), (1, 2, c(1.0, 0.0))]).unwrap();
        assert_eq!(conditional_expectation_ex(&z, 0, &full)[w + 2], c(1.0, 0.0));
        let z2 = sys(vec![1, 0, 2]);
        let off = ZElement::monomial(z2.clone(), 2, 1).unwrap();
        assert!(conditional_expectation_ex(&z2, 0, &off).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn window_is_enforced() {
        let z = sys(vec![0]);
        assert!(matches!(ZElement::monomial(z.clone(), 0, 9), Err(Error::WindowExceeded(9, 8))));
        let a = ZElement::monomial(z.clone(), 0, 5).unwrap();
        assert!(matches!(a.multiply(&a), Err(Error::WindowExceeded(10, 8))));
    }

    #[test]
    fn build_examples() {
        let z = sys(vec![1, 0]);
        let atoms = [Atom { angle: Angle::zero(), weight: 0.5 }, Atom { angle: Angle::new(1, 2), weight: 0.5 }];
        let moments = moments_from_atoms(&atoms, z.window(), 2, 1e-9).unwrap();
        let t = build_ztrace(&z, &ZTraceData::new(vec![ZOrbitData { rep: 0, moments }]), 1e-9).unwrap();
        assert_eq!(t.value(0, 0), c(0.5, 0.0));
        assert_eq!(t.value(1, 2), c(0.5, 0.0));
        assert_eq!(t.value(0, -2), c(0.5, 0.0));
        assert_eq!(t.value(0, 1), ZERO);
        assert!(t.traciality_residual() <= 1e-15);
        assert!(t.gram_psd_margin() >= -1e-12);

        let fixed = sys(vec![0]);
        let dirac = moments_from_atoms(&[Atom { angle: Angle::zero(), weight: 1.0 }], 8, 1, 1e-9).unwrap();
        let t = build_ztrace(&fixed, &ZTraceData::new(vec![ZOrbitData { rep: 0, moments: dirac }]), 1e-9).unwrap();
        assert!((-8..=8).all(|m| t.value(0, m) == c(1.0, 0.0)));
    }

    #[test]
    fn build_errors() {
        let z = sys(vec![1, 0]);
        let leb = MomentSequence::lebesgue(1.0, 8, 1);
        let r = build_ztrace(&z, &ZTraceData::new(vec![ZOrbitData { rep: 0, moments: leb }]), 1e-9);
        assert!(matches!(r, Err(Error::PeriodMismatch { rep: 0, expected: 2, got: 1 })));
        let half = MomentSequence::lebesgue(0.5, 8, 2);
        let r = build_ztrace(&z, &ZTraceData::new(vec![ZOrbitData { rep: 0, moments: half }]), 1e-9);
        assert!(matches!(r, Err(Error::MassError(_))));
    }

    #[test]
    fn lebesgue_decomposition() {
        let z = sys(vec![1, 0, 3, 4, 2]);
        let t = ZTrace::from_fn(z.clone(), |_, m| if m == 0 { c(0.2, 0.0) } else { ZERO });
        let (d, report) = decompose_ztrace(&t, &Tolerances::default()).unwrap();
        assert!(report.aperiodic.is_empty());
        assert_eq!(d.orbits.len(), 2);
        assert!((d.orbits[0].mass() - 0.4).abs() < 1e-15);
        assert!((d.orbits[1].mass() - 0.6).abs() < 1e-15);
        assert!(d.orbits.iter().all(|o| o.moments.rotation_residual().0 == 0.0));
        let back = build_ztrace(&z, &d, 1e-9).unwrap();
        assert!(back.distance(&t) <= 1e-15);
    }

    #[test]
    fn injected_violations() {
        let z = sys(vec![1, 0]);
        let mut t = ZTrace::from_fn(z.clone(), |_, m| if m == 0 { c(0.5, 0.0) } else { ZERO });
        for x in 0..2 {
            t.set(x, 1, c(0.1, 0.0));
            t.set(x, -1, c(0.1, 0.0));
        }
        assert!(matches!(decompose_ztrace(&t, &Tolerances::default()), Err(Error::RotationViolation { rep: 0, m: -1, .. })));
        let mut t = ZTrace::from_fn(z, |_, m| if m == 0 { c(0.5, 0.0) } else { ZERO });
        t.set(0, 2, c(0.1, 0.0));
        t.set(0, -2, c(0.1, 0.0));
        assert!(matches!(decompose_ztrace(&t, &Tolerances::default()), Err(Error::OrbitInconsistency { rep: 0, m: -2 })));

        let fixed = sys(vec![0]);
        let mut t = ZTrace::from_fn(fixed, |_, m| if m == 0 { c(1.0, 0.0) } else { ZERO });
        t.set(0, 1, c(2.0, 0.0));
        t.set(0, -1, c(2.0, 0.0));
        assert!(matches!(decompose_ztrace(&t, &Tolerances::default()), Err(Error::MomentNotPSD(_))));
    }

    #[test]
    fn agrees_with_cyclic_quotient() {
        use crate::tracebuild::{build_extremal, ExtremalTriple};
        use crate::groups::Character;
        // Dirac at angle 1/4 on a fixed point, seen through ℤ → ℤ/4
        let z = Arc::new(ZSystem::new(vec![0], 8).unwrap());
        let m = moments_from_atoms(&[Atom { angle: Angle::new(1, 4), weight: 1.0 }], 8, 1, 1e-9).unwrap();
        let t = build_ztrace(&z, &ZTraceData::new(vec![ZOrbitData { rep: 0, moments: m }]), 1e-9).unwrap();
        let a = Arc::new(z.to_cyclic_action(4).unwrap());
        let chi = Character::new(a.stabilizer(0), (0..4).map(|g| Angle::new(g, 4)).collect()).unwrap();
        let tc = build_extremal(&ExtremalTriple::new(a, chi, 0).unwrap());
        assert!(cyclic_consistency_residual(&t, &tc).unwrap() <= 1e-12);
        assert!(z.to_cyclic_action(3).is_ok());
        assert!(Arc::new(ZSystem::new(vec![1, 0], 8).unwrap()).to_cyclic_action(3).is_err());
    }
}
