//! States on group algebras of finite groups and stabilizers (normalized
//! positive-definite functions), induction, Fourier duality with measures on
//! dual groups, and truncated moment sequences of circle measures.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::groups::{subgroup_characters, Angle, Character, FiniteGroup, Subgroup};
use crate::linalg::{c, min_eigenvalue, CMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

/// Tolerance for the Hermitian symmetry `ψ(h⁻¹) = conj ψ(h)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A function `ψ` on a subgroup `H`; a state on `C*(H)` when it is positive
/// definite with `ψ(e) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDefiniteFunction {
    domain: Subgroup,
    values: Vec<C64>,
}

impl PositiveDefiniteFunction {
    /// `values` are aligned with `domain.members()`.
    pub fn new(domain: Subgroup, values: Vec<C64>) -> Result<Self> {
        if values.len() != domain.order() {
            return Err(Error::Input(format!(
                "{} values for a subgroup of order {}",
                values.len(),
                domain.order()
            )));
        }
        Ok(PositiveDefiniteFunction { domain, values })
    }

    pub fn from_fn(domain: Subgroup, f: impl Fn(usize) -> C64) -> Self {
        let values = domain.members().iter().map(|&h| f(h)).collect();
        PositiveDefiniteFunction { domain, values }
    }

    pub fn from_character(chi: &Character) -> Self {
        Self::from_fn(chi.domain().clone(), |h| chi.value(h).expect("in domain"))
    }

    /// `ψ ≡ 1`, the trivial representation.
    pub fn constant_one(domain: Subgroup) -> Self {
        Self::from_fn(domain, |_| ONE)
    }

    /// `ψ = [h = e]`, the canonical trace of `C*(H)`.
    pub fn delta_identity(domain: Subgroup) -> Self {
        let e = domain.group().identity();
        Self::from_fn(domain, |h| if h == e { ONE } else { ZERO })
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, g: usize) -> Option<C64> {
        self.domain.position(g).map(|i| self.values[i])
    }

    /// The extension by zero off the domain.
    pub fn value_or_zero(&self, g: usize) -> C64 {
        self.value(g).unwrap_or(ZERO)
    }

    /// `max |ψ(h⁻¹) − conj ψ(h)|` and the worst element.
    pub fn symmetry_residual(&self) -> (f64, usize) {
        let group = self.domain.group();
        let mut worst = (0.0, group.identity());
        for (i, &h) in self.domain.members().iter().enumerate() {
            let r = (self.value(group.inv(h)).expect("closed") - self.values[i].conj()).norm();
            if r > worst.0 {
                worst = (r, h);
            }
        }
        worst
    }

    /// `[ψ(g⁻¹h)]_{g,h ∈ H}`.
    pub fn gram(&self) -> CMatrix {
        let group = self.domain.group();
        let m = self.domain.members();
        CMatrix::from_fn(m.len(), m.len(), |i, j| self.value(group.mul(group.inv(m[i]), m[j])).expect("closed"))
    }

    /// Minimal eigenvalue of [`Self::gram`].
    pub fn check_positive_definite(&self) -> Result<f64> {
        let (residual, h) = self.symmetry_residual();
        if residual > SYMMETRY_TOL {
            return Err(Error::SymmetryViolation(h));
        }
        Ok(min_eigenvalue(&self.gram()))
    }

    pub fn normalization_residual(&self) -> f64 {
        (self.value(self.domain.group().identity()).expect("identity") - ONE).norm()
    }

    pub fn is_state(&self, psd_tol: f64) -> bool {
        self.normalization_residual() <= SYMMETRY_TOL
            && self.check_positive_definite().is_ok_and(|m| m >= -psd_tol)
    }

    pub fn restrict(&self, sub: &Subgroup) -> Result<Self> {
        let values = sub
            .members()
            .iter()
            .map(|&h| self.value(h).ok_or_else(|| Error::Input(format!("{h} outside the domain"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PositiveDefiniteFunction { domain: sub.clone(), values })
    }

    /// `max |ψ(s k s⁻¹) − ψ(k)|` over `s, k` in the domain.
    pub fn conjugation_residual(&self) -> f64 {
        let group = self.domain.group();
        let mut worst = 0.0f64;
        for &s in self.domain.members() {
            for (i, &k) in self.domain.members().iter().enumerate() {
                let v = self.value(group.conjugate(s, k)).expect("closed");
                worst = worst.max((v - self.values[i]).norm());
            }
        }
        worst
    }

    /// `ψ ∘ Ad(g)⁻¹` on `gHg⁻¹`: `k ↦ ψ(g⁻¹ k g)`.
    pub fn transported(&self, g: usize) -> Self {
        let group = self.domain.group().clone();
        let gi = group.inv(g);
        let target = self.domain.conjugated(g);
        Self::from_fn(target, |k| self.value(group.conjugate(gi, k)).expect("conjugate lies in the domain"))
    }

    /// Max entrywise distance to another function on the same domain.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.domain != other.domain {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `Ind_H^G ψ`: equal to `ψ` on `H` and zero elsewhere.
pub fn induce_state(group: &Arc<FiniteGroup>, psi: &PositiveDefiniteFunction, psd_tol: f64) -> Result<PositiveDefiniteFunction> {
    if psi.domain().group() != group && **psi.domain().group() != **group {
        return Err(Error::Input("state is defined on a subgroup of a different group".into()));
    }
    let margin = psi.check_positive_definite()?;
    if margin < -psd_tol {
        return Err(Error::NotPositiveDefinite(margin));
    }
    Ok(PositiveDefiniteFunction::from_fn(Subgroup::whole(group.clone()), |g| psi.value_or_zero(g)))
}

/// A finite measure on the characters of an abelian (sub)group.
#[derive(Debug, Clone)]
pub struct DualMeasure {
    characters: Vec<Character>,
    weights: Vec<f64>,
}

impl DualMeasure {
    pub fn new(characters: Vec<Character>, weights: Vec<f64>) -> Result<Self> {
        if characters.len() != weights.len() {
            return Err(Error::Input("one weight per character required".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::NegativeWeight { index: i, weight: weights[i] });
        }
        Ok(DualMeasure { characters, weights })
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The character group's domain.
    pub fn domain(&self) -> &Subgroup {
        self.characters[0].domain()
    }

    /// `g ↦ Σ_χ m(χ) χ(g)`.
    pub fn fourier_value(&self, g: usize) -> Option<C64> {
        let mut acc = ZERO;
        for (chi, &w) in self.characters.iter().zip(&self.weights) {
            acc += chi.value(g)? * w;
        }
        Some(acc)
    }
}

/// `m(χ) = (1/|H|) Σ_h ψ(h) conj χ(h)` over the dual of the domain of `ψ`.
pub fn fourier_dual_measure(psi: &PositiveDefiniteFunction) -> Result<DualMeasure> {
    let chars = subgroup_characters(psi.domain())?;
    let order = psi.domain().order() as f64;
    let mut weights = Vec::with_capacity(chars.len());
    for (i, chi) in chars.iter().enumerate() {
        let w: C64 = psi
            .domain()
            .members()
            .iter()
            .zip(psi.values())
            .map(|(&h, &v)| v * chi.value(h).expect("same domain").conj())
            .sum::<C64>()
            / order;
        if w.re < -1e-12 {
            return Err(Error::NegativeWeight { index: i, weight: w.re });
        }
        weights.push(w.re.max(0.0));
    }
    Ok(DualMeasure { characters: chars, weights })
}

/// `ψ(h) = Σ_χ m(χ) χ(h)`.
pub fn inverse_fourier(m: &DualMeasure) -> PositiveDefiniteFunction {
    PositiveDefiniteFunction::from_fn(m.domain().clone(), |h| m.fourier_value(h).expect("same domain"))
}

/// `max_{η ∈ K, χ} |m(χη) − m(χ)|`.
pub fn dual_invariance_check(m: &DualMeasure, translations: &[Character]) -> f64 {
    let mut worst = 0.0f64;
    for eta in translations {
        let eta = match eta.restrict(m.domain()) {
            Ok(e) => e,
            Err(_) => return f64::INFINITY,
        };
        for (i, chi) in m.characters.iter().enumerate() {
            let Ok(shifted) = chi.product(&eta) else { return f64::INFINITY };
            let Some(j) = m.characters.iter().position(|c| *c == shifted) else { return f64::INFINITY };
            worst = worst.max((m.weights[j] - m.weights[i]).abs());
        }
    }
    worst
}

/// A point mass `weight · δ_{exp(2πi·angle)}` on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub angle: Angle,
    pub weight: f64,
}

/// Moments `c_m = ∫ z^m dλ` for `|m| ≤ window` of a circle measure invariant
/// under rotation by `1/period` of a turn.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    window: usize,
    period: usize,
    c: Vec<C64>,
}

impl MomentSequence {
    /// `c` lists `c_{−M}, …, c_M`. Checks symmetry, rotation invariance and
    /// Toeplitz positivity.
    pub fn new(window: usize, period: usize, c: Vec<C64>, psd_tol: f64) -> Result<Self> {
        let seq = Self::unchecked(window, period, c)?;
        seq.validate(psd_tol)?;
        Ok(seq)
    }

    /// Only checks the shape.
    pub fn unchecked(window: usize, period: usize, c: Vec<C64>) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidMoments("rotation order must be positive".into()));
        }
        if c.len() != 2 * window + 1 {
            return Err(Error::InvalidMoments(format!("{} moments for window {window}", c.len())));
        }
        Ok(MomentSequence { window, period, c })
    }

    /// From nonnegative moments `c_0, …, c_M`, completed by `c_{−m} = conj c_m`.
    pub fn from_nonnegative(period: usize, c: &[C64], psd_tol: f64) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidMoments("empty moment list".into()));
        }
        let window = c.len() - 1;
        let full: Vec<C64> = (0..=2 * window)
            .map(|i| {
                let m = i as i64 - window as i64;
                if m >= 0 { c[m as usize] } else { c[(-m) as usize].conj() }
            })
            .collect();
        Self::new(window, period, full, psd_tol)
    }

    /// Moments of `mass` times Lebesgue measure: `c_m = mass·[m = 0]`.
    pub fn lebesgue(mass: f64, window: usize, period: usize) -> Self {
        let c = (0..=2 * window).map(|i| if i == window { c(mass, 0.0) } else { ZERO }).collect();
        MomentSequence { window, period, c }
    }

    pub fn validate(&self, psd_tol: f64) -> Result<()> {
        for m in 0..=self.window as i64 {
            if (self.get(-m) - self.get(m).conj()).norm() > SYMMETRY_TOL {
                return Err(Error::InvalidMoments(format!("c_{{-{m}}} is not conj(c_{m})")));
            }
        }
        let c0 = self.get(0);
        if c0.im.abs() > SYMMETRY_TOL || c0.re < -SYMMETRY_TOL {
            return Err(Error::InvalidMoments(format!("c_0 = {c0} is not a nonnegative real")));
        }
        let (residual, m) = self.rotation_residual();
        if residual > SYMMETRY_TOL {
            return Err(Error::NotRotationInvariant(format!(
                "moment c_{m} = {:e} with {} ∤ {m}",
                residual, self.period
            )));
        }
        let margin = toeplitz_psd(self);
        if margin < -psd_tol {
            return Err(Error::MomentNotPSD(margin));
        }
        Ok(())
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// `c_m` for `|m| ≤ window`.
    pub fn get(&self, m: i64) -> C64 {
        self.c[(m + self.window as i64) as usize]
    }

    pub fn values(&self) -> &[C64] {
        &self.c
    }

    pub fn mass(&self) -> f64 {
        self.get(0).re
    }

    /// `max_{n ∤ m} |c_m|` and the worst exponent.
    pub fn rotation_residual(&self) -> (f64, i64) {
        let mut worst = (0.0, 0);
        for m in -(self.window as i64)..=self.window as i64 {
            if m.rem_euclid(self.period as i64) != 0 && self.get(m).norm() > worst.0 {
                worst = (self.get(m).norm(), m);
            }
        }
        worst
    }

    /// `[c_{l−k}]_{0 ≤ k, l ≤ M}`.
    pub fn toeplitz(&self) -> CMatrix {
        let n = self.window + 1;
        CMatrix::from_fn(n, n, |k, l| self.get(l as i64 - k as i64))
    }

    /// The subsequence `(c_{n·k})_k` as an order-1 sequence on the coarser window.
    pub fn decimated(&self) -> MomentSequence {
        let n = self.period as i64;
        let w = self.window as i64 / n;
        let c = (-w..=w).map(|k| self.get(n * k)).collect();
        MomentSequence { window: w as usize, period: 1, c }
    }
}

/// `c_m = Σ_j w_j exp(i m θ_j)`; the atom set must be invariant under rotation by `1/period`.
pub fn moments_from_atoms(atoms: &[Atom], window: usize, period: usize, psd_tol: f64) -> Result<MomentSequence> {
    if period == 0 {
        return Err(Error::InvalidMoments("rotation order must be positive".into()));
    }
    let mut by_angle: BTreeMap<Angle, f64> = BTreeMap::new();
    for a in atoms {
        if !(a.weight.is_finite() && a.weight >= 0.0) {
            return Err(Error::InvalidMoments(format!("atom at {} has weight {}", a.angle, a.weight)));
        }
        *by_angle.entry(a.angle).or_insert(0.0) += a.weight;
    }
    let step = Angle::new(1, period as i64);
    for (&angle, &w) in &by_angle {
        let partner = by_angle.get(&(angle + step)).copied().unwrap_or(0.0);
        if (partner - w).abs() > SYMMETRY_TOL {
            return Err(Error::NotRotationInvariant(format!("{angle} (weight {w})")));
        }
    }
    let c = (-(window as i64)..=window as i64)
        .map(|m| by_angle.iter().map(|(&a, &w)| a.times(m).to_complex() * w).sum())
        .collect();
    MomentSequence::new(window, period, c, psd_tol)
}

/// Minimal eigenvalue of the Toeplitz matrix of the sequence.
pub fn toeplitz_psd(c: &MomentSequence) -> f64 {
    min_eigenvalue(&c.toeplitz())
}
