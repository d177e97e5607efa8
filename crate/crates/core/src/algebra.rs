//! The crossed product `C(X) ⋊ G` of a finite system: sparse elements in the
//! monomial basis `δ_x u_g`, product and involution, the covariant matrix
//! representation and Gram matrices of functionals.
//!
//! The product is fixed by covariance `u_g f u_g^* = f(g⁻¹·)`:
//! `(δ_x u_g)(δ_y u_h) = [x = g·y] δ_x u_{gh}` and
//! `(δ_x u_g)^* = δ_{g⁻¹·x} u_{g⁻¹}`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::dynamics::Action;
use crate::linalg::{numerical_rank, hermitian_eigen, hs_inner, CMatrix, C64, ONE, ZERO};
use crate::tracebuild::TraceFunctional;
use crate::{Error, Result};

/// Coefficients with modulus below this are dropped.
pub const PRUNE: f64 = 1e-15;

/// A finite-dimensional `*`-algebra with a basis closed (up to scalars) under
/// products and adjoints.
pub trait MonomialAlgebra {
    fn dim(&self) -> usize;
    /// `b_i b_j = coeff · b_k`, or `None` when the product vanishes.
    fn product(&self, i: usize, j: usize) -> Option<(usize, C64)>;
    /// `b_i^* = coeff · b_k`.
    fn adjoint(&self, i: usize) -> (usize, C64);
    /// The unit as a combination of basis elements.
    fn unit(&self) -> Vec<(usize, C64)>;
}

/// A [`MonomialAlgebra`] with a faithful `*`-representation on `ℂ^n`.
pub trait Represented: MonomialAlgebra {
    fn rep_dim(&self) -> usize;
    fn rep(&self, i: usize) -> CMatrix;
}

/// Monomial basis of `C(X) ⋊ G`, index `x·|G| + g`.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    action: Arc<Action>,
}

impl CrossedProduct {
    pub fn new(action: Arc<Action>) -> Self {
        CrossedProduct { action }
    }

    pub fn action(&self) -> &Arc<Action> {
        &self.action
    }

    #[inline]
    pub fn index(&self, x: usize, g: usize) -> usize {
        x * self.action.group().order() + g
    }

    #[inline]
    pub fn monomial(&self, i: usize) -> (usize, usize) {
        let n = self.action.group().order();
        (i / n, i % n)
    }
}

impl MonomialAlgebra for CrossedProduct {
    fn dim(&self) -> usize {
        self.action.space_size() * self.action.group().order()
    }

    fn product(&self, i: usize, j: usize) -> Option<(usize, C64)> {
        let (x, g) = self.monomial(i);
        let (y, h) = self.monomial(j);
        (x == self.action.apply(g, y)).then(|| (self.index(x, self.action.group().mul(g, h)), ONE))
    }

    fn adjoint(&self, i: usize) -> (usize, C64) {
        let (x, g) = self.monomial(i);
        let gi = self.action.group().inv(g);
        (self.index(self.action.apply(gi, x), gi), ONE)
    }

    fn unit(&self) -> Vec<(usize, C64)> {
        let e = self.action.group().identity();
        (0..self.action.space_size()).map(|x| (self.index(x, e), ONE)).collect()
    }
}

impl Represented for CrossedProduct {
    fn rep_dim(&self) -> usize {
        self.dim()
    }

    fn rep(&self, i: usize) -> CMatrix {
        let (y, g) = self.monomial(i);
        monomial_image(&self.action, y, g)
    }
}

/// `π(δ_y u_g)` in the covariant representation on `⊕_x ℓ²(G)`:
/// `(π(f)ξ)_x(h) = f(h·x) ξ_x(h)`, `(π(u_g)ξ)_x(h) = ξ_x(g⁻¹h)`.
fn monomial_image(action: &Action, y: usize, g: usize) -> CMatrix {
    let group = action.group();
    let n = group.order();
    let d = action.space_size() * n;
    let gi = group.inv(g);
    let mut m = CMatrix::zeros(d, d);
    for x in 0..action.space_size() {
        for h in 0..n {
            if action.apply(h, x) == y {
                m[(x * n + h, x * n + group.mul(gi, h))] = ONE;
            }
        }
    }
    m
}

/// Sparse element `Σ a(x, g) δ_x u_g`.
#[derive(Debug, Clone)]
pub struct CrossedElement {
    system: Arc<Action>,
    coeffs: BTreeMap<(usize, usize), C64>,
}

impl PartialEq for CrossedElement {
    fn eq(&self, other: &Self) -> bool {
        same_system(&self.system, &other.system) && self.coeffs == other.coeffs
    }
}

fn same_system(a: &Arc<Action>, b: &Arc<Action>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl CrossedElement {
    pub fn zero(system: Arc<Action>) -> Self {
        CrossedElement { system, coeffs: BTreeMap::new() }
    }

    pub fn monomial(system: Arc<Action>, x: usize, g: usize) -> Self {
        Self::from_terms(system, [(x, g, ONE)]).expect("valid monomial")
    }

    /// `1 = Σ_x δ_x u_e`.
    pub fn identity(system: Arc<Action>) -> Self {
        let e = system.group().identity();
        let n = system.space_size();
        Self::from_terms(system, (0..n).map(|x| (x, e, ONE))).expect("valid unit")
    }

    /// The function `f ∈ C(X)` as `Σ_x f(x) δ_x u_e`.
    pub fn function(system: Arc<Action>, f: &[C64]) -> Result<Self> {
        let e = system.group().identity();
        Self::from_terms(system, f.iter().enumerate().map(|(x, &v)| (x, e, v)))
    }

    /// `u_g = Σ_x δ_x u_g`.
    pub fn unitary(system: Arc<Action>, g: usize) -> Self {
        let n = system.space_size();
        Self::from_terms(system, (0..n).map(|x| (x, g, ONE))).expect("valid unitary")
    }

    pub fn from_terms(system: Arc<Action>, terms: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        let mut out = CrossedElement::zero(system);
        for (x, g, v) in terms {
            if x >= out.system.space_size() || g >= out.system.group().order() {
                return Err(Error::Input(format!("monomial ({x}, {g}) outside the system")));
            }
            *out.coeffs.entry((x, g)).or_insert(ZERO) += v;
        }
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, v| v.norm() >= PRUNE);
    }

    pub fn system(&self) -> &Arc<Action> {
        &self.system
    }

    pub fn coeff(&self, x: usize, g: usize) -> C64 {
        self.coeffs.get(&(x, g)).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.coeffs.iter().map(|(&(x, g), &v)| (x, g, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out.prune();
        out
    }

    /// Bilinear extension of `(δ_x u_g)(δ_y u_h) = [x = g·y] δ_x u_{gh}`.
    pub fn multiply(&self, other: &CrossedElement) -> Result<Self> {
        if !same_system(&self.system, &other.system) {
            return Err(Error::SystemMismatch);
        }
        let a = &self.system;
        let mut out = CrossedElement::zero(a.clone());
        for (&(x, g), &u) in &self.coeffs {
            for (&(y, h), &v) in &other.coeffs {
                if x == a.apply(g, y) {
                    *out.coeffs.entry((x, a.group().mul(g, h))).or_insert(ZERO) += u * v;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Antilinear extension of `(δ_x u_g)^* = δ_{g⁻¹·x} u_{g⁻¹}`.
    pub fn adjoint(&self) -> Self {
        let a = &self.system;
        let mut out = CrossedElement::zero(a.clone());
        for (&(x, g), &v) in &self.coeffs {
            let gi = a.group().inv(g);
            *out.coeffs.entry((a.apply(gi, x), gi)).or_insert(ZERO) += v.conj();
        }
        out.prune();
        out
    }

    pub fn try_add(&self, other: &CrossedElement) -> Result<Self> {
        if !same_system(&self.system, &other.system) {
            return Err(Error::SystemMismatch);
        }
        let mut out = self.clone();
        for (&k, &v) in &other.coeffs {
            *out.coeffs.entry(k).or_insert(ZERO) += v;
        }
        out.prune();
        Ok(out)
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &CrossedElement) -> f64 {
        let mut keys: Vec<_> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|(x, g)| (self.coeff(x, g) - other.coeff(x, g)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &CrossedElement {
    type Output = CrossedElement;
    fn add(self, rhs: &CrossedElement) -> CrossedElement {
        self.try_add(rhs).expect("elements of the same system")
    }
}

impl Sub for &CrossedElement {
    type Output = CrossedElement;
    fn sub(self, rhs: &CrossedElement) -> CrossedElement {
        self.try_add(&rhs.scale(-ONE)).expect("elements of the same system")
    }
}

impl Mul for &CrossedElement {
    type Output = CrossedElement;
    fn mul(self, rhs: &CrossedElement) -> CrossedElement {
        self.multiply(rhs).expect("elements of the same system")
    }
}

/// Images of all basis monomials under the covariant representation.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub dimension: usize,
    pub images: Vec<CMatrix>,
    basis: CrossedProduct,
}

impl MatrixRep {
    pub fn image(&self, a: &CrossedElement) -> CMatrix {
        let mut m = CMatrix::zeros(self.dimension, self.dimension);
        for (x, g, v) in a.terms() {
            m += &self.images[self.basis.index(x, g)] * v;
        }
        m
    }

    /// Dimension of the span of the images, via the Hilbert–Schmidt Gram matrix.
    pub fn image_dimension(&self, rank_tol: f64) -> usize {
        span_dimension(&self.images, rank_tol)
    }
}

/// Dimension of the linear span of a set of matrices.
pub fn span_dimension(mats: &[CMatrix], rank_tol: f64) -> usize {
    let n = mats.len();
    let gram = CMatrix::from_fn(n, n, |i, j| hs_inner(&mats[i], &mats[j]));
    numerical_rank(&hermitian_eigen(&gram).0, rank_tol)
}

pub fn faithful_rep(action: &Arc<Action>) -> MatrixRep {
    let basis = CrossedProduct::new(action.clone());
    let images = (0..basis.dim()).map(|i| basis.rep(i)).collect();
    MatrixRep { dimension: basis.dim(), images, basis }
}

/// `Gram[(x,g),(y,h)] = t((δ_x u_g)^*(δ_y u_h)) = [x = y] · t(g⁻¹·x, g⁻¹h)`.
///
/// The functional must satisfy `conj t(x, g) = t(g⁻¹·x, g⁻¹)` within `tol`.
pub fn gram_matrix(t: &TraceFunctional, tol: f64) -> Result<CMatrix> {
    let (residual, (x, g)) = t.hermitian_residual();
    if residual > tol {
        return Err(Error::HermitianViolation { x, g, residual });
    }
    let action = t.system();
    let group = action.group();
    let n = group.order();
    let d = action.space_size() * n;
    let mut m = CMatrix::zeros(d, d);
    for x in 0..action.space_size() {
        for g in 0..n {
            let gi = group.inv(g);
            for h in 0..n {
                m[(x * n + g, x * n + h)] = t.value(action.apply(gi, x), group.mul(gi, h));
            }
        }
    }
    Ok(m)
}

/// `K_{ij} = t(b_i^* b_j)` for a functional given on the basis of any monomial algebra.
pub fn functional_gram<A: MonomialAlgebra + ?Sized>(alg: &A, values: &[C64]) -> CMatrix {
    let n = alg.dim();
    CMatrix::from_fn(n, n, |i, j| {
        let (ia, ca) = alg.adjoint(i);
        match alg.product(ia, j) {
            Some((k, cp)) => ca * cp * values[k],
            None => ZERO,
        }
    })
}

/// Left multiplication by `b_p` as a matrix on basis coefficients.
pub fn left_multiplication<A: MonomialAlgebra + ?Sized>(alg: &A, p: usize) -> CMatrix {
    let n = alg.dim();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        if let Some((k, cf)) = alg.product(p, j) {
            m[(k, j)] += cf;
        }
    }
    m
}
