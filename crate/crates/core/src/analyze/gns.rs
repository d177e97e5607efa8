use std::sync::Arc;

use crate::algebra::{functional_gram, left_multiplication, CrossedProduct, MonomialAlgebra};
use crate::dynamics::{Action, MeasureOnX};
use crate::linalg::{hermitian_defect, hermitian_eigen, max_abs, CMatrix, CVector, C64, ONE, ZERO};
use crate::tracebuild::{StateField, TraceFunctional};
use crate::{Error, Result, Tolerances};

/// Basis `δ_x ⊗ λ_g` of `C(X) ⊗ C*(G)`, index `x·|G| + g`.
#[derive(Debug, Clone)]
pub struct TensorAlgebra {
    action: Arc<Action>,
}

impl TensorAlgebra {
    pub fn new(action: Arc<Action>) -> Self {
        TensorAlgebra { action }
    }

    #[inline]
    pub fn index(&self, x: usize, g: usize) -> usize {
        x * self.action.group().order() + g
    }
}

impl MonomialAlgebra for TensorAlgebra {
    fn dim(&self) -> usize {
        self.action.space_size() * self.action.group().order()
    }

    fn product(&self, i: usize, j: usize) -> Option<(usize, C64)> {
        let n = self.action.group().order();
        let (x, g) = (i / n, i % n);
        let (y, h) = (j / n, j % n);
        (x == y).then(|| (self.index(x, self.action.group().mul(g, h)), ONE))
    }

    fn adjoint(&self, i: usize) -> (usize, C64) {
        let n = self.action.group().order();
        (self.index(i / n, self.action.group().inv(i % n)), ONE)
    }

    fn unit(&self) -> Vec<(usize, C64)> {
        let e = self.action.group().identity();
        (0..self.action.space_size()).map(|x| (self.index(x, e), ONE)).collect()
    }
}

/// The GNS triple of a positive functional on a monomial algebra.
#[derive(Debug, Clone)]
pub struct GnsRepresentation {
    pub dimension: usize,
    /// `π(b_i)` for every basis element.
    pub images: Vec<CMatrix>,
    pub cyclic: CVector,
    /// Smallest eigenvalue of the Gram matrix `t(b_i^* b_j)`.
    pub gram_margin: f64,
    // [b] ↦ W b, and its pseudo-inverse on the non-null part
    w: CMatrix,
    w_pinv: CMatrix,
}

impl GnsRepresentation {
    /// `max_i |⟨ξ, π(b_i) ξ⟩ − φ(b_i)|`.
    pub fn functional_residual(&self, values: &[C64]) -> f64 {
        self.images
            .iter()
            .zip(values)
            .map(|(m, v)| ((self.cyclic.adjoint() * m * &self.cyclic)[(0, 0)] - v).norm())
            .fold(0.0, f64::max)
    }

    /// Largest defect of `π` as a `*`-homomorphism. Multiplicativity is tested
    /// on pairs `(s, b)` with `s` from a generating set of monomials, which
    /// implies it on all pairs by induction on word length.
    pub fn star_residual<A: MonomialAlgebra + ?Sized>(&self, alg: &A) -> f64 {
        let d = self.dimension;
        let mut worst = 0.0f64;
        for i in 0..alg.dim() {
            let (k, cf) = alg.adjoint(i);
            worst = worst.max(max_abs(&(self.images[i].adjoint() - &self.images[k] * cf)));
        }
        for i in monomial_generators(alg) {
            for j in 0..alg.dim() {
                let target = match alg.product(i, j) {
                    Some((k, cf)) => &self.images[k] * cf,
                    None => CMatrix::zeros(d, d),
                };
                worst = worst.max(max_abs(&(&self.images[i] * &self.images[j] - target)));
            }
        }
        worst
    }

    /// Image of an operator on basis coefficients, provided it preserves the null space.
    fn transport(&self, op: &CMatrix) -> (CMatrix, f64) {
        let n = op.nrows();
        let null = CMatrix::identity(n, n) - &self.w_pinv * &self.w;
        let leak = max_abs(&(&self.w * op * null));
        (&self.w * op * &self.w_pinv, leak)
    }
}

/// Basis monomials whose products (up to scalars) reach every basis monomial.
pub fn monomial_generators<A: MonomialAlgebra + ?Sized>(alg: &A) -> Vec<usize> {
    let n = alg.dim();
    let mut gens = Vec::new();
    let mut reached = vec![false; n];
    for i in 0..n {
        if reached[i] {
            continue;
        }
        gens.push(i);
        reached[i] = true;
        let mut frontier = vec![i];
        while let Some(p) = frontier.pop() {
            for q in 0..n {
                if !reached[q] {
                    continue;
                }
                for (a, b) in [(p, q), (q, p)] {
                    if let Some((k, _)) = alg.product(a, b) {
                        if !reached[k] {
                            reached[k] = true;
                            frontier.push(k);
                        }
                    }
                }
            }
        }
    }
    gens
}

/// GNS construction for a functional given by its values on the basis.
pub fn gns_of<A: MonomialAlgebra + ?Sized>(alg: &A, values: &[C64], tol: &Tolerances) -> Result<GnsRepresentation> {
    let n = alg.dim();
    let k = functional_gram(alg, values);
    let defect = hermitian_defect(&k);
    if defect > tol.tol {
        return Err(Error::NotAState(format!("functional is not Hermitian: defect {defect:.3e}")));
    }
    let (lambda, v) = hermitian_eigen(&k);
    let gram_margin = lambda.first().copied().unwrap_or(0.0);
    if gram_margin < -tol.psd_tol {
        return Err(Error::NotPositive(gram_margin));
    }
    let scale = lambda.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let keep: Vec<usize> = (0..n).filter(|&i| lambda[i] > tol.rank_tol * scale).collect();
    let r = keep.len();
    let w = CMatrix::from_fn(r, n, |a, j| v[(j, keep[a])].conj() * lambda[keep[a]].sqrt());
    let w_pinv = CMatrix::from_fn(n, r, |j, a| v[(j, keep[a])] / lambda[keep[a]].sqrt());
    let mut unit = CVector::zeros(n);
    for (i, cf) in alg.unit() {
        unit[i] += cf;
    }
    let cyclic = &w * unit;
    let mut rep = GnsRepresentation { dimension: r, images: Vec::new(), cyclic, gram_margin, w, w_pinv };
    let mut leak = 0.0f64;
    for p in 0..n {
        let (img, l) = rep.transport(&left_multiplication(alg, p));
        leak = leak.max(l);
        rep.images.push(img);
    }
    if leak > tol.psd_tol {
        return Err(Error::IdentityFailure(leak));
    }
    Ok(rep)
}

/// GNS representation of a functional on `C(X) ⋊ G`.
pub fn gns(t: &TraceFunctional, tol: &Tolerances) -> Result<GnsRepresentation> {
    gns_of(&CrossedProduct::new(t.system().clone()), t.values(), tol)
}

/// Rebuilds the state `t' ∘ (E ⊗ id)` through the GNS space of
/// `Φ(δ_x ⊗ λ_g) = ν(x) ψ_x(g) [g ∈ G_x]` on `C(X) ⊗ C*(G)`, with
/// `ρ(f)[a ⊗ b] = [f(b·) a ⊗ b]` and `ρ(u_g)[a ⊗ b] = [a ⊗ λ_g b]`.
pub fn reconstruct_via_gns(nu: &MeasureOnX, field: &StateField, tol: &Tolerances) -> Result<TraceFunctional> {
    let action = field.system().clone();
    let group = action.group().clone();
    let n = group.order();
    let alg = TensorAlgebra::new(action.clone());
    let values: Vec<C64> =
        (0..action.space_size()).flat_map(|x| (0..n).map(move |g| (x, g))).map(|(x, g)| field.weighted_value(nu, x, g)).collect();
    let g = gns_of(&alg, &values, tol)?;
    let dim = alg.dim();

    let mut rho_f = Vec::with_capacity(action.space_size());
    for y in 0..action.space_size() {
        let mut d = CMatrix::zeros(dim, dim);
        for x in 0..action.space_size() {
            for h in 0..n {
                if action.apply(h, x) == y {
                    d[(alg.index(x, h), alg.index(x, h))] = ONE;
                }
            }
        }
        let (img, leak) = g.transport(&d);
        if leak > 1e-9 {
            return Err(Error::IdentityFailure(leak));
        }
        rho_f.push(img);
    }
    let rho_u: Vec<CMatrix> = (0..n)
        .map(|k| {
            let mut l = CMatrix::zeros(dim, dim);
            for x in 0..action.space_size() {
                l += left_multiplication(&alg, alg.index(x, k));
            }
            g.transport(&l).0
        })
        .collect();
    let xi = &g.cyclic;
    Ok(TraceFunctional::from_fn(action, |x, k| {
        if g.dimension == 0 {
            return ZERO;
        }
        (xi.adjoint() * &rho_f[x] * &rho_u[k] * xi)[(0, 0)]
    }))
}
