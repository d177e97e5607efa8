use crate::algebra::{left_multiplication, CrossedProduct, MonomialAlgebra, Represented};
use crate::groups::{cocycle_from_section, Cocycle, FiniteGroup, Section};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::tracebuild::{ExtremalTriple, TraceFunctional};
use crate::{Error, Result, Tolerances};

use super::oracle::oracle_block_decomposition;

/// The twisted crossed product `ℓ^∞(O) ⋊_ω (G/H)` with basis `δ_y v_q`,
/// index `y·|Q| + q` (`y` a position in the orbit).
///
/// `(δ_y v_a)(δ_z v_b) = [y = a·z] ω(a, b) δ_y v_{ab}`.
#[derive(Debug, Clone)]
pub struct TwistedAlgebra {
    orbit: Vec<usize>,
    quotient: FiniteGroup,
    // act[q][y] = position of s(q)·orbit[y]
    act: Vec<Vec<usize>>,
    cocycle: Cocycle,
}

impl TwistedAlgebra {
    pub fn new(e: &ExtremalTriple, section: &Section) -> Result<Self> {
        if section.subgroup() != e.subgroup() {
            return Err(Error::InvalidSection("section is for a different subgroup".into()));
        }
        let cocycle = cocycle_from_section(e.character(), section)?;
        let quotient = section.quotient_group()?;
        if let Some((a, b, c)) = cocycle.identity_violation(&quotient) {
            return Err(Error::InvalidSection(format!("cocycle identity fails at ({a}, {b}, {c})")));
        }
        let system = e.system();
        let orbit = e.orbit().to_vec();
        let act = (0..quotient.order())
            .map(|q| {
                orbit
                    .iter()
                    .map(|&y| {
                        let z = system.apply(section.rep(q), y);
                        orbit.binary_search(&z).expect("orbit is invariant")
                    })
                    .collect()
            })
            .collect();
        Ok(TwistedAlgebra { orbit, quotient, act, cocycle })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn quotient(&self) -> &FiniteGroup {
        &self.quotient
    }

    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    #[inline]
    pub fn index(&self, y: usize, q: usize) -> usize {
        y * self.quotient.order() + q
    }

    #[inline]
    fn split(&self, i: usize) -> (usize, usize) {
        (i / self.quotient.order(), i % self.quotient.order())
    }
}

impl MonomialAlgebra for TwistedAlgebra {
    fn dim(&self) -> usize {
        self.orbit.len() * self.quotient.order()
    }

    fn product(&self, i: usize, j: usize) -> Option<(usize, C64)> {
        let (y, a) = self.split(i);
        let (z, b) = self.split(j);
        (y == self.act[a][z]).then(|| (self.index(y, self.quotient.mul(a, b)), self.cocycle.value(a, b)))
    }

    fn adjoint(&self, i: usize) -> (usize, C64) {
        let (y, a) = self.split(i);
        let ai = self.quotient.inv(a);
        (self.index(self.act[ai][y], ai), self.cocycle.value(ai, a).conj())
    }

    fn unit(&self) -> Vec<(usize, C64)> {
        let e = self.quotient.identity();
        (0..self.orbit.len()).map(|y| (self.index(y, e), ONE)).collect()
    }
}

impl Represented for TwistedAlgebra {
    fn rep_dim(&self) -> usize {
        self.dim()
    }

    /// Left regular representation; the basis is orthonormal for the
    /// canonical trace, so this is a `*`-representation.
    fn rep(&self, i: usize) -> CMatrix {
        left_multiplication(self, i)
    }
}

/// `ρ(δ_x u_g) = [x ∈ O] χ(g s(ḡ)⁻¹) δ_x v_ḡ` as a scaled twisted basis element.
fn pullback(e: &ExtremalTriple, section: &Section, tw: &TwistedAlgebra, x: usize, g: usize) -> Option<(usize, C64)> {
    let y = tw.orbit.binary_search(&x).ok()?;
    let group = e.system().group();
    let q = section.coset(g);
    let h = group.mul(g, group.inv(section.rep(q)));
    let phase = e.character().value(h).expect("g s(ḡ)⁻¹ lies in H");
    Some((tw.index(y, q), phase))
}

/// Largest defect of `ρ: C(X) ⋊ G → ℓ^∞(O) ⋊_ω G/H` as a `*`-homomorphism on basis pairs.
pub fn twisted_pullback_residual(e: &ExtremalTriple, section: &Section) -> Result<f64> {
    let tw = TwistedAlgebra::new(e, section)?;
    let cp = CrossedProduct::new(e.system().clone());
    let mul = |a: Option<(usize, C64)>, b: Option<(usize, C64)>| -> Option<(usize, C64)> {
        let (i, ca) = a?;
        let (j, cb) = b?;
        tw.product(i, j).map(|(k, cf)| (k, ca * cb * cf))
    };
    let diff = |a: Option<(usize, C64)>, b: Option<(usize, C64)>| -> f64 {
        match (a, b) {
            (None, None) => 0.0,
            (Some((_, v)), None) | (None, Some((_, v))) => v.norm(),
            (Some((i, u)), Some((j, v))) if i == j => (u - v).norm(),
            (Some((_, u)), Some((_, v))) => u.norm().max(v.norm()),
        }
    };
    let rho = |i: usize| {
        let (x, g) = cp.monomial(i);
        pullback(e, section, &tw, x, g)
    };
    let mut worst = 0.0f64;
    for i in 0..cp.dim() {
        let (k, cf) = cp.adjoint(i);
        let star = rho(i).map(|(j, v)| {
            let (ja, ca) = tw.adjoint(j);
            (ja, v.conj() * ca)
        });
        worst = worst.max(diff(star, rho(k).map(|(j, v)| (j, v * cf))));
        for j in 0..cp.dim() {
            let lhs = cp.product(i, j).and_then(|(k, cf)| rho(k).map(|(r, v)| (r, v * cf)));
            worst = worst.max(diff(lhs, mul(rho(i), rho(j))));
        }
    }
    Ok(worst)
}

/// Pulls the unique tracial state of the twisted algebra back along `ρ`.
///
/// Fails with [`Error::NotSingleBlock`] if the twisted algebra is not simple.
pub fn twisted_quotient_trace(e: &ExtremalTriple, section: &Section, seed: u64, tol: &Tolerances) -> Result<TraceFunctional> {
    let tw = TwistedAlgebra::new(e, section)?;
    let dec = oracle_block_decomposition(&tw, seed, tol)?;
    if dec.blocks.len() != 1 {
        return Err(Error::NotSingleBlock(dec.blocks.len()));
    }
    let tau = &dec.blocks[0].trace;
    Ok(TraceFunctional::from_fn(e.system().clone(), |x, g| {
        pullback(e, section, &tw, x, g).map_or(ZERO, |(i, v)| v * tau[i])
    }))
}
