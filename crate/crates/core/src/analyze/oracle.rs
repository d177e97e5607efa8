use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{span_dimension, CrossedProduct, MonomialAlgebra, Represented};
use crate::dynamics::Action;
use crate::linalg::{hermitian_eigen, numerical_rank, trace_of_product, CMatrix, C64, ZERO};
use crate::tracebuild::TraceFunctional;
use crate::{Error, Result, Tolerances};

pub const DEFAULT_SEED: u64 = 42;
const ATTEMPTS: u64 = 5;

/// One simple summand `M_d(ℂ)` of a finite-dimensional C*-algebra.
#[derive(Debug, Clone, Serialize)]
pub struct Block {
    pub dim: usize,
    /// Normalized trace of the block on the basis.
    pub trace: Vec<C64>,
    #[serde(skip)]
    pub projection: CMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDecomposition {
    pub algebra_dim: usize,
    pub center_dim: usize,
    pub seed: u64,
    pub blocks: Vec<Block>,
}

/// Coefficient vectors spanning the center, from the null space of
/// `Σ_j |[·, b_j]|²` assembled from structure constants.
fn center_basis<A: MonomialAlgebra + ?Sized>(alg: &A, rank_tol: f64) -> Vec<Vec<C64>> {
    let n = alg.dim();
    let mut k = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut rows: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
        for i in 0..n {
            if let Some((r, cf)) = alg.product(i, j) {
                rows.entry(r).or_default().push((i, cf));
            }
            if let Some((r, cf)) = alg.product(j, i) {
                rows.entry(r).or_default().push((i, -cf));
            }
        }
        for row in rows.values() {
            for &(i1, c1) in row {
                for &(i2, c2) in row {
                    k[(i1, i2)] += c1.conj() * c2;
                }
            }
        }
    }
    let (lambda, v) = hermitian_eigen(&k);
    let scale = lambda.iter().fold(1.0f64, |a, &l| a.max(l.abs()));
    (0..n).filter(|&i| lambda[i] <= rank_tol * scale).map(|i| v.column(i).iter().copied().collect()).collect()
}

fn adjoint_coeffs<A: MonomialAlgebra + ?Sized>(alg: &A, z: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; z.len()];
    for (i, zi) in z.iter().enumerate() {
        let (k, cf) = alg.adjoint(i);
        out[k] += zi.conj() * cf;
    }
    out
}

/// Splits the algebra into simple blocks by diagonalizing a generic Hermitian
/// central element in the given faithful representation.
///
/// Each block trace `w_i(b) = Tr(P_i π(b)) / Tr(P_i π(1))` is extremal among
/// tracial states; `d_i² = rank[w_i(b_j^* b_k)]`.
pub fn oracle_block_decomposition<A: Represented + ?Sized>(alg: &A, seed: u64, tol: &Tolerances) -> Result<BlockDecomposition> {
    let n = alg.dim();
    let images: Vec<CMatrix> = (0..n).map(|i| alg.rep(i)).collect();
    let algebra_dim = span_dimension(&images, tol.rank_tol);
    let center = center_basis(alg, tol.rank_tol);
    let center_dim = center.len();
    let d = alg.rep_dim();
    let unit = alg.unit();

    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut z = vec![ZERO; n];
        for v in &center {
            // complex coefficients, so that z + z* separates conjugate characters
            let r = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for (zi, vi) in z.iter_mut().zip(v) {
                *zi += vi * r;
            }
        }
        let zs = adjoint_coeffs(alg, &z);
        let mut h = CMatrix::zeros(d, d);
        for i in 0..n {
            let cf = z[i] + zs[i];
            if cf.norm() > 0.0 {
                h += &images[i] * cf;
            }
        }
        let (lambda, vecs) = hermitian_eigen(&h);
        let spread = lambda.iter().fold(1.0f64, |a, &l| a.max(l.abs()));
        let gap = 1e-6 * spread;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in lambda.iter().enumerate() {
            match clusters.last_mut() {
                Some(cl) if (l - lambda[*cl.last().unwrap()]).abs() <= gap => cl.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        if clusters.len() != center_dim {
            continue;
        }
        let mut blocks = Vec::with_capacity(clusters.len());
        let mut ok = true;
        for cl in &clusters {
            let vc = CMatrix::from_fn(d, cl.len(), |r, k| vecs[(r, cl[k])]);
            let p = &vc * vc.adjoint();
            let w: Vec<C64> = images.iter().map(|m| trace_of_product(&p, m)).collect();
            let gram = CMatrix::from_fn(n, n, |j, k| {
                let (ja, ca) = alg.adjoint(j);
                alg.product(ja, k).map_or(ZERO, |(r, cp)| ca * cp * w[r])
            });
            let rank = numerical_rank(&hermitian_eigen(&gram).0, tol.rank_tol);
            let dim = (rank as f64).sqrt().round() as usize;
            if dim * dim != rank || dim == 0 {
                ok = false;
                break;
            }
            let w1: C64 = unit.iter().map(|&(i, cf)| cf * w[i]).sum();
            let trace = w.iter().map(|v| v / w1).collect();
            blocks.push(Block { dim, trace, projection: p });
        }
        if !ok || blocks.iter().map(|b| b.dim * b.dim).sum::<usize>() != algebra_dim {
            continue;
        }
        return Ok(BlockDecomposition { algebra_dim, center_dim, seed: seed.wrapping_add(attempt), blocks });
    }
    Err(Error::DegenerateGeneric(ATTEMPTS as usize))
}

/// The extremal tracial states of `C(X) ⋊ G` computed by the oracle.
pub fn oracle_traces(action: &Arc<Action>, seed: u64, tol: &Tolerances) -> Result<(BlockDecomposition, Vec<TraceFunctional>)> {
    let alg = CrossedProduct::new(action.clone());
    let dec = oracle_block_decomposition(&alg, seed, tol)?;
    let traces = dec
        .blocks
        .iter()
        .map(|b| TraceFunctional::from_values(action.clone(), b.trace.clone()))
        .collect::<Result<_>>()?;
    Ok((dec, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;

    #[test]
    fn swap_is_a_single_matrix_block() {
        let a = Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(2)), 2, |g, x| (x + g) % 2).unwrap());
        let (dec, traces) = oracle_traces(&a, DEFAULT_SEED, &Tolerances::default()).unwrap();
        assert_eq!(dec.algebra_dim, 4);
        assert_eq!(dec.center_dim, 1);
        assert_eq!(dec.blocks[0].dim, 2);
        let t = &traces[0];
        assert!((t.value(0, 0).re - 0.5).abs() < 1e-10);
        assert!(t.value(0, 1).norm() < 1e-10);
    }

    #[test]
    fn s3_on_a_point_has_three_blocks() {
        let a = Arc::new(Action::trivial(Arc::new(FiniteGroup::symmetric(3)), 1));
        let (dec, _) = oracle_traces(&a, DEFAULT_SEED, &Tolerances::default()).unwrap();
        let mut dims: Vec<usize> = dec.blocks.iter().map(|b| b.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
        assert_eq!(dec.center_dim, 3);
    }

    #[test]
    fn cyclic_on_a_point_is_commutative() {
        let a = Arc::new(Action::trivial(Arc::new(FiniteGroup::cyclic(5)), 1));
        let (dec, traces) = oracle_traces(&a, 7, &Tolerances::default()).unwrap();
        assert_eq!(dec.blocks.len(), 5);
        assert!(dec.blocks.iter().all(|b| b.dim == 1));
        for t in &traces {
            assert!((t.value(0, 1).norm() - 1.0).abs() < 1e-10);
        }
    }
}
