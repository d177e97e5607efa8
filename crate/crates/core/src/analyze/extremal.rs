use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::Action;
use crate::groups::subgroup_characters;
use crate::tracebuild::{build_extremal, ExtremalTriple, TraceFunctional};
use crate::{Error, Result};

use super::checks::check_traciality;

/// All extremal tracial states of `C(X) ⋊ G` for abelian `G`, one per
/// orbit and character of its stabilizer, orbits in [`Action::orbits`] order.
pub fn enumerate_extremal(action: &Arc<Action>) -> Result<Vec<(ExtremalTriple, TraceFunctional)>> {
    if !action.group().is_abelian() {
        return Err(Error::NotAbelian);
    }
    let mut out = Vec::new();
    for orbit in action.orbits() {
        let rep = orbit[0];
        for chi in subgroup_characters(&action.stabilizer(rep))? {
            let e = ExtremalTriple::new(action.clone(), chi, rep)?;
            let t = build_extremal(&e);
            out.push((e, t));
        }
    }
    Ok(out)
}

/// `Σ_O |H_O| · [G : H_O]²`, which equals `dim C(X) ⋊ G = |X||G|` for abelian `G`.
pub fn extremal_dimension_sum(action: &Action) -> usize {
    action
        .orbits()
        .iter()
        .map(|o| {
            let h = action.stabilizer(o[0]);
            h.order() * h.index() * h.index()
        })
        .sum()
}

/// Weights `w ≥ 0`, `Σ w = 1`, with `t = Σ w_i t_i`, by least squares.
pub fn convex_decompose(t: &TraceFunctional, extremals: &[TraceFunctional], tol: f64) -> Result<Vec<f64>> {
    let trac = check_traciality(t).value;
    if trac > tol {
        return Err(Error::Infeasible(format!("not tracial: residual {trac:.3e}")));
    }
    if extremals.is_empty() {
        return Err(Error::Infeasible("no extremal traces given".into()));
    }
    let n = t.values().len();
    let k = extremals.len();
    if extremals.iter().any(|e| e.values().len() != n) {
        return Err(Error::SystemMismatch);
    }
    // real least squares on stacked real and imaginary parts, plus the mass row
    let a = DMatrix::from_fn(2 * n + 1, k, |r, c| {
        if r == 2 * n {
            1.0
        } else if r < n {
            extremals[c].values()[r].re
        } else {
            extremals[c].values()[r - n].im
        }
    });
    let b = DVector::from_fn(2 * n + 1, |r, _| {
        if r == 2 * n {
            1.0
        } else if r < n {
            t.values()[r].re
        } else {
            t.values()[r - n].im
        }
    });
    let w = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Infeasible(e.to_string()))?;
    let residual = (&a * &w - &b).amax();
    if residual > 1e-9 {
        return Err(Error::Infeasible(format!("least-squares residual {residual:.3e}")));
    }
    if let Some(min) = w.iter().copied().reduce(f64::min) {
        if min < -1e-9 {
            return Err(Error::Infeasible(format!("negative weight {min:.3e}")));
        }
    }
    Ok(w.iter().map(|&v| v.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;

    #[test]
    fn counts_for_small_systems() {
        let swap = Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(2)), 2, |g, x| (x + g) % 2).unwrap());
        assert_eq!(enumerate_extremal(&swap).unwrap().len(), 1);
        let z6 = Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(6)), 3, |g, x| (x + g) % 3).unwrap());
        assert_eq!(enumerate_extremal(&z6).unwrap().len(), 2);
        assert_eq!(extremal_dimension_sum(&z6), 18);
        let s3 = Arc::new(Action::trivial(Arc::new(FiniteGroup::symmetric(3)), 1));
        assert!(matches!(enumerate_extremal(&s3), Err(Error::NotAbelian)));
    }

    #[test]
    fn recovers_convex_weights() {
        let a = Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(6)), 5, |g, x| if x < 3 { (x + g) % 3 } else { 3 + (x - 3 + g) % 2 }).unwrap());
        let ext: Vec<TraceFunctional> = enumerate_extremal(&a).unwrap().into_iter().map(|(_, t)| t).collect();
        assert_eq!(ext.len(), 5);
        let w = [0.1, 0.2, 0.3, 0.15, 0.25];
        let parts: Vec<(f64, &TraceFunctional)> = w.iter().copied().zip(ext.iter()).collect();
        let t = TraceFunctional::combine(&parts).unwrap();
        let got = convex_decompose(&t, &ext, 1e-12).unwrap();
        for (a, b) in got.iter().zip(w) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
