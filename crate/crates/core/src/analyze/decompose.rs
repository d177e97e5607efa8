use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::CrossedElement;
use crate::dynamics::MeasureOnX;
use crate::linalg::{hermitian_eigen, CMatrix, ZERO};
use crate::states::PositiveDefiniteFunction;
use crate::tracebuild::{StateField, TraceFunctional};
use crate::{Error, Result, Tolerances};

use super::checks::{check_centralizer_contains_functions, gram_psd_margin, support_condition_check};

/// Diagnostics of [`decompose_to_field`].
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub centralizer_residual: f64,
    pub support_residual: f64,
    pub gram_margin: f64,
    /// Smallest eigenvalue of the Gram matrix of each recovered `ψ_x`.
    pub psd_margins: BTreeMap<usize, f64>,
    /// Points whose weight was within tolerance of zero and got dropped.
    pub dropped_points: Vec<usize>,
    pub warnings: Vec<String>,
}

/// A state written as `ν` together with states `ψ_x` on the stabilizers.
#[derive(Debug, Clone)]
pub struct FieldDecomposition {
    pub measure: MeasureOnX,
    pub field: StateField,
    pub report: DecompositionReport,
}

/// Inverse of [`crate::tracebuild::build_from_field`]: `ν(x) = t(x, e)` and
/// `ψ_x(g) = t(x, g) / ν(x)` on `G_x`.
pub fn decompose_to_field(t: &TraceFunctional, tol: &Tolerances) -> Result<FieldDecomposition> {
    let a = t.system().clone();
    let e = a.group().identity();
    let norm = t.normalization_residual();
    if norm > tol.tol {
        return Err(Error::NotAState(format!("normalization residual {norm:.3e}")));
    }
    let gram_margin = gram_psd_margin(t, tol.tol).ok_or_else(|| {
        let (r, (x, g)) = t.hermitian_residual();
        Error::NotAState(format!("not Hermitian: residual {r:.3e} at x={x}, g={g}"))
    })?;
    if gram_margin < -tol.psd_tol {
        return Err(Error::NotAState(format!("Gram matrix has eigenvalue {gram_margin:.3e}")));
    }
    let centralizer = check_centralizer_contains_functions(t).value;
    let mut warnings = Vec::new();
    if centralizer > tol.warn_tol {
        return Err(Error::CentralizerViolation(centralizer));
    }
    if centralizer > tol.tol {
        warnings.push(format!("centralizer residual {centralizer:.3e} is above tol but within the warning band"));
    }
    let support = support_condition_check(t).value;

    let mut weights = Vec::with_capacity(a.space_size());
    let mut dropped = Vec::new();
    for x in 0..a.space_size() {
        let v = t.value(x, e);
        if v.im.abs() > tol.tol || v.re < -tol.psd_tol {
            return Err(Error::NotAState(format!("t({x}, e) = {v} is not a nonnegative weight")));
        }
        if v.re <= tol.tol {
            if v.re != 0.0 {
                dropped.push(x);
            }
            weights.push(0.0);
        } else {
            weights.push(v.re);
        }
    }
    let total: f64 = weights.iter().sum();
    if !dropped.is_empty() {
        warnings.push(format!("dropped {} point(s) with weight below tol", dropped.len()));
        weights.iter_mut().for_each(|w| *w /= total);
    }
    let measure = MeasureOnX::new(weights)?;

    let mut per_point = BTreeMap::new();
    let mut psd_margins = BTreeMap::new();
    for x in 0..a.space_size() {
        let nu = measure.weight(x);
        if nu == 0.0 {
            continue;
        }
        let stab = a.stabilizer(x);
        let psi = PositiveDefiniteFunction::from_fn(stab, |g| t.value(x, g) / nu);
        let margin = crate::linalg::min_eigenvalue(&psi.gram());
        if margin < -tol.psd_tol / nu {
            return Err(Error::NotAState(format!("recovered ψ_{x} has Gram eigenvalue {margin:.3e}")));
        }
        psd_margins.insert(x, margin);
        per_point.insert(x, psi);
    }
    let field = StateField::new(a, per_point)?;
    Ok(FieldDecomposition {
        measure,
        field,
        report: DecompositionReport {
            centralizer_residual: centralizer,
            support_residual: support,
            gram_margin,
            psd_margins,
            dropped_points: dropped,
            warnings,
        },
    })
}

/// Minimal eigenvalue of `M[(i,j),(k,l)] = t(a_k a_i^* b_j^* b_l)`.
///
/// The `a_i` must lie in the centralizer of `t`; this is checked against the
/// full monomial basis first.
pub fn lcent_gram(t: &TraceFunctional, centralizing: &[CrossedElement], basis: &[CrossedElement], tol: f64) -> Result<f64> {
    let a = t.system();
    let mut worst = 0.0f64;
    for el in centralizing {
        for x in 0..a.space_size() {
            for g in a.group().elements() {
                let m = CrossedElement::monomial(a.clone(), x, g);
                let lhs = t.evaluate(&el.multiply(&m)?)?;
                let rhs = t.evaluate(&m.multiply(el)?)?;
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    if worst > tol {
        return Err(Error::CentralizerViolation(worst));
    }
    let p = centralizing.len();
    let q = basis.len();
    let left: Vec<Vec<CrossedElement>> = (0..p)
        .map(|k| (0..p).map(|i| centralizing[k].multiply(&centralizing[i].adjoint())).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let right: Vec<Vec<CrossedElement>> = (0..q)
        .map(|j| (0..q).map(|l| basis[j].adjoint().multiply(&basis[l])).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut m = CMatrix::from_element(p * q, p * q, ZERO);
    for i in 0..p {
        for j in 0..q {
            for k in 0..p {
                for l in 0..q {
                    m[(i * q + j, k * q + l)] = t.evaluate(&left[k][i].multiply(&right[j][l])?)?;
                }
            }
        }
    }
    Ok(hermitian_eigen(&m).0.first().copied().unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Action;
    use crate::groups::FiniteGroup;
    use crate::linalg::c;
    use crate::tracebuild::build_from_field;
    use std::sync::Arc;

    #[test]
    fn trivial_action_decomposition() {
        let a = Arc::new(Action::trivial(Arc::new(FiniteGroup::cyclic(2)), 2));
        let t = TraceFunctional::from_fn(a.clone(), |x, g| match (x, g) {
            (0, 0) => c(0.3, 0.0),
            (0, _) => c(0.3, 0.0),
            (1, 0) => c(0.7, 0.0),
            _ => c(-0.7, 0.0),
        });
        let d = decompose_to_field(&t, &Tolerances::default()).unwrap();
        assert_eq!(d.measure.weights(), &[0.3, 0.7]);
        assert_eq!(d.field.get(0).unwrap().values(), &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((d.field.get(1).unwrap().value(1).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let back = build_from_field(&d.measure, &d.field, 1e-9).unwrap();
        assert!(back.distance(&t) <= 1e-15);
    }

    #[test]
    fn centralizer_violation_is_reported() {
        // a valid-looking state on the swap system with mass off the diagonal
        let a = Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(2)), 2, |g, x| (x + g) % 2).unwrap());
        let t = TraceFunctional::from_fn(a, |_, g| match g {
            0 => c(0.5, 0.0),
            _ => c(0.25, 0.0),
        });
        assert!(matches!(decompose_to_field(&t, &Tolerances::default()), Err(Error::CentralizerViolation(_))));
    }

    #[test]
    fn not_a_state() {
        let a = Arc::new(Action::trivial(Arc::new(FiniteGroup::cyclic(2)), 1));
        let t = TraceFunctional::from_fn(a.clone(), |_, g| if g == 0 { c(1.0, 0.0) } else { c(2.0, 0.0) });
        assert!(matches!(decompose_to_field(&t, &Tolerances::default()), Err(Error::NotAState(_))));
        let t = TraceFunctional::from_fn(a, |_, g| if g == 0 { c(0.5, 0.0) } else { ZERO });
        assert!(matches!(decompose_to_field(&t, &Tolerances::default()), Err(Error::NotAState(_))));
    }

    #[test]
    fn lcent_rejects_non_centralizing() {
        let a = Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(2)), 2, |g, x| (x + g) % 2).unwrap());
        let t = TraceFunctional::from_fn(a.clone(), |x, g| match (x, g) {
            (0, 0) => c(0.3, 0.0),
            (1, 0) => c(0.7, 0.0),
            _ => c(0.25, 0.0),
        });
        let u = CrossedElement::unitary(a.clone(), 1);
        let basis: Vec<_> = (0..2).flat_map(|x| (0..2).map(move |g| (x, g))).map(|(x, g)| CrossedElement::monomial(a.clone(), x, g)).collect();
        let r = lcent_gram(&t, &[u], &basis, 1e-12);
        assert!(matches!(r, Err(Error::CentralizerViolation(_))));
    }
}
