//! A fixed collection of small systems and seeded random data on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::dynamics::{Action, MeasureOnX};
use crate::groups::{permutations, Angle, FiniteGroup, Subgroup};
use crate::linalg::{c, C64};
use crate::states::{moments_from_atoms, Atom, MomentSequence, PositiveDefiniteFunction};
use crate::tracebuild::StateField;
use crate::zsystems::{ZOrbitData, ZSystem, ZTraceData};
use crate::Result;

/// A named finite system.
#[derive(Debug, Clone)]
pub struct CorpusSystem {
    pub name: &'static str,
    pub action: Arc<Action>,
}

/// A named permutation system.
#[derive(Debug, Clone)]
pub struct CorpusZSystem {
    pub name: &'static str,
    pub system: Arc<ZSystem>,
}

fn cyclic_on(n: usize, space: usize, f: impl Fn(usize, usize) -> usize) -> Arc<Action> {
    Arc::new(Action::from_fn(Arc::new(FiniteGroup::cyclic(n)), space, f).expect("corpus action is valid"))
}

/// The finite corpus; all but the last two systems have abelian groups.
pub fn systems() -> Vec<CorpusSystem> {
    let z2xz4 = Arc::new(FiniteGroup::product(&[2, 4]));
    let s3 = Arc::new(FiniteGroup::symmetric(3));
    let perms = permutations(3);
    let sys = |name, action| CorpusSystem { name, action };
    vec![
        sys("z2-swap", cyclic_on(2, 2, |g, x| (x + g) % 2)),
        sys("z2-point", cyclic_on(2, 1, |_, x| x)),
        sys("z3-cycle", cyclic_on(3, 3, |g, x| (x + g) % 3)),
        sys("z3-point", cyclic_on(3, 1, |_, x| x)),
        sys("z4-on-2", cyclic_on(4, 2, |g, x| (x + g) % 2)),
        sys("z2-swap-and-fixed", cyclic_on(2, 3, |g, x| if x < 2 { (x + g) % 2 } else { x })),
        sys("z6-on-3", cyclic_on(6, 3, |g, x| (x + g) % 3)),
        sys("z6-on-3-and-2", cyclic_on(6, 5, |g, x| if x < 3 { (x + g) % 3 } else { 3 + (x - 3 + g) % 2 })),
        sys("z4-on-4-and-2", cyclic_on(4, 6, |g, x| if x < 4 { (x + g) % 4 } else { 4 + (x - 4 + g) % 2 })),
        sys("z12-on-4", cyclic_on(12, 4, |g, x| (x + g) % 4)),
        sys(
            "v4-regular",
            Arc::new(Action::from_fn(Arc::new(FiniteGroup::product(&[2, 2])), 4, |g, x| g ^ x).expect("regular action")),
        ),
        sys(
            "z2xz4-on-7",
            Arc::new(
                Action::from_fn(z2xz4, 7, |g, x| {
                    let (a, b) = (g / 4, g % 4);
                    match x {
                        0..=3 => (x + b) % 4,
                        4 | 5 => 4 + (x - 4 + a) % 2,
                        _ => x,
                    }
                })
                .expect("product action"),
            ),
        ),
        sys(
            "s3-natural-and-fixed",
            Arc::new(Action::from_fn(s3.clone(), 4, |g, x| if x < 3 { perms[g][x] } else { x }).expect("natural action")),
        ),
        sys("s3-point", Arc::new(Action::trivial(s3, 1))),
    ]
}

/// Looks a corpus system up by name.
pub fn system(name: &str) -> Option<CorpusSystem> {
    systems().into_iter().find(|s| s.name == name)
}

pub fn z_systems() -> Vec<CorpusZSystem> {
    let z = |name, perm: Vec<usize>| CorpusZSystem {
        name,
        system: Arc::new(ZSystem::with_default_window(perm, 8).expect("corpus permutation")),
    };
    vec![
        z("identity-3", vec![0, 1, 2]),
        z("cycle-3", vec![1, 2, 0]),
        z("cycles-2-3", vec![1, 0, 3, 4, 2]),
        z("cycles-4-2-1", vec![1, 2, 3, 0, 5, 4, 6]),
    ]
}

/// Random probability vector with every entry positive.
pub fn random_measure<R: Rng>(rng: &mut R, n: usize) -> MeasureOnX {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    MeasureOnX::new(raw.iter().map(|w| w / total).collect()).expect("positive weights")
}

/// Random invariant probability measure: random orbit masses spread uniformly.
pub fn random_invariant_measure<R: Rng>(rng: &mut R, action: &Action) -> MeasureOnX {
    let orbits = action.orbits();
    let masses = random_measure(rng, orbits.len());
    let mut w = vec![0.0; action.space_size()];
    for (o, &m) in orbits.iter().zip(masses.weights()) {
        for &x in o {
            w[x] = m / o.len() as f64;
        }
    }
    MeasureOnX::new(w).expect("nonnegative weights")
}

/// `ψ(h) = ⟨λ(h) v, v⟩` for a random unit vector `v ∈ ℓ²(H)`.
pub fn random_state<R: Rng>(rng: &mut R, sub: &Subgroup) -> PositiveDefiniteFunction {
    let g = sub.group();
    let members = sub.members();
    let mut v: Vec<C64> = members.iter().map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    PositiveDefiniteFunction::from_fn(sub.clone(), |h| {
        let hi = g.inv(h);
        members
            .iter()
            .enumerate()
            .map(|(i, &k)| v[sub.position(g.mul(hi, k)).expect("closed")] * v[i].conj())
            .sum()
    })
}

/// Averages `ψ` over conjugation by its own domain, giving a class function.
pub fn class_average(psi: &PositiveDefiniteFunction) -> PositiveDefiniteFunction {
    let sub = psi.domain();
    let g = sub.group();
    let k = sub.order() as f64;
    PositiveDefiniteFunction::from_fn(sub.clone(), |h| {
        sub.members().iter().map(|&s| psi.value_or_zero(g.conjugate(s, h))).sum::<C64>() / k
    })
}

/// Independent random states at every point (a centralizing state, generally not a trace).
pub fn random_field<R: Rng>(rng: &mut R, action: &Arc<Action>) -> Result<(MeasureOnX, StateField)> {
    let nu = random_measure(rng, action.space_size());
    let per_point = (0..action.space_size()).map(|x| (x, random_state(rng, &action.stabilizer(x)))).collect();
    Ok((nu, StateField::new(action.clone(), per_point)?))
}

/// Random data of a trace: invariant measure and an equivariant field of class functions.
pub fn random_trace_field<R: Rng>(rng: &mut R, action: &Arc<Action>) -> Result<(MeasureOnX, StateField)> {
    let nu = random_invariant_measure(rng, action);
    let reps: BTreeMap<usize, PositiveDefiniteFunction> = action
        .orbits()
        .iter()
        .map(|o| (o[0], class_average(&random_state(rng, &action.stabilizer(o[0])))))
        .collect();
    Ok((nu, StateField::from_orbit_representatives(action.clone(), reps)?))
}

/// Random rotation-invariant circle measure of the given mass: a few atom
/// orbits under rotation by `1/period`, and sometimes a Lebesgue part.
pub fn random_circle_measure<R: Rng>(rng: &mut R, mass: f64, period: usize, window: usize) -> Result<MomentSequence> {
    let lebesgue_share = if rng.gen_bool(0.3) { rng.gen_range(0.0..1.0) } else { 0.0 };
    let k = rng.gen_range(1..=3);
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let n = period as i64;
    let mut atoms = Vec::new();
    for w in raw {
        let base = Angle::new(rng.gen_range(0..12), 12 * n);
        for r in 0..n {
            atoms.push(Atom { angle: base + Angle::new(r, n), weight: mass * (1.0 - lebesgue_share) * w / total / n as f64 });
        }
    }
    let discrete = moments_from_atoms(&atoms, window, period, 1e-9)?;
    let leb = MomentSequence::lebesgue(mass * lebesgue_share, window, period);
    let mut values: Vec<C64> = discrete.values().iter().zip(leb.values()).map(|(a, b)| a + b).collect();
    // pin the mass exactly so that orbit masses still sum to one
    values[window] = c(mass, 0.0);
    MomentSequence::new(window, period, values, 1e-9)
}

pub fn random_ztrace_data<R: Rng>(rng: &mut R, z: &ZSystem) -> Result<ZTraceData> {
    let summary = z.orbits_and_periods();
    let masses = random_measure(rng, summary.orbits.len());
    let orbits = summary
        .orbits
        .iter()
        .zip(masses.weights())
        .map(|(o, &m)| Ok(ZOrbitData { rep: o.rep, moments: random_circle_measure(rng, m, o.period, z.window())? }))
        .collect::<Result<_>>()?;
    Ok(ZTraceData::new(orbits))
}

/// `(ℤ/4, {0, 2}, ψ(2) = −1)`.
pub fn induction_example() -> (Arc<FiniteGroup>, PositiveDefiniteFunction) {
    let g = Arc::new(FiniteGroup::cyclic(4));
    let h = Subgroup::from_members(g.clone(), [0, 2]).expect("subgroup");
    let psi = PositiveDefiniteFunction::from_fn(h, |k| if k == 0 { c(1.0, 0.0) } else { c(-1.0, 0.0) });
    (g, psi)
}

/// Subgroups generated by at most two elements (all subgroups, for the corpus groups).
pub fn subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    let mut found: Vec<Subgroup> = Vec::new();
    for a in g.elements() {
        for b in g.elements() {
            let s = Subgroup::generated(g.clone(), &[a, b]).expect("generated subgroup");
            if !found.contains(&s) {
                found.push(s);
            }
        }
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members().cmp(b.members())));
    found
}
