//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cptrace_core::algebra::CrossedElement;
use cptrace_core::analyze::{
    alpha_invariance_check, check_traciality, decompose_to_field, enumerate_extremal, escalarpr_check, gram_psd_margin,
    induced_construction_check, lcent_gram, oracle_traces, reconstruct_via_gns, run_trace_checks, support_condition_check,
    twisted_pullback_residual, twisted_quotient_trace, TwistedAlgebra, DEFAULT_SEED,
};
use cptrace_core::corpus::{self, CorpusSystem};
use cptrace_core::dynamics::Action;
use cptrace_core::groups::{subgroup_characters, Section};
use cptrace_core::linalg::{c, hermitian_eigen, C64};
use cptrace_core::states::{fourier_dual_measure, induce_state, MomentSequence, PositiveDefiniteFunction};
use cptrace_core::tracebuild::{build_cabel, build_extremal, build_from_field, ExtremalTriple, StateField, TraceFunctional};
use cptrace_core::zsystems::{build_ztrace, decompose_ztrace, ZTrace};
use cptrace_core::{Error, Tolerances};

const ROUND_TRIPS: u64 = 25;
const Z_ROUND_TRIPS: u64 = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: summary }
    } else {
        let shown: Vec<_> = failures.iter().take(3).cloned().collect();
        Outcome { pass: false, detail: format!("{} failure(s): {}", failures.len(), shown.join("; ")) }
    }
}

fn abelian() -> Vec<CorpusSystem> {
    corpus::systems().into_iter().filter(|s| s.action.group().is_abelian()).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn field_distance(a: &StateField, b: &StateField) -> f64 {
    let mut worst = 0.0f64;
    for (x, psi) in a.entries() {
        worst = worst.max(b.get(x).map_or(f64::INFINITY, |q| psi.distance(q)));
    }
    if a.entries().count() != b.entries().count() {
        return f64::INFINITY;
    }
    worst
}

fn oracle_equivalence() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for s in abelian() {
        let ours: Vec<TraceFunctional> = enumerate_extremal(&s.action).unwrap().into_iter().map(|(_, t)| t).collect();
        let (_, oracle) = match oracle_traces(&s.action, DEFAULT_SEED, &tol) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{}: oracle failed: {e}", s.name));
                continue;
            }
        };
        if ours.len() != oracle.len() {
            failures.push(format!("{}: {} enumerated vs {} oracle blocks", s.name, ours.len(), oracle.len()));
            continue;
        }
        let mut used = vec![false; ours.len()];
        for o in &oracle {
            let best = (0..ours.len()).filter(|&i| !used[i]).min_by(|&i, &j| ours[i].distance(o).total_cmp(&ours[j].distance(o)));
            match best {
                Some(i) if ours[i].distance(o) <= 1e-8 => {
                    used[i] = true;
                    worst = worst.max(ours[i].distance(o));
                }
                _ => failures.push(format!("{}: an oracle block trace has no enumerated match", s.name)),
            }
        }
    }
    for (name, expected) in [("z3-cycle", 1), ("z3-point", 3), ("z6-on-3", 2)] {
        let a = corpus::system(name).unwrap().action;
        let n = enumerate_extremal(&a).unwrap().len();
        if n != expected {
            failures.push(format!("{name}: {n} extremal traces, expected {expected}"));
        }
    }
    outcome(failures, format!("{} abelian systems, max table distance {worst:.1e}", abelian().len()))
}

fn dimension_identity() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    for s in abelian() {
        let a = &s.action;
        let sum: usize = a
            .orbits()
            .iter()
            .map(|o| {
                let h = a.stabilizer(o[0]);
                subgroup_characters(&h).unwrap().len() * h.index() * h.index()
            })
            .sum();
        let dim = a.space_size() * a.group().order();
        let (dec, _) = oracle_traces(a, DEFAULT_SEED, &tol).unwrap();
        let blocks: usize = dec.blocks.iter().map(|b| b.dim * b.dim).sum();
        if sum != dim || blocks != dim {
            failures.push(format!("{}: orbit sum {sum}, block sum {blocks}, |X||G| = {dim}", s.name));
        }
    }
    outcome(failures, format!("{} abelian systems, exact", abelian().len()))
}

fn bijection_round_trips() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let (mut fwd, mut rev) = (0.0f64, 0.0f64);
    let mut count = 0;
    for s in corpus::systems() {
        for seed in 0..ROUND_TRIPS {
            let mut r = rng(1000 + seed);
            let (nu, field) = corpus::random_field(&mut r, &s.action).unwrap();
            let t = build_from_field(&nu, &field, tol.psd_tol).unwrap();
            match decompose_to_field(&t, &tol) {
                Ok(d) => {
                    let dn = nu.weights().iter().zip(d.measure.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    let df = field_distance(&field, &d.field);
                    fwd = fwd.max(dn).max(df);
                    if dn > 1e-12 || df > 1e-12 {
                        failures.push(format!("{} seed {seed}: forward error {:.1e}", s.name, dn.max(df)));
                    }
                }
                Err(e) => failures.push(format!("{} seed {seed}: {e}", s.name)),
            }
            count += 1;
        }
        // reverse: random convex combinations of the oracle's block traces
        let (_, blocks) = oracle_traces(&s.action, DEFAULT_SEED, &tol).unwrap();
        for seed in 0..ROUND_TRIPS {
            let w = corpus::random_measure(&mut rng(2000 + seed), blocks.len());
            let parts: Vec<(f64, &TraceFunctional)> = w.weights().iter().copied().zip(blocks.iter()).collect();
            let t = TraceFunctional::combine(&parts).unwrap();
            match decompose_to_field(&t, &tol).and_then(|d| build_from_field(&d.measure, &d.field, tol.psd_tol)) {
                Ok(back) => {
                    rev = rev.max(back.distance(&t));
                    if back.distance(&t) > 1e-9 {
                        failures.push(format!("{} seed {seed}: reverse error {:.1e}", s.name, back.distance(&t)));
                    }
                }
                Err(e) => failures.push(format!("{} seed {seed}: reverse {e}", s.name)),
            }
        }
    }
    outcome(failures, format!("{count} forward datasets (max {fwd:.1e}), reverse max {rev:.1e}"))
}

/// Built traces on a system: random trace fields, all extremals, and (abelian) dual-measure traces.
fn built_traces(s: &CorpusSystem, seeds: u64) -> Vec<(String, TraceFunctional)> {
    let tol = Tolerances::default();
    let a = &s.action;
    let mut out = Vec::new();
    for seed in 0..seeds {
        let (nu, field) = corpus::random_trace_field(&mut rng(3000 + seed), a).unwrap();
        out.push((format!("field#{seed}"), build_from_field(&nu, &field, tol.psd_tol).unwrap()));
        if a.group().is_abelian() {
            let duals: BTreeMap<usize, _> = a
                .orbits()
                .iter()
                .map(|o| {
                    let psi = field.get(o[0]).unwrap();
                    let omega = induce_state(a.group(), psi, tol.psd_tol).unwrap();
                    (o[0], fourier_dual_measure(&omega).unwrap())
                })
                .collect();
            out.push((format!("dual#{seed}"), build_cabel(&nu, &duals, a).unwrap()));
        }
    }
    if a.group().is_abelian() {
        for (i, (_, t)) in enumerate_extremal(a).unwrap().into_iter().enumerate() {
            out.push((format!("extremal#{i}"), t));
        }
    }
    out
}

fn trace_checks() -> Outcome {
    let mut failures = Vec::new();
    let (mut trac, mut alpha, mut psd, mut norm) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    let mut count = 0;
    for s in corpus::systems() {
        for (label, t) in built_traces(&s, 5) {
            let tr = check_traciality(&t).value;
            let al = alpha_invariance_check(&t).value;
            let su = support_condition_check(&t).value;
            let m = gram_psd_margin(&t, 1e-12).unwrap_or(f64::NEG_INFINITY);
            let nr = t.normalization_residual();
            trac = trac.max(tr);
            alpha = alpha.max(al);
            psd = psd.min(m);
            norm = norm.max(nr);
            if tr > 1e-12 || al > 1e-12 || su != 0.0 || m < -1e-9 || nr > 1e-12 {
                failures.push(format!("{} {label}: trac {tr:.1e} alpha {al:.1e} support {su:.1e} psd {m:.1e} norm {nr:.1e}", s.name));
            }
            count += 1;
        }
    }
    outcome(
        failures,
        format!("{count} traces; traciality {trac:.1e}, invariance {alpha:.1e}, support 0, min Gram eig {psd:.1e}, normalization {norm:.1e}"),
    )
}

fn monomials(a: &Arc<Action>) -> Vec<CrossedElement> {
    (0..a.space_size()).flat_map(|x| a.group().elements().map(move |g| (x, g))).map(|(x, g)| CrossedElement::monomial(a.clone(), x, g)).collect()
}

fn functions(a: &Arc<Action>) -> Vec<CrossedElement> {
    (0..a.space_size()).map(|x| CrossedElement::monomial(a.clone(), x, a.group().identity())).collect()
}

fn lcent_positivity() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for s in corpus::systems() {
        let a = &s.action;
        let basis = monomials(a);
        let (nu, field) = corpus::random_trace_field(&mut rng(4000), a).unwrap();
        let t = build_from_field(&nu, &field, 1e-9).unwrap();
        let mut cent = functions(a);
        cent.push(CrossedElement::unitary(a.clone(), a.group().elements().last().unwrap()));
        match lcent_gram(&t, &cent, &basis, 1e-12) {
            Ok(m) => {
                worst = worst.min(m);
                if m < -1e-9 {
                    failures.push(format!("{}: min eigenvalue {m:.1e}", s.name));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", s.name)),
        }
        count += 1;
    }
    // non-tracial C(X)-centralizing states on S_3 systems with fixed points
    for name in ["s3-point", "s3-natural-and-fixed"] {
        let a = corpus::system(name).unwrap().action;
        for seed in 0..3 {
            let (nu, field) = corpus::random_field(&mut rng(4100 + seed), &a).unwrap();
            let t = build_from_field(&nu, &field, 1e-9).unwrap();
            let trac = check_traciality(&t).value;
            if trac < 1e-6 {
                failures.push(format!("{name} seed {seed}: state is unexpectedly tracial"));
            }
            match lcent_gram(&t, &functions(&a), &monomials(&a), 1e-12) {
                Ok(m) => {
                    worst = worst.min(m);
                    if m < -1e-9 {
                        failures.push(format!("{name} seed {seed}: min eigenvalue {m:.1e}"));
                    }
                }
                Err(e) => failures.push(format!("{name} seed {seed}: {e}")),
            }
            count += 1;
        }
    }
    outcome(failures, format!("{count} states incl. 6 non-tracial on S_3; min eigenvalue {worst:.1e}"))
}

fn constructions_agree() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let (mut gns, mut ind, mut esc) = (0.0f64, 0.0f64, 0.0f64);
    for s in corpus::systems() {
        for seed in 0..3 {
            let mut r = rng(5000 + seed);
            let (nu, field) = if seed == 0 {
                corpus::random_trace_field(&mut r, &s.action).unwrap()
            } else {
                corpus::random_field(&mut r, &s.action).unwrap()
            };
            let direct = build_from_field(&nu, &field, tol.psd_tol).unwrap();
            match reconstruct_via_gns(&nu, &field, &tol) {
                Ok(t) => {
                    gns = gns.max(t.distance(&direct));
                    if t.distance(&direct) > 1e-10 {
                        failures.push(format!("{} seed {seed}: GNS differs by {:.1e}", s.name, t.distance(&direct)));
                    }
                }
                Err(e) => failures.push(format!("{} seed {seed}: GNS {e}", s.name)),
            }
            let ic = induced_construction_check(&nu, &field, tol.psd_tol).unwrap();
            ind = ind.max(ic.residual);
            if ic.residual > 1e-10 || ic.min_psd_margin < -1e-9 {
                failures.push(format!("{} seed {seed}: induced residual {:.1e}, margin {:.1e}", s.name, ic.residual, ic.min_psd_margin));
            }
            let e = escalarpr_check(&nu, &field).value;
            esc = esc.max(e);
            if e > 1e-12 {
                failures.push(format!("{} seed {seed}: scalar-product identity residual {e:.1e}", s.name));
            }
        }
    }
    outcome(failures, format!("GNS {gns:.1e}, induced {ind:.1e}, scalar-product identity {esc:.1e}"))
}

fn twisted_quotient() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut count = 0;
    for name in ["z4-on-2", "z6-on-3", "z12-on-4", "z4-on-4-and-2"] {
        let a = corpus::system(name).unwrap().action;
        for o in a.orbits() {
            let h = a.stabilizer(o[0]);
            let sections = {
                let base = Section::smallest(&h);
                // a second section using the largest element of each coset
                let reps: Vec<usize> = (0..base.quotient_order())
                    .map(|q| if q == base.coset(a.group().identity()) { a.group().identity() } else { a.group().elements().filter(|&g| base.coset(g) == q).max().unwrap() })
                    .collect();
                vec![base.clone(), Section::with_representatives(&h, reps).unwrap()]
            };
            for chi in subgroup_characters(&h).unwrap() {
                let e = ExtremalTriple::new(a.clone(), chi, o[0]).unwrap();
                let target = build_extremal(&e);
                for s in &sections {
                    let tw = TwistedAlgebra::new(&e, s).unwrap();
                    if tw.cocycle().identity_violation(tw.quotient()).is_some() {
                        failures.push(format!("{name}: cocycle identity fails"));
                    }
                    let hom = twisted_pullback_residual(&e, s).unwrap();
                    match twisted_quotient_trace(&e, s, DEFAULT_SEED, &tol) {
                        Ok(t) => {
                            worst = worst.max(t.distance(&target));
                            if t.distance(&target) > 1e-9 || hom > 1e-12 {
                                failures.push(format!("{name}: pullback differs by {:.1e}, hom defect {hom:.1e}", t.distance(&target)));
                            }
                        }
                        Err(err) => failures.push(format!("{name}: {err}")),
                    }
                    count += 1;
                }
            }
        }
    }
    outcome(failures, format!("{count} (orbit, character, section) cases; exact cocycles, single blocks, max distance {worst:.1e}"))
}

fn induction_positivity() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    let mut groups = Vec::new();
    for s in corpus::systems() {
        if !groups.iter().any(|g: &Arc<cptrace_core::groups::FiniteGroup>| **g == **s.action.group()) {
            groups.push(s.action.group().clone());
        }
    }
    for g in &groups {
        for h in corpus::subgroups(g) {
            let mut states = vec![PositiveDefiniteFunction::constant_one(h.clone()), PositiveDefiniteFunction::delta_identity(h.clone())];
            if h.members().iter().all(|&a| h.members().iter().all(|&b| g.mul(a, b) == g.mul(b, a))) {
                if let Ok(chars) = subgroup_characters(&h) {
                    states.extend(chars.iter().map(PositiveDefiniteFunction::from_character));
                }
            }
            for seed in 0..3 {
                states.push(corpus::random_state(&mut rng(6000 + seed), &h));
            }
            for psi in states {
                match induce_state(g, &psi, 1e-9).and_then(|w| w.check_positive_definite()) {
                    Ok(m) => {
                        worst = worst.min(m);
                        if m < -1e-9 {
                            failures.push(format!("|G|={} |H|={}: margin {m:.1e}", g.order(), h.order()));
                        }
                    }
                    Err(e) => failures.push(format!("|G|={} |H|={}: {e}", g.order(), h.order())),
                }
                count += 1;
            }
        }
    }
    let (g, psi) = corpus::induction_example();
    let omega = induce_state(&g, &psi, 1e-9).unwrap();
    let expect = [1.0, 0.0, -1.0, 0.0];
    if omega.values().iter().zip(expect).any(|(v, e)| (v - c(e, 0.0)).norm() > 1e-15) {
        failures.push("Z/4 example: wrong induced values".into());
    }
    let eig = hermitian_eigen(&omega.gram()).0;
    if eig.iter().zip([0.0, 0.0, 2.0, 2.0]).any(|(a, b)| (a - b).abs() > 1e-12) {
        failures.push(format!("Z/4 example: eigenvalues {eig:?}"));
    }
    outcome(failures, format!("{count} (subgroup, state) pairs, min eigenvalue {worst:.1e}; Z/4 example spectrum {{0,2,0,2}}"))
}

fn z_case() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let (mut rt, mut rot, mut trac, mut psd) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    let mut count = 0;
    for zs in corpus::z_systems() {
        let z = &zs.system;
        for seed in 0..Z_ROUND_TRIPS {
            let data = corpus::random_ztrace_data(&mut rng(7000 + seed), z).unwrap();
            let t = build_ztrace(z, &data, tol.psd_tol).unwrap();
            trac = trac.max(t.traciality_residual());
            psd = psd.min(t.gram_psd_margin());
            match decompose_ztrace(&t, &tol) {
                Ok((back, report)) => {
                    let d1 = back.distance(&data);
                    let d2 = build_ztrace(z, &back, tol.psd_tol).map_or(f64::INFINITY, |t2| t2.distance(&t));
                    rt = rt.max(d1).max(d2);
                    rot = rot.max(report.rotation_residual);
                    if d1 > 1e-12 || d2 > 1e-12 || report.rotation_residual > 1e-9 {
                        failures.push(format!("{} seed {seed}: round trip {d1:.1e}/{d2:.1e}", zs.name));
                    }
                }
                Err(e) => failures.push(format!("{} seed {seed}: {e}", zs.name)),
            }
            count += 1;
        }
    }
    if trac > 1e-12 || psd < -1e-9 {
        failures.push(format!("window traciality {trac:.1e}, Gram margin {psd:.1e}"));
    }
    // injected violations
    let z = corpus::z_systems().into_iter().find(|s| s.name == "cycles-2-3").unwrap().system;
    let mut t = ZTrace::from_fn(z.clone(), |_, m| if m == 0 { c(0.2, 0.0) } else { C64::new(0.0, 0.0) });
    for x in [0, 1] {
        t.set(x, 1, c(0.1, 0.0));
        t.set(x, -1, c(0.1, 0.0));
    }
    match decompose_ztrace(&t, &tol) {
        Err(Error::RotationViolation { rep: 0, period: 2, .. }) => {}
        other => failures.push(format!("t(x,1)=0.1 on the period-2 orbit gave {other:?}")),
    }
    match MomentSequence::from_nonnegative(1, &[c(1.0, 0.0), c(2.0, 0.0)], tol.psd_tol) {
        Err(Error::MomentNotPSD(_)) => {}
        other => failures.push(format!("c_1 = 2 moments gave {other:?}")),
    }
    let id3 = corpus::z_systems().into_iter().find(|s| s.name == "identity-3").unwrap().system;
    let mut t = ZTrace::from_fn(id3, |_, m| if m == 0 { c(1.0 / 3.0, 0.0) } else { C64::new(0.0, 0.0) });
    t.set(0, 1, c(2.0 / 3.0, 0.0));
    t.set(0, -1, c(2.0 / 3.0, 0.0));
    match decompose_ztrace(&t, &tol) {
        Err(Error::MomentNotPSD(_)) => {}
        other => failures.push(format!("trace with c_1 = 2 c_0 gave {other:?}")),
    }
    outcome(
        failures,
        format!("{count} round trips (max {rt:.1e}), rotation residual {rot:.1e}, window traciality {trac:.1e}, Gram margin {psd:.1e}; injected violations rejected"),
    )
}

/// Strongest failure among the named checks (0 when everything passes).
fn detection_strength(t: &TraceFunctional, tol: &Tolerances) -> f64 {
    run_trace_checks(t, tol)
        .iter()
        .filter(|r| !r.pass)
        .map(|r| if r.check == "positivity" { -r.residual } else { r.residual })
        .fold(0.0f64, f64::max)
}

/// Every entry is shifted by `1e-3·i`, which breaks Hermitian symmetry
/// wherever it lands. Real shifts of self-adjoint entries can produce another
/// genuine trace; those are counted and confirmed valid, not required to fail.
fn negative_controls() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let mut weakest = f64::INFINITY;
    let (mut count, mut real_valid) = (0, 0);
    for s in corpus::systems() {
        let a = &s.action;
        let (nu, field) = corpus::random_trace_field(&mut rng(8000), a).unwrap();
        let t = build_from_field(&nu, &field, tol.psd_tol).unwrap();
        for x in 0..a.space_size() {
            for g in a.group().elements() {
                let mut p = t.clone();
                p.set(x, g, t.value(x, g) + c(0.0, 1e-3));
                let strength = detection_strength(&p, &tol);
                weakest = weakest.min(strength);
                if strength < 1e-4 {
                    failures.push(format!("{}: perturbing ({x}, {g}) is not detected (strength {strength:.1e})", s.name));
                }
                let mut q = t.clone();
                q.set(x, g, t.value(x, g) + c(1e-3, 0.0));
                if detection_strength(&q, &tol) == 0.0 {
                    let gi = a.group().inv(g);
                    if a.apply(gi, x) != x || gi != g {
                        failures.push(format!("{}: real shift at non-self-adjoint entry ({x}, {g}) passes", s.name));
                    }
                    real_valid += 1;
                }
                count += 1;
            }
        }
    }
    outcome(
        failures,
        format!("{count} single-entry perturbations by 1e-3·i, weakest detection residual {weakest:.1e}; {real_valid} real shifts of self-adjoint entries remain valid traces"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("oracle-equivalence", oracle_equivalence),
        ("dimension-identity", dimension_identity),
        ("bijection-round-trips", bijection_round_trips),
        ("state-and-trace-checks", trace_checks),
        ("centralizer-gram-positivity", lcent_positivity),
        ("constructions-agree", constructions_agree),
        ("twisted-quotient", twisted_quotient),
        ("induction-positivity", induction_positivity),
        ("integer-dynamics", z_case),
        ("negative-controls", negative_controls),
    ];
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {name}: {}", o.detail).unwrap();
        if !o.pass {
            failed.push(name);
        }
    }
    out.flush().unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
