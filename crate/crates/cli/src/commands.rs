use std::collections::BTreeMap;
use std::sync::Arc;
use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use cptrace_core::algebra::CrossedProduct;
use cptrace_core::analyze::{
    decompose_to_field, enumerate_extremal, extremal_dimension_sum, gns, induced_construction_check, oracle_traces,
    reconstruct_via_gns, run_state_checks, run_trace_checks, CheckReport, Residual,
};
use cptrace_core::corpus;
use cptrace_core::dynamics::{Action, MeasureOnX};
use cptrace_core::io::{
    self, BuildSpec, CharacterSpec, FieldSpec, PsiSpec, SystemSpec, TraceSpec, ZDataSpec,
};
use cptrace_core::states::induce_state;
use cptrace_core::tracebuild::{
    build_cabel, build_extremal, build_from_field, build_trace_from_field, embed_group_state, ExtremalTriple, StateField,
    TraceFunctional,
};
use cptrace_core::zsystems::{build_ztrace, decompose_ztrace, ZSystem, ZTrace};
use cptrace_core::Tolerances;

use crate::load::{self, System};
use crate::{CliError, Command, Opts, Outcome};

pub fn dispatch(command: Command, opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    match command {
        Command::Validate => validate(opts, tol),
        Command::Build => build(opts, tol),
        Command::Check => check(opts, tol),
        Command::Decompose => decompose(opts, tol),
        Command::EnumerateExtremal => enumerate(opts, tol),
        Command::Oracle => oracle(opts, tol),
        Command::Gns => gns_command(opts, tol),
        Command::Induce => induce(opts, tol),
        Command::Zbuild => zbuild(opts, tol),
        Command::Zdecompose => zdecompose(opts, tol),
        Command::Corpus => Ok(run_corpus(opts.seed, tol)),
    }
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    io::to_value(v)
}

/// Adds `checks` and, if one fails, the worst offender (the first failing
/// check named in `priority`, else the first failing check).
fn with_checks(body: &mut Map<String, Value>, checks: &[CheckReport], priority: &[&str]) -> bool {
    let failing: Vec<&CheckReport> = checks.iter().filter(|c| !c.pass).collect();
    body.insert("checks".into(), value(&checks));
    let worst = priority
        .iter()
        .find_map(|p| failing.iter().find(|c| c.check == *p))
        .or_else(|| failing.first())
        .copied();
    if let Some(w) = worst {
        body.insert("worst_offender".into(), value(w));
    }
    failing.is_empty()
}

fn residual(v: f64) -> Residual {
    Residual { value: v, worst: BTreeMap::new() }
}

fn read_trace(opts: &Opts, a: &Arc<Action>) -> Result<TraceFunctional, CliError> {
    let (name, text) = load::read(opts.trace.as_deref(), "--trace")?;
    let spec: TraceSpec = load::parse_or_extract(&name, &text, "trace")?;
    spec.build(a).map_err(|e| CliError::from_core(e, Some(&name)))
}

fn read_ztrace(opts: &Opts, z: &Arc<ZSystem>) -> Result<ZTrace, CliError> {
    let (name, text) = load::read(opts.trace.as_deref(), "--trace")?;
    let spec: TraceSpec = load::parse_or_extract(&name, &text, "trace")?;
    spec.build_z(z).map_err(|e| CliError::from_core(e, Some(&name)))
}

fn read_field(opts: &Opts, a: &Arc<Action>) -> Result<(MeasureOnX, StateField), CliError> {
    let (name, text) = load::read(opts.field.as_deref(), "--field")?;
    let spec: FieldSpec = load::parse_or_extract(&name, &text, "field")?;
    spec.build(a).map_err(|e| CliError::from_core(e, Some(&name)))
}

fn functional_checks(t: &TraceFunctional, opts: &Opts, tol: &Tolerances) -> Vec<CheckReport> {
    if opts.state {
        run_state_checks(t, tol)
    } else {
        run_trace_checks(t, tol)
    }
}

pub fn z_checks(t: &ZTrace, tol: &Tolerances) -> Vec<CheckReport> {
    vec![
        CheckReport::new("normalization", "functional takes the value 1 on the unit", residual(t.normalization_residual()), tol.tol, tol.warn_tol),
        CheckReport::new("hermitian", "t(a*) = conj t(a)", residual(t.hermitian_residual()), tol.tol, tol.warn_tol),
        CheckReport::new("traciality", "t(ab) = t(ba) on monomials inside the window", residual(t.traciality_residual()), tol.tol, tol.warn_tol),
        CheckReport::margin("positivity", "t(a*a) >= 0 (window Gram matrix is PSD)", t.gram_psd_margin(), tol.psd_tol, tol.warn_tol),
    ]
}

fn system_summary(a: &Action) -> Value {
    let orbits: Vec<Value> = a
        .orbits()
        .iter()
        .map(|o| json!({"points": o, "stabilizer": a.stabilizer(o[0]).members()}))
        .collect();
    json!({
        "group_order": a.group().order(),
        "abelian": a.group().is_abelian(),
        "space_size": a.space_size(),
        "orbits": orbits,
    })
}

fn z_summary(z: &ZSystem) -> Value {
    let s = z.orbits_and_periods();
    json!({
        "space_size": z.space_size(),
        "window": z.window(),
        "orbits": value(&s.orbits),
    })
}

fn validate(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let mut body = Map::new();
    let mut validated = vec!["system"];
    match load::system(opts)? {
        System::Finite(a) => {
            body.insert("system".into(), system_summary(&a));
            if opts.trace.is_some() {
                read_trace(opts, &a)?;
                validated.push("trace");
            }
            if opts.field.is_some() {
                let (name, text) = load::read(opts.field.as_deref(), "--field")?;
                let v: Value = io::parse(&text, "field").map_err(|e| CliError::from_core(e, Some(&name)))?;
                if v.get("kind").is_some() {
                    let spec: BuildSpec = load::parse_or_extract(&name, &text, "field")?;
                    build_functional(&spec, &a, opts, tol).map_err(|e| prefix(e, &name))?;
                } else {
                    read_field(opts, &a)?;
                }
                validated.push("field");
            }
            if opts.psi.is_some() {
                read_psi(opts, &a)?;
                validated.push("psi");
            }
        }
        System::Z(z) => {
            body.insert("system".into(), z_summary(&z));
            if opts.trace.is_some() {
                read_ztrace(opts, &z)?;
                validated.push("trace");
            }
            if opts.zdata.is_some() {
                read_zdata(opts, &z, tol)?;
                validated.push("zdata");
            }
        }
    }
    body.insert("validated".into(), json!(validated));
    Ok(Outcome { body, pass: true })
}

fn prefix(mut e: CliError, name: &str) -> CliError {
    if !e.message.starts_with(name) {
        e.message = format!("{name}: {}", e.message);
    }
    e
}

/// The functional described by a build spec, on `a` or (for a group state) on
/// the one-point system of its group.
fn build_functional(spec: &BuildSpec, a: &Arc<Action>, opts: &Opts, tol: &Tolerances) -> Result<TraceFunctional, CliError> {
    Ok(match spec {
        BuildSpec::Field(fs) => {
            let (nu, field) = fs.build(a)?;
            if opts.state {
                build_from_field(&nu, &field, tol.psd_tol)?
            } else {
                build_trace_from_field(&nu, &field, tol.psd_tol)?
            }
        }
        BuildSpec::Extremal { character, point } => {
            if *point >= a.space_size() {
                return Err(CliError::input(format!("point {point} outside the system")));
            }
            let chi = character.build(&a.stabilizer(*point))?;
            build_extremal(&ExtremalTriple::new(a.clone(), chi, *point)?)
        }
        BuildSpec::Abelian { measure, duals } => {
            let nu = MeasureOnX::new(measure.clone())?;
            build_cabel(&nu, &BuildSpec::abelian_duals(a, duals)?, a)?
        }
        BuildSpec::GroupState { psi } => embed_group_state(&psi.build_in(a.group())?)?,
    })
}

fn build(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let a = load::finite(opts)?;
    let (name, text) = load::read(opts.field.as_deref(), "--field")?;
    let spec: BuildSpec = load::parse_or_extract(&name, &text, "build")?;
    let t = build_functional(&spec, &a, opts, tol).map_err(|e| prefix(e, &name))?;
    let mut body = Map::new();
    if !Arc::ptr_eq(t.system(), &a) {
        body.insert("system".into(), value(&SystemSpec::from_action(t.system())));
    }
    body.insert("trace".into(), value(&TraceSpec::from_trace(&t)));
    let pass = with_checks(&mut body, &functional_checks(&t, opts, tol), &[]);
    Ok(Outcome { body, pass })
}

fn check(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let mut body = Map::new();
    let checks = match load::system(opts)? {
        System::Finite(a) => functional_checks(&read_trace(opts, &a)?, opts, tol),
        System::Z(z) => z_checks(&read_ztrace(opts, &z)?, tol),
    };
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

fn decompose(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let a = match load::system(opts)? {
        System::Finite(a) => a,
        System::Z(_) => return zdecompose(opts, tol),
    };
    let t = read_trace(opts, &a)?;
    let mut body = Map::new();
    let mut checks = functional_checks(&t, opts, tol);
    if !with_checks(&mut body, &checks, &["traciality", "positivity", "centralizer", "support"]) {
        return Ok(Outcome { body, pass: false });
    }
    let d = decompose_to_field(&t, tol)?;
    let rebuilt = build_from_field(&d.measure, &d.field, tol.psd_tol)?;
    let round_trip = CheckReport::new(
        "round-trip",
        "rebuilding from the recovered measure and field gives the input",
        residual(rebuilt.distance(&t)),
        tol.tol,
        tol.warn_tol,
    );
    body.insert("field".into(), value(&FieldSpec::from_field(&d.measure, &d.field)));
    body.insert("report".into(), value(&d.report));
    checks.push(round_trip);
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

fn enumerate(opts: &Opts, _tol: &Tolerances) -> Result<Outcome, CliError> {
    let a = load::finite(opts)?;
    let list = enumerate_extremal(&a)?;
    let extremals: Vec<Value> = list
        .iter()
        .map(|(e, t)| {
            json!({
                "orbit": e.orbit(),
                "stabilizer": e.subgroup().members(),
                "character": value(&CharacterSpec::from_character(e.character())),
                "trace": value(&TraceSpec::from_trace(t)),
            })
        })
        .collect();
    let sum = extremal_dimension_sum(&a);
    let dim = a.space_size() * a.group().order();
    let mut body = Map::new();
    body.insert("count".into(), json!(list.len()));
    body.insert("extremals".into(), json!(extremals));
    body.insert("algebra_dim".into(), json!(dim));
    body.insert("dimension_sum".into(), json!(sum));
    let checks = [CheckReport::new(
        "dimension-identity",
        "sum over orbits of |H| [G:H]^2 equals |X||G|",
        residual(sum.abs_diff(dim) as f64),
        0.0,
        0.0,
    )];
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

/// Oracle block data plus checks against the enumerated extremal traces.
fn oracle_report(a: &Arc<Action>, seed: u64, tol: &Tolerances) -> Result<(Map<String, Value>, Vec<CheckReport>), CliError> {
    let (dec, traces) = oracle_traces(a, seed, tol)?;
    let mut body = Map::new();
    let dims: Vec<usize> = dec.blocks.iter().map(|b| b.dim).collect();
    let square_sum: usize = dims.iter().map(|d| d * d).sum();
    body.insert("algebra_dim".into(), json!(dec.algebra_dim));
    body.insert("center_dim".into(), json!(dec.center_dim));
    body.insert("seed_used".into(), json!(dec.seed));
    body.insert("block_dims".into(), json!(dims));
    body.insert("oracle_traces".into(), json!(traces.iter().map(|t| value(&TraceSpec::from_trace(t))).collect::<Vec<_>>()));
    let mut checks = vec![CheckReport::new(
        "block-dimensions",
        "sum of squared block dimensions equals the algebra dimension",
        residual(square_sum.abs_diff(dec.algebra_dim) as f64),
        0.0,
        0.0,
    )];
    if a.group().is_abelian() {
        let ours: Vec<TraceFunctional> = enumerate_extremal(a)?.into_iter().map(|(_, t)| t).collect();
        checks.push(CheckReport::new(
            "extremal-count",
            "one oracle block per enumerated extremal trace",
            residual(ours.len().abs_diff(traces.len()) as f64),
            0.0,
            0.0,
        ));
        let mut worst = Residual { value: 0.0, worst: BTreeMap::new() };
        for (i, o) in traces.iter().enumerate() {
            let d = ours.iter().map(|t| t.distance(o)).fold(f64::INFINITY, f64::min);
            if d > worst.value {
                worst = Residual { value: d, worst: BTreeMap::from([("block".to_string(), i as i64)]) };
            }
        }
        checks.push(CheckReport::new(
            "oracle-match",
            "each oracle block trace equals an enumerated extremal trace",
            worst,
            tol.tol,
            tol.warn_tol,
        ));
    }
    Ok((body, checks))
}

fn oracle(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let a = load::finite(opts)?;
    let (mut body, checks) = oracle_report(&a, opts.seed, tol)?;
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

fn gns_checks(t: &TraceFunctional, tol: &Tolerances) -> Result<(usize, Vec<CheckReport>), CliError> {
    let g = gns(t, tol)?;
    let alg = CrossedProduct::new(t.system().clone());
    Ok((
        g.dimension,
        vec![
            CheckReport::new(
                "gns-functional",
                "<pi(b) xi, xi> reproduces the functional on every monomial",
                residual(g.functional_residual(t.values())),
                tol.tol,
                tol.warn_tol,
            ),
            CheckReport::new("gns-star", "pi is a *-representation", residual(g.star_residual(&alg)), tol.tol, tol.warn_tol),
        ],
    ))
}

fn gns_command(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let a = load::finite(opts)?;
    let mut body = Map::new();
    let mut checks = Vec::new();
    if opts.trace.is_some() {
        let t = read_trace(opts, &a)?;
        let (dim, c) = gns_checks(&t, tol)?;
        body.insert("dimension".into(), json!(dim));
        checks.extend(c);
    }
    if opts.field.is_some() {
        let (nu, field) = read_field(opts, &a)?;
        let direct = build_from_field(&nu, &field, tol.psd_tol)?;
        let via = reconstruct_via_gns(&nu, &field, tol)?;
        checks.push(CheckReport::new(
            "gns-reconstruction",
            "the state rebuilt through the commuting representation equals the direct construction",
            residual(via.distance(&direct)),
            tol.tol,
            tol.warn_tol,
        ));
    }
    if checks.is_empty() {
        return Err(CliError::input("gns needs --trace or --field"));
    }
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

fn read_psi(opts: &Opts, a: &Arc<Action>) -> Result<cptrace_core::states::PositiveDefiniteFunction, CliError> {
    let (name, text) = load::read(opts.psi.as_deref(), "--psi")?;
    let spec: PsiSpec = load::parse_or_extract(&name, &text, "psi")?;
    spec.build_in(a.group()).map_err(|e| CliError::from_core(e, Some(&name)))
}

fn induce(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let a = load::finite(opts)?;
    let mut body = Map::new();
    let mut checks = Vec::new();
    if opts.psi.is_some() {
        let psi = read_psi(opts, &a)?;
        let induced = induce_state(a.group(), &psi, tol.psd_tol)?;
        let margin = induced.check_positive_definite()?;
        body.insert("induced".into(), value(&PsiSpec::from_function(&induced)));
        checks.push(CheckReport::margin(
            "induced-positivity",
            "the induced function is positive definite on G",
            margin,
            tol.psd_tol,
            tol.warn_tol,
        ));
    }
    if opts.field.is_some() {
        let (nu, field) = read_field(opts, &a)?;
        let r = induced_construction_check(&nu, &field, tol.psd_tol)?;
        checks.push(CheckReport::new(
            "induced-construction",
            "the sum of induced states equals the direct construction",
            residual(r.residual),
            tol.tol,
            tol.warn_tol,
        ));
        checks.push(CheckReport::margin(
            "induced-construction-positivity",
            "each induced state is positive",
            r.min_psd_margin,
            tol.psd_tol,
            tol.warn_tol,
        ));
    }
    if checks.is_empty() {
        return Err(CliError::input("induce needs --psi or --field"));
    }
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

fn read_zdata(opts: &Opts, z: &Arc<ZSystem>, tol: &Tolerances) -> Result<cptrace_core::zsystems::ZTraceData, CliError> {
    let (name, text) = load::read(opts.zdata.as_deref(), "--zdata")?;
    let spec: ZDataSpec = load::parse_or_extract(&name, &text, "zdata")?;
    spec.build(z, tol.psd_tol).map_err(|e| CliError::from_core(e, Some(&name)))
}

fn zbuild(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let z = load::z(opts)?;
    let data = read_zdata(opts, &z, tol)?;
    let t = build_ztrace(&z, &data, tol.psd_tol)?;
    let mut body = Map::new();
    body.insert("trace".into(), value(&TraceSpec::from_ztrace(&t)));
    let pass = with_checks(&mut body, &z_checks(&t, tol), &[]);
    Ok(Outcome { body, pass })
}

fn zdecompose(opts: &Opts, tol: &Tolerances) -> Result<Outcome, CliError> {
    let z = load::z(opts)?;
    let t = read_ztrace(opts, &z)?;
    let mut body = Map::new();
    let mut checks = z_checks(&t, tol);
    if checks.iter().any(|c| !c.pass) {
        let pass = with_checks(&mut body, &checks, &["traciality", "positivity"]);
        return Ok(Outcome { body, pass });
    }
    let (data, report) = decompose_ztrace(&t, tol)?;
    let rebuilt = build_ztrace(&z, &data, tol.psd_tol)?;
    checks.push(CheckReport::new(
        "round-trip",
        "rebuilding from the recovered circle measures gives the input",
        residual(rebuilt.distance(&t)),
        tol.tol,
        tol.warn_tol,
    ));
    body.insert("zdata".into(), value(&ZDataSpec::from_data(&data)));
    body.insert("report".into(), value(&report));
    let pass = with_checks(&mut body, &checks, &[]);
    Ok(Outcome { body, pass })
}

/// Checks for one corpus system. Constructions run at the default tolerances
/// (or looser user ones); every residual is judged at the user's thresholds.
fn corpus_finite(a: &Arc<Action>, seed: u64, tol: &Tolerances) -> Vec<CheckReport> {
    let ops = loosest(tol);
    let mut out = Vec::new();
    match oracle_report(a, seed, &ops) {
        Ok((_, checks)) => out.extend(checks.into_iter().map(|c| rejudge(c, tol))),
        Err(e) => out.push(out_error("oracle", e.message)),
    }
    if a.group().is_abelian() {
        let dim = a.space_size() * a.group().order();
        out.push(CheckReport::new(
            "dimension-identity",
            "sum over orbits of |H| [G:H]^2 equals |X||G|",
            residual(extremal_dimension_sum(a).abs_diff(dim) as f64),
            0.0,
            0.0,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let built = corpus::random_trace_field(&mut rng, a).and_then(|(nu, field)| Ok((build_trace_from_field(&nu, &field, ops.psd_tol)?, nu, field)));
    let (t, nu, field) = match built {
        Ok(b) => b,
        Err(e) => {
            out.push(out_error("build", e.to_string()));
            return out;
        }
    };
    out.extend(run_trace_checks(&t, tol));
    match decompose_to_field(&t, &ops).and_then(|d| build_from_field(&d.measure, &d.field, ops.psd_tol)) {
        Ok(back) => out.push(CheckReport::new(
            "round-trip",
            "rebuilding from the recovered measure and field gives the input",
            residual(back.distance(&t)),
            tol.tol,
            tol.warn_tol,
        )),
        Err(e) => out.push(out_error("round-trip", e.to_string())),
    }
    match induced_construction_check(&nu, &field, ops.psd_tol) {
        Ok(r) => out.push(CheckReport::new(
            "induced-construction",
            "the sum of induced states equals the direct construction",
            residual(r.residual),
            tol.tol,
            tol.warn_tol,
        )),
        Err(e) => out.push(out_error("induced-construction", e.to_string())),
    }
    match gns_checks(&t, &ops) {
        Ok((_, checks)) => out.extend(checks.into_iter().map(|c| rejudge(c, tol))),
        Err(e) => out.push(out_error("gns", e.message)),
    }
    out
}

fn corpus_z(z: &Arc<ZSystem>, seed: u64, tol: &Tolerances) -> Vec<CheckReport> {
    let ops = loosest(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let built = corpus::random_ztrace_data(&mut rng, z).and_then(|d| Ok((build_ztrace(z, &d, ops.psd_tol)?, d)));
    let (t, data) = match built {
        Ok(b) => b,
        Err(e) => return vec![out_error("build", e.to_string())],
    };
    let mut out = z_checks(&t, tol);
    match decompose_ztrace(&t, &ops) {
        Ok((back, _)) => out.push(CheckReport::new(
            "round-trip",
            "the recovered circle measures equal the input data",
            residual(back.distance(&data)),
            tol.tol,
            tol.warn_tol,
        )),
        Err(e) => out.push(out_error("round-trip", e.to_string())),
    }
    out
}

fn loosest(tol: &Tolerances) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        tol: tol.tol.max(d.tol),
        psd_tol: tol.psd_tol.max(d.psd_tol),
        rank_tol: tol.rank_tol.max(d.rank_tol),
        warn_tol: tol.warn_tol.max(d.warn_tol),
    }
}

/// Re-evaluates a check computed at the construction tolerances against the user's thresholds.
fn rejudge(c: CheckReport, tol: &Tolerances) -> CheckReport {
    if c.threshold == 0.0 {
        return c;
    }
    CheckReport::new(&c.check, &c.condition, Residual { value: c.residual, worst: c.worst }, tol.tol, tol.warn_tol)
}

fn out_error(what: &str, message: String) -> CheckReport {
    CheckReport {
        check: what.into(),
        condition: "construction succeeds".into(),
        residual: f64::NAN,
        threshold: 0.0,
        pass: false,
        worst: BTreeMap::new(),
        note: Some(message),
    }
}

fn run_corpus(seed: u64, tol: &Tolerances) -> Outcome {
    let finite = corpus::systems();
    let zs = corpus::z_systems();
    let results: Vec<(String, Vec<CheckReport>)> = thread::scope(|s| {
        let mut handles = Vec::new();
        for (i, sys) in finite.iter().enumerate() {
            let seed = seed.wrapping_add(i as u64);
            handles.push(s.spawn(move || (sys.name.to_string(), corpus_finite(&sys.action, seed, tol))));
        }
        for (i, sys) in zs.iter().enumerate() {
            let seed = seed.wrapping_add((finite.len() + i) as u64);
            handles.push(s.spawn(move || (sys.name.to_string(), corpus_z(&sys.system, seed, tol))));
        }
        handles.into_iter().map(|h| h.join().expect("corpus job panicked")).collect()
    });

    let mut rows = Vec::new();
    let (mut failed, mut tolerance_related) = (0, 0);
    eprintln!("{:<22} {:<28} {:>11} {:>11}  result", "system", "check", "residual", "threshold");
    for (name, checks) in &results {
        for c in checks {
            let verdict = match (c.pass, &c.note) {
                (true, _) => "pass",
                (false, Some(n)) if n.starts_with("tolerance-related") => {
                    tolerance_related += 1;
                    "FAIL (tolerance-related)"
                }
                (false, _) => {
                    failed += 1;
                    "FAIL"
                }
            };
            eprintln!("{name:<22} {:<28} {:>11.3e} {:>11.3e}  {verdict}", c.check, c.residual, c.threshold);
            let mut row = value(c);
            row["system"] = json!(name);
            rows.push(row);
        }
    }
    let mut body = Map::new();
    body.insert("systems".into(), json!(results.len()));
    body.insert("checks".into(), json!(rows));
    body.insert(
        "summary".into(),
        json!({
            "checks": rows.len(),
            "mathematical_failures": failed,
            "tolerance_related_failures": tolerance_related,
        }),
    );
    Outcome { body, pass: failed + tolerance_related == 0 }
}
