use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use sculpt::optics::{
    efficiency_exponent, efficiency_sweep, heralded_subtract, linear_grid, log_x_grid, module_click, Detector,
};
use sculpt::protocols::{run_protocol, sculpt as sculpt_family, Family, GhzPhase, Protocol, SculptSpec};
use sculpt::slater::{slater_spectrum, DEFAULT_RANK_TOL};
use sculpt::{fidelity, Error, FockState, Statistics};

use crate::output::{emit, float, render};
use crate::{
    AnalyzeArgs, FamilyArg, HeraldArgs, ModuleArgs, PhaseArg, RandomStateArgs, RunArgs, SculptArgs, SweepArgs,
};

/// Failures of the physics (a step or herald with zero probability) exit
/// with 2; everything else is an input problem and exits with 1.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::ProtocolFailure { .. } | Error::ZeroProbability) => 2,
        _ => 1,
    }
}

fn read_state(path: &Path) -> Result<FockState> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FockState::from_json(&text).with_context(|| format!("parsing state {}", path.display()))
}

fn state_value(state: &FockState) -> Result<Value> {
    Ok(serde_json::to_value(sculpt::fock::StateFile::from(state))?)
}

fn write_outputs(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, text) in files {
        emit(text, Some(&dir.join(name)))?;
    }
    Ok(())
}

/// Slater spectrum fields for two-boson states, `None` otherwise.
fn slater_value(state: &FockState, tol: f64) -> Result<Option<Value>> {
    if state.statistics() != Statistics::Boson || state.particles() != 2 {
        return Ok(None);
    }
    let report = slater_spectrum(state)?.report(tol);
    Ok(Some(serde_json::to_value(report)?))
}

fn check_tol(tol: f64) -> Result<()> {
    ensure!(tol.is_finite() && tol >= 0.0, "tolerance must be a non-negative number, got {tol}");
    Ok(())
}

pub fn sculpt(args: SculptArgs) -> Result<u8> {
    check_tol(args.tol)?;
    let family = match args.family {
        FamilyArg::Bipartite => Family::Bipartite,
        FamilyArg::Ghz => Family::Ghz,
        FamilyArg::W => Family::W,
        FamilyArg::Dicke => Family::Dicke,
    };
    let spec = SculptSpec {
        family,
        n: args.n,
        m: args.m,
        flipped: args.flipped,
        phase: match args.phase {
            PhaseArg::Alternating => GhzPhase::Alternating,
            PhaseArg::Plus => GhzPhase::Plus,
        },
    };
    let started = Instant::now();
    let done = sculpt_family(&spec)?;
    let elapsed = started.elapsed();

    let mut report = Map::new();
    report.insert("family".into(), serde_json::to_value(family)?);
    report.insert("n".into(), json!(args.n));
    match family {
        Family::Ghz => {
            report.insert("phase".into(), json!(if spec.phase == GhzPhase::Plus { "plus" } else { "alternating" }));
        }
        Family::W => {
            report.insert("flipped".into(), json!(args.flipped));
        }
        Family::Dicke => {
            report.insert("m".into(), json!(args.m));
        }
        _ => {}
    }
    report.insert("protocol_modes".into(), json!(done.protocol.n_modes()));
    report.insert("steps".into(), json!(done.protocol.steps().len()));
    report.insert("output_modes".into(), json!(done.output.modes()));
    report.insert("particles".into(), json!(done.output.particles()));
    report.insert("fidelity".into(), json!(done.fidelity));
    report.insert("success_weight".into(), json!(done.run.success_weight));
    report.insert("per_step_weights".into(), json!(done.run.per_step_weights));
    if let Some(slater) = slater_value(&done.output, DEFAULT_RANK_TOL)? {
        report.insert("slater".into(), slater);
    }
    let ok = done.fidelity >= 1.0 - args.tol;
    report.insert("success".into(), json!(ok));
    if args.timing {
        report.insert("wall_time_ms".into(), json!(elapsed.as_secs_f64() * 1e3));
    }
    let report = render(&Value::Object(report));

    if let Some(dir) = &args.out {
        write_outputs(
            dir,
            &[
                ("report.json", report.clone()),
                ("state.json", render(&state_value(&done.output)?)),
                ("protocol.json", render(&serde_json::from_str(&done.protocol.to_json()?)?)),
            ],
        )?;
    }
    emit(&report, None)?;
    if !ok {
        eprintln!("fidelity {} is below 1 - {:e}", float(done.fidelity), args.tol);
        return Ok(2);
    }
    Ok(0)
}

pub fn run(args: RunArgs) -> Result<u8> {
    check_tol(args.tol)?;
    let text = fs::read_to_string(&args.protocol).with_context(|| format!("reading {}", args.protocol.display()))?;
    let protocol = Protocol::from_json(&text).with_context(|| format!("parsing protocol {}", args.protocol.display()))?;
    let input = match &args.input {
        Some(p) => read_state(p)?,
        None => FockState::sym_state(protocol.n_modes()),
    };
    let target = args.target.as_deref().map(read_state).transpose()?;
    let result = run_protocol(&input, &protocol, target.as_ref())?;

    let mut report = Map::new();
    report.insert("family".into(), serde_json::to_value(protocol.family())?);
    report.insert("protocol_modes".into(), json!(protocol.n_modes()));
    report.insert("steps".into(), json!(protocol.steps().len()));
    report.insert("particles".into(), json!(result.final_state.particles()));
    report.insert("success_weight".into(), json!(result.success_weight));
    report.insert("per_step_weights".into(), json!(result.per_step_weights));
    if let Some(slater) = slater_value(&result.final_state, DEFAULT_RANK_TOL)? {
        report.insert("slater".into(), slater);
    }
    let mut ok = true;
    if let Some(f) = result.fidelity_to_target {
        ok = f >= 1.0 - args.tol;
        report.insert("fidelity".into(), json!(f));
        report.insert("success".into(), json!(ok));
    }
    let report = render(&Value::Object(report));
    if let Some(dir) = &args.out {
        write_outputs(
            dir,
            &[
                ("report.json", report.clone()),
                ("state.json", render(&state_value(&result.final_state)?)),
            ],
        )?;
    }
    emit(&report, None)?;
    Ok(if ok { 0 } else { 2 })
}

pub fn analyze(args: AnalyzeArgs) -> Result<u8> {
    check_tol(args.tol)?;
    let state = read_state(&args.state)?;
    ensure!(
        state.statistics() == Statistics::Boson && state.particles() == 2,
        "analyze needs a two-boson state, got {} {:?} particle(s)",
        state.particles(),
        state.statistics()
    );
    let mut report = match slater_value(&state, args.tol)? {
        Some(Value::Object(map)) => map,
        _ => unreachable!("two-boson state has a Slater report"),
    };
    report.insert("modes".into(), json!(state.modes()));
    report.insert("tol".into(), json!(args.tol));
    emit(&render(&Value::Object(report)), None)?;
    Ok(0)
}

fn check_t(t: f64) -> Result<()> {
    ensure!(t > 0.0 && t < 1.0, "transmittivity must lie in (0, 1), got {t}");
    Ok(())
}

fn input_or_sym4(path: Option<&Path>) -> Result<FockState> {
    let state = match path {
        Some(p) => read_state(p)?,
        None => FockState::sym_state(4),
    };
    ensure!(state.modes() == 4, "the module acts on 4 modes, input has {}", state.modes());
    ensure!(state.statistics() == Statistics::Boson, "the module needs a bosonic state");
    Ok(state)
}

pub fn herald(args: HeraldArgs) -> Result<u8> {
    check_t(args.t)?;
    let state = read_state(&args.input)?;
    ensure!(
        (1..=state.modes()).contains(&args.mode),
        "--mode counts from 1 and must be at most {}, got {}",
        state.modes(),
        args.mode
    );
    let outcome = heralded_subtract(&state, args.mode - 1, args.t)?;
    let report = json!({
        "mode": args.mode,
        "t": args.t,
        "probability": outcome.probability,
        "conditional_state": state_value(&outcome.conditional_state)?,
    });
    emit(&render(&report), None)?;
    Ok(0)
}

pub fn module(args: ModuleArgs) -> Result<u8> {
    check_t(args.t)?;
    let state = input_or_sym4(args.input.as_deref())?.normalized()?;
    let detectors: Vec<Detector> = match args.detector {
        Some(d) => vec![d],
        None => Detector::ALL.to_vec(),
    };
    let mut records = Vec::new();
    for det in detectors {
        let mut record = Map::new();
        record.insert("detector".into(), json!(det.to_string()));
        let ideal = match state.subtract(&det.superposition()) {
            Ok(s) if !s.is_zero() => Some(s.normalized()?),
            Ok(_) | Err(Error::VacuumSubtraction) => None,
            Err(e) => return Err(e.into()),
        };
        match module_click(&state, args.t, det) {
            Ok(outcome) => {
                record.insert("probability".into(), json!(outcome.probability));
                let f = ideal.map(|i| fidelity(&i, &outcome.conditional_state)).transpose()?;
                record.insert("fidelity".into(), json!(f));
                record.insert("conditional_state".into(), state_value(&outcome.conditional_state)?);
            }
            Err(Error::ZeroProbability) => {
                record.insert("probability".into(), json!(0.0));
                record.insert("fidelity".into(), Value::Null);
                record.insert("conditional_state".into(), Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
        records.push(Value::Object(record));
    }
    emit(&render(&Value::Array(records)), None)?;
    Ok(0)
}

fn parse_grid(spec: &str, log: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, count] = parts[..] else {
        bail!("expected start:end:count, got {spec:?}");
    };
    let start: f64 = start.trim().parse().with_context(|| format!("bad start {start:?}"))?;
    let end: f64 = end.trim().parse().with_context(|| format!("bad end {end:?}"))?;
    let count: usize = count.trim().parse().with_context(|| format!("bad count {count:?}"))?;
    check_t(start)?;
    check_t(end)?;
    ensure!(count >= 1, "grid needs at least one point");
    Ok(if log {
        log_x_grid(start, end, count)
    } else {
        linear_grid(start, end, count)
    })
}

fn parse_clicks(spec: &str) -> Result<Vec<Detector>> {
    let clicks = spec
        .split(',')
        .map(|s| s.trim().parse::<Detector>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    ensure!(!clicks.is_empty(), "at least one click is required");
    Ok(clicks)
}

pub fn sweep(args: SweepArgs) -> Result<u8> {
    let ts = parse_grid(&args.t, args.log)?;
    let clicks = parse_clicks(&args.clicks)?;
    let input = input_or_sym4(args.input.as_deref())?.normalized()?;
    let mut ideal = input.clone();
    for d in &clicks {
        ideal = ideal.subtract(&d.superposition())?;
    }
    let ideal = ideal
        .normalized()
        .context("the click sequence annihilates the input")?;
    let rows = efficiency_sweep(&input, &clicks, &ideal, &ts, args.model)?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["t", "pattern", "probability", "fidelity"])?;
    for r in &rows {
        writer.write_record([float(r.t), r.pattern.clone(), float(r.probability), float(r.fidelity)])?;
    }
    let text = String::from_utf8(writer.into_inner()?)?;
    emit(&text, args.out.as_deref())?;

    if rows.len() >= 2 && rows.iter().all(|r| r.probability > 0.0) {
        eprintln!(
            "probability exponent per subtraction: {:.4}",
            efficiency_exponent(&rows, clicks.len())
        );
    }
    Ok(0)
}

pub fn random_state(args: RandomStateArgs) -> Result<u8> {
    ensure!(args.modes >= 1, "need at least one mode");
    ensure!(args.terms >= 1, "need at least one term");
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let terms: Vec<(Vec<u32>, C64)> = (0..args.terms)
        .map(|_| {
            let mut occ = vec![0u32; args.modes];
            for _ in 0..args.particles {
                occ[rng.random_range(0..args.modes)] += 1;
            }
            (occ, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    let state = FockState::from_terms(args.modes, Statistics::Boson, terms)?.normalized()?;
    emit(&render(&state_value(&state)?), args.out.as_deref())?;
    Ok(0)
}
