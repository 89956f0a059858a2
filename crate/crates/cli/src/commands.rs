use dwt_core::asymptotics::{phase_point, profile_with_tol, AsymptoticProfile, DEFAULT_KAPPA_TOL};
use dwt_core::classes::{ClassRef, ClassTable};
use dwt_core::nonselection::{build_example, check_rules, evaluate_stage, summarize, symbolic_layout};
use dwt_core::oracle::{brute_force_barrier, transfer_matrix_gibbs, TruncatedPotential};
use dwt_core::peierls::{barrier, boundary_seed, representation_formula, solve_calibrated, subaction_violation};
use dwt_core::potential::{validate_general, PotentialSpec};
use dwt_core::spectrum::{eigenfunction_table, solve_lambda, subaction_table, GibbsMeasure, SpectralData};
use dwt_core::{ReducedPotential, Side};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{Failure, Outcome};
use crate::output::{num, Artifact, Table};

/// Agreement required between the oracle and the series solver.
const ORACLE_LAMBDA_TOL: f64 = 1e-9;
const ORACLE_MU_TOL: f64 = 1e-9;
/// Slack for the barrier table against enumeration.
const BARRIER_SLACK: f64 = 1e-12;
/// Oracle barriers are enumerated for classes up to this run length.
const ORACLE_BARRIER_CLASSES: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Check the double-well conditions and print an itemized report.
    Validate,
    /// Emit the reduced potential as JSON.
    Reduce,
    /// Spectral data and cylinder masses at the given β values.
    Solve,
    /// β sweep of λ-1, μ[0], μ[1] and the series, with fitted log-slopes.
    Sweep,
    /// Zero-temperature profile: γ, κ, c, limit weights.
    Classify,
    /// Barrier table from both fixed points and the fixed-point identities.
    Barrier,
    /// Finite-β sub-actions, their limit, and the calibrated fixed point.
    Subaction,
    /// Compare the series solver with the transfer-matrix oracle.
    OracleCheck,
    /// Check a stage schedule and run the oscillation experiment.
    Nonselect,
    /// Classify a two-parameter family on a grid.
    PhaseGrid,
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Outcome<Artifact> {
    match cmd {
        Command::Validate => validate(cfg),
        Command::Reduce => reduce(cfg),
        Command::Solve => solve(cfg),
        Command::Sweep => sweep(cfg),
        Command::Classify => classify(cfg),
        Command::Barrier => barrier_cmd(cfg),
        Command::Subaction => subaction(cfg),
        Command::OracleCheck => oracle_check(cfg),
        Command::Nonselect => nonselect(cfg),
        Command::PhaseGrid => phase_grid(cfg),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn validate(cfg: &RunConfig) -> Outcome<Artifact> {
    let spec = cfg.potential_spec()?;
    let mut notes = Vec::new();
    let json = match &spec {
        PotentialSpec::General(g) => {
            let report = validate_general(g);
            if !report.passed() {
                notes.push(report.to_string());
            }
            json!({"kind": "general", "passed": report.passed(), "report": report})
        }
        PotentialSpec::Reduced { .. } => match spec.to_reduced() {
            Ok(_) => json!({"kind": "reduced", "passed": true}),
            Err(e) => {
                notes.push(e.to_string());
                json!({"kind": "reduced", "passed": false, "error": e.to_string()})
            }
        },
    };
    let passed = json["passed"] == Value::Bool(true);
    let mut a = Artifact::json(json);
    a.exit = if passed { 0 } else { 1 };
    a.notes = notes;
    Ok(a)
}

fn reduce(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    Ok(Artifact::json(to_value(&PotentialSpec::from_reduced(&r))))
}

fn check_words(words: &[String]) -> Outcome<()> {
    match words.iter().find(|w| w.is_empty() || w.bytes().any(|b| b != b'0' && b != b'1')) {
        Some(w) => Err(Failure::Validation(format!("invalid cylinder word {w:?}"))),
        None => Ok(()),
    }
}

fn solve(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    let betas = cfg.require_betas()?;
    let words = cfg.words(3);
    check_words(&words)?;
    let (tol, nmax) = (cfg.tol(), cfg.nmax());
    let results = betas
        .par_iter()
        .map(|&beta| {
            let sd = solve_lambda(&r, beta, tol)?;
            let g = GibbsMeasure::new(&r, &sd)?;
            let mu = words.iter().map(|w| g.mu(w)).collect::<dwt_core::Result<Vec<_>>>()?;
            let tables = eigenfunction_table(&r, &sd, nmax)?;
            Ok((sd, mu, tables))
        })
        .collect::<dwt_core::Result<Vec<_>>>()?;

    let mut header = vec!["beta".to_string(), "loglam1".into(), "residual".into(), "iterations".into()];
    header.extend(words.iter().map(|w| format!("mu[{w}]")));
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    for (sd, mu, tables) in &results {
        let mut row = vec![num(sd.beta), num(sd.loglam1), num(sd.residual), sd.iterations.to_string()];
        row.extend(mu.iter().map(|&m| num(m)));
        table.push(row);
        let cylinders: Vec<Value> = words.iter().zip(mu).map(|(w, m)| json!({"word": w, "mu": m})).collect();
        rows.push(json!({
            "beta": sd.beta,
            "lambda": sd.lambda(),
            "spectral": sd,
            "cylinders": cylinders,
            "log_phi": tables.log_phi,
            "log_z": tables.log_z,
        }));
    }
    Ok(Artifact::json(Value::Array(rows)).with_table(table))
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 || y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Root, μ[0], μ[1] and ln(μ[0]/μ[1]) at one β.
type SweepPoint = (SpectralData, f64, f64, f64);

fn sweep(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    let betas = cfg.require_betas()?;
    let tol = cfg.tol();
    let results = betas
        .par_iter()
        .map(|&beta| {
            let sd = solve_lambda(&r, beta, tol)?;
            let g = GibbsMeasure::new(&r, &sd)?;
            Ok((sd, g.mu0(), g.mu1(), g.log_mu_ratio()))
        })
        .collect::<dwt_core::Result<Vec<SweepPoint>>>()?;

    let mut table =
        Table::new(&["beta", "loglam1", "mu0", "mu1", "logF0", "logF1", "logFt0", "logFt1"]);
    let mut rows = Vec::new();
    for (sd, mu0, mu1, _) in &results {
        let logs = [sd.log_f0.ln(), sd.log_f1.ln(), sd.log_ft0.ln(), sd.log_ft1.ln()];
        let mut row = vec![num(sd.beta), num(sd.loglam1), num(*mu0), num(*mu1)];
        row.extend(logs.iter().map(|&v| num(v)));
        table.push(row);
        rows.push(json!({
            "beta": sd.beta, "loglam1": sd.loglam1, "mu0": mu0, "mu1": mu1,
            "logF0": logs[0], "logF1": logs[1], "logFt0": logs[2], "logFt1": logs[3],
        }));
    }

    // slopes of -ln X against β, comparable with the predicted rates
    let fit = |f: &dyn Fn(&SweepPoint) -> f64| {
        let y: Vec<f64> = results.iter().map(|x| -f(x)).collect();
        slope(&betas, &y)
    };
    let fits = json!({
        "lambda_minus_one": fit(&|x| x.0.loglam1),
        "mu_ratio": fit(&|x| x.3),
        "f0": fit(&|x| x.0.log_f0.ln()),
        "f1": fit(&|x| x.0.log_f1.ln()),
        "ft0": fit(&|x| x.0.log_ft0.ln()),
        "ft1": fit(&|x| x.0.log_ft1.ln()),
    });
    let predicted = profile_with_tol(&r, cfg.kappa_tol.unwrap_or(DEFAULT_KAPPA_TOL)).ok().map(|p| p.rates);
    let mut notes = Vec::new();
    if let Some(obj) = fits.as_object() {
        for (k, v) in obj {
            notes.push(format!("slope {k}: {v}"));
        }
    }
    let mut a = Artifact::json(json!({"rows": rows, "fits": fits, "predicted": predicted})).with_table(table);
    a.meta.insert("fits".into(), fits);
    a.meta.insert("predicted".into(), to_value(&predicted));
    a.notes = notes;
    Ok(a)
}

fn profile_json(p: &AsymptoticProfile) -> Value {
    json!({
        "regime": p.regime.to_string(),
        "gamma": p.gamma,
        "exponents": p.exponents,
        "kappa": p.kappa,
        "c": p.c,
        "w0": p.weights.map(|w| w.0),
        "w1": p.weights.map(|w| w.1),
        "swapped": p.swapped,
        "rates": p.rates,
    })
}

fn profile_of(cfg: &RunConfig, r: &ReducedPotential) -> Outcome<AsymptoticProfile> {
    Ok(profile_with_tol(r, cfg.kappa_tol.unwrap_or(DEFAULT_KAPPA_TOL))?)
}

fn classify(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    let p = profile_of(cfg, &r)?;
    let mut json = profile_json(&p);
    json["derived"] = to_value(&r.derived());
    Ok(Artifact::json(json))
}

fn barrier_cmd(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    let b = barrier(&r, cfg.len());
    let mut json = to_value(&b);
    json["identities_min"] = json!(b.identities.min());
    Ok(Artifact::json(json))
}

fn subaction(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    let p = profile_of(cfg, &r)?;
    let betas = cfg.betas()?;
    let len = cfg.len();
    let limit = dwt_core::asymptotics::limit_subaction(&r, &p, len);
    let len = limit.len();
    let seed = boundary_seed(&r, limit.fix0, limit.fix1, len);
    let fixed = solve_calibrated(&r, &seed, cfg.max_iter.unwrap_or(10_000), cfg.tol())?;
    let represented = representation_formula(&barrier(&r, len), limit.fix0, limit.fix1);
    let finite = betas
        .par_iter()
        .map(|&beta| {
            let sd = solve_lambda(&r, beta, cfg.tol())?;
            let v = subaction_table(&sd, &eigenfunction_table(&r, &sd, len)?);
            Ok(json!({"beta": beta, "table": v, "distance_to_limit": v.sup_distance(&limit)}))
        })
        .collect::<dwt_core::Result<Vec<_>>>()?;
    Ok(Artifact::json(json!({
        "regime": p.regime.to_string(),
        "limit": limit,
        "fixed_point": fixed,
        "representation": represented,
        "distances": {
            "fixed_point_to_limit": fixed.sup_distance(&limit),
            "representation_to_limit": represented.sup_distance(&limit),
            "fixed_point_violation": subaction_violation(&r, &fixed),
        },
        "finite_beta": finite,
    })))
}

fn oracle_check(cfg: &RunConfig) -> Outcome<Artifact> {
    let r = cfg.potential()?;
    let depth = cfg.depth.unwrap_or(8);
    let t = TruncatedPotential::new(&r, depth)?;
    let betas = match cfg.betas()? {
        b if b.is_empty() => vec![1.0],
        b => b,
    };
    let words = cfg.words(depth.min(4));
    check_words(&words)?;
    if let Some(w) = words.iter().find(|w| w.len() > depth) {
        return Err(Failure::Validation(format!("word {w:?} is longer than the truncation depth {depth}")));
    }
    let truncated = t.reduced();
    let tol = cfg.tol();
    let spectral = betas
        .par_iter()
        .map(|&beta| {
            let oracle = transfer_matrix_gibbs(&t, beta, &words)?;
            let g = GibbsMeasure::new(truncated, &solve_lambda(truncated, beta, tol)?)?;
            let lam_err = (oracle.loglam1.exp() / g.spectral().loglam1.exp() - 1.0).abs();
            let mut mu_err = 0.0f64;
            for (w, m) in &oracle.mu {
                mu_err = mu_err.max((m - g.mu(w)?).abs());
            }
            let agree = lam_err <= ORACLE_LAMBDA_TOL && mu_err <= ORACLE_MU_TOL;
            Ok(json!({
                "beta": beta,
                "oracle_loglam1": oracle.loglam1,
                "solver_loglam1": g.spectral().loglam1,
                "lambda_minus_one_rel_error": lam_err,
                "mu_max_abs_error": mu_err,
                "agree": agree,
            }))
        })
        .collect::<dwt_core::Result<Vec<_>>>()?;

    let classes = ORACLE_BARRIER_CLASSES.min(depth as u64);
    let table = barrier(truncated, depth);
    let max_blocks = cfg.max_blocks.unwrap_or(2);
    let mut barriers = Vec::new();
    for from in Side::BOTH {
        let column: &ClassTable = match from {
            Side::Zero => &table.from_fix0,
            Side::One => &table.from_fix1,
        };
        let targets = (1..=classes).flat_map(|n| [ClassRef::Zero(n), ClassRef::One(n)]).chain([ClassRef::Fix0, ClassRef::Fix1]);
        for to in targets {
            let est = brute_force_barrier(&t, from, to, max_blocks, depth as u64)?;
            let expect = column.get(to);
            let agree = est.value - est.bound - BARRIER_SLACK <= expect && expect <= est.value + BARRIER_SLACK;
            barriers.push(json!({
                "from": format!("{}^inf", from), "to": to.to_string(),
                "table": expect, "enumerated": est.value, "bound": est.bound, "agree": agree,
            }));
        }
    }
    let all_agree = spectral.iter().chain(&barriers).all(|v| v["agree"] == Value::Bool(true));
    let mut a = Artifact::json(json!({
        "depth": depth,
        "agree": all_agree,
        "spectral": spectral,
        "barriers": barriers,
    }));
    if !all_agree {
        a.exit = 2;
        a.notes.push("oracle and solver disagree; see the report".into());
    }
    Ok(a)
}

fn nonselect(cfg: &RunConfig) -> Outcome<Artifact> {
    let params = cfg.schedule()?;
    let th = cfg.thresholds.unwrap_or_default();
    let report = check_rules(&params, &th);
    if !report.passed {
        let mut a = Artifact::json(json!({"rules": report}));
        a.exit = 1;
        a.notes = report
            .failures()
            .map(|c| format!("stage {}: {} = {:e} fails {:?} {:e}", c.stage, c.quantity, c.value, c.bound, c.threshold))
            .collect();
        return Ok(a);
    }
    let r = build_example(&params)?;
    let stages = (0..params.len())
        .into_par_iter()
        .map(|k| evaluate_stage(&params, &r, k))
        .collect::<dwt_core::Result<Vec<_>>>()?;
    let experiment = summarize(stages);

    let mut table = Table::new(&[
        "k", "beta", "mu0", "mu1", "loglam1", "alpha0", "theta0", "alpha1", "theta1", "delta",
    ]);
    for s in &experiment.stages {
        let d = s.diagnostics;
        table.push(vec![
            s.k.to_string(),
            num(s.beta),
            num(s.mu0),
            num(s.mu1),
            num(s.loglam1),
            num(d.alpha0),
            num(d.theta0),
            num(d.alpha1),
            num(d.theta1),
            num(d.delta),
        ]);
    }
    let mut a = Artifact::json(json!({
        "rules": report,
        "experiment": experiment,
        "layout": symbolic_layout(2, 4),
    }))
    .with_table(table);
    a.meta.insert("alternating_from".into(), to_value(&experiment.alternating_from));
    a.notes.push(format!("alternating from stage {:?}", experiment.alternating_from));
    Ok(a)
}

fn phase_grid(cfg: &RunConfig) -> Outcome<Artifact> {
    let (family, s_values, t_values) = cfg.grid()?;
    let points: Vec<(f64, f64)> = s_values.iter().flat_map(|&s| t_values.iter().map(move |&t| (s, t))).collect();
    let results: Vec<_> = points.par_iter().map(|&(s, t)| phase_point(family, s, t)).collect();

    let mut table = Table::new(&["s", "t", "regime", "gamma", "kappa", "c", "w0", "w1"]);
    let mut rows = Vec::new();
    let mut invalid = 0;
    for pt in &results {
        match &pt.profile {
            Ok(p) => {
                let (w0, w1) = p.weights.map_or((String::new(), String::new()), |(a, b)| (num(a), num(b)));
                table.push(vec![
                    num(pt.s),
                    num(pt.t),
                    p.regime.to_string(),
                    num(p.gamma),
                    p.kappa.to_string(),
                    num(p.c),
                    w0,
                    w1,
                ]);
                let mut row = profile_json(p);
                row["s"] = json!(pt.s);
                row["t"] = json!(pt.t);
                rows.push(row);
            }
            Err(e) => {
                invalid += 1;
                let mut row = vec![num(pt.s), num(pt.t), "invalid".to_string()];
                row.extend(std::iter::repeat_n(String::new(), 5));
                table.push(row);
                rows.push(json!({"s": pt.s, "t": pt.t, "regime": "invalid", "error": e}));
            }
        }
    }
    let mut a = Artifact::json(Value::Array(rows)).with_table(table);
    a.meta.insert("invalid_points".into(), json!(invalid));
    Ok(a)
}
