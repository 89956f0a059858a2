use dwt_core::asymptotics::{phase_point, profile, FamilyTemplate};
use dwt_core::nonselection::{check_rules, desk_schedule, oscillation_experiment, StageParams, Thresholds};
use dwt_core::potential::PotentialSpec;
use dwt_core::spectrum::{solve_lambda, GibbsMeasure, DEFAULT_TOL};
use serde_json::{json, Value};

/// Upper limits that keep a single call interactive.
pub const MAX_GRID_POINTS: usize = 40_000;
pub const MAX_SWEEP_POINTS: usize = 2_000;

type Axis = (f64, f64, usize);

fn linspace((lo, hi, n): Axis, name: &str) -> Result<Vec<f64>, String> {
    if !(lo.is_finite() && hi.is_finite()) || n == 0 || hi < lo {
        return Err(format!("{name}: need finite bounds lo <= hi and at least one point"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn text(v: &Value) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

pub fn phase_grid(family: &str, s: Axis, t: Axis) -> Result<String, String> {
    let family: FamilyTemplate = serde_json::from_str(family).map_err(|e| format!("family: {e}"))?;
    let (s, t) = (linspace(s, "s")?, linspace(t, "t")?);
    if s.len() * t.len() > MAX_GRID_POINTS {
        return Err(format!("grid has {} points; the limit is {MAX_GRID_POINTS}", s.len() * t.len()));
    }
    let cells: Vec<Value> = s
        .iter()
        .flat_map(|&s| t.iter().map(move |&t| (s, t)))
        .map(|(s, t)| match phase_point(&family, s, t).profile {
            Ok(p) => json!({
                "s": s, "t": t,
                "regime": p.regime.to_string(),
                "gamma": p.gamma, "kappa": p.kappa, "c": p.c,
                "w0": p.weights.map(|w| w.0),
            }),
            Err(e) => json!({"s": s, "t": t, "regime": "invalid", "error": e}),
        })
        .collect();
    Ok(text(&json!({"s": s, "t": t, "cells": cells})))
}

fn fit(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 || y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn beta_sweep(potential: &str, lo: f64, hi: f64, n: usize) -> Result<String, String> {
    let r = PotentialSpec::from_json(potential)
        .and_then(|s| s.to_reduced())
        .map_err(|e| e.to_string())?;
    if lo.is_nan() || lo <= 0.0 {
        return Err("beta must be positive".into());
    }
    if n > MAX_SWEEP_POINTS {
        return Err(format!("{n} points; the limit is {MAX_SWEEP_POINTS}"));
    }
    let betas = linspace((lo, hi, n), "beta")?;
    let mut rows = Vec::with_capacity(betas.len());
    let (mut lam, mut ratio) = (Vec::new(), Vec::new());
    for &beta in &betas {
        let sd = solve_lambda(&r, beta, DEFAULT_TOL).map_err(|e| format!("beta {beta}: {e}"))?;
        let g = GibbsMeasure::new(&r, &sd).map_err(|e| e.to_string())?;
        lam.push(-sd.loglam1);
        ratio.push(-g.log_mu_ratio());
        rows.push(json!({"beta": beta, "loglam1": sd.loglam1, "mu0": g.mu0(), "mu1": g.mu1(), "log_mu_ratio": g.log_mu_ratio()}));
    }
    let prof = profile(&r).ok();
    Ok(text(&json!({
        "rows": rows,
        "fits": {"lambda_minus_one": fit(&betas, &lam), "mu_ratio": fit(&betas, &ratio)},
        "profile": prof.map(|p| json!({
            "regime": p.regime.to_string(),
            "gamma": p.gamma,
            "kappa": p.kappa,
            "w0": p.weights.map(|w| w.0),
            "rates": p.rates,
        })),
    })))
}

pub fn nonselection(schedule: &str) -> Result<String, String> {
    let params = if schedule.trim().is_empty() {
        desk_schedule()
    } else {
        StageParams::from_json(schedule).map_err(|e| e.to_string())?
    };
    let report = check_rules(&params, &Thresholds::default());
    if !report.passed {
        return Ok(text(&json!({"rules": report, "experiment": null})));
    }
    let exp = oscillation_experiment(&params).map_err(|e| e.to_string())?;
    Ok(text(&json!({"rules": report, "experiment": exp})))
}

pub fn presets() -> String {
    text(&json!({
        "families": {
            "plateau vs tail": {"h0": {"tail": 1.0}, "h1": {"head": "s", "head_len": 1, "tail": "t"}},
            "two constants": {"h0": {"tail": "s"}, "h1": {"tail": "t"}},
            "two plateaus": {"h0": {"head": "s", "head_len": 2, "tail": 1.5}, "h1": {"head": "t", "head_len": 1, "tail": 2.0}},
        },
        "potentials": {
            "golden": {"kind": "reduced", "H0": {"tail": 1.0}, "H1": {"plateaus": [[1, 1.0]], "tail": 3.0}},
            "select one": {"kind": "reduced", "H0": {"tail": 1.0}, "H1": {"plateaus": [[1, 0.2]], "tail": 3.0}},
            "coincidence two": {"kind": "reduced", "H0": {"tail": 1.0}, "H1": {"plateaus": [[2, 1.0]], "tail": 3.0}},
        },
        "schedule": desk_schedule(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace((1.0, 2.0, 5), "x").unwrap();
        assert_eq!(v, [1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(linspace((2.0, 1.0, 3), "x").is_err());
        assert!(linspace((0.0, 1.0, 0), "x").is_err());
    }
}
