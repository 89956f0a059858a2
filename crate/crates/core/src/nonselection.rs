//! A potential whose Gibbs measures swing between the two ground states.
//!
//! Both sequences are nonincreasing step functions tending to 0. The level
//! `ε_k` covers the runs `p_{k-1} < n <= p_k` on side 0 and
//! `q_{k-1} < n <= q_k` on side 1. The drop positions interleave so that at
//! the temperature `1/β_k` the zero side with the earlier drop carries less
//! mass: even stages favor `[0]`, odd stages favor `[1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PlateauSeq, ReducedPotential, Side};
use crate::series::{log_head_series, log_series, Lambda};
use crate::spectrum::{solve_lambda, GibbsMeasure, DEFAULT_TOL};

/// Largest `β_k ε_next` tolerated when the last level is truncated to 0.
pub const BRACKET_LIMIT: f64 = 0.1;

/// Drop positions, level and inverse temperature of one stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub p: u64,
    pub q: u64,
    pub eps: f64,
    pub beta: f64,
}

#[derive(Deserialize, Serialize)]
struct RawStageParams {
    stages: Vec<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_eps: Option<f64>,
}

/// A validated stage schedule.
///
/// `tail_eps` bounds the values past the last stage, which the built
/// potential truncates to 0. Without it the only admissible bound is the
/// last level itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStageParams", into = "RawStageParams")]
pub struct StageParams {
    stages: Vec<Stage>,
    tail_eps: Option<f64>,
}

impl TryFrom<RawStageParams> for StageParams {
    type Error = Error;

    fn try_from(raw: RawStageParams) -> Result<Self> {
        StageParams::new(raw.stages, raw.tail_eps)
    }
}

impl From<StageParams> for RawStageParams {
    fn from(p: StageParams) -> Self {
        RawStageParams { stages: p.stages, tail_eps: p.tail_eps }
    }
}

/// The drop positions in the order they must increase:
/// `p_0 < q_0 < q_1 < p_1 < p_2 < q_2 < ...`.
fn interleaved(stages: &[Stage]) -> Vec<(usize, Side, u64)> {
    stages
        .iter()
        .enumerate()
        .flat_map(|(k, s)| {
            if k % 2 == 0 {
                [(k, Side::Zero, s.p), (k, Side::One, s.q)]
            } else {
                [(k, Side::One, s.q), (k, Side::Zero, s.p)]
            }
        })
        .collect()
}

fn symbol(side: Side) -> char {
    match side {
        Side::Zero => 'p',
        Side::One => 'q',
    }
}

impl StageParams {
    pub fn new(stages: Vec<Stage>, tail_eps: Option<f64>) -> Result<StageParams> {
        if stages.is_empty() {
            return Err(Error::Schedule("at least one stage is required".into()));
        }
        if stages[0].p < 1 {
            return Err(Error::Schedule("p_0 must be at least 1".into()));
        }
        let order = interleaved(&stages);
        for pair in order.windows(2) {
            let ((k0, s0, a), (k1, s1, b)) = (pair[0], pair[1]);
            if a >= b {
                return Err(Error::Schedule(format!(
                    "drop positions must interleave strictly: {}_{k0} = {a} is not below {}_{k1} = {b}",
                    symbol(s0),
                    symbol(s1)
                )));
            }
        }
        for (k, s) in stages.iter().enumerate() {
            if !(s.eps.is_finite() && s.eps > 0.0) {
                return Err(Error::Schedule(format!("eps_{k} = {} must be positive", s.eps)));
            }
            if !(s.beta.is_finite() && s.beta > 0.0) {
                return Err(Error::Schedule(format!("beta_{k} = {} must be positive", s.beta)));
            }
            if k > 0 && s.eps >= stages[k - 1].eps {
                return Err(Error::Schedule(format!("eps must decrease strictly, eps_{k} = {}", s.eps)));
            }
        }
        if let Some(t) = tail_eps {
            let last = stages[stages.len() - 1].eps;
            if !(t.is_finite() && t > 0.0 && t < last) {
                return Err(Error::Schedule(format!("tail_eps = {t} must lie in (0, {last})")));
            }
        }
        Ok(StageParams { stages, tail_eps })
    }

    pub fn from_json(text: &str) -> Result<StageParams> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Number of stages.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Upper bound on the values past the last stage.
    pub fn tail_eps(&self) -> f64 {
        self.tail_eps.unwrap_or(self.stages[self.stages.len() - 1].eps)
    }

    /// The level that follows stage `k`.
    pub fn next_eps(&self, k: usize) -> f64 {
        self.stages.get(k + 1).map_or_else(|| self.tail_eps(), |s| s.eps)
    }

    /// The side stage `k` is built to favor.
    pub fn favored(k: usize) -> Side {
        if k % 2 == 0 {
            Side::Zero
        } else {
            Side::One
        }
    }
}

/// The step potential of a schedule, truncated to 0 after the last stage.
pub fn build_example(params: &StageParams) -> Result<ReducedPotential> {
    let side = |pick: fn(&Stage) -> u64| -> Result<PlateauSeq> {
        let mut prev = 0;
        let plateaus = params
            .stages()
            .iter()
            .map(|s| {
                let len = pick(s) - prev;
                prev = pick(s);
                (len, s.eps)
            })
            .collect();
        PlateauSeq::new(plateaus, 0.0)?.with_limit_level(params.tail_eps())
    };
    ReducedPotential::new(side(|s| s.p)?, side(|s| s.q)?)
}

/// Acceptance levels for the stage constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Upper bound for `p_k² e^{-β_k ε_k}` and `q_k² e^{-β_k ε_k}`.
    pub decay: f64,
    /// Upper bound for `β_k ε_{k+1}`.
    pub bracket: f64,
    /// Lower bound for `q_k / p_k` (even k) and `p_k / q_k` (odd k).
    pub ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { decay: 1e-6, bracket: BRACKET_LIMIT, ratio: 10.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
    Above,
}

/// One evaluated constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleCheck {
    pub stage: usize,
    pub quantity: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub checks: Vec<RuleCheck>,
    /// Partial sums of `Σ_{k>=1} (p_k - p_{k-1}) e^{-ε_k}`, reported only.
    pub variation_sums_p: Vec<f64>,
    /// Partial sums of `Σ_{k>=1} (q_k - q_{k-1}) e^{-ε_k}`, reported only.
    pub variation_sums_q: Vec<f64>,
    pub passed: bool,
}

impl RuleReport {
    pub fn failures(&self) -> impl Iterator<Item = &RuleCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(stage: usize, quantity: &str, value: f64, bound: Bound, threshold: f64) -> RuleCheck {
    let passed = match bound {
        Bound::AtMost => value <= threshold,
        Bound::AtLeast => value >= threshold,
        Bound::Above => value > threshold,
    };
    RuleCheck { stage, quantity: quantity.into(), value, bound, threshold, passed }
}

/// Evaluates every stage constraint against `th`.
pub fn check_rules(params: &StageParams, th: &Thresholds) -> RuleReport {
    let mut checks = Vec::new();
    let stages = params.stages();
    for (k, s) in stages.iter().enumerate() {
        let (p, q) = (s.p as f64, s.q as f64);
        let decay = |n: f64| (2.0 * n.ln() - s.beta * s.eps).exp();
        checks.push(check(k, "p^2 exp(-beta eps)", decay(p), Bound::AtMost, th.decay));
        checks.push(check(k, "q^2 exp(-beta eps)", decay(q), Bound::AtMost, th.decay));
        checks.push(check(k, "beta eps_next", s.beta * params.next_eps(k), Bound::AtMost, th.bracket));
        let ratio = if k % 2 == 0 { q / p } else { p / q };
        let name = if k % 2 == 0 { "q / p" } else { "p / q" };
        checks.push(check(k, name, ratio, Bound::AtLeast, th.ratio));
        if k > 0 {
            checks.push(check(k, "beta / beta_prev", s.beta / stages[k - 1].beta, Bound::Above, 1.0));
        }
    }
    let partial = |pick: fn(&Stage) -> u64| -> Vec<f64> {
        let mut acc = 0.0;
        stages
            .windows(2)
            .map(|w| {
                acc += (pick(&w[1]) - pick(&w[0])) as f64 * (-w[1].eps).exp();
                acc
            })
            .collect()
    };
    let passed = checks.iter().all(|c| c.passed);
    RuleReport { checks, variation_sums_p: partial(|s| s.p), variation_sums_q: partial(|s| s.q), passed }
}

/// One stage of the layout drawn with `p_k = k^{2k}`, `q_k = k^{2k+1}` for
/// even `k` (swapped for odd `k`) and `ε_k = exp(-k^{2k+1})`, kept in log
/// form since none of it fits a float past the first stages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutStage {
    pub k: u32,
    pub ln_p: f64,
    pub ln_q: f64,
    pub ln_eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicLayout {
    pub stages: Vec<LayoutStage>,
    /// Drop positions interleave strictly.
    pub ordered: bool,
    /// Some position exceeds 2^53 or some level underflows.
    pub astronomical: bool,
}

/// The symbolic layout for stages `first..first + count`. Stages below 2
/// degenerate (`0^0`, `1^k`) and are skipped.
pub fn symbolic_layout(first: u32, count: u32) -> SymbolicLayout {
    let stages: Vec<LayoutStage> = (first.max(2)..first.max(2) + count)
        .map(|k| {
            let lk = f64::from(k).ln();
            let short = f64::from(2 * k) * lk;
            let long = f64::from(2 * k + 1) * lk;
            let (ln_p, ln_q) = if k % 2 == 0 { (short, long) } else { (long, short) };
            LayoutStage { k, ln_p, ln_q, ln_eps: -long.exp() }
        })
        .collect();
    let order: Vec<f64> = stages
        .iter()
        .flat_map(|s| if s.k % 2 == 0 { [s.ln_p, s.ln_q] } else { [s.ln_q, s.ln_p] })
        .collect();
    let ordered = order.windows(2).all(|w| w[0] < w[1]);
    let max_pos = 53.0 * std::f64::consts::LN_2;
    let astronomical = stages
        .iter()
        .any(|s| s.ln_p > max_pos || s.ln_q > max_pos || s.ln_eps < f64::MIN_POSITIVE.ln());
    SymbolicLayout { stages, ordered, astronomical }
}

/// The quantities controlling `F⁰` and `F¹` at the root for one stage:
///
/// ```text
/// α₀ = λ^p (λ-1) Σ_{n>p} λ^{-n} e^{-β H⁰_n}    θ₀ = Σ_{n<=p} λ^{-n} e^{-β H⁰_n}
/// δ  = λ^{(p+q)/2} (λ-1)
/// ```
///
/// and the same for side 1 with `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub alpha0: f64,
    pub theta0: f64,
    pub alpha1: f64,
    pub theta1: f64,
    pub delta: f64,
}

impl Diagnostics {
    pub fn compute(r: &ReducedPotential, beta: f64, loglam1: f64, p: u64, q: u64) -> Result<Diagnostics> {
        let lam = Lambda::new(loglam1)?;
        let side = |seq: &PlateauSeq, n: u64| {
            let (tail, _) = log_series(&seq.suffix(n + 1), beta, &lam);
            let (head, _) = log_head_series(seq, beta, &lam, n);
            ((lam.t + tail.ln()).exp(), head.value())
        };
        let (alpha0, theta0) = side(r.h0(), p);
        let (alpha1, theta1) = side(r.h1(), q);
        let delta = ((p as f64 + q as f64) / 2.0 * lam.x + lam.t).exp();
        Ok(Diagnostics { alpha0, theta0, alpha1, theta1, delta })
    }

    /// `e^{-β ε_next} <= α <= 1` and `θ <= (drop position) e^{-β ε}` on both
    /// sides, with a relative slack for rounding.
    pub fn within_bounds(&self, stage: &Stage, eps_next: f64) -> bool {
        let slack = 1e-12;
        let floor = (-stage.beta * eps_next).exp() * (1.0 - slack);
        let cap = (-stage.beta * stage.eps).exp() * (1.0 + slack);
        let alpha_ok = |a: f64| a >= floor && a <= 1.0 + slack;
        alpha_ok(self.alpha0)
            && alpha_ok(self.alpha1)
            && self.theta0 <= stage.p as f64 * cap
            && self.theta1 <= stage.q as f64 * cap
    }
}

/// The Gibbs measure of the built potential at `β_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub k: usize,
    pub beta: f64,
    pub p: u64,
    pub q: u64,
    pub mu0: f64,
    pub mu1: f64,
    /// `μ[0]` with the truncated tails raised to `tail_eps`, then at 0.
    pub mu0_bracket: (f64, f64),
    pub loglam1: f64,
    pub diagnostics: Diagnostics,
    pub bounds_hold: bool,
    /// `(q(λ-1) + λ) / (p(λ-1) + λ)`, the large-stage equivalent of `μ[0]/μ[1]`.
    pub ratio_equivalent: f64,
    /// `min{r/2, m(λ-1)/(2λ)}` with `r` the stage ratio and `m` the later drop,
    /// oriented toward the favored side.
    pub ratio_floor: f64,
    pub favored: Side,
    pub follows_parity: bool,
}

/// Solves stage `k` of `params` on the potential `r` built from it.
pub fn evaluate_stage(params: &StageParams, r: &ReducedPotential, k: usize) -> Result<StageResult> {
    let stage = *params
        .stages()
        .get(k)
        .ok_or_else(|| Error::Schedule(format!("no stage {k} in a schedule of {}", params.len())))?;
    let width = stage.beta * params.tail_eps();
    if width > BRACKET_LIMIT {
        return Err(Error::BracketTooWide { stage: k, width, limit: BRACKET_LIMIT });
    }
    let sd = solve_lambda(r, stage.beta, DEFAULT_TOL)?;
    let g = GibbsMeasure::new(r, &sd)?;
    let mu0_raised = match r.raised_tails() {
        Some(raised) => GibbsMeasure::solve(&raised, stage.beta)?.mu0(),
        None => g.mu0(),
    };
    let diagnostics = Diagnostics::compute(r, stage.beta, sd.loglam1, stage.p, stage.q)?;
    let bounds_hold = diagnostics.within_bounds(&stage, params.next_eps(k));
    let lambda = sd.lambda();
    let lm1 = sd.loglam1.exp();
    let (p, q) = (stage.p as f64, stage.q as f64);
    let ratio_equivalent = (q * lm1 + lambda) / (p * lm1 + lambda);
    let favored = StageParams::favored(k);
    let (short, long) = if favored == Side::Zero { (p, q) } else { (q, p) };
    let ratio_floor = (long / (2.0 * short)).min(long * lm1 / (2.0 * lambda));
    let (mu0, mu1) = (g.mu0(), g.mu1());
    let follows_parity = match favored {
        Side::Zero => mu0 > mu1,
        Side::One => mu1 > mu0,
    };
    Ok(StageResult {
        k,
        beta: stage.beta,
        p: stage.p,
        q: stage.q,
        mu0,
        mu1,
        mu0_bracket: (mu0_raised, mu0),
        loglam1: sd.loglam1,
        diagnostics,
        bounds_hold,
        ratio_equivalent,
        ratio_floor,
        favored,
        follows_parity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub stages: Vec<StageResult>,
    /// First stage from which every stage favors its designated side.
    pub alternating_from: Option<usize>,
}

/// Every stage of the schedule, in order.
pub fn oscillation_experiment(params: &StageParams) -> Result<Oscillation> {
    let r = build_example(params)?;
    let stages = (0..params.len())
        .map(|k| evaluate_stage(params, &r, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(stages))
}

/// Wraps stage results computed elsewhere (for instance in parallel).
pub fn summarize(stages: Vec<StageResult>) -> Oscillation {
    let alternating_from = stages
        .iter()
        .rposition(|s| !s.follows_parity)
        .map_or(Some(0), |i| (i + 1 < stages.len()).then_some(i + 1));
    Oscillation { stages, alternating_from }
}

/// A six-stage schedule small enough for floating point: `β_k ε_k = 200`,
/// `ε_{k+1} / ε_k = 10^{-(k+4)}` so that `β_k ε_{k+1}` falls by 10 per stage,
/// and a factor 100 between the drops inside each stage.
pub fn desk_schedule() -> StageParams {
    StageParams::from_json(include_str!("../fixtures/desk_schedule.json")).expect("bundled schedule is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stage(p: u64, q: u64, eps: f64, beta: f64) -> Stage {
        Stage { p, q, eps, beta }
    }

    #[test]
    fn ordering_enforced() {
        let bad = StageParams::new(vec![stage(1, 4, 1.0, 10.0), stage(40, 8, 0.1, 100.0)], None);
        assert!(bad.is_ok());
        // q_1 must exceed q_0 and sit below p_1
        let bad = StageParams::new(vec![stage(1, 4, 1.0, 10.0), stage(40, 3, 0.1, 100.0)], None);
        assert!(matches!(bad, Err(Error::Schedule(_))));
        let bad = StageParams::new(vec![stage(1, 4, 1.0, 10.0), stage(4, 8, 0.1, 100.0)], None);
        assert!(matches!(bad, Err(Error::Schedule(_))));
        let bad = StageParams::new(vec![stage(0, 4, 1.0, 10.0)], None);
        assert!(bad.is_err());
        let bad = StageParams::new(vec![stage(1, 4, 1.0, 10.0), stage(40, 8, 1.0, 100.0)], None);
        assert!(bad.is_err());
        let bad = StageParams::new(vec![stage(1, 4, 1.0, 10.0)], Some(2.0));
        assert!(bad.is_err());
    }

    #[test]
    fn built_levels() {
        let params = StageParams::new(vec![stage(2, 5, 1.0, 10.0), stage(30, 9, 0.5, 100.0)], Some(0.1)).unwrap();
        let r = build_example(&params).unwrap();
        let h0: Vec<f64> = (1..=31).map(|n| r.h0().value(n)).collect();
        assert_eq!(&h0[..2], &[1.0, 1.0]);
        assert!(h0[2..30].iter().all(|&v| v == 0.5));
        assert_eq!(h0[30], 0.0);
        assert_eq!(r.h1().value(5), 1.0);
        assert_eq!(r.h1().value(6), 0.5);
        assert_eq!(r.h1().value(10), 0.0);
        assert_eq!(r.h0().limit_level(), Some(0.1));
    }

    #[test]
    fn rule_report_flags() {
        // ε_k = 10^{-k}, β_k = 40·10^k: β ε_next = 4
        let stages = (0..3)
            .map(|k| stage([1, 2000, 4000][k], [100, 200, 400_000][k], 10f64.powi(-(k as i32)), 40.0 * 10f64.powi(k as i32)))
            .collect();
        let report = check_rules(&StageParams::new(stages, None).unwrap(), &Thresholds::default());
        assert!(!report.passed);
        let bracket: Vec<&RuleCheck> = report.checks.iter().filter(|c| c.quantity == "beta eps_next").collect();
        assert!((bracket[0].value - 4.0).abs() < 1e-12 && !bracket[0].passed);

        let constant_beta = (0..3).map(|k| stage([1, 2000, 4000][k], [100, 200, 400_000][k], 10f64.powi(-4 * k as i32), 1e3)).collect();
        let report = check_rules(&StageParams::new(constant_beta, None).unwrap(), &Thresholds::default());
        assert!(report.failures().any(|c| c.quantity == "beta / beta_prev"));
    }

    #[test]
    fn desk_schedule_passes_rules() {
        let report = check_rules(&desk_schedule(), &Thresholds::default());
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.variation_sums_p.len(), 5);
    }

    #[test]
    fn symbolic_layout_is_astronomical() {
        let layout = symbolic_layout(2, 4);
        assert!(layout.ordered);
        assert!(layout.astronomical);
        assert_eq!(layout.stages[0].ln_p, 4.0 * 2f64.ln());
        assert_eq!(layout.stages[0].ln_eps, -32.0);
        assert!(!symbolic_layout(2, 1).astronomical);
    }

    #[test]
    fn bracket_too_wide_refused() {
        let params = StageParams::new(vec![stage(1, 10, 1.0, 50.0), stage(200, 20, 0.01, 5000.0)], None).unwrap();
        let err = oscillation_experiment(&params).unwrap_err();
        assert!(matches!(err, Error::BracketTooWide { stage: 0, .. }));
    }

    #[test]
    fn diagnostics_recombine_to_delta() {
        // δ² = (α₀ + λ^p(λ-1)θ₀)(α₁ + λ^q(λ-1)θ₁) at the root
        let params = StageParams::new(vec![stage(2, 30, 1.0, 20.0), stage(900, 60, 0.05, 400.0)], Some(1e-4)).unwrap();
        let r = build_example(&params).unwrap();
        for k in 0..2 {
            let res = evaluate_stage(&params, &r, k).unwrap();
            let d = res.diagnostics;
            let lm1 = res.loglam1.exp();
            let lambda = 1.0 + lm1;
            let a = d.alpha0 + lambda.powf(res.p as f64) * lm1 * d.theta0;
            let b = d.alpha1 + lambda.powf(res.q as f64) * lm1 * d.theta1;
            assert!(((a * b).sqrt() - d.delta).abs() < 1e-10 * d.delta, "k={k}");
            assert!(res.bounds_hold, "k={k}");
        }
    }
}

