//! Log-space evaluation of the two fundamental series of a reduced potential,
//!
//! ```text
//! F(λ)  = Σ_{k≥1} λ^{-k} exp(-β H_k)
//! F̃(λ) = Σ_{k≥1} k λ^{-k} exp(-β H_k)
//! ```
//!
//! Everything is parametrised by `t = ln(λ - 1)`. Each plateau contributes a
//! closed-form partial geometric sum and the constant tail a closed-form
//! remainder, so the result has no truncation error. The closed forms are
//! written so that they stay accurate when `λ - 1` underflows.

use std::iter::Sum;
use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PlateauSeq, ReducedPotential, Side};

/// The natural logarithm of a nonnegative quantity; `-∞` encodes zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogValue(pub f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_value(x: f64) -> LogValue {
        assert!(x >= 0.0, "LogValue holds nonnegative quantities");
        LogValue(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        LogValue(log_add_exp(self.0, rhs.0))
    }
}

// products and quotients are sums and differences of logarithms
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 - rhs.0)
    }
}

impl Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::ZERO, |a, b| a + b)
    }
}

/// `(1 - e^{-y}) / y`, equal to 1 at 0.
fn psi(y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        -(-y).exp_m1() / y
    }
}

/// `(1 - (1 + y) e^{-y}) / y²`.
fn g_hat(y: f64) -> f64 {
    if y < 0.5 {
        // Σ_k (-1)^k (k+1) y^k / (k+2)!
        let mut term = 0.5;
        let mut sum = 0.0;
        for k in 0..30u32 {
            sum += term * f64::from(k + 1);
            term *= -y / f64::from(k + 3);
        }
        sum
    } else {
        (-(-y).exp_m1() - y * (-y).exp()) / (y * y)
    }
}

/// `(e^{-x} - 1 + x) / x²`.
fn h_hat(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_k (-1)^k x^k / (k+2)!
        let mut term = 0.5;
        let mut sum = 0.0;
        for k in 0..30u32 {
            sum += term;
            term *= -x / f64::from(k + 3);
        }
        sum
    } else {
        ((-x).exp_m1() + x) / (x * x)
    }
}

/// Quantities derived from `t = ln(λ - 1)` that every closed form needs.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Lambda {
    /// `ln(λ - 1)`
    pub t: f64,
    /// `ln λ`
    pub x: f64,
    /// `ln λ / (λ - 1)`, tends to 1 as λ → 1.
    ratio: f64,
}

impl Lambda {
    pub fn new(loglam1: f64) -> Result<Lambda> {
        if loglam1 == f64::NEG_INFINITY {
            return Err(Error::DivergentTail(0.0));
        }
        if !loglam1.is_finite() {
            return Err(Error::NumericFailure(format!("ln(lambda - 1) = {loglam1}")));
        }
        let mu = loglam1.exp();
        let x = mu.ln_1p();
        let ratio = if mu < 1e-8 { 1.0 - mu / 2.0 } else { x / mu };
        Ok(Lambda { t: loglam1, x, ratio })
    }

    #[cfg(test)]
    pub fn lambda(&self) -> f64 {
        self.x.exp()
    }

    /// `ln Σ_{j=1}^{len} λ^{-j}`
    fn log_partial(&self, len: u64) -> f64 {
        let l = len as f64;
        l.ln() + psi(l * self.x).ln() + self.ratio.ln()
    }

    /// `ln Σ_{j=1}^{len} j λ^{-j}`
    fn log_partial_weighted(&self, len: u64) -> f64 {
        let l = len as f64;
        let y = l * self.x;
        let inner = l * l * g_hat(y) + l * h_hat(self.x) * (-y).exp();
        -self.x + inner.ln() - 2.0 * psi(self.x).ln()
    }

    /// Logs of `Σ_{k>n} λ^{-k}` and `Σ_{k>n} k λ^{-k}`.
    fn log_tails(&self, n: u64) -> (f64, f64) {
        let nx = n as f64 * self.x;
        let plain = -nx - self.t;
        let weighted = log_add_exp(((n + 1) as f64).ln() + self.t, 0.0) - nx - 2.0 * self.t;
        (plain, weighted)
    }
}

/// Logs of `Σ_{k>n} λ^{-k}` and `Σ_{k>n} k λ^{-k}`, where `λ = 1 + e^{loglam1}`.
pub fn geometric_tails(loglam1: f64, n: u64) -> Result<(f64, f64)> {
    Ok(Lambda::new(loglam1)?.log_tails(n))
}

/// Adds the terms `start..start+len` at a constant value to both sums.
fn add_block(sums: &mut (LogValue, LogValue), start: u64, len: u64, value: f64, beta: f64, lam: &Lambda) {
    let shift = (start - 1) as f64;
    let level = -beta * value - shift * lam.x;
    let a = lam.log_partial(len);
    let b = lam.log_partial_weighted(len);
    sums.0 = sums.0 + LogValue(level + a);
    // Σ_{j=1}^{L} (s + j) λ^{-(s+j)} = λ^{-s} (s A + B)
    let weighted = if shift == 0.0 { b } else { log_add_exp(shift.ln() + a, b) };
    sums.1 = sums.1 + LogValue(level + weighted);
}

/// `ln Σ_{k=1}^{n} λ^{-k} e^{-β v_k}` and its index-weighted companion.
pub(crate) fn log_head_series(seq: &PlateauSeq, beta: f64, lam: &Lambda, n: u64) -> (LogValue, LogValue) {
    let mut sums = (LogValue::ZERO, LogValue::ZERO);
    let mut covered = 0;
    for seg in seq.segments().filter(|s| s.start <= n) {
        let len = seg.end().min(n) - seg.start + 1;
        add_block(&mut sums, seg.start, len, seg.value, beta, lam);
        covered = seg.start + len - 1;
    }
    if covered < n {
        add_block(&mut sums, covered + 1, n - covered, seq.tail(), beta, lam);
    }
    sums
}

/// `ln F` and `ln F̃` for one sequence, summed in ascending index order.
pub(crate) fn log_series(seq: &PlateauSeq, beta: f64, lam: &Lambda) -> (LogValue, LogValue) {
    let mut sums = (LogValue::ZERO, LogValue::ZERO);
    for seg in seq.segments() {
        add_block(&mut sums, seg.start, seg.len, seg.value, beta, lam);
    }
    let (mut f, mut ft) = sums;
    let (tail, tail_weighted) = lam.log_tails(seq.head_len());
    let level = -beta * seq.tail();
    f = f + LogValue(level + tail);
    ft = ft + LogValue(level + tail_weighted);
    (f, ft)
}

/// Range covering every admissible completion of a truncated zero tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesBracket {
    pub log_f_lo: LogValue,
    pub log_f_hi: LogValue,
    pub log_ft_lo: LogValue,
    pub log_ft_hi: LogValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub log_f: LogValue,
    pub log_ft: LogValue,
    /// Number of head indices summed exactly before the closed-form tail.
    pub head_terms: u64,
    pub bracket: Option<SeriesBracket>,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::NumericFailure(format!("beta must be positive and finite, got {beta}")))
    }
}

/// `ln F^s(λ)` and `ln F̃^s(λ)` for one side of a reduced potential.
pub fn eval_f(r: &ReducedPotential, side: Side, beta: f64, loglam1: f64) -> Result<SeriesResult> {
    check_beta(beta)?;
    let lam = Lambda::new(loglam1)?;
    let seq = r.h(side);
    let (log_f, log_ft) = log_series(seq, beta, &lam);
    let bracket = seq.limit_level().map(|level| {
        let raised = seq.with_tail(level).expect("finite level");
        let (lo, lo_t) = log_series(&raised, beta, &lam);
        SeriesBracket { log_f_lo: lo, log_f_hi: log_f, log_ft_lo: lo_t, log_ft_hi: log_ft }
    });
    Ok(SeriesResult { log_f, log_ft, head_terms: seq.head_len(), bracket })
}

/// `ln |dF^s/dλ|`; the derivative itself is negative and equals `-F̃/λ`.
pub fn eval_f_derivative(r: &ReducedPotential, side: Side, beta: f64, loglam1: f64) -> Result<LogValue> {
    let res = eval_f(r, side, beta, loglam1)?;
    let lam = Lambda::new(loglam1)?;
    Ok(LogValue(res.log_ft.0 - lam.x))
}
