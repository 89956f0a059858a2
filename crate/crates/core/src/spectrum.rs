//! The characteristic equation `F⁰(λ) F¹(λ) = 1` and the eigendata built on
//! its root: the eigenfunction Φ, the eigenmeasure ν, the Gibbs measure μ and
//! the sub-action `V = -(1/β) ln Φ`.
//!
//! All cylinder quantities are computed in log-space relative to `ν[01] = 1`
//! and `Φ(10) = 1`; only the final normalization turns them into
//! probabilities.

use serde::{Deserialize, Serialize};

use crate::classes::{ClassRef, ClassTable, SubactionTable};
use crate::error::{Error, Result};
use crate::potential::{ReducedPotential, Side};
use crate::series::{log_add_exp, log_series, Lambda, LogValue};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_NMAX: usize = 64;
const MAX_ITERATIONS: usize = 500;

/// The root `λ_β` of the characteristic equation and the series at the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub beta: f64,
    /// `ln(λ_β - 1)`
    pub loglam1: f64,
    pub log_f0: LogValue,
    pub log_f1: LogValue,
    pub log_ft0: LogValue,
    pub log_ft1: LogValue,
    /// `|ln F⁰ + ln F¹|` at the returned root.
    pub residual: f64,
    pub iterations: usize,
    /// For a truncated potential: `ln(λ - 1)` with the truncated tails
    /// raised to their limit level, then with tails at zero. The true root
    /// of every admissible completion lies in between.
    pub loglam1_bracket: Option<(f64, f64)>,
}

impl SpectralData {
    pub fn lambda(&self) -> f64 {
        1.0 + self.loglam1.exp()
    }

    pub fn log_f(&self, side: Side) -> LogValue {
        match side {
            Side::Zero => self.log_f0,
            Side::One => self.log_f1,
        }
    }

    pub fn log_ft(&self, side: Side) -> LogValue {
        match side {
            Side::Zero => self.log_ft0,
            Side::One => self.log_ft1,
        }
    }
}

struct Point {
    t: f64,
    g: f64,
    dg: f64,
    logs: [LogValue; 4],
}

fn characteristic(r: &ReducedPotential, beta: f64, t: f64) -> Result<Point> {
    let lam = Lambda::new(t)?;
    let (f0, ft0) = log_series(r.h0(), beta, &lam);
    let (f1, ft1) = log_series(r.h1(), beta, &lam);
    let g = f0.ln() + f1.ln();
    // d ln F / dt = -((λ-1)/λ) F̃/F
    let w = t - lam.x;
    let dg = -(w + ft0.ln() - f0.ln()).exp() - (w + ft1.ln() - f1.ln()).exp();
    Ok(Point { t, g, dg, logs: [f0, f1, ft0, ft1] })
}

fn solve_core(r: &ReducedPotential, beta: f64, tol: f64) -> Result<SpectralData> {
    let (m0, m1) = (r.h0().max_value(), r.h1().max_value());
    let mut lo = -beta * (m0 + m1) / 2.0 - 1.0;
    let mut hi = 0.0;
    let at_lo = characteristic(r, beta, lo)?;
    if at_lo.g < 0.0 {
        return Err(Error::NumericFailure(format!(
            "characteristic function negative at the lower bracket ({})",
            at_lo.g
        )));
    }
    let mut point = characteristic(r, beta, hi)?;
    if point.g > tol {
        return Err(Error::NumericFailure(format!(
            "characteristic function positive at lambda = 2 ({})",
            point.g
        )));
    }
    let magnitude = beta * (m0 + m1) + lo.abs();
    let mut best_g = point.g.abs();
    let mut best = None;
    for iteration in 0..MAX_ITERATIONS {
        let g = point.g;
        if g.abs() < best_g || best.is_none() {
            best_g = g.abs();
            best = Some(iteration);
        }
        if g.abs() <= tol {
            return Ok(finish(beta, point, iteration));
        }
        if g > 0.0 {
            lo = point.t;
        } else {
            hi = point.t;
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            // No representable root left; accept if the residual is at
            // rounding level for the magnitudes involved.
            if g.abs() <= tol.max(64.0 * f64::EPSILON * magnitude) {
                return Ok(finish(beta, point, iteration));
            }
            return Err(Error::Divergence { iterations: iteration, last_change: width });
        }
        let newton = point.t - g / point.dg;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            lo + width / 2.0
        };
        point = characteristic(r, beta, next)?;
    }
    Err(Error::Divergence { iterations: MAX_ITERATIONS, last_change: hi - lo })
}

fn finish(beta: f64, p: Point, iterations: usize) -> SpectralData {
    let [f0, f1, ft0, ft1] = p.logs;
    SpectralData {
        beta,
        loglam1: p.t,
        log_f0: f0,
        log_f1: f1,
        log_ft0: ft0,
        log_ft1: ft1,
        residual: p.g.abs(),
        iterations,
        loglam1_bracket: None,
    }
}

/// Solves `F⁰_β(λ) F¹_β(λ) = 1` for `λ ∈ (1, 2]`.
///
/// Bisection on `t = ln(λ - 1)` safeguards Newton steps; the returned root has
/// `|ln F⁰ + ln F¹| <= tol` unless the bracket collapses first, in which case
/// the residual must be at rounding level.
pub fn solve_lambda(r: &ReducedPotential, beta: f64, tol: f64) -> Result<SpectralData> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::NumericFailure(format!("beta must be positive and finite, got {beta}")));
    }
    if !(tol.is_finite() && tol >= 1e-14) {
        return Err(Error::NumericFailure(format!("tolerance {tol} below 1e-14")));
    }
    let mut sd = solve_core(r, beta, tol)?;
    if let Some(raised) = r.raised_tails() {
        let lower = solve_core(&raised, beta, tol)?;
        sd.loglam1_bracket = Some((lower.loglam1, sd.loglam1));
    }
    Ok(sd)
}

fn parse_word(word: &str) -> Result<&[u8]> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if word.bytes().any(|b| b != b'0' && b != b'1') {
        return Err(Error::InvalidWord(word.to_string()));
    }
    Ok(word.as_bytes())
}

fn side_of(symbol: u8) -> Side {
    if symbol == b'0' {
        Side::Zero
    } else {
        Side::One
    }
}

/// The Gibbs measure at one inverse temperature, with its eigenmeasure and
/// eigenfunction.
#[derive(Clone, Debug)]
pub struct GibbsMeasure {
    r: ReducedPotential,
    sd: SpectralData,
    lam: Lambda,
    /// `ln ∫ Φ dν` with `Φ(10) = 1` and `ν[01] = 1`.
    log_z: f64,
}

impl GibbsMeasure {
    pub fn new(r: &ReducedPotential, sd: &SpectralData) -> Result<GibbsMeasure> {
        let lam = Lambda::new(sd.loglam1)?;
        // Σ_n Φ(0^n1) ν[0^n1] = F̃¹ and Σ_n Φ(1^n0) ν[1^n0] = (F¹)² F̃⁰
        let log_z = log_add_exp(sd.log_ft1.ln(), 2.0 * sd.log_f1.ln() + sd.log_ft0.ln());
        Ok(GibbsMeasure { r: r.clone(), sd: sd.clone(), lam, log_z })
    }

    pub fn solve(r: &ReducedPotential, beta: f64) -> Result<GibbsMeasure> {
        let sd = solve_lambda(r, beta, DEFAULT_TOL)?;
        GibbsMeasure::new(r, &sd)
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.sd
    }

    pub fn potential(&self) -> &ReducedPotential {
        &self.r
    }

    /// `ln` of the series of the shifted sequence `k -> H^s_{k+n-1}`.
    fn suffix_logs(&self, side: Side, n: u64) -> (f64, f64) {
        let (f, ft) = log_series(&self.r.h(side).suffix(n), self.sd.beta, &self.lam);
        (f.ln(), ft.ln())
    }

    /// `ln Σ_{k>=n} λ^{-k} e^{-β H^s_k}`
    fn log_tail_sum(&self, side: Side, n: u64) -> f64 {
        -((n - 1) as f64) * self.lam.x + self.suffix_logs(side, n).0
    }

    /// `ln Φ(class)` relative to `Φ(10) = 1`.
    pub fn log_phi_relative(&self, class: ClassRef) -> f64 {
        let beta = self.sd.beta;
        let f1 = self.sd.log_f1.ln();
        match class {
            ClassRef::Zero(n) => self.suffix_logs(Side::One, n).0,
            ClassRef::One(n) => self.suffix_logs(Side::Zero, n).0 + f1,
            ClassRef::Fix0 => -beta * self.r.h1().tail() - self.lam.t,
            ClassRef::Fix1 => -beta * self.r.h0().tail() - self.lam.t + f1,
        }
    }

    /// `ln ν[word]` relative to `ν[01] = 1`.
    pub fn log_nu(&self, word: &str) -> Result<f64> {
        let w = parse_word(word)?;
        let x = self.lam.x;
        let f1 = self.sd.log_f1.ln();
        let mut acc = 0.0;
        let mut pos = 0;
        loop {
            let rest = &w[pos..];
            let s = side_of(rest[0]);
            let run = rest.iter().take_while(|&&b| b == rest[0]).count();
            if run == rest.len() {
                // ν[0^n] = λ^{-(n-2)} / (λ-1), ν[1^n] = F¹ λ^{-(n-2)} / (λ-1)
                let n = run as f64;
                let base = -(n - 2.0) * x - self.lam.t;
                acc += if s == Side::Zero { base } else { base + f1 };
                return Ok(acc);
            }
            if run >= 2 {
                acc -= x;
                pos += 1;
                continue;
            }
            let other = rest[1];
            let k = rest[1..].iter().take_while(|&&b| b == other).count();
            if 1 + k == rest.len() {
                // ν[0 1^k] = T⁰(k) ν[10], ν[1 0^k] = T¹(k) ν[01]
                let tail = self.log_tail_sum(s, k as u64);
                acc += if s == Side::Zero { tail + f1 } else { tail };
                return Ok(acc);
            }
            acc += -self.sd.beta * self.r.h(s).value(k as u64) - x;
            pos += 1;
        }
    }

    /// `ln μ[word]`.
    pub fn log_mu(&self, word: &str) -> Result<f64> {
        let w = parse_word(word)?;
        match ClassRef::of_word(w) {
            Some(class) => Ok(self.log_phi_relative(class) + self.log_nu(word)? - self.log_z),
            None => {
                let n = w.len() as u64;
                let shift = -((n - 1) as f64) * self.lam.x;
                Ok(if w[0] == b'0' {
                    shift + self.suffix_logs(Side::One, n).1 - self.log_z
                } else {
                    2.0 * self.sd.log_f1.ln() + shift + self.suffix_logs(Side::Zero, n).1 - self.log_z
                })
            }
        }
    }

    pub fn mu(&self, word: &str) -> Result<f64> {
        Ok(self.log_mu(word)?.exp())
    }

    pub fn mu0(&self) -> f64 {
        self.log_mu("0").expect("valid word").exp()
    }

    pub fn mu1(&self) -> f64 {
        self.log_mu("1").expect("valid word").exp()
    }

    /// `ln(μ[0] / μ[1]) = ln(F⁰ F̃¹ / (F¹ F̃⁰))`.
    pub fn log_mu_ratio(&self) -> f64 {
        self.sd.log_f0.ln() + self.sd.log_ft1.ln() - self.sd.log_f1.ln() - self.sd.log_ft0.ln()
    }
}

/// Φ on the classes, normalized so that its maximum over the whole shift is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderTables {
    /// `ln Φ` per class.
    pub log_phi: ClassTable,
    /// `ln μ[01]`
    pub log_mu01: f64,
    /// `ln ∫ Φ dν` for the normalized Φ, relative to `ν[01] = 1`.
    pub log_z: f64,
}

/// Φ on `[0^n 1]` and `[1^n 0]` for `n <= nmax` and at the fixed points.
///
/// Φ is constant past the head and monotone inside each plateau, so the
/// maximum is searched over the table, the plateau endpoints and the fixed
/// points.
pub fn eigenfunction_table(r: &ReducedPotential, sd: &SpectralData, nmax: usize) -> Result<CylinderTables> {
    let g = GibbsMeasure::new(r, sd)?;
    let nmax = nmax.max(1);
    let zero: Vec<f64> = (1..=nmax as u64).map(|n| g.log_phi_relative(ClassRef::Zero(n))).collect();
    let one: Vec<f64> = (1..=nmax as u64).map(|n| g.log_phi_relative(ClassRef::One(n))).collect();
    let fix0 = g.log_phi_relative(ClassRef::Fix0);
    let fix1 = g.log_phi_relative(ClassRef::Fix1);
    let mut max = zero.iter().chain(&one).copied().fold(fix0.max(fix1), f64::max);
    // [0^n 1] values depend on H¹, [1^n 0] values on H⁰
    for (seq_side, class_side) in [(Side::One, Side::Zero), (Side::Zero, Side::One)] {
        for seg in r.h(seq_side).segments() {
            for n in [seg.start, seg.end(), seg.end() + 1] {
                max = max.max(g.log_phi_relative(ClassRef::run(class_side, n)));
            }
        }
    }
    let log_phi = ClassTable { zero, one, fix0, fix1 }.map(|v| v - max);
    let log_mu01 = g.log_mu("01")?;
    Ok(CylinderTables { log_phi, log_mu01, log_z: g.log_z - max })
}

/// `ν[word] / ν[01]` in log form.
pub fn eigenmeasure_cylinder(r: &ReducedPotential, sd: &SpectralData, word: &str) -> Result<LogValue> {
    Ok(LogValue(GibbsMeasure::new(r, sd)?.log_nu(word)?))
}

/// `μ[word]`, using the normalization stored in `tables`.
pub fn gibbs_cylinder(r: &ReducedPotential, sd: &SpectralData, tables: &CylinderTables, word: &str) -> Result<f64> {
    let g = GibbsMeasure::new(r, sd)?;
    let w = parse_word(word)?;
    match ClassRef::of_word(w) {
        Some(class) => {
            let log_phi = match class {
                ClassRef::Zero(n) | ClassRef::One(n) if (n as usize) <= tables.log_phi.len() => {
                    tables.log_phi.get(class)
                }
                _ => g.log_phi_relative(class) - (g.log_z - tables.log_z),
            };
            Ok((log_phi + g.log_nu(word)? - tables.log_z).exp())
        }
        None => g.mu(word),
    }
}

/// `V_β = -(1/β) ln Φ_β` on the classes; its minimum is 0.
pub fn subaction_table(sd: &SpectralData, tables: &CylinderTables) -> SubactionTable {
    tables.log_phi.map(|v| 0.0 - v / sd.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PlateauSeq;

    fn golden() -> ReducedPotential {
        ReducedPotential::new(
            PlateauSeq::constant(1.0),
            PlateauSeq::new(vec![(1, 1.0)], 3.0).unwrap(),
        )
        .unwrap()
    }

    fn mixed() -> ReducedPotential {
        ReducedPotential::new(
            PlateauSeq::new(vec![(2, 0.5), (3, 1.5)], 0.8).unwrap(),
            PlateauSeq::new(vec![(1, 2.0), (1, 0.4)], 1.2).unwrap(),
        )
        .unwrap()
    }

    fn words(max_len: usize) -> Vec<String> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            for bits in 0..(1u32 << len) {
                out.push((0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' }).collect());
            }
        }
        out
    }

    #[test]
    fn constant_symmetric_closed_form() {
        let r = ReducedPotential::constant(1.0, 1.0).unwrap();
        for beta in [5.0, 10.0, 20.0] {
            let sd = solve_lambda(&r, beta, DEFAULT_TOL).unwrap();
            assert!((sd.loglam1 + beta).abs() <= 1e-12 * beta);
            let g = GibbsMeasure::new(&r, &sd).unwrap();
            assert!((g.mu0() - 0.5).abs() < 1e-12);
            assert!((g.mu1() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_asymmetric_closed_form() {
        let r = ReducedPotential::constant(1.0, 2.0).unwrap();
        let sd = solve_lambda(&r, 5.0, DEFAULT_TOL).unwrap();
        assert!((sd.loglam1 + 7.5).abs() < 1e-12);
        let g = GibbsMeasure::new(&r, &sd).unwrap();
        assert!(g.log_mu_ratio().abs() < 1e-12);
        assert!((g.mu0() / g.mu1() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_and_bounds() {
        for r in [golden(), mixed(), golden().swapped()] {
            for beta in [0.1, 1.0, 7.0, 50.0, 300.0] {
                let sd = solve_lambda(&r, beta, DEFAULT_TOL).unwrap();
                assert!(sd.residual <= 1e-12, "beta={beta} residual={}", sd.residual);
                assert!(sd.loglam1 <= 0.0);
                let bound = -beta * (r.h0().max_value() + r.h1().max_value()) / 2.0;
                assert!(sd.loglam1 >= bound);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let r = golden();
        assert!(solve_lambda(&r, 0.0, DEFAULT_TOL).is_err());
        assert!(solve_lambda(&r, f64::NAN, DEFAULT_TOL).is_err());
        assert!(solve_lambda(&r, 1.0, 1e-16).is_err());
        let g = GibbsMeasure::solve(&r, 1.0).unwrap();
        assert!(matches!(g.log_mu(""), Err(Error::EmptyWord)));
        assert!(matches!(g.log_mu("012"), Err(Error::InvalidWord(_))));
    }

    #[test]
    fn eigenfunction_product_rule() {
        let r = mixed();
        let sd = solve_lambda(&r, 3.0, DEFAULT_TOL).unwrap();
        let t = eigenfunction_table(&r, &sd, 16).unwrap();
        // Φ(01) = F¹ Φ(10) and Φ(10) = F⁰ Φ(01)
        let (p01, p10) = (t.log_phi.get(ClassRef::Zero(1)), t.log_phi.get(ClassRef::One(1)));
        assert!((p01 - p10 - sd.log_f1.ln()).abs() < 1e-12);
        assert!((p10 - p01 - sd.log_f0.ln()).abs() < 1e-12);
        assert!(t.log_phi.max().abs() < 1e-15);
    }

    #[test]
    fn symmetric_eigenfunction() {
        let s = PlateauSeq::new(vec![(3, 0.7), (2, 1.1)], 0.9).unwrap();
        let r = ReducedPotential::new(s.clone(), s).unwrap();
        let sd = solve_lambda(&r, 4.0, DEFAULT_TOL).unwrap();
        let t = eigenfunction_table(&r, &sd, 12).unwrap();
        for i in 0..12 {
            assert!((t.log_phi.zero[i] - t.log_phi.one[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_tails_put_maximum_at_fixed_point() {
        let h = PlateauSeq::new(vec![(2, 0.5), (3, 0.2)], 0.0).unwrap().with_limit_level(0.01).unwrap();
        let h1 = PlateauSeq::new(vec![(4, 0.3)], 0.0).unwrap().with_limit_level(0.01).unwrap();
        let r = ReducedPotential::new(h, h1).unwrap();
        let sd = solve_lambda(&r, 10.0, DEFAULT_TOL).unwrap();
        let t = eigenfunction_table(&r, &sd, 20).unwrap();
        assert!(t.log_phi.fix0.max(t.log_phi.fix1).abs() < 1e-12);
        let (lo, hi) = sd.loglam1_bracket.unwrap();
        assert!(lo <= sd.loglam1 && sd.loglam1 == hi);
    }

    #[test]
    fn jacobian_ratios() {
        let r = mixed();
        let sd = solve_lambda(&r, 2.5, DEFAULT_TOL).unwrap();
        let g = GibbsMeasure::new(&r, &sd).unwrap();
        let x = sd.lambda().ln();
        let nu10 = g.log_nu("10").unwrap();
        let nu01 = g.log_nu("01").unwrap();
        assert!(nu01.abs() < 1e-12);
        assert!((nu10 - sd.log_f1.ln()).abs() < 1e-12);
        for n in 1..=8usize {
            let ones = "1".repeat(n);
            let zeros = "0".repeat(n);
            let a = g.log_nu(&format!("{ones}0")).unwrap();
            assert!((a - nu10 + (n as f64 - 1.0) * x).abs() < 1e-11);
            let b = g.log_nu(&format!("{zeros}1")).unwrap();
            assert!((b - nu01 + (n as f64 - 1.0) * x).abs() < 1e-11);
            let c = g.log_nu(&format!("0{ones}0")).unwrap();
            let hc = r.h0().value(n as u64);
            assert!((c - nu10 + 2.5 * hc + n as f64 * x).abs() < 1e-11);
            let d = g.log_nu(&format!("1{zeros}1")).unwrap();
            let hd = r.h1().value(n as u64);
            assert!((d - nu01 + 2.5 * hd + n as f64 * x).abs() < 1e-11);
        }
    }

    #[test]
    fn nu_additivity() {
        let r = mixed();
        let sd = solve_lambda(&r, 1.5, DEFAULT_TOL).unwrap();
        let g = GibbsMeasure::new(&r, &sd).unwrap();
        for w in words(6) {
            let whole = g.log_nu(&w).unwrap().exp();
            let parts = g.log_nu(&format!("{w}0")).unwrap().exp() + g.log_nu(&format!("{w}1")).unwrap().exp();
            assert!(((whole - parts) / whole).abs() < 1e-11, "{w}");
        }
    }

    #[test]
    fn mu_shift_invariance_and_normalization() {
        for r in [mixed(), golden()] {
            for beta in [0.7, 4.0, 12.0] {
                let g = GibbsMeasure::solve(&r, beta).unwrap();
                assert!((g.mu0() + g.mu1() - 1.0).abs() < 1e-12);
                for w in words(6) {
                    let m = g.mu(&w).unwrap();
                    let right = g.mu(&format!("{w}0")).unwrap() + g.mu(&format!("{w}1")).unwrap();
                    let left = g.mu(&format!("0{w}")).unwrap() + g.mu(&format!("1{w}")).unwrap();
                    assert!((m - right).abs() < 1e-10, "{w}");
                    assert!((m - left).abs() < 1e-10, "{w}");
                }
                assert!((g.mu("01").unwrap() - g.mu("10").unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gibbs_ratios_from_series() {
        let r = mixed();
        let g = GibbsMeasure::solve(&r, 3.0).unwrap();
        let sd = g.spectral();
        let r0 = g.mu0() / g.mu("01").unwrap();
        let r1 = g.mu1() / g.mu("10").unwrap();
        assert!((r0.ln() - (sd.log_ft1.ln() - sd.log_f1.ln())).abs() < 1e-11);
        assert!((r1.ln() - (sd.log_ft0.ln() - sd.log_f0.ln())).abs() < 1e-11);
        assert!(((g.mu0() / g.mu1()).ln() - g.log_mu_ratio()).abs() < 1e-11);
    }

    #[test]
    fn telescoping_and_vanishing_atoms() {
        let r = mixed();
        let g = GibbsMeasure::solve(&r, 2.0).unwrap();
        let nmax = 40;
        let head: f64 = (1..=nmax).map(|n| g.mu(&format!("{}1", "0".repeat(n))).unwrap()).sum();
        let rest = g.mu(&"0".repeat(nmax + 1)).unwrap();
        assert!((head + rest - g.mu0()).abs() < 1e-10);
        let mut prev = g.mu0();
        for n in [10, 100, 1000, 5000] {
            let m = g.mu(&"0".repeat(n)).unwrap();
            assert!(m < prev);
            prev = m;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn tables_agree_with_measure() {
        let r = mixed();
        let sd = solve_lambda(&r, 2.0, DEFAULT_TOL).unwrap();
        let t = eigenfunction_table(&r, &sd, 8).unwrap();
        let g = GibbsMeasure::new(&r, &sd).unwrap();
        for w in ["01", "0010", "1101", "000", "1", "0000000000001"] {
            let a = gibbs_cylinder(&r, &sd, &t, w).unwrap();
            assert!((a - g.mu(w).unwrap()).abs() < 1e-13, "{w}");
        }
        assert!((t.log_mu01 - g.log_mu("01").unwrap()).abs() < 1e-13);
        let nu = eigenmeasure_cylinder(&r, &sd, "0110").unwrap();
        assert!((nu.0 - g.log_nu("0110").unwrap()).abs() < 1e-15);
    }

    #[test]
    fn subaction_normalized_and_in_the_class() {
        for r in [mixed(), golden()] {
            for beta in [1.0, 10.0, 60.0] {
                let sd = solve_lambda(&r, beta, DEFAULT_TOL).unwrap();
                let head = r.head_len() as usize;
                let t = eigenfunction_table(&r, &sd, head + 4).unwrap();
                let v = subaction_table(&sd, &t);
                assert_eq!(v.min(), 0.0);
                for n in 1..=6u64 {
                    let bound: f64 = (n + 1..=r.head_len() + 2).map(|k| r.variation(k)).sum();
                    assert!(v.variation(n) <= bound + 1e-9, "beta={beta} n={n}");
                }
            }
        }
    }

    #[test]
    fn golden_ratio_of_masses() {
        let g = GibbsMeasure::solve(&golden(), 40.0).unwrap();
        let target = (3.0 - 5f64.sqrt()) / 2.0;
        assert!(((g.mu0() / g.mu1()) / target - 1.0).abs() < 0.01);
    }
}
