//! Zero-temperature predictions: the exponent γ, the coincidence number κ,
//! the coefficient c, the regime, the limit weights, log-scale rates, the
//! first-order equivalents and the limit sub-action.
//!
//! The formulas assume `H∞⁰ <= H∞¹`. Inputs with the opposite order are
//! handled by swapping the symbols, computing, and swapping the answer back.

use serde::{Deserialize, Serialize};

use crate::classes::{ClassTable, SubactionTable};
use crate::error::{Error, Result};
use crate::potential::{DerivedConstants, ReducedPotential, Side};
use crate::spectrum::SpectralData;

/// Relative tolerance used to decide that an index attains the minimum.
pub const DEFAULT_KAPPA_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// The limit is the Dirac mass at one fixed point.
    SelectOne,
    /// The limit is a barycenter of both Dirac masses with weights fixed by c.
    Barycenter,
    /// `γ = 0`: convergence is not guaranteed.
    GammaZero,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::SelectOne => "SelectOne",
            Regime::Barycenter => "Barycenter",
            Regime::GammaZero => "GammaZero",
        };
        f.write_str(s)
    }
}

/// Predicted values of `lim -(1/β) ln X` as `β → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRates {
    pub lambda_minus_one: f64,
    pub f0: f64,
    pub f1: f64,
    pub ft0: f64,
    pub ft1: f64,
    /// Rate of `μ[0] / μ[1]`.
    pub mu_ratio: f64,
}

impl LogRates {
    pub fn f(&self, side: Side) -> f64 {
        match side {
            Side::Zero => self.f0,
            Side::One => self.f1,
        }
    }

    pub fn ft(&self, side: Side) -> f64 {
        match side {
            Side::Zero => self.ft0,
            Side::One => self.ft1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticProfile {
    pub gamma: f64,
    /// The three candidate exponents: `(H∞¹+H∞⁰)/2`, `Hmin⁰+H∞¹`, `Hmin¹+H∞⁰`.
    pub exponents: [f64; 3],
    /// Number of indices attaining the minimum; 0 outside the barycenter regime.
    pub kappa: u64,
    /// Positive root of `X² = κX + 1`, in the oriented frame.
    pub c: f64,
    /// True when the symbols were exchanged to get `H∞⁰ <= H∞¹`.
    pub swapped: bool,
    pub regime: Regime,
    /// Limit masses of `[0]` and `[1]` in the original labels.
    pub weights: Option<(f64, f64)>,
    pub rates: LogRates,
}

/// `[(H∞¹+H∞⁰)/2, Hmin⁰+H∞¹, Hmin¹+H∞⁰]`. The Peierls identities use the same
/// expressions, so minima agree bit for bit.
pub fn exponents(d: &DerivedConstants) -> [f64; 3] {
    [(d.hinf1 + d.hinf0) / 2.0, d.hmin0 + d.hinf1, d.hmin1 + d.hinf0]
}

/// Positive root of `X² = κX + 1`.
pub fn coefficient(kappa: u64) -> f64 {
    let k = kappa as f64;
    (k + (k * k + 4.0).sqrt()) / 2.0
}

fn rates(d: &DerivedConstants, gamma: f64) -> LogRates {
    let f = |s: Side| d.hmin(s).min(d.hinf(s) - gamma);
    let ft = |s: Side| d.hmin(s).min(d.hinf(s) - 2.0 * gamma);
    let (f0, f1, ft0, ft1) = (f(Side::Zero), f(Side::One), ft(Side::Zero), ft(Side::One));
    LogRates { lambda_minus_one: gamma, f0, f1, ft0, ft1, mu_ratio: f0 + ft1 - f1 - ft0 }
}

/// Classification with the default κ tolerance.
pub fn profile(r: &ReducedPotential) -> Result<AsymptoticProfile> {
    profile_with_tol(r, DEFAULT_KAPPA_TOL)
}

/// Classification; `kappa_tol` is relative to `max(1, γ)`.
pub fn profile_with_tol(r: &ReducedPotential, kappa_tol: f64) -> Result<AsymptoticProfile> {
    let d0 = r.derived();
    let swapped = d0.hinf0 > d0.hinf1;
    let oriented = if swapped { r.swapped() } else { r.clone() };
    let d = oriented.derived();
    let e = exponents(&d);
    let gamma = e[0].min(e[1]).min(e[2]);
    let tol = kappa_tol * gamma.max(1.0);

    let (regime, kappa, c, weights) = if gamma == 0.0 {
        (Regime::GammaZero, 0, 1.0, None)
    } else if e[0] - e[2] > tol {
        (Regime::SelectOne, 0, 1.0, Some((0.0, 1.0)))
    } else {
        let h1 = oriented.h1();
        if (h1.tail() + d.hinf0 - e[0]).abs() <= tol {
            return Err(Error::InfiniteCoincidence(h1.tail()));
        }
        let kappa = h1
            .segments()
            .filter(|s| (s.value + d.hinf0 - e[0]).abs() <= tol)
            .map(|s| s.len)
            .sum();
        let c = coefficient(kappa);
        let c2 = c * c;
        (Regime::Barycenter, kappa, c, Some((1.0 / (1.0 + c2), c2 / (1.0 + c2))))
    };
    let weights = weights.map(|(w0, w1)| if swapped { (w1, w0) } else { (w0, w1) });
    Ok(AsymptoticProfile {
        gamma,
        exponents: exponents(&d0),
        kappa,
        c,
        swapped,
        regime,
        weights,
        rates: rates(&d0, gamma),
    })
}

/// The five first-order equivalents at one solved temperature, each
/// normalized so that it tends to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equivalents {
    /// `(λ-1) e^{βγ} / c`
    pub lambda: f64,
    /// `F⁰ c e^{-β(H∞¹-H∞⁰)/2}` in the oriented frame, reported in original labels.
    pub f0: f64,
    pub f1: f64,
    pub ft0: f64,
    pub ft1: f64,
}

impl Equivalents {
    pub fn max_deviation(&self) -> f64 {
        [self.lambda, self.f0, self.f1, self.ft0, self.ft1]
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the first-order equivalents of the barycenter regime.
pub fn equivalents(r: &ReducedPotential, prof: &AsymptoticProfile, sd: &SpectralData) -> Result<Equivalents> {
    if prof.regime != Regime::Barycenter {
        return Err(Error::RegimeMismatch(format!(
            "equivalents need the barycenter regime, profile is {}",
            prof.regime
        )));
    }
    let d = if prof.swapped { r.swapped().derived() } else { r.derived() };
    let (a, b) = if prof.swapped { (Side::One, Side::Zero) } else { (Side::Zero, Side::One) };
    let beta = sd.beta;
    let lc = prof.c.ln();
    let half_gap = beta * (d.hinf1 - d.hinf0) / 2.0;
    let lambda = (sd.loglam1 + beta * prof.gamma - lc).exp();
    let fa = (sd.log_f(a).ln() + lc - half_gap).exp();
    let fta = (sd.log_ft(a).ln() + 2.0 * lc - beta * d.hinf1).exp();
    let fb = (sd.log_f(b).ln() - lc + half_gap).exp();
    let ftb = (sd.log_ft(b).ln() + 2.0 * lc - beta * d.hinf0).exp();
    Ok(if prof.swapped {
        Equivalents { lambda, f0: fb, f1: fa, ft0: ftb, ft1: fta }
    } else {
        Equivalents { lambda, f0: fa, f1: fb, ft0: fta, ft1: ftb }
    })
}

/// The uniform limit of `V_β` as `β → ∞`, on classes `n <= len` (at least
/// one past the head, so the lookup rule of [`ClassTable`] is exact).
pub fn limit_subaction(r: &ReducedPotential, prof: &AsymptoticProfile, len: usize) -> SubactionTable {
    let len = len.max(r.head_len() as usize + 1);
    if prof.gamma == 0.0 {
        return ClassTable::filled(len, 0.0);
    }
    let oriented = if prof.swapped { r.swapped() } else { r.clone() };
    let h1 = oriented.h1();
    let cap = h1.tail() - prof.gamma;
    let table = ClassTable {
        zero: (1..=len as u64).map(|n| cap.min(h1.inf_from(n))).collect(),
        one: vec![0.0; len],
        fix0: cap,
        fix1: 0.0,
    };
    if prof.swapped {
        table.swapped()
    } else {
        table
    }
}

/// A potential family over two parameters, for phase diagrams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyTemplate {
    pub h0: SideTemplate,
    pub h1: SideTemplate,
}

/// One side of a family: optional head plateau `(head_len, head)` and a tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideTemplate {
    #[serde(default)]
    pub head: Option<Param>,
    #[serde(default = "one")]
    pub head_len: u64,
    pub tail: Param,
}

fn one() -> u64 {
    1
}

/// A fixed number or one of the two grid coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Fixed(f64),
    Coord(Coord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coord {
    S,
    T,
}

impl Param {
    fn at(self, s: f64, t: f64) -> f64 {
        match self {
            Param::Fixed(v) => v,
            Param::Coord(Coord::S) => s,
            Param::Coord(Coord::T) => t,
        }
    }
}

impl SideTemplate {
    fn build(&self, s: f64, t: f64) -> Result<crate::potential::PlateauSeq> {
        let plateaus = match self.head {
            Some(p) => vec![(self.head_len, p.at(s, t))],
            None => vec![],
        };
        crate::potential::PlateauSeq::new(plateaus, self.tail.at(s, t))
    }
}

impl FamilyTemplate {
    pub fn at(&self, s: f64, t: f64) -> Result<ReducedPotential> {
        ReducedPotential::new(self.h0.build(s, t)?, self.h1.build(s, t)?)
    }
}

/// One row of a phase diagram. Invalid points carry the error message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub s: f64,
    pub t: f64,
    pub profile: std::result::Result<AsymptoticProfile, String>,
}

/// Classifies a single grid point.
pub fn phase_point(family: &FamilyTemplate, s: f64, t: f64) -> PhasePoint {
    let profile = family.at(s, t).and_then(|r| profile(&r)).map_err(|e| e.to_string());
    PhasePoint { s, t, profile }
}

/// Classifies every point of `s_values × t_values`, row-major in `s`.
pub fn phase_grid(family: &FamilyTemplate, s_values: &[f64], t_values: &[f64]) -> Vec<PhasePoint> {
    s_values
        .iter()
        .flat_map(|&s| t_values.iter().map(move |&t| phase_point(family, s, t)))
        .collect()
}
