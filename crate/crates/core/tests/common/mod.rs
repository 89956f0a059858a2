#![allow(dead_code)]

use std::path::PathBuf;

use dwt_core::potential::PotentialSpec;
use dwt_core::{PlateauSeq, ReducedPotential};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> ReducedPotential {
    PotentialSpec::from_json(&fixture_text(name)).unwrap().to_reduced().unwrap()
}

/// Every potential fixture, by file name.
pub fn fixture_set() -> Vec<(&'static str, ReducedPotential)> {
    [
        "golden.json",
        "selectone.json",
        "kappa2.json",
        "constant_equal.json",
        "constant_unequal.json",
        "mixed.json",
        "general.json",
    ]
    .into_iter()
    .map(|n| (n, fixture(n)))
    .collect()
}

/// All binary words with lengths in `1..=max_len`, shortest first.
pub fn words(max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u32 << len) {
            out.push(format!("{:0width$b}", bits, width = len));
        }
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `20, 25, ..., 100`
pub fn beta_grid() -> Vec<f64> {
    (0..=16).map(|i| 20.0 + 5.0 * i as f64).collect()
}

fn random_seq(rng: &mut impl Rng, allow_zero_tail: bool) -> PlateauSeq {
    let plateaus: Vec<(u64, f64)> = (0..rng.gen_range(0..4))
        .map(|_| (rng.gen_range(1..6), (rng.gen_range(1..=40) as f64) * 0.05))
        .collect();
    if allow_zero_tail && rng.gen_bool(0.3) {
        let plateaus = if plateaus.is_empty() { vec![(1, 0.5)] } else { plateaus };
        return PlateauSeq::new(plateaus, 0.0).unwrap().with_limit_level(0.01).unwrap();
    }
    PlateauSeq::new(plateaus, (rng.gen_range(1..=40) as f64) * 0.05).unwrap()
}

/// A valid reduced potential with values on a 0.05 grid, so that ties
/// between the exponents occur with positive probability.
pub fn random_potential(rng: &mut impl Rng, allow_zero_tail: bool) -> ReducedPotential {
    let zero_tails = allow_zero_tail && rng.gen_bool(0.2);
    let h0 = random_seq(rng, zero_tails);
    let h1 = random_seq(rng, zero_tails);
    ReducedPotential::new(h0, h1).unwrap()
}
