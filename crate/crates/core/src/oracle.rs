//! Independent checks on finite-range truncations: Perron data of the block
//! transfer matrix, and Peierls barriers by enumerating connecting paths.
//!
//! Nothing here uses the series of [`crate::series`]; the only shared input
//! is the potential itself.

use serde::{Deserialize, Serialize};

use crate::classes::ClassRef;
use crate::error::{Error, Result};
use crate::potential::{PlateauSeq, ReducedPotential, Side};

pub const MAX_DEPTH: usize = 14;
const MAX_POWER_ITERATIONS: usize = 1_000_000;
const MAX_NEUMANN_TERMS: usize = 200_000;
const PATTERN_BUDGET: u64 = 1_000_000;

/// A reduced potential frozen to its limit from index `depth - 1` on, so
/// that it depends on `depth + 1` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPotential {
    depth: usize,
    reduced: ReducedPotential,
}

fn truncate_seq(seq: &PlateauSeq, keep: u64) -> Result<PlateauSeq> {
    let plateaus = seq
        .segments()
        .filter(|s| s.start <= keep)
        .map(|s| (s.end().min(keep) - s.start + 1, s.value))
        .collect();
    let out = PlateauSeq::new(plateaus, seq.tail())?.compressed();
    match seq.limit_level() {
        Some(level) => out.with_limit_level(level),
        None => Ok(out),
    }
}

impl TruncatedPotential {
    pub fn new(r: &ReducedPotential, depth: usize) -> Result<TruncatedPotential> {
        if !(2..=MAX_DEPTH).contains(&depth) {
            return Err(Error::OracleDepth(depth));
        }
        let keep = depth as u64 - 2;
        let reduced = ReducedPotential::new(truncate_seq(r.h0(), keep)?, truncate_seq(r.h1(), keep)?)?;
        Ok(TruncatedPotential { depth, reduced })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The truncation as a reduced potential, for the analytic solver.
    pub fn reduced(&self) -> &ReducedPotential {
        &self.reduced
    }

    /// Energy of the cylinder given by a word of `depth + 1` symbols, packed
    /// with the first symbol in the most significant bit.
    pub fn word_energy(&self, word: u32) -> f64 {
        let m = self.depth;
        let bit = |i: usize| (word >> (m - i)) & 1;
        let first = bit(0);
        if bit(1) == first {
            return 0.0;
        }
        let run = (1..=m).take_while(|&i| bit(i) != first).count() as u64;
        let side = if first == 0 { Side::Zero } else { Side::One };
        // a run reaching the end of the word has length >= depth: frozen value
        self.reduced.h(side).value(run)
    }
}

/// Sparse block transfer matrix: state `u` (a word of `depth` symbols) moves
/// to `(u << 1 | b) & mask` with weight `exp(-β E(u·b))`.
struct BlockMatrix {
    size: usize,
    mask: usize,
    /// `weights[2u + b]`
    weights: Vec<f64>,
}

impl BlockMatrix {
    fn new(t: &TruncatedPotential, beta: f64) -> BlockMatrix {
        let size = 1usize << t.depth;
        let mut weights = Vec::with_capacity(2 * size);
        for u in 0..size {
            for b in 0..2 {
                let word = ((u << 1) | b) as u32;
                weights.push((-beta * t.word_energy(word)).exp());
            }
        }
        BlockMatrix { size, mask: size - 1, weights }
    }

    fn next(&self, u: usize, b: usize) -> usize {
        ((u << 1) | b) & self.mask
    }

    fn is_constant(&self, u: usize) -> bool {
        u == 0 || u == self.mask
    }

    /// `y = M x`
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (u, out) in y.iter_mut().enumerate() {
            *out = self.weights[2 * u] * x[self.next(u, 0)] + self.weights[2 * u + 1] * x[self.next(u, 1)];
        }
    }

    /// `y = x M`
    fn apply_left(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (u, &xu) in x.iter().enumerate() {
            for b in 0..2 {
                y[self.next(u, b)] += xu * self.weights[2 * u + b];
            }
        }
    }

    /// `x = Σ_k (M_OO / λ)^k b / λ`, the solution of `(λ - M_OO) x = b` on the
    /// non-constant states. Entries on constant states are ignored and left 0.
    /// `None` if the series does not settle, meaning λ is not above the
    /// spectral radius of `M_OO`.
    fn neumann(&self, lambda: f64, b: &[f64], left: bool) -> Option<Vec<f64>> {
        let mut term: Vec<f64> = b.iter().map(|v| v / lambda).collect();
        term[0] = 0.0;
        term[self.mask] = 0.0;
        let mut sum = term.clone();
        let mut next = vec![0.0; self.size];
        let mut prev_norm = f64::INFINITY;
        for _ in 0..MAX_NEUMANN_TERMS {
            if left {
                self.apply_left(&term, &mut next);
            } else {
                self.apply(&term, &mut next);
            }
            next[0] = 0.0;
            next[self.mask] = 0.0;
            let mut norm: f64 = 0.0;
            let mut total: f64 = 0.0;
            for (i, v) in next.iter_mut().enumerate() {
                *v /= lambda;
                sum[i] += *v;
                norm = norm.max(*v);
                total = total.max(sum[i]);
            }
            std::mem::swap(&mut term, &mut next);
            if norm == 0.0 {
                return Some(sum);
            }
            let ratio = norm / prev_norm;
            prev_norm = norm;
            if ratio < 1.0 && norm <= 1e-16 * total && norm * ratio / (1.0 - ratio) <= 1e-17 * total {
                return Some(sum);
            }
        }
        None
    }
}

/// Perron root of a positive 2×2 matrix with its right and left vectors.
fn perron2(k: [[f64; 2]; 2]) -> (f64, [f64; 2], [f64; 2]) {
    let [[a, b], [c, d]] = k;
    let half = (a - d) / 2.0;
    let root = (half * half + b * c).sqrt();
    let rho = (a + d) / 2.0 + root;
    if a >= d {
        (rho, [half + root, c], [half + root, b])
    } else {
        (rho, [b, root - half], [c, root - half])
    }
}

/// Perron data of a truncated potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleGibbs {
    pub depth: usize,
    pub beta: f64,
    /// `ln(λ - 1)`
    pub loglam1: f64,
    /// Requested words with their measure.
    pub mu: Vec<(String, f64)>,
    pub iterations: usize,
}

impl OracleGibbs {
    pub fn lambda(&self) -> f64 {
        1.0 + self.loglam1.exp()
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.mu.iter().find(|(w, _)| w == word).map(|(_, m)| *m)
    }
}

fn cylinder_masses(depth: usize, weight: &[f64], words: &[String]) -> Result<Vec<(String, f64)>> {
    let total: f64 = weight.iter().sum();
    words
        .iter()
        .map(|w| {
            if w.is_empty() {
                return Err(Error::EmptyWord);
            }
            if w.len() > depth || w.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(Error::InvalidWord(w.clone()));
            }
            let prefix = usize::from_str_radix(w, 2).expect("binary word");
            let free = depth - w.len();
            let lo = prefix << free;
            let mass: f64 = weight[lo..lo + (1 << free)].iter().sum();
            Ok((w.clone(), mass / total))
        })
        .collect()
}

/// Gibbs data of the block transfer matrix at inverse temperature `beta`.
///
/// The two constant blocks `0^m` and `1^m` carry self-loops of weight 1, so
/// `λ - 1` is far below the resolution of λ at large β. The eigenproblem is
/// reduced to these two states: `λ - 1` is the Perron root of the 2×2
/// matrix `K(λ) = M_CO (λ - M_OO)^{-1} M_OC`, found by bracketed secant
/// steps on `ln ρ(K) - ln(λ - 1)`; the remaining vector entries follow by
/// back-substitution. All sums involved have nonnegative terms.
pub fn transfer_matrix_gibbs(t: &TruncatedPotential, beta: f64, words: &[String]) -> Result<OracleGibbs> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::NumericFailure(format!("beta must be positive and finite, got {beta}")));
    }
    let m = BlockMatrix::new(t, beta);
    let (zero, ones) = (0usize, m.mask);
    // column b of M_OC: weights of the edges entering the constant state
    let mut cols = [vec![0.0; m.size], vec![0.0; m.size]];
    for u in 0..m.size {
        if m.is_constant(u) {
            continue;
        }
        for b in 0..2 {
            let v = m.next(u, b);
            if v == zero {
                cols[0][u] += m.weights[2 * u + b];
            } else if v == ones {
                cols[1][u] += m.weights[2 * u + b];
            }
        }
    }
    // rows of M_CO: the constant state leaves by appending the other symbol
    let exits = [(m.next(zero, 1), m.weights[1]), (m.next(ones, 0), m.weights[2 * ones])];

    let kernel = |lambda: f64| -> Option<[[f64; 2]; 2]> {
        let x0 = m.neumann(lambda, &cols[0], false)?;
        let x1 = m.neumann(lambda, &cols[1], false)?;
        let row = |c: usize| {
            let (u, w) = exits[c];
            [w * x0[u], w * x1[u]]
        };
        Some([row(0), row(1)])
    };
    let residual = |tt: f64| -> Option<f64> {
        let k = kernel(1.0 + tt.exp())?;
        Some(perron2(k).0.ln() - tt)
    };

    let rmax = t.reduced();
    let mut lo = -beta * (rmax.h0().max_value() + rmax.h1().max_value()) / 2.0 - 1.0;
    let mut hi = 0.0;
    let mut f_hi = residual(hi).ok_or_else(|| Error::NumericFailure("no convergence at lambda = 2".into()))?;
    if f_hi > 0.0 {
        return Err(Error::NumericFailure("oracle root above lambda = 2".into()));
    }
    let mut f_lo = residual(lo).unwrap_or(f64::INFINITY);
    let mut iterations = 0;
    let mut side = 0i8;
    let root = loop {
        iterations += 1;
        if iterations > 400 {
            return Err(Error::Divergence { iterations, last_change: hi - lo });
        }
        let mid = if f_lo.is_finite() {
            let s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if s > lo && s < hi {
                s
            } else {
                (lo + hi) / 2.0
            }
        } else {
            (lo + hi) / 2.0
        };
        let f = residual(mid).unwrap_or(f64::INFINITY);
        if f.abs() <= 1e-15 || hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1.0) {
            break mid;
        }
        if f > 0.0 {
            lo = mid;
            f_lo = f;
            if side == 1 {
                f_hi /= 2.0;
            }
            side = 1;
        } else {
            hi = mid;
            f_hi = f;
            if side == -1 && f_lo.is_finite() {
                f_lo /= 2.0;
            }
            side = -1;
        }
    };

    let lambda = 1.0 + root.exp();
    let k = kernel(lambda).ok_or_else(|| Error::NumericFailure("kernel lost at the root".into()))?;
    let (_, r_c, l_c) = perron2(k);
    let rhs: Vec<f64> = (0..m.size).map(|u| cols[0][u] * r_c[0] + cols[1][u] * r_c[1]).collect();
    let mut right = m.neumann(lambda, &rhs, false).expect("converged at the root");
    right[zero] = r_c[0];
    right[ones] = r_c[1];
    let mut lrhs = vec![0.0; m.size];
    lrhs[exits[0].0] += l_c[0] * exits[0].1;
    lrhs[exits[1].0] += l_c[1] * exits[1].1;
    let mut left = m.neumann(lambda, &lrhs, true).expect("converged at the root");
    left[zero] = l_c[0];
    left[ones] = l_c[1];
    let weight: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a * b).collect();
    Ok(OracleGibbs {
        depth: t.depth,
        beta,
        loglam1: root,
        mu: cylinder_masses(t.depth, &weight, words)?,
        iterations,
    })
}

/// The same Perron data by plain power iteration from the uniform vector.
/// Only usable while `λ - 1` is well above machine precision.
pub fn power_iteration_gibbs(t: &TruncatedPotential, beta: f64, words: &[String]) -> Result<OracleGibbs> {
    let m = BlockMatrix::new(t, beta);
    let run = |left: bool| -> Result<(f64, Vec<f64>, usize)> {
        let mut x = vec![1.0 / m.size as f64; m.size];
        let mut y = vec![0.0; m.size];
        let mut lambda = 0.0;
        for it in 0..MAX_POWER_ITERATIONS {
            if left {
                m.apply_left(&x, &mut y);
            } else {
                m.apply(&x, &mut y);
            }
            let norm: f64 = y.iter().sum();
            y.iter_mut().for_each(|v| *v /= norm);
            let change = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let settled = (norm - lambda).abs() <= 1e-13 * norm && change <= 1e-13;
            lambda = norm;
            std::mem::swap(&mut x, &mut y);
            if settled {
                return Ok((lambda, x, it + 1));
            }
        }
        Err(Error::NumericFailure(format!("power iteration did not settle in {MAX_POWER_ITERATIONS} steps")))
    };
    let (lambda, right, it_r) = run(false)?;
    let (_, left, it_l) = run(true)?;
    let weight: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a * b).collect();
    Ok(OracleGibbs {
        depth: t.depth,
        beta,
        loglam1: (lambda - 1.0).ln(),
        mu: cylinder_masses(t.depth, &weight, words)?,
        iterations: it_r.max(it_l),
    })
}

/// Result of a path enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierEstimate {
    /// Cheapest enumerated connection.
    pub value: f64,
    /// The true barrier lies in `[value - bound, value]`.
    pub bound: f64,
    pub patterns: u64,
}

/// Run length; `None` is an infinite run.
type Run = (Side, Option<u64>);

fn merge_runs(runs: &[Run]) -> Vec<(Side, Option<u64>, usize)> {
    // (symbol, merged length, index of the first unmerged run)
    let mut merged: Vec<(Side, Option<u64>, usize)> = Vec::with_capacity(runs.len());
    for (i, &(s, len)) in runs.iter().enumerate() {
        match merged.last_mut() {
            Some(last) if last.0 == s => {
                last.1 = last.1.zip(len).map(|(a, b)| a + b);
            }
            _ => merged.push((s, len, i)),
        }
    }
    merged
}

/// Cost of entering merged run `i`: the point at the last symbol before it.
fn entry_cost(r: &ReducedPotential, merged: &[(Side, Option<u64>, usize)], i: usize) -> f64 {
    let from = merged[i - 1].0;
    match merged[i].1 {
        Some(k) => r.h(from).value(k),
        None => r.h(from).tail(),
    }
}

/// Energy of the points strictly before position `stop` of a sequence given
/// by runs. The first run extends infinitely to the left; position 0 is the
/// first symbol of the second run. Every finite run must be followed by
/// another run.
fn cost_before(r: &ReducedPotential, runs: &[Run], stop: u64) -> f64 {
    let mut starts = vec![0u64; runs.len()];
    for i in 2..runs.len() {
        starts[i] = starts[i - 1] + runs[i - 1].1.expect("only the last run is infinite");
    }
    let merged = merge_runs(runs);
    (1..merged.len())
        // the entry point sits one position before the run starts
        .filter(|&i| starts[merged[i].2] <= stop)
        .map(|i| entry_cost(r, &merged, i))
        .sum()
}

/// Energy of the whole forward orbit of the sequence made of `runs`; the
/// last run must be infinite.
pub fn orbit_cost(r: &ReducedPotential, runs: &[(Side, Option<u64>)]) -> f64 {
    let merged = merge_runs(runs);
    (1..merged.len()).map(|i| entry_cost(r, &merged, i)).sum()
}

/// Cheapest connection from the fixed point `from^∞` into `to`, enumerating
/// alternating runs between them.
///
/// With `max_block_len` beyond the head of the truncation, every run length
/// that changes the cost is covered and extra runs only add energy, so the
/// result is exact (`bound = 0`). Otherwise the only guaranteed lower bound
/// is 0.
pub fn brute_force_barrier(
    t: &TruncatedPotential,
    from: Side,
    to: ClassRef,
    max_blocks: usize,
    max_block_len: u64,
) -> Result<BarrierEstimate> {
    let r = t.reduced();
    let max_runs = 2 * max_blocks;
    let mut total: u64 = 0;
    let mut count: u64 = 1;
    for _ in 0..=max_runs {
        total = total.saturating_add(count);
        count = count.saturating_mul(max_block_len);
    }
    if total > PATTERN_BUDGET {
        return Err(Error::Budget(total));
    }
    let target: Vec<Run> = match to {
        ClassRef::Zero(n) => vec![(Side::Zero, Some(n)), (Side::One, None)],
        ClassRef::One(n) => vec![(Side::One, Some(n)), (Side::Zero, None)],
        ClassRef::Fix0 => vec![(Side::Zero, None)],
        ClassRef::Fix1 => vec![(Side::One, None)],
    };
    let mut best = f64::INFINITY;
    let mut patterns = 0u64;
    let mut lens: Vec<u64> = Vec::new();
    for runs in 0..=max_runs {
        lens.clear();
        lens.resize(runs, 1);
        loop {
            let mut seq: Vec<Run> = vec![(from, None)];
            let mut sym = from.other();
            for &l in &lens {
                seq.push((sym, Some(l)));
                sym = sym.other();
            }
            let stop: u64 = lens.iter().sum();
            seq.extend_from_slice(&target);
            best = best.min(cost_before(r, &seq, stop));
            patterns += 1;
            // next length vector, odometer style
            let mut i = 0;
            while i < runs && lens[i] == max_block_len {
                lens[i] = 1;
                i += 1;
            }
            if i == runs {
                break;
            }
            lens[i] += 1;
        }
    }
    let exact = max_block_len > r.head_len();
    Ok(BarrierEstimate { value: best, bound: if exact { 0.0 } else { best }, patterns })
}
