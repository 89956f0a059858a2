//! Peierls barriers from the two fixed points, the identities relating them
//! to the exponent γ, and calibrated sub-actions through the Lax-Oleinik
//! operator.
//!
//! The ergodic minimum of a reduced potential is 0 (both fixed points have
//! zero energy), so the Lax-Oleinik operator carries no additive constant.

use serde::{Deserialize, Serialize};

use crate::asymptotics::exponents;
use crate::classes::{ClassRef, ClassTable, SubactionTable};
use crate::error::{Error, Result};
use crate::potential::{ReducedPotential, Side};

/// Barriers `h(0^∞, ·)` and `h(1^∞, ·)` on the classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierTable {
    pub from_fix0: ClassTable,
    pub from_fix1: ClassTable,
    /// `liminf_{x → 0^∞} h(x, 0^∞) = Hmin⁰ + H∞¹`
    pub liminf0: f64,
    /// `liminf_{x → 1^∞} h(x, 1^∞) = Hmin¹ + H∞⁰`
    pub liminf1: f64,
    pub identities: Identities,
}

/// The three barrier quantities whose minimum is γ, and the nonselection flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Identities {
    /// `(h(0^∞, 1^∞) + h(1^∞, 0^∞)) / 2`
    pub half_round_trip: f64,
    /// `liminf h(x, 0^∞)`
    pub liminf_to_fix0: f64,
    /// `liminf h(x, 1^∞)`
    pub liminf_to_fix1: f64,
    /// `h(0^∞, 1^∞) = h(1^∞, 0^∞) = 0`
    pub nonselection: bool,
}

impl Identities {
    pub fn min(&self) -> f64 {
        self.half_round_trip.min(self.liminf_to_fix0).min(self.liminf_to_fix1)
    }
}

pub fn corollary_identities(r: &ReducedPotential) -> Identities {
    let d = r.derived();
    let [half, to0, to1] = exponents(&d);
    Identities {
        half_round_trip: half,
        liminf_to_fix0: to0,
        liminf_to_fix1: to1,
        nonselection: d.hinf0 == 0.0 && d.hinf1 == 0.0,
    }
}

/// `h(s^∞, ·)` on classes `n <= len`.
fn barrier_from(r: &ReducedPotential, from: Side, len: usize) -> ClassTable {
    // Leaving s^∞ for the other side through s s̄^k s costs H^s_k.
    let h = r.h(from);
    let same = vec![0.0; len];
    let other: Vec<f64> = (1..=len as u64).map(|n| h.inf_from(n)).collect();
    let table = ClassTable { zero: same, one: other, fix0: 0.0, fix1: h.tail() };
    match from {
        Side::Zero => table,
        Side::One => table.swapped(),
    }
}

/// The barrier table on classes `n <= len` (extended past the head).
pub fn barrier(r: &ReducedPotential, len: usize) -> BarrierTable {
    let len = len.max(r.head_len() as usize + 1);
    let identities = corollary_identities(r);
    BarrierTable {
        from_fix0: barrier_from(r, Side::Zero, len),
        from_fix1: barrier_from(r, Side::One, len),
        liminf0: identities.liminf_to_fix0,
        liminf1: identities.liminf_to_fix1,
        identities,
    }
}

fn check_len(r: &ReducedPotential, v: &SubactionTable) -> Result<()> {
    if (v.len() as u64) <= r.head_len() {
        return Err(Error::InvalidPotential(format!(
            "sub-action table of length {} must extend past the head (length {})",
            v.len(),
            r.head_len()
        )));
    }
    Ok(())
}

/// One application of the Lax-Oleinik operator
/// `(TV)(y) = min_{σx = y} V(x) + H(x)`, class by class.
pub fn lax_oleinik_step(r: &ReducedPotential, v: &SubactionTable) -> Result<SubactionTable> {
    check_len(r, v)?;
    let len = v.len();
    let step = |side: Side| -> Vec<f64> {
        let other = side.other();
        // preimage s·y stays in the run class; preimage s̄·y lands in [s̄ s] and costs H^{s̄}_n
        let entry = v.get(ClassRef::run(other, 1));
        (1..=len as u64)
            .map(|n| {
                let stay = v.get(ClassRef::run(side, n + 1));
                stay.min(entry + r.h(other).value(n))
            })
            .collect()
    };
    Ok(ClassTable {
        zero: step(Side::Zero),
        one: step(Side::One),
        fix0: v.fix0.min(v.get(ClassRef::One(1)) + r.h1().tail()),
        fix1: v.fix1.min(v.get(ClassRef::Zero(1)) + r.h0().tail()),
    })
}

/// Iterates the Lax-Oleinik operator from `v0` until the sup-change is at
/// most `tol`, then shifts the result so its minimum is 0.
pub fn solve_calibrated(
    r: &ReducedPotential,
    v0: &SubactionTable,
    max_iter: usize,
    tol: f64,
) -> Result<SubactionTable> {
    let mut v = v0.clone();
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let next = lax_oleinik_step(r, &v)?;
        change = next.sup_distance(&v);
        v = next;
        if change <= tol {
            return Ok(v.min_normalized());
        }
    }
    Err(Error::Divergence { iterations: max_iter, last_change: change })
}

/// A starting table that fixes the two fixed-point values and puts every
/// other class far above them.
pub fn boundary_seed(r: &ReducedPotential, fix0: f64, fix1: f64, len: usize) -> SubactionTable {
    let len = len.max(r.head_len() as usize + 1);
    let high = fix0.max(fix1) + r.h0().max_value() + r.h1().max_value() + 1.0;
    ClassTable { zero: vec![high; len], one: vec![high; len], fix0, fix1 }
}

/// `V(y) = min{V(0^∞) + h(0^∞, y), V(1^∞) + h(1^∞, y)}` over the two
/// minimizing fixed points.
pub fn representation_formula(b: &BarrierTable, fix0: f64, fix1: f64) -> SubactionTable {
    let len = b.from_fix0.len().min(b.from_fix1.len());
    let at = |class: ClassRef| (fix0 + b.from_fix0.get(class)).min(fix1 + b.from_fix1.get(class));
    ClassTable {
        zero: (1..=len as u64).map(|n| at(ClassRef::Zero(n))).collect(),
        one: (1..=len as u64).map(|n| at(ClassRef::One(n))).collect(),
        fix0: at(ClassRef::Fix0),
        fix1: at(ClassRef::Fix1),
    }
}

/// Largest violation of `V(σx) <= V(x) + H(x)` over all class transitions
/// (0 or negative when `V` is a sub-action).
pub fn subaction_violation(r: &ReducedPotential, v: &SubactionTable) -> f64 {
    let len = v.len().max(r.head_len() as usize + 1) as u64;
    let mut worst = f64::NEG_INFINITY;
    for side in Side::BOTH {
        let other = side.other();
        for n in 1..=len {
            // [s^{n+1} s̄] -> [s^n s̄] at zero cost
            worst = worst.max(v.get(ClassRef::run(side, n)) - v.get(ClassRef::run(side, n + 1)));
            // [s̄ s^n s̄] ⊂ [s̄ s] -> [s^n s̄] at cost H^{s̄}_n
            worst = worst.max(
                v.get(ClassRef::run(side, n)) - v.get(ClassRef::run(other, 1)) - r.h(other).value(n),
            );
        }
        // s̄ s^∞ -> s^∞
        worst = worst.max(
            v.get(ClassRef::fixed(side)) - v.get(ClassRef::run(other, 1)) - r.h(other).tail(),
        );
    }
    worst
}
