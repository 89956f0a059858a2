//! Double-well type potentials on the one-sided full shift over `{0, 1}`.
//!
//! A general potential is described by four sequences: `a0`, `a1` (the values
//! on `[00^n1]` and `[11^n0]`) and `b0`, `b1` (the values on `[01^n0]` and
//! `[10^n1]`). Subtracting a coboundary turns it into a reduced potential,
//! which vanishes on `[00] ∪ [11]` and is described by two sequences `H0`
//! (on `[01^n0]`) and `H1` (on `[10^n1]`).
//!
//! Every sequence is a [`PlateauSeq`]: finitely many constant runs followed by
//! a constant tail. All sums and infima over such sequences are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of plateaus a reduction may emit.
const MAX_REDUCED_PLATEAUS: u64 = 10_000_000;

/// One of the two symbols, also used to name the two sides of a potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Zero, Side::One];

    pub fn other(self) -> Side {
        match self {
            Side::Zero => Side::One,
            Side::One => Side::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }

    pub fn symbol(self) -> u8 {
        match self {
            Side::Zero => b'0',
            Side::One => b'1',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A maximal run of equal values inside the head of a [`PlateauSeq`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    /// First index covered (indices start at 1).
    pub start: u64,
    pub len: u64,
    pub value: f64,
}

impl Segment {
    /// Last index covered.
    pub fn end(&self) -> u64 {
        self.start + self.len - 1
    }
}

#[derive(Serialize, Deserialize)]
struct RawPlateauSeq {
    #[serde(default)]
    plateaus: Vec<(u64, f64)>,
    tail: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limit_level: Option<f64>,
}

/// A real sequence `(v_n)_{n >= 1}` made of finitely many plateaus followed by
/// a constant tail.
///
/// `limit_level` marks a sequence whose true tail has been truncated to `0`:
/// the values past the head are only known to lie in `[0, limit_level]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlateauSeq", into = "RawPlateauSeq")]
pub struct PlateauSeq {
    plateaus: Vec<(u64, f64)>,
    tail: f64,
    limit_level: Option<f64>,
}

impl TryFrom<RawPlateauSeq> for PlateauSeq {
    type Error = Error;

    fn try_from(raw: RawPlateauSeq) -> Result<Self> {
        let seq = PlateauSeq::new(raw.plateaus, raw.tail)?;
        match raw.limit_level {
            Some(level) => seq.with_limit_level(level),
            None => Ok(seq),
        }
    }
}

impl From<PlateauSeq> for RawPlateauSeq {
    fn from(seq: PlateauSeq) -> Self {
        RawPlateauSeq {
            plateaus: seq.plateaus,
            tail: seq.tail,
            limit_level: seq.limit_level,
        }
    }
}

impl PlateauSeq {
    pub fn new(plateaus: Vec<(u64, f64)>, tail: f64) -> Result<Self> {
        if !tail.is_finite() {
            return Err(Error::InvalidSequence(format!("tail {tail} is not finite")));
        }
        for (i, &(len, value)) in plateaus.iter().enumerate() {
            if len == 0 {
                return Err(Error::InvalidSequence(format!("plateau {i} has length 0")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidSequence(format!("plateau {i} value {value} is not finite")));
            }
        }
        let total = plateaus
            .iter()
            .try_fold(0u64, |acc, &(len, _)| acc.checked_add(len));
        if total.is_none() {
            return Err(Error::InvalidSequence("head length overflows".into()));
        }
        Ok(PlateauSeq { plateaus, tail, limit_level: None })
    }

    /// The constant sequence. Panics if `value` is not finite.
    pub fn constant(value: f64) -> Self {
        PlateauSeq::new(Vec::new(), value).expect("constant sequence must be finite")
    }

    /// Marks a zero tail as the truncation of an admissible tail with values in
    /// `[0, level]`.
    pub fn with_limit_level(mut self, level: f64) -> Result<Self> {
        if self.tail != 0.0 {
            return Err(Error::InvalidSequence(format!(
                "limit level requires a zero tail, found tail {}",
                self.tail
            )));
        }
        if !(level.is_finite() && level > 0.0) {
            return Err(Error::InvalidSequence(format!("limit level {level} must be positive")));
        }
        self.limit_level = Some(level);
        Ok(self)
    }

    pub fn plateaus(&self) -> &[(u64, f64)] {
        &self.plateaus
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn limit_level(&self) -> Option<f64> {
        self.limit_level
    }

    /// Total length of the head.
    pub fn head_len(&self) -> u64 {
        self.plateaus.iter().map(|&(len, _)| len).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        let mut start = 1u64;
        self.plateaus.iter().map(move |&(len, value)| {
            let seg = Segment { start, len, value };
            start += len;
            seg
        })
    }

    /// `v_n` for `n >= 1`.
    pub fn value(&self, n: u64) -> f64 {
        assert!(n >= 1, "sequence indices start at 1");
        let mut end = 0u64;
        for &(len, value) in &self.plateaus {
            end += len;
            if n <= end {
                return value;
            }
        }
        self.tail
    }

    pub fn min_value(&self) -> f64 {
        self.plateaus.iter().map(|p| p.1).fold(self.tail, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.plateaus.iter().map(|p| p.1).fold(self.tail, f64::max)
    }

    /// `inf_{k >= n} v_k`.
    pub fn inf_from(&self, n: u64) -> f64 {
        self.segments()
            .filter(|s| s.end() >= n)
            .map(|s| s.value)
            .fold(self.tail, f64::min)
    }

    /// `sup_{k >= n} v_k`.
    pub fn sup_from(&self, n: u64) -> f64 {
        self.segments()
            .filter(|s| s.end() >= n)
            .map(|s| s.value)
            .fold(self.tail, f64::max)
    }

    /// `sup_{j, k >= n} |v_j - v_k|`.
    pub fn oscillation_from(&self, n: u64) -> f64 {
        self.sup_from(n) - self.inf_from(n)
    }

    /// The shifted sequence `k -> v_{k + n - 1}`.
    pub fn suffix(&self, n: u64) -> PlateauSeq {
        assert!(n >= 1, "sequence indices start at 1");
        let plateaus = self
            .segments()
            .filter(|s| s.end() >= n)
            .map(|s| {
                let first = s.start.max(n);
                (s.end() - first + 1, s.value)
            })
            .collect();
        PlateauSeq { plateaus, tail: self.tail, limit_level: self.limit_level }
    }

    /// Same head, different tail. Drops any limit level.
    pub fn with_tail(&self, tail: f64) -> Result<PlateauSeq> {
        PlateauSeq::new(self.plateaus.clone(), tail)
    }

    /// Merges adjacent equal plateaus and drops trailing plateaus equal to the
    /// tail. The represented sequence is unchanged.
    pub fn compressed(&self) -> PlateauSeq {
        let mut out: Vec<(u64, f64)> = Vec::with_capacity(self.plateaus.len());
        for &(len, value) in &self.plateaus {
            match out.last_mut() {
                Some(last) if last.1 == value => last.0 += len,
                _ => out.push((len, value)),
            }
        }
        while out.last().is_some_and(|last| last.1 == self.tail) {
            out.pop();
        }
        PlateauSeq { plateaus: out, tail: self.tail, limit_level: self.limit_level }
    }

    /// `sum_{n >= 1} v_n`, infinite unless the tail is zero.
    pub fn sum(&self) -> f64 {
        if self.tail != 0.0 {
            return f64::INFINITY;
        }
        self.plateaus.iter().map(|&(len, v)| len as f64 * v).sum()
    }

    /// `sum_{n >= 1} n v_n`, infinite unless the tail is zero.
    pub fn index_weighted_sum(&self) -> f64 {
        if self.tail != 0.0 {
            return f64::INFINITY;
        }
        self.segments()
            .map(|s| {
                // sum of indices start..=end
                let (a, b) = (s.start as f64, s.end() as f64);
                s.value * (a + b) * s.len as f64 / 2.0
            })
            .sum()
    }

    /// `sum_{k >= 1} sup_{n >= 0} |v_k - v_{k+n}|`, exact.
    pub fn variation_sum(&self) -> f64 {
        self.segments()
            .map(|s| {
                let lo = self.inf_from(s.start);
                let hi = self.sup_from(s.start);
                s.len as f64 * (s.value - lo).max(hi - s.value)
            })
            .sum()
    }

    fn all_finite_nonnegative(&self) -> bool {
        self.tail >= 0.0 && self.plateaus.iter().all(|p| p.1 >= 0.0)
    }

    /// Every plateau positive, and the tail positive unless it is a marked
    /// truncation.
    pub fn is_strictly_positive(&self) -> bool {
        self.plateaus.iter().all(|p| p.1 > 0.0)
            && (self.tail > 0.0 || (self.tail == 0.0 && self.limit_level.is_some()))
    }
}

/// Exact `min/inf` and limit constants of a reduced potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub hmin0: f64,
    pub hmin1: f64,
    pub hinf0: f64,
    pub hinf1: f64,
}

impl DerivedConstants {
    pub fn hmin(&self, side: Side) -> f64 {
        match side {
            Side::Zero => self.hmin0,
            Side::One => self.hmin1,
        }
    }

    pub fn hinf(&self, side: Side) -> f64 {
        match side {
            Side::Zero => self.hinf0,
            Side::One => self.hinf1,
        }
    }
}

/// A reduced double-well potential: zero on `[00] ∪ [11]`, `H0[n]` on
/// `[01^n0]` and `H1[n]` on `[10^n1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedPotential {
    #[serde(rename = "H0")]
    h0: PlateauSeq,
    #[serde(rename = "H1")]
    h1: PlateauSeq,
}

impl ReducedPotential {
    pub fn new(h0: PlateauSeq, h1: PlateauSeq) -> Result<Self> {
        for (side, seq) in [(Side::Zero, &h0), (Side::One, &h1)] {
            if !seq.all_finite_nonnegative() {
                return Err(Error::InvalidPotential(format!("H{side} has a negative value")));
            }
            if !seq.is_strictly_positive() {
                return Err(Error::InvalidPotential(format!(
                    "H{side} must be strictly positive (a zero tail needs a limit level)"
                )));
            }
        }
        Ok(ReducedPotential { h0, h1 })
    }

    /// Both sides constant.
    pub fn constant(h0: f64, h1: f64) -> Result<Self> {
        ReducedPotential::new(PlateauSeq::new(vec![], h0)?, PlateauSeq::new(vec![], h1)?)
    }

    pub fn h(&self, side: Side) -> &PlateauSeq {
        match side {
            Side::Zero => &self.h0,
            Side::One => &self.h1,
        }
    }

    pub fn h0(&self) -> &PlateauSeq {
        &self.h0
    }

    pub fn h1(&self) -> &PlateauSeq {
        &self.h1
    }

    /// Exchange the roles of the two symbols. An involution.
    pub fn swapped(&self) -> ReducedPotential {
        ReducedPotential { h0: self.h1.clone(), h1: self.h0.clone() }
    }

    pub fn derived(&self) -> DerivedConstants {
        DerivedConstants {
            hmin0: self.h0.min_value(),
            hmin1: self.h1.min_value(),
            hinf0: self.h0.tail(),
            hinf1: self.h1.tail(),
        }
    }

    /// Longer of the two heads.
    pub fn head_len(&self) -> u64 {
        self.h0.head_len().max(self.h1.head_len())
    }

    /// True if either side carries a truncated tail.
    pub fn is_limit_approximation(&self) -> bool {
        self.h0.limit_level().is_some() || self.h1.limit_level().is_some()
    }

    /// Replace each truncated zero tail by its limit level. `None` if there is
    /// nothing to replace.
    pub fn raised_tails(&self) -> Option<ReducedPotential> {
        if !self.is_limit_approximation() {
            return None;
        }
        let raise = |seq: &PlateauSeq| match seq.limit_level() {
            Some(level) => seq.with_tail(level).expect("finite level"),
            None => seq.clone(),
        };
        Some(ReducedPotential { h0: raise(&self.h0), h1: raise(&self.h1) })
    }

    /// `var(H, n)`: the largest jump of `H` inside a cylinder of length `n`.
    pub fn variation(&self, n: u64) -> f64 {
        assert!(n >= 1, "cylinder length starts at 1");
        if n == 1 {
            // [0] contains [00] where H = 0, so the oscillation reaches down to 0.
            return self.h0.max_value().max(self.h1.max_value());
        }
        self.h0.oscillation_from(n - 1).max(self.h1.oscillation_from(n - 1))
    }

    /// `sum_{n >= 1} var(H, n)`, exact (the terms vanish past the head).
    pub fn variation_sum(&self) -> f64 {
        let last = self.head_len() + 1;
        (1..=last).map(|n| self.variation(n)).sum()
    }
}

#[derive(Deserialize)]
struct RawReduced {
    #[serde(rename = "H0")]
    h0: PlateauSeq,
    #[serde(rename = "H1")]
    h1: PlateauSeq,
}

impl<'de> Deserialize<'de> for ReducedPotential {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawReduced::deserialize(d)?;
        ReducedPotential::new(raw.h0, raw.h1).map_err(serde::de::Error::custom)
    }
}

/// A double-well potential before reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralDoubleWell {
    pub a0: PlateauSeq,
    pub a1: PlateauSeq,
    pub b0: PlateauSeq,
    pub b1: PlateauSeq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Condition number, 1 to 4.
    pub item: u8,
    pub sequence: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of checking the four double-well conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// `sum n a0[n]`
    pub weighted_sum_a0: f64,
    /// `sum n a1[n]`
    pub weighted_sum_a1: f64,
    /// `sum_k sup_n |b0[k] - b0[k+n]|`
    pub variation_b0: f64,
    pub variation_b1: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "[{tag}] item {} ({}): {}", c.item, c.sequence, c.detail)?;
        }
        Ok(())
    }
}

/// Checks conditions 1 to 4 of the double-well class and reports the exact sums.
pub fn validate_general(p: &GeneralDoubleWell) -> ValidationReport {
    let mut checks = Vec::new();
    for (name, a) in [("a0", &p.a0), ("a1", &p.a1)] {
        let ok = a.all_finite_nonnegative();
        checks.push(Check {
            item: 1,
            sequence: name.into(),
            passed: ok,
            detail: if ok { "nonnegative".into() } else { "has a negative value".into() },
        });
    }
    for (name, b) in [("b0", &p.b0), ("b1", &p.b1)] {
        let ok = b.plateaus().iter().all(|p| p.1 > 0.0) && b.tail() > 0.0;
        checks.push(Check {
            item: 2,
            sequence: name.into(),
            passed: ok,
            detail: if ok {
                "strictly positive".into()
            } else {
                format!("not strictly positive (min value {})", b.min_value())
            },
        });
    }
    let weighted_sum_a0 = p.a0.index_weighted_sum();
    let weighted_sum_a1 = p.a1.index_weighted_sum();
    for (name, s) in [("a0", weighted_sum_a0), ("a1", weighted_sum_a1)] {
        checks.push(Check {
            item: 3,
            sequence: name.into(),
            passed: s.is_finite(),
            detail: format!("sum n a_n = {s}"),
        });
    }
    let variation_b0 = p.b0.variation_sum();
    let variation_b1 = p.b1.variation_sum();
    for (name, s) in [("b0", variation_b0), ("b1", variation_b1)] {
        checks.push(Check {
            item: 4,
            sequence: name.into(),
            passed: s.is_finite(),
            detail: format!("sum_k sup_n |b_k - b_(k+n)| = {s}"),
        });
    }
    ValidationReport { checks, weighted_sum_a0, weighted_sum_a1, variation_b0, variation_b1 }
}

/// `c_n = b_n + sum_{k=1}^{n-1} a_k`, with `a` summable.
fn shifted_prefix_sum(b: &PlateauSeq, a: &PlateauSeq) -> Result<PlateauSeq> {
    let a_at = |n: u64| if n == 0 { 0.0 } else { a.value(n) };
    let end = b.head_len().max(a.head_len() + 1);
    let mut breaks: Vec<u64> = vec![1, 2];
    breaks.extend(b.segments().map(|s| s.start));
    breaks.push(b.head_len() + 1);
    breaks.extend(a.segments().map(|s| s.start + 1));
    breaks.push(a.head_len() + 2);
    breaks.retain(|&n| n <= end);
    breaks.sort_unstable();
    breaks.dedup();

    let mut plateaus = Vec::new();
    let mut emitted = 0u64;
    // prefix = sum_{k < s} a_k at the start s of each segment
    let mut prefix = 0.0;
    for (i, &s) in breaks.iter().enumerate() {
        let e = breaks.get(i + 1).map_or(end, |&next| next - 1);
        let bv = b.value(s);
        let av = a_at(s - 1);
        if av == 0.0 {
            plateaus.push((e - s + 1, bv + prefix));
            emitted += 1;
        } else {
            emitted += e - s + 1;
            if emitted > MAX_REDUCED_PLATEAUS {
                return Err(Error::InvalidPotential(format!(
                    "reduction needs more than {MAX_REDUCED_PLATEAUS} plateaus"
                )));
            }
            for n in s..=e {
                plateaus.push((1, bv + prefix + (n - s) as f64 * av));
            }
        }
        prefix += (e - s) as f64 * av + a_at(e);
    }
    let tail = b.tail() + a.sum();
    let seq = PlateauSeq::new(plateaus, tail)?.compressed();
    match b.limit_level() {
        Some(level) if tail == 0.0 => seq.with_limit_level(level),
        _ => Ok(seq),
    }
}

/// Cohomological reduction: `H0[n] = b0[n] + sum_{k<n} a1[k]` and
/// `H1[n] = b1[n] + sum_{k<n} a0[k]`.
pub fn reduce(p: &GeneralDoubleWell) -> Result<ReducedPotential> {
    let report = validate_general(p);
    if !report.passed() {
        return Err(Error::Validation(Box::new(report)));
    }
    let h0 = shifted_prefix_sum(&p.b0, &p.a1)?;
    let h1 = shifted_prefix_sum(&p.b1, &p.a0)?;
    ReducedPotential::new(h0, h1)
}

/// The potential file: either a reduced potential or a general one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Reduced {
        #[serde(rename = "H0")]
        h0: PlateauSeq,
        #[serde(rename = "H1")]
        h1: PlateauSeq,
    },
    General(GeneralDoubleWell),
}

impl PotentialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_reduced(r: &ReducedPotential) -> Self {
        PotentialSpec::Reduced { h0: r.h0.clone(), h1: r.h1.clone() }
    }

    /// Validates (and reduces, for a general potential).
    pub fn to_reduced(&self) -> Result<ReducedPotential> {
        match self {
            PotentialSpec::Reduced { h0, h1 } => ReducedPotential::new(h0.clone(), h1.clone()),
            PotentialSpec::General(g) => reduce(g),
        }
    }
}
