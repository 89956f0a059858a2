//! The partition of the shift into classes `[0^n 1]`, `[1^n 0]` and the two
//! fixed points, and tables of one real number per class.

use serde::{Deserialize, Serialize};

use crate::potential::Side;

/// A class of the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassRef {
    /// `[0^n 1]`, `n >= 1`
    Zero(u64),
    /// `[1^n 0]`, `n >= 1`
    One(u64),
    /// the fixed point `0^∞`
    Fix0,
    /// the fixed point `1^∞`
    Fix1,
}

impl ClassRef {
    /// The class of sequences starting with exactly `n` copies of `side`.
    pub fn run(side: Side, n: u64) -> ClassRef {
        match side {
            Side::Zero => ClassRef::Zero(n),
            Side::One => ClassRef::One(n),
        }
    }

    pub fn fixed(side: Side) -> ClassRef {
        match side {
            Side::Zero => ClassRef::Fix0,
            Side::One => ClassRef::Fix1,
        }
    }

    /// The leading symbol of every point in the class.
    pub fn side(self) -> Side {
        match self {
            ClassRef::Zero(_) | ClassRef::Fix0 => Side::Zero,
            ClassRef::One(_) | ClassRef::Fix1 => Side::One,
        }
    }

    /// Exchange the two symbols.
    pub fn swapped(self) -> ClassRef {
        match self {
            ClassRef::Zero(n) => ClassRef::One(n),
            ClassRef::One(n) => ClassRef::Zero(n),
            ClassRef::Fix0 => ClassRef::Fix1,
            ClassRef::Fix1 => ClassRef::Fix0,
        }
    }

    /// The class of a nonempty finite word, when the word determines it.
    pub fn of_word(word: &[u8]) -> Option<ClassRef> {
        let first = *word.first()?;
        let run = word.iter().take_while(|&&b| b == first).count();
        if run == word.len() {
            return None;
        }
        let side = if first == b'0' { Side::Zero } else { Side::One };
        Some(ClassRef::run(side, run as u64))
    }
}

impl std::fmt::Display for ClassRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassRef::Zero(n) => write!(f, "[0^{n}1]"),
            ClassRef::One(n) => write!(f, "[1^{n}0]"),
            ClassRef::Fix0 => write!(f, "0^inf"),
            ClassRef::Fix1 => write!(f, "1^inf"),
        }
    }
}

/// One value per class: `zero[n-1]` on `[0^n 1]`, `one[n-1]` on `[1^n 0]`,
/// and the two fixed-point values.
///
/// Classes past the end of a vector take the fixed-point value of the same
/// side. This is exact whenever the vectors are longer than the head of the
/// potential they were computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTable {
    pub zero: Vec<f64>,
    pub one: Vec<f64>,
    pub fix0: f64,
    pub fix1: f64,
}

/// Sub-action tables share the class layout.
pub type SubactionTable = ClassTable;

impl ClassTable {
    pub fn filled(len: usize, value: f64) -> ClassTable {
        ClassTable { zero: vec![value; len], one: vec![value; len], fix0: value, fix1: value }
    }

    /// Length of the shorter of the two vectors.
    pub fn len(&self) -> usize {
        self.zero.len().min(self.one.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, class: ClassRef) -> f64 {
        let pick = |v: &[f64], n: u64, fix: f64| {
            assert!(n >= 1, "class index starts at 1");
            v.get((n - 1) as usize).copied().unwrap_or(fix)
        };
        match class {
            ClassRef::Zero(n) => pick(&self.zero, n, self.fix0),
            ClassRef::One(n) => pick(&self.one, n, self.fix1),
            ClassRef::Fix0 => self.fix0,
            ClassRef::Fix1 => self.fix1,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.zero.iter().chain(&self.one).copied().chain([self.fix0, self.fix1])
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ClassTable {
        ClassTable {
            zero: self.zero.iter().map(|&v| f(v)).collect(),
            one: self.one.iter().map(|&v| f(v)).collect(),
            fix0: f(self.fix0),
            fix1: f(self.fix1),
        }
    }

    /// Subtract the minimum so that the smallest entry is 0.
    pub fn min_normalized(&self) -> ClassTable {
        let m = self.min();
        self.map(|v| v - m)
    }

    pub fn sup_distance(&self, other: &ClassTable) -> f64 {
        let len = self.len().max(other.len()) as u64;
        let mut d = (self.fix0 - other.fix0).abs().max((self.fix1 - other.fix1).abs());
        for n in 1..=len {
            d = d.max((self.get(ClassRef::Zero(n)) - other.get(ClassRef::Zero(n))).abs());
            d = d.max((self.get(ClassRef::One(n)) - other.get(ClassRef::One(n))).abs());
        }
        d
    }

    /// Exchange the roles of the two symbols.
    pub fn swapped(&self) -> ClassTable {
        ClassTable { zero: self.one.clone(), one: self.zero.clone(), fix0: self.fix1, fix1: self.fix0 }
    }

    /// `var(V, n)`: the largest jump of `V` inside a cylinder of length `n`.
    /// Only the cylinders `[0^n]` and `[1^n]` contain more than one class.
    pub fn variation(&self, n: u64) -> f64 {
        assert!(n >= 1, "cylinder length starts at 1");
        let len = self.len() as u64;
        let mut worst: f64 = 0.0;
        for side in Side::BOTH {
            let fix = self.get(ClassRef::fixed(side));
            let (mut lo, mut hi) = (fix, fix);
            for k in n..=len.max(n) {
                let v = self.get(ClassRef::run(side, k));
                lo = lo.min(v);
                hi = hi.max(v);
            }
            worst = worst.max(hi - lo);
        }
        worst
    }
}
