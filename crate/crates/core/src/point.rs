//! Ultimately periodic points: infinite sequences of the form
//! prefix . period . period . ... over a natural-number alphabet. Every
//! point manipulated in this crate has this shape, which is what makes the
//! memberships decidable.

use std::fmt;

use num::integer::lcm;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ultimately periodic point in canonical form: the period is primitive
/// (not a repetition of a shorter word) and the prefix is as short as
/// possible (its tail is never a rotation of the period).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpPoint {
    prefix: Vec<u64>,
    period: Vec<u64>,
}

/// Primitive root of a word: the shortest w with word = w^k.
fn primitive_root(word: &[u64]) -> Vec<u64> {
    let n = word.len();
    for d in 1..=n {
        if n % d == 0 && word.chunks(d).all(|c| c == &word[..d]) {
            return word[..d].to_vec();
        }
    }
    word.to_vec()
}

impl UpPoint {
    pub fn new(prefix: &[u64], period: &[u64]) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Malformed("period must be nonempty".into()));
        }
        let mut prefix = prefix.to_vec();
        let mut period = primitive_root(period);
        // Absorb the prefix tail into the period by rotating.
        while let Some(&last) = prefix.last() {
            if last != *period.last().unwrap() {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(UpPoint { prefix, period })
    }

    /// The constant point (b, b, b, ...).
    pub fn constant(b: u64) -> Self {
        UpPoint { prefix: Vec::new(), period: vec![b] }
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn coordinate(&self, n: usize) -> u64 {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.period[(n - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first n coordinates.
    pub fn window(&self, n: usize) -> Vec<u64> {
        (0..n).map(|i| self.coordinate(i)).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.prefix.iter().chain(self.period.iter()).all(|&b| b <= 1)
    }

    pub fn max_letter(&self) -> u64 {
        self.prefix.iter().chain(self.period.iter()).copied().max().unwrap_or(0)
    }

    /// A window length after which the pointwise behavior of this point
    /// against `other` repeats; comparisons checked up to it hold forever.
    pub fn joint_window(&self, other: &UpPoint) -> usize {
        self.prefix.len().max(other.prefix.len()) + lcm(self.period.len(), other.period.len())
    }

    /// The point whose coordinates are w(0), ..., w(k-1), b, b, ... .
    pub fn from_word_tail(w: &[u64], tail: u64) -> Self {
        UpPoint::new(w, &[tail]).expect("period is nonempty")
    }

    /// Parse literals like "01(10)", "(0)", "1(0)"; letters above 9 are
    /// written comma-separated, as in "0,12(3,4)". A trailing comma forces
    /// the comma form for a lone letter, as in "40,(0)".
    pub fn parse(s: &str) -> Result<Self> {
        let open = s.find('(').ok_or_else(|| Error::Malformed(format!("missing '(' in {s:?}")))?;
        if !s.ends_with(')') {
            return Err(Error::Malformed(format!("missing ')' in {s:?}")));
        }
        let prefix = parse_word(&s[..open])?;
        let period = parse_word(&s[open + 1..s.len() - 1])?;
        UpPoint::new(&prefix, &period)
    }
}

fn parse_word(s: &str) -> Result<Vec<u64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(',') {
        s.split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().map_err(|e| Error::Malformed(e.to_string())))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(u64::from).ok_or_else(|| {
                Error::Malformed(format!("bad letter {c:?}"))
            }))
            .collect()
    }
}

fn write_word(f: &mut fmt::Formatter<'_>, w: &[u64], compact: bool) -> fmt::Result {
    for (i, letter) in w.iter().enumerate() {
        if !compact && i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{letter}")?;
    }
    Ok(())
}

impl fmt::Display for UpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.max_letter() <= 9;
        write_word(f, &self.prefix, compact)?;
        write!(f, "(")?;
        write_word(f, &self.period, compact)?;
        write!(f, ")")
    }
}

/// Coordinatewise implication x(n) = 1 => y(n) = 1 for binary points,
/// decided on the joint window.
pub fn point_subseteq(x: &UpPoint, y: &UpPoint) -> bool {
    let n = x.joint_window(y);
    (0..n).all(|i| x.coordinate(i) == 0 || y.coordinate(i) == 1)
}
