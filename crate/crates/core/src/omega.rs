//! Measurable subsets of Ω = [0,1) under Lebesgue measure.
//!
//! An [`IntervalSet`] is a finite union of half-open rational intervals kept
//! in canonical form: intervals are non-empty, sorted, and separated by a
//! positive gap. Structural equality is therefore set equality.
//!
//! Nonatomic splitting is realized by *leftmost carving*: the prefix of mass
//! `t` of a set `A` is the set of the leftmost points of `A` whose total length
//! is `t`. For a fixed `A` the prefixes form a nested family indexed by
//! `t in [0, measure(A)]`, which is all the constructions downstream need.
//!
//! Every boolean operation is a linear merge, O(total interval count).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    /// The whole space `[0,1)`.
    pub fn full() -> Self {
        IntervalSet {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Single interval `[left, right)`; empty when `left == right`.
    pub fn interval(left: Rational, right: Rational) -> Result<Self> {
        Self::from_intervals(vec![(left, right)])
    }

    /// Builds a canonical set from arbitrary (possibly overlapping, unsorted)
    /// half-open intervals inside `[0,1)`.
    pub fn from_intervals(mut raw: Vec<(Rational, Rational)>) -> Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        for (l, r) in &raw {
            if l < &zero || r > &one || l > r {
                return Err(Error::Domain(format!(
                    "interval [{l}, {r}) is not a subinterval of [0,1)"
                )));
            }
        }
        raw.retain(|(l, r)| l < r);
        raw.sort();
        Ok(IntervalSet {
            intervals: merge_sorted(raw),
        })
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn contains(&self, point: &Rational) -> bool {
        self.intervals.iter().any(|(l, r)| l <= point && point < r)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut all = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let take_left =
                j >= other.len() || (i < self.len() && self.intervals[i] <= other.intervals[j]);
            if take_left {
                all.push(self.intervals[i].clone());
                i += 1;
            } else {
                all.push(other.intervals[j].clone());
                j += 1;
            }
        }
        IntervalSet {
            intervals: merge_sorted(all),
        }
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let (al, ar) = &self.intervals[i];
            let (bl, br) = &other.intervals[j];
            let l = Rational::max_of(al, bl);
            let r = Rational::min_of(ar, br);
            if l < r {
                out.push((l.clone(), r.clone()));
            }
            if ar <= br {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces of two canonical sets never touch, so no merge pass is needed
        IntervalSet { intervals: out }
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut cursor = Rational::zero();
        for (l, r) in &self.intervals {
            if &cursor < l {
                out.push((cursor.clone(), l.clone()));
            }
            cursor = r.clone();
        }
        if cursor < Rational::one() {
            out.push((cursor, Rational::one()));
        }
        IntervalSet { intervals: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// Leftmost sub-set of mass `t`.
    ///
    /// Monotone in `t`: `prefix(s) ⊆ prefix(t)` for `s <= t`.
    pub fn prefix(&self, t: &Rational) -> Result<IntervalSet> {
        if t.is_negative() {
            return Err(Error::Domain(format!("prefix mass {t} is negative")));
        }
        let mut remaining = t.clone();
        let mut out = Vec::new();
        for (l, r) in &self.intervals {
            if remaining.is_zero() {
                break;
            }
            let len = r - l;
            if len <= remaining {
                remaining -= &len;
                out.push((l.clone(), r.clone()));
            } else {
                out.push((l.clone(), l + &remaining));
                remaining = Rational::zero();
            }
        }
        if !remaining.is_zero() {
            return Err(Error::Domain(format!(
                "prefix mass {t} exceeds set measure {}",
                self.measure()
            )));
        }
        Ok(IntervalSet { intervals: out })
    }

    /// Splits into consecutive leftmost slabs with the given masses.
    pub fn split(&self, weights: &[Rational]) -> Result<Vec<IntervalSet>> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::Domain(format!("split weight {w} is negative")));
        }
        let total: Rational = weights.iter().sum();
        let measure = self.measure();
        if total != measure {
            return Err(Error::Domain(format!(
                "split weights sum to {total}, set measure is {measure}"
            )));
        }
        let mut parts = Vec::with_capacity(weights.len());
        let mut idx = 0;
        // left end of the unconsumed part of intervals[idx]
        let mut cursor = self
            .intervals
            .first()
            .map(|(l, _)| l.clone())
            .unwrap_or_default();
        for w in weights {
            let mut remaining = w.clone();
            let mut part = Vec::new();
            while !remaining.is_zero() {
                let r = &self.intervals[idx].1;
                let avail = r - &cursor;
                if avail <= remaining {
                    remaining -= &avail;
                    part.push((cursor.clone(), r.clone()));
                    idx += 1;
                    if idx < self.intervals.len() {
                        cursor = self.intervals[idx].0.clone();
                    }
                } else {
                    let end = &cursor + &remaining;
                    part.push((cursor.clone(), end.clone()));
                    cursor = end;
                    remaining = Rational::zero();
                }
            }
            parts.push(IntervalSet { intervals: part });
        }
        Ok(parts)
    }

    /// Largest `s` in `[0, measure(base)]` with
    /// `measure(self ∩ base.prefix(s)) == gamma`.
    ///
    /// `s -> measure(self ∩ base.prefix(s))` is continuous, nondecreasing and
    /// piecewise linear with slopes 0 and 1, so the answer is found by walking
    /// the pieces of `self ∩ base` in base-prefix coordinates.
    pub fn inverse_prefix_mass(&self, base: &IntervalSet, gamma: &Rational) -> Result<Rational> {
        let overlap = self.intersect(base);
        let total = overlap.measure();
        if gamma.is_negative() || gamma > &total {
            return Err(Error::Domain(format!(
                "target mass {gamma} outside [0, {total}]"
            )));
        }
        let mut reached = Rational::zero();
        let mut base_offset = Rational::zero(); // base mass left of the current base interval
        let mut pieces = overlap.intervals.iter().peekable();
        for (bl, br) in &base.intervals {
            while let Some((pl, pr)) = pieces.peek() {
                if pl >= br {
                    break;
                }
                let len = pr - pl;
                if gamma < &(&reached + &len) {
                    let position = &base_offset + (pl - bl);
                    return Ok(position + (gamma - &reached));
                }
                reached += len;
                pieces.next();
            }
            base_offset += br - bl;
        }
        Ok(base_offset)
    }
}

/// Merges sorted intervals that overlap or touch.
fn merge_sorted(sorted: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(sorted.len());
    for (l, r) in sorted {
        match out.last_mut() {
            Some((_, last_r)) if &l <= last_r => {
                if &r > last_r {
                    *last_r = r;
                }
            }
            _ => out.push((l, r)),
        }
    }
    out
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(l, r)| format!("[{l},{r})"))
            .collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[&Rational; 2]> = self.intervals.iter().map(|(l, r)| [l, r]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<[Rational; 2]> = Vec::deserialize(deserializer)?;
        IntervalSet::from_intervals(pairs.into_iter().map(|[l, r]| (l, r)).collect())
            .map_err(serde::de::Error::custom)
    }
}
