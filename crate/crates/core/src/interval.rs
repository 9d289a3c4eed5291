//! Exact closed intervals and normalized finite unions of them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A closed interval `[lo, hi]`; points are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval {
                lo: rational::format(&lo),
                hi: rational::format(&hi),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `{scale * x + shift}`; orientation flips when `scale < 0`.
    pub fn affine(&self, scale: &Rational, shift: &Rational) -> Interval {
        let a = scale * &self.lo + shift;
        let b = scale * &self.hi + shift;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rational::int(2)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [rational::format(&self.lo), rational::format(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = rational::parse(&lo).map_err(D::Error::custom)?;
        let hi = rational::parse(&hi).map_err(D::Error::custom)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

/// Sorted, pairwise separated closed intervals. Touching intervals are merged,
/// so consecutive members are always separated by a gap of positive length.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn from_interval(i: Interval) -> Self {
        IntervalSet { intervals: vec![i] }
    }

    /// Sorts and merges overlapping or touching intervals.
    pub fn normalize(raw: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = raw.into_iter().collect();
        v.sort_by(|x, y| x.lo.cmp(&y.lo).then_with(|| x.hi.cmp(&y.hi)));
        IntervalSet {
            intervals: merge_sorted(v),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn into_intervals(self) -> Vec<Interval> {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn hull(&self) -> Option<Interval> {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(f), Some(l)) => Some(Interval {
                lo: f.lo.clone(),
                hi: l.hi.clone(),
            }),
            _ => None,
        }
    }

    pub fn total_length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, i| acc + i.length())
    }

    /// Index of the member containing `x`.
    pub fn position(&self, x: &Rational) -> Option<usize> {
        let idx = self.intervals.partition_point(|i| &i.lo <= x);
        if idx == 0 {
            return None;
        }
        self.intervals[idx - 1].contains(x).then_some(idx - 1)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.position(x).is_some()
    }

    pub fn component_containing(&self, x: &Rational) -> Option<&Interval> {
        self.position(x).map(|i| &self.intervals[i])
    }

    /// True when `other` lies inside a single member.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.component_containing(&other.lo)
            .is_some_and(|c| c.contains_interval(other))
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|i| other.contains_interval(i))
    }

    /// Bounded gaps as `(c, d)` records: `c` is the right end of the left
    /// neighbour and `d` the left end of the right neighbour.
    pub fn gaps(&self) -> Vec<Interval> {
        self.intervals
            .windows(2)
            .map(|w| Interval {
                lo: w[0].hi.clone(),
                hi: w[1].lo.clone(),
            })
            .collect()
    }

    pub fn affine_image(&self, scale: &Rational, shift: &Rational) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::ZeroScale);
        }
        let mut v: Vec<Interval> = self
            .intervals
            .iter()
            .map(|i| i.affine(scale, shift))
            .collect();
        if scale.is_negative() {
            v.reverse();
        }
        Ok(IntervalSet { intervals: v })
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::normalize(self.intervals.iter().chain(other.intervals.iter()).cloned())
    }

    /// `{x - y : x in self, y in other}`.
    pub fn minkowski_diff(&self, other: &IntervalSet) -> Result<IntervalSet> {
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptyOperand);
        }
        let negated = other.affine_image(&rational::int(-1), &Rational::zero())?;
        Ok(minkowski_sum_nonempty(self, &negated))
    }

    /// `{x + y : x in self, y in other}`.
    pub fn minkowski_sum(&self, other: &IntervalSet) -> Result<IntervalSet> {
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptyOperand);
        }
        Ok(minkowski_sum_nonempty(self, other))
    }

    /// Closures of the pieces of `self \ other` and `other \ self`.
    pub fn symmetric_difference(&self, other: &IntervalSet) -> Vec<Interval> {
        let mut out = subtract(self, other);
        out.extend(subtract(other, self));
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(IntervalSet::normalize(Vec::<Interval>::deserialize(d)?))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

fn merge_sorted(sorted: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(sorted.len());
    for i in sorted {
        match out.last_mut() {
            Some(last) if i.lo <= last.hi => {
                if i.hi > last.hi {
                    last.hi = i.hi;
                }
            }
            _ => out.push(i),
        }
    }
    out
}

fn subtract(a: &IntervalSet, b: &IntervalSet) -> Vec<Interval> {
    let mut out = Vec::new();
    for i in &a.intervals {
        if i.lo == i.hi {
            if !b.contains(&i.lo) {
                out.push(i.clone());
            }
            continue;
        }
        let start = b.intervals.partition_point(|x| x.hi < i.lo);
        let mut cur = i.lo.clone();
        for x in b.intervals[start..].iter().take_while(|x| x.lo <= i.hi) {
            if x.lo > cur {
                out.push(Interval {
                    lo: cur.clone(),
                    hi: x.lo.clone(),
                });
            }
            if x.hi > cur {
                cur = x.hi.clone();
            }
        }
        if cur < i.hi {
            out.push(Interval {
                lo: cur,
                hi: i.hi.clone(),
            });
        }
    }
    out
}

// Minkowski sums run on integer numerators over a common denominator, using
// i128 whenever the scaled endpoints leave enough headroom.
fn minkowski_sum_nonempty(a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
    let all = a
        .intervals
        .iter()
        .chain(b.intervals.iter())
        .flat_map(|i| [&i.lo, &i.hi]);
    let den = rational::lcm_denoms(all);
    let scale = |set: &IntervalSet| -> Vec<(BigInt, BigInt)> {
        set.intervals
            .iter()
            .map(|i| {
                (
                    i.lo.numer() * (&den / i.lo.denom()),
                    i.hi.numer() * (&den / i.hi.denom()),
                )
            })
            .collect()
    };
    let sa = scale(a);
    let sb = scale(b);
    let limit = BigInt::from(1) << 125;
    let fits = sa
        .iter()
        .chain(sb.iter())
        .all(|(lo, hi)| lo.abs() < limit && hi.abs() < limit);
    let raw: Vec<(BigInt, BigInt)> = if fits {
        let narrow = |v: &[(BigInt, BigInt)]| -> Vec<(i128, i128)> {
            v.iter()
                .map(|(lo, hi)| (lo.to_i128().unwrap(), hi.to_i128().unwrap()))
                .collect()
        };
        sum_merge(&narrow(&sa), &narrow(&sb))
            .into_iter()
            .map(|(lo, hi)| (BigInt::from(lo), BigInt::from(hi)))
            .collect()
    } else {
        sum_merge(&sa, &sb)
    };
    IntervalSet {
        intervals: raw
            .into_iter()
            .map(|(lo, hi)| Interval {
                lo: Rational::new(lo, den.clone()),
                hi: Rational::new(hi, den.clone()),
            })
            .collect(),
    }
}

/// Union of `x + b` over `x` in `a`, split recursively over `a` so each merge
/// step only touches already-normalized lists.
fn sum_merge<T>(a: &[(T, T)], b: &[(T, T)]) -> Vec<(T, T)>
where
    T: Clone + Ord,
    for<'x> &'x T: Add<&'x T, Output = T>,
{
    if a.len() == 1 {
        let (alo, ahi) = &a[0];
        let mut out: Vec<(T, T)> = Vec::with_capacity(b.len());
        for (blo, bhi) in b {
            let lo = alo + blo;
            let hi = ahi + bhi;
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        return out;
    }
    let mid = a.len() / 2;
    let left = sum_merge(&a[..mid], b);
    let right = sum_merge(&a[mid..], b);
    union_sorted(left, right)
}

fn union_sorted<T: Ord>(x: Vec<(T, T)>, y: Vec<(T, T)>) -> Vec<(T, T)> {
    let mut out: Vec<(T, T)> = Vec::with_capacity(x.len() + y.len());
    let mut xi = x.into_iter().peekable();
    let mut yi = y.into_iter().peekable();
    loop {
        let next = match (xi.peek(), yi.peek()) {
            (Some(a), Some(b)) => {
                if a.0.cmp(&b.0) != Ordering::Greater {
                    xi.next()
                } else {
                    yi.next()
                }
            }
            (Some(_), None) => xi.next(),
            (None, Some(_)) => yi.next(),
            (None, None) => break,
        };
        let (lo, hi) = next.unwrap();
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

impl Neg for &IntervalSet {
    type Output = IntervalSet;

    fn neg(self) -> IntervalSet {
        self.affine_image(&rational::int(-1), &Rational::zero())
            .expect("nonzero scale")
    }
}
