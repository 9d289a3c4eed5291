use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cantor::CantorPair;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};

use super::ops::{PlaneBox, PlanePoint};

/// `{(s, t) : s1 <= s <= s0, -b s <= t <= a}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Region {
    #[serde(with = "rational::as_str")]
    pub s1: Rational,
    #[serde(with = "rational::as_str")]
    pub s0: Rational,
    #[serde(with = "rational::as_str")]
    pub a: Rational,
    #[serde(with = "rational::as_str")]
    pub b: Rational,
}

impl Lemma1Region {
    pub fn contains_point(&self, p: &PlanePoint) -> bool {
        p.s >= self.s1 && p.s <= self.s0 && p.t <= self.a && p.t >= -(&self.b * &p.s)
    }

    /// Whole box inside the region (the lower edge is worst at the smallest `s`).
    pub fn contains_box(&self, bx: &PlaneBox) -> bool {
        bx.s.lo >= self.s1
            && bx.s.hi <= self.s0
            && bx.t.hi <= self.a
            && bx.t.lo >= -(&self.b * &bx.s.lo)
    }

    pub fn intersects_box(&self, bx: &PlaneBox) -> bool {
        if bx.s.hi < self.s1 || bx.s.lo > self.s0 {
            return false;
        }
        let s_max = std::cmp::min(&bx.s.hi, &self.s0);
        bx.t.lo <= self.a && bx.t.hi >= -(&self.b * s_max)
    }

    /// Smallest axis-aligned box containing the region.
    pub fn bounding_box(&self) -> PlaneBox {
        PlaneBox {
            s: Interval {
                lo: self.s1.clone(),
                hi: self.s0.clone(),
            },
            t: Interval {
                lo: -(&self.b * &self.s0),
                hi: self.a.clone(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Check {
    pub holds: bool,
    /// `max{p0 q1, p1 q0}`.
    #[serde(with = "rational::as_str")]
    pub expansion: Rational,
    /// `s0 / s1`.
    #[serde(with = "rational::as_str")]
    pub window: Rational,
    pub region: Lemma1Region,
}

pub fn lemma1_check(pair: &CantorPair) -> Lemma1Check {
    let expansion = std::cmp::max(pair.k.p0() * pair.kp.p1(), pair.k.p1() * pair.kp.p0());
    let (s0, s1) = (pair.s0(), pair.s1());
    let window = &s0 / &s1;
    Lemma1Check {
        holds: expansion <= window,
        expansion,
        window,
        region: Lemma1Region {
            s1,
            s0,
            a: pair.a().clone(),
            b: pair.b().clone(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FullIntervalVerdict {
    /// `K - s K' = [-b s, a]`.
    FullInterval { interval: Interval },
    /// `K - s K'` is a finite union of closed intervals, each at least `min_component` long.
    FiniteUnion {
        #[serde(with = "rational::as_str")]
        min_component: Rational,
        max_components: u64,
    },
}

/// Structure of `K - s K'` for a pair satisfying the expansion hypothesis.
pub fn full_interval_check(pair: &CantorPair, s: &Rational) -> Result<FullIntervalVerdict> {
    if !s.is_positive() {
        return Err(Error::Precondition("s must be positive".into()));
    }
    let check = lemma1_check(pair);
    if !check.holds {
        return Err(Error::Precondition(format!(
            "expansion hypothesis fails: max(p0 q1, p1 q0) = {} > s0/s1 = {}",
            check.expansion, check.window
        )));
    }
    let r = &check.region;
    let a = pair.a();
    let b = pair.b();
    if *s >= r.s1 && *s <= r.s0 {
        return Ok(FullIntervalVerdict::FullInterval {
            interval: Interval {
                lo: -(b * s),
                hi: a.clone(),
            },
        });
    }
    // T-words reach R after scaling s by at most s0 / s; T'-words never rescale t.
    let base = a - b * &r.s1;
    let min_component = if *s < r.s1 { &base * s / &r.s0 } else { base };
    let hull = a + b * s;
    let max_components = rational::floor_int(&(&hull / &min_component))
        .to_u64()
        .unwrap_or(u64::MAX)
        .max(1);
    Ok(FullIntervalVerdict::FiniteUnion {
        min_component,
        max_components,
    })
}
