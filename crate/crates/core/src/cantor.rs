//! Affine Cantor sets: general IFS form, the two-map family, coverings and
//! first-level geometry (gap, thickness, reflection).

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dimension::moran_dimension;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rational::{self, Rational};

/// Default ceiling on the number of intervals a covering may produce.
pub const DEFAULT_BUDGET: usize = 1 << 22;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "CANTOR_ARITH_BUDGET";

pub fn default_budget() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// `x -> ratio * x + shift`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(rename = "r", with = "rational::as_str")]
    pub ratio: Rational,
    #[serde(rename = "t", with = "rational::as_str")]
    pub shift: Rational,
}

impl AffineMap {
    pub fn new(ratio: Rational, shift: Rational) -> Self {
        AffineMap { ratio, shift }
    }

    pub fn identity() -> Self {
        AffineMap::new(Rational::one(), Rational::zero())
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.ratio * x + &self.shift
    }

    pub fn image(&self, i: &Interval) -> Interval {
        i.affine(&self.ratio, &self.shift)
    }
}

/// First condition an IFS fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewMaps { count: usize },
    DegenerateHull,
    RatioOutOfRange { index: usize },
    OutOfHull { index: usize, image: Box<Interval> },
    Overlap { left: usize, right: usize },
    HullNotTight,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewMaps { count } => write!(f, "need at least 2 maps, got {count}"),
            Violation::DegenerateHull => write!(f, "hull must have positive length"),
            Violation::RatioOutOfRange { index } => {
                write!(f, "ratio of map {index} is outside (0, 1)")
            }
            Violation::OutOfHull { index, image } => {
                write!(f, "image exits hull: map {index} sends the hull to {image}")
            }
            Violation::Overlap { left, right } => {
                write!(f, "images touch/overlap: maps {left} and {right}")
            }
            Violation::HullNotTight => {
                write!(f, "outermost images do not reach both hull endpoints")
            }
        }
    }
}

/// An iterated function system of increasing affine contractions of a hull
/// interval with pairwise disjoint images, sorted left to right.
///
/// Strict systems (built with [`AffineIfs::new`]) have at least two maps and
/// a tight hull, so the hull is the convex hull of the attractor. Systems built
/// with [`AffineIfs::construction`] only need one map and are used as bare
/// cylinder scaffolds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineIfs {
    hull: Interval,
    maps: Vec<AffineMap>,
}

impl AffineIfs {
    pub fn new(hull: Interval, maps: Vec<AffineMap>) -> Result<Self> {
        let ifs = Self::sorted(hull, maps);
        ifs.check(true).map_err(Error::InvalidIfs)?;
        Ok(ifs)
    }

    pub fn construction(hull: Interval, maps: Vec<AffineMap>) -> Result<Self> {
        let ifs = Self::sorted(hull, maps);
        ifs.check(false).map_err(Error::InvalidIfs)?;
        Ok(ifs)
    }

    /// Maps given as `(ratio, shift)` over the hull `[0, a]`.
    pub fn on_unit(a: Rational, maps: &[(Rational, Rational)]) -> Result<Self> {
        let hull = Interval::new(Rational::zero(), a)?;
        Self::new(
            hull,
            maps.iter()
                .map(|(r, t)| AffineMap::new(r.clone(), t.clone()))
                .collect(),
        )
    }

    fn sorted(hull: Interval, mut maps: Vec<AffineMap>) -> Self {
        maps.sort_by(|x, y| {
            x.apply(&hull.lo)
                .cmp(&y.apply(&hull.lo))
                .then_with(|| x.ratio.cmp(&y.ratio))
        });
        AffineIfs { hull, maps }
    }

    fn check(&self, strict: bool) -> std::result::Result<(), Violation> {
        if strict && self.maps.len() < 2 || self.maps.is_empty() {
            return Err(Violation::TooFewMaps {
                count: self.maps.len(),
            });
        }
        if self.hull.lo >= self.hull.hi {
            return Err(Violation::DegenerateHull);
        }
        for (index, m) in self.maps.iter().enumerate() {
            if !m.ratio.is_positive() || m.ratio >= Rational::one() {
                return Err(Violation::RatioOutOfRange { index });
            }
        }
        let images = self.first_level();
        for (index, image) in images.iter().enumerate() {
            if !self.hull.contains_interval(image) {
                return Err(Violation::OutOfHull {
                    index,
                    image: Box::new(image.clone()),
                });
            }
        }
        for (left, w) in images.windows(2).enumerate() {
            if w[0].hi >= w[1].lo {
                return Err(Violation::Overlap {
                    left,
                    right: left + 1,
                });
            }
        }
        if strict
            && (images.first().unwrap().lo != self.hull.lo
                || images.last().unwrap().hi != self.hull.hi)
        {
            return Err(Violation::HullNotTight);
        }
        Ok(())
    }

    /// Reports the first violated invariant of a raw map list.
    pub fn validate(hull: &Interval, maps: &[AffineMap]) -> std::result::Result<(), Violation> {
        Self::sorted(hull.clone(), maps.to_vec()).check(true)
    }

    pub fn hull(&self) -> &Interval {
        &self.hull
    }

    /// Hull length.
    pub fn a(&self) -> Rational {
        self.hull.length()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn ratios(&self) -> Vec<Rational> {
        self.maps.iter().map(|m| m.ratio.clone()).collect()
    }

    pub fn arity(&self) -> usize {
        self.maps.len()
    }

    pub fn first_level(&self) -> Vec<Interval> {
        self.maps.iter().map(|m| m.image(&self.hull)).collect()
    }

    /// Cylinder `f_{w1} o ... o f_{wk}(hull)`.
    pub fn cylinder(&self, word: &[u8]) -> Interval {
        let mut current = self.hull.clone();
        for &letter in word.iter().rev() {
            current = self.maps[letter as usize].image(&current);
        }
        current
    }

    /// Point `f_{w1} o ... o f_{wk}(x)`.
    pub fn apply_word(&self, word: &[u8], x: &Rational) -> Rational {
        word.iter()
            .rev()
            .fold(x.clone(), |acc, &l| self.maps[l as usize].apply(&acc))
    }

    pub fn min_ratio(&self) -> Rational {
        self.maps.iter().map(|m| m.ratio.clone()).min().unwrap()
    }

    pub fn max_ratio(&self) -> Rational {
        self.maps.iter().map(|m| m.ratio.clone()).max().unwrap()
    }

    pub fn dimension(&self) -> Result<f64> {
        moran_dimension(&self.ratios())
    }

    /// Relative placement of each first-level image inside the hull.
    fn offsets(&self) -> Vec<(Rational, Rational)> {
        let a = self.a();
        self.maps
            .iter()
            .map(|m| {
                let image = m.image(&self.hull);
                ((&image.lo - &self.hull.lo) / &a, m.ratio.clone())
            })
            .collect()
    }

    fn child(parent: &Interval, offset: &(Rational, Rational)) -> Interval {
        let len = parent.length();
        let lo = &parent.lo + &offset.0 * &len;
        let hi = &lo + &offset.1 * &len;
        Interval { lo, hi }
    }

    /// All depth-`k` cylinders, left to right; index `i` corresponds to the
    /// base-`M` expansion of `i` as a word.
    pub fn level_intervals(&self, k: usize, budget: usize) -> Result<Vec<Interval>> {
        let required = (self.arity() as u128)
            .checked_pow(k as u32)
            .unwrap_or(u128::MAX);
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let offsets = self.offsets();
        let mut level = vec![self.hull.clone()];
        for _ in 0..k {
            level = level
                .iter()
                .flat_map(|p| offsets.iter().map(move |o| Self::child(p, o)))
                .collect();
        }
        Ok(level)
    }

    pub fn level_set(&self, k: usize, budget: usize) -> Result<IntervalSet> {
        Ok(IntervalSet::normalize(self.level_intervals(k, budget)?))
    }

    pub fn level_covering(&self, k: usize, budget: usize) -> Result<Covering> {
        let intervals = self.level_intervals(k, budget)?;
        let arity = self.arity();
        let cylinders = intervals
            .into_iter()
            .enumerate()
            .map(|(mut index, interval)| {
                let mut word = vec![0u8; k];
                for slot in word.iter_mut().rev() {
                    *slot = (index % arity) as u8;
                    index /= arity;
                }
                Cylinder { word, interval }
            })
            .collect();
        Ok(Covering::from_cylinders(cylinders))
    }

    /// Expands words until every cylinder has length at most `delta`.
    pub fn refine_to_scale(&self, delta: &Rational, budget: usize) -> Result<Covering> {
        if !delta.is_positive() || delta >= &self.a() {
            return Err(Error::Precondition(format!(
                "refinement scale {delta} must lie in (0, {})",
                self.a()
            )));
        }
        let offsets = self.offsets();
        let mut out = Vec::new();
        let mut stack = vec![Cylinder {
            word: Vec::new(),
            interval: self.hull.clone(),
        }];
        while let Some(c) = stack.pop() {
            if &c.interval.length() <= delta {
                out.push(c);
                if out.len() > budget {
                    return Err(Error::BudgetExceeded {
                        required: out.len() as u128 + stack.len() as u128,
                        budget,
                    });
                }
                continue;
            }
            for (letter, o) in offsets.iter().enumerate().rev() {
                let mut word = c.word.clone();
                word.push(letter as u8);
                stack.push(Cylinder {
                    word,
                    interval: Self::child(&c.interval, o),
                });
            }
        }
        Ok(Covering::from_cylinders(out))
    }

    /// Interval-only variant of [`refine_to_scale`](Self::refine_to_scale).
    pub fn refine_intervals(&self, delta: &Rational, budget: usize) -> Result<Vec<Interval>> {
        if !delta.is_positive() {
            return Err(Error::Precondition(
                "refinement scale must be positive".into(),
            ));
        }
        if delta >= &self.a() {
            return Ok(vec![self.hull.clone()]);
        }
        let offsets = self.offsets();
        let mut out = Vec::new();
        let mut stack = vec![self.hull.clone()];
        while let Some(i) = stack.pop() {
            if &i.length() <= delta {
                out.push(i);
                if out.len() > budget {
                    return Err(Error::BudgetExceeded {
                        required: out.len() as u128 + stack.len() as u128,
                        budget,
                    });
                }
                continue;
            }
            for o in offsets.iter().rev() {
                stack.push(Self::child(&i, o));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub word: Vec<u8>,
    pub interval: Interval,
}

/// Word-annotated cylinders plus their normalized union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering {
    pub cylinders: Vec<Cylinder>,
    pub set: IntervalSet,
}

impl Covering {
    fn from_cylinders(cylinders: Vec<Cylinder>) -> Self {
        let set = IntervalSet::normalize(cylinders.iter().map(|c| c.interval.clone()));
        Covering { cylinders, set }
    }
}

/// The two-map affine Cantor set with hull `[0, a]`, first-level intervals
/// `I0 = [0, a/p0]`, `I1 = [a - a/p1, a]` and expanding map `p_i x + e_i` on `I_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TwoMapRepr", into = "TwoMapRepr")]
pub struct TwoMapCantorSet {
    p0: Rational,
    p1: Rational,
    a: Rational,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoMapRepr {
    #[serde(with = "rational::as_str")]
    p0: Rational,
    #[serde(with = "rational::as_str")]
    p1: Rational,
    #[serde(with = "rational::as_str")]
    a: Rational,
}

impl TryFrom<TwoMapRepr> for TwoMapCantorSet {
    type Error = Error;

    fn try_from(r: TwoMapRepr) -> Result<Self> {
        TwoMapCantorSet::new(r.p0, r.p1, r.a)
    }
}

impl From<TwoMapCantorSet> for TwoMapRepr {
    fn from(k: TwoMapCantorSet) -> Self {
        TwoMapRepr {
            p0: k.p0,
            p1: k.p1,
            a: k.a,
        }
    }
}

impl TwoMapCantorSet {
    pub fn new(p0: Rational, p1: Rational, a: Rational) -> Result<Self> {
        if p0 <= Rational::one() || p1 <= Rational::one() {
            return Err(Error::Precondition("expansion rates must exceed 1".into()));
        }
        if !a.is_positive() {
            return Err(Error::Precondition("hull length must be positive".into()));
        }
        let gap = &a - &a / &p0 - &a / &p1;
        if !gap.is_positive() {
            return Err(Error::GapCondition {
                gap: rational::format(&gap),
            });
        }
        Ok(TwoMapCantorSet { p0, p1, a })
    }

    pub fn p0(&self) -> &Rational {
        &self.p0
    }

    pub fn p1(&self) -> &Rational {
        &self.p1
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn p(&self, i: usize) -> &Rational {
        if i == 0 {
            &self.p0
        } else {
            &self.p1
        }
    }

    /// Intercept of the expanding branch on `I_i`: `e0 = 0`, `e1 = a - p1 a`.
    pub fn e(&self, i: usize) -> Rational {
        if i == 0 {
            Rational::zero()
        } else {
            &self.a - &self.p1 * &self.a
        }
    }

    pub fn i0(&self) -> Interval {
        Interval {
            lo: Rational::zero(),
            hi: &self.a / &self.p0,
        }
    }

    pub fn i1(&self) -> Interval {
        Interval {
            lo: &self.a - &self.a / &self.p1,
            hi: self.a.clone(),
        }
    }

    pub fn hull(&self) -> Interval {
        Interval {
            lo: Rational::zero(),
            hi: self.a.clone(),
        }
    }

    /// Length of the central gap, `a - a/p0 - a/p1`.
    pub fn gap(&self) -> Rational {
        &self.a - &self.a / &self.p0 - &self.a / &self.p1
    }

    /// `(tau_L, tau_R) = (|I0| / G, |I1| / G)`.
    pub fn thickness(&self) -> (Rational, Rational) {
        let g = self.gap();
        (&self.a / &self.p0 / &g, &self.a / &self.p1 / &g)
    }

    /// The set `a - K`, which swaps the two branches.
    pub fn reflect(&self) -> Self {
        TwoMapCantorSet {
            p0: self.p1.clone(),
            p1: self.p0.clone(),
            a: self.a.clone(),
        }
    }

    pub fn to_ifs(&self) -> AffineIfs {
        let r0 = self.p0.recip();
        let r1 = self.p1.recip();
        let t1 = &self.a - &self.a * &r1;
        AffineIfs::new(
            self.hull(),
            vec![AffineMap::new(r0, Rational::zero()), AffineMap::new(r1, t1)],
        )
        .expect("gap condition implies a valid IFS")
    }

    pub fn dimension(&self) -> f64 {
        moran_dimension(&[self.p0.recip(), self.p1.recip()]).expect("two-map sets are Cantor IFSs")
    }
}

impl fmt::Display for TwoMapCantorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({}, {}; {})", self.p0, self.p1, self.a)
    }
}

/// A pair `(K, K')` of two-map sets; `K - s K'` is the object of study.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CantorPair {
    pub k: TwoMapCantorSet,
    pub kp: TwoMapCantorSet,
}

impl CantorPair {
    pub fn new(k: TwoMapCantorSet, kp: TwoMapCantorSet) -> Self {
        CantorPair { k, kp }
    }

    pub fn from_params(params: [i64; 6]) -> Result<Self> {
        let [p0, p1, a, q0, q1, b] = params.map(rational::int);
        Ok(CantorPair::new(
            TwoMapCantorSet::new(p0, p1, a)?,
            TwoMapCantorSet::new(q0, q1, b)?,
        ))
    }

    pub fn a(&self) -> &Rational {
        self.k.a()
    }

    pub fn b(&self) -> &Rational {
        self.kp.a()
    }

    pub fn q(&self, j: usize) -> &Rational {
        self.kp.p(j)
    }

    /// `f0 = 0`, `f1 = b - q1 b`.
    pub fn f(&self, j: usize) -> Rational {
        self.kp.e(j)
    }

    /// `s0 = a / G(K')`.
    pub fn s0(&self) -> Rational {
        self.a() / self.kp.gap()
    }

    /// `s1 = G(K) / b`.
    pub fn s1(&self) -> Rational {
        self.k.gap() / self.b()
    }

    /// `(tau_R(K) tau_L(K'), tau_L(K) tau_R(K'))`.
    pub fn thickness_products(&self) -> (Rational, Rational) {
        let (kl, kr) = self.k.thickness();
        let (pl, pr) = self.kp.thickness();
        (kr * pl, kl * pr)
    }

    pub fn thick(&self) -> bool {
        let (x, y) = self.thickness_products();
        x >= Rational::one() && y >= Rational::one()
    }

    /// `max{p0 q1, p1 q0} <= s0 / s1`.
    pub fn expansion_condition(&self) -> bool {
        let lhs = std::cmp::max(self.k.p0() * self.kp.p1(), self.k.p1() * self.kp.p0());
        lhs <= self.s0() / self.s1()
    }

    pub fn swapped(&self) -> Self {
        CantorPair::new(self.kp.clone(), self.k.clone())
    }

    pub fn hd_sum(&self) -> f64 {
        self.k.dimension() + self.kp.dimension()
    }
}

impl fmt::Display for CantorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.k, self.kp)
    }
}

/// Puts two increasing two-map systems into the standard family:
/// `attractor(A) - attractor(B) = phi(K - K')`.
pub fn normalize_pair(a: &AffineIfs, b: &AffineIfs) -> Result<(CantorPair, AffineMap)> {
    for ifs in [a, b] {
        if ifs.arity() != 2 {
            return Err(Error::Unsupported(format!(
                "pair normalization needs exactly two maps, got {}",
                ifs.arity()
            )));
        }
    }
    let to_two_map = |ifs: &AffineIfs| {
        TwoMapCantorSet::new(
            ifs.maps()[0].ratio.recip(),
            ifs.maps()[1].ratio.recip(),
            ifs.a(),
        )
    };
    let pair = CantorPair::new(to_two_map(a)?, to_two_map(b)?);
    let phi = AffineMap::new(Rational::one(), &a.hull().lo - &b.hull().lo);
    let (ka, kb) = (pair.k.to_ifs(), pair.kp.to_ifs());
    for depth in 0..=6 {
        let lhs = a
            .level_set(depth, DEFAULT_BUDGET)?
            .minkowski_diff(&b.level_set(depth, DEFAULT_BUDGET)?)?;
        let rhs = ka
            .level_set(depth, DEFAULT_BUDGET)?
            .minkowski_diff(&kb.level_set(depth, DEFAULT_BUDGET)?)?
            .affine_image(&phi.ratio, &phi.shift)?;
        if lhs != rhs {
            return Err(Error::Verification(format!(
                "normalized pair disagrees with the input at depth {depth}"
            )));
        }
    }
    Ok((pair, phi))
}
