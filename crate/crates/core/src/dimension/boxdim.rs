//! Box counting, Hausdorff content and the dense family of scaling factors.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cantor::AffineIfs;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::rational::{self, Rational};

/// Number of half-open cells `[i*delta, (i+1)*delta)` meeting `cover`.
pub fn box_count(cover: &IntervalSet, delta: &Rational) -> u64 {
    assert!(delta.is_positive(), "box size must be positive");
    let mut count = 0u64;
    let mut last: Option<BigInt> = None;
    for i in cover.intervals() {
        let mut first = rational::floor_int(&(&i.lo / delta));
        let end = rational::floor_int(&(&i.hi / delta));
        if let Some(prev) = &last {
            if &first <= prev {
                first = prev + 1;
            }
        }
        if first <= end {
            count += (&end - &first + 1u32)
                .to_u64()
                .expect("cell count fits in u64");
            last = Some(end);
        }
    }
    count
}

/// Cover of `K - lambda K'` by differences of cylinders no longer than `delta`
/// (the `K'` side refined to `delta / lambda` before scaling).
pub fn difference_cover_at_scale(
    k: &AffineIfs,
    kp: &AffineIfs,
    lambda: &Rational,
    delta: &Rational,
    budget: usize,
) -> Result<IntervalSet> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    let left = IntervalSet::normalize(k.refine_intervals(delta, budget)?);
    let right = IntervalSet::normalize(kp.refine_intervals(&(delta / lambda), budget)?)
        .affine_image(lambda, &Rational::zero())?;
    let required = left.len() as u128 * right.len() as u128;
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    left.minkowski_diff(&right)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub depth: u32,
    #[serde(with = "rational::as_str")]
    pub scale: Rational,
    pub count: u64,
    /// Components of the difference cover at this scale.
    pub intervals: usize,
    /// `log(count)` minus the fitted line.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxDimEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub rows: Vec<ScaleRow>,
}

/// Least-squares slope of `log N(delta)` against `log(1/delta)` for `delta = 2^-d`.
pub fn box_dimension_estimate(
    k: &AffineIfs,
    kp: &AffineIfs,
    lambda: &Rational,
    depths: &[u32],
    budget: usize,
) -> Result<BoxDimEstimate> {
    let mut ds = depths.to_vec();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 3 {
        return Err(Error::Config("≥3 depths required".into()));
    }
    let mut rows = Vec::with_capacity(ds.len());
    for &d in &ds {
        let scale = rational::pow(&rational::ratio(1, 2), d as i64);
        let cover = difference_cover_at_scale(k, kp, lambda, &scale, budget)?;
        rows.push(ScaleRow {
            depth: d,
            count: box_count(&cover, &scale),
            intervals: cover.len(),
            scale,
            residual: 0.0,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| -rational::ln(&r.scale)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.count as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    for (row, (x, y)) in rows.iter_mut().zip(xs.iter().zip(&ys)) {
        row.residual = y - (intercept + slope * x);
    }
    Ok(BoxDimEstimate {
        slope,
        intercept,
        rows,
    })
}

/// `sum |I|^s` over the members of `cover`.
pub fn hausdorff_content(cover: &IntervalSet, s: f64) -> f64 {
    cover
        .intervals()
        .iter()
        .map(|i| {
            let len = i.length();
            if len.is_zero() {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (s * rational::ln(&len)).exp()
            }
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContentRow {
    pub depth: usize,
    pub content: f64,
    pub intervals: usize,
}

/// Content of the level-`d` difference cover of `K - lambda K'` for each depth.
pub fn content_profile(
    k: &AffineIfs,
    kp: &AffineIfs,
    lambda: &Rational,
    s: f64,
    depths: &[usize],
    budget: usize,
) -> Result<Vec<ContentRow>> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    depths
        .iter()
        .map(|&d| {
            let left = k.level_set(d, budget)?;
            let right = kp
                .level_set(d, budget)?
                .affine_image(lambda, &Rational::zero())?;
            let cover = left.minkowski_diff(&right)?;
            Ok(ContentRow {
                depth: d,
                content: hausdorff_content(&cover, s),
                intervals: cover.len(),
            })
        })
        .collect()
}

/// Smallest depth from which content never increases (relative slack `1e-12`).
pub fn non_increasing_from(rows: &[ContentRow]) -> Option<usize> {
    let mut start = rows.len().checked_sub(1)?;
    while start > 0 {
        let (prev, next) = (&rows[start - 1], &rows[start]);
        if next.content > prev.content * (1.0 + 1e-12) {
            break;
        }
        start -= 1;
    }
    Some(rows[start].depth)
}

/// Sorted distinct values `r'_j^{n0} / r_i^{m0}` for `1 <= m0 <= m0_max`, `1 <= n0 <= n0_max`.
pub fn dense_lambda_family(
    ratios: &[Rational],
    ratios_prime: &[Rational],
    m0_max: u32,
    n0_max: u32,
) -> Vec<Rational> {
    let mut out = Vec::new();
    for r in ratios {
        for rp in ratios_prime {
            for m0 in 1..=m0_max {
                let den = rational::pow(r, m0 as i64);
                for n0 in 1..=n0_max {
                    out.push(rational::pow(rp, n0 as i64) / &den);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    debug_assert!(out.iter().all(|x| x.is_positive()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::TwoMapCantorSet;
    use crate::dimension::moran_dimension;
    use crate::interval::Interval;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn set(pairs: &[(i64, i64, i64, i64)]) -> IntervalSet {
        IntervalSet::normalize(
            pairs
                .iter()
                .map(|&(a, b, c, d)| Interval::new(ratio(a, b), ratio(c, d)).unwrap()),
        )
    }

    #[test]
    fn box_count_convention() {
        assert_eq!(box_count(&set(&[(0, 1, 1, 1)]), &ratio(1, 4)), 5);
        assert_eq!(
            box_count(&set(&[(0, 1, 1, 3), (2, 3, 1, 1)]), &ratio(1, 3)),
            4
        );
        assert_eq!(box_count(&IntervalSet::empty(), &ratio(1, 3)), 0);
    }

    #[test]
    fn content_examples() {
        assert!((hausdorff_content(&set(&[(0, 1, 1, 1)]), 1.0) - 1.0).abs() < 1e-15);
        let d = 2f64.ln() / 3f64.ln();
        let c = hausdorff_content(&set(&[(0, 1, 1, 3), (2, 3, 1, 1)]), d);
        assert!((c - 1.0).abs() < 1e-12);
        assert_eq!(hausdorff_content(&IntervalSet::empty(), 0.5), 0.0);
    }

    #[test]
    fn dense_family_examples() {
        let got = dense_lambda_family(&[ratio(1, 3)], &[ratio(1, 5)], 2, 2);
        assert_eq!(
            got,
            vec![ratio(3, 25), ratio(9, 25), ratio(3, 5), ratio(9, 5)]
        );
        assert!(dense_lambda_family(&[ratio(1, 3)], &[ratio(1, 3)], 2, 2).contains(&int(1)));
        assert_eq!(
            dense_lambda_family(&[ratio(1, 4)], &[ratio(1, 7)], 1, 1),
            vec![ratio(4, 7)]
        );
    }

    #[test]
    fn middle_thirds_box_dimension_is_one() {
        let k = TwoMapCantorSet::new(int(3), int(3), int(1))
            .unwrap()
            .to_ifs();
        let est = box_dimension_estimate(&k, &k, &int(1), &[4, 6, 8, 10], 1 << 22).unwrap();
        assert!((est.slope - 1.0).abs() < 0.05, "slope {}", est.slope);
        assert!(box_dimension_estimate(&k, &k, &int(1), &[4], 1 << 22).is_err());
    }

    #[test]
    fn non_increasing_detection() {
        let rows: Vec<ContentRow> = [3.0, 2.0, 2.5, 2.4, 2.4, 1.0]
            .iter()
            .enumerate()
            .map(|(d, &c)| ContentRow {
                depth: d + 4,
                content: c,
                intervals: 1,
            })
            .collect();
        assert_eq!(non_increasing_from(&rows), Some(6));
        assert_eq!(non_increasing_from(&[]), None);
    }

    #[test]
    fn moran_content_is_scale_free_on_level_sets() {
        let k = TwoMapCantorSet::new(int(4), int(4), int(1))
            .unwrap()
            .to_ifs();
        let d = moran_dimension(&k.ratios()).unwrap();
        for level in 1..6 {
            let c = hausdorff_content(&k.level_set(level, 1 << 20).unwrap(), d);
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn shifting_by_grid_multiples_preserves_counts(
            raw in prop::collection::vec((0i64..64, 0i64..16), 1..8),
            shift in -20i64..20,
            den in 1i64..9,
        ) {
            let cover = IntervalSet::normalize(raw.iter().map(|&(lo, len)| {
                Interval::new(ratio(lo, 16), ratio(lo + len, 16)).unwrap()
            }));
            let delta = ratio(1, den);
            let moved = cover.affine_image(&int(1), &(&delta * int(shift))).unwrap();
            let a = box_count(&cover, &delta) as i64;
            let b = box_count(&moved, &delta) as i64;
            prop_assert!((a - b).abs() <= cover.len() as i64);
        }
    }
}
