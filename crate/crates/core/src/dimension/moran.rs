use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const TOLERANCE: f64 = 1e-15;
const MAX_ITERATIONS: usize = 200;

/// Root `d` in `[0, 1]` of `sum r_i^d = 1`, by bisection.
pub fn moran_dimension(ratios: &[Rational]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::Precondition(
            "Moran equation needs at least one ratio".into(),
        ));
    }
    if ratios
        .iter()
        .any(|r| !r.is_positive() || r >= &Rational::one())
    {
        return Err(Error::Precondition("ratios must lie in (0, 1)".into()));
    }
    let total: Rational = ratios.iter().cloned().sum();
    if total > Rational::one() {
        return Err(Error::NotCantor(rational::format(&total)));
    }
    let logs: Vec<f64> = ratios.iter().map(rational::ln).collect();
    let excess = |d: f64| logs.iter().map(|l| (d * l).exp()).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn residual(ratios: &[Rational], d: f64) -> f64 {
        ratios
            .iter()
            .map(|r| rational::to_f64(r).powf(d))
            .sum::<f64>()
            - 1.0
    }

    #[test]
    fn closed_forms() {
        let d = moran_dimension(&[ratio(1, 3), ratio(1, 3)]).unwrap();
        assert!((d - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        let d = moran_dimension(&[ratio(1, 4), ratio(1, 4)]).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        // x = 2^-d solves x + x^2 = 1.
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let d = moran_dimension(&[ratio(1, 2), ratio(1, 4)]).unwrap();
        assert!((d - golden.log2()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            moran_dimension(&[ratio(2, 3), ratio(2, 3)]),
            Err(Error::NotCantor(_))
        ));
        assert!(moran_dimension(&[]).is_err());
        assert!(moran_dimension(&[ratio(3, 2)]).is_err());
    }

    #[test]
    fn single_ratio_has_dimension_zero() {
        assert!(moran_dimension(&[ratio(1, 2)]).unwrap().abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn residual_is_small_and_adding_a_map_raises_dimension(
            dens in prop::collection::vec(3i64..40, 2..5),
        ) {
            let ratios: Vec<Rational> = dens.iter().map(|d| ratio(1, *d)).collect();
            let total: Rational = ratios.iter().cloned().sum();
            prop_assume!(total < Rational::one());
            let d = moran_dimension(&ratios).unwrap();
            prop_assert!(residual(&ratios, d).abs() <= 1e-13);
            let slack = Rational::one() - total;
            let extra = ratio(1, 2) * slack;
            let mut more = ratios.clone();
            more.push(extra);
            prop_assert!(moran_dimension(&more).unwrap() > d);
        }
    }
}
