//! Covering-level check of `K1 - lambda K2 = U_k (r_k (K1 - lambda/r_k K2) + t_k)`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cantor::{AffineIfs, AffineMap};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub pass: bool,
    pub depth: usize,
    pub lhs: IntervalSet,
    pub rhs: IntervalSet,
    /// Pieces of the symmetric difference; empty when `pass`.
    pub mismatches: Vec<Interval>,
}

/// Compares the depth-`d` cover of `K1 - lambda K2` with the union of the
/// pieces built from the depth-`(d-1)` cover of `K1`.
pub fn decomposition_identity_check(
    k1: &AffineIfs,
    k2: &AffineIfs,
    lambda: &Rational,
    depth: usize,
    budget: usize,
) -> Result<IdentityReport> {
    decomposition_identity_check_with_maps(k1, k1.maps(), k2, lambda, depth, budget)
}

/// Same as [`decomposition_identity_check`] but builds the right side from
/// `maps` instead of the maps of `k1` (used to exercise failure reports).
pub fn decomposition_identity_check_with_maps(
    k1: &AffineIfs,
    maps: &[AffineMap],
    k2: &AffineIfs,
    lambda: &Rational,
    depth: usize,
    budget: usize,
) -> Result<IdentityReport> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if !lambda.is_positive() {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    let outer = k2.level_set(depth, budget)?;
    let lhs = k1
        .level_set(depth, budget)?
        .minkowski_diff(&outer.affine_image(lambda, &Rational::zero())?)?;
    let inner_k1 = k1.level_set(depth - 1, budget)?;
    let mut pieces = Vec::new();
    for map in maps {
        let scaled = outer.affine_image(&(lambda / &map.ratio), &Rational::zero())?;
        let inner = inner_k1.minkowski_diff(&scaled)?;
        pieces.extend(inner.affine_image(&map.ratio, &map.shift)?.into_intervals());
    }
    let rhs = IntervalSet::normalize(pieces);
    let mismatches = lhs.symmetric_difference(&rhs);
    Ok(IdentityReport {
        pass: mismatches.is_empty(),
        depth,
        lhs,
        rhs,
        mismatches,
    })
}
