//! Dimension and measure machinery for differences of affine Cantor sets.

mod boxdim;
mod ek;
mod gamma;
mod identity;
mod moran;

pub use boxdim::{
    box_count, box_dimension_estimate, content_profile, dense_lambda_family,
    difference_cover_at_scale, hausdorff_content, non_increasing_from, BoxDimEstimate, ContentRow,
    ScaleRow,
};
pub use ek::{scaling_witness, EkEntry, EkEnumerator, EkResult, ScalingWitness, WitnessOptions};
pub use gamma::{
    gamma_decomposition, nonneg_diophantine, DioSolution, GammaDecomposition, GammaOutcome,
    DEFAULT_PRIME_BOUND,
};
pub use identity::{
    decomposition_identity_check, decomposition_identity_check_with_maps, IdentityReport,
};
pub use moran::moran_dimension;
