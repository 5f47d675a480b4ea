//! Checks of the intertwining, duality, orthogonality and reversibility identities,
//! each returning a [`VerificationReport`](crate::report::VerificationReport) with
//! an exact tolerance or a Monte Carlo standard error.

mod continuum;
mod identities;
mod polynomials;
mod stats;

pub use continuum::{
    mc_classical_intertwining_gsip, pascal_laplace_exponent, pascal_sampler_check, reduced_detailed_balance,
    reduction_check_gsip, stationarity_check_gsip, MAX_INITIAL_POINTS,
};
pub use identities::{
    consistency_check, detailed_balance_check, meixner_convolution_check, orthogonality_check,
    partition_identity_check,
};
pub use polynomials::{
    charlier_product_check, factorization_check, lambda_orthogonality_check, meixner_product_check, PointLaw,
};
pub use stats::{chi_square_counts, chi_square_z, correlation, mean_estimate, MeanEstimate, MIN_EXPECTED};

use crate::discrete::{check_intertwining, IntertwiningMode, SiteSystem};
use crate::error::Result;
use crate::pointconfig::SymmetricFunctionSpec;
use crate::report::VerificationReport;

/// Worst deviation of the intertwining relation over the sector with `particles`
/// particles.
pub fn exact_intertwining_discrete(
    sys: &SiteSystem,
    n: usize,
    particles: usize,
    t: f64,
    f: &SymmetricFunctionSpec,
    mode: IntertwiningMode,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_intertwining(sys, n, particles, t, f, mode, tolerance)
}
