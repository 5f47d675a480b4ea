//! Finite counting measures and their combinatorics: factorial and product
//! integrals, the K-transform, the lowering operator, set-partition identities and
//! the partition-sum measures `lambda_n`.

mod alpha;
mod function;
mod integrals;
mod lambda;
mod partition;
mod point;

pub use alpha::AlphaMeasure;
pub use function::{Factor, SymmetricFunctionSpec};
pub(crate) use function::grid_cell;
pub use integrals::{
    factorial_integral, factorial_via_monomials, k_transform, lowering, monomial_via_factorials,
    product_integral,
};
pub use lambda::{lambda_n_integral, lambda_sequential};
pub use partition::{set_partitions, SetPartition, MAX_PARTITION_SIZE};
pub use point::{CountingMeasure, Point, Region};
