//! Generalized symmetric inclusion process on `[0,1)`: jump-hold simulation with
//! and without particle labels, Pascal point process sampling and the reduction to
//! the discrete inclusion process on a partition.

mod conductance;
mod dynamics;
mod pascal;
mod reduce;

pub use crate::pointconfig::AlphaMeasure;
pub use conductance::ConductanceFn;
pub use dynamics::{
    gsip_simulate, labelled_gsip_simulate, q_rates, EventKind, GsipEvent, GsipModel, GsipTrajectoryConfig,
    JumpRates, DEFAULT_MAX_EVENTS,
};
pub use pascal::{sample_logarithmic, sample_pascal, sample_pascal_with, MAX_PASCAL_P};
pub use reduce::{cell_counts, reduce_to_discrete, uniform_cells};
