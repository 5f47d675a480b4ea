//! Exact engines for exclusion, independent-walker and inclusion processes on a
//! finite set of sites.

mod duality;
mod generator;
mod gram_schmidt;
mod intertwining;
mod reversible;
mod sector;
mod semigroup;
mod system;

pub use duality::{check_duality, check_duality_sectors, DualityFunctions, DualityKind};
pub use generator::{
    build_generator, build_labelled_generator, consistency_commutator, lowering_matrix, GeneratorMatrix,
    LabelledGenerator, SectorGenerator,
};
pub use gram_schmidt::{gram_schmidt_in, OrthogonalProjection, MAX_CONDITION};
pub use intertwining::{check_intertwining, check_labelled_agreement, IntertwiningMode};
pub use reversible::{reversible_measure, ReversibleMeasure};
pub use sector::{occupancy, LabelledSpace, SectorEnumeration, SECTOR_LIMIT};
pub use semigroup::{semigroup_apply, semigroup_apply_transpose, UNIFORMIZATION_TAIL};
pub use system::SiteSystem;
