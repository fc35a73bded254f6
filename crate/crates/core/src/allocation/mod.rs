//! Incomplete CSIT allocation: which channel blocks each transmitter needs.

mod mask;
mod removal;
mod report;
mod tight;

pub use mask::{allocation_size, complete_size, expand_mask, mask_size, CsitAllocation, CsitMask, MaskScope};
pub use removal::{
    allocate_super, remove_antennas_exhaustive, remove_antennas_heuristic, RemovalMode, RemovalPlan, EXHAUSTIVE_GUARD,
};
pub use report::AllocationReport;
pub use tight::{allocate_tight, tight_membership};
