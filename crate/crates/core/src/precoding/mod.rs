//! Min-leakage interference alignment with complete and incomplete CSIT.

mod beamformers;
mod distributed;
mod metrics;
mod solver;

pub use beamformers::{BeamformerSet, ComplexVector, UNIT_NORM_TOL};
pub use distributed::{complete_precode, distributed_precode, DistributedPrecoding, Reduction, Replica, SubSolve};
pub use metrics::{db_to_power, rx_filters, user_rates};
pub use solver::{leakage, min_leakage_solve, LeakageTrace, SolverOptions};

#[cfg(test)]
mod tests;
