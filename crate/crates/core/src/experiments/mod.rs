//! Monte-Carlo sweeps: rate against SNR and CSIT allocation size against
//! the number of antennas.
//!
//! Trial `t` always draws from a sub-seed derived from `(seed, t)`, and
//! results are reduced in trial order, so tables do not depend on the
//! number of worker threads.

mod feedback;
mod rate;
mod spec;
mod table;

pub use feedback::{feedback_size_sweep, random_feasible_config, MAX_CONFIG_DRAWS};
pub use rate::rate_vs_snr;
pub use spec::{parse_spec_file, FeedbackPolicy, FeedbackSweepSpec, RatePolicy, RateSweepSpec};
pub use table::{mean_stderr, Certificate, Metadata, ResultRow, ResultTable};

use crate::error::{Error, Result};

/// Runs `f` on a pool with `workers` threads, or on the global pool.
pub(crate) fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("workers must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
