use rand::Rng;
use rayon::prelude::*;

use crate::allocation::{allocate_super, allocation_size, complete_size, RemovalMode};
use crate::channel::AntennaConfig;
use crate::error::{Error, Result};
use crate::feasibility;
use crate::rng::{self, derive_seed};

use super::spec::{FeedbackPolicy, FeedbackSweepSpec};
use super::table::{mean_stderr, Metadata, ResultRow, ResultTable};
use super::with_workers;

/// Configurations drawn before [`random_feasible_config`] gives up.
pub const MAX_CONFIG_DRAWS: usize = 1_000_000;

/// Random configuration with `total` antennas over `K` users.
///
/// Every node starts with one antenna; the remaining `total − 2K` are
/// dropped one at a time on a uniformly chosen node. Infeasible draws are
/// discarded and redrawn from the same stream.
pub fn random_feasible_config(users: usize, total: usize, seed: u64) -> Result<AntennaConfig> {
    if users == 0 || users > crate::channel::MAX_USERS {
        return Err(Error::InvalidArgument(format!("unsupported user count {users}")));
    }
    if total < 2 * users {
        return Err(Error::InvalidArgument(format!(
            "{total} antennas cannot give each of the {} nodes one",
            2 * users
        )));
    }
    if total < users * (users + 1) {
        return Err(Error::Infeasible(format!(
            "{total} antennas for K = {users} (at least {} needed)",
            users * (users + 1)
        )));
    }
    let mut r = rng::stream(seed, 0);
    for _ in 0..MAX_CONFIG_DRAWS {
        let mut counts = vec![1usize; 2 * users];
        for _ in 0..total - 2 * users {
            counts[r.gen_range(0..2 * users)] += 1;
        }
        let tx = counts.split_off(users);
        let config = AntennaConfig::new(counts, tx)?;
        if feasibility::is_feasible(&config).feasible {
            return Ok(config);
        }
    }
    Err(Error::GuardExceeded(format!(
        "no feasible configuration with {total} antennas for K = {users} in {MAX_CONFIG_DRAWS} draws"
    )))
}

fn size_under(config: &AntennaConfig, policy: FeedbackPolicy) -> Result<usize> {
    let mode = match policy {
        FeedbackPolicy::Complete => return Ok(complete_size(config)),
        FeedbackPolicy::Heuristic => RemovalMode::Heuristic,
        FeedbackPolicy::Exhaustive => RemovalMode::Exhaustive,
    };
    let (plan, alloc) = allocate_super(config, mode)?;
    Ok(allocation_size(&plan.reduced_config, &alloc))
}

/// Mean CSIT allocation size per total antenna count and policy.
///
/// Configuration `t` at total `T` comes from the sub-seed `(seed, T, t)`;
/// all policies are evaluated on the same configuration.
pub fn feedback_size_sweep(spec: &FeedbackSweepSpec, workers: Option<usize>) -> Result<ResultTable> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .total_antennas_grid
        .iter()
        .flat_map(|&total| (0..spec.trials).map(move |t| (total, t)))
        .collect();
    let run = |&(total, trial): &(usize, usize)| -> Result<Vec<f64>> {
        let sub = derive_seed(spec.seed, &[total as u64, trial as u64]);
        let config = random_feasible_config(spec.users, total, sub)?;
        spec.policies
            .iter()
            .map(|&p| size_under(&config, p).map(|s| s as f64))
            .collect()
    };
    let sizes: Vec<Vec<f64>> = with_workers(workers, || jobs.par_iter().map(run).collect::<Result<Vec<_>>>())??;

    let mut rows = Vec::new();
    for (g, &total) in spec.total_antennas_grid.iter().enumerate() {
        let chunk = &sizes[g * spec.trials..(g + 1) * spec.trials];
        for (p, policy) in spec.policies.iter().enumerate() {
            let samples: Vec<f64> = chunk.iter().map(|s| s[p]).collect();
            let (mean, stderr) = mean_stderr(&samples);
            rows.push(ResultRow {
                x: total as f64,
                policy: policy.to_string(),
                mean,
                stderr,
                n: samples.len(),
            });
        }
    }
    let mut metadata = Metadata::new("feedback_size_sweep", spec.seed, serde_json::to_value(spec)?);
    metadata.notes = vec![
        "x is the total number of antennas; mean is the CSIT allocation size in channel coefficients".into(),
        "HEURISTIC and EXHAUSTIVE sizes are measured on the reduced configuration".into(),
    ];
    Ok(ResultTable {
        metadata,
        rows,
        certificates: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::Classification;

    #[test]
    fn draws() {
        assert!(matches!(random_feasible_config(3, 11, 0), Err(Error::Infeasible(_))));
        assert!(random_feasible_config(3, 5, 0).is_err());
        for seed in 0..20 {
            let c = random_feasible_config(3, 12, seed).unwrap();
            assert_eq!(c.total_antennas(), 12);
            assert_eq!(feasibility::is_feasible(&c).classification, Classification::Tight);
            assert_eq!(c, random_feasible_config(3, 12, seed).unwrap());
        }
        let c = random_feasible_config(3, 15, 4).unwrap();
        assert_eq!(feasibility::is_feasible(&c).classification, Classification::Super);
    }

    #[test]
    fn small_sweep_shape_and_workers() {
        let spec = FeedbackSweepSpec::parse("users = 3\ntotals = 12..13\ntrials = 20\nseed = 5\n").unwrap();
        let a = feedback_size_sweep(&spec, Some(1)).unwrap();
        let b = feedback_size_sweep(&spec, Some(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 6);
        let h = a.row(12.0, "HEURISTIC").unwrap().mean;
        let e = a.row(12.0, "EXHAUSTIVE").unwrap().mean;
        assert_eq!(h, e);
    }
}
