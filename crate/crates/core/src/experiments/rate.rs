use rayon::prelude::*;

use crate::allocation::{allocate_super, RemovalMode};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::feasibility;
use crate::precoding::{complete_precode, db_to_power, distributed_precode, leakage, user_rates, SolverOptions};
use crate::rng::derive_seed;

use super::spec::{RatePolicy, RateSweepSpec};
use super::table::{mean_stderr, Certificate, Metadata, ResultRow, ResultTable};
use super::with_workers;

struct TrialOutcome {
    /// `rates[p][s]`: mean rate per user for policy `p` at SNR point `s`.
    rates: Vec<Vec<f64>>,
    certificates: Vec<Certificate>,
}

/// Average rate per user at every SNR point for each policy.
///
/// Each trial draws one channel shared by all policies. Trials whose solver
/// misses its tolerance stay in the averages; the per-trial leakage and
/// convergence flag are kept as certificates.
pub fn rate_vs_snr(spec: &RateSweepSpec, workers: Option<usize>) -> Result<ResultTable> {
    spec.validate()?;
    let config = &spec.config;
    if !feasibility::is_feasible(config).feasible {
        return Err(Error::Infeasible(config.to_string()));
    }
    let needs_alloc = spec.policies.contains(&RatePolicy::Incomplete);
    let allocation = needs_alloc
        .then(|| allocate_super(config, RemovalMode::Heuristic))
        .transpose()?;
    let powers: Vec<f64> = spec.snr_grid_db.iter().map(|&db| db_to_power(db)).collect();

    let run_trial = |trial: usize| -> Result<TrialOutcome> {
        let sub = derive_seed(spec.seed, &[trial as u64]);
        let h = ChannelMatrix::draw(config, sub);
        let blocks = h.to_blocks();
        let opts = SolverOptions {
            init_seed: sub,
            ..spec.solver
        };
        let mut rates = Vec::with_capacity(spec.policies.len());
        let mut certificates = Vec::with_capacity(spec.policies.len());
        for &policy in &spec.policies {
            let (b, leak, converged) = match policy {
                RatePolicy::Complete => {
                    let (b, trace) = complete_precode(&h, &opts)?;
                    let leak = leakage(&blocks, &b)?;
                    (b, leak, trace.converged)
                }
                RatePolicy::Incomplete => {
                    let (plan, alloc) = allocation.as_ref().expect("allocated above");
                    let d = distributed_precode(config, alloc, Some(plan), &h, &opts)?;
                    let ok = d.all_solves_converged() && d.replication_consistent();
                    (d.beamformers, d.leakage, ok)
                }
            };
            let per_snr = powers
                .iter()
                .map(|&p| {
                    let r = user_rates(&blocks, &b, p)?;
                    Ok(r.iter().sum::<f64>() / r.len() as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            rates.push(per_snr);
            certificates.push(Certificate {
                trial,
                policy: policy.to_string(),
                leakage: leak,
                converged,
            });
        }
        Ok(TrialOutcome { rates, certificates })
    };

    let outcomes: Vec<TrialOutcome> = with_workers(workers, || {
        (0..spec.trials)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<Vec<_>>>()
    })??;

    let mut rows = Vec::new();
    for (s, &db) in spec.snr_grid_db.iter().enumerate() {
        for (p, policy) in spec.policies.iter().enumerate() {
            let samples: Vec<f64> = outcomes.iter().map(|o| o.rates[p][s]).collect();
            let (mean, stderr) = mean_stderr(&samples);
            rows.push(ResultRow {
                x: db,
                policy: policy.to_string(),
                mean,
                stderr,
                n: samples.len(),
            });
        }
    }
    let mut metadata = Metadata::new("rate_vs_snr", spec.seed, serde_json::to_value(spec)?);
    metadata.notes = vec![
        "x is the transmit power P in dB (unit noise variance)".into(),
        "mean is the rate per user, log2(1 + P|g^H H_ii t|^2 / (1 + P * interference)), averaged over users and trials"
            .into(),
        "trials that miss the solver tolerance are kept in the means; see certificates".into(),
    ];
    if let Some((plan, _)) = &allocation {
        metadata
            .notes
            .push(format!("INCOMPLETE precodes on {}", plan.reduced_config));
    }
    let certificates = outcomes.into_iter().flat_map(|o| o.certificates).collect();
    Ok(ResultTable {
        metadata,
        rows,
        certificates,
    })
}
