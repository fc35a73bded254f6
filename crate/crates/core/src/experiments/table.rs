use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::rng::RNG_ID;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub x: f64,
    pub policy: String,
    pub mean: f64,
    pub stderr: f64,
    /// Trials that contributed to this row.
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub version: String,
    pub rng: String,
    pub seed: u64,
    /// The sweep specification as run.
    pub spec: serde_json::Value,
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(experiment: &str, seed: u64, spec: serde_json::Value) -> Self {
        Self {
            experiment: experiment.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rng: RNG_ID.into(),
            seed,
            spec,
            notes: vec![],
        }
    }
}

/// Leakage reached by one policy on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub trial: usize,
    pub policy: String,
    pub leakage: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub rows: Vec<ResultRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

impl ResultTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,policy,mean,stderr,n\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{}", r.x, r.policy, r.mean, r.stderr, r.n).expect("string write");
        }
        out
    }

    pub fn row(&self, x: f64, policy: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.x == x && r.policy == policy)
    }

    /// Trials per policy whose solver did not reach its tolerance.
    pub fn nonconverged(&self, policy: &str) -> usize {
        self.certificates
            .iter()
            .filter(|c| c.policy == policy && !c.converged)
            .count()
    }
}

/// Sample mean and `std / √n` (zero for a single sample).
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample std = sqrt(5/3)
        assert!((s - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn csv_header() {
        let t = ResultTable {
            metadata: Metadata::new("x", 0, serde_json::Value::Null),
            rows: vec![ResultRow {
                x: 12.0,
                policy: "COMPLETE".into(),
                mean: 1.5,
                stderr: 0.0,
                n: 1,
            }],
            certificates: vec![],
        };
        assert_eq!(t.to_csv(), "x,policy,mean,stderr,n\n12,COMPLETE,1.5,0,1\n");
    }
}
