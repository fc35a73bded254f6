use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::AntennaConfig;
use crate::error::{Error, Result};
use crate::precoding::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RatePolicy {
    /// Full-CSIT min-leakage solve.
    Complete,
    /// Allocation plus distributed precoding.
    Incomplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeedbackPolicy {
    Complete,
    Heuristic,
    Exhaustive,
}

macro_rules! policy_text {
    ($ty:ty, $($variant:ident => $name:literal),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($name => Ok(Self::$variant),)+
                    _ => Err(Error::InvalidArgument(format!("unknown policy `{}`", s.trim()))),
                }
            }
        }
    };
}

policy_text!(RatePolicy, Complete => "COMPLETE", Incomplete => "INCOMPLETE");
policy_text!(FeedbackPolicy, Complete => "COMPLETE", Heuristic => "HEURISTIC", Exhaustive => "EXHAUSTIVE");

/// Average rate per user against transmit power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSweepSpec {
    pub config: AntennaConfig,
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_rate_trials")]
    pub trials: usize,
    #[serde(default = "all_rate_policies")]
    pub policies: Vec<RatePolicy>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
}

/// Average CSIT allocation size against the total number of antennas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackSweepSpec {
    pub users: usize,
    pub total_antennas_grid: Vec<usize>,
    #[serde(default = "default_feedback_trials")]
    pub trials: usize,
    #[serde(default = "all_feedback_policies")]
    pub policies: Vec<FeedbackPolicy>,
    #[serde(default)]
    pub seed: u64,
}

fn default_rate_trials() -> usize {
    200
}

fn default_feedback_trials() -> usize {
    1000
}

fn all_rate_policies() -> Vec<RatePolicy> {
    vec![RatePolicy::Complete, RatePolicy::Incomplete]
}

fn all_feedback_policies() -> Vec<FeedbackPolicy> {
    vec![
        FeedbackPolicy::Complete,
        FeedbackPolicy::Heuristic,
        FeedbackPolicy::Exhaustive,
    ]
}

fn check_policies<T: Ord + Copy + fmt::Display>(p: &[T]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("at least one policy is required".into()));
    }
    let mut sorted = p.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("policy {} listed twice", w[0])));
    }
    Ok(())
}

impl RateSweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidArgument("the SNR grid is empty".into()));
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) || self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "the SNR grid must be finite and strictly increasing".into(),
            ));
        }
        check_policies(&self.policies)?;
        self.solver.validate()
    }

    /// Reads the key=value form (see [`parse_spec_file`]) or JSON.
    pub fn parse(text: &str) -> Result<Self> {
        if looks_like_json(text) {
            let spec: Self = serde_json::from_str(text)?;
            spec.validate()?;
            return Ok(spec);
        }
        let mut kv = parse_spec_file(text)?;
        let mut solver = SolverOptions::default();
        let spec = Self {
            config: take_required(&mut kv, "config")?.parse()?,
            snr_grid_db: list(&take_required(&mut kv, "snr_db")?, "snr_db")?,
            trials: take_parsed(&mut kv, "trials")?.unwrap_or_else(default_rate_trials),
            policies: match kv.remove("policies") {
                Some(v) => list(&v, "policies")?,
                None => all_rate_policies(),
            },
            seed: take_parsed(&mut kv, "seed")?.unwrap_or(0),
            solver: {
                if let Some(t) = take_parsed(&mut kv, "tolerance")? {
                    solver.tolerance = t;
                }
                if let Some(m) = take_parsed(&mut kv, "max_iterations")? {
                    solver.max_iterations = m;
                }
                solver
            },
        };
        reject_leftovers(kv)?;
        spec.validate()?;
        Ok(spec)
    }
}

impl FeedbackSweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.users == 0 {
            return Err(Error::InvalidArgument("at least one user is required".into()));
        }
        if self.total_antennas_grid.is_empty() {
            return Err(Error::InvalidArgument("the antenna grid is empty".into()));
        }
        let floor = self.users * (self.users + 1);
        if let Some(t) = self.total_antennas_grid.iter().find(|&&t| t < floor) {
            return Err(Error::InvalidArgument(format!(
                "{t} antennas cannot be feasible for K = {} (need at least {floor})",
                self.users
            )));
        }
        check_policies(&self.policies)
    }

    pub fn parse(text: &str) -> Result<Self> {
        if looks_like_json(text) {
            let spec: Self = serde_json::from_str(text)?;
            spec.validate()?;
            return Ok(spec);
        }
        let mut kv = parse_spec_file(text)?;
        let spec = Self {
            users: take_required(&mut kv, "users")?
                .parse()
                .map_err(|_| Error::InvalidArgument("users must be an integer".into()))?,
            total_antennas_grid: int_ranges(&take_required(&mut kv, "totals")?)?,
            trials: take_parsed(&mut kv, "trials")?.unwrap_or_else(default_feedback_trials),
            policies: match kv.remove("policies") {
                Some(v) => list(&v, "policies")?,
                None => all_feedback_policies(),
            },
            seed: take_parsed(&mut kv, "seed")?.unwrap_or(0),
        };
        reject_leftovers(kv)?;
        spec.validate()?;
        Ok(spec)
    }
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_spec_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", n + 1)))?;
        let key = k.trim().to_string();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::InvalidArgument(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(out)
}

fn take_required(kv: &mut BTreeMap<String, String>, key: &str) -> Result<String> {
    kv.remove(key)
        .ok_or_else(|| Error::InvalidArgument(format!("missing key `{key}`")))
}

fn take_parsed<T: FromStr>(kv: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    kv.remove(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad value `{v}` for `{key}`")))
        })
        .transpose()
}

fn list<T: FromStr>(v: &str, key: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad entry `{s}` in `{key}`")))
        })
        .collect()
}

/// Comma-separated integers; `a..b` expands to `a, a+1, …, b`.
fn int_ranges(v: &str) -> Result<Vec<usize>> {
    let bad = |s: &str| Error::InvalidArgument(format!("bad entry `{s}` in `totals`"));
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad(item))?;
                let b: usize = b.trim().parse().map_err(|_| bad(item))?;
                if b < a {
                    return Err(bad(item));
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad(item))?),
        }
    }
    Ok(out)
}

fn reject_leftovers(kv: BTreeMap<String, String>) -> Result<()> {
    match kv.keys().next() {
        Some(k) => Err(Error::InvalidArgument(format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_spec_key_value() {
        let s = RateSweepSpec::parse(
            "# rate sweep\nconfig = [(2,3).(2,4).(3,5).(3,2).(4,2)]\nsnr_db = 0, 10, 20\ntrials = 5\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(s.snr_grid_db, vec![0.0, 10.0, 20.0]);
        assert_eq!(s.trials, 5);
        assert_eq!(s.policies, vec![RatePolicy::Complete, RatePolicy::Incomplete]);
        assert_eq!(s.solver, SolverOptions::default());
        let back = RateSweepSpec::parse(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn feedback_spec_key_value() {
        let s = FeedbackSweepSpec::parse("users = 3\ntotals = 12..14, 18\npolicies = heuristic\n").unwrap();
        assert_eq!(s.total_antennas_grid, vec![12, 13, 14, 18]);
        assert_eq!(s.policies, vec![FeedbackPolicy::Heuristic]);
        assert_eq!(s.trials, 1000);
    }

    #[test]
    fn spec_errors() {
        assert!(RateSweepSpec::parse("config = [(2,2)^3]\n").is_err());
        assert!(RateSweepSpec::parse("config = [(2,2)^3]\nsnr_db = 10, 0\n").is_err());
        assert!(RateSweepSpec::parse("config = [(2,2)^3]\nsnr_db = 0\nfoo = 1\n").is_err());
        assert!(RateSweepSpec::parse("config = [(2,2)^3]\nsnr_db = 0\ntrials = 0\n").is_err());
        assert!(FeedbackSweepSpec::parse("users = 3\ntotals = 11\n").is_err());
        assert!(FeedbackSweepSpec::parse("users = 3\ntotals = 12\npolicies = complete, COMPLETE\n").is_err());
        assert!(FeedbackSweepSpec::parse(r#"{"users": 3, "total_antennas_grid": [12], "bogus": 1}"#).is_err());
    }
}
