use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{apply_reduction, AntennaConfig};
use crate::error::{Error, Result};
use crate::feasibility::{self, Classification};

use super::mask::{allocation_size, CsitAllocation};
use super::tight::{allocate_tight, tight_membership};

/// Upper bound on candidate removal vectors the exhaustive search may visit.
pub const EXHAUSTIVE_GUARD: u64 = 1_000_000;

/// Antennas set aside to turn a super-feasible configuration into a tight one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalPlan {
    /// One entry per removed receive antenna (0-based user index, sorted).
    #[serde(with = "crate::serde_util::one_based_vec")]
    pub rx_removals: Vec<usize>,
    /// One entry per removed transmit antenna (0-based user index, sorted).
    #[serde(with = "crate::serde_util::one_based_vec")]
    pub tx_removals: Vec<usize>,
    pub reduced_config: AntennaConfig,
}

impl RemovalPlan {
    /// The empty plan.
    pub fn identity(config: &AntennaConfig) -> Self {
        Self {
            rx_removals: vec![],
            tx_removals: vec![],
            reduced_config: config.clone(),
        }
    }

    fn from_lists(config: &AntennaConfig, mut rx: Vec<usize>, mut tx: Vec<usize>) -> Result<Self> {
        rx.sort_unstable();
        tx.sort_unstable();
        let reduced_config = apply_reduction(config, &rx, &tx)?;
        Ok(Self {
            rx_removals: rx,
            tx_removals: tx,
            reduced_config,
        })
    }

    pub fn removed(&self) -> usize {
        self.rx_removals.len() + self.tx_removals.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemovalMode {
    #[default]
    Heuristic,
    Exhaustive,
}

impl FromStr for RemovalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heuristic" => Ok(Self::Heuristic),
            "exhaustive" => Ok(Self::Exhaustive),
            other => Err(Error::InvalidArgument(format!("unknown removal mode `{other}`"))),
        }
    }
}

fn super_excess(config: &AntennaConfig) -> Result<usize> {
    match feasibility::is_feasible(config).classification {
        Classification::Infeasible => Err(Error::Infeasible(config.to_string())),
        Classification::Tight => Err(Error::NotSuper(config.to_string())),
        Classification::Super => Ok(feasibility::excess_antennas(config) as usize),
    }
}

/// Greedy removal, one antenna per step.
///
/// Each step recomputes which nodes sit in a tight sub-IC and removes an
/// antenna from the transmitter with the fewest antennas outside that set
/// (ties: fewer paired receive antennas, then lower index). When every
/// transmitter is a member, a non-member receiver is used instead, chosen by
/// the same rule.
pub fn remove_antennas_heuristic(config: &AntennaConfig) -> Result<RemovalPlan> {
    let steps = super_excess(config)?;
    let mut rx = Vec::new();
    let mut tx = Vec::new();
    let mut current = config.clone();
    for _ in 0..steps {
        let members = tight_membership(&current);
        let n = current.rx_antennas();
        let m = current.tx_antennas();
        let users = 0..current.users();
        let pick_tx = users
            .clone()
            .filter(|&k| !members.has_tx(k) && m[k] > 1)
            .min_by_key(|&k| (m[k], n[k], k));
        if let Some(k) = pick_tx {
            tx.push(k);
            current = apply_reduction(&current, &[], &[k])?;
            continue;
        }
        let pick_rx = users
            .filter(|&k| !members.has_rx(k) && n[k] > 1)
            .min_by_key(|&k| (n[k], m[k], k));
        match pick_rx {
            Some(k) => {
                rx.push(k);
                current = apply_reduction(&current, &[k], &[])?;
            }
            None => {
                return Err(Error::Invariant(format!(
                    "no removable antenna in {current} while reducing {config}"
                )))
            }
        }
    }
    if feasibility::is_feasible(&current).classification != Classification::Tight {
        return Err(Error::Invariant(format!(
            "removal on {config} ended at non-tight {current}"
        )));
    }
    RemovalPlan::from_lists(config, rx, tx)
}

/// Number of non-negative integer vectors with the given per-entry caps that
/// sum to `total`, saturating at `u64::MAX`.
fn count_bounded(caps: &[usize], total: usize) -> u64 {
    let mut ways = vec![0u64; total + 1];
    ways[0] = 1;
    for &cap in caps {
        let mut next = vec![0u64; total + 1];
        for (s, &w) in ways.iter().enumerate().filter(|(_, &w)| w > 0) {
            for take in 0..=cap.min(total - s) {
                next[s + take] = next[s + take].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[total]
}

/// Visits every vector `v ≤ caps` with `Σ v = total` in lexicographic order.
fn for_each_bounded(caps: &[usize], total: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn rec(
        caps: &[usize],
        suffix_cap: &[usize],
        left: usize,
        v: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        let d = v.len();
        if d == caps.len() {
            return if left == 0 { f(v) } else { Ok(()) };
        }
        let rest = suffix_cap[d + 1];
        let lo = left.saturating_sub(rest);
        for x in lo..=caps[d].min(left) {
            v.push(x);
            rec(caps, suffix_cap, left - x, v, f)?;
            v.pop();
        }
        Ok(())
    }
    let mut suffix = vec![0; caps.len() + 1];
    for d in (0..caps.len()).rev() {
        suffix[d] = suffix[d + 1] + caps[d];
    }
    rec(caps, &suffix, total, &mut Vec::with_capacity(caps.len()), f)
}

/// Tries every way of removing exactly `S` antennas and keeps the feasible
/// one whose tight allocation is smallest. Removal vectors are ordered as
/// `(rx counts, tx counts)`; ties go to the lexicographically smallest.
pub fn remove_antennas_exhaustive(config: &AntennaConfig) -> Result<RemovalPlan> {
    let steps = super_excess(config)?;
    let k = config.users();
    let caps: Vec<usize> = config
        .rx_antennas()
        .iter()
        .chain(config.tx_antennas())
        .map(|&a| a - 1)
        .collect();
    let candidates = count_bounded(&caps, steps);
    if candidates > EXHAUSTIVE_GUARD {
        return Err(Error::GuardExceeded(format!(
            "{candidates} removal vectors for {config} (limit {EXHAUSTIVE_GUARD})"
        )));
    }
    let mut best: Option<(usize, AntennaConfig, Vec<usize>)> = None;
    for_each_bounded(&caps, steps, &mut |v| {
        let rx: Vec<usize> = config.rx_antennas().iter().zip(&v[..k]).map(|(a, r)| a - r).collect();
        let tx: Vec<usize> = config.tx_antennas().iter().zip(&v[k..]).map(|(a, r)| a - r).collect();
        let reduced = AntennaConfig::new(rx, tx)?;
        if !feasibility::is_feasible(&reduced).feasible {
            return Ok(());
        }
        let size = allocation_size(&reduced, &allocate_tight(&reduced)?);
        if best.as_ref().is_none_or(|(b, _, _)| size < *b) {
            best = Some((size, reduced, v.to_vec()));
        }
        Ok(())
    })?;
    let (_, _, v) =
        best.ok_or_else(|| Error::Invariant(format!("no feasible reduction of {config} removes {steps} antennas")))?;
    let expand = |counts: &[usize]| -> Vec<usize> {
        counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
            .collect()
    };
    RemovalPlan::from_lists(config, expand(&v[..k]), expand(&v[k..]))
}

/// CSIT allocation for any feasible configuration.
///
/// Tight configurations are allocated directly with an empty plan; for
/// super-feasible ones `S` antennas are first set aside with the chosen
/// removal rule and the reduced configuration is allocated. Sizes of the
/// result are measured on `plan.reduced_config`.
pub fn allocate_super(config: &AntennaConfig, mode: RemovalMode) -> Result<(RemovalPlan, CsitAllocation)> {
    let plan = match feasibility::is_feasible(config).classification {
        Classification::Infeasible => return Err(Error::Infeasible(config.to_string())),
        Classification::Tight => RemovalPlan::identity(config),
        Classification::Super => match mode {
            RemovalMode::Heuristic => remove_antennas_heuristic(config)?,
            RemovalMode::Exhaustive => remove_antennas_exhaustive(config)?,
        },
    };
    let alloc = allocate_tight(&plan.reduced_config)?;
    Ok((plan, alloc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::complete_size;

    fn cfg(s: &str) -> AntennaConfig {
        s.parse().unwrap()
    }

    #[test]
    fn heuristic_three_user_example() {
        let c = cfg("[(2,2).(3,2).(2,3)]");
        let plan = remove_antennas_heuristic(&c).unwrap();
        assert_eq!(plan.tx_removals, vec![0, 2]);
        assert!(plan.rx_removals.is_empty());
        assert_eq!(plan.reduced_config, cfg("[(2,1).(3,2).(2,2)]"));
        let (_, a) = allocate_super(&c, RemovalMode::Heuristic).unwrap();
        assert_eq!(allocation_size(&plan.reduced_config, &a), 20);
        assert_eq!(complete_size(&c), 99);
    }

    #[test]
    fn exhaustive_never_worse() {
        for s in [
            "[(2,2).(3,2).(2,3)]",
            "[(3,3)^3]",
            "[(2,3).(3,3).(2,2)]",
            "[(3,2).(2,3)]",
        ] {
            let c = cfg(s);
            let (hp, ha) = allocate_super(&c, RemovalMode::Heuristic).unwrap();
            let (ep, ea) = allocate_super(&c, RemovalMode::Exhaustive).unwrap();
            let h = allocation_size(&hp.reduced_config, &ha);
            let e = allocation_size(&ep.reduced_config, &ea);
            assert!(e <= h, "{s}: exhaustive {e} > heuristic {h}");
            assert_eq!(ep.removed() as i64, feasibility::excess_antennas(&c));
        }
        let c = cfg("[(2,2).(3,2).(2,3)]");
        let (ep, ea) = allocate_super(&c, RemovalMode::Exhaustive).unwrap();
        assert_eq!(allocation_size(&ep.reduced_config, &ea), 14);
    }

    #[test]
    fn wrong_classes_rejected() {
        assert!(matches!(
            remove_antennas_heuristic(&cfg("[(2,2)^3]")),
            Err(Error::NotSuper(_))
        ));
        assert!(matches!(
            remove_antennas_heuristic(&cfg("[(2,2)^4]")),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            allocate_super(&cfg("[(2,2)^4]"), RemovalMode::Heuristic),
            Err(Error::Infeasible(_))
        ));
        let (p, _) = allocate_super(&cfg("[(2,2)^3]"), RemovalMode::Exhaustive).unwrap();
        assert_eq!(p.removed(), 0);
    }

    #[test]
    fn guard_trips() {
        let c = AntennaConfig::homogeneous(12, 12, 6).unwrap();
        assert!(matches!(remove_antennas_exhaustive(&c), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn bounded_enumeration() {
        let caps = [1, 2, 0, 3];
        let mut seen = Vec::new();
        for_each_bounded(&caps, 3, &mut |v| {
            seen.push(v.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len() as u64, count_bounded(&caps, 3));
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        assert!(seen.iter().all(|v| v.iter().sum::<usize>() == 3));
    }

    #[test]
    fn plan_json() {
        let plan = remove_antennas_heuristic(&cfg("[(2,2).(3,2).(2,3)]")).unwrap();
        let js = serde_json::to_value(&plan).unwrap();
        assert_eq!(js["tx_removals"], serde_json::json!([1, 3]));
        assert_eq!(js["reduced_config"], serde_json::json!("[(2,1).(3,2).(2,2)]"));
    }
}
