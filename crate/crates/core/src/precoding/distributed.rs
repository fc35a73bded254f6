use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Serialize;

use crate::allocation::{CsitAllocation, RemovalPlan};
use crate::channel::{max_power_subspace, AntennaConfig, BlockChannel, ChannelMatrix, SubIc, SubspaceBasis};
use crate::error::{Error, Result};
use crate::linalg::basis_vector;
use crate::C64;

use super::beamformers::BeamformerSet;
use super::metrics::rx_filters;
use super::solver::{leakage, min_leakage_solve, LeakageTrace, SolverOptions};

/// Orthonormal bases of the retained dimensions at every node; `None`
/// means the node keeps all its antennas.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub tx: Vec<Option<SubspaceBasis>>,
    pub rx: Vec<Option<SubspaceBasis>>,
}

impl Reduction {
    /// Keeps, at TX `k`, the `M'_k` dominant right-singular directions of
    /// `H_kk` and, at RX `k`, the `N'_k` dominant left-singular directions.
    pub fn from_plan(h: &ChannelMatrix, plan: &RemovalPlan) -> Result<Self> {
        let config = h.config();
        let reduced = &plan.reduced_config;
        if reduced.users() != config.users() {
            return Err(Error::DimensionMismatch(format!(
                "reduced configuration {reduced} does not match {config}"
            )));
        }
        let mut tx = Vec::with_capacity(config.users());
        let mut rx = Vec::with_capacity(config.users());
        for k in 0..config.users() {
            let direct = h.block(k, k)?.into_owned();
            let (m, m2) = (config.tx_antennas()[k], reduced.tx_antennas()[k]);
            let (n, n2) = (config.rx_antennas()[k], reduced.rx_antennas()[k]);
            if m2 > m || n2 > n {
                return Err(Error::DimensionMismatch(format!(
                    "reduced configuration {reduced} adds antennas to {config}"
                )));
            }
            tx.push(if m2 < m {
                Some(max_power_subspace(&direct, m2)?)
            } else {
                None
            });
            rx.push(if n2 < n {
                Some(max_power_subspace(&direct.adjoint(), n2)?)
            } else {
                None
            });
        }
        Ok(Self { tx, rx })
    }

    /// `U_i^H H_ik V_k` for every block.
    pub fn project(&self, h: &BlockChannel) -> Result<BlockChannel> {
        let k_users = h.users();
        let mut blocks = Vec::with_capacity(k_users * k_users);
        for i in 0..k_users {
            for k in 0..k_users {
                let mut b = h.block(i, k).clone();
                if let Some(u) = &self.rx[i] {
                    b = u.columns().ad_mul(&b);
                }
                if let Some(v) = &self.tx[k] {
                    b *= v.columns();
                }
                blocks.push(b);
            }
        }
        BlockChannel::from_blocks(k_users, blocks)
    }

    fn lift_tx(&self, k: usize, t: &DVector<C64>) -> DVector<C64> {
        match &self.tx[k] {
            Some(v) => v.lift(t),
            None => t.clone(),
        }
    }
}

/// The solve TX `j` runs for its own beamformer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubSolve {
    #[serde(with = "crate::serde_util::one_based")]
    pub tx: usize,
    pub subic: SubIc,
    /// Transmitters whose beamformers were frozen in this solve.
    #[serde(with = "crate::serde_util::one_based_vec")]
    pub frozen: Vec<usize>,
    /// `None` when the mask carries no interfering block.
    pub trace: Option<LeakageTrace>,
}

/// A beamformer recomputed by another transmitter during its recursion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Replica {
    /// The transmitter that recomputed it.
    #[serde(with = "crate::serde_util::one_based")]
    pub holder: usize,
    #[serde(with = "crate::serde_util::one_based")]
    pub tx: usize,
    /// Bit-exact agreement with the beamformer `tx` computed for itself.
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributedPrecoding {
    /// Transmit beamformers in the physical antenna space and the receive
    /// filters computed from them over the full channel.
    pub beamformers: BeamformerSet,
    /// Leakage of `beamformers` over the full channel.
    pub leakage: f64,
    pub solves: Vec<SubSolve>,
    pub replicas: Vec<Replica>,
}

impl DistributedPrecoding {
    pub fn replication_consistent(&self) -> bool {
        self.replicas.iter().all(|r| r.matches)
    }

    /// True when every sub-solve reached its tolerance.
    pub fn all_solves_converged(&self) -> bool {
        self.solves
            .iter()
            .all(|s| s.trace.as_ref().is_none_or(|t| t.converged))
    }
}

struct Recursion<'a> {
    h: &'a BlockChannel,
    masks: Vec<SubIc>,
    opts: &'a SolverOptions,
}

type Memo = BTreeMap<usize, (DVector<C64>, Option<LeakageTrace>, Vec<usize>)>;

impl Recursion<'_> {
    /// Transmitters whose masks lie strictly inside `S^(j)` on both sides.
    fn contained(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        let s = self.masks[j];
        (0..self.masks.len()).filter(move |&k| k != j && self.masks[k].strictly_within(s))
    }

    fn solve(&self, j: usize, memo: &mut Memo, active: u32) -> Result<DVector<C64>> {
        if let Some((t, _, _)) = memo.get(&j) {
            return Ok(t.clone());
        }
        if active & (1 << j) != 0 {
            return Err(Error::Invariant(format!(
                "cyclic mask containment at transmitter {}",
                j + 1
            )));
        }
        let s = self.masks[j];
        let m = self.h.tx_dims()[j];
        if s.is_degenerate() {
            let t = basis_vector(m, 0);
            memo.insert(j, (t.clone(), None, vec![]));
            return Ok(t);
        }
        if !s.has_tx(j) {
            return Err(Error::InvalidArgument(format!(
                "mask {s} of transmitter {} does not contain it",
                j + 1
            )));
        }
        let frozen: Vec<usize> = self.contained(j).filter(|&k| s.has_tx(k)).collect();
        let mut fixed = Vec::with_capacity(frozen.len());
        for &k in &frozen {
            fixed.push((k, self.solve(k, memo, active | 1 << j)?));
        }
        let (b, trace) = min_leakage_solve(self.h, s, &fixed, self.opts)?;
        let t = b.tx(j).expect("present").clone();
        memo.insert(j, (t.clone(), Some(trace), frozen));
        Ok(t)
    }
}

/// Precoding with incomplete CSIT.
///
/// Every transmitter `j` works on its own: it recomputes the beamformers of
/// the transmitters whose masks are strictly contained in its own (which
/// they obtain the same way), freezes those inside its mask, and runs the
/// min-leakage solve over its mask with the rest free. With a removal plan,
/// the solves run on the channel projected onto the retained subspaces and
/// the result is lifted back. Final receive filters come from the full
/// channel.
pub fn distributed_precode(
    config: &AntennaConfig,
    alloc: &CsitAllocation,
    plan: Option<&RemovalPlan>,
    h: &ChannelMatrix,
    opts: &SolverOptions,
) -> Result<DistributedPrecoding> {
    opts.validate()?;
    if h.config() != config {
        return Err(Error::DimensionMismatch(format!(
            "channel drawn for {} used with {config}",
            h.config()
        )));
    }
    let working = plan.map_or(config, |p| &p.reduced_config);
    alloc.validate(working)?;
    let full = h.to_blocks();
    let reduction = plan.map(|p| Reduction::from_plan(h, p)).transpose()?;
    let effective = match &reduction {
        Some(r) => r.project(&full)?,
        None => full.clone(),
    };
    let k_users = config.users();
    let rec = Recursion {
        h: &effective,
        masks: alloc.masks().iter().map(|m| m.subic(k_users)).collect(),
        opts,
    };

    let mut own = Vec::with_capacity(k_users);
    let mut solves = Vec::with_capacity(k_users);
    let mut copies = Vec::new();
    for j in 0..k_users {
        let mut memo = Memo::new();
        own.push(rec.solve(j, &mut memo, 0)?);
        for (k, (t, trace, frozen)) in memo {
            if k == j {
                solves.push(SubSolve {
                    tx: j,
                    subic: rec.masks[j],
                    frozen,
                    trace,
                });
            } else {
                copies.push((j, k, t));
            }
        }
    }
    let replicas = copies
        .into_iter()
        .map(|(holder, k, t)| Replica {
            holder,
            tx: k,
            matches: t == own[k],
        })
        .collect();

    let tx: Vec<DVector<C64>> = match &reduction {
        Some(r) => own.iter().enumerate().map(|(k, t)| r.lift_tx(k, t)).collect(),
        None => own,
    };
    let rx = rx_filters(&full, &tx)?;
    let beamformers = BeamformerSet::full(tx, rx)?;
    let leakage = leakage(&full, &beamformers)?;
    Ok(DistributedPrecoding {
        beamformers,
        leakage,
        solves,
        replicas,
    })
}

/// Full-CSIT precoding: one min-leakage solve over the whole IC, followed
/// by the receive filters for the final transmit beamformers.
pub fn complete_precode(h: &ChannelMatrix, opts: &SolverOptions) -> Result<(BeamformerSet, LeakageTrace)> {
    let full = h.to_blocks();
    let (b, trace) = min_leakage_solve(&full, SubIc::full(full.users()), &[], opts)?;
    let tx: Vec<DVector<C64>> = (0..full.users()).map(|k| b.tx(k).expect("present").clone()).collect();
    let rx = rx_filters(&full, &tx)?;
    Ok((BeamformerSet::full(tx, rx)?, trace))
}
