use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channel::{BlockChannel, SubIc};
use crate::error::{Error, Result};
use crate::linalg::{add_outer, eig_min};
use crate::rng;
use crate::C64;

use super::beamformers::{check_unit, BeamformerSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Stop once the leakage drops to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Base seed for the initial transmit beamformers.
    pub init_seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 5000,
            init_seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance {} is negative",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Leakage after every iteration of the solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageTrace {
    pub values: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl LeakageTrace {
    pub fn final_leakage(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// `I_IA = Σ_{i ∈ S_RX} Σ_{k ∈ S_TX, k ≠ i} |g_i^H H_ik t_k|²` over the
/// nodes present in `b`.
pub fn leakage(h: &BlockChannel, b: &BeamformerSet) -> Result<f64> {
    check_dims(h, b)?;
    Ok(leakage_slots(h, b.tx_slots(), b.rx_slots()))
}

pub(crate) fn leakage_slots(h: &BlockChannel, tx: &[Option<DVector<C64>>], rx: &[Option<DVector<C64>>]) -> f64 {
    let mut total = 0.0;
    for (i, g) in rx.iter().enumerate() {
        let Some(g) = g else { continue };
        for (k, t) in tx.iter().enumerate().filter(|&(k, _)| k != i) {
            if let Some(t) = t {
                total += (h.block(i, k) * t).dotc(g).norm_sqr();
            }
        }
    }
    total
}

fn check_dims(h: &BlockChannel, b: &BeamformerSet) -> Result<()> {
    if b.users() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} beamformer slots for a {}-user channel",
            b.users(),
            h.users()
        )));
    }
    for k in 0..h.users() {
        if let Some(t) = b.tx(k) {
            if t.len() != h.tx_dims()[k] {
                return Err(Error::DimensionMismatch(format!(
                    "t_{} has length {}, expected {}",
                    k + 1,
                    t.len(),
                    h.tx_dims()[k]
                )));
            }
        }
        if let Some(g) = b.rx(k) {
            if g.len() != h.rx_dims()[k] {
                return Err(Error::DimensionMismatch(format!(
                    "g_{} has length {}, expected {}",
                    k + 1,
                    g.len(),
                    h.rx_dims()[k]
                )));
            }
        }
    }
    Ok(())
}

/// Seed of the solve over sub-IC `s`.
pub(crate) fn subic_seed(init_seed: u64, s: SubIc) -> u64 {
    rng::derive_seed(init_seed, &[s.rx_mask() as u64, s.tx_mask() as u64])
}

/// Deterministic random unit vector of length `n`.
pub(crate) fn random_unit(seed: u64, stream: u64, n: usize) -> DVector<C64> {
    let mut r = rng::stream(seed, stream);
    let v = DVector::from_fn(n, |_, _| rng::complex_gaussian(&mut r));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// `g_i ← eig_min(Σ_{k ∈ tx, k ≠ i} H_ik t_k t_k^H H_ik^H)`.
fn rx_update(h: &BlockChannel, tx: &[Option<DVector<C64>>], present_tx: SubIc, i: usize) -> DVector<C64> {
    let n = h.rx_dims()[i];
    let mut cov = DMatrix::zeros(n, n);
    for k in present_tx.tx_indices().filter(|&k| k != i) {
        add_outer(&mut cov, &(h.block(i, k) * tx[k].as_ref().expect("present")));
    }
    eig_min(&cov)
}

/// Min-leakage alternating minimization over the sub-IC `present`.
///
/// Receivers are updated first from the current transmit beamformers, then
/// every free transmitter; interference sums run over present nodes only.
/// Beamformers listed in `fixed_tx` are never touched. Free transmitters
/// start from unit vectors drawn from `(opts.init_seed, present, index)`.
pub fn min_leakage_solve(
    h: &BlockChannel,
    present: SubIc,
    fixed_tx: &[(usize, DVector<C64>)],
    opts: &SolverOptions,
) -> Result<(BeamformerSet, LeakageTrace)> {
    opts.validate()?;
    let k_users = h.users();
    if present.is_degenerate() {
        return Err(Error::EmptyChannel);
    }
    if !present.fits(k_users) {
        return Err(Error::DimensionMismatch(format!(
            "sub-IC {present} exceeds K = {k_users}"
        )));
    }
    let mut tx: Vec<Option<DVector<C64>>> = vec![None; k_users];
    let mut is_fixed = 0u32;
    for (k, v) in fixed_tx {
        if !present.has_tx(*k) {
            return Err(Error::InvalidArgument(format!(
                "fixed transmitter {} is not present",
                k + 1
            )));
        }
        if v.len() != h.tx_dims()[*k] {
            return Err(Error::DimensionMismatch(format!(
                "fixed t_{} has length {}, expected {}",
                k + 1,
                v.len(),
                h.tx_dims()[*k]
            )));
        }
        check_unit(v, "fixed transmit beamformer", *k)?;
        tx[*k] = Some(v.clone());
        is_fixed |= 1 << k;
    }
    let seed = subic_seed(opts.init_seed, present);
    let free: Vec<usize> = present.tx_indices().filter(|&k| is_fixed & (1 << k) == 0).collect();
    for &k in &free {
        tx[k] = Some(random_unit(seed, k as u64, h.tx_dims()[k]));
    }

    let tx_only = SubIc::from_masks(0, present.tx_mask());
    let rx_only = SubIc::from_masks(present.rx_mask(), 0);
    let mut rx: Vec<Option<DVector<C64>>> = vec![None; k_users];
    let mut values = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        for i in present.rx_indices() {
            rx[i] = Some(rx_update(h, &tx, tx_only, i));
        }
        for &k in &free {
            let m = h.tx_dims()[k];
            let mut cov = DMatrix::zeros(m, m);
            for i in rx_only.rx_indices().filter(|&i| i != k) {
                add_outer(&mut cov, &h.block(i, k).ad_mul(rx[i].as_ref().expect("present")));
            }
            tx[k] = Some(eig_min(&cov));
        }
        let value = leakage_slots(h, &tx, &rx);
        values.push(value);
        if value <= opts.tolerance {
            converged = true;
            break;
        }
        // With nothing left to adapt, further iterations repeat the same step.
        if free.is_empty() {
            break;
        }
    }
    let iterations_used = values.len();
    Ok((
        BeamformerSet::from_parts(tx, rx),
        LeakageTrace {
            values,
            converged,
            iterations_used,
        },
    ))
}
