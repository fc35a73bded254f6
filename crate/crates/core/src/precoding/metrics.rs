use nalgebra::{DMatrix, DVector};

use crate::channel::BlockChannel;
use crate::error::{Error, Result};
use crate::linalg::{add_outer, eig_min};
use crate::C64;

use super::beamformers::BeamformerSet;

/// Each receiver's minimum-interference filter given all transmit
/// beamformers: `g_i = eig_min(Σ_{k≠i} H_ik t_k t_k^H H_ik^H)`.
pub fn rx_filters(h: &BlockChannel, tx: &[DVector<C64>]) -> Result<Vec<DVector<C64>>> {
    if tx.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} beamformers for {} users",
            tx.len(),
            h.users()
        )));
    }
    for (k, t) in tx.iter().enumerate() {
        if t.len() != h.tx_dims()[k] {
            return Err(Error::DimensionMismatch(format!(
                "t_{} has length {}, expected {}",
                k + 1,
                t.len(),
                h.tx_dims()[k]
            )));
        }
    }
    Ok((0..h.users())
        .map(|i| {
            let n = h.rx_dims()[i];
            let mut cov = DMatrix::zeros(n, n);
            for (k, t) in tx.iter().enumerate().filter(|&(k, _)| k != i) {
                add_outer(&mut cov, &(h.block(i, k) * t));
            }
            eig_min(&cov)
        })
        .collect())
}

/// Per-user rate with residual interference treated as noise:
/// `R_i = log2(1 + P |g_i^H H_ii t_i|² / (1 + P Σ_{j≠i} |g_i^H H_ij t_j|²))`.
pub fn user_rates(h: &BlockChannel, b: &BeamformerSet, snr: f64) -> Result<Vec<f64>> {
    if snr.is_nan() || snr < 0.0 {
        return Err(Error::InvalidArgument(format!("power {snr} must be non-negative")));
    }
    if b.users() != h.users() || !b.is_complete() {
        return Err(Error::InvalidArgument("rates need every beamformer and filter".into()));
    }
    let gain = |i: usize, j: usize| -> Result<f64> {
        let (g, t) = (b.rx(i).expect("complete"), b.tx(j).expect("complete"));
        if g.len() != h.rx_dims()[i] || t.len() != h.tx_dims()[j] {
            return Err(Error::DimensionMismatch(format!("block ({}, {})", i + 1, j + 1)));
        }
        Ok((h.block(i, j) * t).dotc(g).norm_sqr())
    };
    (0..h.users())
        .map(|i| {
            let signal = gain(i, i)?;
            let mut interference = 0.0;
            for j in (0..h.users()).filter(|&j| j != i) {
                interference += gain(i, j)?;
            }
            Ok((1.0 + snr * signal / (1.0 + snr * interference)).log2())
        })
        .collect()
}

/// `10^(db/10)`.
pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
