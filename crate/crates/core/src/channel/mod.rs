//! Antenna configurations, the random MIMO channel and the subspace
//! reduction used when antennas are set aside.

mod config;
mod matrix;
mod subic;
mod subspace;

pub use config::{AntennaConfig, MAX_USERS};
pub use matrix::{BlockChannel, ChannelMatrix};
pub use subic::SubIc;
pub use subspace::{max_power_subspace, SubspaceBasis};

use crate::error::{Error, Result};

/// Removes one antenna per listed index (indices may repeat).
///
/// Returns the reduced configuration `[∏(N'_k, M'_k)]`; fails if any count
/// would drop below one.
pub fn apply_reduction(config: &AntennaConfig, rx_removals: &[usize], tx_removals: &[usize]) -> Result<AntennaConfig> {
    let k = config.users();
    let mut rx = config.rx_antennas().to_vec();
    let mut tx = config.tx_antennas().to_vec();
    for (counts, removals, kind) in [
        (&mut rx, rx_removals, "receiver"),
        (&mut tx, tx_removals, "transmitter"),
    ] {
        for &i in removals {
            if i >= k {
                return Err(Error::IndexOutOfRange {
                    kind,
                    index: i,
                    users: k,
                });
            }
            if counts[i] <= 1 {
                return Err(Error::InvalidArgument(format!(
                    "removing another antenna at {kind} {} would leave none",
                    i + 1
                )));
            }
            counts[i] -= 1;
        }
    }
    AntennaConfig::new(rx, tx)
}
