use nalgebra::{DMatrix, DMatrixView};

use super::AntennaConfig;
use crate::error::{Error, Result};
use crate::{rng, C64};

/// The global channel `H` (`N_Tot × M_Tot`), partitioned into `K²` blocks
/// `H_ij` from transmitter `j` to receiver `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    entries: DMatrix<C64>,
    config: AntennaConfig,
    seed: Option<u64>,
}

impl ChannelMatrix {
    /// Draws i.i.d. `CN(0, 1)` entries. Block `(i, j)` is filled row by row
    /// from its own ChaCha20 stream (see [`rng::block_stream_id`]), so every
    /// block is reproducible on its own.
    pub fn draw(config: &AntennaConfig, seed: u64) -> Self {
        let mut entries = DMatrix::zeros(config.total_rx(), config.total_tx());
        let k = config.users();
        for i in 0..k {
            let (r0, rows) = (config.rx_offset(i), config.rx_antennas()[i]);
            for j in 0..k {
                let (c0, cols) = (config.tx_offset(j), config.tx_antennas()[j]);
                let mut stream = rng::stream(seed, rng::block_stream_id(i, j));
                for r in 0..rows {
                    for c in 0..cols {
                        entries[(r0 + r, c0 + c)] = rng::complex_gaussian(&mut stream);
                    }
                }
            }
        }
        Self {
            entries,
            config: config.clone(),
            seed: Some(seed),
        }
    }

    /// Wraps an explicit matrix (synthetic channels in tests and tools).
    pub fn from_entries(config: &AntennaConfig, entries: DMatrix<C64>) -> Result<Self> {
        if entries.shape() != (config.total_rx(), config.total_tx()) {
            return Err(Error::DimensionMismatch(format!(
                "channel is {:?}, configuration needs {}x{}",
                entries.shape(),
                config.total_rx(),
                config.total_tx()
            )));
        }
        Ok(Self {
            entries,
            config: config.clone(),
            seed: None,
        })
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn config(&self) -> &AntennaConfig {
        &self.config
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Block `H_{rx,tx}` (0-based indices).
    pub fn block(&self, rx: usize, tx: usize) -> Result<DMatrixView<'_, C64>> {
        let k = self.config.users();
        if rx >= k {
            return Err(Error::IndexOutOfRange {
                kind: "receiver",
                index: rx,
                users: k,
            });
        }
        if tx >= k {
            return Err(Error::IndexOutOfRange {
                kind: "transmitter",
                index: tx,
                users: k,
            });
        }
        Ok(self.entries.view(
            (self.config.rx_offset(rx), self.config.tx_offset(tx)),
            (self.config.rx_antennas()[rx], self.config.tx_antennas()[tx]),
        ))
    }

    /// Owned per-block copy of the channel.
    pub fn to_blocks(&self) -> BlockChannel {
        let k = self.config.users();
        let mut blocks = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                blocks.push(self.block(i, j).expect("in range").into_owned());
            }
        }
        BlockChannel {
            rx_dims: self.config.rx_antennas().to_vec(),
            tx_dims: self.config.tx_antennas().to_vec(),
            blocks,
        }
    }
}

/// A `K × K` grid of channel blocks with per-node dimensions.
///
/// This is the form the precoders consume. Effective channels (after
/// projecting nodes onto reduced subspaces) have smaller blocks than the
/// physical [`ChannelMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockChannel {
    rx_dims: Vec<usize>,
    tx_dims: Vec<usize>,
    blocks: Vec<DMatrix<C64>>,
}

impl BlockChannel {
    /// Builds a channel from row-major blocks (`blocks[i * K + j] = H_ij`).
    pub fn from_blocks(users: usize, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if users == 0 || blocks.len() != users * users {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks for {users} users",
                blocks.len()
            )));
        }
        let rx_dims: Vec<usize> = (0..users).map(|i| blocks[i * users].nrows()).collect();
        let tx_dims: Vec<usize> = (0..users).map(|j| blocks[j].ncols()).collect();
        for i in 0..users {
            for j in 0..users {
                if blocks[i * users + j].shape() != (rx_dims[i], tx_dims[j]) {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({}, {}) has shape {:?}, expected {}x{}",
                        i + 1,
                        j + 1,
                        blocks[i * users + j].shape(),
                        rx_dims[i],
                        tx_dims[j]
                    )));
                }
            }
        }
        Ok(Self {
            rx_dims,
            tx_dims,
            blocks,
        })
    }

    pub fn users(&self) -> usize {
        self.rx_dims.len()
    }

    pub fn rx_dims(&self) -> &[usize] {
        &self.rx_dims
    }

    pub fn tx_dims(&self) -> &[usize] {
        &self.tx_dims
    }

    /// `H_ij` (0-based). Panics when out of range.
    pub fn block(&self, i: usize, j: usize) -> &DMatrix<C64> {
        &self.blocks[i * self.users() + j]
    }
}
