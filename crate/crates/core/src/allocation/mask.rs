use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{AntennaConfig, SubIc};
use crate::error::{Error, Result};

/// Which part of `H` a transmitter knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MaskScope {
    /// All interfering blocks `H_xy`, `x ∈ S_RX`, `y ∈ S_TX`, `x ≠ y`.
    Sets(SubIc),
    /// Every interfering block; same expansion as `Sets` over the full IC.
    Complete,
}

/// CSIT mask `A^(j)` of transmitter `owner_tx` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MaskRepr", into = "MaskRepr")]
pub struct CsitMask {
    pub owner_tx: usize,
    pub scope: MaskScope,
}

impl CsitMask {
    pub fn sets(owner_tx: usize, s: SubIc) -> Self {
        Self {
            owner_tx,
            scope: MaskScope::Sets(s),
        }
    }

    pub fn complete(owner_tx: usize) -> Self {
        Self {
            owner_tx,
            scope: MaskScope::Complete,
        }
    }

    /// The sub-IC the mask covers; `Complete` is the full IC.
    pub fn subic(&self, users: usize) -> SubIc {
        match self.scope {
            MaskScope::Sets(s) => s,
            MaskScope::Complete => SubIc::full(users),
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.scope, MaskScope::Complete)
    }
}

#[derive(Serialize, Deserialize)]
struct MaskRepr {
    #[serde(with = "crate::serde_util::one_based")]
    tx: usize,
    kind: MaskKind,
    #[serde(flatten)]
    sets: Option<SubIc>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
enum MaskKind {
    Sets,
    Complete,
}

impl From<CsitMask> for MaskRepr {
    fn from(m: CsitMask) -> Self {
        match m.scope {
            MaskScope::Sets(s) => MaskRepr {
                tx: m.owner_tx,
                kind: MaskKind::Sets,
                sets: Some(s),
            },
            MaskScope::Complete => MaskRepr {
                tx: m.owner_tx,
                kind: MaskKind::Complete,
                sets: None,
            },
        }
    }
}

impl TryFrom<MaskRepr> for CsitMask {
    type Error = String;

    fn try_from(r: MaskRepr) -> std::result::Result<Self, String> {
        match (r.kind, r.sets) {
            (MaskKind::Complete, _) => Ok(CsitMask::complete(r.tx)),
            (MaskKind::Sets, Some(s)) => Ok(CsitMask::sets(r.tx, s)),
            (MaskKind::Sets, None) => Err("SETS mask needs rx_set and tx_set".into()),
        }
    }
}

/// One mask per transmitter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CsitMask>", into = "Vec<CsitMask>")]
pub struct CsitAllocation {
    masks: Vec<CsitMask>,
}

impl CsitAllocation {
    /// Fails unless `masks[j].owner_tx == j` for every `j`.
    pub fn new(masks: Vec<CsitMask>) -> Result<Self> {
        if let Some((j, m)) = masks.iter().enumerate().find(|(j, m)| m.owner_tx != *j) {
            return Err(Error::InvalidArgument(format!(
                "mask at position {} belongs to transmitter {}",
                j + 1,
                m.owner_tx + 1
            )));
        }
        Ok(Self { masks })
    }

    /// Every transmitter knows every interfering block.
    pub fn complete(users: usize) -> Self {
        Self {
            masks: (0..users).map(CsitMask::complete).collect(),
        }
    }

    pub fn masks(&self) -> &[CsitMask] {
        &self.masks
    }

    pub fn users(&self) -> usize {
        self.masks.len()
    }

    /// Checks the allocation against a configuration.
    pub fn validate(&self, config: &AntennaConfig) -> Result<()> {
        if self.users() != config.users() {
            return Err(Error::DimensionMismatch(format!(
                "allocation has {} masks for {} users",
                self.users(),
                config.users()
            )));
        }
        for m in &self.masks {
            if !m.subic(config.users()).fits(config.users()) {
                return Err(Error::InvalidArgument(format!(
                    "mask of transmitter {} references users beyond K = {}",
                    m.owner_tx + 1,
                    config.users()
                )));
            }
        }
        Ok(())
    }
}

impl From<CsitAllocation> for Vec<CsitMask> {
    fn from(a: CsitAllocation) -> Self {
        a.masks
    }
}

impl TryFrom<Vec<CsitMask>> for CsitAllocation {
    type Error = Error;

    fn try_from(masks: Vec<CsitMask>) -> Result<Self> {
        Self::new(masks)
    }
}

/// Boolean `N_Tot × M_Tot` mask: ones on every block `(x, y)` with
/// `x ∈ S_RX`, `y ∈ S_TX`, `x ≠ y`.
pub fn expand_mask(config: &AntennaConfig, mask: &CsitMask) -> DMatrix<bool> {
    let s = mask.subic(config.users());
    let mut out = DMatrix::from_element(config.total_rx(), config.total_tx(), false);
    for x in s.rx_indices() {
        for y in s.tx_indices().filter(|&y| y != x) {
            out.view_mut(
                (config.rx_offset(x), config.tx_offset(y)),
                (config.rx_antennas()[x], config.tx_antennas()[y]),
            )
            .fill(true);
        }
    }
    out
}

/// Number of channel coefficients a single mask covers.
pub fn mask_size(config: &AntennaConfig, mask: &CsitMask) -> usize {
    let s = mask.subic(config.users());
    let (n, m) = (config.rx_antennas(), config.tx_antennas());
    s.rx_indices()
        .map(|x| s.tx_indices().filter(|&y| y != x).map(|y| n[x] * m[y]).sum::<usize>())
        .sum()
}

/// `Size(A) = Σ_j ‖A^(j)‖²_F`.
pub fn allocation_size(config: &AntennaConfig, alloc: &CsitAllocation) -> usize {
    alloc.masks().iter().map(|m| mask_size(config, m)).sum()
}

/// Size of the complete allocation, `K (N_Tot M_Tot − Σ N_i M_i)`.
pub fn complete_size(config: &AntennaConfig) -> usize {
    let direct: usize = config.pairs().map(|(n, m)| n * m).sum();
    config.users() * (config.total_rx() * config.total_tx() - direct)
}
