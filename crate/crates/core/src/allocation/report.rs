use serde::{Deserialize, Serialize};

use crate::channel::AntennaConfig;
use crate::error::{Error, Result};
use crate::feasibility::{self, Classification};

use super::mask::{allocation_size, complete_size, CsitAllocation};
use super::removal::{allocate_super, RemovalMode, RemovalPlan};

/// Everything `allocate` reports for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationReport {
    pub config: AntennaConfig,
    pub classification: Classification,
    pub mode: RemovalMode,
    pub plan: RemovalPlan,
    pub masks: CsitAllocation,
    /// Allocation size measured on `plan.reduced_config`.
    pub size: usize,
    /// Complete-CSIT size of the original configuration.
    pub complete_size: usize,
    /// `1 − size / complete_size`; zero when the complete size is zero.
    pub reduction_ratio: f64,
}

impl AllocationReport {
    pub fn build(config: &AntennaConfig, mode: RemovalMode) -> Result<Self> {
        let classification = feasibility::is_feasible(config).classification;
        let (plan, masks) = allocate_super(config, mode)?;
        let size = allocation_size(&plan.reduced_config, &masks);
        let complete = complete_size(config);
        let reduction_ratio = if complete == 0 {
            0.0
        } else {
            1.0 - size as f64 / complete as f64
        };
        Ok(Self {
            config: config.clone(),
            classification,
            mode,
            plan,
            masks,
            size,
            complete_size: complete,
            reduction_ratio,
        })
    }

    /// Checks the internal consistency of a report read back from JSON.
    pub fn validate(&self) -> Result<()> {
        if self.plan.reduced_config.users() != self.config.users() {
            return Err(Error::DimensionMismatch(
                "reduced configuration has a different K".into(),
            ));
        }
        self.masks.validate(&self.plan.reduced_config)?;
        let size = allocation_size(&self.plan.reduced_config, &self.masks);
        if size != self.size {
            return Err(Error::InvalidArgument(format!(
                "report claims size {} but its masks cover {size}",
                self.size
            )));
        }
        Ok(())
    }
}
