//! Exponentially smoothed estimate of a mmW link's LoS fraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SMOOTHING: f64 = 0.1;
pub const DEFAULT_WINDOW_SLOTS: u32 = 100;
/// Estimate before any observation.
pub const INITIAL_ESTIMATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosEstimate {
    pub value: f64,
    /// Weight of the newest window, in `[0, 1]`.
    pub smoothing: f64,
    /// Slots per association frame.
    pub window_slots: u32,
}

/// How estimates evolve for links the UE is not associated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    /// Genie: the estimate is the true LoS probability.
    #[default]
    Oracle,
    /// Unassociated links decay toward zero.
    Literal,
    /// Unassociated links keep their last value.
    Freeze,
}

impl LosEstimate {
    pub fn new(value: f64, smoothing: f64, window_slots: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain(format!("LoS estimate {value} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&smoothing) {
            return Err(Error::Domain(format!("smoothing factor {smoothing} outside [0, 1]")));
        }
        if window_slots == 0 {
            return Err(Error::Domain("window must contain at least one slot".into()));
        }
        Ok(LosEstimate {
            value,
            smoothing,
            window_slots,
        })
    }

    pub fn prior(smoothing: f64, window_slots: u32) -> Result<Self> {
        Self::new(INITIAL_ESTIMATE, smoothing, window_slots)
    }
}

/// One frame of smoothing: `lambda * (k_t * x / k) + (1 - lambda) * prev`.
pub fn update_f(prev: &LosEstimate, los_slots: u32, associated: bool) -> Result<LosEstimate> {
    if los_slots > prev.window_slots {
        return Err(Error::Domain(format!(
            "{los_slots} LoS slots in a window of {}",
            prev.window_slots
        )));
    }
    let observed = if associated {
        f64::from(los_slots) / f64::from(prev.window_slots)
    } else {
        0.0
    };
    Ok(LosEstimate {
        value: prev.smoothing * observed + (1.0 - prev.smoothing) * prev.value,
        ..*prev
    })
}

/// [`update_f`] under `mode`. Oracle estimates are never updated.
pub fn update_with_mode(
    prev: &LosEstimate,
    los_slots: u32,
    associated: bool,
    mode: EstimatorMode,
) -> Result<LosEstimate> {
    match mode {
        EstimatorMode::Oracle => Ok(*prev),
        EstimatorMode::Freeze if !associated => Ok(*prev),
        EstimatorMode::Literal | EstimatorMode::Freeze => update_f(prev, los_slots, associated),
    }
}

/// Estimate pinned to the true probability.
pub fn oracle_f(rho: f64) -> Result<LosEstimate> {
    LosEstimate::new(rho, DEFAULT_SMOOTHING, DEFAULT_WINDOW_SLOTS)
}
