//! Kinematic stability measures: the normalised step-length metrics against
//! the XCoM and leg-reach bounds, and the mediolateral metric.

use crate::error::{GaitError, Result};
use crate::params::{SpeedModels, StepBounds};

/// Denominators smaller than this make a step metric undefined.
pub const MIN_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    /// Measured half step, m.
    pub half_step: f64,
    /// Walking speed the metrics were evaluated at, m/s.
    pub v: f64,
    pub s_sl_pend: f64,
    pub s_sl_jump: f64,
    pub s_sw: f64,
}

/// `(S_SL_pend, S_SL_jump)` for a measured half step `m`.
///
/// Each metric is 1 when `m` equals the planned half step and 0 on the
/// corresponding bound (XCoM for the pendulum side, leg reach for the jump
/// side).
pub fn step_stability(m: f64, models: &SpeedModels, bounds: &StepBounds) -> Result<(f64, f64)> {
    let desired = models.half_step_length;
    let ratio = |bound: f64| {
        let den = desired - bound;
        if den.abs() < MIN_WINDOW {
            Err(GaitError::DegenerateWindow { desired, bound })
        } else {
            Ok((m - bound) / den)
        }
    };
    Ok((ratio(bounds.min)?, ratio(bounds.max)?))
}

/// Mediolateral metric for a CoM offset `y` from the walking line.
///
/// Negative once the CoM leaves the lateral band between the two CoPs.
pub fn ml_stability(y: f64, models: &SpeedModels) -> f64 {
    1.0 - 2.0 * y.abs() / models.step_width
}

pub fn step_metrics(m: f64, y: f64, models: &SpeedModels) -> Result<StepMetrics> {
    let (s_sl_pend, s_sl_jump) = step_stability(m, models, &models.bounds)?;
    Ok(StepMetrics {
        half_step: m,
        v: models.v_des,
        s_sl_pend,
        s_sl_jump,
        s_sw: ml_stability(y, models),
    })
}
