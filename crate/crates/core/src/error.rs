use thiserror::Error;

use crate::Side;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaitError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "no stable walking step exists at {v_des} m/s (min half-step {min:.6} >= max {max:.6})"
    )]
    NoStableStep { v_des: f64, min: f64, max: f64 },

    #[error("degenerate posture: centres of pressure are {distance:e} m apart")]
    DegeneratePosture { distance: f64 },

    #[error(
        "pendulum overextended at t={t:.6} s: horizontal CoM-CoP distance {distance:.6} m >= leg length {length:.6} m"
    )]
    Overextension { t: f64, distance: f64, length: f64 },

    #[error("unreachable elongation {elongation:.6} m: exceeds the foot chord 2*d_h = {max:.6} m")]
    UnreachableElongation { elongation: f64, max: f64 },

    #[error("swing target undefined: CoM is laterally level with the {stance:?} stance CoP (slope {slope:e})")]
    UndefinedTarget { stance: Side, slope: f64 },

    #[error("degenerate stability window: desired half-step {desired:.6} equals bound {bound:.6}")]
    DegenerateWindow { desired: f64, bound: f64 },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid initial posture: {0}")]
    InvalidInitialPosture(String),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("step {step} at t={t:.3} s: {source}")]
    AtStep {
        step: usize,
        t: f64,
        #[source]
        source: Box<GaitError>,
    },
}

impl GaitError {
    pub(crate) fn at_step(self, step: usize, t: f64) -> Self {
        match self {
            GaitError::AtStep { .. } => self,
            other => GaitError::AtStep {
                step,
                t,
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T, E = GaitError> = std::result::Result<T, E>;
