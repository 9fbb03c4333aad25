//! Task-space planner for straight bipedal walking on a saddle-shaped
//! potential-energy model.
//!
//! [`plan_walk`] turns a [`GaitRequest`] into a sampled [`TrajectoryLog`] of
//! CoM, CoP and swing-foot positions together with the kinematic and
//! energetic stability measures evaluated along the way.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ankle;
pub mod bos;
pub mod com;
pub mod energy;
pub mod error;
pub mod foot;
pub mod mocap;
pub mod params;
pub mod planner;
pub mod regression;
pub mod saddle;
pub mod stability;

pub use nalgebra::{Point2, Point3, Vector2};

pub use ankle::AnkleEvent;
pub use bos::BosRegion;
pub use com::{ComTrajectory, GaitPhase, PhaseLabel, ViaPointSet};
pub use energy::EnergyState;
pub use error::{GaitError, Result};
pub use foot::FeetState;
pub use params::{speed_models, step_bounds, AnthroProfile, SpeedModels, StepBounds};
pub use planner::{
    derive_initial_state, plan_walk, GaitRequest, InitialState, PlanSample, StabilityReport,
    StepPlan, TrajectoryLog,
};
pub use regression::{fit_linear, RegressionFit};
pub use saddle::{build_frame, SaddleFrame};
pub use stability::StepMetrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// `+1` for the left side, `-1` for the right; left is +y when walking along +x.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}
