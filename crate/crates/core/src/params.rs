//! Speed-parameterized gait regressions and the inverted-pendulum step window.
//!
//! The three regressions (step width, half step length, CoM vertical
//! amplitude) are fitted on straight-walking motion capture of adult subjects
//! and are embedded here as constants. They are only meaningful for walking
//! speeds where a stable step exists, i.e. below roughly 3 m/s for an
//! average-height adult.

use std::f64::consts::PI;

use crate::error::{GaitError, Result};

/// Gravitational acceleration used throughout the planner, m/s².
pub const GRAVITY: f64 = 9.81;
/// Pendulum length as a fraction of body height.
pub const PENDULUM_HEIGHT_RATIO: f64 = 0.57;
/// Distance of each CoP from the foot's anterior/posterior pivots, m.
pub const DEFAULT_PIVOT_DISTANCE: f64 = 0.1;
/// Maximum reachable half step as a fraction of the pendulum length.
///
/// Chosen so that the XCoM lower bound meets the reach limit at ~3 m/s for
/// a 1.79 m subject.
pub const DEFAULT_REACH_COEFF: f64 = 0.4742;

/// Step-width regression breakpoints and saturation values.
const STEP_WIDTH_LOW_SPEED: f64 = 0.6;
const STEP_WIDTH_HIGH_SPEED: f64 = 1.1;
const STEP_WIDTH_MAX: f64 = 0.22;
const STEP_WIDTH_MIN: f64 = 0.10;
const STEP_WIDTH_SLOPE: f64 = -0.2128;
const STEP_WIDTH_INTERCEPT: f64 = 0.3456;

const HALF_STEP_SLOPE: f64 = 0.1802;
const HALF_STEP_INTERCEPT: f64 = 0.1351;

const VERTICAL_SLOPE: f64 = 0.02656;
const VERTICAL_INTERCEPT: f64 = 0.002575;

/// Fixed anthropometric geometry of the walker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnthroProfile {
    /// Standing body height, m.
    pub body_height: f64,
    /// Body mass, kg.
    pub mass: f64,
    /// Leg pendulum length, m.
    pub pendulum_length: f64,
    /// CoP-to-pivot distance of the foot, m.
    pub pivot_distance: f64,
    /// Natural frequency of the leg pendulum, rad/s.
    pub natural_frequency: f64,
    /// Maximum half step as a multiple of `pendulum_length`.
    pub reach_coeff: f64,
}

impl AnthroProfile {
    pub fn new(body_height: f64, mass: f64) -> Result<Self> {
        if !(body_height.is_finite() && body_height > 0.0) {
            return Err(GaitError::InvalidInput(format!(
                "body height must be positive, got {body_height}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(GaitError::InvalidInput(format!(
                "mass must be positive, got {mass}"
            )));
        }
        let pendulum_length = PENDULUM_HEIGHT_RATIO * body_height;
        Ok(Self {
            body_height,
            mass,
            pendulum_length,
            pivot_distance: DEFAULT_PIVOT_DISTANCE,
            natural_frequency: (GRAVITY / pendulum_length).sqrt(),
            reach_coeff: DEFAULT_REACH_COEFF,
        })
    }

    pub fn with_pivot_distance(mut self, d_h: f64) -> Result<Self> {
        if !(d_h.is_finite() && d_h > 0.0) {
            return Err(GaitError::InvalidInput(format!(
                "pivot distance must be positive, got {d_h}"
            )));
        }
        self.pivot_distance = d_h;
        Ok(self)
    }

    pub fn with_reach_coeff(mut self, coeff: f64) -> Result<Self> {
        if !(coeff.is_finite() && coeff > 0.0) {
            return Err(GaitError::InvalidInput(format!(
                "reach coefficient must be positive, got {coeff}"
            )));
        }
        self.reach_coeff = coeff;
        Ok(self)
    }

    /// Largest half step the leg can reach.
    pub fn max_half_step(&self) -> f64 {
        self.reach_coeff * self.pendulum_length
    }
}

/// Admissible half-step interval at a given speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    /// XCoM lower bound `v / (2 ω_n)`.
    pub min: f64,
    /// Leg-reach upper bound.
    pub max: f64,
}

impl StepBounds {
    pub fn contains(&self, half_step: f64) -> bool {
        half_step > self.min && half_step < self.max
    }
}

/// Everything the planner derives from the desired speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedModels {
    pub v_des: f64,
    /// Lateral distance between consecutive CoPs, m.
    pub step_width: f64,
    /// Forward distance travelled by the CoM in one phase quarter, m.
    pub half_step_length: f64,
    pub step_length: f64,
    /// Target peak-to-peak CoM vertical excursion, m.
    pub vertical_amplitude: f64,
    /// Steps per second.
    pub cadence: f64,
    /// Mediolateral CoM oscillation amplitude, m.
    pub lateral_amplitude: f64,
    pub bounds: StepBounds,
}

impl SpeedModels {
    /// Duration of one step (two phase quarters), s.
    pub fn step_duration(&self) -> f64 {
        1.0 / self.cadence
    }

    /// Duration of one phase quarter, s.
    pub fn quarter_duration(&self) -> f64 {
        0.5 / self.cadence
    }

    /// Duration of one stride (two steps), s; the mediolateral period.
    pub fn stride_duration(&self) -> f64 {
        2.0 / self.cadence
    }
}

fn check_speed(v_des: f64) -> Result<()> {
    if v_des.is_finite() && v_des > 0.0 {
        Ok(())
    } else {
        Err(GaitError::InvalidInput(format!(
            "walking speed must be positive, got {v_des}"
        )))
    }
}

/// Step width regression, saturated at both ends.
///
/// The linear branch is closed at both breakpoints, so the model jumps by
/// about 1.5 mm just above 1.1 m/s.
pub fn step_width(v_des: f64) -> Result<f64> {
    check_speed(v_des)?;
    Ok(if v_des < STEP_WIDTH_LOW_SPEED {
        STEP_WIDTH_MAX
    } else if v_des <= STEP_WIDTH_HIGH_SPEED {
        STEP_WIDTH_SLOPE * v_des + STEP_WIDTH_INTERCEPT
    } else {
        STEP_WIDTH_MIN
    })
}

/// Half step length regression: the forward CoM travel per phase quarter.
pub fn step_length_half(v_des: f64) -> Result<f64> {
    check_speed(v_des)?;
    Ok(HALF_STEP_SLOPE * v_des + HALF_STEP_INTERCEPT)
}

/// Target peak-to-peak CoM vertical excursion.
pub fn vertical_amplitude(v_des: f64) -> Result<f64> {
    check_speed(v_des)?;
    Ok(VERTICAL_SLOPE * v_des + VERTICAL_INTERCEPT)
}

/// XCoM/leg-reach window for the half step.
pub fn step_bounds(v_des: f64, profile: &AnthroProfile) -> Result<StepBounds> {
    check_speed(v_des)?;
    let min = v_des / (2.0 * profile.natural_frequency);
    let max = profile.max_half_step();
    if min >= max {
        return Err(GaitError::NoStableStep { v_des, min, max });
    }
    Ok(StepBounds { min, max })
}

pub fn speed_models(v_des: f64, profile: &AnthroProfile) -> Result<SpeedModels> {
    let bounds = step_bounds(v_des, profile)?;
    let step_width = step_width(v_des)?;
    let half_step_length = step_length_half(v_des)?;
    let step_length = 2.0 * half_step_length;
    let cadence = v_des / step_length;
    // Literal form of the amplitude rule; numerically d_SW / (2π v).
    let lateral_amplitude = step_width / (2.0 * PI * cadence * step_length);
    Ok(SpeedModels {
        v_des,
        step_width,
        half_step_length,
        step_length,
        vertical_amplitude: vertical_amplitude(v_des)?,
        cadence,
        lateral_amplitude,
        bounds,
    })
}
