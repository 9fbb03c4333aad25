//! Posture-dependent saddle-space frame.
//!
//! The saddle y-axis runs through both CoPs and points at the left one; its
//! origin is the CoP midpoint, where the potential-energy saddle sits when
//! both legs share the same maximum length. The x-axis is the y-axis turned
//! clockwise by a right angle, so the frame stays right-handed.

use std::f64::consts::PI;

use nalgebra::{Point2, Rotation2, Vector2};

use crate::error::{GaitError, Result};

/// CoPs closer than this are treated as coincident.
pub const MIN_COP_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleFrame {
    /// Task-space position of the saddle origin.
    pub origin: Point2<f64>,
    /// Angle from the task x-axis to the saddle x-axis, in (−π, π].
    pub lambda: f64,
    /// Task-space slope Δy/Δx of the CoP–CoP line; `+∞` when the feet are abreast.
    pub slope: f64,
    /// Saddle y-coordinate of the left CoP (positive).
    pub y_left: f64,
    /// Saddle y-coordinate of the right CoP (negative).
    pub y_right: f64,
    rotation: Rotation2<f64>,
}

impl SaddleFrame {
    pub fn build(cop_left: Point2<f64>, cop_right: Point2<f64>) -> Result<Self> {
        let axis: Vector2<f64> = cop_left - cop_right;
        let distance = axis.norm();
        if !(distance > MIN_COP_SEPARATION) {
            return Err(GaitError::DegeneratePosture { distance });
        }
        let mut lambda = (-axis.x).atan2(axis.y);
        if lambda <= -PI {
            lambda += 2.0 * PI;
        }
        let slope = if axis.x == 0.0 {
            f64::INFINITY
        } else {
            axis.y / axis.x
        };
        Ok(Self {
            origin: nalgebra::center(&cop_left, &cop_right),
            lambda,
            slope,
            y_left: 0.5 * distance,
            y_right: -0.5 * distance,
            rotation: Rotation2::new(lambda),
        })
    }

    /// Half the CoP–CoP distance.
    pub fn half_span(&self) -> f64 {
        self.y_left
    }

    pub fn to_saddle(&self, p: &Point2<f64>) -> Point2<f64> {
        Point2::from(self.rotation.inverse_transform_vector(&(p - self.origin)))
    }

    pub fn to_task(&self, p: &Point2<f64>) -> Point2<f64> {
        self.origin + self.rotation * p.coords
    }
}

pub fn build_frame(cop_left: Point2<f64>, cop_right: Point2<f64>) -> Result<SaddleFrame> {
    SaddleFrame::build(cop_left, cop_right)
}
