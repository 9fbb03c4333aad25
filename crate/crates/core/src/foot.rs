//! Swing-foot placement and swing trajectories.

use std::f64::consts::PI;

use nalgebra::{Point2, Point3};

use crate::error::{GaitError, Result};
use crate::Side;

/// Slopes flatter than this leave the landing x undefined.
pub const MIN_TARGET_SLOPE: f64 = 1e-6;
pub const DEFAULT_SWING_CLEARANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeetState {
    pub cop_left: Point2<f64>,
    pub cop_right: Point2<f64>,
    pub support: Side,
    /// Fraction of the current swing completed, in [0, 1].
    pub swing_progress: f64,
    pub swing_clearance: f64,
}

impl FeetState {
    pub fn new(cop_left: Point2<f64>, cop_right: Point2<f64>, support: Side) -> Self {
        Self {
            cop_left,
            cop_right,
            support,
            swing_progress: 0.0,
            swing_clearance: DEFAULT_SWING_CLEARANCE,
        }
    }

    pub fn cop(&self, side: Side) -> Point2<f64> {
        match side {
            Side::Left => self.cop_left,
            Side::Right => self.cop_right,
        }
    }

    pub fn set_cop(&mut self, side: Side, p: Point2<f64>) {
        match side {
            Side::Left => self.cop_left = p,
            Side::Right => self.cop_right = p,
        }
    }

    pub fn stance(&self) -> Point2<f64> {
        self.cop(self.support)
    }
}

/// Landing CoP for the swing foot.
///
/// The landing sits one step width across from the stance CoP, on the line
/// through the stance CoP with the given slope (the stance-to-CoM line at
/// the exchange). An infinite slope lands abreast of the stance foot.
pub fn swing_target(
    stance_cop: Point2<f64>,
    swing_side: Side,
    step_width: f64,
    slope: f64,
) -> Result<Point2<f64>> {
    if slope.is_nan() || slope.abs() < MIN_TARGET_SLOPE {
        return Err(GaitError::UndefinedTarget {
            stance: swing_side.other(),
            slope,
        });
    }
    let dy = swing_side.sign() * step_width;
    let dx = if slope.is_infinite() { 0.0 } else { dy / slope };
    Ok(Point2::new(stance_cop.x + dx, stance_cop.y + dy))
}

/// Minimum-jerk blend `10u³ − 15u⁴ + 6u⁵`.
fn quintic(u: f64) -> f64 {
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

/// Swing foot position at `t`: quintic in the horizontal plane, half-sine
/// arch of height `clearance` above the lift–land chord. `t` is clamped to
/// the swing window.
pub fn swing_trajectory(
    t: f64,
    lift: Point3<f64>,
    land: Point3<f64>,
    t_lift: f64,
    t_land: f64,
    clearance: f64,
) -> Result<Point3<f64>> {
    if !(t_lift < t_land) {
        return Err(GaitError::InvalidInput(format!(
            "swing window is empty: lift at {t_lift} s, land at {t_land} s"
        )));
    }
    let u = ((t - t_lift) / (t_land - t_lift)).clamp(0.0, 1.0);
    let s = quintic(u);
    let mut p = lift + (land - lift) * s;
    // arch over the straight chord, not over the blended height
    p.z = lift.z + (land.z - lift.z) * u + clearance * (PI * u).sin();
    Ok(p)
}

/// Fraction of the swing completed at `t`.
pub fn swing_progress(t: f64, t_lift: f64, t_land: f64) -> f64 {
    ((t - t_lift) / (t_land - t_lift)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn landing_from_slope() {
        let p = swing_target(Point2::new(0.0, -0.0664), Side::Left, 0.1328, 0.1328 / 0.3).unwrap();
        assert_relative_eq!(p.x, 0.3, epsilon = 1e-12);
        assert_relative_eq!(p.y, 0.0664, epsilon = 1e-15);
    }

    #[test]
    fn abreast_and_flat_slopes() {
        let stance = Point2::new(0.4, 0.1);
        let p = swing_target(stance, Side::Right, 0.2, f64::INFINITY).unwrap();
        assert_eq!(p, Point2::new(0.4, -0.1));
        let err = swing_target(stance, Side::Right, 0.2, 0.0).unwrap_err();
        assert!(matches!(
            err,
            GaitError::UndefinedTarget {
                stance: Side::Left,
                ..
            }
        ));
    }

    #[test]
    fn swing_endpoints_and_apex() {
        let a = Point3::new(0.0, 0.1, 0.0);
        let b = Point3::new(0.6, 0.1, 0.0);
        assert_eq!(swing_trajectory(1.0, a, b, 1.0, 2.0, 0.05).unwrap(), a);
        assert_relative_eq!(
            swing_trajectory(2.0, a, b, 1.0, 2.0, 0.05).unwrap(),
            b,
            epsilon = 1e-15
        );
        let mid = swing_trajectory(1.5, a, b, 1.0, 2.0, 0.05).unwrap();
        assert_relative_eq!(mid.x, 0.3, epsilon = 1e-15);
        assert_relative_eq!(mid.z, 0.05, epsilon = 1e-15);
        // clamped outside the window
        assert_eq!(swing_trajectory(0.0, a, b, 1.0, 2.0, 0.05).unwrap(), a);
        assert!(swing_trajectory(1.0, a, b, 2.0, 2.0, 0.05).is_err());
    }

    proptest! {
        #[test]
        fn collinear_with_slope_line(
            sx in -2.0f64..2.0, sy in -0.3f64..0.3, w in 0.1f64..0.22,
            slope in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0], left in any::<bool>()
        ) {
            let side = if left { Side::Left } else { Side::Right };
            let stance = Point2::new(sx, sy);
            let p = swing_target(stance, side, w, slope).unwrap();
            prop_assert!(((p.y - sy) - slope * (p.x - sx)).abs() < 1e-9);
            prop_assert!(((p.y - sy).abs() - w).abs() < 1e-12);
        }

        #[test]
        fn swing_progress_monotone(t1 in 0.0f64..3.0, dt in 0.0f64..1.0) {
            prop_assert!(swing_progress(t1 + dt, 1.0, 2.0) >= swing_progress(t1, 1.0, 2.0));
        }
    }
}
