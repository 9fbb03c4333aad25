//! Toe-off and heel-strike ankle strategies.
//!
//! Rolling over the toe or heel pivot lengthens the effective leg pendulum by
//! the chord swept around the pivot. The two ankle angles follow mirrored
//! error-function profiles centred on the heel-strike instant.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Point2;

use crate::error::{GaitError, Result};
use crate::params::{AnthroProfile, SpeedModels};
use crate::Side;

/// Time constant of the ankle angle sigmoids, s.
pub const ANKLE_TAU: f64 = 0.11;
/// Half-width of the active window around the heel strike, in units of tau.
pub const WINDOW_TAUS: f64 = 3.0;

/// Leg elongation for a pivot rotation of `theta` at distance `d_h`.
pub fn chord_elongation(theta: f64, d_h: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(GaitError::InvalidInput(format!(
            "ankle angle must lie in [0, pi], got {theta}"
        )));
    }
    Ok(chord(theta, d_h))
}

fn chord(theta: f64, lever: f64) -> f64 {
    2.0 * lever * (0.5 * theta).sin()
}

/// One step-to-step transition: the trailing leg toes off while the leading
/// leg strikes with its heel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnkleEvent {
    /// Centre of both sigmoids, s.
    pub t_hs: f64,
    pub max_theta_hs: f64,
    pub max_theta_to: f64,
    /// Trailing-leg length that puts the CoM at the target height at `t_hs`.
    pub l_p0: f64,
    pub tau: f64,
    /// Toe pivot distance of the trailing foot.
    pub to_lever: f64,
    /// Effective heel lever of the leading foot.
    pub hs_lever: f64,
    /// Leg performing the toe-off.
    pub trailing: Side,
}

impl AnkleEvent {
    pub fn leading(&self) -> Side {
        self.trailing.other()
    }

    pub fn in_window(&self, t: f64) -> bool {
        (t - self.t_hs).abs() <= WINDOW_TAUS * self.tau
    }

    /// Elongation this event adds to `side`'s leg at `t`; zero outside the window.
    pub fn elongation(&self, t: f64, side: Side) -> f64 {
        if !self.in_window(t) {
            return 0.0;
        }
        let (to, hs) = ankle_angles(t, self);
        if side == self.trailing {
            chord(to, self.to_lever)
        } else {
            chord(hs, self.hs_lever)
        }
    }
}

/// Schedules the ankle event of the step whose phase starts at `t0`.
///
/// `com_at` gives the planned transverse CoM position and `trailing_cop` the
/// CoP of the leg that will toe off. The toe-off amplitude is the pivot
/// rotation whose chord supplies the elongation needed to hold the CoM at
/// `l_p − ΔZ` at the heel strike.
pub fn ankle_event(
    models: &SpeedModels,
    profile: &AnthroProfile,
    t0: f64,
    com_at: impl Fn(f64) -> Point2<f64>,
    trailing_cop: Point2<f64>,
    trailing: Side,
    max_theta_hs: f64,
) -> Result<AnkleEvent> {
    if !(max_theta_hs > 0.0 && max_theta_hs < FRAC_PI_2) {
        return Err(GaitError::InvalidInput(format!(
            "heel-strike angle must lie in (0, pi/2), got {max_theta_hs}"
        )));
    }
    let d_h = profile.pivot_distance;
    let l_p = profile.pendulum_length;
    let t_hs = models.quarter_duration() - d_h * (1.0 - max_theta_hs.cos()) / models.v_des + t0;
    let target = l_p - models.vertical_amplitude;
    let reach = (com_at(t_hs) - trailing_cop).norm_squared();
    let l_p0 = (target * target + reach).sqrt();
    let elongation = (l_p0 - l_p).max(0.0);
    let ratio = elongation / (2.0 * d_h);
    if ratio > 1.0 {
        return Err(GaitError::UnreachableElongation {
            elongation,
            max: 2.0 * d_h,
        });
    }
    Ok(AnkleEvent {
        t_hs,
        max_theta_hs,
        max_theta_to: 2.0 * ratio.asin(),
        l_p0,
        tau: ANKLE_TAU,
        to_lever: d_h,
        hs_lever: d_h,
        trailing,
    })
}

/// Unwindowed `(θ_TO, θ_HS)` at `t`.
pub fn ankle_angles(t: f64, ev: &AnkleEvent) -> (f64, f64) {
    let e = libm::erf((t - ev.t_hs) / ev.tau);
    (
        ev.max_theta_to * e + ev.max_theta_to,
        -ev.max_theta_hs * e + ev.max_theta_hs,
    )
}

/// `(θ_TO, θ_HS)` inside the event window, zero outside.
pub fn windowed_angles(t: f64, ev: &AnkleEvent) -> (f64, f64) {
    if ev.in_window(t) {
        ankle_angles(t, ev)
    } else {
        (0.0, 0.0)
    }
}

/// Loaded length of `side`'s leg: the rigid pendulum plus whatever
/// elongation the active events contribute.
pub fn pendulum_length(t: f64, side: Side, events: &[AnkleEvent], profile: &AnthroProfile) -> f64 {
    profile.pendulum_length + events.iter().map(|e| e.elongation(t, side)).sum::<f64>()
}

/// Heel lever that lengthens the leading leg by `elongation` at `t`.
///
/// Used to make the leading leg reach the CoM height the trailing leg holds
/// at the support exchange.
pub fn heel_lever_for(ev: &AnkleEvent, t: f64, elongation: f64) -> Result<f64> {
    let (_, hs) = windowed_angles(t, ev);
    let unit = chord(hs, 1.0);
    if !(unit > 1e-12) {
        return Err(GaitError::InvalidInput(format!(
            "heel-strike angle is inactive at t={t} s"
        )));
    }
    Ok((elongation / unit).max(0.0))
}
