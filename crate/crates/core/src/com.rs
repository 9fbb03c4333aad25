//! Desired CoM trajectory: constant forward speed, a harmonic mediolateral
//! oscillation through the four via points of each stride, and a height set
//! by the loaded leg's pendulum.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Point2;

use crate::error::{GaitError, Result};
use crate::foot::{swing_target, FeetState};
use crate::params::SpeedModels;
use crate::Side;

/// Phase arguments this close to a quarter boundary snap onto it.
const PHASE_SNAP: f64 = 1e-9;

/// The four quarters of the mediolateral cycle, named by the via points
/// the CoM travels between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    /// Left foot via point to left-to-right saddle.
    LeftFootToLeftSaddle,
    /// Left-to-right saddle to right foot via point.
    LeftSaddleToRightFoot,
    RightFootToRightSaddle,
    RightSaddleToLeftFoot,
}

impl PhaseLabel {
    pub fn from_quarter(quarter: usize) -> Self {
        match quarter % 4 {
            0 => Self::LeftFootToLeftSaddle,
            1 => Self::LeftSaddleToRightFoot,
            2 => Self::RightFootToRightSaddle,
            _ => Self::RightSaddleToLeftFoot,
        }
    }

    pub fn quarter(self) -> usize {
        match self {
            Self::LeftFootToLeftSaddle => 0,
            Self::LeftSaddleToRightFoot => 1,
            Self::RightFootToRightSaddle => 2,
            Self::RightSaddleToLeftFoot => 3,
        }
    }

    /// Phase angle at the start of this quarter.
    pub fn start_angle(self) -> f64 {
        self.quarter() as f64 * FRAC_PI_2
    }

    /// Support switches on the saddle via points, so the left leg carries the
    /// quarters either side of the left foot via point.
    pub fn support(self) -> Side {
        match self {
            Self::RightSaddleToLeftFoot | Self::LeftFootToLeftSaddle => Side::Left,
            Self::LeftSaddleToRightFoot | Self::RightFootToRightSaddle => Side::Right,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LeftFootToLeftSaddle => "LFvp-LSvp",
            Self::LeftSaddleToRightFoot => "LSvp-RFvp",
            Self::RightFootToRightSaddle => "RFvp-RSvp",
            Self::RightSaddleToLeftFoot => "RSvp-LFvp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitPhase {
    pub label: PhaseLabel,
    /// Phase angle at the start of the containing quarter.
    pub phi: f64,
    /// Continuous phase angle in [0, 2π).
    pub angle: f64,
    pub support: Side,
}

fn quarter_of(angle: f64) -> usize {
    let q = (angle / FRAC_PI_2 + PHASE_SNAP).floor();
    (q as i64).rem_euclid(4) as usize
}

/// Gait phase containing `t` for a cycle that starts at `phi0`.
pub fn phase_at(t: f64, phi0: f64, cadence: f64) -> GaitPhase {
    let angle = (PI * cadence * t + phi0).rem_euclid(TAU);
    let label = PhaseLabel::from_quarter(quarter_of(angle));
    GaitPhase {
        label,
        phi: label.start_angle(),
        angle,
        support: label.support(),
    }
}

/// Transverse CoM position about the origin: `x = v t`, `y = A_y cos(π ω₀ t + φ)`.
pub fn com_transverse(t: f64, models: &SpeedModels, phi: f64) -> Point2<f64> {
    Point2::new(
        models.v_des * t,
        models.lateral_amplitude * (PI * models.cadence * t + phi).cos(),
    )
}

/// CoM height above the support CoP for a pendulum of the given length.
///
/// `t` only labels the overextension error.
pub fn com_vertical(
    t: f64,
    com_xy: Point2<f64>,
    support_cop: Point2<f64>,
    pendulum_length: f64,
) -> Result<f64> {
    let d = com_xy - support_cop;
    let horizontal_sq = d.norm_squared();
    let z_sq = pendulum_length * pendulum_length - horizontal_sq;
    if !(z_sq > 0.0) {
        return Err(GaitError::Overextension {
            t,
            distance: horizontal_sq.sqrt(),
            length: pendulum_length,
        });
    }
    Ok(z_sq.sqrt())
}

/// A CoM transverse trajectory anchored in task space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComTrajectory {
    pub models: SpeedModels,
    /// Gait phase at t = 0.
    pub phase0: f64,
    /// Forward CoM position at t = 0.
    pub x0: f64,
    /// Lateral position of the walking line.
    pub y_mid: f64,
}

impl ComTrajectory {
    pub fn transverse(&self, t: f64) -> Point2<f64> {
        let p = com_transverse(t, &self.models, self.phase0);
        Point2::new(self.x0 + p.x, self.y_mid + p.y)
    }

    pub fn velocity(&self, t: f64) -> nalgebra::Vector2<f64> {
        let rate = PI * self.models.cadence;
        nalgebra::Vector2::new(
            self.models.v_des,
            -self.models.lateral_amplitude * rate * (rate * t + self.phase0).sin(),
        )
    }

    pub fn phase(&self, t: f64) -> GaitPhase {
        phase_at(t, self.phase0, self.models.cadence)
    }

    /// Time at which the phase argument reaches `angle` (unwrapped).
    fn time_of_angle(&self, angle: f64) -> f64 {
        (angle - self.phase0) / (PI * self.models.cadence)
    }

    /// Quarter boundaries (via point instants) strictly after `t`, in order.
    pub fn boundaries_after(&self, t: f64) -> impl Iterator<Item = (f64, PhaseLabel)> + '_ {
        let arg = PI * self.models.cadence * t + self.phase0;
        let first = (arg / FRAC_PI_2 + PHASE_SNAP).floor() as i64 + 1;
        (first..).map(move |k| {
            let angle = k as f64 * FRAC_PI_2;
            // the quarter that starts at this boundary
            (
                self.time_of_angle(angle),
                PhaseLabel::from_quarter(k.rem_euclid(4) as usize),
            )
        })
    }

    /// Whether the via point at `boundary` has been passed at `t`, with the
    /// same snapping as [`phase_at`].
    pub fn reached(&self, t: f64, boundary: f64) -> bool {
        PI * self.models.cadence * (t - boundary) >= -PHASE_SNAP * FRAC_PI_2
    }

    /// Saddle crossings (support exchanges) strictly after `t`.
    pub fn saddles_after(&self, t: f64) -> impl Iterator<Item = f64> + '_ {
        self.boundaries_after(t)
            .filter(|(_, label)| label.quarter() % 2 == 1)
            .map(|(time, _)| time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViaPointKind {
    LeftFoot,
    LeftSaddle,
    RightFoot,
    RightSaddle,
}

impl ViaPointKind {
    /// The via point the CoM reaches at the start of `label`.
    fn starting(label: PhaseLabel) -> Self {
        match label {
            PhaseLabel::LeftFootToLeftSaddle => Self::LeftFoot,
            PhaseLabel::LeftSaddleToRightFoot => Self::LeftSaddle,
            PhaseLabel::RightFootToRightSaddle => Self::RightFoot,
            PhaseLabel::RightSaddleToLeftFoot => Self::RightSaddle,
        }
    }

    pub fn is_saddle(self) -> bool {
        matches!(self, Self::LeftSaddle | Self::RightSaddle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViaPoint {
    pub kind: ViaPointKind,
    pub t: f64,
    pub position: Point2<f64>,
}

/// The next four via points of the cycle, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct ViaPointSet {
    pub points: [ViaPoint; 4],
}

impl ViaPointSet {
    pub fn get(&self, kind: ViaPointKind) -> &ViaPoint {
        self.points
            .iter()
            .find(|p| p.kind == kind)
            .expect("a via point set holds each kind once")
    }
}

/// Predicts the four via points following `from`.
///
/// Foot via points sit on the CoM lateral apexes. Saddle via points sit at
/// the midpoint between the stance CoP and the landing CoP the swing foot is
/// aimed at for that exchange.
pub fn via_points(traj: &ComTrajectory, feet: &FeetState, from: f64) -> Result<ViaPointSet> {
    let mut stance_side = feet.support;
    let mut stance = feet.cop(stance_side);
    let mut points = Vec::with_capacity(4);
    for (t, label) in traj.boundaries_after(from).take(4) {
        let kind = ViaPointKind::starting(label);
        let position = if kind.is_saddle() {
            let slope = line_slope(stance, traj.transverse(t));
            let swing_side = stance_side.other();
            let landing = swing_target(stance, swing_side, traj.models.step_width, slope)?;
            let mid = nalgebra::center(&stance, &landing);
            stance = landing;
            stance_side = swing_side;
            mid
        } else {
            traj.transverse(t)
        };
        points.push(ViaPoint { kind, t, position });
    }
    Ok(ViaPointSet {
        points: points.try_into().expect("four boundaries taken"),
    })
}

/// Slope of the line from `a` to `b`; `+∞` when they share an x-coordinate.
pub fn line_slope(a: Point2<f64>, b: Point2<f64>) -> f64 {
    let d = b - a;
    if d.x == 0.0 {
        f64::INFINITY
    } else {
        d.y / d.x
    }
}
