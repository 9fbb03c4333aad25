//! Motion-capture marker reduction and gait parameter extraction.

use nalgebra::{Point2, Point3};

use crate::error::{GaitError, Result};
use crate::planner::TrajectoryLog;
use crate::regression::fit_linear;
use crate::Side;

/// Marker labels in column order.
pub const MARKER_NAMES: [&str; 10] = [
    "L_ASI",
    "R_ASI",
    "L_PSI",
    "R_PSI",
    "L_HEEL",
    "R_HEEL",
    "L_MET_MED",
    "L_MET_LAT",
    "R_MET_MED",
    "R_MET_LAT",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    LeftAsis,
    RightAsis,
    LeftPsis,
    RightPsis,
    LeftHeel,
    RightHeel,
    LeftMetMedial,
    LeftMetLateral,
    RightMetMedial,
    RightMetLateral,
}

impl Marker {
    pub const ALL: [Marker; 10] = [
        Marker::LeftAsis,
        Marker::RightAsis,
        Marker::LeftPsis,
        Marker::RightPsis,
        Marker::LeftHeel,
        Marker::RightHeel,
        Marker::LeftMetMedial,
        Marker::LeftMetLateral,
        Marker::RightMetMedial,
        Marker::RightMetLateral,
    ];

    pub fn name(self) -> &'static str {
        MARKER_NAMES[self as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerFrame {
    pub t: f64,
    pub markers: [Point3<f64>; 10],
}

impl MarkerFrame {
    pub fn get(&self, m: Marker) -> Point3<f64> {
        self.markers[m as usize]
    }

    /// Centre of the four iliac markers.
    pub fn com(&self) -> Point3<f64> {
        let front = nalgebra::center(&self.get(Marker::LeftAsis), &self.get(Marker::RightAsis));
        let rear = nalgebra::center(&self.get(Marker::LeftPsis), &self.get(Marker::RightPsis));
        nalgebra::center(&front, &rear)
    }

    /// Midpoint between the heel and the centre of the metatarsal pair.
    pub fn cop(&self, side: Side) -> Point3<f64> {
        let (heel, med, lat) = match side {
            Side::Left => (
                Marker::LeftHeel,
                Marker::LeftMetMedial,
                Marker::LeftMetLateral,
            ),
            Side::Right => (
                Marker::RightHeel,
                Marker::RightMetMedial,
                Marker::RightMetLateral,
            ),
        };
        let met = nalgebra::center(&self.get(med), &self.get(lat));
        nalgebra::center(&met, &self.get(heel))
    }
}

/// Rejects series that are empty or not strictly increasing in time.
pub fn validate_series(frames: &[MarkerFrame]) -> Result<()> {
    if frames.is_empty() {
        return Err(GaitError::InsufficientData { needed: 1, got: 0 });
    }
    for (i, w) in frames.windows(2).enumerate() {
        if !(w[1].t > w[0].t) {
            return Err(GaitError::InvalidInput(format!(
                "timestamps must increase: frame {} at {} s follows {} s",
                i + 1,
                w[1].t,
                w[0].t
            )));
        }
    }
    Ok(())
}

/// A foot resting on the ground for a run of frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footfall {
    pub side: Side,
    pub t_start: f64,
    pub t_end: f64,
    pub position: Point2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitParameters {
    /// Walking speed from a line fit of CoM x over time, m/s.
    pub speed: f64,
    /// Median forward distance between consecutive opposite footfalls, m.
    pub step_length: f64,
    /// Median lateral distance between consecutive opposite footfalls, m.
    pub step_width: f64,
    /// CoM vertical peak-to-peak excursion, m.
    pub vertical_amplitude: f64,
    pub footfalls: Vec<Footfall>,
}

/// Feet slower than this are resting, m/s.
pub const STATIONARY_SPEED: f64 = 0.05;

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

fn footfalls(frames: &[MarkerFrame], side: Side) -> Vec<Footfall> {
    let cops: Vec<Point2<f64>> = frames.iter().map(|f| f.cop(side).xy()).collect();
    let resting: Vec<bool> = (0..frames.len())
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(frames.len() - 1));
            if a == b {
                return true;
            }
            (cops[b] - cops[a]).norm() / (frames[b].t - frames[a].t) < STATIONARY_SPEED
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < frames.len() {
        if !resting[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < frames.len() && resting[i] {
            i += 1;
        }
        if i - start < 2 {
            continue;
        }
        let run = &cops[start..i];
        let x = median(run.iter().map(|p| p.x).collect()).expect("non-empty run");
        let y = median(run.iter().map(|p| p.y).collect()).expect("non-empty run");
        out.push(Footfall {
            side,
            t_start: frames[start].t,
            t_end: frames[i - 1].t,
            position: Point2::new(x, y),
        });
    }
    out
}

/// Speed, step length, step width and vertical excursion of a marker series.
pub fn gait_parameters(frames: &[MarkerFrame]) -> Result<GaitParameters> {
    validate_series(frames)?;
    if frames.len() < 3 {
        return Err(GaitError::InsufficientData {
            needed: 3,
            got: frames.len(),
        });
    }
    let t: Vec<f64> = frames.iter().map(|f| f.t).collect();
    let com: Vec<Point3<f64>> = frames.iter().map(|f| f.com()).collect();
    let xs: Vec<f64> = com.iter().map(|c| c.x).collect();
    let speed = fit_linear(&t, &xs)?.slope;
    let (zmin, zmax) = com
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.z), hi.max(c.z))
        });

    let mut falls = footfalls(frames, Side::Left);
    falls.extend(footfalls(frames, Side::Right));
    falls.sort_by(|a, b| {
        a.t_start
            .total_cmp(&b.t_start)
            .then(a.position.x.total_cmp(&b.position.x))
    });
    let t0 = frames[0].t;
    // the two feet standing at the first frame form the initial posture, not a step
    let skip = usize::from(falls.len() >= 2 && falls[0].t_start == t0 && falls[1].t_start == t0);
    let mut lengths = Vec::new();
    let mut widths = Vec::new();
    for (i, w) in falls.windows(2).enumerate() {
        if w[0].side == w[1].side || i < skip {
            continue;
        }
        lengths.push(w[1].position.x - w[0].position.x);
        widths.push((w[1].position.y - w[0].position.y).abs());
    }
    let (step_length, step_width) = match (median(lengths), median(widths)) {
        (Some(l), Some(w)) => (l, w),
        _ => {
            return Err(GaitError::InsufficientData {
                needed: 2,
                got: falls.len(),
            })
        }
    };
    Ok(GaitParameters {
        speed,
        step_length,
        step_width,
        vertical_amplitude: zmax - zmin,
        footfalls: falls,
    })
}

/// Pelvis half-extents used when synthesising markers, m.
const PELVIS_HALF: [f64; 2] = [0.1, 0.12];
/// Metatarsal offset ahead of the CoP and half spread across the foot, m.
const MET_FORWARD: f64 = 0.1;
const MET_SPREAD: f64 = 0.03;

/// Marker frames consistent with a planned walk: pelvis markers around the
/// CoM and foot markers around each foot position.
pub fn synthesize_markers(log: &TrajectoryLog) -> Vec<MarkerFrame> {
    log.samples
        .iter()
        .map(|s| {
            let c = s.com;
            let (px, py) = (PELVIS_HALF[0], PELVIS_HALF[1]);
            let foot = |p: Point3<f64>, lateral: f64| {
                let heel = Point3::new(p.x - MET_FORWARD, p.y, p.z);
                let med = Point3::new(p.x + MET_FORWARD, p.y - lateral * MET_SPREAD, p.z);
                let lat = Point3::new(p.x + MET_FORWARD, p.y + lateral * MET_SPREAD, p.z);
                (heel, med, lat)
            };
            let (lh, lm, ll) = foot(s.foot_left, 1.0);
            let (rh, rm, rl) = foot(s.foot_right, -1.0);
            MarkerFrame {
                t: s.t,
                markers: [
                    Point3::new(c.x + px, c.y + py, c.z),
                    Point3::new(c.x + px, c.y - py, c.z),
                    Point3::new(c.x - px, c.y + py, c.z),
                    Point3::new(c.x - px, c.y - py, c.z),
                    lh,
                    rh,
                    lm,
                    ll,
                    rm,
                    rl,
                ],
            }
        })
        .collect()
}
