//! Base of Support in saddle coordinates.
//!
//! The region is the disc through both CoPs, centred on the saddle origin,
//! cut by the toe and heel cap lines `x_S = ±d_h`. Its border consists of
//! two circular arcs (one around each CoP) joined by the two cap segments.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Point2;

use crate::error::Result;
use crate::saddle::SaddleFrame;

/// Points this far outside the exact border still count as contained.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosRegion {
    pub frame: SaddleFrame,
    /// Distance from the saddle origin to either CoP.
    pub radius: f64,
    /// Cap half-width along the saddle x-axis.
    pub cap: f64,
}

/// A boundary piece in saddle coordinates.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Segment(Point2<f64>, Point2<f64>),
    /// Counterclockwise arc from `start` to `end` angle.
    Arc {
        start: f64,
        end: f64,
    },
}

impl BosRegion {
    pub fn new(frame: SaddleFrame, cap: f64) -> Self {
        Self {
            radius: frame.half_span(),
            frame,
            cap,
        }
    }

    pub fn from_cops(cop_left: Point2<f64>, cop_right: Point2<f64>, cap: f64) -> Result<Self> {
        Ok(Self::new(SaddleFrame::build(cop_left, cop_right)?, cap))
    }

    /// Half-height of the cap segments, zero when the caps miss the disc.
    fn cap_half_height(&self) -> f64 {
        if self.radius > self.cap {
            (self.radius * self.radius - self.cap * self.cap).sqrt()
        } else {
            0.0
        }
    }

    pub fn contains_saddle(&self, p: &Point2<f64>) -> bool {
        let r2 = self.radius * self.radius;
        p.x.abs() <= self.cap + BOUNDARY_TOLERANCE
            && p.x * p.x + p.y * p.y <= r2 + 2.0 * self.radius * BOUNDARY_TOLERANCE
    }

    pub fn contains(&self, p_task: &Point2<f64>) -> bool {
        self.contains_saddle(&self.frame.to_saddle(p_task))
    }

    /// Border pieces, counterclockwise. Arcs are split at their apex so
    /// sampling always includes the points furthest along the saddle y-axis.
    fn pieces(&self) -> Vec<Piece> {
        if self.radius <= self.cap {
            return (0..4)
                .map(|q| Piece::Arc {
                    start: q as f64 * FRAC_PI_2,
                    end: (q + 1) as f64 * FRAC_PI_2,
                })
                .collect();
        }
        let (c, h) = (self.cap, self.cap_half_height());
        let a = h.atan2(c);
        vec![
            Piece::Segment(Point2::new(c, -h), Point2::new(c, h)),
            Piece::Arc {
                start: a,
                end: FRAC_PI_2,
            },
            Piece::Arc {
                start: FRAC_PI_2,
                end: PI - a,
            },
            Piece::Segment(Point2::new(-c, h), Point2::new(-c, -h)),
            Piece::Arc {
                start: PI + a,
                end: 3.0 * FRAC_PI_2,
            },
            Piece::Arc {
                start: 3.0 * FRAC_PI_2,
                end: TAU - a,
            },
        ]
    }

    fn piece_length(&self, piece: &Piece) -> f64 {
        match *piece {
            Piece::Segment(a, b) => (b - a).norm(),
            Piece::Arc { start, end } => self.radius * (end - start),
        }
    }

    fn piece_point(&self, piece: &Piece, s: f64) -> Point2<f64> {
        match *piece {
            Piece::Segment(a, b) => a + (b - a) * s,
            Piece::Arc { start, end } => {
                let ang = start + (end - start) * s;
                Point2::new(self.radius * ang.cos(), self.radius * ang.sin())
            }
        }
    }

    /// `n` task-space points tracing the border counterclockwise, starting at
    /// the lower end of the front cap. The closing edge back to the first
    /// point is implied.
    pub fn boundary(&self, n: usize) -> Vec<Point2<f64>> {
        let n = n.max(8);
        let pieces = self.pieces();
        let lengths: Vec<f64> = pieces.iter().map(|p| self.piece_length(p)).collect();
        let total: f64 = lengths.iter().sum();
        // every piece keeps its start corner; the rest are shared by length
        let spare = n - pieces.len();
        let exact: Vec<f64> = lengths.iter().map(|l| spare as f64 * l / total).collect();
        let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&i, &j| {
            let fi = exact[i] - exact[i].floor();
            let fj = exact[j] - exact[j].floor();
            fj.total_cmp(&fi).then(i.cmp(&j))
        });
        let assigned: usize = counts.iter().sum();
        for &i in order.iter().take(spare - assigned) {
            counts[i] += 1;
        }
        let mut out = Vec::with_capacity(n);
        for (piece, extra) in pieces.iter().zip(counts) {
            let k = extra + 1;
            for j in 0..k {
                let s = j as f64 / k as f64;
                out.push(self.frame.to_task(&self.piece_point(piece, s)));
            }
        }
        out
    }

    fn nearest_on_piece(&self, piece: &Piece, q: &Point2<f64>) -> Point2<f64> {
        match *piece {
            Piece::Segment(a, b) => {
                let ab = b - a;
                let s = ((q - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                a + ab * s
            }
            Piece::Arc { start, end } => {
                let ang = q.y.atan2(q.x).rem_euclid(TAU);
                let within = if q.coords.norm() == 0.0 {
                    Some(0.5 * (start + end))
                } else if (start..=end).contains(&ang) {
                    Some(ang)
                } else {
                    None
                };
                match within {
                    Some(a) => Point2::new(self.radius * a.cos(), self.radius * a.sin()),
                    None => {
                        let p0 = self.piece_point(piece, 0.0);
                        let p1 = self.piece_point(piece, 1.0);
                        if (q - p0).norm() <= (q - p1).norm() {
                            p0
                        } else {
                            p1
                        }
                    }
                }
            }
        }
    }

    /// Closest border point to `p_task`, in task space.
    pub fn nearest_boundary_point(&self, p_task: &Point2<f64>) -> Point2<f64> {
        let q = self.frame.to_saddle(p_task);
        let best = self
            .pieces()
            .iter()
            .map(|piece| self.nearest_on_piece(piece, &q))
            .min_by(|a, b| (a - q).norm().total_cmp(&(b - q).norm()))
            .expect("region has at least one border piece");
        self.frame.to_task(&best)
    }

    /// Distance to the border, positive inside and negative outside.
    pub fn signed_distance(&self, p_task: &Point2<f64>) -> f64 {
        let q = self.frame.to_saddle(p_task);
        let inside = q.x.abs() <= self.cap && q.coords.norm() <= self.radius;
        if inside {
            (self.radius - q.coords.norm()).min(self.cap - q.x.abs())
        } else {
            -(self.nearest_boundary_point(p_task) - p_task).norm()
        }
    }
}
