//! Benchmark fixtures.

use saddlegait_core::{GaitRequest, Point2};

/// The mean-subject request used across benchmarks.
pub fn request(v_des: f64, hs_deg: f64, n_steps: usize) -> GaitRequest {
    GaitRequest::new(v_des, hs_deg.to_radians(), n_steps, 1.79, 63.3)
}

/// Points on a regular grid around the origin.
pub fn grid(n: usize, half: f64) -> Vec<Point2<f64>> {
    let step = 2.0 * half / (n - 1) as f64;
    (0..n * n)
        .map(|k| Point2::new(-half + (k % n) as f64 * step, -half + (k / n) as f64 * step))
        .collect()
}
