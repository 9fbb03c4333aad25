//! Ordinary least-squares line fitting.

use crate::error::{GaitError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 0 when the responses are constant.
    pub r_squared: f64,
    pub n_points: usize,
}

impl RegressionFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<RegressionFit> {
    if xs.len() != ys.len() {
        return Err(GaitError::InvalidInput(format!(
            "{} abscissae for {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(GaitError::InsufficientData { needed: 3, got: n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(GaitError::InvalidInput("non-finite sample".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > f64::EPSILON * f64::EPSILON * (1.0 + mx * mx) * nf) {
        return Err(GaitError::DegenerateRegression(
            "all abscissae are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RegressionFit {
        slope,
        intercept,
        r_squared,
        n_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..20).map(|i| 0.5 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.1802 * x + 0.1351).collect();
        let fit = fit_linear(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 0.1802, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 0.1351, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(fit.n_points, 20);
    }

    #[test]
    fn constant_response() {
        let fit = fit_linear(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            fit_linear(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(GaitError::DegenerateRegression(_))
        ));
        assert!(matches!(
            fit_linear(&[1.0, 2.0], &[1.0, 2.0]),
            Err(GaitError::InsufficientData { .. })
        ));
        assert!(fit_linear(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn noisy_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..10_000).map(|i| i as f64 / 1000.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                let e: f64 = StandardNormal.sample(&mut rng);
                x + e
            })
            .collect();
        let fit = fit_linear(&xs, &ys).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}
