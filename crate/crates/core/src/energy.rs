//! Energy bookkeeping and the energetic stability conditions.
//!
//! Total energy is split into CoM potential, CoM kinetic, the active work
//! the walker can still inject or dissipate, and an external perturbation
//! term.

use nalgebra::{Point2, Point3, Vector3};

use crate::error::{GaitError, Result};
use crate::params::{AnthroProfile, GRAVITY};

/// Default active work budget per kilogram of body mass, J/kg.
pub const DEFAULT_WORK_PER_KG: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    /// Maximum active work available, J.
    pub w: f64,
    /// Work the controller may spend on a trajectory segment, J.
    pub w_c: f64,
    /// Perturbation energy, J.
    pub e_p: f64,
    /// Desired kinetic energy, J.
    pub k_des: f64,
}

impl EnergyBudget {
    pub fn for_walk(profile: &AnthroProfile, v_des: f64) -> Self {
        let w = DEFAULT_WORK_PER_KG * profile.mass;
        Self {
            w,
            w_c: w,
            e_p: 0.0,
            k_des: 0.5 * profile.mass * v_des * v_des,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyState {
    pub u: f64,
    pub k: f64,
    pub w: f64,
    pub e_p: f64,
    /// Potential energy with the CoM over the nearest BoS border point.
    pub u_mos: f64,
    pub k_des: f64,
    /// Velocity came from a one-sided difference.
    pub one_sided: bool,
}

impl EnergyState {
    pub fn total(&self) -> f64 {
        self.u + self.k + self.w + self.e_p
    }

    pub fn mechanical(&self) -> f64 {
        self.u + self.k
    }
}

pub fn potential_energy(profile: &AnthroProfile, z: f64) -> f64 {
    profile.mass * GRAVITY * z
}

pub fn kinetic_energy(profile: &AnthroProfile, velocity: &Vector3<f64>) -> f64 {
    0.5 * profile.mass * velocity.norm_squared()
}

/// Potential energy of a straight stance leg standing on `stance` with the
/// CoM above `border`.
pub fn mos_potential(profile: &AnthroProfile, stance: Point2<f64>, border: Point2<f64>) -> f64 {
    let l = profile.pendulum_length;
    let z = (l * l - (border - stance).norm_squared()).max(0.0).sqrt();
    potential_energy(profile, z)
}

/// Finite-difference velocities: central inside, one-sided (and flagged) at
/// both ends.
pub fn velocities(t: &[f64], p: &[Point3<f64>]) -> Result<Vec<(Vector3<f64>, bool)>> {
    if t.len() != p.len() {
        return Err(GaitError::InvalidInput(format!(
            "{} timestamps for {} positions",
            t.len(),
            p.len()
        )));
    }
    let n = p.len();
    if n < 2 {
        return Err(GaitError::InsufficientData { needed: 2, got: n });
    }
    Ok((0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            ((p[b] - p[a]) / (t[b] - t[a]), i == 0 || i == n - 1)
        })
        .collect())
}

/// Energy state of every sample of a CoM trajectory.
pub fn energy_series(
    t: &[f64],
    com: &[Point3<f64>],
    u_mos: &[f64],
    profile: &AnthroProfile,
    budget: &EnergyBudget,
) -> Result<Vec<EnergyState>> {
    if u_mos.len() != com.len() {
        return Err(GaitError::InvalidInput(format!(
            "{} MoS potentials for {} samples",
            u_mos.len(),
            com.len()
        )));
    }
    let vel = velocities(t, com)?;
    Ok(com
        .iter()
        .zip(vel)
        .zip(u_mos)
        .map(|((c, (v, one_sided)), &u_mos)| EnergyState {
            u: potential_energy(profile, c.z),
            k: kinetic_energy(profile, &v),
            w: budget.w,
            e_p: budget.e_p,
            u_mos,
            k_des: budget.k_des,
            one_sided,
        })
        .collect())
}

/// The walker can come to rest over the current feet: the available work
/// covers the climb to the MoS potential.
pub fn static_capture(e: &EnergyState) -> bool {
    e.w >= e.u_mos - e.u - e.k - e.e_p
}

/// Work left over after steering from `a` to `b`; non-negative certifies the
/// segment.
pub fn lyapunov_margin(a: &EnergyState, b: &EnergyState, w_c: f64) -> f64 {
    w_c - (b.u - a.u + b.k - b.k_des)
}

/// Per-sample check that mechanical energy grows no faster than
/// `work_rate` (J/s).
pub fn energy_rate_check(energy: &[f64], dt: f64, work_rate: f64) -> Result<Vec<bool>> {
    let n = energy.len();
    if n < 3 {
        return Err(GaitError::InsufficientData { needed: 3, got: n });
    }
    if !(dt > 0.0) {
        return Err(GaitError::InvalidInput(format!(
            "dt must be positive, got {dt}"
        )));
    }
    Ok((0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let rate = (energy[b] - energy[a]) / ((b - a) as f64 * dt);
            rate <= work_rate
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn profile() -> AnthroProfile {
        AnthroProfile::new(1.79, 63.3).unwrap()
    }

    fn state(u: f64, k: f64, w: f64, u_mos: f64) -> EnergyState {
        EnergyState {
            u,
            k,
            w,
            e_p: 0.0,
            u_mos,
            k_des: k,
            one_sided: false,
        }
    }

    #[test]
    fn energy_samples() {
        let p = profile();
        assert_relative_eq!(potential_energy(&p, 1.0203), 633.5787519, epsilon = 1e-6);
        assert_relative_eq!(
            kinetic_energy(&p, &Vector3::new(1.0, 0.0, 0.0)),
            31.65,
            epsilon = 1e-12
        );
        assert!(AnthroProfile::new(1.79, 0.0).is_err());
    }

    #[test]
    fn capture_samples() {
        assert!(static_capture(&state(600.0, 0.0, 0.0, 600.0)));
        assert!(!static_capture(&state(600.0, 0.0, 0.0, 601.0)));
    }

    #[test]
    fn margin_samples() {
        let a = state(600.0, 30.0, 0.0, 0.0);
        assert_eq!(lyapunov_margin(&a, &a, 20.0), 20.0);
    }

    #[test]
    fn constant_walk_margin_is_budget() {
        let p = profile();
        let budget = EnergyBudget::for_walk(&p, 1.0);
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.08).collect();
        let com: Vec<Point3<f64>> = t.iter().map(|&t| Point3::new(t, 0.0, 0.99)).collect();
        let e = energy_series(&t, &com, &[0.0; 20], &p, &budget).unwrap();
        assert!(e[0].one_sided && e[19].one_sided && !e[5].one_sided);
        for w in e.windows(2) {
            assert!((lyapunov_margin(&w[0], &w[1], budget.w_c) - budget.w_c).abs() < 1e-9);
        }
    }

    #[test]
    fn rate_check_samples() {
        assert!(energy_rate_check(&[5.0; 6], 0.08, 0.0)
            .unwrap()
            .iter()
            .all(|&ok| ok));
        let rising: Vec<f64> = (0..6).map(|i| i as f64).collect();
        assert!(energy_rate_check(&rising, 0.08, 0.0)
            .unwrap()
            .iter()
            .all(|&ok| !ok));
        assert!(matches!(
            energy_rate_check(&[1.0, 2.0], 0.08, 0.0),
            Err(GaitError::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn mos_potential_straight_leg() {
        let p = profile();
        let u = mos_potential(&p, Point2::origin(), Point2::origin());
        assert_relative_eq!(u, potential_energy(&p, p.pendulum_length));
        assert_eq!(
            mos_potential(&p, Point2::origin(), Point2::new(5.0, 0.0)),
            0.0
        );
    }

    proptest! {
        #[test]
        fn capture_monotone_in_work(u in 0.0f64..800.0, k in 0.0f64..100.0, umos in 0.0f64..800.0,
                                    w in 0.0f64..100.0, extra in 0.0f64..100.0) {
            let a = state(u, k, w, umos);
            let b = state(u, k, w + extra, umos);
            prop_assert!(!static_capture(&a) || static_capture(&b));
        }
    }
}
