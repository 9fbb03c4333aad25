//! Stability audit of a trajectory produced elsewhere.
//!
//! Reads `t, com_x, com_y, com_z, copL_x, copL_y, copR_x, copR_y` and an
//! optional `support` column (`L`/`R`), estimates the walking speed from the
//! CoM, and scores the trajectory with the same metrics the planner reports.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use saddlegait_core::bos::BosRegion;
use saddlegait_core::energy::{
    energy_rate_check, energy_series, lyapunov_margin, mos_potential, static_capture, EnergyBudget,
};
use saddlegait_core::stability::{ml_stability, step_stability};
use saddlegait_core::{fit_linear, speed_models, AnthroProfile, Point2, Point3, Side, SpeedModels};

use crate::output::fmt_float;
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSample {
    pub t: f64,
    pub com: Point3<f64>,
    pub cop_left: Point2<f64>,
    pub cop_right: Point2<f64>,
    pub support: Option<Side>,
}

impl AuditSample {
    fn cop(&self, side: Side) -> Point2<f64> {
        match side {
            Side::Left => self.cop_left,
            Side::Right => self.cop_right,
        }
    }

    /// Declared support, else the CoP closest to the CoM ground projection.
    fn stance(&self) -> Point2<f64> {
        match self.support {
            Some(side) => self.cop(side),
            None => {
                let g = self.com.xy();
                if (self.cop_left - g).norm() <= (self.cop_right - g).norm() {
                    self.cop_left
                } else {
                    self.cop_right
                }
            }
        }
    }
}

pub fn read_trajectory_csv(path: &Path) -> anyhow::Result<Vec<AuditSample>> {
    let table = Table::read(path)?;
    let names = [
        "t", "com_x", "com_y", "com_z", "copL_x", "copL_y", "copR_x", "copR_y",
    ];
    let mut cols = [0; 8];
    for (slot, name) in cols.iter_mut().zip(names) {
        *slot = table
            .column(name)
            .with_context(|| format!("in {}", path.display()))?;
    }
    let support_col = table.find("support");
    let mut out = Vec::with_capacity(table.rows.len());
    for row in 0..table.rows.len() {
        let v: Vec<f64> = cols
            .iter()
            .map(|&c| table.float(row, c))
            .collect::<anyhow::Result<_>>()?;
        let support = match support_col.map(|c| table.text(row, c)) {
            None | Some("") => None,
            Some("L") => Some(Side::Left),
            Some("R") => Some(Side::Right),
            Some(other) => bail!("row {}: support must be L or R, got {other:?}", row + 2),
        };
        out.push(AuditSample {
            t: v[0],
            com: Point3::new(v[1], v[2], v[3]),
            cop_left: Point2::new(v[4], v[5]),
            cop_right: Point2::new(v[6], v[7]),
            support,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub t: f64,
    pub s_sw: f64,
    pub in_bos: bool,
    pub static_capture: bool,
    pub energy_rate_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub speed: f64,
    pub speed_r_squared: f64,
    pub models: SpeedModels,
    /// Support exchanges found in the `support` column.
    pub exchanges: usize,
    /// `None` without support labels or exchanges.
    pub min_s_sl_pend: Option<f64>,
    pub min_s_sl_jump: Option<f64>,
    pub min_s_sw: f64,
    pub bos_fraction: f64,
    pub capture_fraction: f64,
    pub min_lyapunov_margin: f64,
    pub energy_rate_violations: usize,
    pub vertical_excursion: f64,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn vertical_error(&self) -> f64 {
        (self.vertical_excursion - self.models.vertical_amplitude).abs()
            / self.models.vertical_amplitude
    }
}

pub fn audit(
    samples: &[AuditSample],
    profile: &AnthroProfile,
    budget: Option<EnergyBudget>,
) -> anyhow::Result<AuditReport> {
    let n = samples.len();
    if n < 3 {
        bail!("audit needs at least 3 samples, got {n}");
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("timestamps must increase strictly");
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.com.x).collect();
    let speed_fit = fit_linear(&t, &xs).context("estimating walking speed")?;
    let speed = speed_fit.slope.abs();
    let models =
        speed_models(speed, profile).with_context(|| format!("estimated speed {speed:.4} m/s"))?;
    let budget = budget.unwrap_or_else(|| EnergyBudget::for_walk(profile, speed));

    let mut s_sl = Vec::new();
    for w in samples.windows(2) {
        if let (Some(a), Some(b)) = (w[0].support, w[1].support) {
            if a != b {
                let m = (w[1].cop(b).x - w[1].cop(a).x).abs() / 2.0;
                s_sl.push(step_stability(m, &models, &models.bounds)?);
            }
        }
    }

    let mut in_bos = Vec::with_capacity(n);
    let mut u_mos = Vec::with_capacity(n);
    let mut s_sw = Vec::with_capacity(n);
    for s in samples {
        let region = BosRegion::from_cops(s.cop_left, s.cop_right, profile.pivot_distance)
            .with_context(|| format!("BoS at t = {}", s.t))?;
        let g = s.com.xy();
        in_bos.push(region.contains(&g));
        u_mos.push(mos_potential(
            profile,
            s.stance(),
            region.nearest_boundary_point(&g),
        ));
        let mid = 0.5 * (s.cop_left.y + s.cop_right.y);
        s_sw.push(ml_stability(s.com.y - mid, &models));
    }

    let com: Vec<Point3<f64>> = samples.iter().map(|s| s.com).collect();
    let energy = energy_series(&t, &com, &u_mos, profile, &budget)?;
    let capture: Vec<bool> = energy.iter().map(static_capture).collect();
    let mech: Vec<f64> = energy.iter().map(|e| e.mechanical()).collect();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let rate_ok = energy_rate_check(&mech, dt, budget.w_c * models.cadence)?;
    let min_margin = energy
        .windows(2)
        .map(|w| lyapunov_margin(&w[0], &w[1], budget.w_c))
        .fold(f64::INFINITY, f64::min);

    let zs = com.iter().map(|c| c.z);
    let z_max = zs.clone().fold(f64::NEG_INFINITY, f64::max);
    let z_min = zs.fold(f64::INFINITY, f64::min);
    let frac = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64 / n as f64;

    Ok(AuditReport {
        speed,
        speed_r_squared: speed_fit.r_squared,
        models,
        exchanges: s_sl.len(),
        min_s_sl_pend: s_sl.iter().map(|p| p.0).reduce(f64::min),
        min_s_sl_jump: s_sl.iter().map(|p| p.1).reduce(f64::min),
        min_s_sw: s_sw.iter().copied().fold(f64::INFINITY, f64::min),
        bos_fraction: frac(&in_bos),
        capture_fraction: frac(&capture),
        min_lyapunov_margin: min_margin,
        energy_rate_violations: rate_ok.iter().filter(|&&ok| !ok).count(),
        vertical_excursion: z_max - z_min,
        rows: (0..n)
            .map(|i| AuditRow {
                t: t[i],
                s_sw: s_sw[i],
                in_bos: in_bos[i],
                static_capture: capture[i],
                energy_rate_ok: rate_ok[i],
            })
            .collect(),
    })
}

pub fn audit_text(r: &AuditReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), fmt_float);
    let mut s = String::new();
    let _ = writeln!(s, "audit");
    let _ = writeln!(s, "  samples                  {}", r.rows.len());
    let _ = writeln!(s, "  speed                    {}", fmt_float(r.speed));
    let _ = writeln!(
        s,
        "  speed_r_squared          {}",
        fmt_float(r.speed_r_squared)
    );
    let _ = writeln!(s, "  exchanges                {}", r.exchanges);
    let _ = writeln!(s, "  min_S_SL_pend            {}", opt(r.min_s_sl_pend));
    let _ = writeln!(s, "  min_S_SL_jump            {}", opt(r.min_s_sl_jump));
    let _ = writeln!(s, "  min_S_SW                 {}", fmt_float(r.min_s_sw));
    let _ = writeln!(
        s,
        "  bos_fraction             {}",
        fmt_float(r.bos_fraction)
    );
    let _ = writeln!(
        s,
        "  capture_fraction         {}",
        fmt_float(r.capture_fraction)
    );
    let _ = writeln!(
        s,
        "  min_lyapunov_margin      {}",
        fmt_float(r.min_lyapunov_margin)
    );
    let _ = writeln!(s, "  energy_rate_violations   {}", r.energy_rate_violations);
    let _ = writeln!(
        s,
        "  vertical_excursion       {}",
        fmt_float(r.vertical_excursion)
    );
    let _ = writeln!(
        s,
        "  vertical_target          {}",
        fmt_float(r.models.vertical_amplitude)
    );
    let _ = writeln!(
        s,
        "  vertical_error           {}",
        fmt_float(r.vertical_error())
    );
    s
}

pub fn write_audit_csv(r: &AuditReport, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(["t", "S_SW", "in_bos", "static_capture", "energy_rate_ok"])?;
    let b = |v: bool| if v { "1" } else { "0" }.to_string();
    for row in &r.rows {
        w.write_record([
            fmt_float(row.t),
            fmt_float(row.s_sw),
            b(row.in_bos),
            b(row.static_capture),
            b(row.energy_rate_ok),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::write_trajectory_csv;
    use saddlegait_core::{plan_walk, GaitRequest};

    fn planned() -> saddlegait_core::TrajectoryLog {
        let mut req = GaitRequest::new(1.0, 10f64.to_radians(), 8, 1.79, 63.3);
        req.dt = 0.01;
        plan_walk(&req).unwrap()
    }

    #[test]
    fn agrees_with_planner_report() {
        let log = planned();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        write_trajectory_csv(&log, &path).unwrap();
        let samples = read_trajectory_csv(&path).unwrap();
        let r = audit(&samples, &log.initial.profile, None).unwrap();
        assert!((r.speed - 1.0).abs() < 0.02, "speed {}", r.speed);
        assert!(r.exchanges >= 7);
        assert!((r.bos_fraction - log.report.bos_fraction).abs() < 1e-12);
        let pend = r.min_s_sl_pend.unwrap();
        assert!(pend > 0.0 && pend <= 1.0 + 0.05, "{pend}");
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        std::fs::write(
            &path,
            "t,com_x,com_y,com_z,copL_x,copL_y,copR_x\n0,0,0,1,0,0,0\n",
        )
        .unwrap();
        let err = format!("{:#}", read_trajectory_csv(&path).unwrap_err());
        assert!(err.contains("copR_y"), "{err}");
    }

    #[test]
    fn bad_support_label() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        std::fs::write(
            &path,
            "t,com_x,com_y,com_z,copL_x,copL_y,copR_x,copR_y,support\n0,0,0,1,0,0.1,0,-0.1,X\n",
        )
        .unwrap();
        assert!(read_trajectory_csv(&path).is_err());
    }
}
