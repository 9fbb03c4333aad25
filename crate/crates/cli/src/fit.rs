//! Speed regressions from marker trials.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use saddlegait_core::mocap::{gait_parameters, synthesize_markers, GaitParameters};
use saddlegait_core::{fit_linear, plan_walk, RegressionFit};

use crate::config::RunConfig;
use crate::mocap_io::{read_mocap_csv, write_mocap_csv};
use crate::output::fmt_float;

/// Sample period of synthesized trials, s.
pub const SYNTH_DT: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct Trial {
    pub path: PathBuf,
    pub params: GaitParameters,
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub trials: Vec<Trial>,
    /// Half step length against speed.
    pub half_step: RegressionFit,
    pub step_width: RegressionFit,
    pub vertical_amplitude: RegressionFit,
}

pub fn load_trial(path: &Path) -> anyhow::Result<Trial> {
    let frames = read_mocap_csv(path)?;
    let params = gait_parameters(&frames).with_context(|| format!("in {}", path.display()))?;
    Ok(Trial {
        path: path.to_path_buf(),
        params,
    })
}

/// Pools one trial per file and fits each parameter linearly in speed.
pub fn fit_trials(paths: &[PathBuf]) -> anyhow::Result<FitReport> {
    let trials = paths
        .iter()
        .map(|p| load_trial(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let v: Vec<f64> = trials.iter().map(|t| t.params.speed).collect();
    let column = |f: fn(&GaitParameters) -> f64| -> Vec<f64> {
        trials.iter().map(|t| f(&t.params)).collect()
    };
    let half_step = fit_linear(&v, &column(|p| p.step_length / 2.0)).context("half step fit")?;
    let step_width = fit_linear(&v, &column(|p| p.step_width)).context("step width fit")?;
    let vertical_amplitude =
        fit_linear(&v, &column(|p| p.vertical_amplitude)).context("vertical amplitude fit")?;
    Ok(FitReport {
        trials,
        half_step,
        step_width,
        vertical_amplitude,
    })
}

/// Plans a walk for every configured speed and writes its markers as
/// `mocap_v{v}.csv` under `out_dir`.
pub fn synthesize_trials(config: &RunConfig, out_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut paths = Vec::with_capacity(config.velocities.len());
    for &v in &config.velocities {
        let mut req = config.request_for(v, config.hs_angle_deg);
        req.dt = SYNTH_DT;
        let log = plan_walk(&req).with_context(|| format!("planning v = {v}"))?;
        let path = out_dir.join(format!("mocap_v{v:.2}.csv"));
        write_mocap_csv(&synthesize_markers(&log), &path)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn fit_text(r: &FitReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trials");
    for t in &r.trials {
        let p = &t.params;
        let _ = writeln!(
            s,
            "  {} v={} step_length={} step_width={} dz={}",
            t.path.display(),
            fmt_float(p.speed),
            fmt_float(p.step_length),
            fmt_float(p.step_width),
            fmt_float(p.vertical_amplitude),
        );
    }
    let _ = writeln!(s, "fits (y = slope * v + intercept)");
    for (name, f) in [
        ("half_step", &r.half_step),
        ("step_width", &r.step_width),
        ("vertical_amplitude", &r.vertical_amplitude),
    ] {
        let _ = writeln!(
            s,
            "  {name:<20} slope={} intercept={} r2={}",
            fmt_float(f.slope),
            fmt_float(f.intercept),
            fmt_float(f.r_squared),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    #[test]
    fn synthetic_trials_recover_half_step_model() {
        let config = parse_config_str(
            "v_des=1\nn_steps=8\nbody_height=1.79\nmass=63.3\nhs_angle_deg=10\nvelocities=0.7,1.0,1.3",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = synthesize_trials(&config, dir.path()).unwrap();
        let r = fit_trials(&paths).unwrap();
        assert!(
            (r.half_step.slope - 0.1802).abs() < 5e-3,
            "{}",
            r.half_step.slope
        );
        assert!(
            (r.half_step.intercept - 0.1351).abs() < 5e-3,
            "{}",
            r.half_step.intercept
        );
    }

    #[test]
    fn two_trials_are_not_enough() {
        let config = parse_config_str(
            "v_des=1\nn_steps=4\nbody_height=1.79\nmass=63.3\nhs_angle_deg=10\nvelocities=0.8,1.1",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = synthesize_trials(&config, dir.path()).unwrap();
        assert!(fit_trials(&paths).is_err());
    }
}
