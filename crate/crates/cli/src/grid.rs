//! Speed × heel-strike-angle grid runner.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::Context;
use saddlegait_core::{plan_walk, GaitRequest, TrajectoryLog};

use crate::config::RunConfig;
use crate::output::{self, fmt_float};

/// Walks timed for the planning-cost columns, in strides.
pub const TIMED_STRIDES: [usize; 2] = [1, 10];

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub v_des: f64,
    pub hs_angle_deg: f64,
    pub result: Result<CellSummary, String>,
}

#[derive(Debug, Clone)]
pub struct CellSummary {
    pub log: TrajectoryLog,
    pub rigid_vertical_error: f64,
    /// Planning wall time for each entry of [`TIMED_STRIDES`].
    pub timings: Vec<Duration>,
    pub trajectory_path: PathBuf,
}

impl CellSummary {
    pub fn vertical_error(&self) -> f64 {
        self.log.report.vertical_error()
    }
}

#[derive(Debug, Clone)]
pub struct GridReport {
    pub cells: Vec<CellOutcome>,
    pub summary_csv: PathBuf,
    pub summary_txt: PathBuf,
}

impl GridReport {
    pub fn failures(&self) -> impl Iterator<Item = &CellOutcome> {
        self.cells.iter().filter(|c| c.result.is_err())
    }
}

pub fn cell_stem(v_des: f64, hs_angle_deg: f64) -> String {
    format!("v{v_des:.2}_hs{hs_angle_deg:.1}")
}

fn time_plan(req: &GaitRequest) -> anyhow::Result<Duration> {
    let start = Instant::now();
    plan_walk(req)?;
    Ok(start.elapsed())
}

/// Plans one cell and writes its trajectory, energy, BoS and report files.
pub fn run_cell(
    config: &RunConfig,
    v_des: f64,
    hs_angle_deg: f64,
    out_dir: &Path,
) -> anyhow::Result<CellSummary> {
    let req = config.request_for(v_des, hs_angle_deg);
    let log = plan_walk(&req)?;
    let rigid = plan_walk(&GaitRequest {
        rigid_pendulum: true,
        ..req.clone()
    })?;

    let mut timings = Vec::with_capacity(TIMED_STRIDES.len());
    for strides in TIMED_STRIDES {
        timings.push(time_plan(&GaitRequest {
            n_steps: 2 * strides,
            ..req.clone()
        })?);
    }

    let stem = cell_stem(v_des, hs_angle_deg);
    let trajectory_path = out_dir.join(format!("traj_{stem}.csv"));
    output::write_trajectory_csv(&log, &trajectory_path)
        .with_context(|| format!("writing {}", trajectory_path.display()))?;
    output::write_report(
        &log,
        &out_dir.join(format!("report_{stem}.txt")),
        &out_dir.join(format!("report_{stem}.csv")),
    )?;
    if config.energy_csv {
        output::write_energy_csv(&log, &out_dir.join(format!("energy_{stem}.csv")))?;
    }
    if config.bos_points > 0 {
        output::write_bos_csv(
            &log,
            config.bos_points,
            &out_dir.join(format!("bos_{stem}.csv")),
        )?;
    }
    Ok(CellSummary {
        rigid_vertical_error: rigid.report.vertical_error(),
        log,
        timings,
        trajectory_path,
    })
}

const SUMMARY_HEADER: [&str; 20] = [
    "v_des",
    "hs_angle_deg",
    "status",
    "half_step",
    "half_step_min",
    "half_step_max",
    "min_S_SL_pend",
    "min_S_SL_jump",
    "min_S_SW",
    "vertical_excursion",
    "vertical_target",
    "vertical_error",
    "rigid_vertical_error",
    "bos_fraction",
    "ebos_fraction",
    "capture_fraction",
    "min_lyapunov_margin",
    "energy_rate_violations",
    "max_handoff_jump",
    "message",
];

fn summary_row(cell: &CellOutcome) -> Vec<String> {
    let mut row = vec![fmt_float(cell.v_des), fmt_float(cell.hs_angle_deg)];
    match &cell.result {
        Ok(s) => {
            let r = &s.log.report;
            let m = &s.log.initial.models;
            row.push("ok".into());
            row.extend([
                fmt_float(m.half_step_length),
                fmt_float(m.bounds.min),
                fmt_float(m.bounds.max),
                fmt_float(r.min_s_sl_pend),
                fmt_float(r.min_s_sl_jump),
                fmt_float(r.min_s_sw),
                fmt_float(r.vertical_excursion),
                fmt_float(r.vertical_target),
                fmt_float(r.vertical_error()),
                fmt_float(s.rigid_vertical_error),
                fmt_float(r.bos_fraction),
                fmt_float(r.ebos_fraction),
                fmt_float(r.capture_fraction),
                fmt_float(r.min_lyapunov_margin),
                r.energy_rate_violations.to_string(),
                fmt_float(r.max_handoff_jump),
                String::new(),
            ]);
        }
        Err(e) => {
            row.push("error".into());
            row.extend(std::iter::repeat_n(String::new(), 16));
            row.push(e.clone());
        }
    }
    row
}

fn summary_text(cells: &[CellOutcome]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>6} {:>6} {:>8} {:>8} {:>8} {:>9} {:>9} {:>8} {:>8} {:>11} {:>11}",
        "v",
        "hs_deg",
        "S_SL_p",
        "S_SL_j",
        "S_SW",
        "dz_err",
        "rigid_err",
        "in_bos",
        "capture",
        "1str_ms",
        "10str_ms"
    );
    for c in cells {
        match &c.result {
            Ok(r) => {
                let rep = &r.log.report;
                let ms = |d: &Duration| d.as_secs_f64() * 1e3;
                let _ = writeln!(
                    s,
                    "{:>6.2} {:>6.1} {:>8.4} {:>8.4} {:>8.4} {:>8.2}% {:>8.2}% {:>8.3} {:>8.3} {:>11.3} {:>11.3}",
                    c.v_des,
                    c.hs_angle_deg,
                    rep.min_s_sl_pend,
                    rep.min_s_sl_jump,
                    rep.min_s_sw,
                    100.0 * rep.vertical_error(),
                    100.0 * r.rigid_vertical_error,
                    rep.bos_fraction,
                    rep.capture_fraction,
                    ms(&r.timings[0]),
                    ms(&r.timings[1]),
                );
            }
            Err(e) => {
                let _ = writeln!(s, "{:>6.2} {:>6.1} error: {e}", c.v_des, c.hs_angle_deg);
            }
        }
    }
    s
}

/// Runs every `(v, θ_HS)` cell of the configured grid.
///
/// A failing cell is recorded in the summary and the remaining cells still
/// run. `summary.csv` holds no timings, so repeated runs write identical
/// bytes; timings go to `summary.txt`.
pub fn run_grid(config: &RunConfig, out_dir: &Path) -> anyhow::Result<GridReport> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut cells = Vec::new();
    for &v in &config.velocities {
        for &deg in &config.hs_angles_deg {
            let result = run_cell(config, v, deg, out_dir).map_err(|e| format!("{e:#}"));
            cells.push(CellOutcome {
                v_des: v,
                hs_angle_deg: deg,
                result,
            });
        }
    }
    let summary_csv = out_dir.join("summary.csv");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&summary_csv)?;
    w.write_record(SUMMARY_HEADER)?;
    for c in &cells {
        w.write_record(summary_row(c))?;
    }
    w.flush()?;
    let summary_txt = out_dir.join("summary.txt");
    output::write_text(&summary_txt, &summary_text(&cells))?;
    Ok(GridReport {
        cells,
        summary_csv,
        summary_txt,
    })
}
