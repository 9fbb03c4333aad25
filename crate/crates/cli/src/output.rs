//! Trajectory, energy, BoS and report files.
//!
//! All floats go through [`fmt_float`], so output is byte-stable and does
//! not depend on locale.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use saddlegait_core::bos::BosRegion;
use saddlegait_core::{StabilityReport, TrajectoryLog};

pub const TRAJECTORY_HEADER: [&str; 16] = [
    "t",
    "com_x",
    "com_y",
    "com_z",
    "copL_x",
    "copL_y",
    "copR_x",
    "copR_y",
    "phase",
    "support",
    "theta_TO_deg",
    "theta_HS_deg",
    "S_SL_pend",
    "S_SL_jump",
    "S_SW",
    "in_bos",
];

pub const ENERGY_HEADER: [&str; 12] = [
    "t",
    "U",
    "K",
    "W",
    "E_p",
    "U_MoS",
    "K_des",
    "one_sided",
    "static_capture",
    "lyapunov_margin",
    "energy_rate_ok",
    "in_ebos",
];

/// Nine significant digits, `%g` style: fixed notation for moderate
/// exponents, scientific otherwise, trailing zeros removed, no negative zero.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    const DIGITS: i32 = 9;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        let s = trim_zeros(&format!("{x:.decimals$}"));
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn bool01(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn csv_writer(path: &Path) -> csv::Result<csv::Writer<File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
}

pub fn write_trajectory_csv(log: &TrajectoryLog, path: &Path) -> csv::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for s in &log.samples {
        w.write_record([
            fmt_float(s.t),
            fmt_float(s.com.x),
            fmt_float(s.com.y),
            fmt_float(s.com.z),
            fmt_float(s.cop_left.x),
            fmt_float(s.cop_left.y),
            fmt_float(s.cop_right.x),
            fmt_float(s.cop_right.y),
            fmt_float(s.phase.angle),
            s.support().as_char().to_string(),
            fmt_float(s.theta_to.to_degrees()),
            fmt_float(s.theta_hs.to_degrees()),
            fmt_float(s.s_sl_pend),
            fmt_float(s.s_sl_jump),
            fmt_float(s.s_sw),
            bool01(s.in_bos).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_energy_csv(log: &TrajectoryLog, path: &Path) -> csv::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(ENERGY_HEADER)?;
    for s in &log.samples {
        let e = &s.energy;
        w.write_record([
            fmt_float(s.t),
            fmt_float(e.u),
            fmt_float(e.k),
            fmt_float(e.w),
            fmt_float(e.e_p),
            fmt_float(e.u_mos),
            fmt_float(e.k_des),
            bool01(e.one_sided).to_string(),
            bool01(s.static_capture).to_string(),
            fmt_float(s.lyapunov_margin),
            bool01(s.energy_rate_ok).to_string(),
            bool01(s.in_ebos).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per border point per sample: `t,index,x,y` of the I-BoS.
pub fn write_bos_csv(log: &TrajectoryLog, n_points: usize, path: &Path) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "index", "x", "y"])?;
    let d_h = log.initial.profile.pivot_distance;
    for s in &log.samples {
        let region = BosRegion::from_cops(s.cop_left, s.cop_right, d_h)?;
        for (i, p) in region.boundary(n_points).iter().enumerate() {
            w.write_record([
                fmt_float(s.t),
                i.to_string(),
                fmt_float(p.x),
                fmt_float(p.y),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `(name, value)` pairs of a report, in output order.
pub fn report_fields(r: &StabilityReport) -> Vec<(&'static str, String)> {
    vec![
        ("min_S_SL_pend", fmt_float(r.min_s_sl_pend)),
        ("min_S_SL_jump", fmt_float(r.min_s_sl_jump)),
        ("min_S_SW", fmt_float(r.min_s_sw)),
        ("bos_fraction", fmt_float(r.bos_fraction)),
        ("ebos_fraction", fmt_float(r.ebos_fraction)),
        (
            "exits_near_transitions",
            bool01(r.exits_near_transitions).into(),
        ),
        ("ebos_at_boundaries", bool01(r.ebos_at_boundaries).into()),
        ("capture_fraction", fmt_float(r.capture_fraction)),
        ("min_lyapunov_margin", fmt_float(r.min_lyapunov_margin)),
        (
            "energy_rate_violations",
            r.energy_rate_violations.to_string(),
        ),
        ("max_handoff_jump", fmt_float(r.max_handoff_jump)),
        ("vertical_excursion", fmt_float(r.vertical_excursion)),
        ("vertical_target", fmt_float(r.vertical_target)),
        ("vertical_error", fmt_float(r.vertical_error())),
    ]
}

pub fn report_text(log: &TrajectoryLog) -> String {
    let req = &log.request;
    let m = &log.initial.models;
    let mut s = String::new();
    let _ = writeln!(s, "walk");
    let _ = writeln!(s, "  v_des            {}", fmt_float(req.v_des));
    let _ = writeln!(
        s,
        "  hs_angle_deg     {}",
        fmt_float(req.max_theta_hs.to_degrees())
    );
    let _ = writeln!(s, "  n_steps          {}", req.n_steps);
    let _ = writeln!(s, "  dt               {}", fmt_float(req.dt));
    let _ = writeln!(s, "  samples          {}", log.samples.len());
    let _ = writeln!(s, "  rigid_pendulum   {}", req.rigid_pendulum);
    let _ = writeln!(s, "models");
    let _ = writeln!(s, "  step_width       {}", fmt_float(m.step_width));
    let _ = writeln!(s, "  step_length      {}", fmt_float(m.step_length));
    let _ = writeln!(s, "  cadence          {}", fmt_float(m.cadence));
    let _ = writeln!(s, "  lateral_amp      {}", fmt_float(m.lateral_amplitude));
    let _ = writeln!(
        s,
        "  half_step        {} in ({}, {})",
        fmt_float(m.half_step_length),
        fmt_float(m.bounds.min),
        fmt_float(m.bounds.max)
    );
    let _ = writeln!(s, "steps");
    for st in &log.steps {
        let _ = writeln!(
            s,
            "  {} stance={} land=({}, {}) t_land={} t_exchange={} theta_TO_deg={} hs_lever={}",
            st.index,
            st.stance.as_char(),
            fmt_float(st.landing.x),
            fmt_float(st.landing.y),
            fmt_float(st.t_land),
            fmt_float(st.t_exchange),
            fmt_float(st.event.max_theta_to.to_degrees()),
            fmt_float(st.event.hs_lever),
        );
    }
    let _ = writeln!(s, "stability");
    for (k, v) in report_fields(&log.report) {
        let _ = writeln!(s, "  {k:<24} {v}");
    }
    s
}

pub fn write_report(log: &TrajectoryLog, text_path: &Path, csv_path: &Path) -> anyhow::Result<()> {
    std::fs::write(text_path, report_text(log))?;
    let fields = report_fields(&log.report);
    let mut w = csv_writer(csv_path)?;
    w.write_record(fields.iter().map(|(k, _)| *k))?;
    w.write_record(fields.iter().map(|(_, v)| v.as_str()))?;
    w.flush()?;
    Ok(())
}

/// Writes `text` through a buffered file handle.
pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()
}
