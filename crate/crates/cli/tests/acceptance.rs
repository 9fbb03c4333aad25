//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddlegait_cli::config::{parse_config_str, RunConfig};
use saddlegait_cli::grid::{run_grid, CellSummary, GridReport};
use saddlegait_core::bos::BosRegion;
use saddlegait_core::energy::{
    energy_series, lyapunov_margin, static_capture, EnergyBudget, EnergyState,
};
use saddlegait_core::params::{step_length_half, step_width, vertical_amplitude};
use saddlegait_core::planner::DEFAULT_DT;
use saddlegait_core::{build_frame, speed_models, AnthroProfile, Point2, Point3};

const BODY_HEIGHT: f64 = 1.79;
const MASS: f64 = 63.3;

type Outcome = Result<String, String>;

fn grid_config() -> RunConfig {
    parse_config_str(&format!(
        "v_des = 1.0\nn_steps = 2\nbody_height = {BODY_HEIGHT}\nmass = {MASS}\n\
         hs_angle_deg = 10\nvelocities = 0.7, 1.0, 1.2, 1.6\nhs_angles_deg = 5, 10, 15\n\
         energy_csv = true\nbos_points = 16\n"
    ))
    .expect("grid configuration parses")
}

fn ok_cells(grid: &GridReport) -> Result<Vec<(f64, f64, &CellSummary)>, String> {
    grid.cells
        .iter()
        .map(|c| match &c.result {
            Ok(s) => Ok((c.v_des, c.hs_angle_deg, s)),
            Err(e) => Err(format!(
                "cell v={} hs={} failed: {e}",
                c.v_des, c.hs_angle_deg
            )),
        })
        .collect()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn regression_fidelity() -> Outcome {
    let cases = [
        ("step_length_half(1.0)", step_length_half(1.0), 0.3153),
        ("step_width(0.8)", step_width(0.8), 0.17536),
        ("vertical_amplitude(1.2)", vertical_amplitude(1.2), 0.034447),
    ];
    for (name, got, want) in cases {
        let got = got.map_err(|e| format!("{name}: {e}"))?;
        check((got - want).abs() <= 1e-9, || {
            format!("{name} = {got}, expected {want}")
        })?;
    }
    let eval = || {
        std::hint::black_box(step_length_half(std::hint::black_box(1.0)).unwrap())
            + step_width(std::hint::black_box(0.8)).unwrap()
            + vertical_amplitude(std::hint::black_box(1.2)).unwrap()
    };
    eval();
    let mut times: Vec<Duration> = (0..101)
        .map(|_| {
            let start = Instant::now();
            eval();
            start.elapsed()
        })
        .collect();
    times.sort();
    let median = times[50];
    check(median < Duration::from_millis(1), || {
        format!("runtime {median:?} >= 1 ms")
    })?;
    Ok(format!(
        "three values exact to 1e-9, median runtime {median:?}"
    ))
}

fn grid_runs(grid: &GridReport) -> Outcome {
    let cells = ok_cells(grid)?;
    check(cells.len() == 12, || {
        format!("{} cells, expected 12", cells.len())
    })?;
    let mut worst = Duration::ZERO;
    for (v, deg, s) in &cells {
        check(s.log.request.dt == DEFAULT_DT, || {
            format!("dt = {}", s.log.request.dt)
        })?;
        let t10 = s.timings[1];
        check(t10 < Duration::from_secs(1), || {
            format!("v={v} hs={deg}: 10-stride planning took {t10:?}")
        })?;
        worst = worst.max(t10);
    }
    Ok(format!(
        "12 cells at dt = 0.08 s, slowest 10-stride plan {worst:?}"
    ))
}

fn step_window(grid: &GridReport) -> Outcome {
    for (v, deg, s) in ok_cells(grid)? {
        let m = &s.log.initial.models;
        let b = m.bounds;
        check(
            b.min < m.half_step_length && m.half_step_length < b.max,
            || {
                format!(
                    "v={v} hs={deg}: half step {} outside ({}, {})",
                    m.half_step_length, b.min, b.max
                )
            },
        )?;
    }
    let profile = AnthroProfile::new(BODY_HEIGHT, MASS).map_err(|e| e.to_string())?;
    let open = |v: f64| {
        let min = v / (2.0 * profile.natural_frequency);
        min < profile.max_half_step()
    };
    let (mut lo, mut hi) = (1.0, 5.0);
    check(open(lo) && !open(hi), || {
        "window does not close between 1 and 5 m/s".into()
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if open(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    check((hi - 3.0).abs() <= 0.15, || {
        format!("window closes at {hi} m/s")
    })?;
    check(speed_models(hi + 1e-6, &profile).is_err(), || {
        format!("planner accepts {} m/s past the closed window", hi + 1e-6)
    })?;
    Ok(format!(
        "all half steps inside the window, window closes at {hi:.4} m/s"
    ))
}

fn mediolateral_closure(grid: &GridReport) -> Outcome {
    let target = 1.0 - 1.0 / PI;
    let mut misses = Vec::new();
    for (v, deg, s) in ok_cells(grid)? {
        if let Some(bad) = s
            .log
            .samples
            .iter()
            .find(|p| p.s_sw.is_nan() || p.s_sw <= 0.0)
        {
            return Err(format!(
                "v={v} hs={deg}: S_SW = {} at t = {}",
                bad.s_sw, bad.t
            ));
        }
        let min = s.log.report.min_s_sw;
        if (min - target).abs() > 1e-6 {
            misses.push(format!("v={v} hs={deg}: {min:.6}"));
        }
    }
    check(misses.is_empty(), || {
        format!("min S_SW differs from {target:.6}: {}", misses.join("; "))
    })?;
    Ok(format!(
        "min S_SW = {target:.6} in every cell, S_SW > 0 throughout"
    ))
}

fn vertical_targeting(grid: &GridReport) -> Outcome {
    let mut worst: f64 = 0.0;
    for (v, deg, s) in ok_cells(grid)? {
        let err = s.vertical_error();
        check(err <= 0.15, || {
            format!("v={v} hs={deg}: vertical error {:.2}%", 100.0 * err)
        })?;
        check(err < s.rigid_vertical_error, || {
            format!(
                "v={v} hs={deg}: error {:.2}% not below rigid {:.2}%",
                100.0 * err,
                100.0 * s.rigid_vertical_error
            )
        })?;
        worst = worst.max(err);
    }
    Ok(format!(
        "worst vertical error {:.2}%, below rigid baseline in every cell",
        100.0 * worst
    ))
}

fn continuity_geometry(grid: &GridReport) -> Outcome {
    let mut worst_jump: f64 = 0.0;
    let mut worst_closure: f64 = 0.0;
    for (v, deg, s) in ok_cells(grid)? {
        let jump = s.log.report.max_handoff_jump;
        check(jump < 1e-3, || {
            format!("v={v} hs={deg}: exchange jump {jump} m")
        })?;
        worst_jump = worst_jump.max(jump);
        for p in &s.log.samples {
            let d = p.com.xy() - p.stance_cop;
            let residual = p.com.z * p.com.z + d.norm_squared() - p.leg_length * p.leg_length;
            check(residual.abs() <= 1e-12, || {
                format!(
                    "v={v} hs={deg}: closure residual {residual:e} at t = {}",
                    p.t
                )
            })?;
            worst_closure = worst_closure.max(residual.abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_trip: f64 = 0.0;
    for _ in 0..1000 {
        let l = Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let r = l + cop_offset(&mut rng);
        let frame = build_frame(l, r).map_err(|e| e.to_string())?;
        let p = Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let back = frame.to_task(&frame.to_saddle(&p));
        worst_trip = worst_trip.max((back - p).norm());
    }
    check(worst_trip <= 1e-12, || {
        format!("saddle round trip error {worst_trip:e}")
    })?;
    Ok(format!(
        "max exchange jump {worst_jump:e} m, closure {worst_closure:e}, round trip {worst_trip:e}"
    ))
}

fn cop_offset(rng: &mut ChaCha8Rng) -> saddlegait_core::Vector2<f64> {
    let angle = rng.random_range(0.0..2.0 * PI);
    let len = rng.random_range(0.05..0.8);
    saddlegait_core::Vector2::new(len * angle.cos(), len * angle.sin())
}

fn bos_containment(grid: &GridReport) -> Outcome {
    let mut worst: f64 = 1.0;
    for (v, deg, s) in ok_cells(grid)? {
        let r = &s.log.report;
        check(r.bos_fraction >= 0.8, || {
            format!("v={v} hs={deg}: in_bos fraction {}", r.bos_fraction)
        })?;
        check(r.exits_near_transitions, || {
            format!("v={v} hs={deg}: BoS exit away from a support exchange")
        })?;
        worst = worst.min(r.bos_fraction);
    }
    Ok(format!(
        "lowest in_bos fraction {worst}, exits only near exchanges"
    ))
}

fn energy_properties() -> Outcome {
    let profile = AnthroProfile::new(BODY_HEIGHT, MASS).map_err(|e| e.to_string())?;
    let v = 1.0;
    let budget = EnergyBudget::for_walk(&profile, v);
    let t: Vec<f64> = (0..50).map(|i| i as f64 * DEFAULT_DT).collect();
    let com: Vec<Point3<f64>> = t.iter().map(|&t| Point3::new(v * t, 0.0, 0.95)).collect();
    let u_mos = vec![0.0; t.len()];
    let series = energy_series(&t, &com, &u_mos, &profile, &budget).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for w in series.windows(2) {
        let m = lyapunov_margin(&w[0], &w[1], budget.w_c);
        worst = worst.max((m - budget.w_c).abs());
    }
    check(worst <= 1e-9, || {
        format!("margin differs from W_C by {worst:e}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let base = EnergyState {
        u: 600.0,
        k: 30.0,
        w: 0.0,
        e_p: 0.0,
        u_mos: 640.0,
        k_des: 31.65,
        one_sided: false,
    };
    let mut budgets: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..40.0)).collect();
    budgets.sort_by(f64::total_cmp);
    let flags: Vec<bool> = budgets
        .iter()
        .map(|&w| static_capture(&EnergyState { w, ..base }))
        .collect();
    let flips = flags.windows(2).filter(|p| p[0] && !p[1]).count();
    check(flips == 0, || {
        "static capture lost while W increased".into()
    })?;
    check(flags.contains(&true) && flags.contains(&false), || {
        "budget sweep never crosses the capture threshold".into()
    })?;
    Ok(format!(
        "margin = W_C within {worst:e}, capture monotone over 100 budgets"
    ))
}

/// Membership from first principles: disc around the CoP midpoint through
/// both CoPs, cut by the strip of half-width `cap` across the CoP segment.
fn raster_member(l: Point2<f64>, r: Point2<f64>, cap: f64, p: Point2<f64>) -> (bool, f64) {
    let mid = Point2::new(0.5 * (l.x + r.x), 0.5 * (l.y + r.y));
    let span = ((l.x - r.x).powi(2) + (l.y - r.y).powi(2)).sqrt();
    let (uy_x, uy_y) = ((l.x - r.x) / span, (l.y - r.y) / span);
    let (dx, dy) = (p.x - mid.x, p.y - mid.y);
    let ys = dx * uy_x + dy * uy_y;
    let xs = dx * uy_y - dy * uy_x;
    let radius = 0.5 * span;
    let rho = (xs * xs + ys * ys).sqrt();
    let inside = rho <= radius && xs.abs() <= cap;
    let clearance = (rho - radius).abs().min((xs.abs() - cap).abs());
    (inside, clearance)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut compared = 0usize;
    for k in 0..100 {
        let l = Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let r = l + cop_offset(&mut rng);
        let cap = rng.random_range(0.02..0.3);
        let region = BosRegion::from_cops(l, r, cap).map_err(|e| e.to_string())?;
        let radius = 0.5 * (l - r).norm();
        let mid = Point2::new(0.5 * (l.x + r.x), 0.5 * (l.y + r.y));
        let n = 100;
        for i in 0..n {
            for j in 0..n {
                let p = Point2::new(
                    mid.x - 1.1 * radius + 2.2 * radius * i as f64 / (n - 1) as f64,
                    mid.y - 1.1 * radius + 2.2 * radius * j as f64 / (n - 1) as f64,
                );
                let (want, clearance) = raster_member(l, r, cap, p);
                if clearance <= 1e-6 {
                    continue;
                }
                compared += 1;
                let got = region.contains(&p);
                check(got == want, || {
                    format!(
                        "posture {k}: point ({}, {}) oracle {want}, region {got}",
                        p.x, p.y
                    )
                })?;
            }
        }
    }
    Ok(format!(
        "{compared} raster points over 100 postures, no disagreement"
    ))
}

fn csv_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap_or_default();
            (p.file_name().unwrap().to_string_lossy().into_owned(), bytes)
        })
        .collect();
    files.sort();
    Ok(files)
}

fn determinism(first_dir: &Path, config: &RunConfig) -> Outcome {
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_grid(config, second.path()).map_err(|e| format!("{e:#}"))?;
    let a = csv_files(first_dir)?;
    let b = csv_files(second.path())?;
    check(!a.is_empty(), || "first run wrote no CSV files".into())?;
    let names = |v: &[(String, Vec<u8>)]| v.iter().map(|f| f.0.clone()).collect::<Vec<_>>();
    check(names(&a) == names(&b), || {
        "runs wrote different file sets".into()
    })?;
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        check(x == y, || format!("{name} differs between runs"))?;
    }
    Ok(format!(
        "{} CSV files byte-identical across two runs",
        a.len()
    ))
}

fn main() -> ExitCode {
    let config = grid_config();
    let first = tempfile::tempdir().expect("temporary directory");
    let grid = run_grid(&config, first.path());

    let with_grid = |f: fn(&GridReport) -> Outcome| -> Outcome {
        match &grid {
            Ok(g) => f(g),
            Err(e) => Err(format!("grid run failed: {e:#}")),
        }
    };
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "regression fidelity", regression_fidelity()),
        (2, "grid runs", with_grid(grid_runs)),
        (3, "step-stability window", with_grid(step_window)),
        (
            4,
            "mediolateral metric closure",
            with_grid(mediolateral_closure),
        ),
        (
            5,
            "vertical amplitude targeting",
            with_grid(vertical_targeting),
        ),
        (6, "continuity and geometry", with_grid(continuity_geometry)),
        (7, "BoS containment", with_grid(bos_containment)),
        (8, "energy properties", energy_properties()),
        (9, "BoS oracle equivalence", oracle_equivalence()),
        (10, "determinism", determinism(first.path(), &config)),
    ];

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("[PASS] criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {n} ({name}): {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
