use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use saddlegait_cli::audit::{audit, audit_text, read_trajectory_csv, write_audit_csv};
use saddlegait_cli::config::{ConfigBuilder, RunConfig};
use saddlegait_cli::fit::{fit_text, fit_trials, synthesize_trials};
use saddlegait_cli::grid::run_grid;
use saddlegait_cli::output;
use saddlegait_core::energy::EnergyBudget;
use saddlegait_core::{plan_walk, AnthroProfile};

#[derive(Parser)]
#[command(name = "saddlegait", version, about = "Saddle-point gait planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one walk and write its trajectory, energy and report files.
    Plan(RunArgs),
    /// Plan every speed × heel-strike-angle cell and write a summary.
    Grid(RunArgs),
    /// Score an existing trajectory CSV.
    Audit(AuditArgs),
    /// Fit speed regressions from marker trials.
    Fit(FitArgs),
}

/// Every flag overrides the key of the same name in `--config`.
#[derive(Args, Default)]
struct ConfigArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    v_des: Option<String>,
    #[arg(long)]
    n_steps: Option<String>,
    #[arg(long)]
    body_height: Option<String>,
    #[arg(long)]
    mass: Option<String>,
    #[arg(long)]
    hs_angle_deg: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    d_h: Option<String>,
    #[arg(long)]
    clearance: Option<String>,
    #[arg(long)]
    w_budget: Option<String>,
    #[arg(long)]
    w_c: Option<String>,
    #[arg(long)]
    reach_coeff: Option<String>,
    #[arg(long)]
    first_support: Option<String>,
    #[arg(long)]
    rigid_pendulum: Option<String>,
    /// Comma-separated grid speeds.
    #[arg(long)]
    velocities: Option<String>,
    /// Comma-separated grid heel-strike angles.
    #[arg(long)]
    hs_angles_deg: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    #[arg(long)]
    bos_points: Option<String>,
    #[arg(long)]
    energy_csv: Option<String>,
}

impl ConfigArgs {
    fn build(&self) -> anyhow::Result<RunConfig> {
        let mut b = match &self.config {
            Some(p) => ConfigBuilder::from_path(p)?,
            None => ConfigBuilder::new(),
        };
        let flags = [
            ("v_des", &self.v_des),
            ("n_steps", &self.n_steps),
            ("body_height", &self.body_height),
            ("mass", &self.mass),
            ("hs_angle_deg", &self.hs_angle_deg),
            ("dt", &self.dt),
            ("d_h", &self.d_h),
            ("clearance", &self.clearance),
            ("w_budget", &self.w_budget),
            ("w_c", &self.w_c),
            ("reach_coeff", &self.reach_coeff),
            ("first_support", &self.first_support),
            ("rigid_pendulum", &self.rigid_pendulum),
            ("velocities", &self.velocities),
            ("hs_angles_deg", &self.hs_angles_deg),
            ("output_dir", &self.output_dir),
            ("bos_points", &self.bos_points),
            ("energy_csv", &self.energy_csv),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                b.set(key, v.as_str())?;
            }
        }
        for kv in &self.set {
            let Some((k, v)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {kv:?}");
            };
            b.set(k.trim(), v.trim())?;
        }
        Ok(b.finish()?)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct AuditArgs {
    /// Trajectory CSV to score.
    trajectory: PathBuf,
    #[arg(long)]
    body_height: f64,
    #[arg(long)]
    mass: f64,
    #[arg(long)]
    d_h: Option<f64>,
    #[arg(long)]
    w_budget: Option<f64>,
    #[arg(long)]
    w_c: Option<f64>,
    /// Write a per-sample audit CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Marker CSV files, one trial each.
    trials: Vec<PathBuf>,
    /// Plan and write pseudo marker trials for the configured speeds into
    /// this directory, then fit them.
    #[arg(long, value_name = "DIR")]
    synthesize: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> std::io::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn plan(config: &RunConfig) -> anyhow::Result<()> {
    let out = &config.output_dir;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let log = plan_walk(&config.request())?;
    let traj = out.join("trajectory.csv");
    output::write_trajectory_csv(&log, &traj)?;
    output::write_report(&log, &out.join("report.txt"), &out.join("report.csv"))?;
    if config.energy_csv {
        output::write_energy_csv(&log, &out.join("energy.csv"))?;
    }
    if config.bos_points > 0 {
        output::write_bos_csv(&log, config.bos_points, &out.join("bos.csv"))?;
    }
    std::fs::write(out.join("config.txt"), config.to_config_string())?;
    emit(&format!(
        "{}wrote {}\n",
        output::report_text(&log),
        traj.display()
    ))?;
    Ok(())
}

fn grid(config: &RunConfig) -> anyhow::Result<bool> {
    let report = run_grid(config, &config.output_dir)?;
    let text = std::fs::read_to_string(&report.summary_txt)?;
    emit(&format!("{text}wrote {}\n", report.summary_csv.display()))?;
    let ok = report.failures().next().is_none();
    Ok(ok)
}

fn run_audit(a: &AuditArgs) -> anyhow::Result<()> {
    let mut profile = AnthroProfile::new(a.body_height, a.mass)?;
    if let Some(d_h) = a.d_h {
        profile = profile.with_pivot_distance(d_h)?;
    }
    let samples = read_trajectory_csv(&a.trajectory)?;
    let budget = match (a.w_budget, a.w_c) {
        (None, None) => None,
        (w, w_c) => {
            let speed_guess = audit(&samples, &profile, None)?.speed;
            let mut b = EnergyBudget::for_walk(&profile, speed_guess);
            b.w = w.unwrap_or(b.w);
            b.w_c = w_c.unwrap_or(b.w);
            Some(b)
        }
    };
    let report = audit(&samples, &profile, budget)?;
    emit(&audit_text(&report))?;
    if let Some(path) = &a.csv {
        write_audit_csv(&report, path)?;
    }
    Ok(())
}

fn run_fit(a: &FitArgs) -> anyhow::Result<()> {
    let mut paths = a.trials.clone();
    if let Some(dir) = &a.synthesize {
        paths.extend(synthesize_trials(&a.config.build()?, dir)?);
    }
    if paths.is_empty() {
        bail!("no trials given; pass marker CSV files or --synthesize DIR");
    }
    emit(&fit_text(&fit_trials(&paths)?))?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Plan(a) => plan(&a.config.build()?).map(|_| true),
        Command::Grid(a) => grid(&a.config.build()?),
        Command::Audit(a) => run_audit(a).map(|_| true),
        Command::Fit(a) => run_fit(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
