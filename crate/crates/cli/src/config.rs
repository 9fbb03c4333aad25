//! Line-oriented `key=value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use saddlegait_core::foot::DEFAULT_SWING_CLEARANCE;
use saddlegait_core::params::{DEFAULT_PIVOT_DISTANCE, DEFAULT_REACH_COEFF};
use saddlegait_core::planner::{DEFAULT_DT, MAX_SPEED};
use saddlegait_core::{GaitRequest, Point2, Side};
use thiserror::Error;

pub const REQUIRED_KEYS: [&str; 5] = ["v_des", "n_steps", "body_height", "mass", "hs_angle_deg"];

pub const OPTIONAL_KEYS: [&str; 17] = [
    "dt",
    "d_h",
    "clearance",
    "w_budget",
    "w_c",
    "reach_coeff",
    "first_support",
    "cop_left_x",
    "cop_left_y",
    "cop_right_x",
    "cop_right_y",
    "rigid_pendulum",
    "velocities",
    "hs_angles_deg",
    "output_dir",
    "bos_points",
    "energy_csv",
];

pub const DEFAULT_VELOCITIES: [f64; 4] = [0.7, 1.0, 1.2, 1.6];
pub const DEFAULT_HS_ANGLES_DEG: [f64; 3] = [5.0, 10.0, 15.0];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: invalid {key}: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Every accepted setting, in file units (degrees for angles).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub v_des: f64,
    pub n_steps: usize,
    pub body_height: f64,
    pub mass: f64,
    pub hs_angle_deg: f64,
    pub dt: f64,
    pub d_h: f64,
    pub clearance: f64,
    pub w_budget: Option<f64>,
    pub w_c: Option<f64>,
    pub reach_coeff: f64,
    pub first_support: Side,
    pub initial_feet: Option<(Point2<f64>, Point2<f64>)>,
    pub rigid_pendulum: bool,
    pub velocities: Vec<f64>,
    pub hs_angles_deg: Vec<f64>,
    pub output_dir: PathBuf,
    /// Border points per sample in the BoS file; 0 disables the file.
    pub bos_points: usize,
    /// Write the per-sample energy file.
    pub energy_csv: bool,
}

impl RunConfig {
    pub fn request(&self) -> GaitRequest {
        self.request_for(self.v_des, self.hs_angle_deg)
    }

    /// The configured request at another grid cell.
    pub fn request_for(&self, v_des: f64, hs_angle_deg: f64) -> GaitRequest {
        GaitRequest {
            dt: self.dt,
            initial_feet: self.initial_feet,
            first_support: self.first_support,
            swing_clearance: self.clearance,
            w_budget: self.w_budget,
            w_c: self.w_c,
            pivot_distance: self.d_h,
            reach_coeff: self.reach_coeff,
            rigid_pendulum: self.rigid_pendulum,
            ..GaitRequest::new(
                v_des,
                hs_angle_deg.to_radians(),
                self.n_steps,
                self.body_height,
                self.mass,
            )
        }
    }

    /// Serialises back to the file format; parsing the result gives `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let list = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(s, "v_des={}", self.v_des);
        let _ = writeln!(s, "n_steps={}", self.n_steps);
        let _ = writeln!(s, "body_height={}", self.body_height);
        let _ = writeln!(s, "mass={}", self.mass);
        let _ = writeln!(s, "hs_angle_deg={}", self.hs_angle_deg);
        let _ = writeln!(s, "dt={}", self.dt);
        let _ = writeln!(s, "d_h={}", self.d_h);
        let _ = writeln!(s, "clearance={}", self.clearance);
        if let Some(w) = self.w_budget {
            let _ = writeln!(s, "w_budget={w}");
        }
        if let Some(w) = self.w_c {
            let _ = writeln!(s, "w_c={w}");
        }
        let _ = writeln!(s, "reach_coeff={}", self.reach_coeff);
        let _ = writeln!(s, "first_support={}", self.first_support.as_char());
        if let Some((l, r)) = self.initial_feet {
            let _ = writeln!(s, "cop_left_x={}\ncop_left_y={}", l.x, l.y);
            let _ = writeln!(s, "cop_right_x={}\ncop_right_y={}", r.x, r.y);
        }
        let _ = writeln!(s, "rigid_pendulum={}", self.rigid_pendulum);
        let _ = writeln!(s, "velocities={}", list(&self.velocities));
        let _ = writeln!(s, "hs_angles_deg={}", list(&self.hs_angles_deg));
        let _ = writeln!(s, "output_dir={}", self.output_dir.display());
        let _ = writeln!(s, "bos_points={}", self.bos_points);
        let _ = writeln!(s, "energy_csv={}", self.energy_csv);
        s
    }
}

/// Collects raw entries before validation. Later `set` calls from command
/// line overrides replace file entries.
#[derive(Debug, Default, Clone)]
pub struct ConfigBuilder {
    entries: BTreeMap<String, (usize, String)>,
}

fn is_known(key: &str) -> bool {
    REQUIRED_KEYS.contains(&key) || OPTIONAL_KEYS.contains(&key)
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut b = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.to_string(),
                });
            };
            let key = key.trim();
            if !is_known(key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if b.entries.contains_key(key) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            b.entries
                .insert(key.to_string(), (line, value.trim().to_string()));
        }
        Ok(b)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_str(&text)
    }

    /// Sets or overrides a key; line 0 marks a command-line value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !is_known(key) {
            return Err(ConfigError::UnknownKey {
                line: 0,
                key: key.to_string(),
            });
        }
        self.entries.insert(key.to_string(), (0, value.into()));
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| ConfigError::Value {
                line,
                key: key.to_string(),
                message: format!("{v:?}: {e}"),
            }),
        }
    }

    fn float(
        &self,
        key: &str,
        check: impl Fn(f64) -> Option<String>,
    ) -> Result<Option<f64>, ConfigError> {
        let Some(x) = self.parse::<f64>(key)? else {
            return Ok(None);
        };
        let line = self.raw(key).map(|(l, _)| l).unwrap_or(0);
        if !x.is_finite() {
            return Err(ConfigError::Value {
                line,
                key: key.into(),
                message: "must be finite".into(),
            });
        }
        match check(x) {
            Some(message) => Err(ConfigError::Value {
                line,
                key: key.into(),
                message,
            }),
            None => Ok(Some(x)),
        }
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let err = |message: String| ConfigError::Value {
            line,
            key: key.into(),
            message,
        };
        let xs = v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| err(format!("{s:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if xs.is_empty() || xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(err(
                "expected a comma-separated list of positive numbers".into()
            ));
        }
        Ok(xs)
    }

    pub fn finish(&self) -> Result<RunConfig, ConfigError> {
        let missing: Vec<String> = REQUIRED_KEYS
            .iter()
            .filter(|k| !self.entries.contains_key(**k))
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        let positive = |x: f64| (x <= 0.0).then(|| format!("must be positive, got {x}"));
        let non_negative = |x: f64| (x < 0.0).then(|| format!("must be non-negative, got {x}"));
        let any = |_: f64| None;

        let v_des = self
            .float("v_des", |x| {
                (!(x > 0.0 && x < MAX_SPEED))
                    .then(|| format!("must lie in (0, {MAX_SPEED}) m/s, got {x}"))
            })?
            .expect("required");
        let n_steps = self.parse::<usize>("n_steps")?.expect("required");
        if n_steps == 0 {
            return Err(ConfigError::Value {
                line: self.raw("n_steps").map(|(l, _)| l).unwrap_or(0),
                key: "n_steps".into(),
                message: "must be at least 1".into(),
            });
        }
        let body_height = self.float("body_height", positive)?.expect("required");
        let mass = self.float("mass", positive)?.expect("required");
        let hs_angle_deg = self
            .float("hs_angle_deg", |x| {
                (!(x > 0.0 && x <= 30.0)).then(|| format!("must lie in (0, 30] deg, got {x}"))
            })?
            .expect("required");

        let first_support = match self.raw("first_support") {
            None => Side::Left,
            Some((_, "L" | "l" | "left")) => Side::Left,
            Some((_, "R" | "r" | "right")) => Side::Right,
            Some((line, v)) => {
                return Err(ConfigError::Value {
                    line,
                    key: "first_support".into(),
                    message: format!("expected L or R, got {v:?}"),
                })
            }
        };
        let feet_keys = ["cop_left_x", "cop_left_y", "cop_right_x", "cop_right_y"];
        let feet: Vec<Option<f64>> = feet_keys
            .iter()
            .map(|k| self.float(k, any))
            .collect::<Result<_, _>>()?;
        let initial_feet = match feet.as_slice() {
            [Some(lx), Some(ly), Some(rx), Some(ry)] => {
                Some((Point2::new(*lx, *ly), Point2::new(*rx, *ry)))
            }
            [None, None, None, None] => None,
            _ => {
                return Err(ConfigError::Invalid(
                    "initial feet need all of cop_left_x, cop_left_y, cop_right_x, cop_right_y"
                        .into(),
                ))
            }
        };

        let config = RunConfig {
            v_des,
            n_steps,
            body_height,
            mass,
            hs_angle_deg,
            dt: self.float("dt", positive)?.unwrap_or(DEFAULT_DT),
            d_h: self
                .float("d_h", positive)?
                .unwrap_or(DEFAULT_PIVOT_DISTANCE),
            clearance: self
                .float("clearance", non_negative)?
                .unwrap_or(DEFAULT_SWING_CLEARANCE),
            w_budget: self.float("w_budget", non_negative)?,
            w_c: self.float("w_c", non_negative)?,
            reach_coeff: self
                .float("reach_coeff", positive)?
                .unwrap_or(DEFAULT_REACH_COEFF),
            first_support,
            initial_feet,
            rigid_pendulum: self.parse::<bool>("rigid_pendulum")?.unwrap_or(false),
            velocities: self.list("velocities", &DEFAULT_VELOCITIES)?,
            hs_angles_deg: self.list("hs_angles_deg", &DEFAULT_HS_ANGLES_DEG)?,
            output_dir: self
                .raw("output_dir")
                .map(|(_, v)| PathBuf::from(v))
                .unwrap_or_else(|| PathBuf::from("out")),
            bos_points: self.parse::<usize>("bos_points")?.unwrap_or(0),
            energy_csv: self.parse::<bool>("energy_csv")?.unwrap_or(true),
        };
        config
            .request()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(config)
    }
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    ConfigBuilder::parse_str(text)?.finish()
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    ConfigBuilder::from_path(path)?.finish()
}
