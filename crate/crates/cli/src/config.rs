//! Run configuration as a flat `key = value` file.
//!
//! Blank lines and lines starting with `#` are ignored. Each key may appear
//! once. Relative paths are resolved against the directory of the file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cete_core::fermion::{Fcidump, FermionTerm};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Hf,
    /// `exp(angle * i (T + T^dagger)) |HF>` for the excitation `T`.
    Rotated {
        generator: String,
        angle: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    Exact,
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeteReference {
    Hf,
    MostProbable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fcidump_path: Option<PathBuf>,
    pub n_electrons: Option<usize>,
    pub sz: Option<f64>,
    pub initial_state: InitialState,
    pub t_max: f64,
    pub step: f64,
    pub substep: f64,
    pub delta_cutoff: Option<f64>,
    pub m_max: usize,
    pub shots_tomography: usize,
    pub shots_gradient: usize,
    pub gradient_mode: GradientKind,
    pub cete_reference: CeteReference,
    pub depolarizing_p: f64,
    pub readout_flip_p: f64,
    pub noise_trajectories: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

pub const KEYS: &[&str] = &[
    "fcidump_path",
    "n_electrons",
    "sz",
    "initial_state",
    "t_max",
    "step",
    "substep",
    "delta_cutoff",
    "m_max",
    "shots_tomography",
    "shots_gradient",
    "gradient_mode",
    "cete_reference",
    "depolarizing_p",
    "readout_flip_p",
    "noise_trajectories",
    "master_seed",
    "output_dir",
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fcidump_path: None,
            n_electrons: None,
            sz: None,
            initial_state: InitialState::Rotated {
                generator: "1^ 3^ 2 0".into(),
                angle: 0.1 * std::f64::consts::PI,
            },
            t_max: 18.0,
            step: 0.9,
            substep: 0.03,
            delta_cutoff: None,
            m_max: 8,
            shots_tomography: 10_000,
            shots_gradient: 20_000,
            gradient_mode: GradientKind::Exact,
            cete_reference: CeteReference::Hf,
            depolarizing_p: 0.0,
            readout_flip_p: 0.0,
            noise_trajectories: 50,
            master_seed: 0,
            output_dir: PathBuf::from("cete_output"),
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key} = {value:?}: {why}"))
}

fn parse_f64(key: &str, value: &str) -> CliResult<f64> {
    let x: f64 = value.parse().map_err(|e| bad(key, value, e))?;
    if !x.is_finite() {
        return Err(bad(key, value, "must be finite"));
    }
    Ok(x)
}

fn parse_nonneg(key: &str, value: &str) -> CliResult<f64> {
    let x = parse_f64(key, value)?;
    if x < 0.0 {
        return Err(bad(key, value, "must be nonnegative"));
    }
    Ok(x)
}

fn parse_probability(key: &str, value: &str) -> CliResult<f64> {
    let x = parse_nonneg(key, value)?;
    if x > 1.0 {
        return Err(bad(key, value, "must be at most 1"));
    }
    Ok(x)
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad(key, value, e))
}

/// Accepts a number optionally followed by `pi`, e.g. `0.1pi`.
pub fn parse_angle(value: &str) -> Option<f64> {
    let v = value.trim();
    let x = match v.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some("-") => -std::f64::consts::PI,
        Some(m) => m.trim().parse::<f64>().ok()? * std::f64::consts::PI,
        None => v.parse().ok()?,
    };
    x.is_finite().then_some(x)
}

fn parse_initial_state(value: &str) -> CliResult<InitialState> {
    let key = "initial_state";
    if value == "hf" {
        return Ok(InitialState::Hf);
    }
    let inner = value
        .strip_prefix("rotated(")
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(|| bad(key, value, "expected `hf` or `rotated(<excitation>, <angle>)`"))?;
    let (generator, angle) = inner.rsplit_once(',').ok_or_else(|| bad(key, value, "missing angle"))?;
    let generator = generator.trim().to_string();
    generator.parse::<FermionTerm>().map_err(|e| bad(key, value, e))?;
    let angle = parse_angle(angle).ok_or_else(|| bad(key, value, "angle is not a number"))?;
    Ok(InitialState::Rotated { generator, angle })
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Hf => write!(f, "hf"),
            InitialState::Rotated { generator, angle } => write!(f, "rotated({generator}, {angle:?})"),
        }
    }
}

impl RunConfig {
    /// Parses a config file; relative paths are taken from `base_dir`.
    pub fn from_text(text: &str, base_dir: &Path) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(CliError::Config(format!("line {}: duplicate key {key}", i + 1)));
            }
            seen.push(key);
            cfg.set(key, value.trim(), base_dir)?;
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_text(&text, base)
    }

    pub fn set(&mut self, key: &str, value: &str, base_dir: &Path) -> CliResult<()> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_relative() {
                base_dir.join(p)
            } else {
                p
            }
        };
        match key {
            "fcidump_path" => self.fcidump_path = Some(path(value)),
            "n_electrons" => self.n_electrons = Some(parse_int(key, value)?),
            "sz" => {
                let sz = parse_f64(key, value)?;
                if (2.0 * sz).fract() != 0.0 {
                    return Err(bad(key, value, "must be a multiple of 1/2"));
                }
                self.sz = Some(sz);
            }
            "initial_state" => self.initial_state = parse_initial_state(value)?,
            "t_max" => self.t_max = parse_nonneg(key, value)?,
            "step" => self.step = parse_nonneg(key, value)?,
            "substep" => self.substep = parse_nonneg(key, value)?,
            "delta_cutoff" => {
                let d = parse_nonneg(key, value)?;
                if d == 0.0 || d >= 1.0 {
                    return Err(bad(key, value, "must lie in (0, 1)"));
                }
                self.delta_cutoff = Some(d);
            }
            "m_max" => self.m_max = parse_int(key, value)?,
            "shots_tomography" => self.shots_tomography = parse_int(key, value)?,
            "shots_gradient" => {
                self.shots_gradient = parse_int(key, value)?;
                if self.shots_gradient == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
            }
            "gradient_mode" => {
                self.gradient_mode = match value {
                    "exact" => GradientKind::Exact,
                    "shots" => GradientKind::Shots,
                    _ => return Err(bad(key, value, "expected `exact` or `shots`")),
                }
            }
            "cete_reference" => {
                self.cete_reference = match value {
                    "hf" => CeteReference::Hf,
                    "most_probable" => CeteReference::MostProbable,
                    _ => return Err(bad(key, value, "expected `hf` or `most_probable`")),
                }
            }
            "depolarizing_p" => self.depolarizing_p = parse_probability(key, value)?,
            "readout_flip_p" => self.readout_flip_p = parse_probability(key, value)?,
            "noise_trajectories" => {
                self.noise_trajectories = parse_int(key, value)?;
                if self.noise_trajectories == 0 {
                    return Err(bad(key, value, "must be at least 1"));
                }
            }
            "master_seed" => self.master_seed = parse_int(key, value)?,
            "output_dir" => self.output_dir = path(value),
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn noisy(&self) -> bool {
        self.depolarizing_p > 0.0 || self.readout_flip_p > 0.0
    }

    /// `2 S_z`.
    pub fn ms2(&self) -> i64 {
        (2.0 * self.sz.unwrap_or(0.0)).round() as i64
    }

    /// Fills values left open by the file from the integrals header.
    pub fn resolve(&mut self, fcidump: &Fcidump) {
        self.n_electrons.get_or_insert(fcidump.nelec);
        self.sz.get_or_insert(fcidump.ms2 as f64 / 2.0);
        let default_cutoff = match self.gradient_mode {
            GradientKind::Exact => 1e-6,
            GradientKind::Shots => 1e-3,
        };
        self.delta_cutoff.get_or_insert(default_cutoff);
    }

    /// Every key with its resolved value, in config-file syntax.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut out = String::new();
        for key in KEYS {
            let value = match *key {
                "fcidump_path" => opt(self.fcidump_path.as_ref().map(|p| p.display().to_string())),
                "n_electrons" => opt(self.n_electrons.map(|n| n.to_string())),
                "sz" => opt(self.sz.map(|s| format!("{s:?}"))),
                "initial_state" => self.initial_state.to_string(),
                "t_max" => format!("{:?}", self.t_max),
                "step" => format!("{:?}", self.step),
                "substep" => format!("{:?}", self.substep),
                "delta_cutoff" => opt(self.delta_cutoff.map(|d| format!("{d:?}"))),
                "m_max" => self.m_max.to_string(),
                "shots_tomography" => self.shots_tomography.to_string(),
                "shots_gradient" => self.shots_gradient.to_string(),
                "gradient_mode" => match self.gradient_mode {
                    GradientKind::Exact => "exact".into(),
                    GradientKind::Shots => "shots".into(),
                },
                "cete_reference" => match self.cete_reference {
                    CeteReference::Hf => "hf".into(),
                    CeteReference::MostProbable => "most_probable".into(),
                },
                "depolarizing_p" => format!("{:?}", self.depolarizing_p),
                "readout_flip_p" => format!("{:?}", self.readout_flip_p),
                "noise_trajectories" => self.noise_trajectories.to_string(),
                "master_seed" => self.master_seed.to_string(),
                "output_dir" => self.output_dir.display().to_string(),
                _ => unreachable!(),
            };
            if !value.is_empty() {
                writeln!(out, "{key} = {value}").unwrap();
            }
        }
        out
    }
}
