//! Plain-text `key = value` simulation configs.
//!
//! One pair per line, `#` starts a comment, lists are comma separated.
//! Unknown or repeated keys are rejected with their line number.
//!
//! | key                    | default            | meaning                                   |
//! |------------------------|--------------------|-------------------------------------------|
//! | `gamma_mhz`            | 0.97               | decay rate of 3→2, 4→2, 5→2               |
//! | `gamma_21_mhz`         | 6.07               | decay rate of 2→1                         |
//! | `delta1_mhz`           | 9                  | F″=3 → F″=4 splitting                      |
//! | `delta2_mhz`           | 7.6                | F″=2 → F″=3 splitting                      |
//! | `a32`, `a42`, `a52`    | 1, 1.46, 0.6       | relative coupling strengths               |
//! | `n_levels`             | 5                  | must be 5                                 |
//! | `omega_p_mhz`          | 0.01 · gamma_mhz   | probe Rabi frequency                      |
//! | `omega_c_mhz`          | required           | coupling Rabi frequency                   |
//! | `delta_c_mhz`          | required           | coupling detuning                         |
//! | `dp_min_mhz`           | −40 · gamma_mhz    | scan start (γ = 0.97 if gamma_mhz is 0)   |
//! | `dp_max_mhz`           | +40 · gamma_mhz    | scan end                                  |
//! | `n_points`             | 2001               | grid size, 2 ..= 1 000 000                |
//! | `broadening_fwhm_mhz`  | none               | Gaussian broadening of the output         |
//! | `broadening_kernel`    | `gaussian`         | only `gaussian` is supported              |
//! | `omega_c_sweep_mhz`    | none               | ascending list for the `sweep` command    |
//! | `prominence_floor`     | 0.05               | peak filter, fraction of the range        |
//! | `output`               | stdout             | output path (a directory for `sweep`)     |

use std::collections::HashSet;
use std::path::PathBuf;

use eit_core::spectrum::DEFAULT_PROMINENCE_FLOOR;
use eit_core::{DriveParams, LevelScheme, ScanWindow, Strengths};
use thiserror::Error;

pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub scheme: LevelScheme,
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta_c: f64,
    pub window: ScanWindow,
    pub broadening_fwhm: Option<f64>,
    pub omega_c_sweep: Option<Vec<f64>>,
    pub prominence_floor: f64,
    pub output: Option<PathBuf>,
}

impl SimulationConfig {
    /// Drive parameters at Δ_p = 0.
    pub fn drives(&self) -> DriveParams {
        DriveParams::new(self.omega_p, self.omega_c, 0.0, self.delta_c)
    }
}

const KEYS: &[&str] = &[
    "gamma_mhz",
    "gamma_21_mhz",
    "delta1_mhz",
    "delta2_mhz",
    "a32",
    "a42",
    "a52",
    "n_levels",
    "omega_p_mhz",
    "omega_c_mhz",
    "delta_c_mhz",
    "dp_min_mhz",
    "dp_max_mhz",
    "n_points",
    "broadening_fwhm_mhz",
    "broadening_kernel",
    "omega_c_sweep_mhz",
    "prominence_floor",
    "output",
];

fn parse_number(raw: &str, key: &str, line: usize) -> Result<f64, ConfigError> {
    // Accept the typographic minus sign as well as '-'.
    let normalized = raw.trim().replace('\u{2212}', "-");
    normalized
        .parse::<f64>()
        .map_err(|_| ConfigError::Parse { line, message: format!("`{key}`: `{raw}` is not a number") })
}

#[derive(Default)]
struct Raw {
    numbers: Vec<(String, f64, usize)>,
    n_points: Option<(u64, usize)>,
    n_levels: Option<(u64, usize)>,
    sweep: Option<(Vec<f64>, usize)>,
    kernel: Option<(String, usize)>,
    output: Option<PathBuf>,
}

impl Raw {
    fn number(&self, key: &str) -> Option<f64> {
        self.numbers.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| *v)
    }
}

fn parse_count(raw: &str, key: &str, line: usize) -> Result<u64, ConfigError> {
    raw.trim()
        .parse::<u64>()
        .map_err(|_| ConfigError::Parse { line, message: format!("`{key}`: `{raw}` is not a non-negative integer") })
}

fn tokenize(text: &str) -> Result<Raw, ConfigError> {
    let mut raw = Raw::default();
    let mut seen = HashSet::new();
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::Parse { line, message: format!("unknown key `{key}`") });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Parse { line, message: format!("duplicate key `{key}`") });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse { line, message: format!("`{key}` has no value") });
        }
        match key {
            "n_points" => raw.n_points = Some((parse_count(value, key, line)?, line)),
            "n_levels" => raw.n_levels = Some((parse_count(value, key, line)?, line)),
            "omega_c_sweep_mhz" => {
                let list = value.split(',').map(|v| parse_number(v, key, line)).collect::<Result<Vec<_>, _>>()?;
                raw.sweep = Some((list, line));
            }
            "broadening_kernel" => raw.kernel = Some((value.to_string(), line)),
            "output" => raw.output = Some(PathBuf::from(value)),
            _ => raw.numbers.push((key.to_string(), parse_number(value, key, line)?, line)),
        }
    }
    Ok(raw)
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

/// Parses and validates a config document, filling in defaults.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let raw = tokenize(text)?;

    for (key, value, line) in &raw.numbers {
        if !value.is_finite() {
            return Err(invalid(format!("`{key}` (line {line}) must be finite")));
        }
    }
    if let Some((list, line)) = &raw.sweep {
        if list.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("`omega_c_sweep_mhz` (line {line}) must be finite")));
        }
    }
    if let Some((kernel, line)) = &raw.kernel {
        if kernel != "gaussian" {
            return Err(invalid(format!(
                "`broadening_kernel` (line {line}): unsupported kernel `{kernel}`, expected `gaussian`"
            )));
        }
    }

    let defaults = LevelScheme::rb85();
    let gamma = raw.number("gamma_mhz").unwrap_or(defaults.gamma_upper);
    let n_levels = match raw.n_levels {
        Some((n, _)) => n as usize,
        None => defaults.n_levels,
    };
    let scheme = LevelScheme {
        n_levels,
        delta1: raw.number("delta1_mhz").unwrap_or(defaults.delta1),
        delta2: raw.number("delta2_mhz").unwrap_or(defaults.delta2),
        gamma_upper: gamma,
        gamma_21: raw.number("gamma_21_mhz").unwrap_or(defaults.gamma_21),
        strengths: Strengths {
            a32: raw.number("a32").unwrap_or(Strengths::RB85.a32),
            a42: raw.number("a42").unwrap_or(Strengths::RB85.a42),
            a52: raw.number("a52").unwrap_or(Strengths::RB85.a52),
        },
    };
    scheme.validate().map_err(|e| invalid(e.to_string()))?;

    let omega_c = raw.number("omega_c_mhz").ok_or_else(|| invalid("missing required key `omega_c_mhz`"))?;
    let delta_c = raw.number("delta_c_mhz").ok_or_else(|| invalid("missing required key `delta_c_mhz`"))?;
    let omega_p = raw.number("omega_p_mhz").unwrap_or(0.01 * gamma);
    DriveParams::new(omega_p, omega_c, 0.0, delta_c).validate().map_err(|e| invalid(e.to_string()))?;

    let n_points = match raw.n_points {
        Some((n, line)) => {
            if n < 2 || n > MAX_POINTS as u64 {
                return Err(invalid(format!("`n_points` (line {line}) must be in [2, {MAX_POINTS}], got {n}")));
            }
            n as usize
        }
        None => 2001,
    };
    // A zero-decay scheme would collapse the default window; keep the stock width.
    let half_width = 40.0 * if gamma > 0.0 { gamma } else { LevelScheme::rb85().gamma_upper };
    let window = ScanWindow::new(
        raw.number("dp_min_mhz").unwrap_or(-half_width),
        raw.number("dp_max_mhz").unwrap_or(half_width),
        n_points,
    )
    .map_err(|e| invalid(e.to_string()))?;

    let broadening_fwhm = raw.number("broadening_fwhm_mhz");
    if let Some(f) = broadening_fwhm {
        if f < 0.0 {
            return Err(invalid(format!("`broadening_fwhm_mhz` must be >= 0, got {f}")));
        }
    }

    let prominence_floor = raw.number("prominence_floor").unwrap_or(DEFAULT_PROMINENCE_FLOOR);
    let omega_c_sweep = match raw.sweep {
        Some((list, line)) => {
            if list.is_empty() {
                return Err(invalid(format!("`omega_c_sweep_mhz` (line {line}) is empty")));
            }
            if list.iter().any(|&v| v < 0.0) {
                return Err(invalid(format!("`omega_c_sweep_mhz` (line {line}) entries must be >= 0")));
            }
            if list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid(format!("`omega_c_sweep_mhz` (line {line}) must be strictly ascending")));
            }
            Some(list)
        }
        None => None,
    };

    if prominence_floor < 0.0 {
        return Err(invalid(format!("`prominence_floor` must be >= 0, got {prominence_floor}")));
    }

    Ok(SimulationConfig {
        scheme,
        omega_p,
        omega_c,
        delta_c,
        window,
        broadening_fwhm,
        omega_c_sweep,
        prominence_floor,
        output: raw.output,
    })
}
