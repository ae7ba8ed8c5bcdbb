//! Experiment configuration: a flat `key=value` file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use hetmarket::correlation::{Coupling, Scheme, Sign};
use hetmarket::{AcceptanceFunction, MarketParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    Line { path: String, line: usize, message: String },
    #[error("{origin}: {message}")]
    Override { origin: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Buyer decision rule, before it is tied to `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Acceptance {
    Linear,
    Step,
    Constant(f64),
}

impl fmt::Display for Acceptance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Acceptance::Linear => write!(f, "linear"),
            Acceptance::Step => write!(f, "step"),
            Acceptance::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

/// `var=a..b[:step]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: String,
    pub start: f64,
    pub end: f64,
    pub step: Option<f64>,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, String> {
        let (var, range) = text
            .split_once('=')
            .ok_or_else(|| format!("sweep '{text}' is not of the form var=a..b[:step]"))?;
        let (range, step) = match range.split_once(':') {
            Some((r, s)) => (r, Some(parse_f64(s)?)),
            None => (range, None),
        };
        let (a, b) = range
            .split_once("..")
            .ok_or_else(|| format!("sweep range '{range}' is not of the form a..b"))?;
        let sweep = Sweep {
            var: var.trim().to_string(),
            start: parse_f64(a)?,
            end: parse_f64(b)?,
            step,
        };
        if sweep.var.is_empty() {
            return Err("sweep variable is empty".into());
        }
        if sweep.end < sweep.start {
            return Err(format!("sweep end {} is below its start {}", sweep.end, sweep.start));
        }
        if let Some(s) = sweep.step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(format!("sweep step must be positive, got {s}"));
            }
        }
        Ok(sweep)
    }

    /// Grid points; without an explicit step, `intervals` equal steps.
    pub fn values(&self, intervals: usize) -> Vec<f64> {
        let step = match self.step {
            Some(s) => s,
            None if self.end == self.start => return vec![self.start],
            None => (self.end - self.start) / intervals as f64,
        };
        let count = ((self.end - self.start) / step + 1e-9).floor() as usize;
        // a + i*step rather than repeated addition, so the grid does not drift.
        (0..=count).map(|i| self.start + i as f64 * step).collect()
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}..{}", self.var, self.start, self.end)?;
        if let Some(s) = self.step {
            write!(f, ":{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Option<String>,
    pub buyers: usize,
    pub variants: usize,
    pub p: f64,
    pub z: f64,
    pub acceptance: Acceptance,
    pub t: f64,
    pub s: Sign,
    pub scheme: Scheme,
    pub depth: usize,
    pub z1: f64,
    pub z2: f64,
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub sweep: Option<Sweep>,
    pub realizations: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tolerance_scale: f64,
    pub suite: Option<String>,
}

pub const DEFAULT_SEED: u64 = 20_050_315;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            buyers: 500,
            variants: 2000,
            p: 0.05,
            z: 5.0,
            acceptance: Acceptance::Linear,
            t: 0.5,
            s: Sign::Positive,
            scheme: Scheme::Graded,
            depth: 10,
            z1: 5.0,
            z2: 5.0,
            k: None,
            k_max: None,
            sweep: None,
            realizations: 1000,
            seed: DEFAULT_SEED,
            out: None,
            tolerance_scale: 1.0,
            suite: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "scenario",
    "M",
    "N",
    "p",
    "Z",
    "acceptance",
    "t",
    "s",
    "scheme",
    "d",
    "Z1",
    "Z2",
    "k",
    "k_max",
    "sweep",
    "R",
    "seed",
    "out",
    "tolerance_scale",
    "suite",
];

fn parse_f64(text: &str) -> Result<f64, String> {
    let v: f64 = text.trim().parse().map_err(|_| format!("'{}' is not a number", text.trim()))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn parse_usize(text: &str) -> Result<usize, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("'{}' is not a non-negative integer", text.trim()))
}

pub fn parse_scheme(text: &str) -> Result<Scheme, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "a" | "mixture" => Ok(Scheme::Mixture),
        "b" | "graded" => Ok(Scheme::Graded),
        "c" | "gaussian" => Ok(Scheme::Gaussian),
        other => Err(format!("unknown scheme '{other}' (expected A, B or C)")),
    }
}

pub fn scheme_label(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Mixture => "A",
        Scheme::Graded => "B",
        Scheme::Gaussian => "C",
    }
}

fn parse_sign(text: &str) -> Result<Sign, String> {
    match text.trim() {
        "+1" | "1" | "+" => Ok(Sign::Positive),
        "-1" | "-" => Ok(Sign::Negative),
        other => Err(format!("s must be +1 or -1, got '{other}'")),
    }
}

fn parse_acceptance(text: &str) -> Result<Acceptance, String> {
    let text = text.trim().to_ascii_lowercase();
    match text.as_str() {
        "linear" => Ok(Acceptance::Linear),
        "step" => Ok(Acceptance::Step),
        _ => match text.strip_prefix("constant:") {
            Some(c) => Ok(Acceptance::Constant(parse_f64(c)?)),
            None => Err(format!("unknown acceptance '{text}' (linear, step or constant:c)")),
        },
    }
}

impl ExperimentConfig {
    /// Sets one key. Keys are case-sensitive, as in `Z1` and `p`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key.trim() {
            "scenario" => self.scenario = Some(value.to_string()),
            "M" => self.buyers = parse_usize(value)?,
            "N" => self.variants = parse_usize(value)?,
            "p" => self.p = parse_f64(value)?,
            "Z" => self.z = parse_f64(value)?,
            "acceptance" => self.acceptance = parse_acceptance(value)?,
            "t" => self.t = parse_f64(value)?,
            "s" => self.s = parse_sign(value)?,
            "scheme" => self.scheme = parse_scheme(value)?,
            "d" => self.depth = parse_usize(value)?,
            "Z1" => self.z1 = parse_f64(value)?,
            "Z2" => self.z2 = parse_f64(value)?,
            "k" => self.k = Some(parse_usize(value)?),
            "k_max" => self.k_max = Some(parse_usize(value)?),
            "sweep" => self.sweep = Some(Sweep::parse(value)?),
            "R" => self.realizations = parse_usize(value)?,
            "seed" => {
                self.seed = value.parse().map_err(|_| format!("'{value}' is not a valid seed"))?
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "tolerance_scale" => self.tolerance_scale = parse_f64(value)?,
            "suite" => self.suite = Some(value.to_string()),
            other => {
                return Err(format!("unknown key '{other}' (known: {})", KEYS.join(", ")));
            }
        }
        Ok(())
    }

    /// Applies the `key=value` lines of `text`. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, path: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Line { path: path.to_string(), line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got '{line}'")))?;
            self.set(key, value).map_err(err)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
        self.apply_text(&text, &shown)
    }

    /// Applies a command-line override; `origin` names the flag in error messages.
    pub fn apply_override(&mut self, origin: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set(key, value)
            .map_err(|message| ConfigError::Override { origin: origin.to_string(), message })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.market().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.acceptance_function().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.t) {
            return invalid(format!("t must lie in [0, 1], got {}", self.t));
        }
        if self.depth == 0 {
            return invalid("d must be at least 1".into());
        }
        for (name, z) in [("Z1", self.z1), ("Z2", self.z2)] {
            if z.is_nan() || z <= 0.0 {
                return invalid(format!("{name} must be positive, got {z}"));
            }
        }
        if self.realizations < 2 {
            return invalid(format!("R must be at least 2, got {}", self.realizations));
        }
        if !(self.tolerance_scale >= 0.0 && self.tolerance_scale.is_finite()) {
            return invalid(format!("tolerance_scale must be finite and >= 0, got {}", self.tolerance_scale));
        }
        Ok(())
    }

    pub fn market(&self) -> Result<MarketParams, hetmarket::ModelError> {
        MarketParams::new(self.buyers, self.variants, self.p, self.z)
    }

    pub fn acceptance_function(&self) -> Result<AcceptanceFunction, hetmarket::ModelError> {
        match self.acceptance {
            Acceptance::Linear => AcceptanceFunction::linear(self.p),
            Acceptance::Step => AcceptanceFunction::step(self.p),
            Acceptance::Constant(c) => AcceptanceFunction::constant(c),
        }
    }

    pub fn coupling(&self) -> Coupling {
        Coupling::new(self.t, self.s).expect("t validated")
    }
}
