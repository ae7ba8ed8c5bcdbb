//! Result tables and their CSV form.

use std::fmt::Write as _;

use hetmarket::stats::Estimate;

/// How a simulated value is compared with its analytic counterpart under `--check`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    /// Within this many standard errors of the simulated mean.
    StdErrors(f64),
    /// The simulated value may not exceed the analytic one.
    AtMost,
}

impl Tolerance {
    /// `scale` multiplies the tolerance; it does not affect [`Tolerance::AtMost`].
    pub fn accepts(&self, analytic: f64, sim: Estimate, scale: f64) -> bool {
        let diff = (sim.mean - analytic).abs();
        match *self {
            Tolerance::Absolute(a) => diff <= a * scale,
            Tolerance::Relative(r) => diff <= r * scale * analytic.abs(),
            Tolerance::StdErrors(n) => diff <= n * scale * sim.std_error,
            Tolerance::AtMost => sim.mean <= analytic,
        }
    }

    pub fn describe(&self, scale: f64) -> String {
        match *self {
            Tolerance::Absolute(a) => format!("+/-{}", a * scale),
            Tolerance::Relative(r) => format!("{}% relative", 100.0 * r * scale),
            Tolerance::StdErrors(n) => format!("{} SE", n * scale),
            Tolerance::AtMost => "at most".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x: f64,
    pub quantity: &'static str,
    /// NaN when the quantity has no closed form.
    pub analytic: f64,
    pub sim: Option<Estimate>,
    pub tolerance: Option<Tolerance>,
}

impl Row {
    pub fn new(x: f64, quantity: &'static str, analytic: f64, sim: Option<Estimate>) -> Self {
        Self { x, quantity, analytic, sim, tolerance: None }
    }

    pub fn checked(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    /// `Some(pass)` when the row has a tolerance and both values exist.
    pub fn check(&self, scale: f64) -> Option<bool> {
        let tolerance = self.tolerance?;
        let sim = self.sim?;
        if self.analytic.is_nan() || sim.mean.is_nan() {
            return None;
        }
        Some(tolerance.accepts(self.analytic, sim, scale))
    }
}

/// One experiment's output: rows keyed by the swept variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: &'static str,
    pub var: String,
    pub realizations: usize,
    pub seed: u64,
    pub rows: Vec<Row>,
    /// Free-form findings printed after the per-quantity summary.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(experiment: &'static str, var: &str, realizations: usize, seed: u64) -> Self {
        Self { experiment, var: var.to_string(), realizations, seed, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},quantity,analytic,sim_mean,sim_se,R,seed\n", self.var);
        for row in &self.rows {
            let (mean, se) = match row.sim {
                Some(e) => (fmt_g9(e.mean), fmt_g9(e.std_error)),
                None => ("NaN".to_string(), "NaN".to_string()),
            };
            let r = if row.sim.is_some() { self.realizations.to_string() } else { "0".into() };
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_g9(row.x),
                row.quantity,
                fmt_g9(row.analytic),
                mean,
                se,
                r,
                self.seed
            )
            .expect("writing to a String");
        }
        out
    }

    /// Distinct quantities in first-appearance order.
    pub fn quantities(&self) -> Vec<&'static str> {
        let mut seen = Vec::new();
        for row in &self.rows {
            if !seen.contains(&row.quantity) {
                seen.push(row.quantity);
            }
        }
        seen
    }
}

/// `%.9g`: nine significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 <= |x| < 1e9`.
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Rounding to nine digits first fixes the exponent (9.9999999996 -> 1e1).
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
