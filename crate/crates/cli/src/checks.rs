//! Validation suite: each criterion compares simulated or computed values
//! with a target at a stated tolerance.

use std::fmt;

use hetmarket::analytic::{
    alpha_min, corr_expected_profit, duopoly_priceout, extremal_cdf, informed_gain, kopt_sequential,
    kopt_uninformed, matching_means, Form,
};
use hetmarket::correlation::{
    exhaustive_equicorrelated, kendall_tau, max_equicorrelated, satisfies_triangle, BoundForm,
    Coupling, ListBound, Scheme, Sign,
};
use hetmarket::rng::{self, stream_seed};
use hetmarket::simulate::{
    sim_correlated, sim_informed_max, sim_matching, sim_multi_variant, sim_sequential, sim_uninformed,
    with_threads, Stopping,
};
use hetmarket::solve::{argmax_k, duopoly_equilibrium, Duopoly, SolveError};
use hetmarket::stats::{chi_square_gof, Estimate};
use hetmarket::{AcceptanceFunction, MarketParams};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::experiments::{self, best_offer, sample_taus, ExperimentError};

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub title: &'static str,
    /// Whether the criterion draws random samples (and so can be underpowered).
    pub statistical: bool,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "uninformed", title: "uninformed vendor optimum", statistical: true },
    Criterion { id: 2, name: "idle", title: "idle above Z = Mp", statistical: true },
    Criterion { id: 3, name: "sequential", title: "sequential offering", statistical: true },
    Criterion { id: 4, name: "duopoly", title: "duopoly exit", statistical: false },
    Criterion { id: 5, name: "informed", title: "informed vendor", statistical: true },
    Criterion { id: 6, name: "tau", title: "Kendall tau toolkit", statistical: true },
    Criterion { id: 7, name: "bound", title: "equicorrelated bound", statistical: false },
    Criterion { id: 8, name: "correlated", title: "correlated market", statistical: true },
    Criterion { id: 9, name: "matching", title: "matching models", statistical: true },
    Criterion { id: 10, name: "determinism", title: "thread-count determinism", statistical: true },
];

/// Below this many realizations a statistical criterion is flagged.
pub const UNDERPOWERED: usize = 100;

#[derive(Debug, Clone, Copy)]
pub struct CheckSettings {
    /// Base realization count; criteria that need more scale it up.
    pub realizations: usize,
    pub seed: u64,
    /// Multiplies every tolerance.
    pub scale: f64,
}

impl CheckSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self { realizations: cfg.realizations, seed: cfg.seed, scale: cfg.tolerance_scale }
    }
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self::from_config(&ExperimentConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub label: String,
    pub measured: String,
    pub target: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub title: &'static str,
    pub measurements: Vec<Measurement>,
    pub warnings: Vec<String>,
}

impl CriterionReport {
    pub fn status(&self) -> Status {
        if self.measurements.is_empty() || self.measurements.iter().any(|m| !m.pass) {
            Status::Fail
        } else if !self.warnings.is_empty() {
            Status::Warn
        } else {
            Status::Pass
        }
    }

    pub fn headline(&self) -> String {
        let failed = self.measurements.iter().filter(|m| !m.pass).count();
        format!(
            "{} criterion {} ({}): {}/{} checks pass",
            self.status(),
            self.id,
            self.title,
            self.measurements.len() - failed,
            self.measurements.len()
        )
    }

    /// Headline followed by one indented line per measurement and warning.
    pub fn lines(&self) -> Vec<String> {
        let mut lines = vec![self.headline()];
        for m in &self.measurements {
            lines.push(format!(
                "    {} {}: measured {}, target {}, tolerance {}",
                if m.pass { "PASS" } else { "FAIL" },
                m.label,
                m.measured,
                m.target,
                m.tolerance
            ));
        }
        for w in &self.warnings {
            lines.push(format!("    WARN {w}"));
        }
        lines
    }
}

/// `all`, or a comma-separated list of criterion numbers or names.
pub fn parse_suite(text: &str) -> Result<Vec<u8>, String> {
    let text = text.trim();
    if text.is_empty() || text == "all" || text == "default" {
        return Ok(CRITERIA.iter().map(|c| c.id).collect());
    }
    let mut ids = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let found = CRITERIA
            .iter()
            .find(|c| c.name == part || part.parse::<u8>().ok() == Some(c.id))
            .ok_or_else(|| {
                let names: Vec<&str> = CRITERIA.iter().map(|c| c.name).collect();
                format!("unknown criterion '{part}' (use 1-10, all, or one of {})", names.join(", "))
            })?;
        if !ids.contains(&found.id) {
            ids.push(found.id);
        }
    }
    Ok(ids)
}

pub fn run_criterion(id: u8, settings: &CheckSettings) -> CriterionReport {
    let criterion = CRITERIA.iter().find(|c| c.id == id).expect("known criterion id");
    let result = match id {
        1 => uninformed(settings),
        2 => idle(settings),
        3 => sequential(settings),
        4 => duopoly(settings),
        5 => informed(settings),
        6 => tau(settings),
        7 => bound(settings),
        8 => correlated(settings),
        9 => matching(settings),
        10 => determinism(settings),
        _ => unreachable!("criterion ids are 1..=10"),
    };
    let measurements = result.unwrap_or_else(|err| {
        vec![Measurement {
            label: "evaluation".into(),
            measured: format!("error: {err}"),
            target: "completes".into(),
            tolerance: "none".into(),
            pass: false,
        }]
    });
    let mut warnings = Vec::new();
    if criterion.statistical && settings.realizations < UNDERPOWERED {
        warnings.push(format!(
            "R = {} < {UNDERPOWERED}: statistics are underpowered; standard-error bounds widen accordingly",
            settings.realizations
        ));
    }
    CriterionReport { id, name: criterion.name, title: criterion.title, measurements, warnings }
}

type Checks = Result<Vec<Measurement>, ExperimentError>;

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:.4}")
    }
}

fn absolute(label: String, measured: f64, target: f64, tol: f64, scale: f64) -> Measurement {
    Measurement {
        label,
        measured: num(measured),
        target: num(target),
        tolerance: format!("+/-{}", num(tol * scale)),
        pass: (measured - target).abs() <= tol * scale,
    }
}

fn relative(label: String, measured: f64, target: f64, tol: f64, scale: f64) -> Measurement {
    Measurement {
        label,
        measured: num(measured),
        target: num(target),
        tolerance: format!("{}% relative", num(100.0 * tol * scale)),
        pass: (measured - target).abs() <= tol * scale * target.abs(),
    }
}

fn within_se(label: String, est: Estimate, target: f64, n_se: f64, scale: f64) -> Measurement {
    Measurement {
        label,
        measured: format!("{} (se {})", num(est.mean), num(est.std_error)),
        target: num(target),
        tolerance: format!("{} SE", num(n_se * scale)),
        pass: (est.mean - target).abs() <= n_se * scale * est.std_error,
    }
}

fn exact(label: String, measured: String, target: String, pass: bool) -> Measurement {
    Measurement { label, measured, target, tolerance: "exact".into(), pass }
}

fn headline(z: f64) -> MarketParams {
    MarketParams::new(500, 2000, 0.05, z).expect("valid headline market")
}

fn linear() -> AcceptanceFunction {
    AcceptanceFunction::linear(0.05).expect("valid p")
}

fn uninformed(s: &CheckSettings) -> Checks {
    let params = headline(5.0);
    let sim = sim_uninformed(&params, linear(), 100, s.realizations, s.seed)?;
    let revenue = sim.series("revenue").expect("revenue series");
    let mut out = Vec::new();
    for z in [1.0, 2.0, 5.0, 10.0, 15.0, 20.0] {
        let opt = kopt_uninformed(&params.with_initial_cost(z)?);
        let (k, profit) = best_offer(revenue, z);
        out.push(absolute(format!("Z = {z}: argmax k"), k as f64, opt.k_opt, 2.0, s.scale));
        out.push(relative(format!("Z = {z}: optimal profit"), profit.mean, opt.profit, 0.05, s.scale));
    }
    Ok(out)
}

fn idle(s: &CheckSettings) -> Checks {
    let mut out = Vec::new();
    for z in [26.0, 30.0, 40.0] {
        let params = headline(z);
        let sim = sim_uninformed(&params, linear(), 40, s.realizations, s.seed)?;
        let (k, profit) = best_offer(sim.series("revenue").expect("revenue series"), z);
        let analytic = kopt_uninformed(&params);
        out.push(exact(
            format!("Z = {z}: optimal k and profit"),
            format!("k = {k}, profit {}", num(profit.mean)),
            "k = 0, profit 0".into(),
            k == 0 && profit.mean == 0.0 && analytic.idle,
        ));
    }
    Ok(out)
}

fn sequential(s: &CheckSettings) -> Checks {
    let sim = sim_sequential(&headline(5.0), linear(), Stopping::Fixed(30), s.realizations, s.seed)?;
    let sales = sim.series("sales").expect("sales series");
    let (alpha, worst) = sales
        .iter()
        .enumerate()
        .map(|(i, e)| (i + 1, e.z_score(hetmarket::analytic::sequential_sales(500.0, 0.05, i + 1))))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("30 variants");
    let mut out = vec![Measurement {
        label: "sales per variant, alpha <= 30".into(),
        measured: format!("largest deviation {} SE at alpha = {alpha}", num(worst)),
        target: "Mp(1-p)^(alpha-1)".into(),
        tolerance: format!("{} SE", num(4.0 * s.scale)),
        pass: worst <= 4.0 * s.scale,
    }];

    let (m, z) = (100_000, 1000.0);
    let params = MarketParams::new(m, 2000, 0.05, z)?;
    let sim = sim_sequential(&params, linear(), Stopping::Greedy, s.realizations, s.seed)?;
    let stop = sim.scalar("stop_k").expect("stop_k");
    out.push(absolute(
        "greedy stop, M = 1e5, Z/M = 0.01".into(),
        stop.mean,
        kopt_sequential(m as f64, 0.05, z),
        2.0,
        s.scale,
    ));
    Ok(out)
}

fn duopoly(s: &CheckSettings) -> Checks {
    let game = |z1: f64| Duopoly { buyers: 500.0, accept_prob: 0.05, z1, z2: 5.0, k_max: 2000 };
    let mut exit = None;
    for i in 100..=200 {
        let z1 = i as f64 / 10.0;
        let points = match duopoly_equilibrium(&game(z1)) {
            Ok(eq) => vec![(eq.k1, eq.k2)],
            Err(SolveError::Cycle(points)) => points,
            Err(err) => return Err(err.into()),
        };
        if points.iter().all(|&(k1, _)| k1 == 0) {
            exit = Some(z1);
            break;
        }
    }
    let threshold = duopoly_priceout(500.0, 0.05, 5.0);
    let mut out = vec![absolute("price-out threshold Z1*".into(), threshold, 12.43, 0.005, s.scale)];
    match exit {
        Some(z) => {
            out.push(exact(
                "first Z1 with vendor 1 idle (step 0.1)".into(),
                num(z),
                "between 12 and 13".into(),
                (12.0..=13.0).contains(&z),
            ));
            out.push(absolute("exit against Z1*".into(), z, threshold, 1.0, s.scale));
        }
        None => out.push(exact("vendor 1 exit".into(), "none up to Z1 = 20".into(), "12..13".into(), false)),
    }
    Ok(out)
}

fn informed(s: &CheckSettings) -> Checks {
    let sim = sim_informed_max(&headline(5.0), linear(), 2 * s.realizations, s.seed)?;
    let gain = sim.scalar("delta").expect("delta");
    let mut out = vec![relative(
        "relative gain delta, N = 2000".into(),
        gain.mean,
        informed_gain(500.0, 0.05, 2000)?,
        0.10,
        s.scale,
    )];

    let params = MarketParams::new(500, 100, 0.05, 5.0)?;
    let samples = 10 * s.realizations;
    let sim = sim_informed_max(&params, linear(), samples, s.seed)?;
    let observed = sim.histogram("max_sale").expect("histogram");
    let cdf = |m: f64| extremal_cdf(m, 500.0, 0.05, 100);
    let last = observed.len() - 1;
    let probs: Vec<f64> = (0..=last)
        .map(|m| {
            let hi = if m == last { 1.0 } else { cdf(m as f64 + 0.5) };
            let lo = if m == 0 { 0.0 } else { cdf(m as f64 - 0.5) };
            hi - lo
        })
        .collect();
    let test = chi_square_gof(observed, &probs, 5.0);
    let alpha = if s.scale > 0.0 { 0.05 / s.scale } else { f64::INFINITY };
    out.push(Measurement {
        label: format!("max-sale histogram, N = 100, {samples} samples"),
        measured: format!("chi2 = {} on {} dof, p = {:.3e}", num(test.statistic), test.degrees_of_freedom, test.p_value),
        target: "extremal law".into(),
        tolerance: format!("p >= {}", num(alpha)),
        pass: test.p_value >= alpha,
    });
    Ok(out)
}

fn tau(s: &CheckSettings) -> Checks {
    let triple = [[3.0, 2.0, 1.0], [2.0, 1.0, 3.0], [1.0, 3.0, 2.0]];
    let taus = [
        kendall_tau(&triple[0], &triple[1])?,
        kendall_tau(&triple[0], &triple[2])?,
        kendall_tau(&triple[1], &triple[2])?,
    ];
    let mut out = vec![exact(
        "pairwise tau of {3,2,1}, {2,1,3}, {1,3,2}".into(),
        format!("{taus:?}"),
        "-1/3".into(),
        taus.iter().all(|&t| t == -1.0 / 3.0),
    )];

    let mut rng = rng::seeded(s.seed);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(3..=40);
        let lists: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let mut v: Vec<f64> = (0..n).map(|i| i as f64).collect();
                v.shuffle(&mut rng);
                v
            })
            .collect();
        let t12 = kendall_tau(&lists[0], &lists[1])?;
        let t13 = kendall_tau(&lists[0], &lists[2])?;
        let t23 = kendall_tau(&lists[1], &lists[2])?;
        if !(satisfies_triangle(t12, t13, t23) && satisfies_triangle(t12, t23, t13) && satisfies_triangle(t13, t23, t12)) {
            violations += 1;
        }
    }
    out.push(exact("triangle inequality, 1000 random triples".into(), format!("{violations} violations"), "0".into(), violations == 0));

    let pairs = (s.realizations / 5).max(2);
    let schemes = [("A", Scheme::Mixture), ("B", Scheme::Graded), ("C", Scheme::Gaussian)];
    for (i, (label, scheme)) in schemes.into_iter().enumerate() {
        for (j, t) in [0.0, 0.25, 0.5, 0.75].into_iter().enumerate() {
            let coupling = Coupling::new(t, Sign::Positive)?;
            let cell_seed = stream_seed(s.seed, (4 * i + j) as u64);
            let (bb, bv) = sample_taus(scheme, coupling, 2000, pairs, cell_seed)?;
            for (kind, pair, est) in [
                ("buyer-buyer", hetmarket::correlation::ListPair::BuyerBuyer, bb),
                ("buyer-vendor", hetmarket::correlation::ListPair::BuyerVendor, bv),
            ] {
                let target = hetmarket::correlation::expected_tau(scheme, coupling, pair);
                out.push(within_se(format!("scheme {label}, t = {t}, {kind}, {pairs} pairs"), est, target, 3.0, s.scale));
            }
        }
    }

    let pairs = s.realizations.max(2);
    let coupling = Coupling::new(0.5, Sign::Positive)?;
    let variance = |n: usize| -> Result<f64, ExperimentError> {
        let (bb, _) = sample_taus(Scheme::Mixture, coupling, n, pairs, stream_seed(s.seed, n as u64))?;
        Ok(bb.std_error * bb.std_error * pairs as f64)
    };
    let ratio = variance(500)? / variance(1000)?;
    out.push(relative(
        format!("variance ratio N = 500 to 1000, {pairs} pairs"),
        ratio,
        2.0,
        0.25,
        s.scale,
    ));
    Ok(out)
}

fn bound(_: &CheckSettings) -> Checks {
    let mut out = Vec::new();
    for (label, tau0) in [("-1", -1.0), ("-1/3", -1.0 / 3.0), ("0", 0.0), ("0.5", 0.5)] {
        let found = exhaustive_equicorrelated(4, tau0)?.len();
        let bound = max_equicorrelated(tau0, 4, BoundForm::Halving)?;
        let pass = match bound {
            ListBound::Finite(b) => found <= b,
            ListBound::Unbounded => true,
        };
        out.push(exact(format!("N = 4, tau0 = {label}: largest set"), found.to_string(), format!("<= {bound:?}"), pass));
    }
    let bound = max_equicorrelated(0.2, 5, BoundForm::Halving)?;
    out.push(exact(
        "N = 5, tau0 = 0.2: bound".into(),
        format!("{bound:?}"),
        "Finite(6)".into(),
        bound == ListBound::Finite(6),
    ));
    Ok(out)
}

fn correlated(s: &CheckSettings) -> Checks {
    let params = headline(5.0);
    let mut out = Vec::new();
    for t in [0.25, 0.5, 0.75] {
        let coupling = Coupling::new(t, Sign::Positive)?;
        let best = argmax_k(|k| corr_expected_profit(&params, coupling, k, Form::Exact), 2000);
        let sim = sim_correlated(&params, Scheme::Graded, coupling, 60, s.realizations, s.seed)?;
        let (k, est) = sim.series_argmax("profit").expect("profit series");
        out.push(absolute(format!("t = {t}: argmax k"), k as f64, best.k as f64, 3.0, s.scale));
        out.push(relative(format!("t = {t}: optimal profit"), est.mean, best.value, 0.07, s.scale));
    }

    let first = alpha_min(2000, 0.05, 0.1);
    out.push(exact("s = -1, t = 0.1: first acceptable variant".into(), first.to_string(), "1001".into(), first == 1001));
    let coupling = Coupling::new(0.1, Sign::Negative)?;
    let runs = (s.realizations / 20).max(2);
    let sim = sim_correlated(&params, Scheme::Graded, coupling, 2000, runs, s.seed)?;
    let sales = sim.series("variant_sales").expect("variant sales");
    let below: f64 = sales[..1000].iter().map(|e| e.mean).sum();
    let first_sale = sales.iter().position(|e| e.mean > 0.0).map(|i| i + 1);
    out.push(exact(
        format!("s = -1, t = 0.1: sales below alpha 1001 ({runs} runs)"),
        format!("{below} (first sale at alpha {first_sale:?})"),
        "0".into(),
        below == 0.0,
    ));

    let coupling = Coupling::new(1.0, Sign::Positive)?;
    let sim = sim_correlated(&params, Scheme::Graded, coupling, 20, s.realizations, s.seed)?;
    let (k, _) = sim.series_argmax("profit").expect("profit series");
    let sold = sim.series("sold").expect("sold series")[1].mean;
    out.push(exact(
        "s t = 1: optimum and coverage".into(),
        format!("k = {k}, sold at k = 1: {sold}"),
        "k = 1, all 500 buyers".into(),
        k == 1 && sold == 500.0,
    ));
    Ok(out)
}

fn matching(s: &CheckSettings) -> Checks {
    let (n, m, d) = (1000, 5, 10);
    let sim = sim_matching(n, m, d, 20 * s.realizations, s.seed)?;
    let means = matching_means(n, m, d);
    let scalar = |name: &str| sim.scalar(name).expect("matching scalar").mean;
    let mut out = vec![
        relative("single variant: worst rank b".into(), scalar("b"), means.mean_b, 0.10, s.scale),
        relative("single variant: buyer cost x".into(), scalar("x"), means.mean_x, 0.10, s.scale),
        relative("single variant: vendor rank".into(), scalar("vendor_rank"), (1.0 + d as f64) / 2.0, 0.02, s.scale),
    ];

    let sim = sim_multi_variant(2, 1, 10, s.realizations, s.seed)?;
    out.push(within_se("multi-variant N = 2, d = 1: best rank".into(), sim.scalar("b").expect("b"), 1.5, 4.0, s.scale));

    let d = 10;
    let mut costs = Vec::new();
    for m in [1usize, 10, 100] {
        let sim = sim_multi_variant(1000, d, m, s.realizations, stream_seed(s.seed, m as u64))?;
        costs.push((m, sim.scalar("x").expect("x")));
    }
    let mut spread: f64 = 0.0;
    for (i, (_, a)) in costs.iter().enumerate() {
        for (_, b) in &costs[i + 1..] {
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            spread = spread.max((a.mean - b.mean).abs() / se);
        }
    }
    let listed: Vec<String> = costs.iter().map(|(m, e)| format!("M={m}: {}", num(e.mean))).collect();
    out.push(Measurement {
        label: "multi-variant N = 1000, d = 10: buyer cost across M = 1, 10, 100".into(),
        measured: format!("{} (largest gap {} SE)", listed.join(", "), num(spread)),
        target: "independent of M".into(),
        tolerance: format!("< {} SE", num(3.0 * s.scale)),
        pass: spread < 3.0 * s.scale,
    });
    let pooled = costs.iter().map(|(_, e)| e.mean).sum::<f64>() / costs.len() as f64;
    out.push(relative("multi-variant buyer cost against 1/(d+1)".into(), pooled, 1.0 / (d as f64 + 1.0), 0.05, s.scale));
    Ok(out)
}

fn determinism(s: &CheckSettings) -> Checks {
    let r = s.realizations.clamp(2, 200);
    let setups: [(&str, &[(&str, &str)]); 4] = [
        ("uninformed", &[("sweep", "Z=1..20:1")]),
        ("tau", &[("scheme", "C"), ("N", "500"), ("sweep", "t=0..1:0.25")]),
        ("correlated", &[("sweep", "t=0.25..0.75:0.25")]),
        ("matching", &[("sweep", "d=1..10:3"), ("M", "5"), ("N", "1000")]),
    ];
    let mut out = Vec::new();
    for (scenario, extra) in setups {
        let mut cfg = ExperimentConfig {
            scenario: Some(scenario.into()),
            realizations: r,
            seed: s.seed,
            ..Default::default()
        };
        for (k, v) in extra {
            cfg.set(k, v).map_err(ExperimentError::Invalid)?;
        }
        let one = with_threads(1, || experiments::run(&cfg).map(|t| t.to_csv()))?;
        let eight = with_threads(8, || experiments::run(&cfg).map(|t| t.to_csv()))?;
        out.push(exact(
            format!("{scenario} CSV, R = {r}, 1 against 8 threads"),
            if one == eight { format!("identical ({} bytes)", one.len()) } else { "differs".into() },
            "byte-identical".into(),
            one == eight,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites() {
        assert_eq!(parse_suite("all").unwrap().len(), 10);
        assert_eq!(parse_suite("2, tau,2").unwrap(), vec![2, 6]);
        assert!(parse_suite("11").is_err());
        assert!(parse_suite("nonsense").is_err());
    }

    #[test]
    fn zero_tolerance_fails() {
        let s = CheckSettings { realizations: 50, seed: 3, scale: 0.0 };
        assert_eq!(run_criterion(4, &s).status(), Status::Fail);
        let s = CheckSettings { scale: 1.0, ..s };
        assert_eq!(run_criterion(4, &s).status(), Status::Pass);
    }

    #[test]
    fn underpowered_runs_warn() {
        let s = CheckSettings { realizations: 10, seed: 3, scale: 1.0 };
        let report = run_criterion(2, &s);
        assert_eq!(report.status(), Status::Warn);
        assert!(report.lines().iter().any(|l| l.contains("underpowered")));
        assert_eq!(run_criterion(7, &s).status(), Status::Pass);
    }
}
