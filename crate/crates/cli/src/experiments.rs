//! Named experiments. Each one produces a table of analytic values next to
//! Monte Carlo estimates over a one-dimensional sweep.

use hetmarket::analytic::{
    accept_any_of_k, alpha_min, corr_expected_profit, extremal_mode, informed_gain, kopt_sequential,
    kopt_uninformed, matching_means, most_probable_max_sale, multi_variant_b, profit_uninformed,
    profit_uninformed_exact, sequential_sales, AnalyticError, Form,
};
use hetmarket::correlation::{
    expected_tau, exhaustive_equicorrelated, generate, max_equicorrelated, BoundForm,
    CorrelationError, Coupling, ListBound, ListPair, Scheme, Sign,
};
use hetmarket::rng::stream_seed;
use hetmarket::simulate::{
    sim_correlated, sim_duopoly, sim_informed_max, sim_matching, sim_multi_variant, sim_sequential,
    sim_uninformed, SimError, Stopping,
};
use hetmarket::solve::{argmax_k, duopoly_equilibrium, Duopoly, SolveError};
use hetmarket::stats::{Accumulator, Estimate};
use hetmarket::{MarketParams, ModelError};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{scheme_label, ExperimentConfig, Sweep};
use crate::csv::{fmt_g9, Row, Table, Tolerance};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown experiment '{0}'; run `hetmarket list` for the available ones")]
    Unknown(String),
    #[error("experiment '{experiment}' cannot sweep '{var}' (allowed: {allowed})")]
    SweepVar { experiment: &'static str, var: String, allowed: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

type Result<T> = std::result::Result<T, ExperimentError>;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    /// Variables `--sweep` may name; the first is swept by default.
    pub vars: &'static [&'static str],
    /// Sweep used when none is configured; `None` means a single point.
    pub default_sweep: Option<&'static str>,
    run: fn(&ExperimentConfig, &Experiment) -> Result<Table>,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "profit-curve",
        about: "uninformed vendor: expected profit and sales against the number offered",
        vars: &["k"],
        default_sweep: None,
        run: profit_curve,
    },
    Experiment {
        name: "uninformed",
        about: "uninformed vendor: optimal number offered and optimal profit against Z",
        vars: &["Z"],
        default_sweep: Some("Z=0.5..20:0.5"),
        run: uninformed,
    },
    Experiment {
        name: "sequential",
        about: "sequential offering: sales per variant, or the greedy stopping point against Z, q=Z/M or M",
        vars: &["alpha", "Z", "q", "M"],
        default_sweep: None,
        run: sequential,
    },
    Experiment {
        name: "duopoly",
        about: "two vendors: equilibrium offer counts and profits against Z1 (or Z2)",
        vars: &["Z1", "Z2"],
        default_sweep: Some("Z1=1..20:0.5"),
        run: duopoly,
    },
    Experiment {
        name: "informed",
        about: "informed vendor: largest sale among all variants and its relative gain",
        vars: &["M", "N"],
        default_sweep: None,
        run: informed,
    },
    Experiment {
        name: "tau",
        about: "sample against expected Kendall tau of one list scheme as the binding t varies",
        vars: &["t"],
        default_sweep: Some("t=0..1:0.05"),
        run: tau,
    },
    Experiment {
        name: "bound",
        about: "size bound for sets of equicorrelated lists, with exhaustive search for N <= 5",
        vars: &["tau0"],
        default_sweep: Some("tau0=-1..1:0.1"),
        run: bound,
    },
    Experiment {
        name: "correlated",
        about: "graded correlated market: optimal number offered and profit against t",
        vars: &["t"],
        default_sweep: Some("t=0..1:0.05"),
        run: correlated,
    },
    Experiment {
        name: "gaussian",
        about: "Gaussian correlated market (simulation only): optimal number offered and profit against t",
        vars: &["t"],
        default_sweep: Some("t=0..1:0.05"),
        run: gaussian,
    },
    Experiment {
        name: "matching",
        about: "single-variant matching: worst buyer rank, buyer and vendor costs against d (or M)",
        vars: &["d", "M"],
        default_sweep: Some("d=1..20:1"),
        run: matching,
    },
    Experiment {
        name: "multi-variant",
        about: "multi-variant offer: best buyer rank and buyer cost against d",
        vars: &["d"],
        default_sweep: Some("d=1..20:1"),
        run: multi_variant,
    },
];

const INTEGER_VARS: &[&str] = &["k", "alpha", "M", "N", "d"];
const DEFAULT_INTERVALS: usize = 40;

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// Runs the experiment named in `cfg.scenario`.
pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    let name = cfg.scenario.as_deref().unwrap_or("");
    let experiment = find(name).ok_or_else(|| ExperimentError::Unknown(name.to_string()))?;
    cfg.validate().map_err(|e| ExperimentError::Invalid(e.to_string()))?;
    (experiment.run)(cfg, experiment)
}

impl Experiment {
    /// The configured or default sweep, checked against the allowed variables.
    fn sweep(&self, cfg: &ExperimentConfig) -> Result<Option<(String, Vec<f64>)>> {
        let sweep = match (&cfg.sweep, self.default_sweep) {
            (Some(s), _) => s.clone(),
            (None, Some(text)) => Sweep::parse(text).expect("default sweeps parse"),
            (None, None) => return Ok(None),
        };
        if !self.vars.contains(&sweep.var.as_str()) {
            return Err(ExperimentError::SweepVar {
                experiment: self.name,
                var: sweep.var.clone(),
                allowed: self.vars.join(", "),
            });
        }
        let integer = INTEGER_VARS.contains(&sweep.var.as_str());
        let values = if integer && sweep.step.is_none() {
            Sweep { step: Some(1.0), ..sweep.clone() }.values(DEFAULT_INTERVALS)
        } else {
            sweep.values(DEFAULT_INTERVALS)
        };
        if integer && values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
            return Err(ExperimentError::Invalid(format!(
                "sweep over {} needs non-negative integer points",
                sweep.var
            )));
        }
        Ok(Some((sweep.var, values)))
    }
}

/// Market parameters with `p` replaced by the mean acceptance of the configured rule.
fn analytic_market(cfg: &ExperimentConfig) -> Result<MarketParams> {
    let f = cfg.acceptance_function()?;
    Ok(MarketParams::new(cfg.buyers, cfg.variants, f.mean_acceptance(), cfg.z)?)
}

fn point(mean: f64) -> Estimate {
    Estimate { mean, std_error: f64::NAN }
}

fn profit_curve(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    if cfg.sweep.is_some() {
        return Err(ExperimentError::Invalid(format!(
            "{} always runs over k = 0..=k_max; set k_max instead of a sweep",
            e.name
        )));
    }
    let params = analytic_market(cfg)?;
    let opt = kopt_uninformed(&params);
    let k_max = cfg
        .k_max
        .unwrap_or_else(|| (2 * opt.k_opt.ceil() as usize + 10).max(20))
        .min(cfg.variants);
    let sim = sim_uninformed(&cfg.market()?, cfg.acceptance_function()?, k_max, cfg.realizations, cfg.seed)?;
    let profit = sim.series("profit").expect("profit series");
    let sold = sim.series("sold").expect("sold series");
    let p = params.accept_prob();
    let mut table = Table::new(e.name, "k", cfg.realizations, cfg.seed);
    for k in 0..=k_max {
        let x = k as f64;
        table.push(Row::new(x, "profit", profit_uninformed(&params, k), Some(profit[k])));
        table.push(
            Row::new(x, "profit_exact", profit_uninformed_exact(&params, k), Some(profit[k]))
                .checked(Tolerance::StdErrors(4.0)),
        );
        table.push(
            Row::new(x, "sold", params.buyers() as f64 * accept_any_of_k(p, k, Form::Exact), Some(sold[k]))
                .checked(Tolerance::StdErrors(4.0)),
        );
    }
    if let Some((k, est)) = sim.series_argmax("profit") {
        table.notes.push(format!(
            "simulated optimum k = {k}, profit {} (continuous optimum k = {}, profit {})",
            fmt_g9(est.mean),
            fmt_g9(opt.k_opt),
            fmt_g9(opt.profit)
        ));
    }
    Ok(table)
}

/// Index and value of the largest `revenue[k] - k z`; ties go to the smaller `k`.
pub fn best_offer(revenue: &[Estimate], z: f64) -> (usize, Estimate) {
    let mut best = (0, revenue[0]);
    for (k, r) in revenue.iter().enumerate().skip(1) {
        if r.mean - k as f64 * z > best.1.mean - best.0 as f64 * z {
            best = (k, *r);
        }
    }
    let (k, r) = best;
    (k, Estimate { mean: r.mean - k as f64 * z, std_error: r.std_error })
}

fn uninformed(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, zs) = e.sweep(cfg)?.expect("default sweep");
    let base = analytic_market(cfg)?;
    let mut optima = Vec::with_capacity(zs.len());
    for &z in &zs {
        optima.push(kopt_uninformed(&base.with_initial_cost(z)?));
    }
    let widest = optima.iter().map(|o| o.k_opt).fold(0.0, f64::max);
    let k_max = cfg
        .k_max
        .unwrap_or_else(|| (1.5 * widest).ceil() as usize + 10)
        .min(cfg.variants);
    // One run serves every Z: the revenue of each prefix does not depend on Z.
    let sim = sim_uninformed(&cfg.market()?, cfg.acceptance_function()?, k_max, cfg.realizations, cfg.seed)?;
    let revenue = sim.series("revenue").expect("revenue series");

    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for (&z, opt) in zs.iter().zip(&optima) {
        let (k, profit) = best_offer(revenue, z);
        let params = base.with_initial_cost(z)?;
        let exact = argmax_k(|k| profit_uninformed_exact(&params, k), k_max);
        table.push(Row::new(z, "k_opt", opt.k_opt, Some(point(k as f64))).checked(Tolerance::Absolute(2.0)));
        table.push(Row::new(z, "X_opt", opt.profit, Some(profit)).checked(Tolerance::Relative(0.05)));
        table.push(Row::new(z, "k_opt_exact", exact.k as f64, Some(point(k as f64))));
        table.push(Row::new(z, "X_opt_exact", exact.value, Some(profit)));
    }
    if optima.iter().any(|o| o.capped) {
        table.notes.push(format!("k_opt exceeds N = {} for some Z and is capped", cfg.variants));
    }
    Ok(table)
}

fn sequential(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let f = cfg.acceptance_function()?;
    let p = f.mean_acceptance();
    let sweep = e.sweep(cfg)?;
    let (var, values) = match sweep {
        Some((var, values)) if var != "alpha" => (var, values),
        _ => {
            let k = cfg.k.unwrap_or(30);
            let sim = sim_sequential(&cfg.market()?, f, Stopping::Fixed(k), cfg.realizations, cfg.seed)?;
            let sales = sim.series("sales").expect("sales series");
            let mut table = Table::new(e.name, "alpha", cfg.realizations, cfg.seed);
            for (i, est) in sales.iter().enumerate() {
                let analytic = sequential_sales(cfg.buyers as f64, p, i + 1);
                table.push(Row::new((i + 1) as f64, "sales", analytic, Some(*est)).checked(Tolerance::StdErrors(4.0)));
            }
            return Ok(table);
        }
    };
    let ratio = cfg.z / cfg.buyers as f64;
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &v in &values {
        let (buyers, z) = match var.as_str() {
            "Z" => (cfg.buyers, v),
            "q" => (cfg.buyers, v * cfg.buyers as f64),
            _ => (v as usize, ratio * v),
        };
        let params = MarketParams::new(buyers, cfg.variants, cfg.p, z)?;
        let sim = sim_sequential(&params, f, Stopping::Greedy, cfg.realizations, cfg.seed)?;
        let analytic = kopt_sequential(buyers as f64, p, z);
        table.push(Row::new(v, "stop_k", analytic, sim.scalar("stop_k")).checked(Tolerance::Absolute(2.0)));
        table.push(Row::new(v, "profit", f64::NAN, sim.scalar("profit")));
    }
    Ok(table)
}

fn duopoly(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let f = cfg.acceptance_function()?;
    let p = f.mean_acceptance();
    let market = cfg.market()?;
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    let mut exit = None;
    for &v in &values {
        let (z1, z2) = if var == "Z1" { (v, cfg.z2) } else { (cfg.z1, v) };
        let game = Duopoly {
            buyers: cfg.buyers as f64,
            accept_prob: p,
            z1,
            z2,
            k_max: cfg.k_max.unwrap_or(cfg.variants).min(cfg.variants),
        };
        let points = match duopoly_equilibrium(&game) {
            Ok(eq) => vec![(eq.k1, eq.k2)],
            Err(SolveError::Cycle(points)) => points,
            Err(err) => return Err(err.into()),
        };
        if exit.is_none() && points.iter().all(|&(k1, _)| k1 == 0) {
            exit = Some(v);
        }
        let n = points.len() as f64;
        let k1 = points.iter().map(|q| q.0 as f64).sum::<f64>() / n;
        let k2 = points.iter().map(|q| q.1 as f64).sum::<f64>() / n;
        table.push(Row::new(v, "k1", k1, None));
        table.push(Row::new(v, "k2", k2, None));
        if let [(k1, k2)] = points[..] {
            let (x1, x2) = game.profits(k1, k2);
            let sim = sim_duopoly(&market, f, z1, z2, k1, k2, cfg.realizations, cfg.seed)?;
            table.push(Row::new(v, "X1", x1, sim.scalar("profit1")));
            table.push(Row::new(v, "X2", x2, sim.scalar("profit2")));
        } else {
            table.push(Row::new(v, "X1", f64::NAN, None));
            table.push(Row::new(v, "X2", f64::NAN, None));
        }
        table.push(Row::new(v, "cycle", n, None));
    }
    if var == "Z1" {
        let threshold = hetmarket::analytic::duopoly_priceout(cfg.buyers as f64, p, cfg.z2);
        table.notes.push(match exit {
            Some(z) => format!(
                "vendor 1 first offers nothing at Z1 = {}; price-out threshold {}",
                fmt_g9(z),
                fmt_g9(threshold)
            ),
            None => format!("vendor 1 never exits in the sweep; price-out threshold {}", fmt_g9(threshold)),
        });
    }
    if table.rows.iter().any(|r| r.quantity == "cycle" && r.analytic > 1.0) {
        table.notes.push("some points have no pure equilibrium; k1 and k2 are cycle averages there".into());
    }
    Ok(table)
}

fn informed(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.unwrap_or(("M".into(), vec![cfg.buyers as f64]));
    let f = cfg.acceptance_function()?;
    let p = f.mean_acceptance();
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &v in &values {
        let (m, n) = if var == "M" { (v as usize, cfg.variants) } else { (cfg.buyers, v as usize) };
        let params = MarketParams::new(m, n, cfg.p, cfg.z)?;
        let sim = sim_informed_max(&params, f, cfg.realizations, cfg.seed)?;
        let mf = m as f64;
        table.push(
            Row::new(v, "delta", informed_gain(mf, p, n).unwrap_or(f64::NAN), sim.scalar("delta"))
                .checked(Tolerance::Relative(0.10)),
        );
        table.push(Row::new(v, "max_sale", most_probable_max_sale(mf, p, n).unwrap_or(f64::NAN), sim.scalar("max_sale")));
        table.push(Row::new(v, "mode", extremal_mode(mf, p, n), sim.scalar("mode")));
    }
    Ok(table)
}

fn tau(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &t in &values {
        let coupling = Coupling::new(t.clamp(0.0, 1.0), cfg.s)?;
        let (bb, bv) = sample_taus(cfg.scheme, coupling, cfg.variants, cfg.realizations, cfg.seed)?;
        for (name, pair, est) in [("tau_bb", ListPair::BuyerBuyer, bb), ("tau_bv", ListPair::BuyerVendor, bv)] {
            let analytic = expected_tau(cfg.scheme, coupling, pair);
            table.push(Row::new(t, name, analytic, Some(est)).checked(Tolerance::StdErrors(3.0)));
        }
    }
    table.notes.push(format!("scheme {}, s = {}", scheme_label(cfg.scheme), cfg.s.value()));
    Ok(table)
}

/// Mean buyer-buyer and buyer-vendor tau over `pairs` independent ensembles of two buyers.
pub fn sample_taus(
    scheme: Scheme,
    coupling: Coupling,
    variants: usize,
    pairs: usize,
    seed: u64,
) -> Result<(Estimate, Estimate)> {
    let taus = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let ens = generate(scheme, 2, variants, coupling, stream_seed(seed, i as u64))?;
            Ok((ens.tau(ListPair::BuyerBuyer)?, ens.tau(ListPair::BuyerVendor)?))
        })
        .collect::<std::result::Result<Vec<(f64, f64)>, CorrelationError>>()?;
    let bb: Accumulator = taus.iter().map(|t| t.0).collect();
    let bv: Accumulator = taus.iter().map(|t| t.1).collect();
    Ok((bb.estimate(), bv.estimate()))
}

fn bound_value(bound: ListBound) -> f64 {
    match bound {
        ListBound::Finite(n) => n as f64,
        ListBound::Unbounded => f64::INFINITY,
    }
}

fn bound(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let n = cfg.variants;
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &v in &values {
        let tau0 = v.clamp(-1.0, 1.0);
        let halving = bound_value(max_equicorrelated(tau0, n, BoundForm::Halving)?);
        let single = bound_value(max_equicorrelated(tau0, n, BoundForm::SingleLog)?);
        let found = if n <= 5 {
            Some(Estimate::exact(exhaustive_equicorrelated(n, tau0)?.len() as f64))
        } else {
            None
        };
        table.push(Row::new(tau0, "bound", halving, found).checked(Tolerance::AtMost));
        table.push(Row::new(tau0, "bound_single_log", single, found));
    }
    if n <= 5 {
        table.notes.push(format!("sim_mean holds the exhaustive maximum over permutations of length {n}"));
    }
    Ok(table)
}

fn correlated_market(cfg: &ExperimentConfig, t: f64) -> Result<(MarketParams, Coupling)> {
    Ok((cfg.market()?, Coupling::new(t.clamp(0.0, 1.0), cfg.s)?))
}

fn correlated(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &t in &values {
        let (params, coupling) = correlated_market(cfg, t)?;
        let best = argmax_k(|k| corr_expected_profit(&params, coupling, k, Form::Exact), cfg.variants);
        let k_max = cfg
            .k_max
            .unwrap_or((2 * best.k).max(best.k + 40))
            .min(cfg.variants);
        let sim = sim_correlated(&params, Scheme::Graded, coupling, k_max, cfg.realizations, cfg.seed)?;
        let (k, est) = sim.series_argmax("profit").expect("profit series");
        table.push(Row::new(t, "k_opt", best.k as f64, Some(point(k as f64))).checked(Tolerance::Absolute(3.0)));
        table.push(Row::new(t, "X_opt", best.value, Some(est)).checked(Tolerance::Relative(0.07)));
        if cfg.s == Sign::Negative {
            let sales = sim.series("variant_sales").expect("variant sales");
            let first = sales.iter().position(|s| s.mean > 0.0).map_or(f64::NAN, |i| (i + 1) as f64);
            table.push(Row::new(t, "first_sale", alpha_min(cfg.variants, cfg.p, t) as f64, Some(point(first))));
        }
    }
    Ok(table)
}

fn gaussian(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let k_max = cfg.k_max.unwrap_or(200).min(cfg.variants);
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &t in &values {
        let (params, coupling) = correlated_market(cfg, t)?;
        let sim = sim_correlated(&params, Scheme::Gaussian, coupling, k_max, cfg.realizations, cfg.seed)?;
        let (k, est) = sim.series_argmax("profit").expect("profit series");
        table.push(Row::new(t, "k_opt", f64::NAN, Some(point(k as f64))));
        table.push(Row::new(t, "X_opt", f64::NAN, Some(est)));
        if k == k_max {
            table.notes.push(format!("t = {t}: optimum at the scan limit k_max = {k_max}"));
        }
    }
    Ok(table)
}

fn matching(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    for &v in &values {
        let (buyers, depth) = if var == "d" { (cfg.buyers, v as usize) } else { (v as usize, cfg.depth) };
        let sim = sim_matching(cfg.variants, buyers, depth, cfg.realizations, cfg.seed)?;
        let means = matching_means(cfg.variants, buyers, depth);
        table.push(Row::new(v, "b", means.mean_b, sim.scalar("b")).checked(Tolerance::Relative(0.10)));
        table.push(Row::new(v, "x", means.mean_x, sim.scalar("x")).checked(Tolerance::Relative(0.10)));
        table.push(Row::new(v, "y", means.mean_y, sim.scalar("y")).checked(Tolerance::Relative(0.02)));
    }
    Ok(table)
}

fn multi_variant(cfg: &ExperimentConfig, e: &Experiment) -> Result<Table> {
    let (var, values) = e.sweep(cfg)?.expect("default sweep");
    let mut table = Table::new(e.name, &var, cfg.realizations, cfg.seed);
    let n = cfg.variants as f64;
    for &v in &values {
        let depth = v as usize;
        let sim = sim_multi_variant(cfg.variants, depth, cfg.buyers, cfg.realizations, cfg.seed)?;
        let mean = multi_variant_b(cfg.variants, depth)?.mean_exact;
        table.push(Row::new(v, "b", mean, sim.scalar("b")).checked(Tolerance::StdErrors(4.0)));
        table.push(Row::new(v, "x", mean / n, sim.scalar("x")).checked(Tolerance::StdErrors(4.0)));
    }
    Ok(table)
}

/// One line per quantity, and the number of rows outside their tolerance.
pub fn summarize(table: &Table, scale: f64) -> (Vec<String>, usize) {
    let mut lines = Vec::new();
    let mut failures = 0;
    for q in table.quantities() {
        let rows: Vec<&Row> = table.rows.iter().filter(|r| r.quantity == q).collect();
        let mut line = format!("{}: {q}: {} points", table.experiment, rows.len());
        let worst = rows
            .iter()
            .filter_map(|r| {
                let sim = r.sim?;
                let diff = (sim.mean - r.analytic).abs();
                (!diff.is_nan()).then_some((diff, r.x))
            })
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((diff, x)) = worst {
            line += &format!(", max |sim - analytic| = {} at {} = {}", fmt_g9(diff), table.var, fmt_g9(x));
        }
        let checks: Vec<bool> = rows.iter().filter_map(|r| r.check(scale)).collect();
        if !checks.is_empty() {
            let bad = checks.iter().filter(|ok| !**ok).count();
            failures += bad;
            let tol = rows[0].tolerance.expect("checked rows").describe(scale);
            line += &format!(", {}/{} within {tol}", checks.len() - bad, checks.len());
        }
        lines.push(line);
    }
    for note in &table.notes {
        lines.push(format!("{}: {note}", table.experiment));
    }
    (lines, failures)
}

/// Rows outside their tolerance, formatted for `--check`.
pub fn failing_rows(table: &Table, scale: f64) -> Vec<String> {
    table
        .rows
        .iter()
        .filter(|r| r.check(scale) == Some(false))
        .map(|r| {
            let sim = r.sim.expect("checked row");
            format!(
                "FAIL {} {} = {}: {} measured {} (se {}), analytic {}, tolerance {}",
                table.experiment,
                table.var,
                fmt_g9(r.x),
                r.quantity,
                fmt_g9(sim.mean),
                fmt_g9(sim.std_error),
                fmt_g9(r.analytic),
                r.tolerance.expect("checked row").describe(scale)
            )
        })
        .collect()
}
