use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{
    check_realizations, run_indexed, summarize, summarize_columns, RunSummary, SimError,
};
use crate::correlation::{Coupling, Scheme};
use crate::model::{sample_uncorrelated_prefix, sorted_vendor_costs, AcceptanceFunction, MarketParams};

/// Sales of one realization when the `k` cheapest variants are offered at once,
/// reported for every prefix `0..=k`.
struct PrefixSales {
    /// `revenue[j]`: income net of unit costs when the first `j` variants are offered.
    revenue: Vec<f64>,
    /// `sold[j]`: buyers served when the first `j` variants are offered.
    sold: Vec<u64>,
    /// Items of each variant sold when all `k` are offered.
    counts: Vec<u64>,
}

/// Every buyer screens the offered variants in vendor order and keeps a
/// uniformly chosen one among those accepted so far (reservoir sampling), so
/// the choice is uniform among the accepted variants of every prefix.
fn simultaneous_offer<R: Rng>(
    k: usize,
    buyers: usize,
    vendor_costs: &[f64],
    rng: &mut R,
    mut accepts: impl FnMut(&mut R, usize, usize) -> bool,
) -> PrefixSales {
    let mut revenue_step = vec![0.0; k + 1];
    let mut sold_step = vec![0i64; k + 1];
    let mut counts = vec![0u64; k];
    for buyer in 0..buyers {
        let mut choice: Option<usize> = None;
        let mut seen = 0u64;
        for alpha in 0..k {
            if !accepts(rng, buyer, alpha) {
                continue;
            }
            seen += 1;
            if seen > 1 && rng.random_range(0..seen) != 0 {
                continue;
            }
            let margin = 1.0 - vendor_costs[alpha];
            match choice {
                Some(old) => revenue_step[alpha + 1] += margin - (1.0 - vendor_costs[old]),
                None => {
                    revenue_step[alpha + 1] += margin;
                    sold_step[alpha + 1] += 1;
                }
            }
            choice = Some(alpha);
        }
        if let Some(alpha) = choice {
            counts[alpha] += 1;
        }
    }
    let mut revenue = Vec::with_capacity(k + 1);
    let mut sold = Vec::with_capacity(k + 1);
    let (mut r, mut s) = (0.0, 0i64);
    for j in 0..=k {
        r += revenue_step[j];
        s += sold_step[j];
        revenue.push(r);
        sold.push(s as u64);
    }
    PrefixSales { revenue, sold, counts }
}

fn check_offer(offered: usize, variants: usize) -> Result<(), SimError> {
    if offered > variants {
        return Err(SimError::TooManyOffered { offered, variants });
    }
    Ok(())
}

fn market_settings(summary: RunSummary, params: &MarketParams) -> RunSummary {
    summary
        .setting("M", params.buyers())
        .setting("N", params.variants())
        .setting("p", params.accept_prob())
        .setting("Z", params.initial_cost())
}

/// Fills scalars at `k_max` and per-prefix series from simultaneous-offer runs.
fn prefix_summary(mut summary: RunSummary, runs: &[PrefixSales], k_max: usize, z: f64) -> RunSummary {
    let profits: Vec<Vec<f64>> = runs
        .iter()
        .map(|run| run.revenue.iter().enumerate().map(|(k, r)| r - k as f64 * z).collect())
        .collect();
    let revenue: Vec<Vec<f64>> = runs.iter().map(|run| run.revenue.clone()).collect();
    let sold: Vec<Vec<f64>> =
        runs.iter().map(|run| run.sold.iter().map(|&s| s as f64).collect()).collect();
    let counts: Vec<Vec<f64>> =
        runs.iter().map(|run| run.counts.iter().map(|&c| c as f64).collect()).collect();
    let per_variant: Vec<f64> = runs
        .iter()
        .map(|run| if k_max == 0 { 0.0 } else { run.sold[k_max] as f64 / k_max as f64 })
        .collect();

    let profit_series = summarize_columns(&profits);
    let sold_series = summarize_columns(&sold);
    summary.scalars.insert("profit".into(), profit_series[k_max]);
    summary.scalars.insert("total_sold".into(), sold_series[k_max]);
    summary.scalars.insert("sale_per_variant".into(), summarize(&per_variant));
    summary.series.insert("profit".into(), profit_series);
    summary.series.insert("revenue".into(), summarize_columns(&revenue));
    summary.series.insert("sold".into(), sold_series);
    summary.series.insert("variant_sales".into(), summarize_columns(&counts));
    summary
}

/// Uninformed vendor offering its `k_max` cheapest variants at once.
///
/// Series `profit`, `revenue` and `sold` hold estimates for every prefix
/// `k = 0..=k_max`; since buyers scan variants in vendor order, the prefix
/// `k` has the law of offering exactly `k` variants. `variant_sales` holds
/// per-variant sales at `k_max`.
pub fn sim_uninformed(
    params: &MarketParams,
    f: AcceptanceFunction,
    k_max: usize,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    check_offer(k_max, params.variants())?;
    let runs = run_indexed(realizations, seed, |rng| {
        let costs = sample_uncorrelated_prefix(params, k_max, rng);
        simultaneous_offer(k_max, params.buyers(), costs.vendor_costs(), rng, |rng, i, a| {
            f.accepts(costs.buyer_cost(i, a), rng.random())
        })
    });
    let summary = market_settings(RunSummary::new("uninformed", realizations, seed), params)
        .setting("f", format!("{f:?}"))
        .setting("k_max", k_max);
    Ok(prefix_summary(summary, &runs, k_max, params.initial_cost()))
}

/// When the sequentially offering vendor stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stopping {
    /// Offer exactly this many variants.
    Fixed(usize),
    /// Stop after the first variant whose realized sale `n` fails to cover
    /// its costs, `n < Z + n y`. `stop_k` counts the variants before it.
    Greedy,
}

/// Variants offered one by one in ascending vendor cost; buyers who bought
/// leave, the rest consider the next variant.
///
/// A remaining buyer accepts a fresh variant with the mean acceptance
/// probability of `f`, independently of everything before, so the number of
/// acceptors among `r` remaining buyers is drawn as Binomial(r, p).
pub fn sim_sequential(
    params: &MarketParams,
    f: AcceptanceFunction,
    stopping: Stopping,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    if let Stopping::Fixed(k) = stopping {
        check_offer(k, params.variants())?;
    }
    let p = f.mean_acceptance();
    let z = params.initial_cost();
    let n = params.variants();

    struct Sequence {
        sales: Vec<u64>,
        stop_k: usize,
        profit: f64,
    }

    let runs = run_indexed(realizations, seed, |rng| {
        let vendor = sorted_vendor_costs(n, rng);
        let limit = match stopping {
            Stopping::Fixed(k) => k,
            Stopping::Greedy => n,
        };
        let mut remaining = params.buyers() as u64;
        let mut sales = Vec::with_capacity(limit);
        let mut stop_k = limit;
        let mut profit = 0.0;
        for (alpha, &y) in vendor.iter().enumerate().take(limit) {
            let sold = if remaining == 0 {
                0
            } else {
                Binomial::new(remaining, p).expect("valid binomial").sample(rng)
            };
            remaining -= sold;
            sales.push(sold);
            profit += sold as f64 * (1.0 - y) - z;
            if stopping == Stopping::Greedy && (sold as f64) < z + sold as f64 * y {
                stop_k = alpha;
                break;
            }
        }
        Sequence { sales, stop_k, profit }
    });

    let mut summary = market_settings(RunSummary::new("sequential", realizations, seed), params)
        .setting("f", format!("{f:?}"))
        .setting("stopping", format!("{stopping:?}"));
    let profits: Vec<f64> = runs.iter().map(|r| r.profit).collect();
    let totals: Vec<f64> = runs.iter().map(|r| r.sales.iter().sum::<u64>() as f64).collect();
    let offered: Vec<f64> = runs.iter().map(|r| r.sales.len() as f64).collect();
    let stops: Vec<f64> = runs.iter().map(|r| r.stop_k as f64).collect();
    summary.scalars.insert("profit".into(), summarize(&profits));
    summary.scalars.insert("total_sold".into(), summarize(&totals));
    summary.scalars.insert("offered".into(), summarize(&offered));
    summary.scalars.insert("stop_k".into(), summarize(&stops));
    if let Stopping::Fixed(_) = stopping {
        let rows: Vec<Vec<f64>> =
            runs.iter().map(|r| r.sales.iter().map(|&s| s as f64).collect()).collect();
        summary.series.insert("sales".into(), summarize_columns(&rows));
    }
    Ok(summary)
}

/// Two vendors: vendor 1 offers the `k1` cheapest variants, vendor 2 the next
/// `k2`. Buyers see all of them at once.
#[allow(clippy::too_many_arguments)]
pub fn sim_duopoly(
    params: &MarketParams,
    f: AcceptanceFunction,
    z1: f64,
    z2: f64,
    k1: usize,
    k2: usize,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    check_offer(k1 + k2, params.variants())?;
    let k = k1 + k2;
    let runs = run_indexed(realizations, seed, |rng| {
        let costs = sample_uncorrelated_prefix(params, k, rng);
        let sales = simultaneous_offer(k, params.buyers(), costs.vendor_costs(), rng, |rng, i, a| {
            f.accepts(costs.buyer_cost(i, a), rng.random())
        });
        let vendor = costs.vendor_costs();
        let side = |range: std::ops::Range<usize>, k_i: usize, z_i: f64| {
            let sold: u64 = sales.counts[range.clone()].iter().sum();
            let revenue: f64 = range.map(|a| sales.counts[a] as f64 * (1.0 - vendor[a])).sum();
            let cost = if k_i == 0 { 0.0 } else { k_i as f64 * z_i };
            (sold, revenue - cost)
        };
        (side(0..k1, k1, z1), side(k1..k, k2, z2))
    });

    let mut summary = market_settings(RunSummary::new("duopoly", realizations, seed), params)
        .setting("f", format!("{f:?}"))
        .setting("Z1", z1)
        .setting("Z2", z2)
        .setting("k1", k1)
        .setting("k2", k2);
    // Per realization: (sold, profit) of each vendor.
    type Split = ((u64, f64), (u64, f64));
    let col = |pick: &dyn Fn(&Split) -> f64| -> Vec<f64> {
        runs.iter().map(pick).collect()
    };
    summary.scalars.insert("profit1".into(), summarize(&col(&|r| r.0 .1)));
    summary.scalars.insert("profit2".into(), summarize(&col(&|r| r.1 .1)));
    summary.scalars.insert("sold1".into(), summarize(&col(&|r| r.0 .0 as f64)));
    summary.scalars.insert("sold2".into(), summarize(&col(&|r| r.1 .0 as f64)));
    let shares: Vec<f64> = runs
        .iter()
        .filter(|r| r.0 .0 + r.1 .0 > 0)
        .map(|r| r.0 .0 as f64 / (r.0 .0 + r.1 .0) as f64)
        .collect();
    if shares.len() >= 2 {
        summary.scalars.insert("share1".into(), summarize(&shares));
    }
    Ok(summary)
}

/// Largest number of prospective buyers over all variants.
///
/// Each of the `M` buyers accepts a given variant independently with the
/// mean acceptance probability of `f`, so per-variant acceptor counts are
/// Binomial(M, p). Reports the maximum `max_sale`, the relative gain
/// `delta = (m - Mp)/(Mp)`, the histogram of `m` and its most frequent value.
pub fn sim_informed_max(
    params: &MarketParams,
    f: AcceptanceFunction,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    let p = f.mean_acceptance();
    let m = params.buyers() as u64;
    let binomial = Binomial::new(m, p).expect("valid binomial");
    let maxima = run_indexed(realizations, seed, |rng| {
        (0..params.variants()).map(|_| binomial.sample(rng)).max().unwrap_or(0)
    });
    let mean_sale = m as f64 * p;
    let mut histogram = vec![0u64; m as usize + 1];
    for &x in &maxima {
        histogram[x as usize] += 1;
    }
    let mode = histogram
        .iter()
        .enumerate()
        .fold((0, 0), |best, (v, &c)| if c > best.1 { (v, c) } else { best })
        .0;

    let mut summary = market_settings(RunSummary::new("informed", realizations, seed), params)
        .setting("f", format!("{f:?}"));
    let values: Vec<f64> = maxima.iter().map(|&x| x as f64).collect();
    let deltas: Vec<f64> = values.iter().map(|x| (x - mean_sale) / mean_sale).collect();
    summary.scalars.insert("max_sale".into(), summarize(&values));
    summary.scalars.insert("delta".into(), summarize(&deltas));
    summary.scalars.insert("mode".into(), crate::stats::Estimate::exact(mode as f64));
    summary.histograms.insert("max_sale".into(), histogram);
    Ok(summary)
}

/// Uninformed vendor in a correlated market with step acceptance at `p`.
///
/// Costs come from the graded or Gaussian scheme; variants are renumbered in
/// ascending vendor cost and the `k_max` cheapest are offered at once.
/// Output has the same shape as [`sim_uninformed`].
pub fn sim_correlated(
    params: &MarketParams,
    scheme: Scheme,
    coupling: Coupling,
    k_max: usize,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    check_offer(k_max, params.variants())?;
    if scheme == Scheme::Mixture {
        return Err(SimError::UnsupportedScheme);
    }
    let f = AcceptanceFunction::step(params.accept_prob())?;
    let runs = run_indexed(realizations, seed, |rng| {
        let vendor = scheme
            .draw_vendor(params.variants(), coupling, rng)
            .map(|side| side.sorted());
        vendor.map(|side| {
            simultaneous_offer(k_max, params.buyers(), &side.costs, rng, |rng, _, a| {
                f.accepts(scheme.draw_buyer_cost(side.shared[a], coupling, rng), 0.0)
            })
        })
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let summary = market_settings(RunSummary::new("correlated", realizations, seed), params)
        .setting("scheme", format!("{scheme:?}"))
        .setting("t", coupling.binding())
        .setting("s", coupling.sign().value())
        .setting("k_max", k_max);
    Ok(prefix_summary(summary, &runs, k_max, params.initial_cost()))
}
