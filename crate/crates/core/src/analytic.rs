//! Closed-form expressions for vendor profit, sales and rank statistics.
//!
//! Where both an exact and an approximate expression exist, [`Form::Exact`]
//! is the default and the approximation is opt-in.

use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use thiserror::Error;

use crate::correlation::{grid_position, normal_cdf, Coupling, Sign};
use crate::model::MarketParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    Exact,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{what} needs a logarithm argument above 1, got {argument}; the large-N asymptotics do not apply")]
    AsymptoticDomain { what: &'static str, argument: f64 },
    #[error("cannot offer {offered} of {variants} variants")]
    TooManyOffered { offered: usize, variants: usize },
    #[error("{0} must be at least 1")]
    Zero(&'static str),
}

/// Probability that a buyer accepts at least one of `k` independent offers.
///
/// Exact: `1 - (1-p)^k`. Approximate: `1 - exp(-pk)`.
pub fn accept_any_of_k(p: f64, k: usize, form: Form) -> f64 {
    match form {
        Form::Exact => 1.0 - (1.0 - p).powi(k as i32),
        Form::Approximate => 1.0 - (-p * k as f64).exp(),
    }
}

/// Expected uninformed-vendor profit when offering the `k` cheapest variants,
/// `M (1 - e^{-pk}) (1 - (1+k)/(2(N+1))) - kZ`.
pub fn profit_uninformed(params: &MarketParams, k: usize) -> f64 {
    uninformed_with(params, k, Form::Approximate)
}

/// Same as [`profit_uninformed`] with the exact acceptance `1 - (1-p)^k`.
/// This is the expectation the simultaneous-offer simulation estimates.
pub fn profit_uninformed_exact(params: &MarketParams, k: usize) -> f64 {
    uninformed_with(params, k, Form::Exact)
}

fn uninformed_with(params: &MarketParams, k: usize, form: Form) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let m = params.buyers() as f64;
    let n = params.variants() as f64;
    let sold = m * accept_any_of_k(params.accept_prob(), k, form);
    let mean_cost = (1.0 + k as f64) / (2.0 * (n + 1.0));
    sold * (params.price() - mean_cost) - k as f64 * params.initial_cost()
}

/// Continuous optimum of the uninformed vendor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UninformedOptimum {
    pub k_opt: f64,
    pub profit: f64,
    /// `Z >= Mp`: producing anything loses money.
    pub idle: bool,
    /// `k_opt` exceeded `N` and was capped; `profit` is then `X_U(N)`.
    pub capped: bool,
}

/// `k_opt = ln(Mp/Z)/p`, `X_opt = M - (Z/p)(1 + ln(Mp/Z))`; `(0, 0)` when idle.
pub fn kopt_uninformed(params: &MarketParams) -> UninformedOptimum {
    let mp = params.mean_sale();
    let p = params.accept_prob();
    let z = params.initial_cost();
    if z >= mp {
        return UninformedOptimum { k_opt: 0.0, profit: 0.0, idle: true, capped: false };
    }
    let k_opt = (mp / z).ln() / p;
    let n = params.variants();
    if k_opt > n as f64 {
        return UninformedOptimum {
            k_opt: n as f64,
            profit: profit_uninformed(params, n),
            idle: false,
            capped: true,
        };
    }
    let profit = params.buyers() as f64 - z / p * (1.0 + (mp / z).ln());
    UninformedOptimum { k_opt, profit, idle: false, capped: false }
}

/// Mean sale of variant `alpha` (1-based) under sequential offering, `Mp(1-p)^{alpha-1}`.
pub fn sequential_sales(buyers: f64, p: f64, alpha: usize) -> f64 {
    assert!(alpha >= 1, "variants are numbered from 1");
    buyers * p * (1.0 - p).powi(alpha as i32 - 1)
}

/// Stopping point of sequential offering, `ln(Z/(Mp))/ln(1-p)`; 0 when `Z >= Mp`.
pub fn kopt_sequential(buyers: f64, p: f64, z: f64) -> f64 {
    let mp = buyers * p;
    if z >= mp {
        return 0.0;
    }
    (z / mp).ln() / (1.0 - p).ln()
}

/// Profit gained by offering sequentially instead of simultaneously,
/// `Z (1 + ln(Mp/Z)) / (N p^2)`; 0 when `Z >= Mp`.
pub fn sequential_profit_gain(buyers: f64, variants: usize, p: f64, z: f64) -> f64 {
    let mp = buyers * p;
    if z >= mp {
        return 0.0;
    }
    z * (1.0 + (mp / z).ln()) / (variants as f64 * p * p)
}

/// Expected profits of two vendors offering disjoint sets of `k1` and `k2` variants.
///
/// Sales split in proportion to the offered counts. A vendor offering nothing
/// earns exactly 0, even with an infinite initial cost.
pub fn duopoly_profits(buyers: f64, p: f64, k1: usize, k2: usize, z1: f64, z2: f64) -> (f64, f64) {
    let total = k1 + k2;
    if total == 0 {
        return (0.0, 0.0);
    }
    let sold = buyers * accept_any_of_k(p, total, Form::Approximate);
    let share = |k: usize, z: f64| {
        if k == 0 {
            0.0
        } else {
            sold * k as f64 / total as f64 - k as f64 * z
        }
    };
    (share(k1, z1), share(k2, z2))
}

/// Initial cost at which vendor 1 is priced out by a competitor with cost `z2`:
/// `Z1* = Mp/ln(Mp/Z2) (1 - Z2/(Mp))`.
///
/// Tends to `Mp` as `Z2 -> Mp`; for `Z2 >= Mp` the competitor is idle and the
/// monopoly threshold `Mp` is returned.
pub fn duopoly_priceout(buyers: f64, p: f64, z2: f64) -> f64 {
    let mp = buyers * p;
    if z2 >= mp {
        return mp;
    }
    if z2 <= 0.0 {
        return 0.0;
    }
    mp / (mp / z2).ln() * (1.0 - z2 / mp)
}

fn sale_sigma(buyers: f64, p: f64) -> f64 {
    (buyers * p * (1.0 - p)).sqrt()
}

/// `P(max <= m)` for the maximum of `N` normal acceptor counts with mean `Mp`
/// and variance `Mp(1-p)`: `Phi((m - Mp)/sigma)^N`.
pub fn extremal_cdf(m: f64, buyers: f64, p: f64, variants: usize) -> f64 {
    let z = (m - buyers * p) / sale_sigma(buyers, p);
    let phi = normal_cdf(z);
    if phi == 0.0 {
        return 0.0;
    }
    (variants as f64 * phi.ln()).exp()
}

/// Density of the largest acceptor count over `N` variants,
/// `N phi(m) Phi((m - Mp)/sigma)^{N-1}` with `phi` the normal density.
pub fn extremal_density(m: f64, buyers: f64, p: f64, variants: usize) -> f64 {
    let sigma = sale_sigma(buyers, p);
    let z = (m - buyers * p) / sigma;
    let log_phi = -0.5 * z * z - (2.0 * PI).sqrt().ln() - sigma.ln();
    let cdf = normal_cdf(z);
    if cdf == 0.0 {
        return if variants == 1 { log_phi.exp() } else { 0.0 };
    }
    (log_phi + (variants as f64 - 1.0) * cdf.ln()).exp() * variants as f64
}

/// Location of the maximum of [`extremal_density`], found by bisection on
/// the stationarity condition `z Phi(z) = (N-1) phi(z)`.
pub fn extremal_mode(buyers: f64, p: f64, variants: usize) -> f64 {
    let sigma = sale_sigma(buyers, p);
    let nm1 = variants as f64 - 1.0;
    let slope = |z: f64| {
        let density = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        nm1 * density - z * normal_cdf(z)
    };
    let (mut lo, mut hi) = (-1.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    buyers * p + sigma * 0.5 * (lo + hi)
}

/// Large-N estimate of the most probable maximal sale,
/// `m~ = Mp + sigma sqrt(2 ln(sigma^3 N / sqrt(2 pi)))`.
pub fn most_probable_max_sale(buyers: f64, p: f64, variants: usize) -> Result<f64, AnalyticError> {
    let sigma = sale_sigma(buyers, p);
    let argument = sigma.powi(3) * variants as f64 / (2.0 * PI).sqrt();
    if argument <= 1.0 {
        return Err(AnalyticError::AsymptoticDomain { what: "most probable maximal sale", argument });
    }
    Ok(buyers * p + sigma * (2.0 * argument.ln()).sqrt())
}

/// Relative sale growth of a fully informed vendor, `sqrt(ln(pMN^2/(2 pi))/(Mp))`.
pub fn informed_gain(buyers: f64, p: f64, variants: usize) -> Result<f64, AnalyticError> {
    let n = variants as f64;
    let argument = p * buyers * n * n / (2.0 * PI);
    if argument <= 1.0 {
        return Err(AnalyticError::AsymptoticDomain { what: "informed sale growth", argument });
    }
    Ok((argument.ln() / (buyers * p)).sqrt())
}

/// Right-hand side of the uselessness condition `N^2 << (2 pi/(Mp)) e^{Mp}`.
pub fn informed_useless_threshold(buyers: f64, p: f64) -> f64 {
    let mp = buyers * p;
    2.0 * PI / mp * mp.exp()
}

/// Probability that one buyer accepts variant `alpha` (1-based) in a graded
/// market with step acceptance at `p`.
///
/// Buyer costs are `t y + (1-t) u` with `y` the variant's grid position
/// (reversed for negative coupling), so the exact result is
/// `(p - t y)/(1-t)` clipped to `[0, 1]`. The approximate form replaces
/// `y` by `alpha/N`. At `t = 1` a buyer accepts iff `y < p`.
pub fn corr_accept_prob(alpha: usize, variants: usize, p: f64, coupling: Coupling, form: Form) -> f64 {
    assert!((1..=variants).contains(&alpha), "variant {alpha} outside 1..={variants}");
    let t = coupling.binding();
    let index = match coupling.sign() {
        Sign::Positive => alpha,
        Sign::Negative => variants + 1 - alpha,
    };
    let y = match form {
        Form::Exact => grid_position(index - 1, variants),
        Form::Approximate => index as f64 / variants as f64,
    };
    if t >= 1.0 {
        return if y < p { 1.0 } else { 0.0 };
    }
    if t * y >= p {
        0.0
    } else if t * y <= p + t - 1.0 {
        1.0
    } else {
        ((p - t * y) / (1.0 - t)).clamp(0.0, 1.0)
    }
}

/// Probability that one buyer refuses all of the `k` cheapest variants.
///
/// Exact: `prod (1 - P_A(alpha))`. Approximate:
/// `exp(-pk/(1-t) + t k^2/(2N(1-t+p)))`, only used when `p/(1-t) < 1` and
/// the coupling is positive; otherwise the exact product is returned.
pub fn corr_deny_prob(k: usize, variants: usize, p: f64, coupling: Coupling, form: Form) -> f64 {
    assert!(k <= variants, "cannot offer {k} of {variants} variants");
    let t = coupling.binding();
    let approximable = t < 1.0 && p / (1.0 - t) < 1.0 && coupling.sign() == Sign::Positive;
    if form == Form::Approximate && approximable {
        let k = k as f64;
        let exponent = -p * k / (1.0 - t) + t * k * k / (2.0 * variants as f64 * (1.0 - t + p));
        return exponent.exp().min(1.0);
    }
    (1..=k).map(|a| 1.0 - corr_accept_prob(a, variants, p, coupling, Form::Exact)).product()
}

/// Probability that one buyer buys variant `alpha`, for `alpha = 1..=k`:
/// `P_A(alpha) / sum P_A * (1 - P_D(k))`. All zero when no variant is acceptable.
pub fn corr_sale_probs(k: usize, variants: usize, p: f64, coupling: Coupling, form: Form) -> Vec<f64> {
    let accept: Vec<f64> =
        (1..=k).map(|a| corr_accept_prob(a, variants, p, coupling, form)).collect();
    let total: f64 = accept.iter().sum();
    if total == 0.0 {
        return vec![0.0; k];
    }
    let sold = 1.0 - corr_deny_prob(k, variants, p, coupling, form);
    accept.iter().map(|a| a / total * sold).collect()
}

/// Expected profit of a vendor offering its `k` cheapest variants in a
/// graded market, `M sum P_S(alpha) (1 - (alpha-1)/(N-1)) - kZ`.
pub fn corr_expected_profit(params: &MarketParams, coupling: Coupling, k: usize, form: Form) -> f64 {
    let n = params.variants();
    let sales = corr_sale_probs(k, n, params.accept_prob(), coupling, form);
    let margin: f64 = sales
        .iter()
        .enumerate()
        .map(|(a, ps)| ps * (params.price() - grid_position(a, n)))
        .sum();
    params.buyers() as f64 * margin - k as f64 * params.initial_cost()
}

/// Smallest variant any buyer can accept under negative coupling,
/// `ceil(1 + (N-1)(t-p)/t)` for `t > p`, else 1.
pub fn alpha_min(variants: usize, p: f64, t: f64) -> usize {
    if t <= p {
        return 1;
    }
    // Guards against a product like 1000.0000000001 rounding up.
    let raw = 1.0 + (variants as f64 - 1.0) * (t - p) / t;
    ((raw - 1e-9).ceil() as usize).clamp(1, variants)
}

/// Approximate probability that the best worst-rank `b` equals the given value
/// when `M` buyers and a vendor willing to go `d` deep are matched:
/// `[1 - ((b-1)/N)^M]^d M (d/N) (b/N)^{M-1}`. Not normalized.
pub fn matching_b_density(b: usize, variants: usize, buyers: usize, depth: usize) -> f64 {
    let n = variants as f64;
    let m = buyers as f64;
    let d = depth as f64;
    let below = ((b as f64 - 1.0) / n).powf(m);
    (1.0 - below).powf(d) * m * d / n * (b as f64 / n).powf(m - 1.0)
}

/// Large-N averages of the single-variant matching model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingMeans {
    /// Worst buyer rank of the traded variant.
    pub mean_b: f64,
    /// Vendor cost of the traded variant.
    pub mean_y: f64,
    /// Buyer cost of the traded variant.
    pub mean_x: f64,
}

pub fn matching_means(variants: usize, buyers: usize, depth: usize) -> MatchingMeans {
    let m = buyers as f64;
    let d = depth as f64;
    let g = gamma(1.0 / m);
    let decay = d.powf(-1.0 / m);
    MatchingMeans {
        mean_b: variants as f64 * g / m * decay,
        mean_y: (1.0 + d) / (2.0 * variants as f64),
        mean_x: (m + 1.0) * g / (2.0 * m * m) * decay,
    }
}

/// Distribution of the best rank a buyer finds among `d` offered variants.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVariantRank {
    /// `pmf[b - 1] = P(b)` for `b = 1..=N`.
    pub pmf: Vec<f64>,
    /// `sum b P(b)`.
    pub mean_exact: f64,
    /// `(N+1)/(d+1) - d / C(N, d)`, kept for comparison with `mean_exact`.
    pub mean_closed_form: f64,
}

pub fn multi_variant_b(variants: usize, depth: usize) -> Result<MultiVariantRank, AnalyticError> {
    if variants == 0 {
        return Err(AnalyticError::Zero("number of variants"));
    }
    if depth == 0 {
        return Err(AnalyticError::Zero("number of offered variants"));
    }
    if depth > variants {
        return Err(AnalyticError::TooManyOffered { offered: depth, variants });
    }
    let n = variants as f64;
    let d = depth as f64;
    let mut pmf = Vec::with_capacity(variants);
    let mut survive = 1.0;
    for b in 1..=variants {
        let remaining = n - b as f64 + 1.0;
        pmf.push(survive * d / remaining);
        survive *= (1.0 - d / remaining).max(0.0);
    }
    let mean_exact = pmf.iter().enumerate().map(|(i, q)| (i + 1) as f64 * q).sum();
    let inverse_binomial = (-ln_binomial(variants as u64, depth as u64)).exp();
    Ok(MultiVariantRank {
        pmf,
        mean_exact,
        mean_closed_form: (n + 1.0) / (d + 1.0) - d * inverse_binomial,
    })
}
