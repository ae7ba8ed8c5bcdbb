//! Market primitives: parameters, buyer acceptance rules, sampled costs and the
//! vendor's profit identity.

use rand::Rng;
use thiserror::Error;

use crate::rng;

/// Price of one item of any variant. Monetary units are scaled so that it is 1.
pub const PRICE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("buyer count must be at least 1")]
    NoBuyers,
    #[error("variant count must be at least 1")]
    NoVariants,
    #[error("acceptance scale must lie in (0, 0.5), got {0}")]
    AcceptanceScale(f64),
    #[error("initial cost must be finite and non-negative, got {0}")]
    InitialCost(f64),
    #[error("constant acceptance must lie in [0, 1], got {0}")]
    ConstantAcceptance(f64),
    #[error("{what} has length {got}, expected {expected}")]
    Dimension { what: &'static str, expected: usize, got: usize },
}

/// Scalar parameters of a one-vendor market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    buyers: usize,
    variants: usize,
    accept_prob: f64,
    initial_cost: f64,
}

impl MarketParams {
    /// `buyers` (M), `variants` (N), probability `accept_prob` (p) that a buyer
    /// accepts a random offer, and the charge `initial_cost` (Z) for starting
    /// the production of one variant.
    pub fn new(
        buyers: usize,
        variants: usize,
        accept_prob: f64,
        initial_cost: f64,
    ) -> Result<Self, ModelError> {
        if buyers == 0 {
            return Err(ModelError::NoBuyers);
        }
        if variants == 0 {
            return Err(ModelError::NoVariants);
        }
        if !(accept_prob > 0.0 && accept_prob < 0.5) {
            return Err(ModelError::AcceptanceScale(accept_prob));
        }
        if !(initial_cost.is_finite() && initial_cost >= 0.0) {
            return Err(ModelError::InitialCost(initial_cost));
        }
        Ok(Self { buyers, variants, accept_prob, initial_cost })
    }

    pub fn buyers(&self) -> usize {
        self.buyers
    }

    pub fn variants(&self) -> usize {
        self.variants
    }

    pub fn accept_prob(&self) -> f64 {
        self.accept_prob
    }

    pub fn initial_cost(&self) -> f64 {
        self.initial_cost
    }

    pub fn price(&self) -> f64 {
        PRICE
    }

    /// Expected number of buyers accepting one random offer, `M p`.
    pub fn mean_sale(&self) -> f64 {
        self.buyers as f64 * self.accept_prob
    }

    pub fn with_initial_cost(&self, initial_cost: f64) -> Result<Self, ModelError> {
        Self::new(self.buyers, self.variants, self.accept_prob, initial_cost)
    }

    pub fn with_buyers(&self, buyers: usize) -> Result<Self, ModelError> {
        Self::new(buyers, self.variants, self.accept_prob, self.initial_cost)
    }

    pub fn with_variants(&self, variants: usize) -> Result<Self, ModelError> {
        Self::new(self.buyers, variants, self.accept_prob, self.initial_cost)
    }
}

/// Probability that a buyer accepts a variant rated with cost `x`.
///
/// Every rule is non-increasing on `[0, 1]` with values in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcceptanceFunction {
    /// `1 - x / 2p` below `2p`, zero above.
    Linear(f64),
    /// Accept exactly when `x < p`.
    Step(f64),
    /// Careless buyers: accept with fixed probability regardless of cost.
    Constant(f64),
}

impl AcceptanceFunction {
    pub fn linear(p: f64) -> Result<Self, ModelError> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(ModelError::AcceptanceScale(p));
        }
        Ok(Self::Linear(p))
    }

    pub fn step(p: f64) -> Result<Self, ModelError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(ModelError::AcceptanceScale(p));
        }
        Ok(Self::Step(p))
    }

    pub fn constant(c: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&c) {
            return Err(ModelError::ConstantAcceptance(c));
        }
        Ok(Self::Constant(c))
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Self::Linear(p) => {
                if x <= 2.0 * p {
                    1.0 - x / (2.0 * p)
                } else {
                    0.0
                }
            }
            Self::Step(p) => {
                if x < p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Constant(c) => c,
        }
    }

    /// Decision for a buyer with cost `x` given a uniform draw `u` in `[0, 1)`.
    /// The step rule ignores `u`.
    pub fn accepts(&self, x: f64, u: f64) -> bool {
        match *self {
            Self::Step(p) => x < p,
            _ => u < self.value(x),
        }
    }

    /// Acceptance probability of a random offer when costs are uniform on
    /// `[0, 1]`, i.e. the integral of the rule over the unit interval.
    pub fn mean_acceptance(&self) -> f64 {
        match *self {
            Self::Linear(p) => {
                let edge = (2.0 * p).min(1.0);
                edge - edge * edge / (4.0 * p)
            }
            Self::Step(p) => p.min(1.0),
            Self::Constant(c) => c,
        }
    }

    /// Largest cost that is accepted with positive probability.
    pub fn support_edge(&self) -> f64 {
        match *self {
            Self::Linear(p) => (2.0 * p).min(1.0),
            Self::Step(p) => p.min(1.0),
            Self::Constant(c) => {
                if c > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// True iff a buyer with cost `x` accepts, given the uniform draw `u`.
pub fn accept(f: &AcceptanceFunction, x: f64, u: f64) -> bool {
    f.accepts(x, u)
}

/// Buyer and vendor costs of one sampled market.
///
/// Buyer costs are stored row-major and may be materialised only for the
/// `columns` cheapest variants; simulations that never offer the rest do not
/// need them. Vendor costs cover all variants and are strictly ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    buyers: usize,
    columns: usize,
    buyer_costs: Vec<f64>,
    vendor_costs: Vec<f64>,
}

impl CostMatrix {
    pub fn buyers(&self) -> usize {
        self.buyers
    }

    pub fn variants(&self) -> usize {
        self.vendor_costs.len()
    }

    /// Number of variants for which buyer costs are available.
    pub fn columns(&self) -> usize {
        self.columns
    }

    /// Cost of variant `alpha` (0-based, in vendor order) for buyer `buyer`.
    pub fn buyer_cost(&self, buyer: usize, alpha: usize) -> f64 {
        assert!(alpha < self.columns, "variant {alpha} not materialised");
        self.buyer_costs[buyer * self.columns + alpha]
    }

    pub fn buyer_row(&self, buyer: usize) -> &[f64] {
        &self.buyer_costs[buyer * self.columns..(buyer + 1) * self.columns]
    }

    pub fn vendor_costs(&self) -> &[f64] {
        &self.vendor_costs
    }
}

/// Uniform vendor costs for `variants` variants, sorted strictly ascending.
/// Colliding draws are redrawn.
pub fn sorted_vendor_costs<R: Rng + ?Sized>(variants: usize, rng: &mut R) -> Vec<f64> {
    let mut costs: Vec<f64> = (0..variants).map(|_| rng.random::<f64>()).collect();
    loop {
        costs.sort_by(f64::total_cmp);
        match costs.windows(2).position(|w| w[0] == w[1]) {
            Some(i) => costs[i + 1] = rng.random(),
            None => return costs,
        }
    }
}

/// Uncorrelated market: every cost iid uniform on `[0, 1]`, variants
/// renumbered in ascending vendor cost. Deterministic in `seed`.
pub fn sample_uncorrelated(params: &MarketParams, seed: u64) -> CostMatrix {
    let mut rng = rng::seeded(seed);
    sample_uncorrelated_prefix(params, params.variants(), &mut rng)
}

/// Like [`sample_uncorrelated`] but materialises buyer costs only for the
/// `columns` cheapest variants. Buyer costs are independent of the vendor's,
/// so the prefix has the same law as the corresponding block of a full sample.
pub fn sample_uncorrelated_prefix<R: Rng + ?Sized>(
    params: &MarketParams,
    columns: usize,
    rng: &mut R,
) -> CostMatrix {
    let columns = columns.min(params.variants());
    let vendor_costs = sorted_vendor_costs(params.variants(), rng);
    let buyer_costs = (0..params.buyers() * columns).map(|_| rng.random::<f64>()).collect();
    CostMatrix { buyers: params.buyers(), columns, buyer_costs, vendor_costs }
}

/// Vendor profit `sum_a n_a (1 - y_a) - k Z` for the `k` cheapest variants.
pub fn profit(
    counts: &[u64],
    vendor_costs: &[f64],
    k: usize,
    initial_cost: f64,
) -> Result<f64, ModelError> {
    if counts.len() != k {
        return Err(ModelError::Dimension { what: "sales counts", expected: k, got: counts.len() });
    }
    if k > vendor_costs.len() {
        return Err(ModelError::Dimension {
            what: "vendor costs",
            expected: k,
            got: vendor_costs.len(),
        });
    }
    let revenue: f64 =
        counts.iter().zip(vendor_costs).map(|(&n, &y)| n as f64 * (PRICE - y)).sum();
    Ok(revenue - k as f64 * initial_cost)
}

/// Items sold per offered variant together with the resulting profit.
#[derive(Debug, Clone, PartialEq)]
pub struct SaleOutcome {
    counts: Vec<u64>,
    profit: f64,
}

impl SaleOutcome {
    pub fn tally(
        counts: Vec<u64>,
        vendor_costs: &[f64],
        initial_cost: f64,
    ) -> Result<Self, ModelError> {
        let profit = profit(&counts, vendor_costs, counts.len(), initial_cost)?;
        Ok(Self { counts, profit })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn offered(&self) -> usize {
        self.counts.len()
    }

    pub fn total_sold(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn profit(&self) -> f64 {
        self.profit
    }
}
