//! Rank correlation between cost lists.
//!
//! Kendall's tau and Pearson's r², the three-list tau inequality, the size
//! bound for sets of lists with a common pairwise tau, three generators of
//! correlated cost lists and the expected tau each of them produces.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("lists have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("lists need at least {needed} entries, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("tie detected in the {0} list")]
    Tie(&'static str),
    #[error("non-finite value in the {0} list")]
    NotFinite(&'static str),
    #[error("the {0} list has zero variance")]
    ZeroVariance(&'static str),
    #[error("tau must lie in [-1, 1], got {0}")]
    TauRange(f64),
    #[error("binding parameter must lie in [0, 1], got {0}")]
    Binding(f64),
    #[error("exhaustive search supports list lengths 2..=5, got {0}")]
    SearchSize(usize),
    #[error("could not break ties after repeated redraws")]
    PersistentTies,
}

fn check_pair(xs: &[f64], ys: &[f64], needed: usize) -> Result<usize, CorrelationError> {
    if xs.len() != ys.len() {
        return Err(CorrelationError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < needed {
        return Err(CorrelationError::TooShort { needed, got: xs.len() });
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(CorrelationError::NotFinite("first"));
    }
    if ys.iter().any(|v| !v.is_finite()) {
        return Err(CorrelationError::NotFinite("second"));
    }
    Ok(xs.len())
}

/// Counts inversions of `seq` by bottom-up merge sort; `seq` ends up sorted.
fn count_inversions(seq: &mut [f64]) -> u64 {
    let n = seq.len();
    let mut buf = vec![0.0; n];
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if seq[j] < seq[i] {
                    inversions += (mid - i) as u64;
                    buf[k] = seq[j];
                    j += 1;
                } else {
                    buf[k] = seq[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
            k += mid - i;
            buf[k..k + end - j].copy_from_slice(&seq[j..end]);
            start = end;
        }
        seq.copy_from_slice(&buf);
        width *= 2;
    }
    inversions
}

/// Kendall's tau of two tie-free lists, `2/(N(N-1)) sum_{a<b} sgn[(x_a-x_b)(y_a-y_b)]`.
///
/// Runs in `O(N log N)`: pairs are ordered by `xs` and discordant pairs are
/// the inversions of the induced order of `ys`.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64, CorrelationError> {
    let n = check_pair(xs, ys, 2)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    if order.windows(2).any(|w| xs[w[0]] == xs[w[1]]) {
        return Err(CorrelationError::Tie("first"));
    }
    let mut seq: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let discordant = count_inversions(&mut seq);
    if seq.windows(2).any(|w| w[0] == w[1]) {
        return Err(CorrelationError::Tie("second"));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok((pairs - 2.0 * discordant as f64) / pairs)
}

/// Squared Pearson correlation coefficient.
pub fn pearson_r2(xs: &[f64], ys: &[f64]) -> Result<f64, CorrelationError> {
    let n = check_pair(xs, ys, 2)? as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(CorrelationError::ZeroVariance("first"));
    }
    if syy == 0.0 {
        return Err(CorrelationError::ZeroVariance("second"));
    }
    Ok((sxy * sxy / (sxx * syy)).min(1.0))
}

/// Range allowed for `tau_23` once `tau_12` and `tau_13` are known:
/// `|tau_12 + tau_13| - 1 <= tau_23 <= 1 - |tau_12 - tau_13|`.
pub fn tau_triangle_bounds(tau12: f64, tau13: f64) -> (f64, f64) {
    ((tau12 + tau13).abs() - 1.0, 1.0 - (tau12 - tau13).abs())
}

/// Whether three pairwise taus are mutually consistent, up to rounding.
pub fn satisfies_triangle(tau12: f64, tau13: f64, tau23: f64) -> bool {
    const SLACK: f64 = 1e-12;
    let (low, high) = tau_triangle_bounds(tau12, tau13);
    tau23 >= low - SLACK && tau23 <= high + SLACK
}

/// Which closed form of the equicorrelated-set bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundForm {
    /// `2 + 2 log2(w)`: reproduces the six-list construction at `N = 5`, `tau0 = 0.2`.
    #[default]
    Halving,
    /// `2 + log2(w)`, kept for comparison. Exhaustive search exceeds it at `N = 5`.
    SingleLog,
}

/// Upper bound on the number of lists of length `N` with pairwise tau `tau0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListBound {
    Finite(usize),
    /// `tau0 = 1`: any number of identical lists.
    Unbounded,
}

/// Size bound for a set of lists sharing the pairwise tau `tau0`.
///
/// With `w = (1 - tau0) N (N - 1) / 4` the halving argument gives
/// `2 + 2 log2 w`; for `tau0 < 0` the pair budget additionally caps it at
/// `2 log2((1 - tau0) / -tau0)`. The result is floored and never below 1.
pub fn max_equicorrelated(
    tau0: f64,
    n: usize,
    form: BoundForm,
) -> Result<ListBound, CorrelationError> {
    if !(-1.0..=1.0).contains(&tau0) {
        return Err(CorrelationError::TauRange(tau0));
    }
    if n < 2 {
        return Err(CorrelationError::TooShort { needed: 2, got: n });
    }
    if tau0 == 1.0 {
        return Ok(ListBound::Unbounded);
    }
    // Absorbs rounding when the bound is an exact integer (e.g. w = 4).
    const FLOOR_SLACK: f64 = 1e-9;
    let w = (1.0 - tau0) * (n * (n - 1)) as f64 / 4.0;
    let factor = match form {
        BoundForm::Halving => 2.0,
        BoundForm::SingleLog => 1.0,
    };
    let mut bound = 2.0 + factor * w.log2();
    if tau0 < 0.0 {
        bound = bound.min(2.0 * ((1.0 - tau0) / -tau0).log2());
    }
    let count = (bound + FLOOR_SLACK).floor().max(1.0);
    Ok(ListBound::Finite(count as usize))
}

/// Largest set of permutations of `0..n` with pairwise Kendall tau exactly
/// `tau0`, found by exhaustive clique search. Limited to `n <= 5`.
pub fn exhaustive_equicorrelated(n: usize, tau0: f64) -> Result<Vec<Vec<usize>>, CorrelationError> {
    if !(2..=5).contains(&n) {
        return Err(CorrelationError::SearchSize(n));
    }
    if !(-1.0..=1.0).contains(&tau0) {
        return Err(CorrelationError::TauRange(tau0));
    }
    let perms = permutations(n);
    let pairs = n * (n - 1) / 2;
    let target = (1.0 - tau0) * pairs as f64 / 2.0;
    let discordant = target.round();
    if (target - discordant).abs() > 1e-9 {
        // No two distinct lists reach this tau; any single list qualifies.
        return Ok(vec![perms[0].clone()]);
    }
    let discordant = discordant as usize;

    let count = perms.len();
    let mut adjacency = vec![0u128; count];
    for a in 0..count {
        for b in a + 1..count {
            if discordant_pairs(&perms[a], &perms[b]) == discordant {
                adjacency[a] |= 1 << b;
                adjacency[b] |= 1 << a;
            }
        }
    }
    let everyone = if count == 128 { u128::MAX } else { (1u128 << count) - 1 };
    let mut best = 0u128;
    bron_kerbosch(0, everyone, 0, &adjacency, &mut best);
    Ok((0..count).filter(|&i| best >> i & 1 == 1).map(|i| perms[i].clone()).collect())
}

fn bron_kerbosch(r: u128, mut p: u128, mut x: u128, adj: &[u128], best: &mut u128) {
    if p == 0 && x == 0 {
        if r.count_ones() > best.count_ones() {
            *best = r;
        }
        return;
    }
    if r.count_ones() + p.count_ones() <= best.count_ones() {
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u128 << v;
        bron_kerbosch(r | bit, p & adj[v], x & adj[v], adj, best);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn discordant_pairs(a: &[usize], b: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] < a[j]) != (b[i] < b[j]) {
                count += 1;
            }
        }
    }
    count
}

/// Direction of the buyer-vendor coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

/// Binding strength `t` in `[0, 1]` and direction `s` of the shared component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    binding: f64,
    sign: Sign,
}

impl Coupling {
    pub fn new(binding: f64, sign: Sign) -> Result<Self, CorrelationError> {
        if !(0.0..=1.0).contains(&binding) {
            return Err(CorrelationError::Binding(binding));
        }
        Ok(Self { binding, sign })
    }

    pub fn uncorrelated() -> Self {
        Self { binding: 0.0, sign: Sign::Positive }
    }

    pub fn binding(&self) -> f64 {
        self.binding
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// `u = t / (1 - t)`; infinite at `t = 1`.
    pub fn odds(&self) -> f64 {
        if self.binding >= 1.0 {
            f64::INFINITY
        } else {
            self.binding / (1.0 - self.binding)
        }
    }
}

/// Recipe for correlated cost lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Scheme A: `x = (1-t) a + t c`, `y = (1-t) b + s t c + t(1-s)/2` with
    /// uniform `a, b, c`. The marginals are not uniform for `0 < t < 1`.
    Mixture,
    /// Scheme B: vendor costs on the grid `(alpha-1)/(N-1)`, buyer costs
    /// `1/2 + s t (y - 1/2) + (1-t)(u - 1/2)`. Uniform marginals.
    Graded,
    /// Scheme C: `sqrt(1-t) a + sqrt(t) c` with standard normal components,
    /// mapped to `(0, 1)` through the normal CDF.
    Gaussian,
}

/// The two kinds of list pairs in an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListPair {
    /// Two buyers.
    BuyerBuyer,
    /// A buyer and the vendor.
    BuyerVendor,
}

/// Standard normal CDF, accurate to well below 1e-7 across the real line.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Vendor-side draw of one market: vendor costs plus the component shared
/// with every buyer, both indexed by variant.
#[derive(Debug, Clone, PartialEq)]
pub struct VendorSide {
    pub costs: Vec<f64>,
    pub shared: Vec<f64>,
}

impl VendorSide {
    /// Renumbers variants so that vendor costs ascend.
    pub fn sorted(self) -> Self {
        let mut order: Vec<usize> = (0..self.costs.len()).collect();
        order.sort_by(|&a, &b| self.costs[a].total_cmp(&self.costs[b]));
        Self {
            costs: order.iter().map(|&i| self.costs[i]).collect(),
            shared: order.iter().map(|&i| self.shared[i]).collect(),
        }
    }
}

impl Scheme {
    fn vendor_cost<R: Rng + ?Sized>(
        &self,
        shared: f64,
        coupling: Coupling,
        rng: &mut R,
    ) -> f64 {
        let t = coupling.binding;
        let s = coupling.sign.value();
        match self {
            Scheme::Mixture => {
                let own: f64 = rng.random();
                ((1.0 - t) * own + s * t * shared + 0.5 * t * (1.0 - s)).clamp(0.0, 1.0)
            }
            Scheme::Graded => shared,
            Scheme::Gaussian => {
                let own: f64 = rng.sample(StandardNormal);
                normal_cdf((1.0 - t).sqrt() * own + s * t.sqrt() * shared)
            }
        }
    }

    /// Draws the vendor list of a market with `variants` variants.
    pub fn draw_vendor<R: Rng + ?Sized>(
        &self,
        variants: usize,
        coupling: Coupling,
        rng: &mut R,
    ) -> Result<VendorSide, CorrelationError> {
        let mut shared: Vec<f64> = match self {
            Scheme::Mixture => (0..variants).map(|_| rng.random()).collect(),
            Scheme::Graded => (0..variants).map(|a| grid_position(a, variants)).collect(),
            Scheme::Gaussian => (0..variants).map(|_| rng.sample(StandardNormal)).collect(),
        };
        if *self != Scheme::Graded {
            let gaussian = *self == Scheme::Gaussian;
            let fresh = |rng: &mut R| if gaussian { rng.sample(StandardNormal) } else { rng.random() };
            if !redraw_duplicates(&mut shared, |_| fresh(rng)) {
                return Err(CorrelationError::PersistentTies);
            }
        }
        let mut costs: Vec<f64> =
            shared.iter().map(|&c| self.vendor_cost(c, coupling, rng)).collect();
        if !redraw_duplicates(&mut costs, |i| self.vendor_cost(shared[i], coupling, rng)) {
            return Err(CorrelationError::PersistentTies);
        }
        Ok(VendorSide { costs, shared })
    }

    /// Cost of one variant for one buyer, given the variant's shared component.
    pub fn draw_buyer_cost<R: Rng + ?Sized>(
        &self,
        shared: f64,
        coupling: Coupling,
        rng: &mut R,
    ) -> f64 {
        let t = coupling.binding;
        match self {
            Scheme::Mixture => {
                let own: f64 = rng.random();
                ((1.0 - t) * own + t * shared).clamp(0.0, 1.0)
            }
            Scheme::Graded => {
                let own: f64 = rng.random();
                let s = coupling.sign.value();
                (0.5 + s * t * (shared - 0.5) + (1.0 - t) * (own - 0.5)).clamp(0.0, 1.0)
            }
            Scheme::Gaussian => {
                let own: f64 = rng.sample(StandardNormal);
                normal_cdf((1.0 - t).sqrt() * own + t.sqrt() * shared)
            }
        }
    }
}

/// Position `(alpha-1)/(N-1)` of 0-based variant `alpha` on the unit grid.
pub fn grid_position(alpha: usize, variants: usize) -> f64 {
    if variants <= 1 {
        0.0
    } else {
        alpha as f64 / (variants - 1) as f64
    }
}

/// Replaces duplicated entries using `redraw(index)` until all values are
/// distinct. Gives up after a bounded number of rounds.
fn redraw_duplicates(values: &mut [f64], mut redraw: impl FnMut(usize) -> f64) -> bool {
    const ROUNDS: usize = 64;
    for _ in 0..ROUNDS {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let clashes: Vec<usize> =
            order.windows(2).filter(|w| values[w[0]] == values[w[1]]).map(|w| w[1]).collect();
        if clashes.is_empty() {
            return true;
        }
        for i in clashes {
            values[i] = redraw(i);
        }
    }
    false
}

/// Buyer lists and the vendor list of one correlated market.
#[derive(Debug, Clone, PartialEq)]
pub struct ListEnsemble {
    scheme: Scheme,
    coupling: Coupling,
    buyer_lists: Vec<Vec<f64>>,
    vendor_list: Vec<f64>,
}

impl ListEnsemble {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn buyer_lists(&self) -> &[Vec<f64>] {
        &self.buyer_lists
    }

    pub fn vendor_list(&self) -> &[f64] {
        &self.vendor_list
    }

    pub fn tau(&self, pair: ListPair) -> Result<f64, CorrelationError> {
        match pair {
            ListPair::BuyerBuyer => kendall_tau(&self.buyer_lists[0], &self.buyer_lists[1]),
            ListPair::BuyerVendor => kendall_tau(&self.buyer_lists[0], &self.vendor_list),
        }
    }
}

/// Generates `buyers` lists and one vendor list of length `variants`.
/// Variants keep their generation order; no list is sorted.
pub fn generate(
    scheme: Scheme,
    buyers: usize,
    variants: usize,
    coupling: Coupling,
    seed: u64,
) -> Result<ListEnsemble, CorrelationError> {
    let mut rng = rng::seeded(seed);
    let vendor = scheme.draw_vendor(variants, coupling, &mut rng)?;
    let mut buyer_lists = Vec::with_capacity(buyers);
    for _ in 0..buyers {
        let mut list: Vec<f64> = vendor
            .shared
            .iter()
            .map(|&c| scheme.draw_buyer_cost(c, coupling, &mut rng))
            .collect();
        if !redraw_duplicates(&mut list, |i| {
            scheme.draw_buyer_cost(vendor.shared[i], coupling, &mut rng)
        }) {
            return Err(CorrelationError::PersistentTies);
        }
        buyer_lists.push(list);
    }
    Ok(ListEnsemble { scheme, coupling, buyer_lists, vendor_list: vendor.costs })
}

pub fn generate_scheme_a(
    buyers: usize,
    variants: usize,
    coupling: Coupling,
    seed: u64,
) -> Result<ListEnsemble, CorrelationError> {
    generate(Scheme::Mixture, buyers, variants, coupling, seed)
}

pub fn generate_scheme_b(
    buyers: usize,
    variants: usize,
    coupling: Coupling,
    seed: u64,
) -> Result<ListEnsemble, CorrelationError> {
    generate(Scheme::Graded, buyers, variants, coupling, seed)
}

pub fn generate_scheme_c(
    buyers: usize,
    variants: usize,
    coupling: Coupling,
    seed: u64,
) -> Result<ListEnsemble, CorrelationError> {
    generate(Scheme::Gaussian, buyers, variants, coupling, seed)
}

/// Expected buyer-buyer tau shared by the mixture and graded schemes,
/// piecewise in `u = t/(1-t)`.
fn uniform_mixture_tau(u: f64) -> f64 {
    if u.is_infinite() {
        1.0
    } else if u <= 1.0 {
        u * u / 15.0 * (10.0 - 6.0 * u + u * u)
    } else {
        (15.0 - 14.0 / u + 4.0 / (u * u)) / 15.0
    }
}

/// Expected Kendall tau between lists of the given kind, in the limit of long lists.
pub fn expected_tau(scheme: Scheme, coupling: Coupling, pair: ListPair) -> f64 {
    let u = coupling.odds();
    let s = coupling.sign.value();
    match (scheme, pair) {
        (Scheme::Mixture | Scheme::Graded, ListPair::BuyerBuyer) => uniform_mixture_tau(u),
        (Scheme::Mixture, ListPair::BuyerVendor) => s * uniform_mixture_tau(u),
        (Scheme::Graded, ListPair::BuyerVendor) => {
            let magnitude = if u.is_infinite() {
                1.0
            } else if u <= 1.0 {
                (4.0 * u - u * u) / 6.0
            } else {
                (6.0 - 4.0 / u + 1.0 / (u * u)) / 6.0
            };
            s * magnitude
        }
        (Scheme::Gaussian, ListPair::BuyerBuyer) => 2.0 / PI * coupling.binding.asin(),
        (Scheme::Gaussian, ListPair::BuyerVendor) => s * 2.0 / PI * coupling.binding.asin(),
    }
}

/// Large-N variance of Kendall's tau estimated from one pair of lists:
/// `(4/N) (<s_ag s_gb> - <s_ab>^2)` where `s_ab` is the concordance sign of
/// pair `(a, b)`. The mean over ordered triples of distinct indices is
/// computed exactly in `O(N^2)` from per-index concordance sums. Clamped at 0.
pub fn tau_variance_estimate(xs: &[f64], ys: &[f64]) -> Result<f64, CorrelationError> {
    let n = check_pair(xs, ys, 3)?;
    let mut row_sums = vec![0i64; n];
    let mut total: i64 = 0;
    for a in 0..n {
        for b in a + 1..n {
            let dx = xs[a] - xs[b];
            let dy = ys[a] - ys[b];
            if dx == 0.0 {
                return Err(CorrelationError::Tie("first"));
            }
            if dy == 0.0 {
                return Err(CorrelationError::Tie("second"));
            }
            let sign: i64 = if (dx > 0.0) == (dy > 0.0) { 1 } else { -1 };
            row_sums[a] += sign;
            row_sums[b] += sign;
            total += sign;
        }
    }
    let nf = n as f64;
    let pair_mean = total as f64 / (nf * (nf - 1.0) / 2.0);
    // sum over ordered distinct triples of s_ag s_gb = sum_g (S_g^2 - (N-1)).
    let triple_sum: f64 = row_sums.iter().map(|&s| (s * s) as f64 - (nf - 1.0)).sum();
    let triple_mean = triple_sum / (nf * (nf - 1.0) * (nf - 2.0));
    Ok((4.0 / nf * (triple_mean - pair_mean * pair_mean)).max(0.0))
}

/// Kendall tau of a list pair together with its estimated sampling variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub tau: f64,
    pub variance: f64,
    pub n_pairs: usize,
}

impl TauEstimate {
    pub fn from_lists(xs: &[f64], ys: &[f64]) -> Result<Self, CorrelationError> {
        let tau = kendall_tau(xs, ys)?;
        let variance = tau_variance_estimate(xs, ys)?;
        Ok(Self { tau, variance, n_pairs: xs.len() * (xs.len() - 1) / 2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::stats::{ks_critical, ks_uniform, Accumulator};
    use proptest::prelude::*;

    /// Direct O(N^2) definition, used as the oracle for the merge-sort route.
    fn tau_by_pairs(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len();
        let mut sum = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                sum += ((xs[a] - xs[b]) * (ys[a] - ys[b])).signum();
            }
        }
        2.0 * sum / (n * (n - 1)) as f64
    }

    fn coupling(t: f64, s: Sign) -> Coupling {
        Coupling::new(t, s).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let lists = [[3.0, 2.0, 1.0], [2.0, 1.0, 3.0], [1.0, 3.0, 2.0]];
        for i in 0..3 {
            for j in i + 1..3 {
                let tau = kendall_tau(&lists[i], &lists[j]).unwrap();
                assert!((tau + 1.0 / 3.0).abs() < 1e-15, "{i}{j}: {tau}");
            }
        }
    }

    #[test]
    fn tau_errors() {
        assert_eq!(kendall_tau(&[1.0, 2.0], &[1.0]), Err(CorrelationError::LengthMismatch(2, 1)));
        assert_eq!(kendall_tau(&[1.0, 1.0], &[1.0, 2.0]), Err(CorrelationError::Tie("first")));
        assert_eq!(kendall_tau(&[1.0, 2.0], &[5.0, 5.0]), Err(CorrelationError::Tie("second")));
        assert!(matches!(kendall_tau(&[1.0], &[1.0]), Err(CorrelationError::TooShort { .. })));
        assert_eq!(
            kendall_tau(&[1.0, f64::NAN], &[1.0, 2.0]),
            Err(CorrelationError::NotFinite("first"))
        );
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson_r2(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson_r2(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        // cov = 4, var = 5 each: r^2 = 16/25.
        let r2 = pearson_r2(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r2 - 0.64).abs() < 1e-12);
        assert_eq!(
            pearson_r2(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(CorrelationError::ZeroVariance("first"))
        );
    }

    #[test]
    fn triangle_bound_examples() {
        assert_eq!(tau_triangle_bounds(1.0, 1.0), (1.0, 1.0));
        assert_eq!(tau_triangle_bounds(0.0, 0.0), (-1.0, 1.0));
        for tau13 in [-0.7, -0.2, 0.0, 0.4, 1.0] {
            let (low, high) = tau_triangle_bounds(-1.0, tau13);
            assert!((low + tau13).abs() < 1e-15 && (high + tau13).abs() < 1e-15);
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(max_equicorrelated(0.2, 5, BoundForm::Halving).unwrap(), ListBound::Finite(6));
        assert_eq!(max_equicorrelated(0.2, 5, BoundForm::SingleLog).unwrap(), ListBound::Finite(4));
        for n in [2, 3, 10, 2000] {
            assert_eq!(max_equicorrelated(-1.0, n, BoundForm::Halving).unwrap(), ListBound::Finite(2));
        }
        let ListBound::Finite(m) = max_equicorrelated(-1.0 / 3.0, 3, BoundForm::Halving).unwrap()
        else {
            panic!("finite bound expected")
        };
        assert!(m >= 3);
        assert_eq!(max_equicorrelated(1.0, 7, BoundForm::Halving).unwrap(), ListBound::Unbounded);
        assert_eq!(max_equicorrelated(1.2, 7, BoundForm::Halving), Err(CorrelationError::TauRange(1.2)));
    }

    #[test]
    fn cyclic_triple_is_a_maximal_set_at_length_three() {
        let set = exhaustive_equicorrelated(3, -1.0 / 3.0).unwrap();
        assert_eq!(set.len(), 3);
        let as_f64: Vec<Vec<f64>> =
            set.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let tau = kendall_tau(&as_f64[i], &as_f64[j]).unwrap();
                assert!((tau + 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exhaustive_search_respects_halving_bound() {
        // Exhaustive maxima frozen from an independent clique enumeration.
        let cases = [
            (4, -1.0, 2),
            (4, -1.0 / 3.0, 3),
            (4, 0.0, 2),
            (4, 0.5, 1),
            (5, 0.2, 4),
            (5, -0.2, 5),
            (5, 0.6, 4),
        ];
        for (n, tau0, expected) in cases {
            let found = exhaustive_equicorrelated(n, tau0).unwrap().len();
            assert_eq!(found, expected, "n={n} tau0={tau0}");
            let ListBound::Finite(bound) = max_equicorrelated(tau0, n, BoundForm::Halving).unwrap()
            else {
                panic!()
            };
            assert!(found <= bound);
        }
        // The single-log variant is violated by real sets.
        let ListBound::Finite(single) = max_equicorrelated(0.6, 5, BoundForm::SingleLog).unwrap()
        else {
            panic!()
        };
        assert!(exhaustive_equicorrelated(5, 0.6).unwrap().len() > single);
    }

    #[test]
    fn scheme_limits() {
        let n = 300;
        let ind = generate_scheme_a(2, n, coupling(1.0, Sign::Positive), 1).unwrap();
        assert_eq!(ind.buyer_lists()[0], ind.vendor_list());
        assert_eq!(ind.tau(ListPair::BuyerVendor).unwrap(), 1.0);

        let graded = generate_scheme_b(2, n, coupling(1.0, Sign::Positive), 2).unwrap();
        for (x, y) in graded.buyer_lists()[0].iter().zip(graded.vendor_list()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(graded.tau(ListPair::BuyerVendor).unwrap(), 1.0);

        let gauss = generate_scheme_c(2, n, coupling(1.0, Sign::Negative), 3).unwrap();
        assert_eq!(gauss.tau(ListPair::BuyerVendor).unwrap(), -1.0);
        assert_eq!(gauss.tau(ListPair::BuyerBuyer).unwrap(), 1.0);

        let anti = generate_scheme_a(1, n, coupling(1.0, Sign::Negative), 4).unwrap();
        assert_eq!(anti.tau(ListPair::BuyerVendor).unwrap(), -1.0);
    }

    #[test]
    fn uncorrelated_schemes_ignore_vendor_index() {
        // At t = 0 the graded buyer costs are the raw uniforms, unrelated to alpha.
        let e = generate_scheme_b(1, 5000, Coupling::uncorrelated(), 9).unwrap();
        let first: Accumulator = e.buyer_lists()[0][..2500].iter().copied().collect();
        let last: Accumulator = e.buyer_lists()[0][2500..].iter().copied().collect();
        let diff = (first.mean() - last.mean()).abs();
        assert!(diff < 4.0 * (first.std_error().powi(2) + last.std_error().powi(2)).sqrt());
    }

    #[test]
    fn expected_tau_examples() {
        for scheme in [Scheme::Mixture, Scheme::Graded, Scheme::Gaussian] {
            for pair in [ListPair::BuyerBuyer, ListPair::BuyerVendor] {
                assert_eq!(expected_tau(scheme, Coupling::uncorrelated(), pair), 0.0);
                let full = expected_tau(scheme, coupling(1.0, Sign::Negative), ListPair::BuyerVendor);
                assert!((full + 1.0).abs() < 1e-15);
            }
        }
        let half = coupling(0.5, Sign::Positive);
        assert!((expected_tau(Scheme::Mixture, half, ListPair::BuyerBuyer) - 1.0 / 3.0).abs() < 1e-15);
        assert!((expected_tau(Scheme::Graded, half, ListPair::BuyerVendor) - 0.5).abs() < 1e-15);
        assert!((expected_tau(Scheme::Gaussian, half, ListPair::BuyerBuyer) - 1.0 / 3.0).abs() < 1e-15);
        let neg = coupling(0.3, Sign::Negative);
        assert_eq!(
            expected_tau(Scheme::Mixture, neg, ListPair::BuyerVendor),
            -expected_tau(Scheme::Mixture, neg, ListPair::BuyerBuyer)
        );
    }

    #[test]
    fn graded_and_mixture_share_buyer_form() {
        for i in 0..=100 {
            let c = coupling(i as f64 / 100.0, Sign::Positive);
            assert_eq!(
                expected_tau(Scheme::Mixture, c, ListPair::BuyerBuyer),
                expected_tau(Scheme::Graded, c, ListPair::BuyerBuyer)
            );
        }
    }

    #[test]
    fn expected_tau_is_continuous_and_monotone() {
        for scheme in [Scheme::Mixture, Scheme::Graded, Scheme::Gaussian] {
            for pair in [ListPair::BuyerBuyer, ListPair::BuyerVendor] {
                let mut prev = 0.0;
                for i in 0..=1000 {
                    let v = expected_tau(scheme, coupling(i as f64 / 1000.0, Sign::Positive), pair);
                    assert!(v >= prev - 1e-12 && v - prev < 0.05, "{scheme:?} {pair:?} {i}");
                    prev = v;
                }
                assert!((prev - 1.0).abs() < 1e-12);
            }
        }
    }

    /// Monte Carlo oracle: integrates the pair-concordance probability of the
    /// mixture scheme directly, independent of the closed form.
    #[test]
    fn mixture_closed_form_matches_direct_integration() {
        let mut rng = rng::seeded(77);
        for t in [0.2, 0.5, 0.7] {
            let acc: Accumulator = (0..400_000)
                .map(|_| {
                    let mut r = || rng.random::<f64>();
                    let (ca, cb) = (r(), r());
                    let x = (1.0 - t) * (r() - r()) + t * (ca - cb);
                    let z = (1.0 - t) * (r() - r()) + t * (ca - cb);
                    (x * z).signum()
                })
                .collect();
            let closed = expected_tau(Scheme::Mixture, coupling(t, Sign::Positive), ListPair::BuyerBuyer);
            assert!(acc.estimate().z_score(closed) < 4.0, "t={t}: {:?} vs {closed}", acc.estimate());
        }
    }

    #[test]
    fn sample_tau_at_half_binding() {
        let cases = [
            (Scheme::Mixture, ListPair::BuyerBuyer, 1.0 / 3.0),
            (Scheme::Graded, ListPair::BuyerVendor, 0.5),
            (Scheme::Gaussian, ListPair::BuyerBuyer, 1.0 / 3.0),
        ];
        for (scheme, pair, target) in cases {
            let acc: Accumulator = (0..60)
                .map(|r| {
                    generate(scheme, 2, 2000, coupling(0.5, Sign::Positive), 1000 + r)
                        .unwrap()
                        .tau(pair)
                        .unwrap()
                })
                .collect();
            assert!(acc.estimate().z_score(target) < 3.0, "{scheme:?}: {:?}", acc.estimate());
        }
    }

    /// CDF of `t V + (1-t) U` with `U, V` independent uniforms: a trapezoid.
    fn graded_marginal_cdf(x: f64, t: f64) -> f64 {
        let (a, b) = if t < 0.5 { (t, 1.0 - t) } else { (1.0 - t, t) };
        if a == 0.0 {
            return x.clamp(0.0, 1.0);
        }
        if x <= a {
            x * x / (2.0 * a * b)
        } else if x <= b {
            (2.0 * x - a) / (2.0 * b)
        } else {
            1.0 - (1.0 - x).powi(2) / (2.0 * a * b)
        }
    }

    #[test]
    fn graded_marginal_is_trapezoidal() {
        for t in [0.0, 0.3, 0.7, 1.0] {
            for sign in [Sign::Positive, Sign::Negative] {
                let e = generate_scheme_b(10, 500, coupling(t, sign), 21).unwrap();
                let pooled: Vec<f64> = e.buyer_lists().concat();
                assert!(pooled.iter().all(|v| (0.0..=1.0).contains(v)));
                let critical = ks_critical(pooled.len(), 0.01);
                let mut transformed: Vec<f64> =
                    pooled.iter().map(|&x| graded_marginal_cdf(x, t)).collect();
                let d = ks_uniform(&mut transformed);
                assert!(d < critical, "t={t} {sign:?}: D={d}");
                // Uniform only at the end points of the binding range.
                let d_uniform = ks_uniform(&mut pooled.clone());
                assert_eq!(d_uniform < critical, t == 0.0 || t == 1.0, "t={t}: D={d_uniform}");
            }
        }
    }

    #[test]
    fn variance_estimate_limits() {
        let e = generate_scheme_a(2, 200, coupling(1.0, Sign::Positive), 5).unwrap();
        let est = TauEstimate::from_lists(&e.buyer_lists()[0], &e.buyer_lists()[1]).unwrap();
        assert_eq!(est.tau, 1.0);
        assert_eq!(est.variance, 0.0);
        assert_eq!(est.n_pairs, 200 * 199 / 2);
    }

    #[test]
    fn variance_estimate_tracks_sample_variance() {
        let n = 100;
        let mut taus = Accumulator::new();
        let mut estimates = Accumulator::new();
        for r in 0..10_000 {
            let e = generate_scheme_a(2, n, Coupling::uncorrelated(), 50_000 + r).unwrap();
            let (x, z) = (&e.buyer_lists()[0], &e.buyer_lists()[1]);
            taus.push(kendall_tau(x, z).unwrap());
            if r < 500 {
                estimates.push(tau_variance_estimate(x, z).unwrap());
            }
        }
        let direct = taus.variance();
        // Exact null variance 2(2N+5)/(9N(N-1)).
        let exact = 2.0 * (2.0 * n as f64 + 5.0) / (9.0 * (n * (n - 1)) as f64);
        assert!((direct / exact - 1.0).abs() < 0.1, "{direct} vs {exact}");
        let ratio = estimates.mean() / direct;
        assert!((0.5..=2.0).contains(&ratio), "estimate {} vs direct {direct}", estimates.mean());
    }

    #[test]
    fn variance_estimate_scales_inversely_with_length() {
        let mean_estimate = |n: usize| -> f64 {
            (0..200)
                .map(|r| {
                    let e = generate_scheme_a(2, n, Coupling::uncorrelated(), 7_000 + r).unwrap();
                    tau_variance_estimate(&e.buyer_lists()[0], &e.buyer_lists()[1]).unwrap()
                })
                .sum::<f64>()
                / 200.0
        };
        let ratio = mean_estimate(150) / mean_estimate(300);
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        // High-precision references.
        for (z, phi) in [
            (1.0, 0.841_344_746_068_542_9),
            (-3.0, 0.001_349_898_031_630_094_5),
            (0.3, 0.617_911_422_188_952_6),
            (5.0, 0.999_999_713_348_428_1),
        ] {
            assert!((normal_cdf(z) - phi).abs() < 1e-9, "{z}: {}", normal_cdf(z));
        }
    }

    fn arb_list(len: usize) -> impl Strategy<Value = Vec<f64>> {
        Just((0..len).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|v| v.into_iter().map(|i| i as f64 + 0.5).collect())
    }

    proptest! {
        #[test]
        fn merge_sort_tau_matches_pairwise_definition(
            (xs, ys) in (2usize..60).prop_flat_map(|n| (arb_list(n), arb_list(n)))
        ) {
            let fast = kendall_tau(&xs, &ys).unwrap();
            prop_assert!((fast - tau_by_pairs(&xs, &ys)).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&fast));
        }

        #[test]
        fn tau_is_rank_invariant(
            (xs, ys) in (2usize..60).prop_flat_map(|n| (arb_list(n), arb_list(n)))
        ) {
            let tau = kendall_tau(&xs, &ys).unwrap();
            let cubed: Vec<f64> = xs.iter().map(|v| v.powi(3)).collect();
            let exped: Vec<f64> = ys.iter().map(|v| (v / 10.0).exp()).collect();
            prop_assert_eq!(kendall_tau(&cubed, &ys).unwrap(), tau);
            prop_assert_eq!(kendall_tau(&xs, &exped).unwrap(), tau);
        }

        #[test]
        fn triangle_holds_for_generated_triples(
            seed in any::<u64>(),
            t in 0.0f64..=1.0,
            scheme in prop::sample::select(vec![Scheme::Mixture, Scheme::Graded, Scheme::Gaussian]),
            n in 3usize..40,
        ) {
            let e = generate(scheme, 3, n, coupling(t, Sign::Positive), seed).unwrap();
            let l = e.buyer_lists();
            let t12 = kendall_tau(&l[0], &l[1]).unwrap();
            let t13 = kendall_tau(&l[0], &l[2]).unwrap();
            let t23 = kendall_tau(&l[1], &l[2]).unwrap();
            prop_assert!(satisfies_triangle(t12, t13, t23));
            let (low, high) = tau_triangle_bounds(t12, t13);
            prop_assert!(low <= high + 1e-12);
        }

        #[test]
        fn generated_lists_are_in_range_and_distinct(
            seed in any::<u64>(),
            t in 0.0f64..=1.0,
            negative in any::<bool>(),
            scheme in prop::sample::select(vec![Scheme::Mixture, Scheme::Graded, Scheme::Gaussian]),
        ) {
            let sign = if negative { Sign::Negative } else { Sign::Positive };
            let e = generate(scheme, 3, 64, coupling(t, sign), seed).unwrap();
            for list in e.buyer_lists().iter().chain(std::iter::once(&e.vendor_list().to_vec())) {
                prop_assert!(list.iter().all(|v| (0.0..=1.0).contains(v)));
                let mut sorted = list.clone();
                sorted.sort_by(f64::total_cmp);
                prop_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}
