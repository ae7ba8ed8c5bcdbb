use rand::seq::index;
use rand::Rng;

use super::{check_realizations, run_indexed, summarize, RunSummary, SimError};
use crate::stats::Accumulator;

fn check_depth(depth: usize, variants: usize) -> Result<(), SimError> {
    if depth == 0 {
        return Err(SimError::ZeroDepth(depth));
    }
    if depth > variants {
        return Err(SimError::TooManyOffered { offered: depth, variants });
    }
    Ok(())
}

/// One vendor trading a single variant with `M` buyers.
///
/// All lists are independent uniform permutations of `N` variants. The
/// vendor considers its top `d` variants and picks the one whose worst buyer
/// rank `b_a = max_i k_{i,a}` is smallest, breaking ties uniformly. Reports
/// `b`, the chosen variant's vendor rank, the vendor cost `rank/N` and the
/// mean buyer cost `k_{i,a}/N` of the chosen variant.
pub fn sim_matching(
    variants: usize,
    buyers: usize,
    depth: usize,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    check_depth(depth, variants)?;
    if buyers == 0 {
        return Err(SimError::Model(crate::model::ModelError::NoBuyers));
    }
    let n = variants as f64;
    let runs = run_indexed(realizations, seed, |rng| {
        // ranks[i * depth + a]: 1-based position of the vendor's a-th variant in buyer i's list.
        let mut ranks = Vec::with_capacity(buyers * depth);
        for _ in 0..buyers {
            ranks.extend(index::sample(rng, variants, depth).into_iter().map(|r| r + 1));
        }
        let worst: Vec<usize> = (0..depth)
            .map(|a| (0..buyers).map(|i| ranks[i * depth + a]).max().unwrap_or(0))
            .collect();
        let b = *worst.iter().min().expect("depth is positive");
        let tied: Vec<usize> = (0..depth).filter(|&a| worst[a] == b).collect();
        let chosen = tied[rng.random_range(0..tied.len())];
        let buyer_cost = (0..buyers).map(|i| ranks[i * depth + chosen] as f64).sum::<f64>()
            / (buyers as f64 * n);
        [b as f64, (chosen + 1) as f64, (chosen + 1) as f64 / n, buyer_cost]
    });

    let mut summary = RunSummary::new("matching", realizations, seed)
        .setting("N", variants)
        .setting("M", buyers)
        .setting("d", depth);
    for (j, name) in ["b", "vendor_rank", "y", "x"].into_iter().enumerate() {
        let column: Vec<f64> = runs.iter().map(|r| r[j]).collect();
        summary.scalars.insert(name.into(), summarize(&column));
    }
    Ok(summary)
}

/// A vendor offering `d` variants to `M` buyers at once; each buyer takes the
/// offered variant highest in its own uniform list.
///
/// Reports the per-realization mean best rank `b` and buyer cost `x = b/N`,
/// plus the pooled histogram of `b` (index `b - 1`).
pub fn sim_multi_variant(
    variants: usize,
    depth: usize,
    buyers: usize,
    realizations: usize,
    seed: u64,
) -> Result<RunSummary, SimError> {
    check_realizations(realizations)?;
    check_depth(depth, variants)?;
    if buyers == 0 {
        return Err(SimError::Model(crate::model::ModelError::NoBuyers));
    }
    let runs = run_indexed(realizations, seed, |rng| {
        (0..buyers)
            .map(|_| index::sample(rng, variants, depth).into_iter().min().unwrap_or(0) + 1)
            .collect::<Vec<usize>>()
    });
    let mut histogram = vec![0u64; variants];
    let mut best = Vec::with_capacity(realizations);
    for run in &runs {
        let mut acc = Accumulator::new();
        for &b in run {
            histogram[b - 1] += 1;
            acc.push(b as f64);
        }
        best.push(acc.mean());
    }
    let costs: Vec<f64> = best.iter().map(|b| b / variants as f64).collect();

    let mut summary = RunSummary::new("multi_variant", realizations, seed)
        .setting("N", variants)
        .setting("d", depth)
        .setting("M", buyers);
    summary.scalars.insert("b".into(), summarize(&best));
    summary.scalars.insert("x".into(), summarize(&costs));
    summary.histograms.insert("b".into(), histogram);
    Ok(summary)
}
