//! Monte Carlo engines for the market scenarios and the matching models.
//!
//! Each realization draws from its own stream, seeded from the master seed
//! and the realization index. Realizations run on the rayon pool but results
//! are collected in index order and reduced sequentially, so a summary is
//! bit-identical for any number of threads.

mod market;
mod matching;

pub use market::{
    sim_correlated, sim_duopoly, sim_informed_max, sim_sequential, sim_uninformed, Stopping,
};
pub use matching::{sim_matching, sim_multi_variant};

use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::correlation::CorrelationError;
use crate::model::ModelError;
use crate::rng::{self, StreamRng};
use crate::stats::{Accumulator, Estimate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("need at least 2 realizations for a standard error, got {0}")]
    TooFewRealizations(usize),
    #[error("cannot offer {offered} of {variants} variants")]
    TooManyOffered { offered: usize, variants: usize },
    #[error("the correlated market supports the graded and Gaussian schemes only")]
    UnsupportedScheme,
    #[error("depth must be at least 1, got {0}")]
    ZeroDepth(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// Output of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: &'static str,
    /// Scenario inputs as name/value text, in a fixed order.
    pub settings: Vec<(String, String)>,
    pub realizations: usize,
    pub master_seed: u64,
    pub scalars: BTreeMap<String, Estimate>,
    /// Per-index estimates, e.g. profit as a function of the number offered.
    pub series: BTreeMap<String, Vec<Estimate>>,
    /// Pooled counts by integer value.
    pub histograms: BTreeMap<String, Vec<u64>>,
}

impl RunSummary {
    fn new(scenario: &'static str, realizations: usize, master_seed: u64) -> Self {
        Self {
            scenario,
            settings: Vec::new(),
            realizations,
            master_seed,
            scalars: BTreeMap::new(),
            series: BTreeMap::new(),
            histograms: BTreeMap::new(),
        }
    }

    fn setting(mut self, name: &str, value: impl ToString) -> Self {
        self.settings.push((name.to_string(), value.to_string()));
        self
    }

    pub fn scalar(&self, name: &str) -> Option<Estimate> {
        self.scalars.get(name).copied()
    }

    pub fn series(&self, name: &str) -> Option<&[Estimate]> {
        self.series.get(name).map(Vec::as_slice)
    }

    pub fn histogram(&self, name: &str) -> Option<&[u64]> {
        self.histograms.get(name).map(Vec::as_slice)
    }

    /// Index of the largest mean in a series; ties go to the smaller index.
    pub fn series_argmax(&self, name: &str) -> Option<(usize, Estimate)> {
        let series = self.series(name)?;
        let mut best: Option<(usize, Estimate)> = None;
        for (i, e) in series.iter().enumerate() {
            if best.is_none_or(|(_, b)| e.mean > b.mean) {
                best = Some((i, *e));
            }
        }
        best
    }
}

/// Runs `realization` for indices `0..r` in parallel and returns the
/// results in index order.
fn run_indexed<T, F>(r: usize, master_seed: u64, realization: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    (0..r)
        .into_par_iter()
        .map(|i| realization(&mut rng::stream(master_seed, i as u64)))
        .collect()
}

fn check_realizations(r: usize) -> Result<(), SimError> {
    if r < 2 {
        return Err(SimError::TooFewRealizations(r));
    }
    Ok(())
}

fn summarize<'a>(values: impl IntoIterator<Item = &'a f64>) -> Estimate {
    values.into_iter().copied().collect::<Accumulator>().estimate()
}

/// Column-wise estimates of equally long per-realization vectors.
fn summarize_columns(rows: &[Vec<f64>]) -> Vec<Estimate> {
    let width = rows.first().map_or(0, Vec::len);
    let mut columns = vec![Accumulator::new(); width];
    for row in rows {
        for (acc, &v) in columns.iter_mut().zip(row) {
            acc.push(v);
        }
    }
    columns.iter().map(Accumulator::estimate).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers (0 means rayon's default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool")
        .install(f)
}
