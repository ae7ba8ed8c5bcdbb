//! Integer optimization of the product-line size and the duopoly equilibrium.

use thiserror::Error;

use crate::analytic::duopoly_profits;

/// Best integer `k` and the objective value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmax {
    pub k: usize,
    pub value: f64,
}

/// Exhaustive scan of `objective` over `0..=k_max`; ties go to the smaller `k`.
pub fn argmax_k(objective: impl Fn(usize) -> f64, k_max: usize) -> Argmax {
    let mut best = Argmax { k: 0, value: objective(0) };
    for k in 1..=k_max {
        let value = objective(k);
        if value > best.value {
            best = Argmax { k, value };
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("initial cost must be positive, got {0}")]
    InvalidCost(f64),
    #[error("best responses cycle between {0:?}")]
    Cycle(Vec<(usize, usize)>),
    #[error("no fixed point after {0} sweeps")]
    NoConvergence(usize),
}

/// Market inputs of the two-vendor game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duopoly {
    pub buyers: f64,
    pub accept_prob: f64,
    pub z1: f64,
    pub z2: f64,
    pub k_max: usize,
}

impl Duopoly {
    pub fn profits(&self, k1: usize, k2: usize) -> (f64, f64) {
        duopoly_profits(self.buyers, self.accept_prob, k1, k2, self.z1, self.z2)
    }

    /// Vendor 1's best reply to `k2`, or vendor 2's best reply to `k1` when `first` is false.
    pub fn best_response(&self, first: bool, other: usize) -> Argmax {
        let limit = self.k_max.saturating_sub(other);
        if first {
            argmax_k(|k| self.profits(k, other).0, limit)
        } else {
            argmax_k(|k| self.profits(other, k).1, limit)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuopolyEquilibrium {
    pub k1: usize,
    pub k2: usize,
    pub profit1: f64,
    pub profit2: f64,
    pub sweeps: usize,
    /// Best responses cycled and the equilibrium was found by scanning all `k2`.
    pub from_scan: bool,
}

const MAX_SWEEPS: usize = 10_000;

/// Alternating integer best responses from `(1, 1)` until neither vendor moves.
///
/// `k1 + k2` never exceeds `k_max`. An infinite initial cost is allowed and
/// keeps that vendor idle.
///
/// Integer best responses can oscillate between neighbouring points. When a
/// cycle appears, every `k2` is paired with vendor 1's reply and mutual best
/// responses are kept; the one closest to the cycle is returned. Only when
/// none exists is [`SolveError::Cycle`] reported.
pub fn duopoly_equilibrium(game: &Duopoly) -> Result<DuopolyEquilibrium, SolveError> {
    for z in [game.z1, game.z2] {
        if z.is_nan() || z <= 0.0 {
            return Err(SolveError::InvalidCost(z));
        }
    }
    let (mut k1, mut k2) = (1usize.min(game.k_max), 1usize.min(game.k_max.saturating_sub(1)));
    let mut history: Vec<(usize, usize)> = Vec::new();
    for sweep in 0..MAX_SWEEPS {
        if let Some(start) = history.iter().position(|&pair| pair == (k1, k2)) {
            let cycle = history.split_off(start);
            return scan_equilibria(game, &cycle, sweep).ok_or(SolveError::Cycle(cycle));
        }
        history.push((k1, k2));
        let next1 = game.best_response(true, k2).k;
        let next2 = game.best_response(false, next1).k;
        if next1 == k1 && next2 == k2 {
            let (profit1, profit2) = game.profits(k1, k2);
            return Ok(DuopolyEquilibrium {
                k1,
                k2,
                profit1,
                profit2,
                sweeps: sweep + 1,
                from_scan: false,
            });
        }
        k1 = next1;
        k2 = next2;
    }
    Err(SolveError::NoConvergence(MAX_SWEEPS))
}

fn scan_equilibria(
    game: &Duopoly,
    cycle: &[(usize, usize)],
    sweeps: usize,
) -> Option<DuopolyEquilibrium> {
    let distance = |(k1, k2): (usize, usize)| {
        cycle.iter().map(|&(c1, c2)| k1.abs_diff(c1) + k2.abs_diff(c2)).min().unwrap_or(0)
    };
    (0..=game.k_max)
        .map(|k2| (game.best_response(true, k2).k, k2))
        .filter(|&(k1, k2)| game.best_response(false, k1).k == k2)
        .min_by_key(|&pair| (distance(pair), pair))
        .map(|(k1, k2)| {
            let (profit1, profit2) = game.profits(k1, k2);
            DuopolyEquilibrium { k1, k2, profit1, profit2, sweeps, from_scan: true }
        })
}
