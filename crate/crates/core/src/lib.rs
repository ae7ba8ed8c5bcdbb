//! A market of heterogeneous buyers and a vendor who can produce many variants
//! of one product.
//!
//! Buyers and the vendor each rate every variant with a cost in `[0, 1]`. A
//! buyer accepts an offered variant with a probability that falls with its
//! cost; the vendor earns `1 - y` per item sold and pays a fixed charge `Z` for
//! every variant it starts producing. The crate provides:
//!
//! * [`model`]: parameters, acceptance rules, cost sampling and profit accounting;
//! * [`correlation`]: Kendall's tau, correlated list generators and their
//!   expected correlations, bounds on equicorrelated sets;
//! * [`analytic`]: closed-form expectations for every market scenario;
//! * [`simulate`]: deterministic, parallel Monte Carlo engines;
//! * [`solve`]: integer product-line optimisation and duopoly equilibrium.

pub mod analytic;
pub mod correlation;
pub mod model;
pub mod rng;
pub mod simulate;
pub mod solve;
pub mod stats;

pub use model::{AcceptanceFunction, CostMatrix, MarketParams, ModelError, SaleOutcome, PRICE};
