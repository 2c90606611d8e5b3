//! Distributionally robust goal-reaching optimization.
//!
//! Solvers for two families of problems where an agent maximizes the
//! probability of reaching a wealth goal in the presence of a background
//! risk whose dependence on the primary risk is unknown:
//!
//! * digital-payoff portfolio selection against a pricing kernel, and
//! * layer-reinsurance design under a distortion premium principle,
//!   solved without background risk, at the worst-case dependence, and
//!   at the comonotone (nominal) dependence.
//!
//! Sharp bounds on `P(W <= V)` over all couplings with fixed marginals,
//! together with the explicit worst-case coupling construction, live in
//! [`frechet`]. The [`robustness`] harness sweeps goal levels, safety
//! loadings, and loss-tail shapes, cross-evaluating each contract in the
//! other scenario.

pub mod cli;
pub mod config;
pub mod dist;
pub mod distortion;
pub mod error;
pub mod frechet;
pub mod numeric;
pub mod portfolio;
pub mod reinsurance;
pub mod robustness;
pub mod report;
mod special;

pub use error::{Error, Result};
