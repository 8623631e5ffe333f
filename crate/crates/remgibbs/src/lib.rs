//! Simulation of the low-temperature Gibbs measure of the random energy model
//! (REM) through extreme order statistics.
//!
//! The REM assigns i.i.d. Gaussian energies to `2^N` spin configurations and
//! weights configuration `i` by `exp(-(beta/beta_c) * sqrt(2 log 2^N) * X_i)`.
//! Below the critical temperature the measure concentrates on the lowest-energy
//! configurations, so the `k_N` smallest order statistics of the `2^N` energies
//! carry almost all of the mass. This crate exploits the Renyi / Malmquist
//! representations of uniform order statistics to simulate those extremes with
//! `O(k_N)` work, independent of `2^N`:
//!
//! * [`quantile`] — the Gaussian upper-tail quantile map `G`, exact and
//!   asymptotic, with a cancellation-free complementary CDF.
//! * [`order_stats`] — exponential ladders, large-shape gamma sampling, and the
//!   `k` smallest of `n` uniforms in `O(k)` time for `n` up to `2^63`.
//! * [`rem_core`] — the brute-force REM at small `N`: energies, partition
//!   function, free energy and the exact Gibbs measure (the oracle).
//! * [`gibbs_approx`] — truncated approximations of the Gibbs measure, total
//!   variation distance, the truncation error bound, and the `zeta(beta)`
//!   series controlling concentration.
//! * [`simulator`] — the full sampling procedures: measure plus spin
//!   configurations drawn without replacement, with distributional summaries.
//! * [`bounds`] — analytic concentration/spacing bounds paired with Monte
//!   Carlo checks, reported as pass/fail [`bounds::BoundReport`] rows.
//! * [`cli`] — the command-line front end (`free-energy`, `verify`,
//!   `simulate`, `compare`) with CSV/JSON-lines output.
//!
//! Replica-level parallelism is deterministic: a master seed derives one
//! counter-based substream per replica (see [`rng`]), so results do not depend
//! on the number of worker threads.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod gibbs_approx;
pub mod order_stats;
pub mod quantile;
pub mod rem_core;
pub mod rng;
pub mod simulator;
pub mod stats;

pub use error::{Error, Result};
pub use rem_core::{beta_c, DiscreteMeasure, EnergySample};
