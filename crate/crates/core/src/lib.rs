//! Stable matching in markets where workers may be indifferent between jobs.
//!
//! Workers hold cardinal utilities (with ties) over jobs, jobs hold strict
//! rankings over workers. The crate provides:
//!
//! * [`market`]: the instance, matching and distribution model,
//! * [`stability`]: blocking pairs, weak / internal / ε-stability and
//!   enumeration of (stable) matchings on small instances,
//! * [`engine`]: deferred acceptance and the job-duplication oracles that
//!   guarantee every worker a logarithmic fraction of their optimal stable
//!   share,
//! * [`lp`]: an exact rational simplex solver,
//! * [`share`]: optimal stable shares, max-min share ratios and best
//!   approximation vectors,
//! * [`gen`]: generators for the structured instance families and seeded
//!   random markets,
//! * [`bandit`]: the explore-then-choose-oracle learner with regret tracking.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bandit;
pub mod engine;
pub mod error;
pub mod gen;
pub mod lp;
pub mod market;
pub mod scalar;
pub mod share;
pub mod stability;

pub use error::Error;
pub use market::{MarketInstance, Matching, MatchingDistribution, Violation};
pub use scalar::{Rational, Scalar};
