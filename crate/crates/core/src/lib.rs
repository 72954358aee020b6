//! Budget-limited Shapley value estimation with a focus on top-k player
//! identification.
//!
//! The crate provides
//!
//! * cooperative games, a budget-metered evaluation oracle and exhaustive
//!   exact solvers ([`game`]),
//! * seeded coalition samplers and normal-distribution helpers ([`sampling`]),
//! * fixed-budget estimators: independent, same-length and identical-coalition
//!   samplers, ApproShapley, CMCS, Greedy CMCS, and the confidence-interval
//!   driven CMCS@K / SamplingSHAP@K pair ([`estimators`]),
//! * top-k quality measures and exact moment oracles ([`metrics`]),
//! * an experiment harness that writes CSV result rows ([`harness`]).
//!
//! Batch work (repeated seeded runs, enumeration over coalitions) runs on
//! rayon when the `parallel` feature is enabled, and sequentially otherwise.

pub mod batch;
pub mod error;
pub mod estimators;
pub mod game;
pub mod harness;
pub mod metrics;
pub mod numeric;
pub mod par;
pub mod sampling;

pub use error::{Error, Result};
pub use game::{Coalition, Game, ShapleyVector};
pub use par::Execution;
pub use sampling::RandomSource;
