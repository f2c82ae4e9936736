//! Exact and Monte Carlo tools for graphical partitions and dominance order.
//!
//! - [`partition`]: conjugates, Durfee squares, graphicality, dominance, Kostka numbers
//! - [`exact`]: counting tables, enumeration, unranking, exact `p(n)` and `r(n)`
//! - [`sampling`]: uniform random partitions (unranking and Boltzmann rejection)
//! - [`surrogate`]: the exponential-walk surrogate and its event estimators
//! - [`gaussian`]: the process `Σ B_k/k`, persistence, and the exponent pipeline
//! - [`selfcheck`]: the release criteria, runnable from tests and the CLI

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod gaussian;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod sampling;
pub mod selfcheck;
pub mod stats;
pub mod surrogate;

pub use error::{Error, Result};
pub use exact::{ExactProbability, PartitionTable};
pub use partition::Partition;
pub use rng::RandomStream;
