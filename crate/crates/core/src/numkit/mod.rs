//! Deterministic numeric substrate shared by every other module.
//!
//! Nothing in here touches global state: randomness flows through explicit
//! [`RngStream`] values, one per worker.

mod gradcheck;
mod linalg;
mod rng;
mod stats;

pub use gradcheck::finite_diff_gradient;
pub use linalg::{solve_least_squares, Matrix, RANK_TOLERANCE};
pub use rng::{sample_normal, RngStream};
pub use stats::{pairwise_sum, Standardizer};
