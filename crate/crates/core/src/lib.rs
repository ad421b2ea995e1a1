//! Rank-based tests of mutual independence for high-dimensional data.
//!
//! Pairwise rank coefficients (Spearman, Kendall, Hoeffding's D, the
//! Blum-Kiefer-Rosenblatt R and the Bergsma-Dassios-Yanagimoto tau*) are
//! aggregated into centered power sums of order 2, 4 and 6 and into a
//! maximum statistic; the resulting p-values are merged with a Cauchy
//! combination. Null calibration is exact where closed forms exist and
//! seeded Monte Carlo otherwise.

pub mod calib;
pub mod error;
pub mod exact;
pub mod io;
pub mod kernels;
pub mod moments;
pub mod patternenum;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use kernels::{
    compute_ranks, pair_exact, pair_statistic, pairwise_sheet, pattern_kernel, pearson, Algorithm,
    CoefficientKind, DataMatrix, KindClass, PairStatSheet, RankMatrix, TiePolicy,
};
pub use num_rational::BigRational;
