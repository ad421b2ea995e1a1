//! Exact finite-sample null moments of a single pair statistic.

mod brute;
mod closed;
mod kendall;
mod muv;
pub mod partition;
mod spearman;

pub use brute::{bruteforce_moment, NullLaw, BRUTE_FORCE_LIMIT};
pub use closed::{kendall_closed, spearman_closed, Which};
pub use kendall::{bernoulli_plus, kendall_cumulant, kendall_moment, kendall_sigma2};
pub use partition::{partitions, IntegerPartition};
pub use spearman::{spearman_moment_mobius, spearman_moment_partition, spearman_sigma2};
pub use muv::{exact_mu_v, mu_v, pearson_gaussian_moment, MuV, Provenance};
