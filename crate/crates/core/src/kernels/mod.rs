//! Pairwise rank coefficients: ranks, pattern kernels, fast and reference
//! evaluation, and the full pairwise sheet.

mod data;
pub mod fast;
mod kind;
pub(crate) mod pair;
pub mod pattern;
mod sheet;

pub use data::{compute_ranks, DataMatrix, RankMatrix, TiePolicy};
pub use kind::{CoefficientKind, KindClass};
pub use pair::{pair_exact, pair_statistic, pearson, Algorithm, PairValue};
pub use pattern::{pattern_kernel, pattern_table, PatternTable};
pub use sheet::{pair_index, pairwise_sheet, pearson_sheet, sheet_for, PairStatSheet};
