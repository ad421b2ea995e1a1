use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The coefficient families covered by the test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Spearman,
    Kendall,
    HoeffdingD,
    BkrR,
    TauStar,
    Pearson,
}

/// Asymptotic class of a coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindClass {
    SimpleLinear,
    NonDegenerate,
    Degenerate,
    Benchmark,
}

impl CoefficientKind {
    pub const ALL: [CoefficientKind; 6] = [
        CoefficientKind::Spearman,
        CoefficientKind::Kendall,
        CoefficientKind::HoeffdingD,
        CoefficientKind::BkrR,
        CoefficientKind::TauStar,
        CoefficientKind::Pearson,
    ];

    pub const RANK: [CoefficientKind; 5] = [
        CoefficientKind::Spearman,
        CoefficientKind::Kendall,
        CoefficientKind::HoeffdingD,
        CoefficientKind::BkrR,
        CoefficientKind::TauStar,
    ];

    pub const DEGENERATE: [CoefficientKind; 3] = [
        CoefficientKind::HoeffdingD,
        CoefficientKind::BkrR,
        CoefficientKind::TauStar,
    ];

    /// Kernel order m_T (2 for the correlation-type coefficients).
    pub fn order(self) -> usize {
        match self {
            CoefficientKind::Spearman | CoefficientKind::Kendall | CoefficientKind::Pearson => 2,
            CoefficientKind::HoeffdingD => 5,
            CoefficientKind::BkrR => 6,
            CoefficientKind::TauStar => 4,
        }
    }

    pub fn class(self) -> KindClass {
        match self {
            CoefficientKind::Spearman => KindClass::SimpleLinear,
            CoefficientKind::Kendall => KindClass::NonDegenerate,
            CoefficientKind::HoeffdingD | CoefficientKind::BkrR | CoefficientKind::TauStar => {
                KindClass::Degenerate
            }
            CoefficientKind::Pearson => KindClass::Benchmark,
        }
    }

    pub fn is_degenerate(self) -> bool {
        self.class() == KindClass::Degenerate
    }

    pub fn is_rank_based(self) -> bool {
        self != CoefficientKind::Pearson
    }

    /// Largest n accepted by the pattern-enumeration reference.
    pub fn reference_limit(self) -> usize {
        match self {
            CoefficientKind::BkrR => 10,
            _ => 12,
        }
    }

    /// Short name used on the command line and in file names.
    pub fn short_name(self) -> &'static str {
        match self {
            CoefficientKind::Spearman => "rho",
            CoefficientKind::Kendall => "tau",
            CoefficientKind::HoeffdingD => "D",
            CoefficientKind::BkrR => "R",
            CoefficientKind::TauStar => "taustar",
            CoefficientKind::Pearson => "pearson",
        }
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for CoefficientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.trim().to_ascii_lowercase().as_str() {
            "rho" | "spearman" => CoefficientKind::Spearman,
            "tau" | "kendall" => CoefficientKind::Kendall,
            "d" | "hoeffding" | "hoeffding_d" | "hoeffdingd" => CoefficientKind::HoeffdingD,
            "r" | "bkr" | "bkr_r" | "bkrr" => CoefficientKind::BkrR,
            "taustar" | "tau_star" | "tau*" | "bdy" | "bdy_taustar" => CoefficientKind::TauStar,
            "pearson" | "r_pearson" => CoefficientKind::Pearson,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown coefficient '{other}' (expected rho, tau, D, R, taustar, pearson)"
                )))
            }
        };
        Ok(kind)
    }
}
