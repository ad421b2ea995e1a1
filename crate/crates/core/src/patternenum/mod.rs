//! Binomial-basis expansion of the null moments of degenerate coefficients.

mod omega;
mod taustar;

pub use omega::{
    cover_count, is_degeneracy_zero, moment_from_omega, moment_from_omega_with, omega,
    omega_enumerate, omega_monte_carlo, omega_with, printed_omega, OmegaEstimate, OmegaKey,
    OmegaOptions, OmegaSource,
};
pub use taustar::{coefficient_array, taustar_l4_exact, CoefficientArray};

use num_rational::BigRational;
use serde::Serialize;

use crate::error::Result;
use crate::kernels::CoefficientKind;
use crate::moments::bruteforce_moment;

/// Outcome of comparing the binomial-basis moment with full enumeration.
#[derive(Clone, Debug, Serialize)]
pub struct BasisCheck {
    pub kind: CoefficientKind,
    pub r: usize,
    pub n: usize,
    #[serde(serialize_with = "crate::exact::ser_ratio")]
    pub from_omega: BigRational,
    #[serde(serialize_with = "crate::exact::ser_ratio")]
    pub brute_force: BigRational,
}

impl BasisCheck {
    pub fn matches(&self) -> bool {
        self.from_omega == self.brute_force
    }
}

/// Compare `moment_from_omega` against the S_n enumeration (n <= 8 is cheap).
pub fn binomial_basis_check(kind: CoefficientKind, r: usize, n: usize) -> Result<BasisCheck> {
    Ok(BasisCheck {
        kind,
        r,
        n,
        from_omega: moment_from_omega(kind, r, n)?,
        brute_force: bruteforce_moment(kind, r, n)?,
    })
}
