use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::factorial;
use crate::kernels::pair::reference_scaled;
use crate::kernels::pattern::next_permutation;
use crate::kernels::CoefficientKind;

/// Largest n accepted by the exhaustive enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// Exact null law of `T_n` obtained by enumerating all of S_n.
///
/// Values are `num / den` with a common denominator; `counts` maps each
/// numerator to its number of permutations.
#[derive(Clone, Debug)]
pub struct NullLaw {
    pub kind: CoefficientKind,
    pub n: usize,
    pub den: i128,
    pub counts: BTreeMap<i128, u64>,
}

impl NullLaw {
    /// Enumerate S_n with the first rank column held at the identity.
    pub fn enumerate(kind: CoefficientKind, n: usize) -> Result<Self> {
        if n > BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        if kind == CoefficientKind::Pearson {
            return Err(Error::UnsupportedKind(kind));
        }
        if n < kind.order() {
            return Err(Error::InvalidInput(format!(
                "{kind} needs n >= {} (got {n})",
                kind.order()
            )));
        }
        let mut pi: Vec<u32> = (0..n as u32).collect();
        let mut counts = BTreeMap::new();
        let mut den;
        loop {
            let v = reference_scaled(kind, &pi)?;
            den = v.den;
            *counts.entry(v.num).or_insert(0u64) += 1;
            if !next_permutation(&mut pi) {
                break;
            }
        }
        Ok(NullLaw { kind, n, den, counts })
    }

    /// Exact `E T_n^r`.
    pub fn moment(&self, r: usize) -> BigRational {
        let mut num = BigInt::zero();
        for (&v, &c) in &self.counts {
            num += num_traits::pow(BigInt::from(v), r) * BigInt::from(c);
        }
        let den = num_traits::pow(BigInt::from(self.den), r) * factorial(self.n as u64);
        BigRational::new(num, den)
    }
}

/// Exact `E T_n^r` by averaging over all n! permutations.
pub fn bruteforce_moment(kind: CoefficientKind, r: usize, n: usize) -> Result<BigRational> {
    Ok(NullLaw::enumerate(kind, n)?.moment(r))
}
