use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::partition::{distinct_power_sum, partitions, IntegerPartition};
use crate::error::{Error, Result};
use crate::exact::{factorial, falling, ratio, ratio_int};

/// Doubled centered scores 2i - n - 1, i = 1..n.
fn doubled_scores(n: usize) -> Vec<BigInt> {
    (1..=n as i64).map(|i| BigInt::from(2 * i - n as i64 - 1)).collect()
}

fn partition_weight(lam: &IntegerPartition, r: usize) -> BigInt {
    let mut den = BigInt::from(1);
    for &p in lam.parts() {
        den *= factorial(p as u64);
    }
    for (_, m) in lam.multiplicities() {
        den *= factorial(m as u64);
    }
    factorial(r as u64) / den
}

fn moment_with(
    r: usize,
    n: usize,
    dsum: impl Fn(&IntegerPartition, &[BigInt]) -> BigInt,
) -> Result<BigRational> {
    if n < 2 || r == 0 {
        return Err(Error::InvalidInput(format!(
            "Spearman moment needs n >= 2 and r >= 1 (got n = {n}, r = {r})"
        )));
    }
    let x = doubled_scores(n);
    let mut acc = BigRational::zero();
    for lam in partitions(r) {
        if lam.len() > n {
            continue;
        }
        let d = dsum(&lam, &x);
        if d.is_zero() {
            continue;
        }
        acc += BigRational::new(partition_weight(&lam, r) * &d * &d, falling(n as i64, lam.len()));
    }
    // doubled scores: D = 2^{-r} D', and c_n^r 4^{-r} = (3 / (n (n^2 - 1)))^r
    let ni = n as i64;
    let c = ratio(3, ni * (ni * ni - 1));
    Ok(acc * crate::exact::pow(&c, r))
}

/// Exact `E (rho_n)^r` under independence via the partition identity.
pub fn spearman_moment_partition(r: usize, n: usize) -> Result<BigRational> {
    moment_with(r, n, distinct_power_sum)
}

/// Same moment with the distinct-index sums obtained by Moebius inversion.
pub fn spearman_moment_mobius(r: usize, n: usize) -> Result<BigRational> {
    moment_with(r, n, super::partition::distinct_power_sum_mobius)
}

/// `var(rho_n) = 1/(n-1)`.
pub fn spearman_sigma2(n: usize) -> BigRational {
    ratio_int(BigInt::from(1)) / ratio_int(BigInt::from(n as i64 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        for n in 2..12 {
            assert!(spearman_moment_partition(1, n).unwrap().is_zero());
            assert!(spearman_moment_partition(3, n).unwrap().is_zero());
            assert_eq!(spearman_moment_partition(2, n).unwrap(), spearman_sigma2(n));
        }
        assert_eq!(spearman_moment_partition(2, 3).unwrap(), ratio(1, 2));
        assert_eq!(spearman_moment_partition(4, 4).unwrap(), ratio(77, 375));
    }

    #[test]
    fn mobius_route_agrees() {
        for n in [3, 5, 9, 17] {
            for r in 1..=8 {
                assert_eq!(
                    spearman_moment_partition(r, n).unwrap(),
                    spearman_moment_mobius(r, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(spearman_moment_partition(2, 1).is_err());
        assert!(spearman_moment_partition(0, 5).is_err());
    }
}
