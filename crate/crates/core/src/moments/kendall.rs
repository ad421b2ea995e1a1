use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial, pow, ratio, ratio_int};

/// Bernoulli numbers B_0..=B_max with the B_1 = +1/2 convention.
pub fn bernoulli_plus(max: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(max + 1);
    b.push(BigRational::one());
    for m in 1..=max {
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += ratio_int(binomial(m as u64 + 1, k as u64)) * bk;
        }
        b.push(-s / ratio_int(BigInt::from(m as u64 + 1)));
    }
    if max >= 1 {
        b[1] = ratio(1, 2);
    }
    b
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("Kendall moments need n >= 2 (got {n})")));
    }
    Ok(())
}

fn cumulants(max: usize, n: usize) -> Vec<BigRational> {
    let bern = bernoulli_plus(max);
    let scale = ratio(-4, (n * (n - 1)) as i64);
    let mut out = vec![BigRational::zero(); max + 1];
    for r in 2..=max {
        if bern[r].is_zero() {
            continue;
        }
        let s: BigInt = (1..=n as u64)
            .map(|j| num_traits::pow(BigInt::from(j), r) - 1)
            .sum();
        let k_inv = &bern[r] / ratio_int(BigInt::from(r as u64)) * ratio_int(s);
        out[r] = k_inv * pow(&scale, r);
    }
    out
}

/// Exact r-th cumulant of Kendall's tau_n under independence (r >= 2).
pub fn kendall_cumulant(r: usize, n: usize) -> Result<BigRational> {
    check_n(n)?;
    if r < 2 {
        // tau_n is centred
        return Ok(BigRational::zero());
    }
    Ok(cumulants(r, n).swap_remove(r))
}

/// Exact `E (tau_n)^r` from the cumulants.
pub fn kendall_moment(r: usize, n: usize) -> Result<BigRational> {
    check_n(n)?;
    let kappa = cumulants(r.max(2), n);
    let mut m: Vec<BigRational> = vec![BigRational::one()];
    for l in 1..=r {
        let mut s = BigRational::zero();
        for j in 2..=l {
            if kappa[j].is_zero() {
                continue;
            }
            s += ratio_int(binomial(l as u64 - 1, j as u64 - 1)) * &kappa[j] * &m[l - j];
        }
        m.push(s);
    }
    Ok(m.swap_remove(r))
}

/// `var(tau_n) = 2(2n+5) / (9 n (n-1))`.
pub fn kendall_sigma2(n: usize) -> BigRational {
    let n = n as i64;
    ratio(2 * (2 * n + 5), 9 * n * (n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_plus(12);
        assert_eq!(b[1], ratio(1, 2));
        assert_eq!(b[2], ratio(1, 6));
        assert_eq!(b[4], ratio(-1, 30));
        assert_eq!(b[6], ratio(1, 42));
        assert_eq!(b[12], ratio(-691, 2730));
        for r in (3..=11).step_by(2) {
            assert!(b[r].is_zero());
        }
    }

    #[test]
    fn cumulants_and_variance() {
        assert_eq!(kendall_cumulant(2, 3).unwrap(), ratio(11, 27));
        for n in 2..40 {
            assert_eq!(kendall_cumulant(2, n).unwrap(), kendall_sigma2(n));
            assert_eq!(kendall_moment(2, n).unwrap(), kendall_sigma2(n));
            assert!(kendall_cumulant(3, n).unwrap().is_zero());
            assert!(kendall_cumulant(5, n).unwrap().is_zero());
            assert!(kendall_moment(3, n).unwrap().is_zero());
            assert!(kendall_moment(1, n).unwrap().is_zero());
        }
    }

    #[test]
    fn n_two_is_a_sign() {
        // tau_2 = +-1
        for r in [2, 4, 6, 8] {
            assert_eq!(kendall_moment(r, 2).unwrap(), BigRational::one());
        }
    }
}
