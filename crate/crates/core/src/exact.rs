//! Small exact-arithmetic helpers shared by the moment and enumeration code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ratio_int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient in u128, for the hot integer paths.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Falling factorial n (n-1) ... (n-k+1).
pub fn falling(n: i64, k: usize) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, j| acc * (n - j))
}

pub fn pow(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        if v.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parse "a/b" or "a" into a rational.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// "a/b" text form used in JSON output.
pub fn fmt_ratio(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn ser_ratio<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(v))
}

/// Evaluate an integer polynomial (coefficients from the highest degree down).
pub fn horner(coeffs_high_first: &[i128], n: i64) -> BigInt {
    let x = BigInt::from(n);
    coeffs_high_first
        .iter()
        .fold(BigInt::zero(), |acc, &c| acc * &x + BigInt::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), int(120));
        assert_eq!(binomial(3, 5), int(0));
        assert_eq!(binomial_u128(100, 6), 1_192_052_400);
        assert_eq!(falling(5, 3), int(60));
        assert_eq!(factorial(8), int(40320));
    }

    #[test]
    fn parse_and_convert() {
        assert_eq!(parse_ratio("41/45"), Some(ratio(41, 45)));
        assert_eq!(parse_ratio(" 6 "), Some(ratio(6, 1)));
        assert_eq!(parse_ratio("1/0"), None);
        assert!((to_f64(&ratio(1, 3)) - 1.0 / 3.0).abs() < 1e-17);
        assert_eq!(horner(&[1, 0, -1], 3), int(8));
    }
}
