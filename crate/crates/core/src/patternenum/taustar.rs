use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{binomial, parse_ratio, ratio_int};

const A4: [&str; 9] = [
    "6",
    "3984/5",
    "86562/5",
    "955356/7",
    "35817807/70",
    "71271603/70",
    "193676346/175",
    "108817236/175",
    "24762672/175",
];

const A8: [&str; 21] = [
    "86",
    "33679664/5",
    "45496828962/5",
    "2122691100468",
    "1646180207747391/10",
    "58827843848226249/10",
    "2909587818455523588/25",
    "392391897688632740043/275",
    "3209024638270591317216/275",
    "47841695172441710032608/715",
    "1393300388395409948078292/5005",
    "1655608772922828585830064/1925",
    "28632270526546652173175859/14300",
    "50601484615962860792463843/14300",
    "2020522303337817247422479631/425425",
    "4089733503008671502965210851/850850",
    "30687508392318266320595051829/8508500",
    "2364007315483141042586664069/1215500",
    "19681985307484680384868128/27625",
    "51591815442807446448342/325",
    "448521135302439977278464/27625",
];

/// `E K_n^s = sum_{b=4}^{3s} C(n, b) a_{s,b}`, where
/// `K_n = 3 C_n - C(n, 4)` and C_n counts concordant quadruples.
#[derive(Clone, Debug)]
pub struct CoefficientArray {
    pub s: usize,
    /// a_{s,b} for b = 4..=3s.
    pub values: Vec<BigRational>,
}

impl CoefficientArray {
    fn parse(s: usize, raw: &[&str]) -> Self {
        let values = raw
            .iter()
            .map(|v| parse_ratio(v).expect("embedded coefficient"))
            .collect();
        CoefficientArray { s, values }
    }

    pub fn get(&self, b: usize) -> Option<BigRational> {
        b.checked_sub(4).and_then(|i| self.values.get(i)).cloned()
    }

    /// `E K_n^s` for a given n.
    pub fn moment_k(&self, n: usize) -> BigRational {
        let mut total = BigRational::zero();
        for (i, a) in self.values.iter().enumerate() {
            let b = i + 4;
            if b > n {
                break;
            }
            total += ratio_int(binomial(n as u64, b as u64)) * a;
        }
        total
    }
}

pub fn coefficient_array(s: usize) -> Result<&'static CoefficientArray> {
    static A4C: OnceLock<CoefficientArray> = OnceLock::new();
    static A8C: OnceLock<CoefficientArray> = OnceLock::new();
    match s {
        4 => Ok(A4C.get_or_init(|| CoefficientArray::parse(4, &A4))),
        8 => Ok(A8C.get_or_init(|| CoefficientArray::parse(8, &A8))),
        _ => Err(Error::InvalidInput(format!(
            "coefficient arrays exist for s = 4 and 8 only (got {s})"
        ))),
    }
}

/// Exact `(mu, v)` of `(tau*_n)^4`: the fourth moment and the variance of the
/// fourth power.
pub fn taustar_l4_exact(n: usize) -> Result<(BigRational, BigRational)> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("tau* needs n >= 4 (got {n})")));
    }
    let scale = BigRational::from_integer(BigInt::from(3) * binomial(n as u64, 4));
    let m4 = coefficient_array(4)?.moment_k(n) / crate::exact::pow(&scale, 4);
    let m8 = coefficient_array(8)?.moment_k(n) / crate::exact::pow(&scale, 8);
    let v = m8 - &m4 * &m4;
    Ok((m4, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::kernels::CoefficientKind;
    use crate::moments::bruteforce_moment;

    #[test]
    fn array_entries() {
        let a4 = coefficient_array(4).unwrap();
        assert_eq!(a4.get(4).unwrap(), ratio(6, 1));
        assert_eq!(a4.get(12).unwrap(), ratio(24762672, 175));
        assert!(a4.get(13).is_none());
        assert_eq!(coefficient_array(8).unwrap().values.len(), 21);
        assert!(coefficient_array(6).is_err());
    }

    #[test]
    fn single_kernel_case() {
        // n = 4: tau* in {2/3, -1/3} with counts 8 and 16
        let (mu, v) = taustar_l4_exact(4).unwrap();
        let m4 = ratio(8 * 16 + 16, 24 * 81);
        let m8 = ratio(8 * 256 + 16, 24 * 6561);
        assert_eq!(mu, m4.clone());
        assert_eq!(v, m8 - &m4 * &m4);
    }

    #[test]
    fn matches_enumeration_at_seven() {
        let (mu, v) = taustar_l4_exact(7).unwrap();
        let m4 = bruteforce_moment(CoefficientKind::TauStar, 4, 7).unwrap();
        let m8 = bruteforce_moment(CoefficientKind::TauStar, 8, 7).unwrap();
        assert_eq!(mu, m4);
        assert_eq!(v, m8 - &m4 * &m4);
    }
}
