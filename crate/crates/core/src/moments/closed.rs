use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::horner;

/// Which of the two calibration constants of an L_q statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Mean,
    Var,
}

const RHO_P4: [i128; 4] = [25, -38, -35, 72];

const RHO_P6: [i128; 9] = [
    1225, -4361, -178, 23818, -22783, -50081, 54280, 44160, -28800,
];

const RHO_Q4: [i128; 13] = [
    17500, -99575, 93952, 857943, -2236650, -3105081, 12836468, 8558537, -32726710, -20519664,
    28279440, 9858240, -12700800,
];

const RHO_Q6: [i128; 23] = [
    1576158959375,
    -26956502698125,
    204016193881500,
    -656132617822682,
    -1171932384888603,
    16913917053629829,
    -33663135573263722,
    -143066811467638476,
    610987613264235129,
    596842447834386253,
    -5189139972464602944,
    -1409441833203864570,
    27750786105920376371,
    4444828679768649627,
    -95698023681505100946,
    -19996738740525207104,
    206938856876542180608,
    34634552355461373696,
    -313861911687028044288,
    -56314087053512122368,
    270499002102369976320,
    37528151745373470720,
    -101439305560276992000,
];

const TAU_P4: [i128; 5] = [100, 328, -127, -997, -372];

const TAU_P6: [i128; 8] = [9800, 32732, -42010, -230695, -72460, 400733, 391500, 118080];

const TAU_Q4: [i128; 10] = [
    140000, 617400, -160764, -4827762, -7764663, 3028185, 23170684, 31403277, 20222343, 5273100,
];

const TAU_Q6: [i128; 16] = [
    100874173400000,
    106587400920000,
    -1350735059674000,
    -2750236703502288,
    705156071105876,
    18114848707300164,
    74210935173807565,
    32519698879088181,
    -379954037364238322,
    -639273543932846298,
    136412983449767425,
    1193679769717739457,
    1569782012721160896,
    1559385642899802384,
    1047269150681247360,
    285343922116915200,
];

fn ipow(v: i64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(v), e as usize)
}

fn frac(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn bad_q(q: usize) -> Error {
    Error::InvalidInput(format!("closed forms exist for q = 4 and 6 only (got {q})"))
}

/// Printed closed forms of the Spearman L_4 / L_6 centring and variance.
pub fn spearman_closed(q: usize, which: Which, n: usize) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("closed forms need n >= 3 (got {n})")));
    }
    let n = n as i64;
    let (np, nm, nn) = (|e| ipow(n, e), |e| ipow(n - 1, e), |e| ipow(n + 1, e));
    let v = match (q, which) {
        (4, Which::Mean) => frac(
            3 * horner(&RHO_P4, n),
            25 * np(1) * nm(3) * nn(1),
        ),
        (6, Which::Mean) => frac(
            3 * horner(&RHO_P6, n),
            245 * np(3) * nm(5) * nn(3),
        ),
        (4, Which::Var) => frac(
            24 * BigInt::from(n - 2) * horner(&RHO_Q4, n),
            4375 * np(5) * nm(7) * nn(5),
        ),
        (6, Which::Var) => frac(
            18 * BigInt::from(n - 2) * horner(&RHO_Q6, n),
            BigInt::from(2789661875i64) * np(9) * nm(11) * nn(9),
        ),
        _ => return Err(bad_q(q)),
    };
    Ok(v)
}

/// Printed closed forms of the Kendall L_4 / L_6 centring and variance.
pub fn kendall_closed(q: usize, which: Which, n: usize) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("closed forms need n >= 2 (got {n})")));
    }
    let n = n as i64;
    let (np, nm) = (|e| ipow(n, e), |e| ipow(n - 1, e));
    let v = match (q, which) {
        (4, Which::Mean) => frac(4 * horner(&TAU_P4, n), 675 * np(3) * nm(3)),
        (6, Which::Mean) => frac(8 * horner(&TAU_P6, n), 59535 * np(5) * nm(5)),
        (4, Which::Var) => frac(
            256 * BigInt::from(n - 2) * horner(&TAU_Q4, n),
            9568125 * np(7) * nm(7),
        ),
        (6, Which::Var) => frac(
            128 * BigInt::from(n - 2) * horner(&TAU_Q6, n),
            BigInt::from(164726744056875i64) * np(11) * nm(11),
        ),
        _ => return Err(bad_q(q)),
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::moments::{kendall_moment, spearman_moment_partition};
    use num_traits::Zero;

    #[test]
    fn spearman_small_values() {
        assert_eq!(spearman_closed(4, Which::Mean, 4).unwrap(), ratio(77, 375));
        assert_eq!(spearman_closed(4, Which::Mean, 3).unwrap(), ratio(3, 8));
    }

    #[test]
    fn spearman_matches_partition_identity() {
        for n in 3..=60 {
            let m4 = spearman_moment_partition(4, n).unwrap();
            let m6 = spearman_moment_partition(6, n).unwrap();
            assert_eq!(spearman_closed(4, Which::Mean, n).unwrap(), m4, "n = {n}");
            assert_eq!(spearman_closed(6, Which::Mean, n).unwrap(), m6, "n = {n}");
            let m8 = spearman_moment_partition(8, n).unwrap();
            let m12 = spearman_moment_partition(12, n).unwrap();
            assert_eq!(spearman_closed(4, Which::Var, n).unwrap(), &m8 - &m4 * &m4, "n = {n}");
            assert_eq!(spearman_closed(6, Which::Var, n).unwrap(), &m12 - &m6 * &m6, "n = {n}");
        }
    }

    #[test]
    fn kendall_matches_cumulants() {
        for n in 2..=60 {
            let m4 = kendall_moment(4, n).unwrap();
            let m6 = kendall_moment(6, n).unwrap();
            assert_eq!(kendall_closed(4, Which::Mean, n).unwrap(), m4, "n = {n}");
            assert_eq!(kendall_closed(6, Which::Mean, n).unwrap(), m6, "n = {n}");
            let m8 = kendall_moment(8, n).unwrap();
            let m12 = kendall_moment(12, n).unwrap();
            assert_eq!(kendall_closed(4, Which::Var, n).unwrap(), &m8 - &m4 * &m4, "n = {n}");
            assert_eq!(kendall_closed(6, Which::Var, n).unwrap(), &m12 - &m6 * &m6, "n = {n}");
        }
    }

    #[test]
    fn variance_vanishes_at_two() {
        assert!(kendall_closed(4, Which::Var, 2).unwrap().is_zero());
        assert!(kendall_closed(6, Which::Var, 2).unwrap().is_zero());
        assert!(spearman_closed(5, Which::Mean, 10).is_err());
    }
}
