use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::data::check_permutation;
use super::fast;
use super::pattern::pattern_table;
use super::CoefficientKind;
use crate::error::{Error, Result};
use crate::exact::binomial_u128;

/// Evaluation route for a single pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    /// Direct enumeration of the defining sum (small n only).
    Reference,
    /// Production algorithm.
    Fast,
}

/// Exact pair value `num / den` (not necessarily reduced).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairValue {
    pub num: i128,
    pub den: i128,
}

impl PairValue {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

/// Scratch space reused across pairs by the O(n^2) kernels.
#[derive(Default)]
pub(crate) struct Scratch {
    pub table: Vec<u32>,
}

/// y-ranks in x order, 0-based.
pub(crate) fn relative_order(xr: &[u32], yr: &[u32]) -> Vec<u32> {
    let mut pi = vec![0u32; xr.len()];
    for (&x, &y) in xr.iter().zip(yr) {
        pi[x as usize - 1] = y - 1;
    }
    pi
}

/// Fast exact value from the relative order `pi`.
pub(crate) fn fast_value(kind: CoefficientKind, pi: &[u32], scratch: &mut Scratch) -> PairValue {
    let n = pi.len() as i128;
    match kind {
        CoefficientKind::Spearman | CoefficientKind::Pearson => {
            let den = n * (n * n - 1);
            PairValue {
                num: den - 6 * fast::spearman_d2(pi) as i128,
                den,
            }
        }
        CoefficientKind::Kendall => {
            let den = n * (n - 1);
            PairValue {
                num: den - 4 * fast::inversions(pi) as i128,
                den,
            }
        }
        CoefficientKind::HoeffdingD => PairValue {
            num: fast::hoeffding_sum(pi),
            den: 16 * binomial_u128(pi.len() as u64, 5) as i128,
        },
        CoefficientKind::BkrR => PairValue {
            num: fast::bkr_sum(pi, &mut scratch.table),
            den: 32 * binomial_u128(pi.len() as u64, 6) as i128,
        },
        CoefficientKind::TauStar => {
            let c4 = binomial_u128(pi.len() as u64, 4) as i128;
            let conc = fast::taustar_concordant(pi, &mut scratch.table) as i128;
            PairValue {
                num: 3 * conc - c4,
                den: 3 * c4,
            }
        }
    }
}

/// Visit every `m`-subset of 0..n in lexicographic order.
pub(crate) fn for_each_subset(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    if m > n {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        f(&idx);
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn reference_value(kind: CoefficientKind, pi: &[u32]) -> Result<BigRational> {
    let n = pi.len();
    if n > kind.reference_limit() {
        return Err(Error::TooLargeForReference {
            kind,
            n,
            limit: kind.reference_limit(),
        });
    }
    Ok(reference_scaled(kind, pi)?.to_rational())
}

/// Defining-sum evaluation without the size guard (used by the exhaustive
/// null enumeration, which bounds n itself).
pub(crate) fn reference_scaled(kind: CoefficientKind, pi: &[u32]) -> Result<PairValue> {
    let n = pi.len();
    match kind {
        CoefficientKind::Spearman => {
            // 12 / (n (n^2 - 1)) * sum a_i a_pi(i), a_i = i - (n+1)/2; doubled scores
            let ni = n as i128;
            let s: i128 = pi
                .iter()
                .enumerate()
                .map(|(i, &y)| (2 * (i as i128 + 1) - ni - 1) * (2 * (y as i128 + 1) - ni - 1))
                .sum();
            Ok(PairValue {
                num: 3 * s,
                den: ni * (ni * ni - 1),
            })
        }
        CoefficientKind::Kendall => {
            let mut s: i128 = 0;
            for_each_subset(n, 2, |ix| {
                s += if pi[ix[0]] < pi[ix[1]] { 1 } else { -1 };
            });
            Ok(PairValue {
                num: s,
                den: binomial_u128(n as u64, 2) as i128,
            })
        }
        CoefficientKind::Pearson => Err(Error::UnsupportedKind(kind)),
        _ => {
            let table = pattern_table(kind)?;
            let m = kind.order();
            let mut vals = vec![0u32; m];
            let mut s: i128 = 0;
            for_each_subset(n, m, |ix| {
                for (v, &i) in vals.iter_mut().zip(ix) {
                    *v = pi[i];
                }
                s += table.lookup(&vals) as i128;
            });
            Ok(PairValue {
                num: s,
                den: table.scale as i128 * binomial_u128(n as u64, m as u64) as i128,
            })
        }
    }
}

fn validated_order(kind: CoefficientKind, xr: &[u32], yr: &[u32]) -> Result<Vec<u32>> {
    if kind == CoefficientKind::Pearson {
        return Err(Error::UnsupportedKind(kind));
    }
    if xr.len() != yr.len() {
        return Err(Error::InvalidInput("rank columns differ in length".into()));
    }
    check_permutation(xr)?;
    check_permutation(yr)?;
    if xr.len() < kind.order() {
        return Err(Error::InvalidInput(format!(
            "{kind} needs n >= {} (got {})",
            kind.order(),
            xr.len()
        )));
    }
    Ok(relative_order(xr, yr))
}

/// Exact value of a rank coefficient for two rank columns.
pub fn pair_exact(
    kind: CoefficientKind,
    xr: &[u32],
    yr: &[u32],
    algo: Algorithm,
) -> Result<BigRational> {
    let pi = validated_order(kind, xr, yr)?;
    match algo {
        Algorithm::Reference => reference_value(kind, &pi),
        Algorithm::Fast => Ok(fast_value(kind, &pi, &mut Scratch::default()).to_rational()),
    }
}

/// A rank coefficient for two rank columns (each a permutation of 1..n).
pub fn pair_statistic(kind: CoefficientKind, xr: &[u32], yr: &[u32], algo: Algorithm) -> Result<f64> {
    match algo {
        Algorithm::Reference => Ok(crate::exact::to_f64(&pair_exact(kind, xr, yr, algo)?)),
        Algorithm::Fast => {
            let pi = validated_order(kind, xr, yr)?;
            Ok(fast_value(kind, &pi, &mut Scratch::default()).to_f64())
        }
    }
}

/// Sample (Pearson) correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput("pearson needs two equal-length columns, n >= 2".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateColumn);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
