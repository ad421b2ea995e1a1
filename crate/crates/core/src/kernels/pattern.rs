//! Pattern kernels of the degenerate coefficients.
//!
//! A degenerate coefficient of order m is the average, over all m-subsets
//! of observations, of a kernel that depends only on the relative rank
//! pattern of the subset: with the subset sorted by its first coordinate,
//! the pattern is the permutation of 1..m formed by the second coordinate
//! ranks. Patterns are indexed by their lexicographic (Lehmer) rank.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::CoefficientKind;
use crate::error::{Error, Result};

const FACT: [usize; 13] = [
    1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800, 39916800, 479001600,
];

pub fn factorial(m: usize) -> usize {
    FACT[m]
}

/// Lexicographic rank of the relative order of `values` (distinct entries).
#[inline]
pub fn lehmer_index<T: PartialOrd>(values: &[T]) -> usize {
    let m = values.len();
    let mut idx = 0;
    for k in 0..m {
        let smaller = values[k + 1..].iter().filter(|v| **v < values[k]).count();
        idx += smaller * FACT[m - 1 - k];
    }
    idx
}

/// Permutation of 1..m with lexicographic rank `idx`.
pub fn unrank(mut idx: usize, m: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=m).collect();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let f = FACT[m - 1 - k];
        let digit = idx / f;
        idx %= f;
        out.push(pool.remove(digit));
    }
    out
}

/// Advance `perm` to the next permutation in lexicographic order.
pub fn next_permutation<T: Ord>(perm: &mut [T]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// All permutations of 1..m in lexicographic order.
pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (1..=m).collect();
    let mut out = Vec::with_capacity(FACT[m]);
    loop {
        out.push(perm.clone());
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

#[inline]
fn ind(b: bool) -> i64 {
    b as i64
}

/// {1(u_w1 <= u_wa) - 1(u_w2 <= u_wa)} {1(u_w3 <= u_wa) - 1(u_w4 <= u_wa)}
fn threshold_product(u: &[usize], w: &[usize], a: usize) -> i64 {
    let at = |k: usize| u[w[k - 1] - 1];
    let t = at(a);
    (ind(at(1) <= t) - ind(at(2) <= t)) * (ind(at(3) <= t) - ind(at(4) <= t))
}

/// 1(a,b < c,d): both of the first pair below both of the second.
fn below(a: usize, b: usize, c: usize, d: usize) -> i64 {
    ind(a < c && a < d && b < c && b < d)
}

fn quadruple_sign(u: &[usize], w: &[usize]) -> i64 {
    let at = |k: usize| u[w[k - 1] - 1];
    let (u1, u2, u3, u4) = (at(1), at(2), at(3), at(4));
    below(u1, u3, u2, u4) + below(u2, u4, u1, u3) - below(u1, u4, u2, u3) - below(u2, u3, u1, u4)
}

/// Exact kernel value for the relative rank pattern `sigma` (a permutation
/// of 1..m), evaluated by summing the defining indicator products over
/// every ordering of the m points.
pub fn pattern_kernel(kind: CoefficientKind, sigma: &[usize]) -> Result<BigRational> {
    let m = match kind {
        CoefficientKind::HoeffdingD | CoefficientKind::BkrR | CoefficientKind::TauStar => {
            kind.order()
        }
        _ => return Err(Error::UnsupportedKind(kind)),
    };
    if sigma.len() != m {
        return Err(Error::BadPermutation { n: m });
    }
    let as_u32: Vec<u32> = sigma.iter().map(|&s| s as u32).collect();
    super::data::check_permutation(&as_u32)?;
    let identity: Vec<usize> = (1..=m).collect();
    let mut total: i64 = 0;
    let mut w = identity.clone();
    loop {
        total += match kind {
            CoefficientKind::HoeffdingD => {
                threshold_product(&identity, &w, 5) * threshold_product(sigma, &w, 5)
            }
            CoefficientKind::BkrR => {
                threshold_product(&identity, &w, 5) * threshold_product(sigma, &w, 6)
            }
            _ => quadruple_sign(&identity, &w) * quadruple_sign(sigma, &w),
        };
        if !next_permutation(&mut w) {
            break;
        }
    }
    let denom = match kind {
        CoefficientKind::HoeffdingD => 16,
        CoefficientKind::BkrR => 32,
        _ => 24,
    };
    Ok(BigRational::new(BigInt::from(total), BigInt::from(denom)))
}

/// Kernel values over all m! patterns, stored as integers `scale * psi`.
#[derive(Debug, Clone)]
pub struct PatternTable {
    pub kind: CoefficientKind,
    pub m: usize,
    pub scale: i64,
    pub values: Vec<i64>,
}

impl PatternTable {
    fn build(kind: CoefficientKind) -> Self {
        let m = kind.order();
        let scale: i64 = match kind {
            CoefficientKind::HoeffdingD => 2,
            CoefficientKind::BkrR => 4,
            _ => 3,
        };
        let values = all_permutations(m)
            .iter()
            .map(|sigma| {
                let v = pattern_kernel(kind, sigma).expect("degenerate kind")
                    * BigRational::from_integer(BigInt::from(scale));
                assert!(v.is_integer(), "pattern value not a multiple of 1/{scale}");
                i64::try_from(v.to_integer()).expect("small kernel value")
            })
            .collect();
        Self {
            kind,
            m,
            scale,
            values,
        }
    }

    /// Scaled kernel value at the pattern of `values` (distinct entries).
    #[inline]
    pub fn lookup<T: PartialOrd>(&self, values: &[T]) -> i64 {
        self.values[lehmer_index(values)]
    }

    pub fn psi(&self, idx: usize) -> BigRational {
        BigRational::new(BigInt::from(self.values[idx]), BigInt::from(self.scale))
    }
}

/// Cached pattern table for a degenerate coefficient.
pub fn pattern_table(kind: CoefficientKind) -> Result<&'static PatternTable> {
    static D: OnceLock<PatternTable> = OnceLock::new();
    static R: OnceLock<PatternTable> = OnceLock::new();
    static TS: OnceLock<PatternTable> = OnceLock::new();
    let cell = match kind {
        CoefficientKind::HoeffdingD => &D,
        CoefficientKind::BkrR => &R,
        CoefficientKind::TauStar => &TS,
        other => return Err(Error::UnsupportedKind(other)),
    };
    Ok(cell.get_or_init(|| PatternTable::build(kind)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use std::collections::BTreeMap;

    fn histogram(kind: CoefficientKind) -> BTreeMap<BigRational, usize> {
        let mut h = BTreeMap::new();
        for sigma in all_permutations(kind.order()) {
            *h.entry(pattern_kernel(kind, &sigma).unwrap()).or_insert(0) += 1;
        }
        h
    }

    #[test]
    fn lehmer_round_trip() {
        for m in 1..=6 {
            for (i, p) in all_permutations(m).iter().enumerate() {
                assert_eq!(lehmer_index(p), i);
                assert_eq!(&unrank(i, m), p);
            }
        }
        assert_eq!(lehmer_index(&[10.0, 30.0, 20.0]), 1);
    }

    #[test]
    fn taustar_identity_pattern() {
        let v = pattern_kernel(CoefficientKind::TauStar, &[1, 2, 3, 4]).unwrap();
        assert_eq!(v, ratio(2, 3));
    }

    #[test]
    fn value_tables_match_published_counts() {
        let d = histogram(CoefficientKind::HoeffdingD);
        assert_eq!(d.get(&ratio(1, 1)), Some(&8));
        assert_eq!(d.get(&ratio(0, 1)), Some(&96));
        assert_eq!(d.get(&ratio(-1, 2)), Some(&16));
        assert_eq!(d.len(), 3);

        let r = histogram(CoefficientKind::BkrR);
        assert_eq!(r.get(&ratio(1, 1)), Some(&80));
        assert_eq!(r.get(&ratio(1, 2)), Some(&128));
        assert_eq!(r.get(&ratio(0, 1)), Some(&64));
        assert_eq!(r.get(&ratio(-1, 4)), Some(&320));
        assert_eq!(r.get(&ratio(-1, 2)), Some(&128));
        assert_eq!(r.len(), 5);

        let t = histogram(CoefficientKind::TauStar);
        assert_eq!(t.get(&ratio(2, 3)), Some(&8));
        assert_eq!(t.get(&ratio(-1, 3)), Some(&16));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn kernels_sum_to_zero() {
        for kind in CoefficientKind::DEGENERATE {
            let table = pattern_table(kind).unwrap();
            assert_eq!(table.values.iter().sum::<i64>(), 0, "{kind}");
        }
    }

    #[test]
    fn taustar_concordance_rule() {
        // psi = 2/3 exactly when the two smallest first-coordinate points are
        // also the two smallest, or the two largest, in the second coordinate.
        let table = pattern_table(CoefficientKind::TauStar).unwrap();
        for (i, s) in all_permutations(4).iter().enumerate() {
            let low = (s[0] <= 2 && s[1] <= 2) || (s[0] >= 3 && s[1] >= 3);
            assert_eq!(table.values[i] == 2, low, "{s:?}");
        }
    }

    #[test]
    fn unsupported_kinds_rejected() {
        assert!(matches!(
            pattern_kernel(CoefficientKind::Kendall, &[1, 2]),
            Err(Error::UnsupportedKind(_))
        ));
        assert!(pattern_kernel(CoefficientKind::TauStar, &[1, 2, 2, 4]).is_err());
    }
}
