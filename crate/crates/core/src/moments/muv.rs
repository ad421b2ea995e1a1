use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{kendall_closed, kendall_moment, spearman_closed, spearman_moment_partition, Which};
use crate::calib::CalibrationRecord;
use crate::error::{Error, Result};
use crate::kernels::CoefficientKind;
use crate::patternenum::{moment_from_omega, taustar_l4_exact};

/// Origin of a centering or variance constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    /// Exact under a Gaussian null only (Pearson benchmark).
    ExactGaussian,
    MonteCarlo,
    LeadingOrder,
}

/// `E r^{2k}` for the Pearson correlation of n independent Gaussian pairs:
/// r^2 ~ Beta(1/2, (n-2)/2).
pub fn pearson_gaussian_moment(r: usize, n: usize) -> BigRational {
    if r % 2 == 1 {
        return BigRational::from_integer(BigInt::from(0));
    }
    let mut acc = BigRational::one();
    for j in 0..r / 2 {
        acc *= crate::exact::ratio(2 * j as i64 + 1, n as i64 - 1 + 2 * j as i64);
    }
    acc
}

/// Exact `(mu, v)` of T^q when a closed route exists, else `None`.
pub fn exact_mu_v(
    kind: CoefficientKind,
    q: usize,
    n: usize,
) -> Result<Option<(BigRational, BigRational, Provenance)>> {
    if ![2, 4, 6].contains(&q) {
        return Err(Error::InvalidInput(format!("q must be 2, 4 or 6 (got {q})")));
    }
    let min_n = match kind {
        CoefficientKind::Spearman => 3,
        CoefficientKind::Pearson => 3,
        k => k.order().max(2),
    };
    if n < min_n {
        return Err(Error::InvalidInput(format!("{kind} needs n >= {min_n} (got {n})")));
    }
    let which = |w| -> Result<BigRational> {
        match kind {
            CoefficientKind::Spearman => spearman_closed(q, w, n),
            _ => kendall_closed(q, w, n),
        }
    };
    let out = match kind {
        CoefficientKind::Spearman | CoefficientKind::Kendall if q > 2 => {
            Some((which(Which::Mean)?, which(Which::Var)?, Provenance::Exact))
        }
        CoefficientKind::Spearman => {
            let m2 = spearman_moment_partition(2, n)?;
            let m4 = spearman_closed(4, Which::Mean, n)?;
            Some((m2.clone(), m4 - &m2 * &m2, Provenance::Exact))
        }
        CoefficientKind::Kendall => {
            let m2 = kendall_moment(2, n)?;
            let m4 = kendall_closed(4, Which::Mean, n)?;
            Some((m2.clone(), m4 - &m2 * &m2, Provenance::Exact))
        }
        CoefficientKind::Pearson => {
            let mu = pearson_gaussian_moment(q, n);
            let v = pearson_gaussian_moment(2 * q, n) - &mu * &mu;
            Some((mu, v, Provenance::ExactGaussian))
        }
        CoefficientKind::TauStar if q == 2 => {
            let m2 = moment_from_omega(kind, 2, n)?;
            let (m4, _) = taustar_l4_exact(n)?;
            Some((m2.clone(), m4 - &m2 * &m2, Provenance::Exact))
        }
        CoefficientKind::TauStar if q == 4 => {
            let (mu, v) = taustar_l4_exact(n)?;
            Some((mu, v, Provenance::Exact))
        }
        _ => None,
    };
    Ok(out)
}

/// Centering and variance of T^q with their origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuV {
    pub mu: f64,
    pub v: f64,
    pub provenance: Provenance,
}

/// `(mu, v)` for the L_q statistic: exact routes first, then the Monte Carlo
/// entries of `calib`.
pub fn mu_v(
    kind: CoefficientKind,
    q: usize,
    n: usize,
    calib: Option<&CalibrationRecord>,
) -> Result<MuV> {
    if let Some((mu, v, provenance)) = exact_mu_v(kind, q, n)? {
        return Ok(MuV {
            mu: crate::exact::to_f64(&mu),
            v: crate::exact::to_f64(&v),
            provenance,
        });
    }
    let rec = calib.ok_or_else(|| {
        Error::CalibrationUnavailable(format!("{kind} at n = {n}, q = {q} needs a Monte Carlo table"))
    })?;
    rec.check_matches(kind, n)?;
    let e = rec.entry(q as u32).ok_or_else(|| {
        Error::CalibrationUnavailable(format!("record for {kind} has no entry for q = {q}"))
    })?;
    Ok(MuV {
        mu: e.mu,
        v: e.v,
        provenance: e.v_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::mc_calibrate;
    use crate::exact::{ratio, to_f64};

    #[test]
    fn spearman_and_kendall_dispatch() {
        let got = mu_v(CoefficientKind::Spearman, 4, 10, None).unwrap();
        assert_eq!(got.provenance, Provenance::Exact);
        assert_eq!(got.mu, to_f64(&spearman_closed(4, Which::Mean, 10).unwrap()));
        assert_eq!(got.v, to_f64(&spearman_closed(4, Which::Var, 10).unwrap()));
        let n = 25;
        let k = mu_v(CoefficientKind::Kendall, 2, n, None).unwrap();
        let s2 = ratio(2 * (2 * n as i64 + 5), 9 * n as i64 * (n as i64 - 1));
        let m4 = kendall_moment(4, n).unwrap();
        assert_eq!(k.mu, to_f64(&s2));
        assert_eq!(k.v, to_f64(&(m4 - &s2 * &s2)));
    }

    #[test]
    fn degenerate_dispatch_uses_table() {
        assert!(matches!(
            mu_v(CoefficientKind::HoeffdingD, 4, 100, None),
            Err(Error::CalibrationUnavailable(_))
        ));
        let rec = mc_calibrate(CoefficientKind::HoeffdingD, 100, 10_000, 1).unwrap();
        let got = mu_v(CoefficientKind::HoeffdingD, 4, 100, Some(&rec)).unwrap();
        assert_eq!(got.provenance, Provenance::MonteCarlo);
        assert_eq!(got.mu, rec.entry(4).unwrap().mu);
        assert!(mu_v(CoefficientKind::HoeffdingD, 4, 99, Some(&rec)).is_err());
    }

    #[test]
    fn pearson_gaussian_moments() {
        assert_eq!(pearson_gaussian_moment(2, 11), ratio(1, 10));
        // E r^4 = 3 / ((n-1)(n+1))
        assert_eq!(pearson_gaussian_moment(4, 11), ratio(3, 120));
        let t = exact_mu_v(CoefficientKind::Pearson, 4, 11).unwrap().unwrap();
        assert_eq!(t.2, Provenance::ExactGaussian);
    }

    #[test]
    fn taustar_q2_and_q4_exact() {
        let (mu, _, p) = exact_mu_v(CoefficientKind::TauStar, 2, 4).unwrap().unwrap();
        assert_eq!(mu, ratio(2, 9));
        assert_eq!(p, Provenance::Exact);
        assert!(exact_mu_v(CoefficientKind::TauStar, 6, 20).unwrap().is_none());
        assert!(exact_mu_v(CoefficientKind::BkrR, 2, 20).unwrap().is_none());
    }
}
