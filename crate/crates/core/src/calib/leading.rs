use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, pow, ratio, ratio_int, to_f64};
use crate::kernels::CoefficientKind;
use crate::moments::bernoulli_plus;

/// Exact cumulants and moments of J_a = sum a/(pi^4 i^2 j^2) (xi_ij^2 - 1).
#[derive(Clone, Debug)]
pub struct JaMomentTable {
    pub a: u32,
    /// kappa_r for r = 0..=max_r (entries 0 and 1 are zero).
    pub cumulants: Vec<BigRational>,
    /// M_r for r = 0..=max_r.
    pub moments: Vec<BigRational>,
}

impl JaMomentTable {
    pub fn moment(&self, r: usize) -> &BigRational {
        &self.moments[r]
    }

    /// `var(J_a^q) = M_{2q} - M_q^2`.
    pub fn var_power(&self, q: usize) -> Result<BigRational> {
        if 2 * q >= self.moments.len() {
            return Err(Error::InvalidInput(format!(
                "table holds moments up to {} only",
                self.moments.len() - 1
            )));
        }
        Ok(&self.moments[2 * q] - &self.moments[q] * &self.moments[q])
    }
}

/// `zeta(2r) / pi^{2r}`, exactly.
pub fn zeta_even_over_pi(r: usize, bern: &[BigRational]) -> BigRational {
    // zeta(2r) = (-1)^{r+1} B_{2r} (2 pi)^{2r} / (2 (2r)!)
    let mut v = &bern[2 * r] * ratio_int(num_traits::pow(BigInt::from(2), 2 * r - 1))
        / ratio_int(factorial(2 * r as u64));
    if r % 2 == 0 {
        v = -v;
    }
    v
}

pub fn ja_moments(a: u32, max_r: usize) -> Result<JaMomentTable> {
    if max_r > 16 {
        return Err(Error::InvalidInput(format!("max_r must be <= 16 (got {max_r})")));
    }
    if a == 0 {
        return Err(Error::InvalidInput("scale a must be positive".into()));
    }
    let bern = bernoulli_plus(2 * max_r.max(1));
    let mut cumulants = vec![BigRational::zero(); max_r + 1];
    let ar = ratio_int(BigInt::from(a));
    for (r, k) in cumulants.iter_mut().enumerate().skip(2) {
        let z = zeta_even_over_pi(r, &bern);
        *k = ratio_int(num_traits::pow(BigInt::from(2), r - 1) * factorial(r as u64 - 1))
            * pow(&ar, r)
            * &z
            * &z;
    }
    let mut moments = vec![BigRational::one()];
    for l in 1..=max_r {
        let mut s = BigRational::zero();
        for r in 2..=l {
            s += ratio_int(binomial(l as u64 - 1, r as u64 - 1)) * &cumulants[r] * &moments[l - r];
        }
        moments.push(s);
    }
    Ok(JaMomentTable {
        a,
        cumulants,
        moments,
    })
}

/// (B_T, a_T) for the degenerate kinds: n T_n converges to B_T J_{a_T}.
pub fn limit_scales(kind: CoefficientKind) -> Option<(u32, u32)> {
    match kind {
        CoefficientKind::HoeffdingD => Some((10, 3)),
        CoefficientKind::BkrR => Some((15, 6)),
        CoefficientKind::TauStar => Some((6, 6)),
        _ => None,
    }
}

/// Leading-order `(mu, v)` of the q-th power of a single pair statistic.
pub fn leading_constants(kind: CoefficientKind, q: usize, n: usize) -> Result<(f64, f64)> {
    if ![2, 4, 6].contains(&q) {
        return Err(Error::InvalidInput(format!("q must be 2, 4 or 6 (got {q})")));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be >= 2 (got {n})")));
    }
    match limit_scales(kind) {
        Some((big_b, a)) => {
            let t = ja_moments(a, 2 * q)?;
            let s = ratio(big_b as i64, n as i64);
            let mu = pow(&s, q) * t.moment(q);
            let v = pow(&s, 2 * q) * t.var_power(q)?;
            Ok((to_f64(&mu), to_f64(&v)))
        }
        None => {
            let s2 = to_f64(&super::sigma2_exact(kind, n)?);
            // normal moments: E Z^q and var Z^q
            let (m, v) = match q {
                2 => (1.0, 2.0),
                4 => (3.0, 96.0),
                _ => (15.0, 10170.0),
            };
            Ok((m * s2.powi(q as i32 / 2), v * s2.powi(q as i32)))
        }
    }
}

/// Spectral data of the second-order projection used by the degenerate
/// maximum statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub lambda1: f64,
    pub lambda_sum: f64,
    pub mu1: u32,
    pub kappa: f64,
    pub m: usize,
}

impl SpectralConstants {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda1 > 0.0
            && self.lambda1.is_finite()
            && self.lambda_sum >= self.lambda1
            && self.lambda_sum.is_finite()
            && self.mu1 >= 1
            && self.kappa >= 1.0
            && self.kappa.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::SchemaMismatch(format!("invalid spectral constants {self:?}")))
        }
    }
}

/// Riemann zeta at s >= 2: direct sum plus an Euler-Maclaurin tail.
fn zeta(s: f64) -> f64 {
    const K: usize = 64;
    let mut sum = 0.0;
    for k in (1..K).rev() {
        sum += (k as f64).powf(-s);
    }
    let k = K as f64;
    sum + k.powf(1.0 - s) / (s - 1.0) + 0.5 * k.powf(-s) + s * k.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * k.powf(-s - 3.0) / 720.0
}

/// `kappa = prod_{(i,j) != (1,1)} (1 - 1/(i^2 j^2))^{-1/2}` via
/// `log kappa = (1/2) sum_m (zeta(2m)^2 - 1) / m`.
pub fn grid_kappa() -> f64 {
    let mut log_k = 0.0;
    for m in 1..200 {
        let z = zeta(2.0 * m as f64);
        let term = (z * z - 1.0) / m as f64;
        log_k += 0.5 * term;
        if term < 1e-18 {
            break;
        }
    }
    log_k.exp()
}

/// Eigenvalues lambda_ij = a_T / (pi^4 i^2 j^2): mu_1 = 1 and
/// Lambda / lambda_1 = (pi^2/6)^2.
pub fn spectral_constants(kind: CoefficientKind) -> Result<SpectralConstants> {
    let (_, a) = limit_scales(kind).ok_or(Error::UnsupportedKind(kind))?;
    let pi4 = std::f64::consts::PI.powi(4);
    let lambda1 = a as f64 / pi4;
    Ok(SpectralConstants {
        lambda1,
        lambda_sum: lambda1 * pi4 / 36.0,
        mu1: 1,
        kappa: grid_kappa(),
        m: kind.order(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn printed_j_moments() {
        let t = ja_moments(3, 12).unwrap();
        assert_eq!(t.moment(2), &ratio(1, 450));
        assert_eq!(t.moment(4), &ratio(193, 3307500));
        assert_eq!(
            t.moment(6),
            &crate::exact::parse_ratio("4903025107/894811943025000").unwrap()
        );
        assert_eq!(
            t.var_power(4).unwrap(),
            crate::exact::parse_ratio("37007208536234/36365716622000390625").unwrap()
        );
        assert_eq!(
            t.var_power(6).unwrap(),
            crate::exact::parse_ratio(
                "354578595091740477776790799277/2455001464593158529792371440312500000"
            )
            .unwrap()
        );
        assert!(t.moment(1).is_zero());
    }

    #[test]
    fn doubling_scale() {
        let t3 = ja_moments(3, 12).unwrap();
        let t6 = ja_moments(6, 12).unwrap();
        for r in 0..=12 {
            let f = ratio_int(num_traits::pow(BigInt::from(2), r));
            assert_eq!(t6.moment(r), &(t3.moment(r) * f));
        }
        assert!(ja_moments(3, 17).is_err());
    }

    #[test]
    fn leading_table() {
        use CoefficientKind::*;
        let table = [
            (HoeffdingD, [0.583522298, 101.7640019, 5.479391670, 1.444311135e5]),
            (BkrR, [47.26530612, 6.676736161e5, 3994.476528, 7.675661537e10]),
            (TauStar, [1.209991837, 437.5665811, 16.36137586, 1.287762316e6]),
        ];
        for (kind, want) in table {
            let (m4, v4) = leading_constants(kind, 4, 10).unwrap();
            let (m6, v6) = leading_constants(kind, 6, 10).unwrap();
            let got = [m4 * 1e4, v4 * 1e8, m6 * 1e6, v6 * 1e12];
            for (g, w) in got.iter().zip(want) {
                assert!(rel(*g, w) < 5e-9, "{kind}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn normal_leading_forms() {
        let (m, v) = leading_constants(CoefficientKind::Spearman, 6, 11).unwrap();
        assert!(rel(m, 15.0 * 0.1f64.powi(3)) < 1e-12);
        assert!(rel(v, 10170.0 * 0.1f64.powi(6)) < 1e-12);
    }

    #[test]
    fn spectral_values() {
        let pi4 = std::f64::consts::PI.powi(4);
        let d = spectral_constants(CoefficientKind::HoeffdingD).unwrap();
        let r = spectral_constants(CoefficientKind::BkrR).unwrap();
        let t = spectral_constants(CoefficientKind::TauStar).unwrap();
        assert!(rel(d.lambda1, 3.0 / pi4) < 1e-15);
        assert!(rel(r.lambda1, 6.0 / pi4) < 1e-15);
        assert_eq!(r.lambda1, t.lambda1);
        for s in [d, r, t] {
            assert_eq!(s.mu1, 1);
            assert!(rel(s.lambda_sum / s.lambda1, pi4 / 36.0) < 1e-14);
            assert_eq!(s.kappa, d.kappa);
            s.validate().unwrap();
        }
        assert!(spectral_constants(CoefficientKind::Kendall).is_err());
    }

    #[test]
    fn kappa_matches_truncated_product() {
        // product over i j <= N plus the tail sum_{k > N} d(k)/k^2 ~ (ln N + 1 + 2 gamma)/N
        let n = 200_000usize;
        let mut log_k = 0.0;
        for i in 1..=n {
            for j in 1..=n / i {
                if i == 1 && j == 1 {
                    continue;
                }
                let x = 1.0 / ((i * i) as f64 * (j * j) as f64);
                log_k -= 0.5 * (-x).ln_1p();
            }
        }
        let nf = n as f64;
        log_k += 0.5 * ((nf.ln() + 1.0 + 2.0 * 0.5772156649015329) / nf);
        assert!(rel(log_k.exp(), grid_kappa()) < 1e-8, "{} {}", log_k.exp(), grid_kappa());
    }
}
