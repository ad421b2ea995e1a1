use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::DataMatrix;
use crate::rng::stream;

/// Unit-variance marginal laws of the null experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalLaw {
    StdNormal,
    /// t_3 / sqrt(3)
    ScaledT3,
    /// (chi^2_1 - 1) / sqrt(2)
    ScaledChiSq1,
}

impl MarginalLaw {
    pub const ALL: [MarginalLaw; 3] = [MarginalLaw::StdNormal, MarginalLaw::ScaledT3, MarginalLaw::ScaledChiSq1];

    pub fn name(self) -> &'static str {
        match self {
            MarginalLaw::StdNormal => "normal",
            MarginalLaw::ScaledT3 => "t3",
            MarginalLaw::ScaledChiSq1 => "chisq",
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            MarginalLaw::StdNormal => StandardNormal.sample(rng),
            MarginalLaw::ScaledT3 => {
                let t: f64 = StudentT::new(3.0).expect("valid dof").sample(rng);
                t / 3f64.sqrt()
            }
            MarginalLaw::ScaledChiSq1 => {
                let z: f64 = StandardNormal.sample(rng);
                (z * z - 1.0) / std::f64::consts::SQRT_2
            }
        }
    }
}

impl fmt::Display for MarginalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MarginalLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" | "n" => Ok(MarginalLaw::StdNormal),
            "t3" | "t" => Ok(MarginalLaw::ScaledT3),
            "chisq" | "chi2" | "chisq1" => Ok(MarginalLaw::ScaledChiSq1),
            _ => Err(Error::InvalidInput(format!("unknown law {s:?}; use normal, t3 or chisq"))),
        }
    }
}

/// n x p matrix of iid draws; column j uses stream (seed, j).
pub fn gen_null(n: usize, p: usize, law: MarginalLaw, seed: u64) -> DataMatrix {
    let mut values = Vec::with_capacity(n * p);
    for j in 0..p {
        let mut rng = stream(seed, j as u64);
        values.extend((0..n).map(|_| law.sample(&mut rng)));
    }
    DataMatrix::from_column_major(n, p, values).expect("finite draws")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    /// X = Z
    LinearNormal = 1,
    /// X = sin(2 pi sgn(Z) |Z|^{1/3} / 3)
    SineCubeRoot = 2,
    /// X = sin(pi Z^3 / 4)
    SineCubic = 3,
}

impl DesignKind {
    pub const ALL: [DesignKind; 3] = [DesignKind::LinearNormal, DesignKind::SineCubeRoot, DesignKind::SineCubic];

    pub fn name(self) -> &'static str {
        match self {
            DesignKind::LinearNormal => "linear",
            DesignKind::SineCubeRoot => "sine_cuberoot",
            DesignKind::SineCubic => "sine_cubic",
        }
    }

    fn transform(self, z: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            DesignKind::LinearNormal => z,
            DesignKind::SineCubeRoot => (2.0 * PI * z.signum() * z.abs().cbrt() / 3.0).sin(),
            DesignKind::SineCubic => (PI * z * z * z / 4.0).sin(),
        }
    }

    /// (r_min, r_max) for active-set size k.
    pub fn range(self, k: usize, n: usize, p: usize) -> (f64, f64) {
        let (kf, nf, lp) = (k as f64, n as f64, (p as f64).ln());
        match self {
            DesignKind::LinearNormal => ((12.0 * lp / (kf * nf)).sqrt(), (14.0 * lp / (kf * nf)).sqrt()),
            DesignKind::SineCubeRoot => {
                let d = nf * ((kf + 2.0) / 2.0).ln();
                ((9.0 * lp / d).sqrt(), (10.0 * lp / d).sqrt())
            }
            DesignKind::SineCubic => {
                let s = kf.powf(-0.5);
                ((19.0 * s * lp / nf).sqrt(), (20.0 * s * lp / nf).sqrt())
            }
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "linear_normal" => Ok(DesignKind::LinearNormal),
            "sine_cuberoot" | "cuberoot" => Ok(DesignKind::SineCubeRoot),
            "sine_cubic" | "cubic" => Ok(DesignKind::SineCubic),
            _ => Err(Error::InvalidInput(format!(
                "unknown design {s:?}; use linear, sine_cuberoot or sine_cubic"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternativeDesign {
    pub kind: DesignKind,
    pub k: usize,
    pub n: usize,
    pub p: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl AlternativeDesign {
    pub fn new(kind: DesignKind, k: usize, n: usize, p: usize) -> Result<Self> {
        let (r_min, r_max) = kind.range(k, n, p);
        Self::with_range(kind, k, n, p, r_min, r_max)
    }

    pub fn with_range(kind: DesignKind, k: usize, n: usize, p: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if k < 2 || k > p || n < 2 {
            return Err(Error::InvalidInput(format!("need 2 <= k <= p and n >= 2 (k = {k}, p = {p})")));
        }
        if !(0.0 <= r_min && r_min <= r_max && r_max < 1.0) {
            return Err(Error::InvalidInput(format!(
                "correlation range [{r_min}, {r_max}] must lie in [0, 1)"
            )));
        }
        Ok(AlternativeDesign { kind, k, n, p, r_min, r_max })
    }
}

const PD_ATTEMPTS: usize = 100;

/// Latent Gaussian with a random correlated block on a uniformly chosen
/// active set, then the design transform applied to every coordinate.
pub fn gen_alternative(design: &AlternativeDesign, seed: u64) -> Result<DataMatrix> {
    let AlternativeDesign { kind, k, n, p, r_min, r_max } = *design;
    let mut rng = stream(seed, u64::MAX);
    let active: Vec<usize> = {
        let mut a = sample(&mut rng, p, k).into_vec();
        a.sort_unstable();
        a
    };
    // factor L with L L^T = block correlation, via the eigendecomposition
    let mut factor = None;
    for _ in 0..PD_ATTEMPTS {
        let mut c = DMatrix::<f64>::identity(k, k);
        for i in 0..k {
            for j in i + 1..k {
                let r = if r_max > r_min { rng.random_range(r_min..r_max) } else { r_min };
                c[(i, j)] = r;
                c[(j, i)] = r;
            }
        }
        let eig = SymmetricEigen::new(c);
        if eig.eigenvalues.iter().all(|&l| l > 1e-10) {
            let sqrt_l = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
            factor = Some(&eig.eigenvectors * sqrt_l);
            break;
        }
    }
    let factor = factor.ok_or(Error::NotPositiveDefinite(PD_ATTEMPTS))?;
    let mut z = gen_null(n, p, MarginalLaw::StdNormal, seed);
    let mut xi = vec![0.0; k];
    let mut block = vec![vec![0.0; n]; k];
    for row in 0..n {
        for (a, &j) in active.iter().enumerate() {
            xi[a] = z.get(row, j);
        }
        for (a, col) in block.iter_mut().enumerate() {
            col[row] = (0..k).map(|b| factor[(a, b)] * xi[b]).sum();
        }
    }
    let mut columns: Vec<Vec<f64>> = z.columns().map(|c| c.to_vec()).collect();
    for (a, &j) in active.iter().enumerate() {
        columns[j] = std::mem::take(&mut block[a]);
    }
    if kind != DesignKind::LinearNormal {
        for c in columns.iter_mut() {
            for v in c.iter_mut() {
                *v = kind.transform(*v);
            }
        }
    }
    z = DataMatrix::from_columns(columns)?;
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_moments() {
        for law in MarginalLaw::ALL {
            let m = gen_null(100_000, 1, law, 5);
            let c = m.column(0);
            let nf = c.len() as f64;
            let mean = c.iter().sum::<f64>() / nf;
            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            let se = (1.0 / nf).sqrt();
            assert!(mean.abs() < 4.0 * se, "{law}: mean {mean}");
            // t3 has infinite fourth moment, so only a loose check on its variance
            let tol = if law == MarginalLaw::ScaledT3 { 0.15 } else { 0.03 };
            assert!((var - 1.0).abs() < tol, "{law}: var {var}");
        }
    }

    #[test]
    fn same_seed_same_data() {
        let a = gen_null(20, 4, MarginalLaw::ScaledT3, 9);
        let b = gen_null(20, 4, MarginalLaw::ScaledT3, 9);
        assert_eq!(a.column(3), b.column(3));
        let d = AlternativeDesign::new(DesignKind::SineCubic, 4, 30, 10).unwrap();
        let x = gen_alternative(&d, 3).unwrap();
        let y = gen_alternative(&d, 3).unwrap();
        for j in 0..10 {
            assert_eq!(x.column(j), y.column(j));
        }
    }

    #[test]
    fn linear_range_value() {
        let (lo, hi) = DesignKind::LinearNormal.range(2, 100, 200);
        assert!((lo - 0.5639).abs() < 1e-4, "{lo}");
        assert!(hi > lo && hi < 1.0);
        for kind in DesignKind::ALL {
            for k in 2..=16 {
                let (lo, hi) = kind.range(k, 100, 200);
                assert!(0.0 < lo && lo < hi && hi < 1.0, "{kind} k = {k}");
            }
        }
    }

    #[test]
    fn zero_range_is_null() {
        let d = AlternativeDesign::with_range(DesignKind::LinearNormal, 5, 40, 5, 0.0, 0.0).unwrap();
        let x = gen_alternative(&d, 11).unwrap();
        let z = gen_null(40, 5, MarginalLaw::StdNormal, 11);
        for j in 0..5 {
            for (a, b) in x.column(j).iter().zip(z.column(j)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn off_block_pairs_look_independent() {
        let (n, p) = (100, 40);
        let d = AlternativeDesign::new(DesignKind::LinearNormal, 2, n, p).unwrap();
        let x = gen_alternative(&d, 21).unwrap();
        let sheet = crate::kernels::pearson_sheet(&x).unwrap();
        let big = sheet.values.iter().filter(|r| r.abs() >= 4.0 / (n as f64).sqrt()).count();
        // at most the one active pair plus a few null exceedances
        assert!(big as f64 <= 0.05 * sheet.values.len() as f64, "{big}");
    }
}
