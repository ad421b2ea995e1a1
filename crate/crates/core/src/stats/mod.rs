//! Standardized L_q and maximum statistics, their p-values, and the Cauchy
//! combination.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::calib::{CalibrationRecord, Source, SpectralConstants};
use crate::error::{Error, Result};
use crate::kernels::{compute_ranks, sheet_for, CoefficientKind, DataMatrix, PairStatSheet, TiePolicy};
use crate::moments::Provenance;

/// Norm of the aggregated statistic: finite q or the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    L(u32),
    Inf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L(q) => write!(f, "{q}"),
            Norm::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "max" | "infinity" => Ok(Norm::Inf),
            t => match t.trim_start_matches('l').parse::<u32>() {
                Ok(q) if [2, 4, 6].contains(&q) => Ok(Norm::L(q)),
                _ => Err(Error::InvalidInput(format!("unknown norm {s:?}; use 2, 4, 6 or inf"))),
            },
        }
    }
}

/// Parse "2,4,6,inf".
pub fn parse_norms(s: &str) -> Result<Vec<Norm>> {
    let mut out: Vec<Norm> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::InvalidInput("empty norm list".into()));
    }
    Ok(out)
}

/// Key of a norm set, e.g. "2,4,6,inf".
pub fn norm_set_key(norms: &[Norm]) -> String {
    norms.iter().map(Norm::to_string).collect::<Vec<_>>().join(",")
}

/// Upper normal tail 1 - Phi(z).
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LqStatistic {
    pub q: u32,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "p")]
    pub p_value: f64,
}

/// `S = sum (A^q - mu)`, `Z = S / sqrt(N_p v)`, one-sided p = 1 - Phi(Z).
/// Every coefficient here has null mean zero, so A is its own centred value.
pub fn lq_statistic(sheet: &PairStatSheet, calib: &CalibrationRecord, q: u32) -> Result<LqStatistic> {
    calib.check_matches(sheet.kind, sheet.n)?;
    let e = calib.entry(q).ok_or_else(|| {
        Error::CalibrationUnavailable(format!("no calibration entry for q = {q}"))
    })?;
    if !(e.v > 0.0) {
        return Err(Error::CalibrationMismatch(format!("variance for q = {q} is not positive")));
    }
    let s: f64 = sheet.values.iter().map(|&a| a.powi(q as i32) - e.mu).sum();
    let z = s / (sheet.num_pairs() as f64 * e.v).sqrt();
    Ok(LqStatistic {
        q,
        s,
        z,
        p_value: normal_sf(z),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxFamily {
    /// G(y) = exp(-(8 pi)^{-1/2} e^{-y/2})
    GumbelG,
    /// F(y) = exp(-2^{mu1/2-2} kappa / Gamma(mu1/2) e^{-y/2})
    GumbelF,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxStatistic {
    pub family: MaxFamily,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "p")]
    pub p_value: f64,
}

/// `1 - exp(-c e^{-y/2})` without cancellation.
fn gumbel_sf(c: f64, y: f64) -> f64 {
    -(-c * (-y / 2.0).exp()).exp_m1()
}

pub fn gumbel_g_cdf(y: f64) -> f64 {
    1.0 - gumbel_sf((8.0 * PI).powf(-0.5), y)
}

fn f_constant(sc: &SpectralConstants) -> f64 {
    let h = sc.mu1 as f64 / 2.0;
    2f64.powf(h - 2.0) * sc.kappa / gamma(h)
}

pub fn gumbel_f_cdf(sc: &SpectralConstants, y: f64) -> f64 {
    1.0 - gumbel_sf(f_constant(sc), y)
}

fn check_dim(p_dim: usize) -> Result<f64> {
    if p_dim < 3 {
        return Err(Error::DimensionTooSmall(p_dim));
    }
    Ok(p_dim as f64)
}

/// `M = L^2 / sigma^2 - 4 log p + log log p` with L = max |A|.
pub fn max_statistic_vw(sheet: &PairStatSheet, sigma2: f64, p_dim: usize) -> Result<MaxStatistic> {
    if sheet.kind.is_degenerate() {
        return Err(Error::UnsupportedKind(sheet.kind));
    }
    let p = check_dim(p_dim)?;
    let l = sheet.values.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let m = l * l / sigma2 - 4.0 * p.ln() + p.ln().ln();
    Ok(MaxStatistic {
        family: MaxFamily::GumbelG,
        m,
        p_value: gumbel_sf((8.0 * PI).powf(-0.5), m),
    })
}

/// `M = (n-1) L / (lambda_1 C(m,2)) - 4 log p - (mu_1 - 2) log log p + Lambda/lambda_1`
/// with the one-sided L = max A.
pub fn max_statistic_q(
    sheet: &PairStatSheet,
    spectral: Option<&SpectralConstants>,
    n: usize,
    p_dim: usize,
) -> Result<MaxStatistic> {
    if !sheet.kind.is_degenerate() {
        return Err(Error::UnsupportedKind(sheet.kind));
    }
    let sc = spectral.ok_or(Error::MissingSpectral)?;
    let p = check_dim(p_dim)?;
    let l = sheet.values.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a));
    let pairs = (sc.m * (sc.m - 1) / 2) as f64;
    let m = (n as f64 - 1.0) / (sc.lambda1 * pairs) * l - 4.0 * p.ln()
        - (sc.mu1 as f64 - 2.0) * p.ln().ln()
        + sc.lambda_sum / sc.lambda1;
    Ok(MaxStatistic {
        family: MaxFamily::GumbelF,
        m,
        p_value: gumbel_sf(f_constant(sc), m),
    })
}

pub const P_CLAMP: f64 = 1e-15;

/// `C = sum w_a tan(pi (1/2 - p_a))`, `P = 1/2 - arctan(C) / pi`.
pub fn cauchy_combine(pvals: &[f64], weights: &[f64]) -> Result<f64> {
    if pvals.is_empty() || pvals.len() != weights.len() {
        return Err(Error::BadWeights(format!(
            "{} p-values but {} weights",
            pvals.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::BadWeights("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights(format!("weights sum to {total}, not 1")));
    }
    if pvals.iter().any(|p| p.is_nan()) {
        return Err(Error::InvalidInput("NaN p-value".into()));
    }
    let c: f64 = pvals
        .iter()
        .zip(weights)
        .map(|(&p, &w)| {
            let p = p.clamp(P_CLAMP, 1.0 - P_CLAMP);
            // tan(pi (1/2 - p)) = cot(pi p); the cotangent form keeps small p accurate
            let t = if p < 0.5 {
                1.0 / (PI * p).tan()
            } else {
                (PI * (0.5 - p)).tan()
            };
            w * t
        })
        .sum();
    let out = if c > 1.0 {
        (1.0 / c).atan() / PI
    } else {
        0.5 - c.atan() / PI
    };
    Ok(out)
}

/// What produced the constants used in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub source: Source,
    pub sigma2: f64,
    /// q -> provenance of the variance constant.
    pub orders: BTreeMap<String, Provenance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub kind: CoefficientKind,
    pub n: usize,
    pub p: usize,
    pub norms: BTreeMap<String, LqStatistic>,
    pub max: Option<MaxStatistic>,
    pub combined: BTreeMap<String, f64>,
    pub weights: Vec<f64>,
    pub calibration: CalibrationSummary,
    /// Pearson is a benchmark outside the rank-based theory.
    pub benchmark: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TestReport {
    /// Every p-value in the report.
    pub fn p_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.norms.values().map(|s| s.p_value).collect();
        out.extend(self.max.iter().map(|m| m.p_value));
        out.extend(self.combined.values());
        out
    }

    /// p-value of one norm.
    pub fn norm_p(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::Inf => self.max.map(|m| m.p_value),
            Norm::L(q) => self.norms.get(&q.to_string()).map(|s| s.p_value),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestOptions {
    pub norms: Vec<Norm>,
    /// Weights over `norms` (equal when absent).
    pub weights: Option<Vec<f64>>,
    pub ties: TiePolicy,
    pub seed: Option<u64>,
}

impl Default for TestOptions {
    fn default() -> Self {
        TestOptions {
            norms: vec![Norm::L(2), Norm::L(4), Norm::L(6), Norm::Inf],
            weights: None,
            ties: TiePolicy::Reject,
            seed: None,
        }
    }
}

fn norm_statistic(
    sheet: &PairStatSheet,
    calib: &CalibrationRecord,
    norm: Norm,
) -> Result<(Option<LqStatistic>, Option<MaxStatistic>)> {
    Ok(match norm {
        Norm::L(q) => (Some(lq_statistic(sheet, calib, q)?), None),
        Norm::Inf if sheet.kind.is_degenerate() => (
            None,
            Some(max_statistic_q(sheet, calib.spectral.as_ref(), sheet.n, sheet.p)?),
        ),
        Norm::Inf => (None, Some(max_statistic_vw(sheet, calib.sigma2, sheet.p)?)),
    })
}

/// Full report from a precomputed sheet.
pub fn report_from_sheet(
    sheet: &PairStatSheet,
    calib: &CalibrationRecord,
    opts: &TestOptions,
) -> Result<TestReport> {
    calib.check_matches(sheet.kind, sheet.n)?;
    let mut norms: Vec<Norm> = opts.norms.clone();
    norms.sort();
    norms.dedup();
    if norms.is_empty() {
        return Err(Error::InvalidInput("no norms requested".into()));
    }
    let weights = match &opts.weights {
        Some(w) if w.len() != norms.len() => {
            return Err(Error::BadWeights(format!(
                "{} weights for {} norms",
                w.len(),
                norms.len()
            )))
        }
        Some(w) => w.clone(),
        None => vec![1.0 / norms.len() as f64; norms.len()],
    };
    let mut all = norms.clone();
    all.extend([Norm::L(2), Norm::Inf]);
    all.sort();
    all.dedup();
    let mut lq = BTreeMap::new();
    let mut max = None;
    for &norm in &all {
        let (l, m) = norm_statistic(sheet, calib, norm)?;
        if let Some(l) = l {
            lq.insert(l.q.to_string(), l);
        }
        if m.is_some() {
            max = m;
        }
    }
    let p_of = |norm: Norm| match norm {
        Norm::L(q) => lq[&q.to_string()].p_value,
        Norm::Inf => max.expect("maximum computed").p_value,
    };
    let mut combined = BTreeMap::new();
    let base = [Norm::L(2), Norm::Inf];
    combined.insert(
        norm_set_key(&base),
        cauchy_combine(&base.map(p_of), &[0.5, 0.5])?,
    );
    let requested: Vec<f64> = norms.iter().map(|&nm| p_of(nm)).collect();
    combined.insert(norm_set_key(&norms), cauchy_combine(&requested, &weights)?);
    let orders = calib
        .entries
        .iter()
        .map(|e| (e.q.to_string(), e.v_source))
        .collect();
    Ok(TestReport {
        kind: sheet.kind,
        n: sheet.n,
        p: sheet.p,
        norms: lq,
        max,
        combined,
        weights,
        calibration: CalibrationSummary {
            source: calib.source,
            sigma2: calib.sigma2,
            orders,
        },
        benchmark: sheet.kind == CoefficientKind::Pearson,
        seed: opts.seed,
    })
}

/// Rank (or standardize) the data, build the pairwise sheet and report.
pub fn run_test(
    data: &DataMatrix,
    kind: CoefficientKind,
    calib: &CalibrationRecord,
    opts: &TestOptions,
) -> Result<TestReport> {
    let sheet = if kind == CoefficientKind::Pearson {
        crate::kernels::pearson_sheet(data)?
    } else {
        let ranks = compute_ranks(data, opts.ties)?;
        sheet_for(data, &ranks, kind)?
    };
    report_from_sheet(&sheet, calib, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::{calibrate, spectral_constants};

    fn sheet(kind: CoefficientKind, n: usize, p: usize, values: Vec<f64>) -> PairStatSheet {
        PairStatSheet::new(kind, n, p, values).unwrap()
    }

    #[test]
    fn zero_sheet_l2() {
        let cal = calibrate(CoefficientKind::Spearman, 20, None).unwrap();
        let sh = sheet(CoefficientKind::Spearman, 20, 5, vec![0.0; 10]);
        let st = lq_statistic(&sh, &cal, 2).unwrap();
        assert!((st.s + 10.0 * cal.entry(2).unwrap().mu).abs() < 1e-15);
        assert!(st.s < 0.0 && st.p_value > 0.5);
    }

    #[test]
    fn single_pair() {
        let cal = calibrate(CoefficientKind::Kendall, 30, None).unwrap();
        let t = 0.3;
        let sh = sheet(CoefficientKind::Kendall, 30, 2, vec![t]);
        for q in [2u32, 4, 6] {
            let e = cal.entry(q).unwrap();
            let st = lq_statistic(&sh, &cal, q).unwrap();
            let want = (t.powi(q as i32) - e.mu) / e.v.sqrt();
            assert!((st.z - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        let other = calibrate(CoefficientKind::Kendall, 31, None).unwrap();
        assert!(matches!(lq_statistic(&sh, &other, 2), Err(Error::CalibrationMismatch(_))));
    }

    #[test]
    fn cauchy_examples() {
        for p0 in [1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let got = cauchy_combine(&[p0; 4], &[0.25; 4]).unwrap();
            assert!(((got - p0) / p0).abs() < 1e-12, "{p0} -> {got}");
        }
        assert!((cauchy_combine(&[0.2], &[1.0]).unwrap() - 0.2).abs() < 1e-15);
        let got = cauchy_combine(&[0.01, 0.5, 0.5, 0.5], &[0.25; 4]).unwrap();
        let want = 0.5 - (0.25 * (0.49 * PI).tan()).atan() / PI;
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.0397).abs() < 5e-4);
        assert!(cauchy_combine(&[0.1, 0.2], &[0.6, 0.6]).is_err());
        assert!(cauchy_combine(&[0.1, 0.2], &[1.0]).is_err());
        assert!(cauchy_combine(&[0.1], &[-1.0]).is_err());
        let tiny = cauchy_combine(&[0.0, 0.5], &[0.5, 0.5]).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-14);
    }

    #[test]
    fn max_monotone_and_dimension() {
        let mut vals = vec![0.1, -0.2, 0.05];
        let sh = sheet(CoefficientKind::Spearman, 50, 3, vals.clone());
        let a = max_statistic_vw(&sh, 1.0 / 49.0, 3).unwrap();
        vals[1] = -0.4;
        let sh2 = sheet(CoefficientKind::Spearman, 50, 3, vals);
        let b = max_statistic_vw(&sh2, 1.0 / 49.0, 3).unwrap();
        assert!(b.m > a.m && b.p_value < a.p_value);
        assert!(a.p_value > 0.0 && a.p_value < 1.0);
        assert!(matches!(max_statistic_vw(&sh, 0.02, 2), Err(Error::DimensionTooSmall(2))));
        for y in [-5.0, 0.0, 3.0, 10.0] {
            assert!(gumbel_g_cdf(y) < gumbel_g_cdf(y + 0.5));
        }
    }

    #[test]
    fn max_q_uses_spectral() {
        let sc = spectral_constants(CoefficientKind::TauStar).unwrap();
        let c = f_constant(&sc);
        assert!((c - 2f64.powf(-1.5) * sc.kappa / PI.sqrt()).abs() < 1e-14);
        let sh = sheet(CoefficientKind::TauStar, 40, 3, vec![0.01, -0.02, 0.03]);
        assert!(matches!(max_statistic_q(&sh, None, 40, 3), Err(Error::MissingSpectral)));
        let m = max_statistic_q(&sh, Some(&sc), 40, 3).unwrap();
        assert_eq!(m.family, MaxFamily::GumbelF);
        assert!(m.p_value > 0.0 && m.p_value < 1.0);
        assert!(gumbel_f_cdf(&sc, 1.0) < gumbel_f_cdf(&sc, 2.0));
    }

    #[test]
    fn norm_parsing() {
        assert_eq!(
            parse_norms("inf,2,6,4").unwrap(),
            vec![Norm::L(2), Norm::L(4), Norm::L(6), Norm::Inf]
        );
        assert_eq!(norm_set_key(&parse_norms("2,inf").unwrap()), "2,inf");
        assert!(parse_norms("3").is_err());
    }

    #[test]
    fn dependent_data_rejects_everything() {
        let n = 50;
        let col: Vec<f64> = (0..n).map(|i| ((i * 37) % n) as f64).collect();
        let data = DataMatrix::from_columns(vec![col; 10]).unwrap();
        let cal = calibrate(CoefficientKind::Kendall, n, None).unwrap();
        let rep = run_test(&data, CoefficientKind::Kendall, &cal, &TestOptions::default()).unwrap();
        assert_eq!(rep.p_values().len(), 6);
        assert!(rep.p_values().iter().all(|&p| p < 1e-6), "{rep:?}");
        let json = serde_json::to_string(&rep).unwrap();
        let back: TestReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }
}
