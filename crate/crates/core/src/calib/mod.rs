//! Null calibration records: exact moments where available, seeded Monte
//! Carlo otherwise, plus the large-sample constants of the degenerate class.

mod leading;
mod mc;
mod persist;

pub use leading::{
    grid_kappa, ja_moments, leading_constants, limit_scales, spectral_constants,
    zeta_even_over_pi, JaMomentTable, SpectralConstants,
};
pub use mc::{mc_moments, McMoments, MC_POWERS, MIN_REPLICATES};
pub use persist::{load_calibration, persist_calibration, record_from_json, record_to_json};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ratio, to_f64};
use crate::kernels::CoefficientKind;
use crate::moments::{exact_mu_v, kendall_sigma2, spearman_sigma2, Provenance};
use crate::patternenum::moment_from_omega;

/// Orders q for which L_q statistics are calibrated.
pub const NORM_ORDERS: [u32; 3] = [2, 4, 6];

/// Overall origin of a calibration record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Source {
    Exact,
    MonteCarlo { replicates: usize, seed: u64 },
    LeadingOrder,
}

/// Centering `mu = E T^q` and variance `v = var T^q` for one q.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QEntry {
    pub q: u32,
    pub mu: f64,
    pub v: f64,
    pub mu_source: Provenance,
    pub v_source: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRecord {
    pub kind: CoefficientKind,
    pub n: usize,
    pub source: Source,
    /// var_0 of the single pair statistic.
    pub sigma2: f64,
    pub entries: Vec<QEntry>,
    pub mc: Option<McMoments>,
    pub spectral: Option<SpectralConstants>,
}

impl CalibrationRecord {
    pub fn entry(&self, q: u32) -> Option<&QEntry> {
        self.entries.iter().find(|e| e.q == q)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SchemaMismatch(msg));
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad(format!("sigma2 must be positive (got {})", self.sigma2));
        }
        for e in &self.entries {
            if !NORM_ORDERS.contains(&e.q) {
                return bad(format!("unsupported order q = {}", e.q));
            }
            if !(e.v > 0.0 && e.v.is_finite() && e.mu.is_finite()) {
                return bad(format!("q = {}: need finite mu and v > 0 (v = {})", e.q, e.v));
            }
        }
        if let Source::MonteCarlo { replicates, seed } = self.source {
            match &self.mc {
                Some(m) if m.replicates == replicates && m.seed == seed => {}
                _ => return bad("Monte Carlo record without matching moments".into()),
            }
        }
        if let Some(s) = &self.spectral {
            s.validate()?;
        }
        Ok(())
    }

    /// Fail unless the record was built for this kind and sample size.
    pub fn check_matches(&self, kind: CoefficientKind, n: usize) -> Result<()> {
        if self.kind != kind || self.n != n {
            return Err(Error::CalibrationMismatch(format!(
                "record is for {} with n = {}, statistic is {} with n = {}",
                self.kind, self.n, kind, n
            )));
        }
        Ok(())
    }
}

/// `var_0 T_n`; Pearson uses the Gaussian-null value 1/(n-1).
pub fn sigma2_exact(kind: CoefficientKind, n: usize) -> Result<BigRational> {
    if n < kind.order().max(2) {
        return Err(Error::InvalidInput(format!(
            "{kind} needs n >= {} (got {n})",
            kind.order().max(2)
        )));
    }
    match kind {
        CoefficientKind::Spearman => Ok(spearman_sigma2(n)),
        CoefficientKind::Pearson => Ok(ratio(1, n as i64 - 1)),
        CoefficientKind::Kendall => Ok(kendall_sigma2(n)),
        _ => moment_from_omega(kind, 2, n),
    }
}

/// Record built purely from Monte Carlo moments.
pub fn mc_calibrate(kind: CoefficientKind, n: usize, b: usize, seed: u64) -> Result<CalibrationRecord> {
    if !kind.is_degenerate() {
        return Err(Error::UnsupportedKind(kind));
    }
    let mc = mc_moments(kind, n, b, seed)?;
    let entries = NORM_ORDERS
        .iter()
        .map(|&q| {
            let mu = mc.get(q).unwrap();
            let v = mc.get(2 * q).unwrap() - mu * mu;
            QEntry {
                q,
                mu,
                v,
                mu_source: Provenance::MonteCarlo,
                v_source: Provenance::MonteCarlo,
            }
        })
        .collect();
    let rec = CalibrationRecord {
        kind,
        n,
        source: Source::MonteCarlo {
            replicates: b,
            seed,
        },
        sigma2: mc.get(2).unwrap(),
        entries,
        mc: Some(mc),
        spectral: Some(spectral_constants(kind)?),
    };
    rec.validate()?;
    Ok(rec)
}

/// Monte Carlo settings for the parts of a calibration with no exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McSettings {
    pub replicates: usize,
    pub seed: u64,
}

/// Calibration with every exact quantity filled in exactly and the rest
/// (D and R beyond the second moment, tau* at q = 6) from Monte Carlo.
pub fn calibrate(kind: CoefficientKind, n: usize, mc: Option<McSettings>) -> Result<CalibrationRecord> {
    let sigma2 = sigma2_exact(kind, n)?;
    let mut entries = Vec::new();
    let mut missing = Vec::new();
    for q in NORM_ORDERS {
        match exact_mu_v(kind, q as usize, n)? {
            Some((mu, v, prov)) => entries.push(QEntry {
                q,
                mu: to_f64(&mu),
                v: to_f64(&v),
                mu_source: prov,
                v_source: prov,
            }),
            None => missing.push(q),
        }
    }
    let mut source = Source::Exact;
    let mut mc_moms = None;
    if !missing.is_empty() {
        let settings = mc.ok_or_else(|| {
            Error::CalibrationUnavailable(format!(
                "{kind} at n = {n} needs Monte Carlo moments for q in {missing:?}"
            ))
        })?;
        let m = mc_moments(kind, n, settings.replicates, settings.seed)?;
        for &q in &missing {
            let (mu, mu_source) = if q == 2 {
                (to_f64(&sigma2), Provenance::Exact)
            } else {
                (m.get(q).unwrap(), Provenance::MonteCarlo)
            };
            entries.push(QEntry {
                q,
                mu,
                v: m.get(2 * q).unwrap() - mu * mu,
                mu_source,
                v_source: Provenance::MonteCarlo,
            });
        }
        entries.sort_by_key(|e| e.q);
        source = Source::MonteCarlo {
            replicates: settings.replicates,
            seed: settings.seed,
        };
        mc_moms = Some(m);
    }
    let rec = CalibrationRecord {
        kind,
        n,
        source,
        sigma2: to_f64(&sigma2),
        entries,
        mc: mc_moms,
        spectral: kind.is_degenerate().then(|| spectral_constants(kind)).transpose()?,
    };
    rec.validate()?;
    Ok(rec)
}

/// Record from the large-sample constants only.
pub fn leading_calibration(kind: CoefficientKind, n: usize) -> Result<CalibrationRecord> {
    let mut entries = Vec::new();
    for q in NORM_ORDERS {
        let (mu, v) = leading_constants(kind, q as usize, n)?;
        entries.push(QEntry {
            q,
            mu,
            v,
            mu_source: Provenance::LeadingOrder,
            v_source: Provenance::LeadingOrder,
        });
    }
    let sigma2 = entries[0].mu;
    let rec = CalibrationRecord {
        kind,
        n,
        source: Source::LeadingOrder,
        sigma2,
        entries,
        mc: None,
        spectral: kind.is_degenerate().then(|| spectral_constants(kind)).transpose()?,
    };
    rec.validate()?;
    Ok(rec)
}
