//! Null-size and power experiments.

mod data;

pub use data::{gen_alternative, gen_null, AlternativeDesign, DesignKind, MarginalLaw};

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calib::{calibrate, CalibrationRecord, McSettings};
use crate::error::{Error, Result};
use crate::kernels::{compute_ranks, sheet_for, CoefficientKind, DataMatrix, TiePolicy};
use crate::rng::derive_seed;
use crate::stats::{norm_set_key, report_from_sheet, Norm, TestOptions, TestReport};

/// Column labels of the rejection table, in output order.
pub const TABLE_NORMS: [&str; 6] = ["2", "4", "6", "inf", "2,inf", "2,4,6,inf"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kinds: Vec<CoefficientKind>,
    pub laws: Vec<MarginalLaw>,
    pub grid: Vec<(usize, usize)>,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Monte Carlo size for the moments without exact formulas.
    pub mc_replicates: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kinds: CoefficientKind::ALL.to_vec(),
            laws: vec![MarginalLaw::StdNormal],
            grid: vec![(100, 50)],
            reps: 200,
            alpha: 0.05,
            seed: crate::rng::DEFAULT_SEED,
            mc_replicates: 100_000,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidInput("replication count must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha must lie in (0,1) (got {})", self.alpha)));
        }
        if self.kinds.is_empty() || self.grid.is_empty() {
            return Err(Error::InvalidInput("need at least one coefficient and one (n,p)".into()));
        }
        for &(n, p) in &self.grid {
            if p < 3 || n < 6 {
                return Err(Error::InvalidInput(format!("grid point ({n},{p}) too small")));
            }
        }
        Ok(())
    }
}

/// One line of a size or power table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectionRow {
    pub kind: CoefficientKind,
    /// Marginal law (size) or alternative design (power).
    pub setting: String,
    pub n: usize,
    pub p: usize,
    pub k: Option<usize>,
    pub norm: String,
    pub reject_rate: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Monte Carlo seed of the calibration at sample size n under experiment `seed`.
pub fn calibration_seed(seed: u64, n: usize) -> u64 {
    derive_seed(seed, 0xCA1B_0000 + n as u64)
}

/// Calibrations for every (kind, n) of a configuration.
pub fn calibrations(
    kinds: &[CoefficientKind],
    ns: &[usize],
    mc_replicates: usize,
    seed: u64,
) -> Result<BTreeMap<(CoefficientKind, usize), CalibrationRecord>> {
    let mut out = BTreeMap::new();
    for &kind in kinds {
        for &n in ns {
            let mc = McSettings {
                replicates: mc_replicates,
                seed: calibration_seed(seed, n),
            };
            out.insert((kind, n), calibrate(kind, n, Some(mc))?);
        }
    }
    Ok(out)
}

fn options() -> TestOptions {
    TestOptions {
        norms: vec![Norm::L(2), Norm::L(4), Norm::L(6), Norm::Inf],
        ..TestOptions::default()
    }
}

fn rejections(report: &TestReport, alpha: f64) -> [bool; 6] {
    let pv = |key: &str| -> f64 {
        match key {
            "inf" => report.max.map(|m| m.p_value).unwrap_or(1.0),
            k if k.contains(',') => report.combined.get(k).copied().unwrap_or(1.0),
            k => report.norms.get(k).map(|s| s.p_value).unwrap_or(1.0),
        }
    };
    TABLE_NORMS.map(|k| pv(k) <= alpha)
}

/// Reports for every kind on one dataset (ranks shared).
pub fn reports_for(
    data: &DataMatrix,
    kinds: &[CoefficientKind],
    cals: &BTreeMap<(CoefficientKind, usize), CalibrationRecord>,
) -> Result<Vec<TestReport>> {
    let ranks = compute_ranks(data, TiePolicy::RandomBreak(0))?;
    let opts = options();
    kinds
        .iter()
        .map(|&kind| {
            let cal = cals.get(&(kind, data.n())).ok_or_else(|| {
                Error::CalibrationUnavailable(format!("{kind} at n = {}", data.n()))
            })?;
            let sheet = sheet_for(data, &ranks, kind)?;
            report_from_sheet(&sheet, cal, &opts)
        })
        .collect()
}

/// Rejection counts over replicates; `gen(rep)` builds replicate `rep`.
fn run_reps(
    reps: usize,
    kinds: &[CoefficientKind],
    cals: &BTreeMap<(CoefficientKind, usize), CalibrationRecord>,
    alpha: f64,
    gen: impl Fn(usize) -> Result<DataMatrix> + Sync,
) -> Result<Vec<[usize; 6]>> {
    let per_rep: Vec<Vec<[bool; 6]>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let data = gen(rep)?;
            Ok(reports_for(&data, kinds, cals)?
                .iter()
                .map(|r| rejections(r, alpha))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut counts = vec![[0usize; 6]; kinds.len()];
    for rep in &per_rep {
        for (c, rej) in counts.iter_mut().zip(rep) {
            for (slot, &hit) in c.iter_mut().zip(rej) {
                *slot += hit as usize;
            }
        }
    }
    Ok(counts)
}

fn rows_from_counts(
    kinds: &[CoefficientKind],
    counts: &[[usize; 6]],
    setting: &str,
    (n, p, k): (usize, usize, Option<usize>),
    reps: usize,
    seed: u64,
) -> Vec<RejectionRow> {
    let mut rows = Vec::new();
    for (&kind, c) in kinds.iter().zip(counts) {
        for (norm, &hits) in TABLE_NORMS.iter().zip(c) {
            rows.push(RejectionRow {
                kind,
                setting: setting.to_string(),
                n,
                p,
                k,
                norm: norm.to_string(),
                reject_rate: hits as f64 / reps as f64,
                reps,
                seed,
            });
        }
    }
    rows
}

/// Empirical null rejection rates per (kind, law, (n,p), norm).
pub fn size_table(config: &ExperimentConfig) -> Result<Vec<RejectionRow>> {
    config.validate()?;
    let mut ns: Vec<usize> = config.grid.iter().map(|g| g.0).collect();
    ns.sort_unstable();
    ns.dedup();
    let cals = calibrations(&config.kinds, &ns, config.mc_replicates, config.seed)?;
    size_table_with(config, &cals)
}

/// As `size_table` with precomputed calibrations.
pub fn size_table_with(
    config: &ExperimentConfig,
    cals: &BTreeMap<(CoefficientKind, usize), CalibrationRecord>,
) -> Result<Vec<RejectionRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for (li, &law) in config.laws.iter().enumerate() {
        for (gi, &(n, p)) in config.grid.iter().enumerate() {
            let base = derive_seed(config.seed, ((li as u64) << 32) | gi as u64);
            let counts = run_reps(config.reps, &config.kinds, cals, config.alpha, |rep| {
                Ok(gen_null(n, p, law, derive_seed(base, rep as u64)))
            })?;
            rows.extend(rows_from_counts(
                &config.kinds,
                &counts,
                law.name(),
                (n, p, None),
                config.reps,
                config.seed,
            ));
        }
    }
    Ok(rows)
}

/// Rejection rates under a sparse alternative for each k.
pub fn power_curve(
    config: &ExperimentConfig,
    design: DesignKind,
    ks: &[usize],
) -> Result<Vec<RejectionRow>> {
    config.validate()?;
    let mut ns: Vec<usize> = config.grid.iter().map(|g| g.0).collect();
    ns.sort_unstable();
    ns.dedup();
    let cals = calibrations(&config.kinds, &ns, config.mc_replicates, config.seed)?;
    power_curve_with(config, design, ks, &cals)
}

pub fn power_curve_with(
    config: &ExperimentConfig,
    design: DesignKind,
    ks: &[usize],
    cals: &BTreeMap<(CoefficientKind, usize), CalibrationRecord>,
) -> Result<Vec<RejectionRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for (gi, &(n, p)) in config.grid.iter().enumerate() {
        for &k in ks {
            let d = AlternativeDesign::new(design, k, n, p)?;
            let base = derive_seed(config.seed, ((k as u64) << 40) | ((gi as u64) << 8) | design as u64);
            let counts = run_reps(config.reps, &config.kinds, cals, config.alpha, |rep| {
                gen_alternative(&d, derive_seed(base, rep as u64))
            })?;
            rows.extend(rows_from_counts(
                &config.kinds,
                &counts,
                design.name(),
                (n, p, Some(k)),
                config.reps,
                config.seed,
            ));
        }
    }
    Ok(rows)
}

/// CSV with header `kind,setting,n,p,k,norm,reject_rate,reps,seed`.
pub fn write_rows_csv<W: Write>(rows: &[RejectionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "setting", "n", "p", "k", "norm", "reject_rate", "reps", "seed"])
        .map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.write_record([
            r.kind.short_name().to_string(),
            r.setting.clone(),
            r.n.to_string(),
            r.p.to_string(),
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.norm.clone(),
            format!("{:.4}", r.reject_rate),
            r.reps.to_string(),
            r.seed.to_string(),
        ])
        .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Look up one rate in a table.
pub fn rate(rows: &[RejectionRow], kind: CoefficientKind, setting: &str, k: Option<usize>, norm: &[Norm]) -> Option<f64> {
    let key = norm_set_key(norm);
    rows.iter()
        .find(|r| r.kind == kind && r.setting == setting && r.k == k && r.norm == key)
        .map(|r| r.reject_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            kinds: vec![CoefficientKind::Spearman, CoefficientKind::TauStar],
            laws: vec![MarginalLaw::ScaledChiSq1],
            grid: vec![(30, 6)],
            reps: 12,
            alpha: 0.05,
            seed: 17,
            mc_replicates: 10_000,
        }
    }

    #[test]
    fn size_rows_have_schema_and_are_reproducible() {
        let cfg = small_config();
        let a = size_table(&cfg).unwrap();
        assert_eq!(a.len(), 2 * TABLE_NORMS.len());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let b = pool.install(|| size_table(&cfg).unwrap());
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_rows_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("kind,setting,n,p,k,norm,reject_rate,reps,seed\n"));
        assert_eq!(text.lines().count(), a.len() + 1);
        assert!(rate(&a, CoefficientKind::TauStar, "chisq", None, &[Norm::L(2), Norm::Inf]).is_some());
    }

    #[test]
    fn bad_config_rejected() {
        let mut cfg = small_config();
        cfg.alpha = 1.5;
        assert!(size_table(&cfg).is_err());
        cfg.alpha = 0.05;
        cfg.reps = 0;
        assert!(size_table(&cfg).is_err());
    }

    #[test]
    fn power_rows() {
        let mut cfg = small_config();
        cfg.kinds = vec![CoefficientKind::Kendall];
        cfg.reps = 5;
        let rows = power_curve(&cfg, DesignKind::LinearNormal, &[2, 4]).unwrap();
        assert_eq!(rows.len(), 2 * TABLE_NORMS.len());
        assert!(rows.iter().all(|r| r.k.is_some() && r.setting == "linear"));
    }
}
