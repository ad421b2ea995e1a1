use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CalibrationRecord, McMoments, QEntry, Source, SpectralConstants, MC_POWERS};
use crate::error::{Error, Result};
use crate::kernels::CoefficientKind;
use crate::moments::Provenance;

const FORMAT: &str = "ranklq-calibration/1";

#[derive(Serialize, Deserialize)]
struct EntryFile {
    mu: String,
    v: String,
    mu_source: Provenance,
    v_source: Provenance,
}

#[derive(Serialize, Deserialize)]
struct SpectralFile {
    lambda1: String,
    lambda_sum: String,
    mu1: u32,
    kappa: String,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct RecordFile {
    format: String,
    kind: CoefficientKind,
    n: usize,
    source: String,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    sigma2: String,
    #[serde(default)]
    moments: BTreeMap<String, String>,
    entries: BTreeMap<String, EntryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spectral: Option<SpectralFile>,
}

/// Shortest round-trip decimal form.
fn dec(x: f64) -> String {
    format!("{x:e}")
}

fn parse_dec(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::SchemaMismatch(format!("{what}: not a decimal number: {s:?}")))
}

pub fn record_to_json(rec: &CalibrationRecord) -> String {
    let (source, replicates, seed) = match rec.source {
        Source::Exact => ("exact", None, None),
        Source::LeadingOrder => ("leading_order", None, None),
        Source::MonteCarlo { replicates, seed } => ("monte_carlo", Some(replicates), Some(seed)),
    };
    let moments = rec
        .mc
        .as_ref()
        .map(|m| {
            MC_POWERS
                .iter()
                .zip(m.means)
                .map(|(k, v)| (k.to_string(), dec(v)))
                .collect()
        })
        .unwrap_or_default();
    let entries = rec
        .entries
        .iter()
        .map(|e| {
            (
                e.q.to_string(),
                EntryFile {
                    mu: dec(e.mu),
                    v: dec(e.v),
                    mu_source: e.mu_source,
                    v_source: e.v_source,
                },
            )
        })
        .collect();
    let file = RecordFile {
        format: FORMAT.into(),
        kind: rec.kind,
        n: rec.n,
        source: source.into(),
        replicates,
        seed,
        sigma2: dec(rec.sigma2),
        moments,
        entries,
        spectral: rec.spectral.map(|s| SpectralFile {
            lambda1: dec(s.lambda1),
            lambda_sum: dec(s.lambda_sum),
            mu1: s.mu1,
            kappa: dec(s.kappa),
            m: s.m,
        }),
    };
    serde_json::to_string_pretty(&file).expect("record serializes")
}

pub fn record_from_json(text: &str) -> Result<CalibrationRecord> {
    let file: RecordFile = serde_json::from_str(text)
        .map_err(|e| Error::SchemaMismatch(format!("malformed calibration JSON: {e}")))?;
    if file.format != FORMAT {
        return Err(Error::SchemaMismatch(format!("unknown format tag {:?}", file.format)));
    }
    let source = match (file.source.as_str(), file.replicates, file.seed) {
        ("exact", _, _) => Source::Exact,
        ("leading_order", _, _) => Source::LeadingOrder,
        ("monte_carlo", Some(replicates), Some(seed)) => Source::MonteCarlo { replicates, seed },
        ("monte_carlo", _, _) => {
            return Err(Error::SchemaMismatch("Monte Carlo record needs B and seed".into()))
        }
        (other, _, _) => return Err(Error::SchemaMismatch(format!("unknown source {other:?}"))),
    };
    let mc = if file.moments.is_empty() {
        None
    } else {
        let mut means = [0.0; 5];
        for (slot, k) in means.iter_mut().zip(MC_POWERS) {
            let s = file
                .moments
                .get(&k.to_string())
                .ok_or_else(|| Error::SchemaMismatch(format!("missing moment of power {k}")))?;
            *slot = parse_dec(s, "moment")?;
        }
        let (replicates, seed) = match source {
            Source::MonteCarlo { replicates, seed } => (replicates, seed),
            _ => return Err(Error::SchemaMismatch("moments present in a non-MC record".into())),
        };
        Some(McMoments {
            replicates,
            seed,
            means,
        })
    };
    let mut entries = Vec::new();
    for (q, e) in &file.entries {
        let q: u32 = q
            .parse()
            .map_err(|_| Error::SchemaMismatch(format!("bad order key {q:?}")))?;
        entries.push(QEntry {
            q,
            mu: parse_dec(&e.mu, "mu")?,
            v: parse_dec(&e.v, "v")?,
            mu_source: e.mu_source,
            v_source: e.v_source,
        });
    }
    entries.sort_by_key(|e| e.q);
    let spectral = match &file.spectral {
        Some(s) => Some(SpectralConstants {
            lambda1: parse_dec(&s.lambda1, "lambda1")?,
            lambda_sum: parse_dec(&s.lambda_sum, "lambda_sum")?,
            mu1: s.mu1,
            kappa: parse_dec(&s.kappa, "kappa")?,
            m: s.m,
        }),
        None => None,
    };
    let rec = CalibrationRecord {
        kind: file.kind,
        n: file.n,
        source,
        sigma2: parse_dec(&file.sigma2, "sigma2")?,
        entries,
        mc,
        spectral,
    };
    rec.validate()?;
    Ok(rec)
}

pub fn persist_calibration(path: &Path, rec: &CalibrationRecord) -> Result<()> {
    rec.validate()?;
    std::fs::write(path, record_to_json(rec))
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))
}

pub fn load_calibration(path: &Path) -> Result<CalibrationRecord> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))?;
    record_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::{calibrate, mc_calibrate, McSettings};

    #[test]
    fn round_trip_is_exact() {
        let rec = mc_calibrate(CoefficientKind::BkrR, 20, 10_000, 4).unwrap();
        let back = record_from_json(&record_to_json(&rec)).unwrap();
        assert_eq!(back, rec);
        let mixed = calibrate(
            CoefficientKind::TauStar,
            15,
            Some(McSettings {
                replicates: 10_000,
                seed: 2,
            }),
        )
        .unwrap();
        assert_eq!(record_from_json(&record_to_json(&mixed)).unwrap(), mixed);
        let exact = calibrate(CoefficientKind::Kendall, 40, None).unwrap();
        assert_eq!(record_from_json(&record_to_json(&exact)).unwrap(), exact);
    }

    #[test]
    fn file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cal.json");
        let rec = calibrate(CoefficientKind::Spearman, 50, None).unwrap();
        persist_calibration(&path, &rec).unwrap();
        assert_eq!(load_calibration(&path).unwrap(), rec);
        assert!(matches!(
            load_calibration(&dir.path().join("missing.json")),
            Err(Error::CorruptFile(_))
        ));
    }

    #[test]
    fn nonpositive_variance_rejected() {
        let rec = calibrate(CoefficientKind::Spearman, 50, None).unwrap();
        let text = record_to_json(&rec);
        let v = format!("\"v\": \"{}\"", dec(rec.entry(4).unwrap().v));
        assert!(text.contains(&v));
        let broken = text.replace(&v, "\"v\": \"-1e0\"");
        assert!(matches!(record_from_json(&broken), Err(Error::SchemaMismatch(_))));
        assert!(matches!(record_from_json("{"), Err(Error::SchemaMismatch(_))));
    }
}
