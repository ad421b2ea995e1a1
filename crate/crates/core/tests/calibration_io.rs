use ranklq::calib::{
    calibrate, leading_calibration, load_calibration, persist_calibration, record_from_json, record_to_json,
    McSettings, Source,
};
use ranklq::moments::Provenance;
use ranklq::{CoefficientKind, Error};

#[test]
fn records_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for kind in CoefficientKind::ALL {
        let rec = calibrate(kind, 25, Some(McSettings { replicates: 10_000, seed: 9 })).unwrap();
        let path = dir.path().join(format!("{}.json", kind.short_name()));
        persist_calibration(&path, &rec).unwrap();
        assert_eq!(load_calibration(&path).unwrap(), rec);
    }
}

#[test]
fn exact_kinds_need_no_simulation() {
    for kind in [CoefficientKind::Spearman, CoefficientKind::Kendall, CoefficientKind::Pearson] {
        let rec = calibrate(kind, 40, None).unwrap();
        assert_eq!(rec.source, Source::Exact);
        assert!(rec.mc.is_none());
    }
    let err = calibrate(CoefficientKind::HoeffdingD, 40, None).unwrap_err();
    assert!(matches!(err, Error::CalibrationUnavailable(_)));
}

#[test]
fn taustar_mixes_exact_and_simulated_orders() {
    let rec = calibrate(CoefficientKind::TauStar, 30, Some(McSettings { replicates: 10_000, seed: 1 })).unwrap();
    let prov: Vec<_> = rec.entries.iter().map(|e| (e.q, e.v_source)).collect();
    assert_eq!(
        prov,
        vec![(2, Provenance::Exact), (4, Provenance::Exact), (6, Provenance::MonteCarlo)]
    );
}

#[test]
fn leading_records_are_flagged() {
    let rec = leading_calibration(CoefficientKind::BkrR, 500).unwrap();
    assert_eq!(rec.source, Source::LeadingOrder);
    assert!(rec.entries.iter().all(|e| e.v_source == Provenance::LeadingOrder));
    let back = record_from_json(&record_to_json(&rec)).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn foreign_or_damaged_files_are_rejected() {
    let rec = calibrate(CoefficientKind::Kendall, 12, None).unwrap();
    let text = record_to_json(&rec);
    assert!(matches!(
        record_from_json(&text.replace("ranklq-calibration/1", "other/9")),
        Err(Error::SchemaMismatch(_))
    ));
    assert!(matches!(record_from_json("{\"format\":"), Err(Error::SchemaMismatch(_))));
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_calibration(&dir.path().join("missing.json")),
        Err(Error::CorruptFile(_))
    ));
}

#[test]
fn too_few_replicates() {
    let err = calibrate(CoefficientKind::BkrR, 20, Some(McSettings { replicates: 999, seed: 1 })).unwrap_err();
    assert!(matches!(err, Error::InfeasibleB(999)));
}
