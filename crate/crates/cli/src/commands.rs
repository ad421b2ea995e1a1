use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use ranklq::calib::{
    calibrate, leading_calibration, leading_constants, load_calibration, record_to_json, spectral_constants,
    CalibrationRecord, McSettings,
};
use ranklq::exact::{fmt_ratio, to_f64};
use ranklq::io::ingest_csv;
use ranklq::moments::{bruteforce_moment, kendall_moment, pearson_gaussian_moment, spearman_moment_partition};
use ranklq::patternenum::{moment_from_omega, omega_with, OmegaKey, OmegaOptions};
use ranklq::sim::{
    calibration_seed, power_curve_with, size_table_with, write_rows_csv, DesignKind, ExperimentConfig, MarginalLaw,
    RejectionRow,
};
use ranklq::stats::{parse_norms, run_test, TestOptions, TestReport};
use ranklq::{BigRational, CoefficientKind, Error, Result, TiePolicy};

use crate::cache;
use crate::{
    CalibrateArgs, Command, ConstantsCmd, Format, MomentsArgs, SimCommon, SimulateCmd, TableFormat, TestArgs, Ties,
};

const FULL_SCALE_GRID: [(usize, usize); 4] = [(100, 100), (100, 200), (200, 200), (200, 400)];

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Test(a) => cmd_test(&a),
        Command::Calibrate(a) => cmd_calibrate(&a),
        Command::Moments(a) => cmd_moments(&a),
        Command::Constants(c) => cmd_constants(c),
        Command::Simulate(s) => cmd_simulate(s),
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::InvalidInput(format!("bad {what} '{t}'")))
        })
        .collect()
}

fn parse_grid(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|t| {
            let (n, p) = t
                .trim()
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::InvalidInput(format!("grid point '{t}' is not NxP")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("grid point '{t}' is not NxP")))
            };
            Ok((num(n)?, num(p)?))
        })
        .collect()
}

/// Calibration for a test: explicit file, then exact, then cache, then Monte Carlo.
fn resolve_calibration(a: &TestArgs, n: usize) -> Result<CalibrationRecord> {
    if let Some(path) = &a.calibration {
        let rec = load_calibration(path)?;
        rec.check_matches(a.kind, n)?;
        return Ok(rec);
    }
    match calibrate(a.kind, n, None) {
        Err(Error::CalibrationUnavailable(msg)) => {
            if let Some(rec) = cache::load(a.kind, n, a.b, a.seed) {
                return Ok(rec);
            }
            if a.no_auto_calibrate {
                return Err(Error::CalibrationUnavailable(format!(
                    "{msg}; pass --calibration or drop --no-auto-calibrate"
                )));
            }
            let rec = calibrate(
                a.kind,
                n,
                Some(McSettings {
                    replicates: a.b,
                    seed: a.seed,
                }),
            )?;
            cache::store(&rec, a.b, a.seed);
            Ok(rec)
        }
        other => other,
    }
}

#[derive(Serialize)]
struct TestOutput {
    alpha: f64,
    /// p <= alpha for every p-value in the report.
    reject: BTreeMap<String, bool>,
    #[serde(flatten)]
    report: TestReport,
}

fn cmd_test(a: &TestArgs) -> Result<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0,1) (got {})", a.alpha)));
    }
    let data = ingest_csv(&a.input)?;
    let norms = parse_norms(&a.norms)?;
    let weights = a
        .weights
        .as_deref()
        .map(|w| parse_list::<f64>(w, "weight"))
        .transpose()?;
    let cal = resolve_calibration(a, data.n())?;
    let opts = TestOptions {
        norms,
        weights,
        ties: match a.ties {
            Ties::Reject => TiePolicy::Reject,
            Ties::Random => TiePolicy::RandomBreak(a.seed),
        },
        seed: Some(a.seed),
    };
    let report = run_test(&data, a.kind, &cal, &opts)?;
    let mut reject = BTreeMap::new();
    for (q, s) in &report.norms {
        reject.insert(q.clone(), s.p_value <= a.alpha);
    }
    if let Some(m) = report.max {
        reject.insert("inf".to_string(), m.p_value <= a.alpha);
    }
    for (k, p) in &report.combined {
        reject.insert(k.clone(), *p <= a.alpha);
    }
    emit_json(
        &TestOutput {
            alpha: a.alpha,
            reject,
            report,
        },
        a.out.as_deref(),
    )
}

fn cmd_calibrate(a: &CalibrateArgs) -> Result<()> {
    let rec = if a.leading {
        leading_calibration(a.kind, a.n)?
    } else {
        let rec = calibrate(
            a.kind,
            a.n,
            Some(McSettings {
                replicates: a.b,
                seed: a.seed,
            }),
        )?;
        if rec.mc.is_some() {
            cache::store(&rec, a.b, a.seed);
        }
        rec
    };
    let mut w = sink(a.out.as_deref())?;
    w.write_all(record_to_json(&rec).as_bytes())?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn print_ratio(value: &BigRational, format: Format, extra: serde_json::Value) -> Result<()> {
    match format {
        Format::Text => println!("{}\t{:e}", fmt_ratio(value), to_f64(value)),
        Format::Json => {
            let mut obj = extra;
            obj["exact"] = json!(fmt_ratio(value));
            obj["decimal"] = json!(to_f64(value));
            emit_json(&obj, None)?;
        }
    }
    Ok(())
}

fn cmd_moments(a: &MomentsArgs) -> Result<()> {
    let (value, method) = if a.brute_force {
        (bruteforce_moment(a.kind, a.r, a.n)?, "enumeration")
    } else {
        match a.kind {
            CoefficientKind::Spearman => (spearman_moment_partition(a.r, a.n)?, "partition"),
            CoefficientKind::Kendall => (kendall_moment(a.r, a.n)?, "cumulant"),
            CoefficientKind::Pearson => (pearson_gaussian_moment(a.r, a.n), "gaussian"),
            kind => (moment_from_omega(kind, a.r, a.n)?, "omega"),
        }
    };
    print_ratio(
        &value,
        a.format,
        json!({"kind": a.kind.short_name(), "r": a.r, "n": a.n, "method": method}),
    )
}

fn cmd_constants(c: ConstantsCmd) -> Result<()> {
    match c {
        ConstantsCmd::Omega {
            kind,
            r,
            b,
            long_running,
            format,
        } => {
            let key = OmegaKey::new(kind, r, b)?;
            let opts = OmegaOptions {
                long_running,
                ..OmegaOptions::default()
            };
            let (value, source) = omega_with(key, opts)?;
            print_ratio(
                &value,
                format,
                json!({"kind": kind.short_name(), "r": r, "b": b, "source": source}),
            )
        }
        ConstantsCmd::Leading { kind, q, n } => {
            let (mu, v) = leading_constants(kind, q, n)?;
            emit_json(&json!({"kind": kind.short_name(), "q": q, "n": n, "mu": mu, "v": v}), None)
        }
        ConstantsCmd::Spectral { kind } => emit_json(&spectral_constants(kind)?, None),
    }
}

fn experiment(c: &SimCommon, laws: Vec<MarginalLaw>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig {
        kinds: parse_list(&c.kinds, "coefficient")?,
        laws,
        grid: parse_grid(&c.np)?,
        reps: c.reps,
        alpha: c.alpha,
        seed: c.seed,
        mc_replicates: c.b,
    };
    if c.full_scale {
        cfg.grid = FULL_SCALE_GRID.to_vec();
        cfg.reps = 1000;
        cfg.mc_replicates = 1_000_000;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_table(rows: &[RejectionRow], c: &SimCommon) -> Result<()> {
    match c.format {
        TableFormat::Csv => {
            let mut w = sink(c.out.as_deref())?;
            write_rows_csv(rows, &mut w)?;
            w.flush()?;
            Ok(())
        }
        TableFormat::Json => emit_json(&rows, c.out.as_deref()),
    }
}

fn cmd_simulate(s: SimulateCmd) -> Result<()> {
    let (common, rows) = match s {
        SimulateCmd::Size { common, laws } => {
            let cfg = experiment(&common, parse_list(&laws, "marginal law")?)?;
            let cals = cached_calibrations(&cfg)?;
            let rows = size_table_with(&cfg, &cals)?;
            (common, rows)
        }
        SimulateCmd::Power { common, design, ks } => {
            let design: DesignKind = design.parse()?;
            let ks: Vec<usize> = parse_list(&ks, "k")?;
            let cfg = experiment(&common, vec![MarginalLaw::StdNormal])?;
            let cals = cached_calibrations(&cfg)?;
            let rows = power_curve_with(&cfg, design, &ks, &cals)?;
            (common, rows)
        }
    };
    write_table(&rows, &common)
}

type CalMap = BTreeMap<(CoefficientKind, usize), CalibrationRecord>;

/// Same calibrations as the library would build, reusing cache entries.
fn cached_calibrations(cfg: &ExperimentConfig) -> Result<CalMap> {
    let mut ns: Vec<usize> = cfg.grid.iter().map(|g| g.0).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = CalMap::new();
    for &kind in &cfg.kinds {
        for &n in &ns {
            let mc_seed = calibration_seed(cfg.seed, n);
            let rec = match cache::load(kind, n, cfg.mc_replicates, mc_seed) {
                Some(rec) => rec,
                None => {
                    let settings = McSettings {
                        replicates: cfg.mc_replicates,
                        seed: mc_seed,
                    };
                    let rec = calibrate(kind, n, Some(settings))?;
                    if rec.mc.is_some() {
                        cache::store(&rec, cfg.mc_replicates, mc_seed);
                    }
                    rec
                }
            };
            out.insert((kind, n), rec);
        }
    }
    Ok(out)
}
