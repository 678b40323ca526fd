use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jammers::JammerSpec;
use crate::receivers::ReceiverKind;

use super::config::RunConfig;
use super::metrics::{aggregate, Aggregate};
use super::trial::{run_trial_with, TrialResult};

/// Largest fraction of failed trials a sweep tolerates.
pub const MAX_TRIAL_ERROR_FRACTION: f64 = 1e-3;

pub const CSV_HEADER: &str = "jammer,receiver,snr_db,frames,ber,mer_percent,mean_est_rank,trial_errors";

/// Grid of (jammer, receiver, SNR) cells.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub config: RunConfig,
    pub snr_points_db: Vec<f64>,
    /// `None` runs without a jammer.
    pub jammers: Vec<Option<JammerSpec>>,
    pub receivers: Vec<ReceiverKind>,
    pub frames_per_point: usize,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.frames_per_point == 0 {
            return Err(Error::InvalidParameter("frames per point must be at least 1".into()));
        }
        if self.snr_points_db.is_empty() || self.jammers.is_empty() || self.receivers.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one SNR, jammer and receiver".into()));
        }
        for spec in self.jammers.iter().flatten() {
            spec.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub jammer: String,
    pub receiver: ReceiverKind,
    pub snr_db: f64,
    pub metrics: Option<Aggregate>,
    pub trial_errors: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub cells: Vec<CellResult>,
    pub csv: String,
}

impl SweepOutput {
    pub fn cell(&self, jammer: &str, receiver: ReceiverKind, snr_db: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.jammer == jammer && c.receiver == receiver && c.snr_db == snr_db)
    }
}

/// `%g`-style formatting with 6 significant digits.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn jammer_label(spec: Option<&JammerSpec>) -> String {
    spec.map_or_else(|| "none".to_string(), |s| s.kind.name().to_string())
}

fn csv_row(out: &mut String, cell: &CellResult) {
    let (frames, ber, mer, rank) = match &cell.metrics {
        Some(m) => (m.frames, format_sig6(m.ber), format_sig6(m.mer_percent), format_sig6(m.mean_rank)),
        None => (0, "nan".into(), "nan".into(), "nan".into()),
    };
    writeln!(
        out,
        "{},{},{},{frames},{ber},{mer},{rank},{}",
        cell.jammer,
        cell.receiver.name(),
        format_sig6(cell.snr_db),
        cell.trial_errors
    )
    .expect("writing to a String");
}

/// Runs every cell of the plan on a pool of `parallelism` threads.
///
/// Trial `k` of every cell uses substream index `k`, and results are merged
/// in trial order, so the output does not depend on `parallelism`.
pub fn run_sweep(plan: &SweepPlan, parallelism: usize) -> Result<SweepOutput> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Computation(format!("thread pool: {e}")))?;

    let mut cells = Vec::new();
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let (mut failed, mut attempted) = (0usize, 0usize);

    for spec in &plan.jammers {
        for &receiver in &plan.receivers {
            let rx = receiver.build::<f64>(plan.config.receiver);
            for &snr in &plan.snr_points_db {
                let outcomes: Vec<Result<TrialResult>> = pool.install(|| {
                    (0..plan.frames_per_point as u64)
                        .into_par_iter()
                        .map(|k| run_trial_with(&plan.config, spec.as_ref(), rx.as_ref(), snr, k).map(|(r, _)| r))
                        .collect()
                });
                let mut ok = Vec::with_capacity(outcomes.len());
                let mut errors = 0usize;
                for (k, o) in outcomes.into_iter().enumerate() {
                    match o {
                        Ok(r) => ok.push(r),
                        Err(e) => {
                            warn!("{} / {receiver} / {snr} dB: trial {k} excluded: {e}", jammer_label(spec.as_ref()));
                            errors += 1;
                        }
                    }
                }
                failed += errors;
                attempted += plan.frames_per_point;
                let cell = CellResult {
                    jammer: jammer_label(spec.as_ref()),
                    receiver,
                    snr_db: snr,
                    metrics: if ok.is_empty() { None } else { Some(aggregate(&ok)?) },
                    trial_errors: errors,
                };
                if let Some(m) = &cell.metrics {
                    info!("{} / {receiver} / {snr} dB: ber {:.3e} over {} frames", cell.jammer, m.ber, m.frames);
                }
                csv_row(&mut csv, &cell);
                cells.push(cell);
            }
        }
    }
    if failed as f64 > MAX_TRIAL_ERROR_FRACTION * attempted as f64 {
        return Err(Error::Computation(format!("{failed} of {attempted} trials failed")));
    }
    Ok(SweepOutput { cells, csv })
}

/// Writes `contents` to `path` through a temporary file in the same directory
/// and an atomic rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jammers::JammerKind;

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(10.0), "10");
        assert_eq!(format_sig6(-10.0), "-10");
        assert_eq!(format_sig6(0.1234567), "0.123457");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e+06");
        assert_eq!(format_sig6(1.5e-5), "1.5e-05");
        assert_eq!(format_sig6(0.0001), "0.0001");
        assert_eq!(format_sig6(999999.5), "1e+06");
        assert_eq!(format_sig6(f64::INFINITY), "inf");
    }

    fn tiny_plan() -> SweepPlan {
        let config = RunConfig::default();
        SweepPlan {
            jammers: vec![Some(config.jammer_spec(JammerKind::Barrage1))],
            config,
            snr_points_db: vec![10.0],
            receivers: vec![ReceiverKind::MashLmmse],
            frames_per_point: 10,
        }
    }

    #[test]
    fn one_cell_gives_header_and_one_row() {
        let out = run_sweep(&tiny_plan(), 1).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("barrage,mash-l,10,10,"));
        assert!(lines[1].ends_with(",0"));
    }

    #[test]
    fn csv_is_independent_of_parallelism() {
        let mut plan = tiny_plan();
        plan.receivers.push(ReceiverKind::BaselineLmmse);
        plan.jammers.push(None);
        assert_eq!(run_sweep(&plan, 1).unwrap().csv, run_sweep(&plan, 4).unwrap().csv);
    }

    #[test]
    fn rejects_empty_plans() {
        let mut p = tiny_plan();
        p.frames_per_point = 0;
        assert!(run_sweep(&p, 1).is_err());
        let mut p = tiny_plan();
        p.receivers.clear();
        assert!(run_sweep(&p, 1).is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
