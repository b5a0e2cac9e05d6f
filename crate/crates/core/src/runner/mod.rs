//! Configuration, campaign orchestration and serialization.
//!
//! Exit codes are a stable contract: see [`Exit`].

mod config;
mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::run_detailed;
use crate::lab::{
    two_route_audit, verify_blowup_rate, verify_decomposition_decay, verify_h1_inequality,
    verify_h2_inequality, verify_l2_inequality, CertificateConstant, EnergyLedger, InequalityId,
    InequalityReport, Status,
};
use crate::multipliers::{
    hausdorff_young_constant, radial_grid, sign_certificate_a, sign_certificate_b,
    LebesgueExponent, MIN_CERTIFICATE_POINTS,
};
use crate::{Error, Result};

pub use config::{parse_config, CheckToggles, RunConfig, SweepAxes, CONFIG_KEYS};
pub use io::{read_ledger, read_ledger_file, write_json, write_ledger, write_ledger_file};

/// Version of the report JSON layout.
pub const REPORT_SCHEMA: u32 = 1;
pub const LEDGER_FILE: &str = "ledger.csv";
pub const REPORT_FILE: &str = "report.json";
pub const SWEEP_TABLE_FILE: &str = "certificates.csv";
pub const SWEEP_SUMMARY_FILE: &str = "sweep.json";
/// Alphas checked by `signcheck` when none are given.
pub const DEFAULT_SIGNCHECK_ALPHAS: [f64; 4] = [1.0 / 32.0, 1.0 / 16.0, 3.0 / 32.0, 0.124];
/// Largest bracket value `signcheck` accepts.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// Process exit status.
///
/// `inconclusive` reports do not change the status: they mark claims a
/// finite run cannot settle either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Success = 0,
    Config = 1,
    Violated = 2,
    Numerical = 3,
    Io = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_reports(reports: &[InequalityReport]) -> Self {
        if reports.iter().any(|r| r.status == Status::Violated) {
            Exit::Violated
        } else {
            Exit::Success
        }
    }

    pub fn from_error(error: &Error) -> Self {
        match error {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => Exit::Io,
            Error::NumericalBlowup { .. } | Error::TimeStep { .. } => Exit::Numerical,
            _ => Exit::Config,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    /// SHA-256 of the canonical config text.
    pub config_hash: String,
    pub config: String,
    pub wall_time_seconds: f64,
    pub steps: Option<u64>,
    pub rows: usize,
    pub ledger: Option<PathBuf>,
}

/// Everything one run reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema: u32,
    pub metadata: RunMetadata,
    pub exit_code: i32,
    pub max_route_gap: f64,
    pub initial_energy: Option<f64>,
    pub injected_fault: Option<String>,
    pub reports: Vec<InequalityReport>,
    pub certificates: Vec<CertificateConstant>,
}

impl ReportBundle {
    pub fn report(&self, id: InequalityId) -> Option<&InequalityReport> {
        self.reports.iter().find(|r| r.id == id)
    }

    pub fn exit(&self) -> Exit {
        match self.exit_code {
            0 => Exit::Success,
            2 => Exit::Violated,
            3 => Exit::Numerical,
            4 => Exit::Io,
            _ => Exit::Config,
        }
    }
}

pub fn config_hash(config: &RunConfig) -> String {
    Sha256::digest(config.to_text().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs every enabled check on `ledger`, one report per enabled check.
pub fn check_ledger(ledger: &EnergyLedger, config: &RunConfig) -> Result<Vec<InequalityReport>> {
    let tol = &config.tolerance;
    let alpha = config.simulation.alpha;
    let toggles = config.checks;
    let plan = [
        (toggles.l2, InequalityId::EnergyL2),
        (toggles.h1, InequalityId::GradientH1),
        (toggles.h2, InequalityId::LaplacianH2),
        (toggles.decay, InequalityId::DecompositionDecay),
        (toggles.blowup, InequalityId::BlowupRate),
    ];
    plan.par_iter()
        .filter(|(enabled, _)| *enabled)
        .map(|&(_, id)| match id {
            InequalityId::EnergyL2 => verify_l2_inequality(ledger, tol),
            InequalityId::GradientH1 => verify_h1_inequality(ledger, tol),
            InequalityId::LaplacianH2 => verify_h2_inequality(ledger, tol),
            InequalityId::DecompositionDecay => verify_decomposition_decay(ledger, alpha, tol),
            InequalityId::BlowupRate => Ok(verify_blowup_rate(ledger, config.epsilon)),
        })
        .collect()
}

/// Certificate constants carried by a set of reports.
pub fn certificates(reports: &[InequalityReport], config: &RunConfig) -> Vec<CertificateConstant> {
    let sim = &config.simulation;
    reports
        .iter()
        .filter_map(|r| {
            let raw = match r.id {
                InequalityId::GradientH1 => r.measurement("raw_certificate"),
                InequalityId::DecompositionDecay => r.measurement("raw_fit"),
                _ => None,
            }?;
            Some(CertificateConstant {
                id: r.id,
                value: r.certificate,
                raw,
                n: sim.n,
                delta: sim.initial.delta,
                alpha: sim.alpha,
            })
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_checked_ledger(ledger: &EnergyLedger, path: &Path, strict: bool) -> Result<()> {
    write_ledger_file(ledger, path)?;
    if strict {
        let back = read_ledger_file(path)?;
        let same = back.rows.len() == ledger.rows.len()
            && back.rows.iter().zip(&ledger.rows).all(|(a, b)| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .all(|(x, y)| x.to_bits() == y.to_bits())
            });
        if !same {
            return Err(Error::InvalidLedger(format!(
                "{} does not re-read bit-exactly",
                path.display()
            )));
        }
    }
    Ok(())
}

fn bundle(
    config: &RunConfig,
    ledger: &EnergyLedger,
    reports: Vec<InequalityReport>,
    started: Instant,
    steps: Option<u64>,
    initial_energy: Option<f64>,
    ledger_path: Option<PathBuf>,
) -> ReportBundle {
    let exit = Exit::from_reports(&reports);
    ReportBundle {
        schema: REPORT_SCHEMA,
        metadata: RunMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(config),
            config: config.to_text(),
            wall_time_seconds: started.elapsed().as_secs_f64(),
            steps,
            rows: ledger.len(),
            ledger: ledger_path,
        },
        exit_code: exit.code(),
        max_route_gap: two_route_audit(ledger),
        initial_energy,
        injected_fault: config.inject_fault.map(|f| f.to_string()),
        certificates: certificates(&reports, config),
        reports,
    }
}

/// Simulates, writes `ledger.csv` and `report.json` into `out`, and returns
/// the bundle. An injected fault corrupts the ledger after it is written, so
/// the file on disk stays clean.
pub fn execute_run(config: &RunConfig, out: &Path) -> Result<ReportBundle> {
    config.validate()?;
    let started = Instant::now();
    ensure_dir(out)?;
    let ledger_path = out.join(LEDGER_FILE);
    // fail on an unwritable directory before spending time on the run
    fs::File::create(&ledger_path)?;
    let output = run_detailed(&config.simulation)?;
    write_checked_ledger(&output.ledger, &ledger_path, config.strict)?;
    let checked = match config.inject_fault {
        Some(fault) => fault.apply(&output.ledger, config.simulation.alpha),
        None => output.ledger.clone(),
    };
    let reports = check_ledger(&checked, config)?;
    let result = bundle(
        config,
        &checked,
        reports,
        started,
        Some(output.steps),
        Some(output.initial_energy),
        Some(ledger_path),
    );
    write_json(&result, &out.join(REPORT_FILE))?;
    info!(
        "run in {} finished with exit code {}",
        out.display(),
        result.exit_code
    );
    Ok(result)
}

/// `run`: exit 0 when no enabled check is violated, 2 on a violation, 3 on
/// numerical failure, 4 on I/O failure.
pub fn cmd_run(config: &RunConfig) -> (Exit, Option<ReportBundle>) {
    match execute_run(config, &config.output) {
        Ok(bundle) => (bundle.exit(), Some(bundle)),
        Err(e) => {
            log::error!("{e}");
            (Exit::from_error(&e), None)
        }
    }
}

/// Re-runs the checks on an existing ledger file and writes `report.json`
/// next to the configured output.
pub fn execute_verify(ledger_path: &Path, config: &RunConfig) -> Result<ReportBundle> {
    let started = Instant::now();
    let ledger = read_ledger_file(ledger_path)?;
    let checked = match config.inject_fault {
        Some(fault) => fault.apply(&ledger, config.simulation.alpha),
        None => ledger,
    };
    let reports = check_ledger(&checked, config)?;
    let result = bundle(
        config,
        &checked,
        reports,
        started,
        None,
        None,
        Some(ledger_path.to_path_buf()),
    );
    ensure_dir(&config.output)?;
    write_json(&result, &config.output.join(REPORT_FILE))?;
    Ok(result)
}

pub fn cmd_verify(ledger_path: &Path, config: &RunConfig) -> (Exit, Option<ReportBundle>) {
    match execute_verify(ledger_path, config) {
        Ok(bundle) => (bundle.exit(), Some(bundle)),
        Err(e) => {
            log::error!("{e}");
            (Exit::from_error(&e), None)
        }
    }
}

/// One point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub label: String,
    pub n: usize,
    pub alpha: f64,
    pub delta: Option<f64>,
    pub exit_code: i32,
    pub error: Option<String>,
    pub certificates: Vec<CertificateConstant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema: u32,
    pub config_hash: String,
    pub exit_code: i32,
    pub points: Vec<SweepPoint>,
}

impl SweepSummary {
    /// Certificate of `id` at the point with these `n` and `delta`.
    pub fn certificate(
        &self,
        id: InequalityId,
        n: usize,
        delta: f64,
    ) -> Option<&CertificateConstant> {
        self.points
            .iter()
            .filter(|p| p.n == n && p.delta == Some(delta))
            .flat_map(|p| &p.certificates)
            .find(|c| c.id == id)
    }
}

/// Cross product of the sweep axes, alpha slowest and `n` fastest.
pub fn sweep_points(config: &RunConfig) -> Result<Vec<RunConfig>> {
    if config.sweep.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one nonempty axis".into(),
        ));
    }
    let sim = &config.simulation;
    let or_base = |axis: &[f64], base: Option<f64>| -> Vec<Option<f64>> {
        if axis.is_empty() {
            vec![base]
        } else {
            axis.iter().map(|&v| Some(v)).collect()
        }
    };
    let alphas = or_base(&config.sweep.alpha, Some(sim.alpha));
    let deltas = or_base(&config.sweep.delta, sim.initial.delta);
    let ns = if config.sweep.n.is_empty() {
        vec![sim.n]
    } else {
        config.sweep.n.clone()
    };
    let mut points = Vec::new();
    for alpha in &alphas {
        for delta in &deltas {
            for &n in &ns {
                let mut point = config.clone();
                point.sweep = SweepAxes::default();
                point.simulation.alpha = alpha.expect("alpha axis always has values");
                point.simulation.initial.delta = *delta;
                point.simulation.n = n;
                point.output = config.output.join(format!(
                    "point-{:03}-n{}-alpha{}-delta{}",
                    points.len(),
                    n,
                    point.simulation.alpha,
                    delta.map_or("none".to_string(), |d| d.to_string())
                ));
                point.validate()?;
                points.push(point);
            }
        }
    }
    Ok(points)
}

/// Runs every sweep point (in parallel, each in its own subdirectory) and
/// writes the combined certificate table. The exit status is the worst over
/// the points.
pub fn execute_sweep(config: &RunConfig) -> Result<SweepSummary> {
    let points = sweep_points(config)?;
    ensure_dir(&config.output)?;
    let results: Vec<SweepPoint> = points
        .par_iter()
        .map(|point| {
            let sim = &point.simulation;
            let (exit, bundle, error) = match execute_run(point, &point.output) {
                Ok(b) => (b.exit(), Some(b), None),
                Err(e) => (Exit::from_error(&e), None, Some(e.to_string())),
            };
            SweepPoint {
                label: point
                    .output
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                n: sim.n,
                alpha: sim.alpha,
                delta: sim.initial.delta,
                exit_code: exit.code(),
                error,
                certificates: bundle.map(|b| b.certificates).unwrap_or_default(),
            }
        })
        .collect();
    let exit_code = results.iter().map(|p| p.exit_code).max().unwrap_or(0);
    let summary = SweepSummary {
        schema: REPORT_SCHEMA,
        config_hash: config_hash(config),
        exit_code,
        points: results,
    };
    write_sweep_table(&summary, &config.output.join(SWEEP_TABLE_FILE))?;
    write_json(&summary, &config.output.join(SWEEP_SUMMARY_FILE))?;
    Ok(summary)
}

fn write_sweep_table(summary: &SweepSummary, path: &Path) -> Result<()> {
    let mut csv = csv::Writer::from_path(path)?;
    csv.write_record([
        "point",
        "n",
        "alpha",
        "delta",
        "exit_code",
        "inequality",
        "certificate",
        "raw",
    ])?;
    for p in &summary.points {
        for c in &p.certificates {
            csv.write_record([
                p.label.clone(),
                p.n.to_string(),
                format!("{:.16e}", p.alpha),
                p.delta.map_or("none".into(), |d| format!("{d:.16e}")),
                p.exit_code.to_string(),
                c.id.to_string(),
                format!("{:.16e}", c.value),
                format!("{:.16e}", c.raw),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn cmd_sweep(config: &RunConfig) -> (Exit, Option<SweepSummary>) {
    match execute_sweep(config) {
        Ok(summary) => {
            let exit = match summary.exit_code {
                0 => Exit::Success,
                2 => Exit::Violated,
                3 => Exit::Numerical,
                4 => Exit::Io,
                _ => Exit::Config,
            };
            (exit, Some(summary))
        }
        Err(e) => {
            log::error!("{e}");
            (Exit::from_error(&e), None)
        }
    }
}

/// Largest sign brackets for one `α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignRow {
    pub alpha: f64,
    pub max_a: f64,
    pub max_b: f64,
}

impl SignRow {
    pub fn passes(&self) -> bool {
        self.max_a <= SIGN_TOLERANCE && self.max_b <= SIGN_TOLERANCE
    }
}

/// Scans both sign brackets on [`MIN_CERTIFICATE_POINTS`]-point grids.
pub fn signcheck(alphas: &[f64]) -> Result<Vec<SignRow>> {
    let low = radial_grid(0.0, 1.0, MIN_CERTIFICATE_POINTS);
    let high = radial_grid(1.0, 2.0, MIN_CERTIFICATE_POINTS);
    alphas
        .iter()
        .map(|&alpha| {
            Ok(SignRow {
                alpha,
                max_a: sign_certificate_a(alpha, &low)?,
                max_b: sign_certificate_b(alpha, &high)?,
            })
        })
        .collect()
}

pub fn cmd_signcheck(alphas: &[f64]) -> (Exit, Result<Vec<SignRow>>) {
    match signcheck(alphas) {
        Ok(rows) => {
            let exit = if rows.iter().all(SignRow::passes) {
                Exit::Success
            } else {
                Exit::Violated
            };
            (exit, Ok(rows))
        }
        Err(e) => (Exit::from_error(&e), Err(e)),
    }
}

/// `C(α, 4)` and `C(α, ∞)` for each `α`.
pub fn constants_table(alphas: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    alphas
        .iter()
        .map(|&alpha| {
            Ok((
                alpha,
                hausdorff_young_constant(alpha, LebesgueExponent::Four)?,
                hausdorff_young_constant(alpha, LebesgueExponent::Infinity)?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests;
