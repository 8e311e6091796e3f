//! CSV and JSON emitters. Floats are written in shortest round-trip form, so
//! parsing an emitted file recovers the curves exactly.

use pnc_lab_core::{PointStatus, Scheme, SerCurve, SerPoint};
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, Result};

/// Scheme label used for closed-form bound rows.
pub const BOUND_LABEL: &str = "UB";

/// One output row: a simulated SER point or a bound value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub snr_db: f64,
    pub scheme: String,
    pub ser: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: Option<u64>,
    pub errors: Option<u64>,
    pub bound: Option<f64>,
    pub status: Option<PointStatus>,
    /// `N_A-N_R-N_B`.
    pub setup: String,
}

pub fn setup_label(n_a: usize, n_r: usize, n_b: usize) -> String {
    format!("{n_a}-{n_r}-{n_b}")
}

fn parse_setup(label: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<usize> = label
        .split('-')
        .map(|p| p.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Output(format!("bad setup label {label:?}")))?;
    match parts[..] {
        [a, r, b] => Ok((a, r, b)),
        _ => Err(CliError::Output(format!("bad setup label {label:?}"))),
    }
}

pub fn curve_records(curve: &SerCurve) -> Vec<Record> {
    let setup = setup_label(curve.n_a, curve.n_r, curve.n_b);
    curve
        .points
        .iter()
        .map(|p| Record {
            snr_db: p.snr_db,
            scheme: curve.scheme.to_string(),
            ser: Some(p.ser),
            ci_low: Some(p.ci_low),
            ci_high: Some(p.ci_high),
            trials: Some(p.trials),
            errors: Some(p.errors),
            bound: None,
            status: Some(p.status),
            setup: setup.clone(),
        })
        .collect()
}

pub fn bound_record(snr_db: f64, bound: f64, setup: &str) -> Record {
    Record {
        snr_db,
        scheme: BOUND_LABEL.into(),
        ser: None,
        ci_low: None,
        ci_high: None,
        trials: None,
        errors: None,
        bound: Some(bound),
        status: None,
        setup: setup.into(),
    }
}

/// Regroups simulated rows into curves, in order of first appearance.
/// Bound rows are skipped. The modulation order and power offset are not
/// part of the row format and must be supplied.
pub fn records_to_curves(records: &[Record], order: usize, delta_ab_db: f64) -> Result<Vec<SerCurve>> {
    let mut curves: Vec<SerCurve> = Vec::new();
    for r in records.iter().filter(|r| r.scheme != BOUND_LABEL) {
        let scheme: Scheme = r.scheme.parse().map_err(CliError::Output)?;
        let (n_a, n_r, n_b) = parse_setup(&r.setup)?;
        let missing = || CliError::Output(format!("incomplete row at {} dB", r.snr_db));
        let point = SerPoint {
            snr_db: r.snr_db,
            trials: r.trials.ok_or_else(missing)?,
            errors: r.errors.ok_or_else(missing)?,
            ser: r.ser.ok_or_else(missing)?,
            ci_low: r.ci_low.ok_or_else(missing)?,
            ci_high: r.ci_high.ok_or_else(missing)?,
            status: r.status.ok_or_else(missing)?,
        };
        match curves
            .iter_mut()
            .find(|c| c.scheme == scheme && (c.n_a, c.n_r, c.n_b) == (n_a, n_r, n_b))
        {
            Some(c) => c.points.push(point),
            None => curves.push(SerCurve {
                scheme,
                n_a,
                n_r,
                n_b,
                order,
                delta_ab_db,
                points: vec![point],
            }),
        }
    }
    Ok(curves)
}

/// Diversity estimate for one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub setup: String,
    pub scheme: String,
    pub slope: Option<f64>,
    pub low_db: Option<f64>,
    pub high_db: Option<f64>,
    pub points: Option<usize>,
    pub residual: Option<f64>,
    /// Diversity order predicted by theory for this scheme and setup.
    pub expected: usize,
    /// Fit failure reason, if any.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a run produces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub slopes: Vec<SlopeRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<CheckRow>,
}

impl Report {
    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// CSV gets one table: checks for selftest, slopes for diversity runs,
    /// SER rows otherwise. JSON carries everything.
    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv if !self.checks.is_empty() => to_csv(&self.checks),
            Format::Csv if !self.slopes.is_empty() => to_csv(&self.slopes),
            Format::Csv => to_csv(&self.records),
        }
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

pub fn read_records(csv_bytes: &[u8]) -> Result<Vec<Record>> {
    csv::Reader::from_reader(csv_bytes)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::Output(e.to_string()))
}
