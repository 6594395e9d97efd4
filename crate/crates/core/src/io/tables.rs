//! CSV curves and JSON reports.

use std::fmt::Write;

use serde::Serialize;

use crate::grasp::GraspReport;
use crate::kinematics::FoldCurve;
use crate::mechanics::ForceCurve;
use crate::optimize::SweepResult;
use crate::TOOLKIT_VERSION;

pub const FOLD_CURVE_HEADER: &str = "fraction,theta_deg,handle_sep_mm,tip_aperture_mm,transmission_ratio";
pub const FORCE_CURVE_HEADER: &str = "pull_distance_mm,pull_force,pinch_force,stiffness";
pub const SWEEP_HEADER: &str = "alpha_deg,length_mm,objective_value,feasible";

/// Six decimals, with values that round to zero printed without a sign.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(fixed6).unwrap_or_default()
}

fn table(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = format!("# {TOOLKIT_VERSION}\n{header}\n");
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn fold_curve_csv(curve: &FoldCurve) -> String {
    table(
        FOLD_CURVE_HEADER,
        curve.samples.iter().map(|s| {
            [s.fraction, s.opening_angle_deg, s.handle_separation_mm, s.tip_aperture_mm, s.transmission_ratio]
                .map(|v| cell(Some(v)))
                .to_vec()
        }),
    )
}

/// Pull force, pinch force and stiffness are left empty where they do not exist.
pub fn force_curve_csv(curve: &ForceCurve) -> String {
    table(
        FORCE_CURVE_HEADER,
        curve.samples.iter().map(|s| {
            vec![
                cell(Some(s.pull_distance_mm)),
                cell(s.pull_force),
                cell(s.pinch_force),
                cell(s.stiffness),
            ]
        }),
    )
}

pub fn sweep_csv(result: &SweepResult) -> String {
    table(
        SWEEP_HEADER,
        result.rows.iter().map(|r| {
            vec![
                cell(Some(r.alpha_deg)),
                cell(Some(r.length_mm)),
                cell(r.objective_value),
                r.feasible.to_string(),
            ]
        }),
    )
}

/// A parsed CSV table: header fields and rows with empty cells as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Reads a numeric CSV written by this module; `#` lines are skipped and
/// `true`/`false` read as 1/0.
pub fn parse_csv(text: &str) -> Result<CsvTable, String> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(String::from)
        .collect();
    let rows = reader
        .records()
        .enumerate()
        .map(|(n, record)| {
            let record = record.map_err(|e| e.to_string())?;
            record
                .iter()
                .map(|c| match c {
                    "" => Ok(None),
                    "true" => Ok(Some(1.0)),
                    "false" => Ok(Some(0.0)),
                    c => c.parse().map(Some).map_err(|e| format!("row {}: {e}", n + 1)),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(CsvTable { header, rows })
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    generator: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

fn stamped_json<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Stamped {
        generator: TOOLKIT_VERSION,
        body,
    })
    .expect("report serializes");
    s.push('\n');
    s
}

pub fn grasp_report_json(report: &GraspReport) -> String {
    stamped_json(report)
}

#[derive(Serialize)]
struct Argmax<'a> {
    alpha_deg: f64,
    length_mm: f64,
    objective_value: Option<f64>,
    config_hash: &'a str,
    version: &'a str,
}

pub fn sweep_argmax_json(result: &SweepResult) -> String {
    let best = result.best();
    stamped_json(&Argmax {
        alpha_deg: best.alpha_deg,
        length_mm: best.length_mm,
        objective_value: best.objective_value,
        config_hash: &result.provenance.config_hash,
        version: &result.provenance.version,
    })
}

pub fn json_of<T: Serialize>(value: &T) -> String {
    stamped_json(value)
}
