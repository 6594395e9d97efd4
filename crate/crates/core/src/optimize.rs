//! Grid sweeps over (alpha, L) and a 1-D golden-section refinement in alpha.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::OptimizeError;
use crate::grasp::{GraspAnalyzer, GraspOptions};
use crate::kinematics::{measure, FoldPath};
use crate::mechanics::{pinch_sensitivity_on, EnergyModel, DEFAULT_REST_FRACTION, DEFAULT_STIFFNESS};
use crate::pattern::YoshimuraParams;
use crate::TOOLKIT_VERSION;

/// Final bracket width of the golden-section search, degrees.
pub const REFINE_WIDTH_DEG: f64 = 1e-4;
const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// Fraction step for the transmission ratio at a stage.
const STAGE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Self { lo, hi, steps }
    }

    /// A single value.
    pub fn fixed(value: f64) -> Self {
        Self::new(value, value, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|k| {
                let t = k as f64 / (self.steps - 1) as f64;
                self.lo + t * (self.hi - self.lo)
            })
            .collect()
    }

    fn validate(&self, name: &str, min: f64, max: f64) -> Result<(), OptimizeError> {
        let bad = |why: &str| Err(OptimizeError::InvalidSweep(format!("{name}: {why}")));
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return bad("bounds must be finite");
        }
        if self.steps == 0 {
            return bad("steps must be at least 1");
        }
        if self.steps == 1 && self.lo != self.hi {
            return bad("a single step needs lo == hi");
        }
        if self.steps >= 2 && self.lo >= self.hi {
            return bad("lo must be below hi");
        }
        if !(self.lo > min && self.hi < max) {
            return bad(&format!("values must lie in ({min}, {max})"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Transmission ratio da/dx at the stage fraction.
    TransmissionAtStage,
    /// Pinch force sensitivity dP/dx at the stage fraction.
    PinchSensitivity,
    /// Largest inscribed sphere diameter over the closing stroke, mm.
    MaxInscribedSphere,
}

fn default_units() -> usize {
    6
}
fn default_rows() -> usize {
    2
}
fn default_stage() -> f64 {
    0.75
}
fn default_stiffness() -> f64 {
    DEFAULT_STIFFNESS
}
fn default_rest() -> f64 {
    DEFAULT_REST_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub alpha_range_deg: GridRange,
    pub length_range_mm: GridRange,
    pub objective: Objective,
    #[serde(default = "default_stage")]
    pub stage_fraction: f64,
    #[serde(default = "default_units")]
    pub num_units: usize,
    #[serde(default = "default_rows")]
    pub num_rows: usize,
    #[serde(default = "default_stiffness")]
    pub stiffness_per_length: f64,
    #[serde(default = "default_rest")]
    pub rest_fraction: f64,
}

impl SweepSpec {
    pub fn new(alpha_range_deg: GridRange, length_range_mm: GridRange, objective: Objective, stage_fraction: f64) -> Self {
        Self {
            alpha_range_deg,
            length_range_mm,
            objective,
            stage_fraction,
            num_units: default_units(),
            num_rows: default_rows(),
            stiffness_per_length: DEFAULT_STIFFNESS,
            rest_fraction: DEFAULT_REST_FRACTION,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        self.alpha_range_deg.validate("alpha_range_deg", 0.0, 90.0)?;
        self.length_range_mm.validate("length_range_mm", 0.0, f64::INFINITY)?;
        if !(self.stage_fraction > 0.0 && self.stage_fraction < 1.0) {
            return Err(OptimizeError::InvalidSweep(format!(
                "stage_fraction {} must lie strictly inside (0, 1)",
                self.stage_fraction
            )));
        }
        let base = YoshimuraParams::uniform(self.alpha_range_deg.lo, self.length_range_mm.lo, self.num_units, self.num_rows);
        base.validate().map_err(|e| OptimizeError::InvalidSweep(e.to_string()))
    }

    pub fn params(&self, alpha_deg: f64, length_mm: f64) -> YoshimuraParams {
        YoshimuraParams::uniform(alpha_deg, length_mm, self.num_units, self.num_rows)
    }

    /// Objective value for one design; `None` if the design is infeasible.
    pub fn evaluate(&self, alpha_deg: f64, length_mm: f64) -> Option<f64> {
        evaluate(self, &self.params(alpha_deg, length_mm)).filter(|v| v.is_finite())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn evaluate(spec: &SweepSpec, params: &YoshimuraParams) -> Option<f64> {
    let path = FoldPath::new(params).ok()?;
    let f = spec.stage_fraction;
    match spec.objective {
        Objective::TransmissionAtStage => {
            let lo = measure(&path.at_fraction(f - STAGE_STEP, None).ok()?);
            let hi = measure(&path.at_fraction(f + STAGE_STEP, None).ok()?);
            Some((hi.tip_aperture_mm - lo.tip_aperture_mm) / (hi.handle_separation_mm - lo.handle_separation_mm))
        }
        Objective::PinchSensitivity => {
            let model = EnergyModel::new(&path, spec.stiffness_per_length, spec.rest_fraction).ok()?;
            pinch_sensitivity_on(&model, &path, f).ok()
        }
        Objective::MaxInscribedSphere => GraspAnalyzer::new(params, GraspOptions::default())
            .ok()
            .map(|a| a.max_inscribed_sphere_mm()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_deg: f64,
    pub length_mm: f64,
    pub objective_value: Option<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Ordered by alpha, then length.
    pub rows: Vec<SweepRow>,
    pub argmax: usize,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn best(&self) -> &SweepRow {
        &self.rows[self.argmax]
    }
}

pub fn grid_sweep(spec: &SweepSpec) -> Result<SweepResult, OptimizeError> {
    spec.validate()?;
    let lengths = spec.length_range_mm.values();
    let cells: Vec<(f64, f64)> = spec
        .alpha_range_deg
        .values()
        .into_iter()
        .flat_map(|a| lengths.iter().map(move |&l| (a, l)))
        .collect();
    let mut rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(alpha_deg, length_mm)| {
            let value = spec.evaluate(alpha_deg, length_mm);
            SweepRow {
                alpha_deg,
                length_mm,
                objective_value: value,
                feasible: value.is_some(),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.alpha_deg.total_cmp(&b.alpha_deg).then(a.length_mm.total_cmp(&b.length_mm)));
    let argmax = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.objective_value.map(|v| (i, v)))
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .map(|(i, _)| i)
        .ok_or(OptimizeError::AllInfeasible)?;
    Ok(SweepResult {
        rows,
        argmax,
        provenance: Provenance {
            config_hash: spec.hash(),
            version: TOOLKIT_VERSION.to_string(),
        },
    })
}

/// Golden-section maximization of `f` on `[lo, hi]` down to `width`.
///
/// The bracket must pass a three-point test first: the midpoint value has to
/// exceed both end values.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, width: f64) -> Result<(f64, f64), OptimizeError>
where
    F: FnMut(f64) -> Option<f64>,
{
    let not_unimodal = OptimizeError::NotUnimodal { lo, hi };
    if !(lo < hi) || !(width > 0.0) {
        return Err(OptimizeError::InvalidSweep(format!("bad bracket [{lo}, {hi}]")));
    }
    let (f_lo, f_mid, f_hi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
    match (f_lo, f_mid, f_hi) {
        (Some(a), Some(m), Some(b)) if m > a && m > b => {}
        _ => return Err(not_unimodal),
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1).ok_or(OptimizeError::NotUnimodal { lo, hi })?;
    let mut f2 = f(x2).ok_or(OptimizeError::NotUnimodal { lo, hi })?;
    while b - a > width {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1).ok_or(OptimizeError::NotUnimodal { lo, hi })?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2).ok_or(OptimizeError::NotUnimodal { lo, hi })?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Maximizes the spec's objective over alpha within `bracket`, at the lower
/// end of the spec's length range.
pub fn refine_alpha(spec: &SweepSpec, bracket: (f64, f64)) -> Result<(f64, f64), OptimizeError> {
    spec.validate()?;
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi < 90.0) {
        return Err(OptimizeError::InvalidSweep(format!("bracket ({lo}, {hi}) must lie in (0, 90)")));
    }
    let length = spec.length_range_mm.lo;
    golden_section_max(|a| spec.evaluate(a, length), lo, hi, REFINE_WIDTH_DEG)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_peak() {
        let (x, v) = golden_section_max(|a| Some(-(a - 27.0) * (a - 27.0)), 17.5, 35.0, 0.1).unwrap();
        assert!((x - 27.0).abs() <= 0.1);
        assert!(v <= 0.0 && v > -0.01);
    }

    #[test]
    fn monotone_bracket_is_rejected() {
        assert_eq!(
            golden_section_max(|a| Some(a), 20.0, 30.0, 0.1),
            Err(OptimizeError::NotUnimodal { lo: 20.0, hi: 30.0 })
        );
    }

    #[test]
    fn range_values() {
        assert_eq!(GridRange::new(20.0, 80.0, 7).values(), vec![20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0]);
        assert_eq!(GridRange::fixed(25.0).values(), vec![25.0]);
        assert!(GridRange::new(30.0, 20.0, 3).validate("x", 0.0, 90.0).is_err());
        assert!(GridRange::new(20.0, 30.0, 0).validate("x", 0.0, 90.0).is_err());
    }
}
