//! Quasi-static forces from a crease torsional-spring energy.
//!
//! Every crease is a linear torsional spring whose stiffness is proportional
//! to its length. The sheet has one degree of freedom (the valley fold angle),
//! so forces at the handles and at the lips follow from the energy by the
//! chain rule and virtual work.

use serde::{Deserialize, Serialize};

use crate::error::MechanicsError;
use crate::kinematics::{difference_ratio, measure, FoldPath, FoldedGeometry};
use crate::pattern::{pattern_edge_lengths, YoshimuraParams};

pub const DEFAULT_STIFFNESS: f64 = 1.0;
pub const DEFAULT_REST_FRACTION: f64 = 0.5;
pub const MIN_FORCE_SAMPLES: usize = 21;

/// Driver step, relative to the closing driver, for derivatives along the path.
const DRIVER_STEP: f64 = 1e-4;
/// Fraction step for the pinch sensitivity.
const STAGE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// Torsional stiffness per unit crease length.
    pub stiffness_per_length: f64,
    pub rest_fraction: f64,
    /// Rest fold angle per crease (zero on boundary edges).
    pub rest_angles: Vec<f64>,
}

impl EnergyModel {
    /// Model whose springs are relaxed at `rest_fraction` of the closing stroke.
    pub fn new(path: &FoldPath, stiffness_per_length: f64, rest_fraction: f64) -> Result<Self, MechanicsError> {
        if !(stiffness_per_length > 0.0 && stiffness_per_length.is_finite()) {
            return Err(MechanicsError::InvalidModel(format!(
                "stiffness_per_length must be positive, got {stiffness_per_length}"
            )));
        }
        if !(0.0..=1.0).contains(&rest_fraction) {
            return Err(MechanicsError::InvalidModel(format!(
                "rest_fraction must lie in [0, 1], got {rest_fraction}"
            )));
        }
        let rest = path.at_fraction(rest_fraction, None)?;
        Ok(Self {
            stiffness_per_length,
            rest_fraction,
            rest_angles: rest.fold_angles.iter().map(|a| a.unwrap_or(0.0)).collect(),
        })
    }

    pub fn for_params(params: &YoshimuraParams, stiffness_per_length: f64, rest_fraction: f64) -> Result<Self, MechanicsError> {
        Self::new(&FoldPath::new(params)?, stiffness_per_length, rest_fraction)
    }
}

/// `sum 1/2 k l (rho - rho0)^2` over the creases that carry a fold angle.
pub fn spring_energy(k: f64, lengths: &[f64], angles: &[Option<f64>], rest: &[f64]) -> f64 {
    lengths
        .iter()
        .zip(angles)
        .zip(rest)
        .filter_map(|((l, a), r)| a.map(|a| 0.5 * k * l * (a - r).powi(2)))
        .sum()
}

fn check_model(model: &EnergyModel, geom: &FoldedGeometry) -> Result<(), MechanicsError> {
    if model.rest_angles.len() != geom.fold_angles.len() {
        return Err(MechanicsError::ModelMismatch {
            model: model.rest_angles.len(),
            geometry: geom.fold_angles.len(),
        });
    }
    Ok(())
}

pub fn energy(model: &EnergyModel, geom: &FoldedGeometry) -> Result<f64, MechanicsError> {
    check_model(model, geom)?;
    let lengths = pattern_edge_lengths(&geom.pattern);
    Ok(spring_energy(model.stiffness_per_length, &lengths, &geom.fold_angles, &model.rest_angles))
}

/// Energy, handle pull and lip closure at one state, with their derivatives
/// with respect to the driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverState {
    pub fraction: f64,
    pub energy: f64,
    /// Decrease of the handle separation from the flat sheet, mm.
    pub pull_distance_mm: f64,
    /// Decrease of the tip aperture from the flat sheet, mm.
    pub closure_mm: f64,
    pub d_energy: f64,
    pub d_pull: f64,
    pub d_closure: f64,
}

impl DriverState {
    /// `dE/d(pull)`; absent at the flat state, where the pull is stationary.
    pub fn pull_force(&self) -> Option<f64> {
        (self.fraction > 0.0 && self.d_pull != 0.0).then(|| self.d_energy / self.d_pull)
    }
}

/// Evaluates a [`DriverState`] at fraction `f`. The energy derivative uses
/// the chain rule through each crease's fold angle.
pub fn driver_state(model: &EnergyModel, path: &FoldPath, f: f64) -> Result<DriverState, MechanicsError> {
    let geom = path.at_fraction(f, None)?;
    check_model(model, &geom)?;
    let flat = measure(&path.at_fraction(0.0, None)?);
    let here = measure(&geom);
    let lengths = pattern_edge_lengths(&path.pattern);

    let rho = geom.driver_rho;
    let h = DRIVER_STEP * path.closing_driver;
    let solve = |r: f64| crate::kinematics::solve_fold(&path.pattern, r, Some(&geom));
    // Central where possible, one-sided at the ends of the stroke.
    let (lo, hi) = if rho - h < 0.0 {
        (geom.clone(), solve(rho + h)?)
    } else {
        match solve(rho + h) {
            Ok(g) => (solve(rho - h)?, g),
            Err(_) => (solve(rho - h)?, geom.clone()),
        }
    };
    let dr = hi.driver_rho - lo.driver_rho;
    let d_energy: f64 = lengths
        .iter()
        .zip(&model.rest_angles)
        .enumerate()
        .filter_map(|(c, (l, r))| {
            let a = geom.fold_angles[c]?;
            let da = (hi.fold_angles[c]? - lo.fold_angles[c]?) / dr;
            Some(model.stiffness_per_length * l * (a - r) * da)
        })
        .sum();
    let (m_lo, m_hi) = (measure(&lo), measure(&hi));
    Ok(DriverState {
        fraction: f,
        energy: spring_energy(model.stiffness_per_length, &lengths, &geom.fold_angles, &model.rest_angles),
        pull_distance_mm: flat.handle_separation_mm - here.handle_separation_mm,
        closure_mm: flat.tip_aperture_mm - here.tip_aperture_mm,
        d_energy,
        d_pull: -(m_hi.handle_separation_mm - m_lo.handle_separation_mm) / dr,
        d_closure: -(m_hi.tip_aperture_mm - m_lo.tip_aperture_mm) / dr,
    })
}

fn pinch_force(state: &DriverState, path: &FoldPath) -> Result<Option<f64>, MechanicsError> {
    if state.pull_force().is_none() {
        return Ok(None);
    }
    let step = state.d_closure * DRIVER_STEP * path.closing_driver;
    if step.abs() < 1e-12 * path.params().max_crease_length() {
        return Err(MechanicsError::DegenerateTransmission { fraction: state.fraction });
    }
    // virtual work: P da = F dx
    Ok(Some(state.d_energy / state.d_closure))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    pub fraction: f64,
    pub pull_distance_mm: f64,
    pub pull_force: Option<f64>,
    pub pinch_force: Option<f64>,
    pub stiffness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceCurve {
    pub samples: Vec<ForceSample>,
    pub params: YoshimuraParams,
}

impl ForceCurve {
    /// Largest pull force over samples with fraction in `[lo, hi]`.
    pub fn peak_pull_force(&self, lo: f64, hi: f64) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| (lo..=hi).contains(&s.fraction))
            .filter_map(|s| s.pull_force)
            .reduce(f64::max)
    }

    /// Largest `|dF/dx|` over samples with fraction in `[lo, hi]`.
    pub fn max_abs_stiffness(&self, lo: f64, hi: f64) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| (lo..=hi).contains(&s.fraction))
            .filter_map(|s| s.stiffness.map(f64::abs))
            .reduce(f64::max)
    }
}

pub fn force_curves(model: &EnergyModel, params: &YoshimuraParams, num_samples: usize) -> Result<ForceCurve, MechanicsError> {
    force_curves_on(model, &FoldPath::new(params)?, num_samples)
}

pub fn force_curves_on(model: &EnergyModel, path: &FoldPath, num_samples: usize) -> Result<ForceCurve, MechanicsError> {
    if num_samples < MIN_FORCE_SAMPLES {
        return Err(MechanicsError::InvalidModel(format!(
            "need at least {MIN_FORCE_SAMPLES} samples, got {num_samples}"
        )));
    }
    let mut samples = Vec::with_capacity(num_samples);
    for k in 0..num_samples {
        let f = k as f64 / (num_samples - 1) as f64;
        let state = driver_state(model, path, f)?;
        let pinch = match pinch_force(&state, path) {
            Ok(p) => p,
            Err(MechanicsError::DegenerateTransmission { .. }) => None,
            Err(e) => return Err(e),
        };
        samples.push(ForceSample {
            fraction: f,
            pull_distance_mm: state.pull_distance_mm,
            pull_force: state.pull_force(),
            pinch_force: pinch,
            stiffness: None,
        });
    }
    // Stiffness over the stretch where the pull force exists.
    let with_force: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].pull_force.is_some()).collect();
    if with_force.len() >= 2 {
        let force: Vec<f64> = with_force.iter().map(|&i| samples[i].pull_force.unwrap_or_default()).collect();
        let pull: Vec<f64> = with_force.iter().map(|&i| samples[i].pull_distance_mm).collect();
        for (&i, k) in with_force.iter().zip(difference_ratio(&force, &pull)) {
            samples[i].stiffness = Some(k);
        }
    }
    Ok(ForceCurve {
        samples,
        params: path.params().clone(),
    })
}

/// `dP/d(pull)` at `stage_fraction` by central differences.
pub fn pinch_sensitivity(model: &EnergyModel, params: &YoshimuraParams, stage_fraction: f64) -> Result<f64, MechanicsError> {
    pinch_sensitivity_on(model, &FoldPath::new(params)?, stage_fraction)
}

pub fn pinch_sensitivity_on(model: &EnergyModel, path: &FoldPath, stage_fraction: f64) -> Result<f64, MechanicsError> {
    if !(stage_fraction > STAGE_STEP && stage_fraction < 1.0 - STAGE_STEP) {
        return Err(MechanicsError::StageOutOfRange(stage_fraction));
    }
    let at = |f: f64| -> Result<(f64, f64), MechanicsError> {
        let state = driver_state(model, path, f)?;
        let p = pinch_force(&state, path)?.ok_or(MechanicsError::DegenerateTransmission { fraction: f })?;
        Ok((state.pull_distance_mm, p))
    };
    let (x_lo, p_lo) = at(stage_fraction - STAGE_STEP)?;
    let (x_hi, p_hi) = at(stage_fraction + STAGE_STEP)?;
    Ok((p_hi - p_lo) / (x_hi - x_lo))
}
