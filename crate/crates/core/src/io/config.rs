//! JSON design configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, PatternError};
use crate::grasp::ObjectSpec;
use crate::kinematics::MIN_CURVE_SAMPLES;
use crate::mechanics::{DEFAULT_REST_FRACTION, DEFAULT_STIFFNESS, MIN_FORCE_SAMPLES};
use crate::optimize::SweepSpec;
use crate::pattern::YoshimuraParams;

pub const DEFAULT_ALPHA_DEG: f64 = 25.0;
pub const DEFAULT_CREASE_LENGTH_MM: f64 = 40.0;
pub const DEFAULT_NUM_UNITS: usize = 6;
pub const DEFAULT_NUM_ROWS: usize = 2;
pub const DEFAULT_CURVE_SAMPLES: usize = 101;
pub const DEFAULT_FORCE_SAMPLES: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySettings {
    pub stiffness_per_length: f64,
    pub rest_fraction: f64,
}

impl Default for EnergySettings {
    fn default() -> Self {
        Self {
            stiffness_per_length: DEFAULT_STIFFNESS,
            rest_fraction: DEFAULT_REST_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub params: YoshimuraParams,
    pub energy: EnergySettings,
    pub output_dir: PathBuf,
    pub curve_samples: usize,
    pub force_samples: usize,
    pub sweep: Option<SweepSpec>,
    pub object: Option<ObjectSpec>,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            params: YoshimuraParams::uniform(DEFAULT_ALPHA_DEG, DEFAULT_CREASE_LENGTH_MM, DEFAULT_NUM_UNITS, DEFAULT_NUM_ROWS),
            energy: EnergySettings::default(),
            output_dir: PathBuf::from("."),
            curve_samples: DEFAULT_CURVE_SAMPLES,
            force_samples: DEFAULT_FORCE_SAMPLES,
            sweep: None,
            object: None,
        }
    }
}

/// The document as written; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    alpha_deg: Option<Vec<f64>>,
    crease_length_mm: Option<Vec<f64>>,
    num_units: Option<usize>,
    num_rows: Option<usize>,
    handle_offset_mm: Option<f64>,
    stiffness_per_length: Option<f64>,
    rest_fraction: Option<f64>,
    output_dir: Option<PathBuf>,
    curve_samples: Option<usize>,
    force_samples: Option<usize>,
    sweep: Option<SweepSpec>,
    object: Option<ObjectSpec>,
}

fn invalid(field: &str, value: impl std::fmt::Display, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        value: value.to_string(),
        constraint: constraint.into(),
    }
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(f64::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// Parses and validates a configuration document, filling in defaults.
pub fn load_config(text: &str) -> Result<DesignConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let num_rows = raw
        .num_rows
        .or(raw.alpha_deg.as_ref().map(Vec::len))
        .or(raw.crease_length_mm.as_ref().map(Vec::len))
        .unwrap_or(DEFAULT_NUM_ROWS);
    let alpha_deg = raw.alpha_deg.unwrap_or_else(|| vec![DEFAULT_ALPHA_DEG; num_rows]);
    let crease_length_mm = raw
        .crease_length_mm
        .unwrap_or_else(|| vec![DEFAULT_CREASE_LENGTH_MM; num_rows]);
    let handle_offset_mm = raw
        .handle_offset_mm
        .unwrap_or_else(|| 0.5 * crease_length_mm.first().copied().unwrap_or(DEFAULT_CREASE_LENGTH_MM));
    let params = YoshimuraParams {
        alpha_deg,
        crease_length_mm,
        num_units: raw.num_units.unwrap_or(DEFAULT_NUM_UNITS),
        num_rows,
        handle_offset_mm,
    };
    params.validate().map_err(|e| match e {
        PatternError::InvalidParams { field, reason } => {
            let value = match field {
                "alpha_deg" => list(&params.alpha_deg),
                "crease_length_mm" => list(&params.crease_length_mm),
                "num_units" => params.num_units.to_string(),
                "num_rows" => params.num_rows.to_string(),
                "handle_offset_mm" => params.handle_offset_mm.to_string(),
                _ => String::new(),
            };
            invalid(field, value, reason)
        }
        other @ PatternError::IncompatibleRows { .. } => invalid("crease_length_mm", list(&params.crease_length_mm), other.to_string()),
    })?;

    let energy = EnergySettings {
        stiffness_per_length: raw.stiffness_per_length.unwrap_or(DEFAULT_STIFFNESS),
        rest_fraction: raw.rest_fraction.unwrap_or(DEFAULT_REST_FRACTION),
    };
    if !(energy.stiffness_per_length > 0.0 && energy.stiffness_per_length.is_finite()) {
        return Err(invalid("stiffness_per_length", energy.stiffness_per_length, "must be positive"));
    }
    if !(0.0..=1.0).contains(&energy.rest_fraction) {
        return Err(invalid("rest_fraction", energy.rest_fraction, "must lie in [0, 1]"));
    }
    let curve_samples = raw.curve_samples.unwrap_or(DEFAULT_CURVE_SAMPLES);
    if curve_samples < MIN_CURVE_SAMPLES {
        return Err(invalid("curve_samples", curve_samples, format!("must be at least {MIN_CURVE_SAMPLES}")));
    }
    let force_samples = raw.force_samples.unwrap_or(DEFAULT_FORCE_SAMPLES);
    if force_samples < MIN_FORCE_SAMPLES {
        return Err(invalid("force_samples", force_samples, format!("must be at least {MIN_FORCE_SAMPLES}")));
    }
    if let Some(sweep) = &raw.sweep {
        sweep.validate().map_err(|e| invalid("sweep", "{..}", e.to_string()))?;
    }
    if let Some(object) = &raw.object {
        object.validate().map_err(|e| invalid("object", "{..}", e.to_string()))?;
    }
    Ok(DesignConfig {
        params,
        energy,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(".")),
        curve_samples,
        force_samples,
        sweep: raw.sweep,
        object: raw.object,
    })
}
