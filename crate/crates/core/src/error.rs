use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("rows {first} and {second} cannot share edges: {reason}")]
    IncompatibleRows {
        first: usize,
        second: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("trilateration anchors are collinear")]
    CollinearAnchors,
    #[error("spheres do not intersect (squared offset {squared_offset:e})")]
    NoIntersection { squared_offset: f64 },
    #[error("fold state unreachable at driver {driver_rho} rad: {source}")]
    UnreachableState {
        driver_rho: f64,
        #[source]
        source: Box<KinematicsError>,
    },
    #[error("root not bracketed while solving for {target}")]
    RootNotBracketed { target: String },
    #[error("fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanicsError {
    #[error("energy model has {model} creases but geometry has {geometry}")]
    ModelMismatch { model: usize, geometry: usize },
    #[error("transmission degenerate at fraction {fraction}")]
    DegenerateTransmission { fraction: f64 },
    #[error("invalid energy model: {0}")]
    InvalidModel(String),
    #[error("stage fraction {0} must lie strictly inside (0, 1)")]
    StageOutOfRange(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraspError {
    #[error("chamber is open: leak near ({x:.3}, {y:.3}, {z:.3})")]
    OpenChamber { x: f64, y: f64, z: f64 },
    #[error("object of diameter {diameter_mm} mm cannot be wrapped")]
    NoWrap { diameter_mm: f64 },
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("every design in the sweep is infeasible")]
    AllInfeasible,
    #[error("objective is not unimodal on [{lo}, {hi}]")]
    NotUnimodal { lo: f64, hi: f64 },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error on `{field}` = {value}: {constraint}")]
    Validation {
        field: String,
        value: String,
        constraint: String,
    },
}
