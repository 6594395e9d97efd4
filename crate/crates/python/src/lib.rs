//! Python bindings for the Yoshimura gripper toolkit.
//!
//! Bad input raises `ValueError`; designs that cannot fold or grasp raise
//! `InfeasibleDesign`, a `RuntimeError`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use yoshimura_gripper::error::{GraspError, KinematicsError, MechanicsError, OptimizeError, PatternError};
use yoshimura_gripper::grasp::{self, GraspAnalyzer, GraspOptions, GraspReport, ObjectKind, ObjectSpec};
use yoshimura_gripper::io::{export_obj, export_svg, SvgStyle};
use yoshimura_gripper::kinematics::{self as kin, FoldedGeometry};
use yoshimura_gripper::mechanics::{self as mech, EnergyModel, DEFAULT_REST_FRACTION, DEFAULT_STIFFNESS};
use yoshimura_gripper::optimize::{self as opt, GridRange, Objective, SweepSpec};
use yoshimura_gripper::pattern::{self as pat, Assignment, YoshimuraParams};

create_exception!(yoshimura_gripper, InfeasibleDesign, PyRuntimeError);

fn pattern_err(e: PatternError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kinematics_err(e: KinematicsError) -> PyErr {
    match e {
        KinematicsError::Pattern(_) | KinematicsError::FractionOutOfRange(_) | KinematicsError::TooFewSamples { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => InfeasibleDesign::new_err(e.to_string()),
    }
}

fn mechanics_err(e: MechanicsError) -> PyErr {
    match e {
        MechanicsError::Kinematics(k) => kinematics_err(k),
        MechanicsError::DegenerateTransmission { .. } => InfeasibleDesign::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn grasp_err(e: GraspError) -> PyErr {
    match e {
        GraspError::Kinematics(k) => kinematics_err(k),
        GraspError::InvalidObject(_) => PyValueError::new_err(e.to_string()),
        _ => InfeasibleDesign::new_err(e.to_string()),
    }
}

fn optimize_err(e: OptimizeError) -> PyErr {
    match e {
        OptimizeError::AllInfeasible => InfeasibleDesign::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Design parameters of a gripper sheet.
#[pyclass(name = "Params", module = "yoshimura_gripper", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyParams {
    pub inner: YoshimuraParams,
}

#[pymethods]
impl PyParams {
    /// Uniform rows; `alpha_deg` and `crease_length_mm` may also be lists,
    /// one value per row.
    #[new]
    #[pyo3(signature = (alpha_deg = RowValues::One(25.0), crease_length_mm = RowValues::One(40.0), num_units = 6, num_rows = 2))]
    fn new(alpha_deg: RowValues, crease_length_mm: RowValues, num_units: usize, num_rows: usize) -> PyResult<Self> {
        let mut inner = YoshimuraParams::uniform(25.0, 40.0, num_units, num_rows);
        inner.alpha_deg = alpha_deg.expand(num_rows);
        inner.crease_length_mm = crease_length_mm.expand(num_rows);
        inner.handle_offset_mm = 0.5 * inner.crease_length_mm.first().copied().unwrap_or(0.0);
        inner.validate().map_err(pattern_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn alpha_deg(&self) -> Vec<f64> {
        self.inner.alpha_deg.clone()
    }

    #[getter]
    fn crease_length_mm(&self) -> Vec<f64> {
        self.inner.crease_length_mm.clone()
    }

    #[getter]
    fn num_units(&self) -> usize {
        self.inner.num_units
    }

    #[getter]
    fn num_rows(&self) -> usize {
        self.inner.num_rows
    }

    fn scaled(&self, factor: f64) -> PyResult<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(PyValueError::new_err("scale factor must be positive"));
        }
        Ok(Self { inner: self.inner.scaled(factor) })
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(alpha_deg={:?}, crease_length_mm={:?}, num_units={}, num_rows={})",
            self.inner.alpha_deg, self.inner.crease_length_mm, self.inner.num_units, self.inner.num_rows
        )
    }
}

#[derive(FromPyObject)]
pub enum RowValues {
    One(f64),
    PerRow(Vec<f64>),
}

impl RowValues {
    fn expand(self, rows: usize) -> Vec<f64> {
        match self {
            RowValues::One(v) => vec![v; rows],
            RowValues::PerRow(v) => v,
        }
    }
}

fn assignment_name(a: Assignment) -> &'static str {
    match a {
        Assignment::Mountain => "mountain",
        Assignment::Valley => "valley",
        Assignment::Boundary => "boundary",
    }
}

/// The flat crease pattern.
#[pyclass(name = "Pattern", module = "yoshimura_gripper", frozen)]
pub struct PyPattern {
    inner: pat::CreasePattern2D,
}

#[pymethods]
impl PyPattern {
    #[new]
    fn new(params: &PyParams) -> PyResult<Self> {
        Ok(Self {
            inner: pat::build_pattern(&params.inner).map_err(pattern_err)?,
        })
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64)> {
        self.inner.vertices.iter().map(|p| (p.x, p.y)).collect()
    }

    /// `(i, j, assignment)` per crease.
    #[getter]
    fn creases(&self) -> Vec<(usize, usize, &'static str)> {
        self.inner
            .creases
            .iter()
            .map(|c| (c.vertices[0], c.vertices[1], assignment_name(c.assignment)))
            .collect()
    }

    #[getter]
    fn facets(&self) -> Vec<[usize; 3]> {
        self.inner.facets.clone()
    }

    fn to_svg(&self) -> String {
        export_svg(&self.inner, &SvgStyle::default())
    }
}

/// A folded state of the sheet.
#[pyclass(name = "FoldedState", module = "yoshimura_gripper", frozen)]
pub struct PyFoldedState {
    inner: FoldedGeometry,
}

#[pymethods]
impl PyFoldedState {
    #[getter]
    fn fraction(&self) -> f64 {
        self.inner.fraction
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64, f64)> {
        self.inner.vertices3d.iter().map(|p| (p.x, p.y, p.z)).collect()
    }

    /// Signed fold angle per crease in radians, `None` on boundary edges.
    #[getter]
    fn fold_angles(&self) -> Vec<Option<f64>> {
        self.inner.fold_angles.clone()
    }

    #[getter]
    fn opening_angle_deg(&self) -> f64 {
        kin::measure(&self.inner).opening_angle_deg
    }

    #[getter]
    fn handle_separation_mm(&self) -> f64 {
        kin::measure(&self.inner).handle_separation_mm
    }

    #[getter]
    fn tip_aperture_mm(&self) -> f64 {
        kin::measure(&self.inner).tip_aperture_mm
    }

    fn isometry_residual(&self) -> f64 {
        kin::isometry_residual(&self.inner)
    }

    fn to_obj(&self) -> String {
        export_obj(&self.inner)
    }
}

/// One-parameter folding path of a design.
#[pyclass(name = "FoldPath", module = "yoshimura_gripper", frozen)]
pub struct PyFoldPath {
    inner: kin::FoldPath,
}

#[pymethods]
impl PyFoldPath {
    #[new]
    fn new(params: &PyParams) -> PyResult<Self> {
        Ok(Self {
            inner: kin::FoldPath::new(&params.inner).map_err(kinematics_err)?,
        })
    }

    /// Valley dihedral, in radians, at which the gripper closes.
    #[getter]
    fn closing_driver(&self) -> f64 {
        self.inner.closing_driver
    }

    fn at_fraction(&self, py: Python<'_>, fraction: f64) -> PyResult<PyFoldedState> {
        let g = py.detach(|| self.inner.at_fraction(fraction, None)).map_err(kinematics_err)?;
        Ok(PyFoldedState { inner: g })
    }

    fn at_opening_angle(&self, py: Python<'_>, theta_deg: f64) -> PyResult<PyFoldedState> {
        let g = py.detach(|| self.inner.at_opening_angle(theta_deg)).map_err(kinematics_err)?;
        Ok(PyFoldedState { inner: g })
    }

    /// Fold curve as a list of dicts with keys `fraction`, `theta_deg`,
    /// `handle_sep_mm`, `tip_aperture_mm` and `transmission_ratio`.
    #[pyo3(signature = (num_samples = 101))]
    fn curve<'py>(&self, py: Python<'py>, num_samples: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let curve = py.detach(|| kin::fold_curve_on(&self.inner, num_samples)).map_err(kinematics_err)?;
        curve
            .samples
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("fraction", s.fraction)?;
                d.set_item("theta_deg", s.opening_angle_deg)?;
                d.set_item("handle_sep_mm", s.handle_separation_mm)?;
                d.set_item("tip_aperture_mm", s.tip_aperture_mm)?;
                d.set_item("transmission_ratio", s.transmission_ratio)?;
                Ok(d)
            })
            .collect()
    }

    /// Pull and pinch forces of a spring-hinge model along the path.
    #[pyo3(signature = (num_samples = 41, stiffness_per_length = DEFAULT_STIFFNESS, rest_fraction = DEFAULT_REST_FRACTION))]
    fn force_curve<'py>(
        &self,
        py: Python<'py>,
        num_samples: usize,
        stiffness_per_length: f64,
        rest_fraction: f64,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let curve = py
            .detach(|| {
                let model = EnergyModel::new(&self.inner, stiffness_per_length, rest_fraction)?;
                mech::force_curves_on(&model, &self.inner, num_samples)
            })
            .map_err(mechanics_err)?;
        curve
            .samples
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("fraction", s.fraction)?;
                d.set_item("pull_distance_mm", s.pull_distance_mm)?;
                d.set_item("pull_force", s.pull_force)?;
                d.set_item("pinch_force", s.pinch_force)?;
                d.set_item("stiffness", s.stiffness)?;
                Ok(d)
            })
            .collect()
    }

    /// dP/dx at `stage_fraction`.
    #[pyo3(signature = (stage_fraction, stiffness_per_length = DEFAULT_STIFFNESS, rest_fraction = DEFAULT_REST_FRACTION))]
    fn pinch_sensitivity(&self, py: Python<'_>, stage_fraction: f64, stiffness_per_length: f64, rest_fraction: f64) -> PyResult<f64> {
        py.detach(|| {
            let model = EnergyModel::new(&self.inner, stiffness_per_length, rest_fraction)?;
            mech::pinch_sensitivity_on(&model, &self.inner, stage_fraction)
        })
        .map_err(mechanics_err)
    }
}

fn report_dict<'py>(py: Python<'py>, r: &GraspReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let kind = match r.grasp_type {
        grasp::GraspType::Wrap => "wrap",
        grasp::GraspType::Pinch => "pinch",
        grasp::GraspType::Scoop => "scoop",
        grasp::GraspType::Multi => "multi",
    };
    d.set_item("grasp_type", kind)?;
    d.set_item("feasible", r.feasible)?;
    d.set_item("fraction", r.fraction)?;
    d.set_item("chamber_volume_mm3", r.chamber_volume_mm3)?;
    d.set_item("max_inscribed_sphere_mm", r.max_inscribed_sphere_mm)?;
    d.set_item("aperture_mm", r.aperture_mm)?;
    d.set_item("contact_count", r.contact_count)?;
    d.set_item("pullout_proxy", r.pullout_proxy)?;
    Ok(d)
}

/// Grasp analysis of one design; chamber metrics are precomputed.
#[pyclass(name = "GraspAnalyzer", module = "yoshimura_gripper", frozen)]
pub struct PyGraspAnalyzer {
    inner: GraspAnalyzer,
}

#[pymethods]
impl PyGraspAnalyzer {
    #[new]
    fn new(py: Python<'_>, params: &PyParams) -> PyResult<Self> {
        let inner = py
            .detach(|| GraspAnalyzer::new(&params.inner, GraspOptions::default()))
            .map_err(grasp_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn max_inscribed_sphere_mm(&self) -> f64 {
        self.inner.max_inscribed_sphere_mm()
    }

    /// Classifies a single sphere, several spheres, or one buried at
    /// `burial_depth_mm`.
    #[pyo3(signature = (diameters_mm, burial_depth_mm = 0.0))]
    fn classify<'py>(&self, py: Python<'py>, diameters_mm: RowValues, burial_depth_mm: f64) -> PyResult<Bound<'py, PyDict>> {
        let diameters_mm = diameters_mm.expand(1);
        let kind = if burial_depth_mm > 0.0 {
            ObjectKind::Buried
        } else if diameters_mm.len() > 1 {
            ObjectKind::MultiSphere
        } else {
            ObjectKind::Sphere
        };
        let obj = ObjectSpec {
            kind,
            diameters_mm,
            burial_depth_mm,
        };
        let report = py.detach(|| self.inner.classify(&obj)).map_err(grasp_err)?;
        report_dict(py, &report)
    }
}

/// Grid sweep over crease angle and length; returns `(rows, argmax)` where
/// each row is `(alpha_deg, length_mm, value or None, feasible)`.
#[pyfunction]
#[pyo3(signature = (alpha_range, length_range, objective = "pinch_sensitivity", stage_fraction = 0.75))]
fn sweep(
    py: Python<'_>,
    alpha_range: (f64, f64, usize),
    length_range: (f64, f64, usize),
    objective: &str,
    stage_fraction: f64,
) -> PyResult<(Vec<(f64, f64, Option<f64>, bool)>, usize)> {
    let objective = match objective {
        "pinch_sensitivity" => Objective::PinchSensitivity,
        "transmission_at_stage" => Objective::TransmissionAtStage,
        "max_inscribed_sphere" => Objective::MaxInscribedSphere,
        other => return Err(PyValueError::new_err(format!("unknown objective `{other}`"))),
    };
    let spec = SweepSpec::new(
        GridRange::new(alpha_range.0, alpha_range.1, alpha_range.2),
        GridRange::new(length_range.0, length_range.1, length_range.2),
        objective,
        stage_fraction,
    );
    let result = py.detach(|| opt::grid_sweep(&spec)).map_err(optimize_err)?;
    let rows = result
        .rows
        .iter()
        .map(|r| (r.alpha_deg, r.length_mm, r.objective_value, r.feasible))
        .collect();
    Ok((rows, result.argmax))
}

#[pymodule]
#[pyo3(name = "yoshimura_gripper")]
pub fn yoshimura_gripper_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("InfeasibleDesign", m.py().get_type::<InfeasibleDesign>())?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyPattern>()?;
    m.add_class::<PyFoldPath>()?;
    m.add_class::<PyFoldedState>()?;
    m.add_class::<PyGraspAnalyzer>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
