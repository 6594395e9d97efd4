//! Single-degree-of-freedom rigid folding of the crease pattern.
//!
//! The sheet is driven in its uniform symmetric mode: every valley crease
//! carries the same fold angle (the driver), every diamond is symmetric about
//! the plane through its valley crease perpendicular to the fold axis, and the
//! whole folded sheet is invariant under the half-turn that swaps its two lips.
//! Vertices are placed one after another by intersecting spheres (edge
//! lengths) with each other or with a row's symmetry plane.

mod trilateration;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::KinematicsError;
use crate::pattern::{build_pattern, pattern_edge_lengths, Assignment, CreasePattern2D, YoshimuraParams};

pub use trilateration::{sphere_sphere_plane, trilaterate, trilaterate_both, Branch, SQUARED_OFFSET_TOL};

/// Tolerance on the opening angle when solving for a target angle, degrees.
pub const ANGLE_ROOT_TOL_DEG: f64 = 0.1;
/// Allowed opening angle error at the closed endpoint, degrees.
pub const CLOSED_TOL_DEG: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct FoldedGeometry {
    pub pattern: Arc<CreasePattern2D>,
    /// Indexed like `pattern.vertices`, millimetres.
    pub vertices3d: Vec<Point3<f64>>,
    /// Signed fold angle per crease in radians, positive in the mountain
    /// sense. `None` on boundary edges.
    pub fold_angles: Vec<Option<f64>>,
    pub fraction: f64,
    pub driver_rho: f64,
    pub handle_points: [Point3<f64>; 2],
    /// Set when a vertex had two coincident candidates and no previous state
    /// was available to pick one (the flat sheet is a bifurcation point).
    pub branch_ambiguous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub opening_angle_deg: f64,
    pub handle_separation_mm: f64,
    pub tip_aperture_mm: f64,
}

/// How the side of a new vertex is measured relative to already placed ones.
#[derive(Clone, Copy)]
enum SideRule {
    /// Normal `(beside - below) x axis`.
    LevelPlane { below: usize, beside: usize },
    /// Normal `(p - origin) x (q - origin)`.
    Cross { origin: usize, p: usize, q: usize },
}

impl SideRule {
    fn side(self, point: &Point3<f64>, at: impl Fn(usize) -> Point3<f64>) -> f64 {
        match self {
            SideRule::LevelPlane { below, beside } => {
                let normal = (at(beside) - at(below)).cross(&Vector3::y());
                (point - at(below)).dot(&normal)
            }
            SideRule::Cross { origin, p, q } => {
                let o = at(origin);
                (point - o).dot(&(at(p) - o).cross(&(at(q) - o)))
            }
        }
    }
}

struct Placer<'a> {
    prev: Option<&'a FoldedGeometry>,
    ambiguous: bool,
    ambiguity_tol: f64,
}

impl Placer<'_> {
    /// Picks one of two candidates. With a previous state the new vertex stays
    /// on the same side of its anchors as before; otherwise (or if the previous
    /// vertex sat on the anchor plane) the negative side is taken.
    fn pick(
        &mut self,
        vertex: usize,
        (a, b, half_gap): (Point3<f64>, Point3<f64>, f64),
        rule: SideRule,
        pos: &[Option<Point3<f64>>],
    ) -> Point3<f64> {
        let now = |i: usize| pos[i].expect("anchor placed");
        let mut sign = -1.0;
        if let Some(prev) = self.prev {
            let before = |i: usize| prev.vertices3d[i];
            let s = rule.side(&prev.vertices3d[vertex], before);
            if s.abs() > 0.0 {
                sign = s.signum();
            }
        } else if half_gap <= self.ambiguity_tol {
            self.ambiguous = true;
        }
        if sign * rule.side(&a, now) >= sign * rule.side(&b, now) {
            a
        } else {
            b
        }
    }
}

fn unreachable(driver_rho: f64) -> impl Fn(KinematicsError) -> KinematicsError {
    move |e| KinematicsError::UnreachableState {
        driver_rho,
        source: Box::new(e),
    }
}

/// Places every vertex for the valley fold angle `driver_rho`.
///
/// Canonical frame: the first mid-row vertex at the origin, the first valley
/// crease along `+x`, mid-row level in the `y = 0` plane, chamber opening
/// toward `+z`.
pub fn solve_fold(
    pattern: &Arc<CreasePattern2D>,
    driver_rho: f64,
    previous: Option<&FoldedGeometry>,
) -> Result<FoldedGeometry, KinematicsError> {
    if driver_rho == 0.0 {
        // The flat sheet is known exactly; solving it would only accumulate
        // rounding at a doubly tangent configuration.
        let flat = pattern.vertices.iter().map(|p| Point3::new(p.x, p.y, 0.0)).collect();
        let mut geom = geometry_from_vertices(pattern, flat, 0.0);
        geom.driver_rho = 0.0;
        geom.branch_ambiguous = true;
        return Ok(geom);
    }
    let params = &pattern.params;
    let m = params.num_units as i32;
    let n = params.num_rows as i32;
    let l = params.crease_length();
    let h = params.strip_height();
    let diag = params.diagonal_length();
    let beta = 0.5 * driver_rho;
    let rise = 0.5 * h * beta.cos();
    let sink = 0.5 * h * beta.sin();
    let apex_gap = h * beta.cos();
    let y_axis = Vector3::y();
    let at = |level: i32, i: i32| pattern.vertex_at(level, i).expect("lattice vertex");
    let err = unreachable(driver_rho);

    let mut pos: Vec<Option<Point3<f64>>> = vec![None; pattern.vertices.len()];
    let mut placer = Placer {
        // the flat sheet is a bifurcation point, so it cannot anchor continuity
        prev: previous.filter(|p| !p.branch_ambiguous),
        ambiguous: false,
        ambiguity_tol: 1e-9 * l,
    };
    let mirror = |p: Point3<f64>| Point3::new(p.x, -p.y, p.z);

    pos[at(0, 0)] = Some(Point3::origin());
    pos[at(0, 1)] = Some(Point3::new(l, 0.0, 0.0));
    let t0 = Point3::new(0.5 * l, rise, -sink);
    pos[at(1, 0)] = Some(t0);
    pos[at(-1, 1)] = Some(mirror(t0));

    // Same-level neighbour at distance L, lower-level neighbour at the
    // diagonal length, and the level's plane y = level * rise.
    let place_on_level = |pos: &mut Vec<Option<Point3<f64>>>,
                              placer: &mut Placer,
                              level: i32,
                              i: i32|
     -> Result<Point3<f64>, KinematicsError> {
        let below = pos[at(level - 1, i)].expect("placed");
        let beside = pos[at(level, i - 1)].expect("placed");
        let cands = sphere_sphere_plane(&below, diag, &beside, l, &y_axis, f64::from(level) * rise)
            .map_err(&err)?;
        let rule = SideRule::LevelPlane {
            below: at(level - 1, i),
            beside: at(level, i - 1),
        };
        let p = placer.pick(at(level, i), cands, rule, pos);
        pos[at(level, i)] = Some(p);
        Ok(p)
    };

    for j in 1..m {
        let t = place_on_level(&mut pos, &mut placer, 1, j)?;
        let b = mirror(t);
        pos[at(-1, j + 1)] = Some(b);
        let mj = pos[at(0, j)].expect("placed");
        let cands = trilaterate_both(&mj, &t, &b, l, diag, diag).map_err(&err)?;
        let rule = SideRule::Cross {
            origin: at(0, j),
            p: at(1, j),
            q: at(-1, j + 1),
        };
        let next = placer.pick(at(0, j + 1), cands, rule, &pos);
        pos[at(0, j + 1)] = Some(next);
    }
    if n >= 2 {
        place_on_level(&mut pos, &mut placer, 1, m)?;
    }
    for level in 2..=n {
        let last = if level == n { m - 1 } else { m };
        for i in 0..=last {
            if i == m {
                place_on_level(&mut pos, &mut placer, level, i)?;
                continue;
            }
            let a = pos[at(level - 1, i)].expect("placed");
            let b = pos[at(level - 1, i + 1)].expect("placed");
            let c = pos[at(level - 2, i + 1)].expect("placed");
            let cands = trilaterate_both(&a, &b, &c, diag, diag, apex_gap).map_err(&err)?;
            let rule = SideRule::Cross {
                origin: at(level - 1, i),
                p: at(level - 2, i + 1),
                q: at(level - 1, i + 1),
            };
            let p = placer.pick(at(level, i), cands, rule, &pos);
            pos[at(level, i)] = Some(p);
        }
    }

    let vertices3d: Vec<Point3<f64>> = pos.into_iter().map(|p| p.expect("all vertices placed")).collect();
    let fold_angles = compute_fold_angles(pattern, &vertices3d);
    let handle_points = handle_points(pattern, &vertices3d);
    Ok(FoldedGeometry {
        pattern: Arc::clone(pattern),
        vertices3d,
        fold_angles,
        fraction: f64::NAN,
        driver_rho,
        handle_points,
        branch_ambiguous: placer.ambiguous,
    })
}

/// Geometry from externally supplied vertex positions (for example a
/// re-imported mesh); fold angles and handles are recomputed.
pub fn geometry_from_vertices(pattern: &Arc<CreasePattern2D>, vertices3d: Vec<Point3<f64>>, fraction: f64) -> FoldedGeometry {
    assert_eq!(vertices3d.len(), pattern.vertices.len(), "vertex count must match the pattern");
    FoldedGeometry {
        pattern: Arc::clone(pattern),
        fold_angles: compute_fold_angles(pattern, &vertices3d),
        handle_points: handle_points(pattern, &vertices3d),
        vertices3d,
        fraction,
        driver_rho: f64::NAN,
        branch_ambiguous: false,
    }
}

/// Outward (reference side) unit normal of a facet.
pub fn facet_normal(vertices: &[Point3<f64>], facet: &[usize; 3]) -> Vector3<f64> {
    let [a, b, c] = facet.map(|i| vertices[i]);
    (b - a).cross(&(c - a)).normalize()
}

fn compute_fold_angles(pattern: &CreasePattern2D, v: &[Point3<f64>]) -> Vec<Option<f64>> {
    pattern
        .creases
        .iter()
        .map(|c| {
            if c.assignment == Assignment::Boundary {
                return None;
            }
            let (f1, f2) = (&pattern.facets[c.facets[0]], &pattern.facets[c.facets[1]]);
            let n1 = facet_normal(v, f1);
            let n2 = facet_normal(v, f2);
            let angle = n1.cross(&n2).norm().atan2(n1.dot(&n2));
            let far = *f2.iter().find(|i| !c.vertices.contains(i)).expect("triangle");
            // Bending toward the reference side is a valley.
            let side = (v[far] - v[c.vertices[0]]).dot(&n1);
            Some(if side > 0.0 { -angle } else { angle })
        })
        .collect()
}

fn handle_points(pattern: &CreasePattern2D, v: &[Point3<f64>]) -> [Point3<f64>; 2] {
    let offset = pattern.params.handle_offset_mm;
    pattern.lips.map(|lip| {
        let (a, b) = (v[lip.edge[0]], v[lip.edge[1]]);
        let mid = nalgebra::center(&a, &b);
        let edge = (b - a).normalize();
        let to_opposite = v[lip.opposite] - mid;
        let away = -(to_opposite - edge * edge.dot(&to_opposite)).normalize();
        mid + away * offset
    })
}

/// Unit normals of the two lip facets pointing into the chamber.
pub fn lip_inward_normals(geom: &FoldedGeometry) -> [Vector3<f64>; 2] {
    geom.pattern
        .lips
        .map(|lip| -facet_normal(&geom.vertices3d, &geom.pattern.facets[lip.facet]))
}

/// Direction of the fold (cylinder) axis, if the mid-row level is curved.
pub fn fold_axis(geom: &FoldedGeometry) -> Option<Vector3<f64>> {
    let p = &geom.pattern;
    let [a, b, c] = [0, 1, 2].map(|i| geom.vertices3d[p.vertex_at(0, i).expect("mid row")]);
    let axis = (b - a).cross(&(c - b));
    let scale = (b - a).norm_squared();
    (axis.norm() > 1e-12 * scale).then(|| axis.normalize())
}

pub fn measure(geom: &FoldedGeometry) -> Measurement {
    let [nl, nr] = lip_inward_normals(geom);
    let gamma = nl.cross(&nr).norm().atan2(nl.dot(&nr));
    let overclosed = fold_axis(geom).is_some_and(|axis| nl.cross(&nr).dot(&axis) < 0.0);
    let theta = if overclosed { PI - gamma } else { gamma - PI };
    let [el, er] = geom.pattern.lips.map(|lip| {
        nalgebra::center(&geom.vertices3d[lip.edge[0]], &geom.vertices3d[lip.edge[1]])
    });
    Measurement {
        opening_angle_deg: theta.to_degrees(),
        handle_separation_mm: (geom.handle_points[1] - geom.handle_points[0]).norm(),
        tip_aperture_mm: (er - el).norm(),
    }
}

/// Largest relative deviation of any edge from its flat length.
pub fn isometry_residual(geom: &FoldedGeometry) -> f64 {
    let reference = pattern_edge_lengths(&geom.pattern);
    geom.pattern
        .creases
        .iter()
        .zip(reference)
        .map(|(c, l0)| {
            let l = (geom.vertices3d[c.vertices[1]] - geom.vertices3d[c.vertices[0]]).norm();
            (l - l0).abs() / l0
        })
        .fold(0.0, f64::max)
}

/// Largest deviation, in mm, of the geometry from its half-turn symmetry:
/// compares every pairwise vertex distance with that of the partner pair.
pub fn symmetry_residual(geom: &FoldedGeometry) -> f64 {
    let v = &geom.vertices3d;
    let partner = &geom.pattern.partner;
    let mut worst: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = (v[j] - v[i]).norm();
            let dp = (v[partner[j]] - v[partner[i]]).norm();
            worst = worst.max((d - dp).abs());
        }
    }
    worst
}

/// A design together with its closing driver value.
#[derive(Debug, Clone)]
pub struct FoldPath {
    pub pattern: Arc<CreasePattern2D>,
    /// Valley fold angle at which the lips face each other.
    pub closing_driver: f64,
}

impl FoldPath {
    pub fn new(params: &YoshimuraParams) -> Result<Self, KinematicsError> {
        let pattern = Arc::new(build_pattern(params)?);
        let closing_driver = find_closing_driver(&pattern)?;
        Ok(Self {
            pattern,
            closing_driver,
        })
    }

    pub fn params(&self) -> &YoshimuraParams {
        &self.pattern.params
    }

    /// Fold state at fraction `f` of the closing stroke, the driver being
    /// `f` times the closing driver.
    pub fn at_fraction(&self, f: f64, previous: Option<&FoldedGeometry>) -> Result<FoldedGeometry, KinematicsError> {
        if !(0.0..=1.0).contains(&f) {
            return Err(KinematicsError::FractionOutOfRange(f));
        }
        let mut geom = solve_fold(&self.pattern, f * self.closing_driver, previous)?;
        geom.fraction = f;
        Ok(geom)
    }

    /// Fold state whose opening angle is `theta_deg`, by bisection on the driver.
    pub fn at_opening_angle(&self, theta_deg: f64) -> Result<FoldedGeometry, KinematicsError> {
        let theta_at = |f: f64| -> Result<f64, KinematicsError> {
            Ok(measure(&self.at_fraction(f, None)?).opening_angle_deg)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        let (t_lo, t_hi) = (theta_at(lo)?, theta_at(hi)?);
        if !(t_lo - ANGLE_ROOT_TOL_DEG <= theta_deg && theta_deg <= t_hi + ANGLE_ROOT_TOL_DEG) {
            return Err(KinematicsError::RootNotBracketed {
                target: format!("opening angle {theta_deg} deg"),
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let t = theta_at(mid)?;
            if (t - theta_deg).abs() < 1e-3 * ANGLE_ROOT_TOL_DEG {
                lo = mid;
                hi = mid;
                break;
            }
            if t < theta_deg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let geom = self.at_fraction(0.5 * (lo + hi), None)?;
        let t = measure(&geom).opening_angle_deg;
        if (t - theta_deg).abs() > ANGLE_ROOT_TOL_DEG {
            return Err(KinematicsError::RootNotBracketed {
                target: format!("opening angle {theta_deg} deg (monotonicity violated)"),
            });
        }
        Ok(geom)
    }
}

fn signed_opening(pattern: &Arc<CreasePattern2D>, rho: f64) -> Result<f64, KinematicsError> {
    Ok(measure(&solve_fold(pattern, rho, None)?).opening_angle_deg)
}

/// Finds the valley fold angle at which the opening angle reaches zero.
/// If the fold becomes unreachable first, the last reachable driver is used.
fn find_closing_driver(pattern: &Arc<CreasePattern2D>) -> Result<f64, KinematicsError> {
    const SCAN: usize = 180;
    let mut lo = 0.0;
    let mut hi = None;
    let mut unreachable_at = None;
    for k in 1..SCAN {
        let rho = PI * k as f64 / SCAN as f64;
        match signed_opening(pattern, rho) {
            Ok(t) if t >= 0.0 => {
                hi = Some(rho);
                break;
            }
            Ok(_) => lo = rho,
            Err(_) => {
                unreachable_at = Some(rho);
                break;
            }
        }
    }
    let mut hi = match (hi, unreachable_at) {
        (Some(h), _) => h,
        (None, Some(u)) => {
            // cap at the reachability boundary
            let (mut a, mut b) = (lo, u);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if solve_fold(pattern, mid, None).is_ok() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(a);
        }
        (None, None) => {
            return Err(KinematicsError::RootNotBracketed {
                target: "closing driver".into(),
            })
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if signed_opening(pattern, mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn fold_at_fraction(params: &YoshimuraParams, f: f64) -> Result<FoldedGeometry, KinematicsError> {
    FoldPath::new(params)?.at_fraction(f, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub fraction: f64,
    pub opening_angle_deg: f64,
    pub handle_separation_mm: f64,
    pub tip_aperture_mm: f64,
    pub transmission_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldCurve {
    pub samples: Vec<CurveSample>,
    pub params: YoshimuraParams,
}

pub const MIN_CURVE_SAMPLES: usize = 11;

/// Geometry at `num_samples` uniformly spaced fractions, each solved with
/// the previous sample as continuity reference.
pub fn sample_path(path: &FoldPath, num_samples: usize) -> Result<Vec<FoldedGeometry>, KinematicsError> {
    let mut out: Vec<FoldedGeometry> = Vec::with_capacity(num_samples);
    for k in 0..num_samples {
        let f = k as f64 / (num_samples - 1) as f64;
        let g = path.at_fraction(f, out.last())?;
        out.push(g);
    }
    Ok(out)
}

/// Central differences of `a` against `x`, one-sided at the ends.
pub(crate) fn difference_ratio(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            (a[hi] - a[lo]) / (x[hi] - x[lo])
        })
        .collect()
}

pub fn fold_curve(params: &YoshimuraParams, num_samples: usize) -> Result<FoldCurve, KinematicsError> {
    if num_samples < MIN_CURVE_SAMPLES {
        return Err(KinematicsError::TooFewSamples {
            min: MIN_CURVE_SAMPLES,
            got: num_samples,
        });
    }
    let path = FoldPath::new(params)?;
    fold_curve_on(&path, num_samples)
}

pub fn fold_curve_on(path: &FoldPath, num_samples: usize) -> Result<FoldCurve, KinematicsError> {
    let geoms = sample_path(path, num_samples)?;
    let measured: Vec<Measurement> = geoms.iter().map(measure).collect();
    let x: Vec<f64> = measured.iter().map(|m| m.handle_separation_mm).collect();
    let a: Vec<f64> = measured.iter().map(|m| m.tip_aperture_mm).collect();
    let tr = difference_ratio(&a, &x);
    let samples = geoms
        .iter()
        .zip(&measured)
        .zip(tr)
        .map(|((g, m), tr)| CurveSample {
            fraction: g.fraction,
            opening_angle_deg: m.opening_angle_deg,
            handle_separation_mm: m.handle_separation_mm,
            tip_aperture_mm: m.tip_aperture_mm,
            transmission_ratio: tr,
        })
        .collect();
    Ok(FoldCurve {
        samples,
        params: path.params().clone(),
    })
}
