//! Grasp geometry: the chamber enclosed by the curled sheet, the four grasp
//! types and a friction-cone pull-out resistance.
//!
//! The chamber is the region on the arch side of the mouth plane (the plane
//! through both lip edge midpoints that contains the fold axis) whose radial
//! ray away from the axis meets the sheet. It is sampled on a voxel grid.

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GraspError;
use crate::kinematics::{facet_normal, fold_axis, measure, FoldPath, FoldedGeometry};
use crate::pattern::{Assignment, YoshimuraParams};

/// Below this fraction the sheet is considered too flat to hold anything.
pub const MIN_CHAMBER_FRACTION: f64 = 0.2;
pub const DEFAULT_RESOLUTION: usize = 128;
pub const DEFAULT_PACKING_FACTOR: f64 = 0.7;
/// Fraction treated as "near closed" for pinching at the lips.
pub const PINCH_FRACTION: f64 = 0.9;
pub const DEFAULT_FRICTION: f64 = 0.5;
/// Cells along the largest extent of the coarse inscribed-sphere search.
const COARSE_CELLS: usize = 32;
const REFINE_STARTS: usize = 8;
const DEFAULT_FRACTION_STEPS: usize = 17;
const DEFAULT_SURFACE_SAMPLES: usize = 24;
/// Contact band around a seated sphere, relative to its radius.
const CONTACT_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Sphere,
    MultiSphere,
    Buried,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub kind: ObjectKind,
    pub diameters_mm: Vec<f64>,
    #[serde(default)]
    pub burial_depth_mm: f64,
}

impl ObjectSpec {
    pub fn sphere(diameter_mm: f64) -> Self {
        Self {
            kind: ObjectKind::Sphere,
            diameters_mm: vec![diameter_mm],
            burial_depth_mm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), GraspError> {
        if self.diameters_mm.is_empty() {
            return Err(GraspError::InvalidObject("no diameters given".into()));
        }
        if let Some(d) = self.diameters_mm.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(GraspError::InvalidObject(format!("diameter {d} must be positive")));
        }
        if !(self.burial_depth_mm >= 0.0 && self.burial_depth_mm.is_finite()) {
            return Err(GraspError::InvalidObject(format!(
                "burial depth {} must be nonnegative",
                self.burial_depth_mm
            )));
        }
        if self.kind == ObjectKind::MultiSphere && self.diameters_mm.len() < 2 {
            return Err(GraspError::InvalidObject("multi_sphere needs at least two diameters".into()));
        }
        Ok(())
    }

    pub fn largest_diameter(&self) -> f64 {
        self.diameters_mm.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_volume(&self) -> f64 {
        self.diameters_mm.iter().map(|d| sphere_volume(*d)).sum()
    }
}

pub fn sphere_volume(diameter: f64) -> f64 {
    std::f64::consts::PI * diameter.powi(3) / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraspType {
    Wrap,
    Pinch,
    Scoop,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspReport {
    pub grasp_type: GraspType,
    pub feasible: bool,
    /// Fraction at which the verdict was reached (the best one found).
    pub fraction: f64,
    pub chamber_volume_mm3: f64,
    /// Diameter of the largest sphere that fits the chamber.
    pub max_inscribed_sphere_mm: f64,
    pub aperture_mm: f64,
    pub contact_count: usize,
    pub pullout_proxy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspOptions {
    /// Voxels along the largest extent of the folded sheet.
    pub resolution: usize,
    pub packing_factor: f64,
    /// Number of fractions sampled uniformly on `[MIN_CHAMBER_FRACTION, 1]`.
    pub fraction_steps: usize,
    /// Subdivisions per facet edge when looking for contacts.
    pub surface_samples: usize,
    /// Friction coefficient used for wrap reports.
    pub friction: f64,
}

impl Default for GraspOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            packing_factor: DEFAULT_PACKING_FACTOR,
            fraction_steps: DEFAULT_FRACTION_STEPS,
            surface_samples: DEFAULT_SURFACE_SAMPLES,
            friction: DEFAULT_FRICTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChamberMetrics {
    pub volume_mm3: f64,
    /// Diameter of the largest inscribed sphere.
    pub max_inscribed_sphere_mm: f64,
    pub aperture_mm: f64,
    /// Centre of the largest inscribed sphere, when there is a chamber.
    pub inscribed_center: Option<[f64; 3]>,
}

struct Triangle {
    a: Point3<f64>,
    b: Point3<f64>,
    c: Point3<f64>,
}

/// A sheet facet with its extent along the fold axis.
struct Facet {
    tri: Triangle,
    axial: (f64, f64),
}

impl Triangle {
    /// Ray parameter of the hit, if the ray `o + t d` (t > 0) meets the triangle.
    fn ray_hit(&self, o: &Point3<f64>, d: &Vector3<f64>) -> Option<f64> {
        let e1 = self.b - self.a;
        let e2 = self.c - self.a;
        let p = d.cross(&e2);
        let det = e1.dot(&p);
        if det.abs() < 1e-14 * e1.norm_squared() {
            return None;
        }
        let inv = 1.0 / det;
        let s = o - self.a;
        let u = s.dot(&p) * inv;
        if !(0.0..=1.0).contains(&u) {
            return None;
        }
        let q = s.cross(&e1);
        let v = d.dot(&q) * inv;
        if v < 0.0 || u + v > 1.0 {
            return None;
        }
        let t = e2.dot(&q) * inv;
        (t > 0.0).then_some(t)
    }

    /// Closest point on the triangle to `p`.
    fn closest_point(&self, p: &Point3<f64>) -> Point3<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        let ab = b - a;
        let ac = c - a;
        let ap = p - a;
        let d1 = ab.dot(&ap);
        let d2 = ac.dot(&ap);
        if d1 <= 0.0 && d2 <= 0.0 {
            return a;
        }
        let bp = p - b;
        let d3 = ab.dot(&bp);
        let d4 = ac.dot(&bp);
        if d3 >= 0.0 && d4 <= d3 {
            return b;
        }
        let vc = d1 * d4 - d3 * d2;
        if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
            return a + ab * (d1 / (d1 - d3));
        }
        let cp = p - c;
        let d5 = ab.dot(&cp);
        let d6 = ac.dot(&cp);
        if d6 >= 0.0 && d5 <= d6 {
            return c;
        }
        let vb = d5 * d2 - d1 * d6;
        if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
            return a + ac * (d2 / (d2 - d6));
        }
        let va = d3 * d6 - d5 * d4;
        if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
            return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
        }
        let denom = 1.0 / (va + vb + vc);
        a + ab * (vb * denom) + ac * (vc * denom)
    }
}

/// The sheet as triangles plus the frame needed to bound the chamber.
struct Chamber {
    facets: Vec<Facet>,
    /// Radial surfaces from each boundary edge down to the axis; together
    /// with the sheet and the mouth plane they enclose the chamber.
    caps: Vec<Triangle>,
    axis_point: Point3<f64>,
    axis: Vector3<f64>,
    mouth_point: Point3<f64>,
    /// Unit normal of the mouth plane pointing into the chamber.
    depth: Vector3<f64>,
    lo: Point3<f64>,
    hi: Point3<f64>,
}

impl Chamber {
    fn new(geom: &FoldedGeometry) -> Result<Self, GraspError> {
        let v = &geom.vertices3d;
        let p = &geom.pattern;
        let [el, er] = p.lips.map(|lip| nalgebra::center(&v[lip.edge[0]], &v[lip.edge[1]]));
        let leak = |q: Point3<f64>| GraspError::OpenChamber { x: q.x, y: q.y, z: q.z };
        let axis = fold_axis(geom).ok_or_else(|| leak(el))?;
        let [a, b, c] = [0, 1, 2].map(|i| v[p.vertex_at(0, i).expect("mid row")]);
        let axis_point = circumcenter(&a, &b, &c).ok_or_else(|| leak(el))?;
        let chord = er - el;
        let normal = chord.cross(&axis);
        if normal.norm() <= 1e-12 * chord.norm().max(1.0) {
            return Err(leak(el));
        }
        let mut depth = normal.normalize();
        let mouth_point = nalgebra::center(&el, &er);
        // the arch lies on the side of the vertex farthest from the mouth plane
        let far = v
            .iter()
            .map(|q| (q - mouth_point).dot(&depth))
            .fold(0.0, |acc: f64, s| if s.abs() > acc.abs() { s } else { acc });
        if far.abs() <= 1e-9 * geom.pattern.params.max_crease_length() {
            return Err(leak(mouth_point));
        }
        if far < 0.0 {
            depth = -depth;
        }
        let mut lo = v[0];
        let mut hi = v[0];
        for q in v {
            lo = lo.inf(q);
            hi = hi.sup(q);
        }
        let project = |q: &Point3<f64>| axis_point + axis * axis.dot(&(q - axis_point));
        let mut caps = Vec::new();
        for crease in p.creases.iter().filter(|c| c.assignment == Assignment::Boundary) {
            let (u, w) = (v[crease.vertices[0]], v[crease.vertices[1]]);
            let (pu, pw) = (project(&u), project(&w));
            for t in [Triangle { a: u, b: w, c: pw }, Triangle { a: u, b: pw, c: pu }] {
                if (t.b - t.a).cross(&(t.c - t.a)).norm() > 1e-12 * (t.b - t.a).norm_squared().max(1.0) {
                    caps.push(t);
                }
            }
        }
        let facets = p
            .facets
            .iter()
            .map(|f| {
                let s = f.map(|i| axis.dot(&(v[i] - axis_point)));
                Facet {
                    tri: Triangle {
                        a: v[f[0]],
                        b: v[f[1]],
                        c: v[f[2]],
                    },
                    axial: (s[0].min(s[1]).min(s[2]), s[0].max(s[1]).max(s[2])),
                }
            })
            .collect();
        Ok(Self {
            facets,
            caps,
            axis_point,
            axis,
            mouth_point,
            depth,
            lo,
            hi,
        })
    }

    fn contains(&self, q: &Point3<f64>) -> bool {
        if (q - self.mouth_point).dot(&self.depth) <= 0.0 {
            return false;
        }
        let r = q - self.axis_point;
        let s = self.axis.dot(&r);
        let radial = r - self.axis * s;
        let len = radial.norm();
        if len == 0.0 {
            return false;
        }
        let dir = radial / len;
        self.facets
            .iter()
            .filter(|f| f.axial.0 <= s && s <= f.axial.1)
            .any(|f| f.tri.ray_hit(q, &dir).is_some())
    }

    /// Distance to the nearest wall: any facet or the mouth plane.
    fn clearance(&self, q: &Point3<f64>) -> f64 {
        let mouth = (q - self.mouth_point).dot(&self.depth);
        self.facets
            .iter()
            .map(|f| &f.tri)
            .chain(&self.caps)
            .map(|t| (q - t.closest_point(q)).norm())
            .fold(mouth, f64::min)
    }

    /// Clearance if `q` is in the chamber, else `None`.
    fn inside_clearance(&self, q: &Point3<f64>) -> Option<f64> {
        self.contains(q).then(|| self.clearance(q))
    }
}

fn circumcenter(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> Option<Point3<f64>> {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(&ac);
    let n2 = n.norm_squared();
    if n2 <= 1e-24 * ab.norm_squared() * ac.norm_squared() {
        return None;
    }
    let offset = (n.cross(&ab) * ac.norm_squared() + ac.cross(&n) * ab.norm_squared()) / (2.0 * n2);
    Some(a + offset)
}

/// Volume, largest inscribed sphere and aperture of the chamber.
/// Geometries below [`MIN_CHAMBER_FRACTION`] report an empty chamber.
pub fn chamber_metrics(geom: &FoldedGeometry) -> Result<ChamberMetrics, GraspError> {
    chamber_metrics_with(geom, DEFAULT_RESOLUTION)
}

pub fn chamber_metrics_with(geom: &FoldedGeometry, resolution: usize) -> Result<ChamberMetrics, GraspError> {
    let aperture_mm = measure(geom).tip_aperture_mm;
    let empty = ChamberMetrics {
        volume_mm3: 0.0,
        max_inscribed_sphere_mm: 0.0,
        aperture_mm,
        inscribed_center: None,
    };
    if !(geom.fraction >= MIN_CHAMBER_FRACTION) {
        return Ok(empty);
    }
    let chamber = Chamber::new(geom)?;
    let extent = chamber.hi - chamber.lo;
    let h = extent.max() / resolution.max(1) as f64;
    let counts = extent.map(|e| ((e / h).ceil() as usize).max(1));
    let center_of = |i: usize, j: usize, k: usize| {
        chamber.lo + Vector3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * h
    };
    // Volume: every voxel centre. Inscribed sphere: clearance on a coarser
    // sub-lattice, then local refinement from the best few candidates.
    let stride = (resolution / COARSE_CELLS).max(1);
    let (count, mut candidates) = (0..counts.x)
        .into_par_iter()
        .map(|i| {
            let mut count = 0usize;
            let mut found = Vec::new();
            for j in 0..counts.y {
                for k in 0..counts.z {
                    let q = center_of(i, j, k);
                    if !chamber.contains(&q) {
                        continue;
                    }
                    count += 1;
                    if i % stride == 0 && j % stride == 0 && k % stride == 0 {
                        found.push((chamber.clearance(&q), [i, j, k]));
                    }
                }
            }
            (count, found)
        })
        .reduce(
            || (0, Vec::new()),
            |(n1, mut c1), (n2, c2)| {
                c1.extend(c2);
                (n1 + n2, c1)
            },
        );
    if count == 0 {
        return Err(GraspError::OpenChamber {
            x: chamber.mouth_point.x,
            y: chamber.mouth_point.y,
            z: chamber.mouth_point.z,
        });
    }
    if candidates.is_empty() {
        // chamber thinner than the sub-lattice spacing
        candidates = (0..counts.x)
            .flat_map(|i| (0..counts.y).flat_map(move |j| (0..counts.z).map(move |k| [i, j, k])))
            .filter_map(|ijk| {
                let q = center_of(ijk[0], ijk[1], ijk[2]);
                chamber.inside_clearance(&q).map(|c| (c, ijk))
            })
            .collect();
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let (radius, center) = candidates
        .iter()
        .take(REFINE_STARTS)
        .map(|&(c, [i, j, k])| refine_inscribed(&chamber, center_of(i, j, k), c, stride as f64 * h))
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one candidate");
    Ok(ChamberMetrics {
        volume_mm3: count as f64 * h.powi(3),
        max_inscribed_sphere_mm: 2.0 * radius,
        aperture_mm,
        inscribed_center: Some(center.into()),
    })
}

/// Compass search from the best voxel centre toward the local clearance maximum.
fn refine_inscribed(chamber: &Chamber, start: Point3<f64>, value: f64, step: f64) -> (f64, Point3<f64>) {
    let dirs = [
        Vector3::x(),
        -Vector3::x(),
        Vector3::y(),
        -Vector3::y(),
        Vector3::z(),
        -Vector3::z(),
    ];
    let (mut best, mut at, mut step) = (value, start, step);
    let stop = 1e-6 * step;
    while step > stop {
        let mut moved = false;
        for d in &dirs {
            let q = at + d * step;
            if let Some(c) = chamber.inside_clearance(&q) {
                if c > best {
                    best = c;
                    at = q;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (best, at)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullOut {
    /// Tightest fraction at which the sphere fits.
    pub fraction: f64,
    pub contact_count: usize,
    /// Contact-area weighted resistance, as a share of the sheet area.
    pub proxy: f64,
}

struct Snapshot {
    fraction: f64,
    geom: FoldedGeometry,
    metrics: ChamberMetrics,
}

/// Chamber metrics of one design over a grid of fractions, reused across
/// objects.
pub struct GraspAnalyzer {
    path: FoldPath,
    options: GraspOptions,
    flat_aperture_mm: f64,
    grid: Vec<Snapshot>,
}

impl GraspAnalyzer {
    pub fn new(params: &YoshimuraParams, options: GraspOptions) -> Result<Self, GraspError> {
        if options.fraction_steps < 2 || options.resolution == 0 || options.surface_samples == 0 {
            return Err(GraspError::InvalidObject(
                "grasp options need at least 2 fraction steps and nonzero resolutions".into(),
            ));
        }
        if !(options.packing_factor > 0.0 && options.packing_factor <= 1.0 && options.friction >= 0.0) {
            return Err(GraspError::InvalidObject(
                "packing factor must lie in (0, 1] and friction must be nonnegative".into(),
            ));
        }
        let path = FoldPath::new(params)?;
        let flat_aperture_mm = measure(&path.at_fraction(0.0, None)?).tip_aperture_mm;
        let steps = options.fraction_steps;
        let grid = (0..steps)
            .map(|k| {
                let f = MIN_CHAMBER_FRACTION + (1.0 - MIN_CHAMBER_FRACTION) * k as f64 / (steps - 1) as f64;
                let geom = path.at_fraction(f, None)?;
                let metrics = chamber_metrics_with(&geom, options.resolution)?;
                Ok(Snapshot { fraction: f, geom, metrics })
            })
            .collect::<Result<Vec<_>, GraspError>>()?;
        Ok(Self {
            path,
            options,
            flat_aperture_mm,
            grid,
        })
    }

    pub fn params(&self) -> &YoshimuraParams {
        self.path.params()
    }

    /// `(fraction, metrics)` at every grid fraction.
    pub fn metrics(&self) -> impl Iterator<Item = (f64, &ChamberMetrics)> {
        self.grid.iter().map(|s| (s.fraction, &s.metrics))
    }

    /// Largest inscribed sphere diameter over the grid.
    pub fn max_inscribed_sphere_mm(&self) -> f64 {
        self.grid.iter().map(|s| s.metrics.max_inscribed_sphere_mm).fold(0.0, f64::max)
    }

    fn max_volume(&self) -> &Snapshot {
        self.grid
            .iter()
            .reduce(|a, b| if b.metrics.volume_mm3 > a.metrics.volume_mm3 { b } else { a })
            .expect("non-empty grid")
    }

    fn report(&self, grasp_type: GraspType, feasible: bool, fraction: f64, metrics: &ChamberMetrics) -> GraspReport {
        GraspReport {
            grasp_type,
            feasible,
            fraction,
            chamber_volume_mm3: metrics.volume_mm3,
            max_inscribed_sphere_mm: metrics.max_inscribed_sphere_mm,
            aperture_mm: metrics.aperture_mm,
            contact_count: 0,
            pullout_proxy: 0.0,
        }
    }

    /// Smallest fraction at which a sphere of `diameter` fits, refined by
    /// bisection between grid fractions, with its geometry and metrics.
    fn tightest_fit(&self, diameter: f64) -> Result<Option<(FoldedGeometry, ChamberMetrics)>, GraspError> {
        let fits = |m: &ChamberMetrics| m.max_inscribed_sphere_mm >= diameter;
        let Some(first) = self.grid.iter().position(|s| fits(&s.metrics)) else {
            return Ok(None);
        };
        let hit = &self.grid[first];
        if first == 0 {
            return Ok(Some((hit.geom.clone(), hit.metrics)));
        }
        let (mut lo, mut hi) = (self.grid[first - 1].fraction, hit.fraction);
        let mut best = (hit.geom.clone(), hit.metrics);
        for _ in 0..6 {
            let mid = 0.5 * (lo + hi);
            let geom = self.path.at_fraction(mid, None)?;
            let metrics = chamber_metrics_with(&geom, self.options.resolution)?;
            if fits(&metrics) {
                hi = mid;
                best = (geom, metrics);
            } else {
                lo = mid;
            }
        }
        Ok(Some(best))
    }

    /// Friction-cone pull-out resistance of a sphere seated at the centre of
    /// the chamber at its tightest fit.
    pub fn pullout(&self, diameter_mm: f64, mu: f64) -> Result<PullOut, GraspError> {
        self.pullout_sampled(diameter_mm, mu, self.options.surface_samples)
    }

    /// As [`Self::pullout`] with `samples` subdivisions per facet edge.
    pub fn pullout_sampled(&self, diameter_mm: f64, mu: f64, samples: usize) -> Result<PullOut, GraspError> {
        if !(diameter_mm > 0.0) || !(mu >= 0.0) || samples == 0 {
            return Err(GraspError::InvalidObject(format!(
                "pull-out needs a positive diameter and nonnegative friction (got {diameter_mm}, {mu})"
            )));
        }
        let wraps = self.flat_aperture_mm >= diameter_mm;
        let fit = if wraps { self.tightest_fit(diameter_mm)? } else { None };
        let Some((geom, metrics)) = fit else {
            return Err(GraspError::NoWrap { diameter_mm });
        };
        let center = Point3::from(metrics.inscribed_center.expect("chamber present"));
        let chamber = Chamber::new(&geom)?;
        let extraction = -chamber.depth;
        let reach = 0.5 * diameter_mm * (1.0 + CONTACT_BAND);
        let sheet_area: f64 = (0..geom.pattern.facets.len()).map(|f| geom.pattern.facet_area(f)).sum();
        let (contacts, proxy) = contact_resistance(&geom, &center, reach, &extraction, mu, samples);
        Ok(PullOut {
            fraction: geom.fraction,
            contact_count: contacts,
            proxy: proxy / sheet_area,
        })
    }

    pub fn assess(&self, obj: &ObjectSpec, grasp_type: GraspType) -> Result<GraspReport, GraspError> {
        obj.validate()?;
        let d = obj.largest_diameter();
        Ok(match grasp_type {
            GraspType::Wrap => {
                if self.flat_aperture_mm < d {
                    let s = &self.grid[0];
                    return Ok(self.report(GraspType::Wrap, false, s.fraction, &s.metrics));
                }
                match self.tightest_fit(d)? {
                    None => {
                        let best = self
                            .grid
                            .iter()
                            .reduce(|a, b| {
                                if b.metrics.max_inscribed_sphere_mm > a.metrics.max_inscribed_sphere_mm {
                                    b
                                } else {
                                    a
                                }
                            })
                            .expect("non-empty grid");
                        self.report(GraspType::Wrap, false, best.fraction, &best.metrics)
                    }
                    Some((geom, metrics)) => {
                        let mut report = self.report(GraspType::Wrap, true, geom.fraction, &metrics);
                        let pull = self.pullout(d, self.options.friction)?;
                        report.contact_count = pull.contact_count;
                        report.pullout_proxy = pull.proxy;
                        report
                    }
                }
            }
            GraspType::Pinch => {
                let geom = self.path.at_fraction(PINCH_FRACTION, None)?;
                let metrics = chamber_metrics_with(&geom, self.options.resolution)?;
                let feasible = d <= metrics.aperture_mm;
                let mut report = self.report(GraspType::Pinch, feasible, PINCH_FRACTION, &metrics);
                report.contact_count = if feasible { 2 } else { 0 };
                report
            }
            GraspType::Scoop => {
                let s = self.max_volume();
                let lip = geom_lip_edge_length(&s.geom);
                let feasible = s.metrics.volume_mm3 >= obj.total_volume() && obj.burial_depth_mm <= lip;
                self.report(GraspType::Scoop, feasible, s.fraction, &s.metrics)
            }
            GraspType::Multi => {
                let s = self.max_volume();
                let feasible = obj.total_volume() <= self.options.packing_factor * s.metrics.volume_mm3;
                self.report(GraspType::Multi, feasible, s.fraction, &s.metrics)
            }
        })
    }

    /// Verdict for the grasp type natural to the object: buried objects are
    /// scooped, groups are grasped together, and single spheres are wrapped,
    /// falling back to a pinch when they do not fit the chamber.
    pub fn classify(&self, obj: &ObjectSpec) -> Result<GraspReport, GraspError> {
        match obj.kind {
            ObjectKind::Buried => self.assess(obj, GraspType::Scoop),
            ObjectKind::MultiSphere => self.assess(obj, GraspType::Multi),
            ObjectKind::Sphere => {
                let wrap = self.assess(obj, GraspType::Wrap)?;
                if wrap.feasible {
                    return Ok(wrap);
                }
                let pinch = self.assess(obj, GraspType::Pinch)?;
                Ok(if pinch.feasible { pinch } else { wrap })
            }
        }
    }
}

fn geom_lip_edge_length(geom: &FoldedGeometry) -> f64 {
    let lip = geom.pattern.lips[0];
    (geom.vertices3d[lip.edge[1]] - geom.vertices3d[lip.edge[0]]).norm()
}

/// Sums `area * max(0, -n.z + mu |n x z|)` over facet sample points within
/// `reach` of `center`; `n` is the facet normal facing the centre.
fn contact_resistance(
    geom: &FoldedGeometry,
    center: &Point3<f64>,
    reach: f64,
    extraction: &Vector3<f64>,
    mu: f64,
    samples: usize,
) -> (usize, f64) {
    let v = &geom.vertices3d;
    let s = samples as f64;
    let mut count = 0;
    let mut total = 0.0;
    for facet in &geom.pattern.facets {
        let [a, b, c] = facet.map(|i| v[i]);
        let (e1, e2) = ((b - a) / s, (c - a) / s);
        let cell_area = 0.5 * e1.cross(&e2).norm();
        let mut normal = facet_normal(v, facet);
        if normal.dot(&(center - a)) < 0.0 {
            normal = -normal;
        }
        let resistance = (-normal.dot(extraction) + mu * normal.cross(extraction).norm()).max(0.0);
        // centroids of the s^2 sub-triangles
        for i in 0..samples {
            for j in 0..samples - i {
                let base = a + e1 * i as f64 + e2 * j as f64;
                let mut cells = vec![base + (e1 + e2) / 3.0];
                if i + j + 1 < samples {
                    cells.push(base + (e1 + e2) * (2.0 / 3.0));
                }
                for q in cells {
                    if (q - center).norm() <= reach {
                        count += 1;
                        total += cell_area * resistance;
                    }
                }
            }
        }
    }
    (count, total)
}

/// Verdict for one object with default options.
pub fn classify(params: &YoshimuraParams, obj: &ObjectSpec) -> Result<GraspReport, GraspError> {
    obj.validate()?;
    GraspAnalyzer::new(params, GraspOptions::default())?.classify(obj)
}

/// Pull-out resistance of a wrapped sphere with default options.
pub fn pullout_proxy(params: &YoshimuraParams, diameter_mm: f64, mu: f64) -> Result<f64, GraspError> {
    Ok(GraspAnalyzer::new(params, GraspOptions::default())?.pullout(diameter_mm, mu)?.proxy)
}
