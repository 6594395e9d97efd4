//! Flat Yoshimura crease pattern.
//!
//! A row of the pattern is a strip of diamonds. The diamonds of row `r` sit
//! between three horizontal lattice levels `r - 1`, `r` and `r + 1`; level `k`
//! holds vertices at `((i + k/2) L, k H/2)` with `H = L tan(alpha)`. Adjacent
//! rows share vertices: the top apexes of row `r` are the mid-row vertices of
//! row `r + 1`, and the bottom apexes of row `r + 1` are mid-row vertices of
//! row `r`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::PatternError;

const ROW_MATCH_TOL: f64 = 1e-12;

/// Design vector of a Yoshimura gripper. Angles are in degrees, lengths in mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoshimuraParams {
    pub alpha_deg: Vec<f64>,
    pub crease_length_mm: Vec<f64>,
    pub num_units: usize,
    pub num_rows: usize,
    pub handle_offset_mm: f64,
}

impl Default for YoshimuraParams {
    fn default() -> Self {
        Self::uniform(25.0, 40.0, 6, 2)
    }
}

impl YoshimuraParams {
    /// Same angle and length on every row; the handle tab is half a crease long.
    pub fn uniform(alpha_deg: f64, crease_length_mm: f64, num_units: usize, num_rows: usize) -> Self {
        Self {
            alpha_deg: vec![alpha_deg; num_rows],
            crease_length_mm: vec![crease_length_mm; num_rows],
            num_units,
            num_rows,
            handle_offset_mm: 0.5 * crease_length_mm,
        }
    }

    /// Every length (creases and handle) multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            crease_length_mm: self.crease_length_mm.iter().map(|l| l * s).collect(),
            handle_offset_mm: self.handle_offset_mm * s,
            ..self.clone()
        }
    }

    pub fn with_alpha(&self, alpha_deg: f64) -> Self {
        Self {
            alpha_deg: vec![alpha_deg; self.num_rows],
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        let invalid = |field, reason: String| Err(PatternError::InvalidParams { field, reason });
        for &a in &self.alpha_deg {
            if !(a.is_finite() && a > 0.0 && a < 90.0) {
                return invalid("alpha_deg", format!("{a} is not in (0, 90) degrees"));
            }
        }
        for &l in &self.crease_length_mm {
            if !(l.is_finite() && l > 0.0) {
                return invalid("crease_length_mm", format!("{l} is not positive"));
            }
        }
        if self.num_units < 3 {
            return invalid("num_units", format!("{} < 3", self.num_units));
        }
        if self.num_rows < 1 {
            return invalid("num_rows", "must be at least 1".into());
        }
        if self.alpha_deg.len() != self.num_rows {
            return invalid(
                "alpha_deg",
                format!("{} entries for {} rows", self.alpha_deg.len(), self.num_rows),
            );
        }
        if self.crease_length_mm.len() != self.num_rows {
            return invalid(
                "crease_length_mm",
                format!("{} entries for {} rows", self.crease_length_mm.len(), self.num_rows),
            );
        }
        if !(self.handle_offset_mm.is_finite() && self.handle_offset_mm >= 0.0) {
            return invalid("handle_offset_mm", format!("{} is negative", self.handle_offset_mm));
        }
        // Stacked rows reuse each other's vertices, so spacing and height must agree.
        for r in 1..self.num_rows {
            let (l0, l1) = (self.crease_length_mm[0], self.crease_length_mm[r]);
            if (l1 - l0).abs() > ROW_MATCH_TOL * l0 {
                return Err(PatternError::IncompatibleRows {
                    first: 0,
                    second: r,
                    reason: format!("mid-vertex spacing {l0} mm vs {l1} mm"),
                });
            }
            let (a0, a1) = (self.alpha_deg[0], self.alpha_deg[r]);
            if (a1 - a0).abs() > ROW_MATCH_TOL * a0 {
                return Err(PatternError::IncompatibleRows {
                    first: 0,
                    second: r,
                    reason: format!("strip heights differ (alpha {a0} deg vs {a1} deg)"),
                });
            }
        }
        Ok(())
    }

    pub fn alpha_rad(&self) -> f64 {
        self.alpha_deg[0].to_radians()
    }

    pub fn crease_length(&self) -> f64 {
        self.crease_length_mm[0]
    }

    pub fn max_crease_length(&self) -> f64 {
        self.crease_length_mm.iter().copied().fold(0.0, f64::max)
    }

    /// Row strip height `H = L tan(alpha)`.
    pub fn strip_height(&self) -> f64 {
        self.crease_length() * self.alpha_rad().tan()
    }

    /// Length of a diagonal (mountain) crease, `(L/2) / cos(alpha)`.
    pub fn diagonal_length(&self) -> f64 {
        0.5 * self.crease_length() / self.alpha_rad().cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assignment {
    Mountain,
    Valley,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crease {
    pub vertices: [usize; 2],
    pub assignment: Assignment,
    /// One facet for boundary edges, two otherwise.
    pub facets: Vec<usize>,
}

/// Position of a vertex in the pattern lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeId {
    pub level: i32,
    pub index: i32,
}

/// The two lateral end facets and their outer boundary edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lip {
    pub facet: usize,
    /// `edge[0]` is the lateral corner vertex, `edge[1]` the other end of the cut edge.
    pub edge: [usize; 2],
    /// Facet vertex not on the edge.
    pub opposite: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CreasePattern2D {
    pub vertices: Vec<Point2<f64>>,
    pub lattice: Vec<LatticeId>,
    pub creases: Vec<Crease>,
    /// Triangles, wound clockwise in the sheet plane so that their normal
    /// points to the reference (outer) side, `-z`.
    pub facets: Vec<[usize; 3]>,
    pub params: YoshimuraParams,
    pub lips: [Lip; 2],
    /// Vertex mapped by the half-turn symmetry of the sheet about its centre.
    pub partner: Vec<usize>,
    index: HashMap<LatticeId, usize>,
}

fn level_range(level: i32, m: i32, n: i32) -> std::ops::RangeInclusive<i32> {
    if level == -1 {
        1..=m
    } else if level == n {
        0..=m - 1
    } else {
        0..=m
    }
}

pub fn build_pattern(params: &YoshimuraParams) -> Result<CreasePattern2D, PatternError> {
    params.validate()?;
    let m = params.num_units as i32;
    let n = params.num_rows as i32;
    let l = params.crease_length();
    let h = params.strip_height();

    let mut vertices = Vec::new();
    let mut lattice = Vec::new();
    let mut index = HashMap::new();
    for level in -1..=n {
        for i in level_range(level, m, n) {
            let id = LatticeId { level, index: i };
            index.insert(id, vertices.len());
            lattice.push(id);
            let x = (f64::from(i) + 0.5 * f64::from(level)) * l;
            let y = 0.5 * f64::from(level) * h;
            vertices.push(Point2::new(x, y));
        }
    }
    let at = |level: i32, i: i32| index[&LatticeId { level, index: i }];

    let mut facets = Vec::with_capacity(2 * (m * n) as usize);
    for r in 0..n {
        for j in 0..m {
            let (a, b) = (at(r, j), at(r, j + 1));
            // up triangle a, b, apex above: clockwise is a -> apex -> b
            facets.push([a, at(r + 1, j), b]);
            // down triangle: clockwise is a -> b -> apex below
            facets.push([a, b, at(r - 1, j + 1)]);
        }
    }

    let mut edge_facets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, f) in facets.iter().enumerate() {
        for k in 0..3 {
            let (u, v) = (f[k], f[(k + 1) % 3]);
            edge_facets.entry((u.min(v), u.max(v))).or_default().push(fi);
        }
    }
    let creases = edge_facets
        .into_iter()
        .map(|((u, v), fs)| {
            let assignment = if fs.len() == 1 {
                Assignment::Boundary
            } else if lattice[u].level == lattice[v].level {
                Assignment::Valley
            } else {
                Assignment::Mountain
            };
            Crease {
                vertices: [u, v],
                assignment,
                facets: fs,
            }
        })
        .collect::<Vec<_>>();

    let partner = lattice
        .iter()
        .map(|id| at(n - 1 - id.level, m - id.index))
        .collect::<Vec<_>>();

    let left = Lip {
        facet: 0,
        edge: [at(0, 0), at(1, 0)],
        opposite: at(0, 1),
    };
    let right_edge = [partner[left.edge[0]], partner[left.edge[1]]];
    let right_opposite = partner[left.opposite];
    let right_facet = facets
        .iter()
        .position(|f| {
            [right_edge[0], right_edge[1], right_opposite]
                .iter()
                .all(|v| f.contains(v))
        })
        .expect("central symmetry maps facets to facets");
    let right = Lip {
        facet: right_facet,
        edge: right_edge,
        opposite: right_opposite,
    };

    Ok(CreasePattern2D {
        vertices,
        lattice,
        creases,
        facets,
        params: params.clone(),
        lips: [left, right],
        partner,
        index,
    })
}

impl CreasePattern2D {
    pub fn vertex_at(&self, level: i32, index: i32) -> Option<usize> {
        self.index.get(&LatticeId { level, index }).copied()
    }

    pub fn num_units(&self) -> usize {
        self.params.num_units
    }

    pub fn num_rows(&self) -> usize {
        self.params.num_rows
    }

    /// Index of the crease joining `u` and `v`, if any.
    pub fn crease_between(&self, u: usize, v: usize) -> Option<usize> {
        let key = [u.min(v), u.max(v)];
        self.creases.iter().position(|c| c.vertices == key)
    }

    pub fn vertex_degree(&self, v: usize) -> usize {
        self.creases.iter().filter(|c| c.vertices.contains(&v)).count()
    }

    pub fn facet_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.facets[f].map(|i| self.vertices[i]);
        0.5 * (b - a).perp(&(c - a)).abs()
    }

    /// Axis-aligned bounds `(min, max)` of the flat sheet.
    pub fn bounds(&self) -> (Point2<f64>, Point2<f64>) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Sum of facet corner angles at `v`.
    pub fn angle_sum(&self, v: usize) -> f64 {
        self.facets
            .iter()
            .filter_map(|f| {
                let k = f.iter().position(|&i| i == v)?;
                let p = self.vertices[v];
                let a: Vector2<f64> = self.vertices[f[(k + 1) % 3]] - p;
                let b: Vector2<f64> = self.vertices[f[(k + 2) % 3]] - p;
                Some(a.angle(&b))
            })
            .sum()
    }

    /// Interior vertices: every incident edge is a fold crease.
    pub fn is_interior(&self, v: usize) -> bool {
        let mut any = false;
        for c in self.creases.iter().filter(|c| c.vertices.contains(&v)) {
            any = true;
            if c.assignment == Assignment::Boundary {
                return false;
            }
        }
        any
    }
}

/// Flat length of every crease and boundary edge, indexed like `pattern.creases`.
pub fn pattern_edge_lengths(pattern: &CreasePattern2D) -> Vec<f64> {
    pattern
        .creases
        .iter()
        .map(|c| (pattern.vertices[c.vertices[1]] - pattern.vertices[c.vertices[0]]).norm())
        .collect()
}
