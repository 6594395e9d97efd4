//! Sphere intersection primitives used to place vertices one at a time.

use nalgebra::{Point3, Vector3};

use crate::error::KinematicsError;

/// Tolerance on the squared out-of-plane offset, relative to the largest
/// squared radius, before a pair of candidate points is declared
/// non-existent. Near-flat states of tall designs sit a few 1e-12 below zero
/// from rounding in the anchors alone.
pub const SQUARED_OFFSET_TOL: f64 = 1e-10;
/// Squared offsets this small (relative) are rounding noise of a tangency.
const TANGENT_SNAP: f64 = 64.0 * f64::EPSILON;

/// Which side of the anchor plane the solution lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Both intersection points of three spheres, `(plus, minus)`, plus the
/// out-of-plane offset. The plus point lies on the side of
/// `(p2 - p1) x (p3 - p1)`.
pub fn trilaterate_both(
    p1: &Point3<f64>,
    p2: &Point3<f64>,
    p3: &Point3<f64>,
    r1: f64,
    r2: f64,
    r3: f64,
) -> Result<(Point3<f64>, Point3<f64>, f64), KinematicsError> {
    let d12 = p2 - p1;
    let d = d12.norm();
    let scale = d.max((p3 - p1).norm());
    if d <= f64::EPSILON * scale || scale == 0.0 {
        return Err(KinematicsError::CollinearAnchors);
    }
    let ex = d12 / d;
    let v13 = p3 - p1;
    let i = ex.dot(&v13);
    let ey_raw = v13 - ex * i;
    let j = ey_raw.norm();
    if j <= 1e-12 * scale {
        return Err(KinematicsError::CollinearAnchors);
    }
    let ey = ey_raw / j;
    let ez = ex.cross(&ey);

    let x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - (i / j) * x;
    let z2 = r1 * r1 - x * x - y * y;
    let r2max = r1.max(r2).max(r3).powi(2);
    if z2 < -SQUARED_OFFSET_TOL * r2max {
        return Err(KinematicsError::NoIntersection { squared_offset: z2 });
    }
    let z = if z2 <= TANGENT_SNAP * r2max { 0.0 } else { z2.sqrt() };
    let base = p1 + ex * x + ey * y;
    Ok((base + ez * z, base - ez * z, z))
}

/// The point at distances `r1, r2, r3` from `p1, p2, p3` on the chosen side
/// of the anchor plane.
pub fn trilaterate(
    p1: &Point3<f64>,
    p2: &Point3<f64>,
    p3: &Point3<f64>,
    r1: f64,
    r2: f64,
    r3: f64,
    branch: Branch,
) -> Result<Point3<f64>, KinematicsError> {
    let (plus, minus, _) = trilaterate_both(p1, p2, p3, r1, r2, r3)?;
    Ok(if branch.sign() > 0.0 { plus } else { minus })
}

/// Intersection of two spheres with the plane `normal . p = offset`.
/// Returns both candidates and their half-separation.
pub fn sphere_sphere_plane(
    c1: &Point3<f64>,
    r1: f64,
    c2: &Point3<f64>,
    r2: f64,
    normal: &Vector3<f64>,
    offset: f64,
) -> Result<(Point3<f64>, Point3<f64>, f64), KinematicsError> {
    let n = normal.normalize();
    let offset = offset / normal.norm();
    // Radical plane of the two spheres: m . p = k
    let mvec = c2 - c1;
    let k = 0.5 * (r1 * r1 - r2 * r2 + c2.coords.norm_squared() - c1.coords.norm_squared());
    let dir = n.cross(&mvec);
    let dir_norm = dir.norm();
    if dir_norm <= 1e-12 * mvec.norm() || mvec.norm() == 0.0 {
        return Err(KinematicsError::CollinearAnchors);
    }
    let dir = dir / dir_norm;
    // A point on both planes, taken in the span of n and mvec.
    let nm = n.dot(&mvec);
    let mm = mvec.norm_squared();
    let det = mm - nm * nm;
    let a = (offset * mm - k * nm) / det;
    let b = (k - offset * nm) / det;
    let base = Point3::from(n * a + mvec * b);
    let w = base - c1;
    let t_mid = -w.dot(&dir);
    let h2 = r1 * r1 - (w + dir * t_mid).norm_squared();
    let r2max = r1.max(r2).powi(2);
    if h2 < -SQUARED_OFFSET_TOL * r2max {
        return Err(KinematicsError::NoIntersection { squared_offset: h2 });
    }
    let h = if h2 <= TANGENT_SNAP * r2max { 0.0 } else { h2.sqrt() };
    let mid = base + dir * t_mid;
    Ok((mid + dir * h, mid - dir * h, h))
}
