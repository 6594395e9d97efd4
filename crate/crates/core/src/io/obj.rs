//! Wavefront OBJ export of a folded state.

use std::fmt::Write;

use nalgebra::Point3;

use crate::io::tables::fixed6;
use crate::kinematics::FoldedGeometry;
use crate::TOOLKIT_VERSION;

pub fn export_obj(geom: &FoldedGeometry) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {TOOLKIT_VERSION}");
    let _ = writeln!(out, "# fraction {:.6}", geom.fraction);
    for v in &geom.vertices3d {
        let _ = writeln!(out, "v {} {} {}", fixed6(v.x), fixed6(v.y), fixed6(v.z));
    }
    for f in &geom.pattern.facets {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<Point3<f64>>,
    /// Zero-based vertex indices.
    pub faces: Vec<[usize; 3]>,
}

/// Reads `v` and triangular `f` records; other records are ignored.
pub fn parse_obj(text: &str) -> Result<ObjMesh, String> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let err = |what: &str| format!("line {}: {what}", n + 1);
        match fields.next() {
            Some("v") => {
                let c: Vec<f64> = fields
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e| err(&format!("bad coordinate: {e}")))?;
                if c.len() < 3 {
                    return Err(err("vertex needs three coordinates"));
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = fields
                    .map(|t| t.split('/').next().unwrap_or(t).parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| err(&format!("bad index: {e}")))?;
                if idx.len() != 3 || idx.contains(&0) {
                    return Err(err("faces must be triangles with 1-based indices"));
                }
                faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    if let Some(bad) = faces.iter().flatten().find(|&&i| i >= vertices.len()) {
        return Err(format!("face index {} out of range", bad + 1));
    }
    Ok(ObjMesh { vertices, faces })
}
