//! SVG crease-pattern export for laser cutting.
//!
//! Creases go into three groups named `mountain`, `valley` and `cut`, in
//! crease index order. User units are millimetres.

use std::collections::BTreeMap;
use std::fmt::Write;

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use crate::io::tables::fixed6;
use crate::pattern::{Assignment, CreasePattern2D};
use crate::TOOLKIT_VERSION;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub stroke_width_mm: f64,
    pub mountain_color: String,
    pub valley_color: String,
    pub cut_color: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            stroke_width_mm: 0.2,
            mountain_color: "#d62728".into(),
            valley_color: "#1f77b4".into(),
            cut_color: "#000000".into(),
        }
    }
}

const GROUPS: [(&str, Assignment); 3] = [
    ("mountain", Assignment::Mountain),
    ("valley", Assignment::Valley),
    ("cut", Assignment::Boundary),
];

pub fn export_svg(pattern: &CreasePattern2D, style: &SvgStyle) -> String {
    let (lo, hi) = pattern.bounds();
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<!-- {TOOLKIT_VERSION} -->");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.6}mm\" height=\"{h:.6}mm\" viewBox=\"{:.6} {:.6} {w:.6} {h:.6}\">",
        lo.x, lo.y
    );
    for (name, assignment) in GROUPS {
        let color = match assignment {
            Assignment::Mountain => &style.mountain_color,
            Assignment::Valley => &style.valley_color,
            Assignment::Boundary => &style.cut_color,
        };
        let _ = writeln!(
            out,
            "  <g id=\"{name}\" stroke=\"{color}\" stroke-width=\"{:.6}\" fill=\"none\">",
            style.stroke_width_mm
        );
        for crease in pattern.creases.iter().filter(|c| c.assignment == assignment) {
            let [a, b] = crease.vertices.map(|i| pattern.vertices[i]);
            let _ = writeln!(
                out,
                "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                fixed6(a.x),
                fixed6(a.y),
                fixed6(b.x),
                fixed6(b.y)
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Line segments per group and the view box of a document written by
/// [`export_svg`].
#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub view_box: [f64; 4],
    pub groups: BTreeMap<String, Vec<[f64; 4]>>,
}

impl SvgDocument {
    /// Every distinct segment endpoint.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for seg in self.groups.values().flatten() {
            for p in [[seg[0], seg[1]], [seg[2], seg[3]]] {
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        pts
    }
}

fn attr(tag: &BytesStart, name: &str) -> Result<Option<String>, String> {
    match tag.try_get_attribute(name).map_err(|e| e.to_string())? {
        None => Ok(None),
        Some(a) => a
            .normalized_value(XmlVersion::Implicit1_0)
            .map(|v| Some(v.into_owned()))
            .map_err(|e| e.to_string()),
    }
}

fn number(tag: &BytesStart, name: &str) -> Result<f64, String> {
    attr(tag, name)?
        .ok_or_else(|| format!("missing attribute {name}"))?
        .parse()
        .map_err(|e| format!("attribute {name}: {e}"))
}

/// Reads back the line segments, groups and view box of an SVG document
/// such as the one written by [`export_svg`].
pub fn parse_svg(text: &str) -> Result<SvgDocument, String> {
    let mut reader = Reader::from_str(text);
    let mut view_box = None;
    let mut groups: BTreeMap<String, Vec<[f64; 4]>> = BTreeMap::new();
    let mut current: Option<String> = None;
    loop {
        let event = reader
            .read_event()
            .map_err(|e| format!("at byte {}: {e}", reader.buffer_position()))?;
        match event {
            Event::Eof => break,
            Event::Start(tag) | Event::Empty(tag) => match tag.local_name().as_ref() {
                "svg" => {
                    let vb: Vec<f64> = attr(&tag, "viewBox")?
                        .ok_or("missing viewBox")?
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|e| format!("viewBox: {e}"))?;
                    view_box = Some(<[f64; 4]>::try_from(vb).map_err(|_| "viewBox needs four numbers")?);
                }
                "g" => {
                    let id = attr(&tag, "id")?.ok_or("group without id")?;
                    groups.entry(id.clone()).or_default();
                    current = Some(id);
                }
                "line" => {
                    let group = current.as_ref().ok_or("line outside a group")?;
                    let seg = [number(&tag, "x1")?, number(&tag, "y1")?, number(&tag, "x2")?, number(&tag, "y2")?];
                    groups.get_mut(group).expect("group registered").push(seg);
                }
                _ => {}
            },
            Event::End(tag) if tag.local_name().as_ref() == "g" => current = None,
            _ => {}
        }
    }
    Ok(SvgDocument {
        view_box: view_box.ok_or("no svg element")?,
        groups,
    })
}
