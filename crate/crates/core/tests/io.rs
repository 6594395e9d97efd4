use std::path::Path;
use std::sync::Arc;

use approx::assert_relative_eq;
use yoshimura_gripper::io::tables::*;
use yoshimura_gripper::io::*;
use yoshimura_gripper::kinematics::{fold_at_fraction, fold_curve, geometry_from_vertices, measure};
use yoshimura_gripper::pattern::{build_pattern, Assignment, YoshimuraParams};
use yoshimura_gripper::TOOLKIT_VERSION;

fn default_params() -> YoshimuraParams {
    YoshimuraParams::uniform(25.0, 40.0, 6, 2)
}

#[test]
fn svg_round_trips_every_vertex() {
    let pattern = build_pattern(&default_params()).unwrap();
    let doc = parse_svg(&export_svg(&pattern, &SvgStyle::default())).unwrap();
    assert_eq!(doc.groups.keys().collect::<Vec<_>>(), ["cut", "mountain", "valley"]);
    let points = doc.points();
    for v in &pattern.vertices {
        let nearest = points
            .iter()
            .map(|p| (p[0] - v.x).hypot(p[1] - v.y))
            .fold(f64::INFINITY, f64::min);
        assert!(nearest <= 1e-6, "{v:?}");
    }
    let count = |a: Assignment| pattern.creases.iter().filter(|c| c.assignment == a).count();
    assert_eq!(doc.groups["mountain"].len(), count(Assignment::Mountain));
    assert_eq!(doc.groups["valley"].len(), count(Assignment::Valley));
    assert_eq!(doc.groups["cut"].len(), count(Assignment::Boundary));
}

#[test]
fn svg_view_box_scales_with_the_design() {
    let one = parse_svg(&export_svg(&build_pattern(&default_params()).unwrap(), &SvgStyle::default())).unwrap();
    let two = parse_svg(&export_svg(&build_pattern(&default_params().scaled(2.0)).unwrap(), &SvgStyle::default())).unwrap();
    for k in 0..4 {
        assert_relative_eq!(two.view_box[k], 2.0 * one.view_box[k], epsilon = 1e-6);
    }
}

#[test]
fn svg_valleys_of_a_single_row() {
    // one row of three units has a horizontal valley line of three segments
    let pattern = build_pattern(&YoshimuraParams::uniform(45.0, 2.0, 3, 1)).unwrap();
    let doc = parse_svg(&export_svg(&pattern, &SvgStyle::default())).unwrap();
    let valleys = &doc.groups["valley"];
    assert_eq!(valleys.len(), 3);
    for s in valleys {
        assert!((s[1] - s[3]).abs() <= 1e-9);
        assert_relative_eq!((s[2] - s[0]).abs(), 2.0, epsilon = 1e-6);
    }
}

#[test]
fn svg_and_obj_are_byte_deterministic() {
    let pattern = build_pattern(&default_params()).unwrap();
    assert_eq!(export_svg(&pattern, &SvgStyle::default()), export_svg(&pattern, &SvgStyle::default()));
    let g = fold_at_fraction(&default_params(), 0.4).unwrap();
    assert_eq!(export_obj(&g), export_obj(&fold_at_fraction(&default_params(), 0.4).unwrap()));
    assert!(export_obj(&g).starts_with(&format!("# {TOOLKIT_VERSION}\n")));
}

#[test]
fn flat_obj() {
    let g = fold_at_fraction(&default_params(), 0.0).unwrap();
    let text = export_obj(&g);
    let mesh = parse_obj(&text).unwrap();
    assert_eq!(mesh.faces.len(), 24);
    assert!(text.lines().filter(|l| l.starts_with("v ")).all(|l| l.ends_with(" 0.000000")));
    assert!(!text.contains("-0.000000"));
}

#[test]
fn obj_round_trip_preserves_the_state() {
    let params = default_params();
    let g = fold_at_fraction(&params, 0.7).unwrap();
    let mesh = parse_obj(&export_obj(&g)).unwrap();
    assert_eq!(mesh.faces, g.pattern.facets);
    for (a, b) in mesh.vertices.iter().zip(&g.vertices3d) {
        assert!((a - b).norm() <= 1e-6);
    }
    let back = geometry_from_vertices(&Arc::clone(&g.pattern), mesh.vertices, 0.7);
    assert!((measure(&back).opening_angle_deg - measure(&g).opening_angle_deg).abs() <= 1e-4);
}

#[test]
fn csv_headers_and_round_trip() {
    let curve = fold_curve(&default_params(), 11).unwrap();
    let text = fold_curve_csv(&curve);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# {TOOLKIT_VERSION}"));
    assert_eq!(lines.next().unwrap(), FOLD_CURVE_HEADER);
    let table = parse_csv(&text).unwrap();
    assert_eq!(table.header.join(","), FOLD_CURVE_HEADER);
    assert_eq!(table.rows.len(), 11);
    let theta = table.column("theta_deg").unwrap();
    for (row, s) in theta.iter().zip(&curve.samples) {
        assert!((row.unwrap() - s.opening_angle_deg).abs() <= 5e-7);
    }
    assert_eq!(fixed6(-1e-9), "0.000000");
    assert_eq!(fixed6(1.5), "1.500000");
}

#[test]
fn config_errors_name_the_field() {
    let err = load_config(r#"{"num_units": 1}"#).unwrap_err().to_string();
    assert!(err.contains("num_units"), "{err}");
    assert!(load_config(r#"{"colour": "red"}"#).is_err());
    assert!(load_config("{").is_err());
    assert!(load_config(r#"{"curve_samples": 1}"#).is_err());
}

mod cli {
    use super::*;
    use std::fs;

    fn run_in(dir: &Path, config: &str, args: &[&str]) -> i32 {
        let cfg = dir.join("design.json");
        fs::write(&cfg, config).unwrap();
        let mut argv = vec!["yoshimura-gripper".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.extend(["--config".into(), cfg.display().to_string(), "--out".into(), dir.display().to_string()]);
        yoshimura_gripper::io::cli::run(argv)
    }

    #[test]
    fn curve_command() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), "{}", &["curve", "--samples", "101"]), 0);
        let table = parse_csv(&fs::read_to_string(dir.path().join("curve.csv")).unwrap()).unwrap();
        assert_eq!(table.rows.len(), 101);
        let theta = table.column("theta_deg").unwrap();
        assert_eq!(theta[0], Some(-180.0));
        assert!(theta[100].unwrap().abs() <= 0.5);
    }

    #[test]
    fn fold_command_reimports_closed() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), "{}", &["fold", "--fraction", "1.0"]), 0);
        let mesh = parse_obj(&fs::read_to_string(dir.path().join("fold.obj")).unwrap()).unwrap();
        let pattern = Arc::new(build_pattern(&default_params()).unwrap());
        let g = geometry_from_vertices(&pattern, mesh.vertices, 1.0);
        assert!(measure(&g).opening_angle_deg.abs() <= 0.5);
    }

    #[test]
    fn pattern_mechanics_grasp_and_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        assert_eq!(run_in(p, "{}", &["pattern"]), 0);
        assert!(parse_svg(&fs::read_to_string(p.join("pattern.svg")).unwrap()).is_ok());
        assert_eq!(run_in(p, "{}", &["mechanics"]), 0);
        let forces = fs::read_to_string(p.join("mechanics.csv")).unwrap();
        assert_eq!(forces.lines().nth(1).unwrap(), FORCE_CURVE_HEADER);
        assert_eq!(run_in(p, "{}", &["grasp", "--diameter", "12"]), 0);
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("grasp.json")).unwrap()).unwrap();
        assert_eq!(report["generator"], TOOLKIT_VERSION);
        let sweep = r#"{"sweep":{"alpha_range_deg":{"lo":20,"hi":30,"steps":3},"length_range_mm":{"lo":40,"hi":40,"steps":1},"objective":"transmission_at_stage"}}"#;
        assert_eq!(run_in(p, sweep, &["sweep"]), 0);
        let table = parse_csv(&fs::read_to_string(p.join("sweep.csv")).unwrap()).unwrap();
        assert_eq!(table.header.join(","), SWEEP_HEADER);
        assert_eq!(table.rows.len(), 3);
        let argmax: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("sweep_argmax.json")).unwrap()).unwrap();
        assert_eq!(argmax["config_hash"].as_str().unwrap().len(), 64);
        assert_eq!(argmax["generator"], TOOLKIT_VERSION);
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        assert_eq!(run_in(p, r#"{"alpha_deg":[95]}"#, &["pattern"]), 1);
        assert_eq!(run_in(p, "not json", &["curve"]), 1);
        assert_eq!(run_in(p, "{}", &["frobnicate"]), 1);
        assert_eq!(run_in(p, "{}", &["fold", "--fraction", "1.5"]), 1);
        assert_eq!(run_in(p, "{}", &["grasp"]), 1);
        assert_eq!(run_in(p, "{}", &["sweep"]), 1);
        // three units per row cannot close at a shallow crease angle
        assert_eq!(run_in(p, r#"{"alpha_deg":[17.5,17.5],"num_units":3}"#, &["curve"]), 2);
        let missing = vec!["yoshimura-gripper", "curve", "--config", "/nonexistent/design.json"];
        assert_eq!(yoshimura_gripper::io::cli::run(missing), 1);
    }
}
