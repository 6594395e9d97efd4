use std::sync::OnceLock;

use approx::assert_relative_eq;
use yoshimura_gripper::error::GraspError;
use yoshimura_gripper::grasp::*;
use yoshimura_gripper::kinematics::{fold_at_fraction, FoldPath};
use yoshimura_gripper::pattern::YoshimuraParams;

fn default_params() -> YoshimuraParams {
    YoshimuraParams::uniform(25.0, 40.0, 6, 2)
}

fn default_analyzer() -> &'static GraspAnalyzer {
    static CELL: OnceLock<GraspAnalyzer> = OnceLock::new();
    CELL.get_or_init(|| GraspAnalyzer::new(&default_params(), GraspOptions::default()).unwrap())
}

/// A ten-row gripper whose largest inscribed sphere is 70 mm.
fn deep_analyzer() -> &'static GraspAnalyzer {
    static CELL: OnceLock<GraspAnalyzer> = OnceLock::new();
    CELL.get_or_init(|| {
        let base = YoshimuraParams::uniform(25.0, 40.0, 6, 10);
        let probe = GraspAnalyzer::new(&base, GraspOptions::default()).unwrap();
        let s = 70.0 / probe.max_inscribed_sphere_mm();
        GraspAnalyzer::new(&base.scaled(s), GraspOptions::default()).unwrap()
    })
}

fn volume_equivalent_diameter(volume: f64) -> f64 {
    (6.0 * volume / std::f64::consts::PI).cbrt()
}

#[test]
fn flat_sheet_has_no_chamber() {
    let m = chamber_metrics(&fold_at_fraction(&default_params(), 0.0).unwrap()).unwrap();
    assert_eq!(m.volume_mm3, 0.0);
    assert_eq!(m.max_inscribed_sphere_mm, 0.0);
    assert!(m.aperture_mm > 0.0);
}

#[test]
fn metrics_scale_with_the_design() {
    let a = chamber_metrics(&fold_at_fraction(&default_params(), 0.8).unwrap()).unwrap();
    let b = chamber_metrics(&fold_at_fraction(&default_params().scaled(2.0), 0.8).unwrap()).unwrap();
    assert_relative_eq!(b.volume_mm3 / a.volume_mm3, 8.0, max_relative = 0.01);
    assert_relative_eq!(b.max_inscribed_sphere_mm / a.max_inscribed_sphere_mm, 2.0, max_relative = 0.01);
    assert_relative_eq!(b.aperture_mm / a.aperture_mm, 2.0, max_relative = 1e-9);
}

#[test]
fn default_design_against_finer_voxels() {
    let geom = fold_at_fraction(&default_params(), 0.8).unwrap();
    let coarse = chamber_metrics(&geom).unwrap();
    let golden = chamber_metrics_with(&geom, 2 * DEFAULT_RESOLUTION).unwrap();
    assert_relative_eq!(coarse.volume_mm3, golden.volume_mm3, max_relative = 0.02);
    assert_relative_eq!(coarse.max_inscribed_sphere_mm, golden.max_inscribed_sphere_mm, max_relative = 0.05);
}

#[test]
fn inscribed_sphere_within_volume_bound() {
    for s in default_analyzer().metrics().chain(deep_analyzer().metrics()).map(|(_, m)| m) {
        assert!(s.max_inscribed_sphere_mm <= volume_equivalent_diameter(s.volume_mm3));
        assert!(s.aperture_mm >= 0.0);
    }
}

#[test]
fn wrap_verdicts() {
    let a = default_analyzer();
    let flat = FoldPath::new(&default_params()).unwrap();
    let extent = {
        let (lo, hi) = flat.pattern.bounds();
        (hi - lo).norm()
    };
    let too_big = a.assess(&ObjectSpec::sphere(1.5 * extent), GraspType::Wrap).unwrap();
    assert!(!too_big.feasible);
    let half = 0.5 * a.max_inscribed_sphere_mm();
    let fits = a.assess(&ObjectSpec::sphere(half), GraspType::Wrap).unwrap();
    assert!(fits.feasible);
    assert!(fits.max_inscribed_sphere_mm >= half);
    assert!(fits.pullout_proxy >= 0.0);
}

#[test]
fn multi_and_scoop_verdicts() {
    let a = default_analyzer();
    let capacity = a.metrics().map(|(_, m)| m.volume_mm3).fold(0.0, f64::max);
    let d_big = volume_equivalent_diameter(capacity);
    let crowd = ObjectSpec {
        kind: ObjectKind::MultiSphere,
        diameters_mm: vec![d_big, d_big],
        burial_depth_mm: 0.0,
    };
    assert!(!a.classify(&crowd).unwrap().feasible);
    let d_small = volume_equivalent_diameter(0.3 * capacity);
    let pair = ObjectSpec {
        kind: ObjectKind::MultiSphere,
        diameters_mm: vec![d_small, d_small],
        burial_depth_mm: 0.0,
    };
    let report = a.classify(&pair).unwrap();
    assert_eq!(report.grasp_type, GraspType::Multi);
    assert!(report.feasible);
    let clam = ObjectSpec {
        kind: ObjectKind::Buried,
        diameters_mm: vec![20.0],
        burial_depth_mm: 5.0,
    };
    let report = a.classify(&clam).unwrap();
    assert_eq!(report.grasp_type, GraspType::Scoop);
    assert!(report.feasible);
    let deep = ObjectSpec {
        burial_depth_mm: 500.0,
        ..clam
    };
    assert!(!a.classify(&deep).unwrap().feasible);
}

#[test]
fn pinch_at_the_lips() {
    let a = default_analyzer();
    let r = a.assess(&ObjectSpec::sphere(10.0), GraspType::Pinch).unwrap();
    assert!(r.feasible);
    assert_eq!(r.fraction, PINCH_FRACTION);
    let r = a.assess(&ObjectSpec::sphere(1.0e4), GraspType::Pinch).unwrap();
    assert!(!r.feasible);
}

#[test]
fn classify_is_deterministic() {
    let obj = ObjectSpec::sphere(12.0);
    let a = classify(&default_params(), &obj).unwrap();
    let b = classify(&default_params(), &obj).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verdicts_are_scale_free() {
    let small = default_analyzer();
    let big = GraspAnalyzer::new(&default_params().scaled(3.0), GraspOptions::default()).unwrap();
    for d in [5.0, 12.0, 16.0, 30.0] {
        let a = small.classify(&ObjectSpec::sphere(d)).unwrap();
        let b = big.classify(&ObjectSpec::sphere(3.0 * d)).unwrap();
        assert_eq!((a.grasp_type, a.feasible), (b.grasp_type, b.feasible), "diameter {d}");
    }
}

#[test]
fn rejects_invalid_objects() {
    assert!(matches!(ObjectSpec::sphere(-1.0).validate(), Err(GraspError::InvalidObject(_))));
    let lonely = ObjectSpec {
        kind: ObjectKind::MultiSphere,
        diameters_mm: vec![10.0],
        burial_depth_mm: 0.0,
    };
    assert!(lonely.validate().is_err());
    assert!(matches!(
        default_analyzer().pullout(1.0e4, 0.5),
        Err(GraspError::NoWrap { .. })
    ));
}

#[test]
fn pullout_grows_with_friction() {
    let a = deep_analyzer();
    for d in [40.0, 63.0] {
        let mut last = 0.0;
        for mu in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0] {
            let p = a.pullout(d, mu).unwrap();
            assert!(p.proxy >= last);
            last = p.proxy;
        }
    }
}

#[test]
fn pullout_contacts_grow_with_diameter() {
    let a = deep_analyzer();
    let counts: Vec<usize> = [40.0, 50.0, 63.0].iter().map(|&d| a.pullout(d, 0.5).unwrap().contact_count).collect();
    assert!(counts.windows(2).all(|w| w[1] > w[0]), "{counts:?}");
}

#[test]
fn pullout_against_denser_sampling() {
    let a = deep_analyzer();
    for d in [40.0, 63.0] {
        let base = a.pullout_sampled(d, 5.0, 24).unwrap();
        let dense = a.pullout_sampled(d, 5.0, 240).unwrap();
        assert!((base.proxy - dense.proxy).abs() <= 0.05 * dense.proxy.max(1e-12), "{base:?} vs {dense:?}");
    }
}
