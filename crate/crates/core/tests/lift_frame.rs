use std::f64::consts::PI;

use minsurf::bipolar::bipolar;
use minsurf::calculus::Order;
use minsurf::catalog::{clifford, lawson_strip, LAWSON_STRIP};
use minsurf::frames::build_frame;
use minsurf::lift::{analyze_lift, bipolar_lift, build_u, check_structure, horizontal_lift, t_samples};
use minsurf::transforms::{gamma, transform};
use minsurf::GeomError;

#[test]
fn lift_frame_is_orthonormal_to_discretization_error() {
    let s = lawson_strip(2, 1, 64, LAWSON_STRIP).unwrap();
    let cal = s.calculus(Order::Second).unwrap();
    let fr = build_frame(&bipolar(&s).unwrap(), &cal).unwrap();
    let fp = build_frame(&transform(&fr, 1).unwrap(), &cal).unwrap();
    let u = build_u(&fr, &fp, PI / 2.0).unwrap();
    let mut worst = 0.0_f64;
    for (i, j) in fr.grid.core() {
        let m = u.matrix(i, j);
        worst = worst.max((m.transpose() * m - nalgebra::Matrix6::identity()).amax());
    }
    assert!(worst < 0.5, "{worst}");
}

#[test]
fn structure_check_names_the_failing_identity() {
    let s = lawson_strip(2, 1, 64, LAWSON_STRIP).unwrap();
    let cal = s.calculus(Order::Second).unwrap();
    let fr = build_frame(&bipolar(&s).unwrap(), &cal).unwrap();
    let fp = build_frame(&transform(&fr, 1).unwrap(), &cal).unwrap();
    let g = gamma(&fr, &fp, &cal);
    let an = analyze_lift(&fr, &fp, &g, &cal, &t_samples(0.0, PI, 9)).unwrap();
    assert!(check_structure(&an, 100.0).is_ok());
    match check_structure(&an, 1e-9) {
        Err(GeomError::StructureViolation { identity, .. }) => assert!(identity.contains("omega1")),
        other => panic!("{other:?}"),
    }
    assert!(analyze_lift(&fr, &fp, &g, &cal, &[1.0, 2.0]).is_err());
}

#[test]
fn horizontal_lift_on_clifford() {
    let s = clifford(32).unwrap();
    let cal = s.calculus(Order::Second).unwrap();
    let ts = t_samples(0.0, PI, 9);
    let rep = bipolar_lift(&s, &cal, &ts);
    for r in &rep.rows {
        assert!(r.ftt < 1e-12 && r.unit < 1e-12);
        // eta = 0: the first-order equations hold to rounding.
        assert!(r.ftx < 1e-12 && r.fty < 1e-12 && r.g2x < 1e-12 && r.g2y < 1e-12);
        assert!(r.wedge_formula < 1e-12);
    }
    assert!((rep.phase_re.hypot(rep.phase_im) - 1.0).abs() < 0.01);
    let h = horizontal_lift(&s, 0.7);
    assert_eq!(h.theta, (num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(1.0, 0.0)));
}
