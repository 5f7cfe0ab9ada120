use minsurf::bipolar::bipolar;
use minsurf::calculus::Order;
use minsurf::catalog::{flat_torus, lawson_strip, LAWSON_STRIP};
use minsurf::frames::build_frame;
use minsurf::transforms::{
    classify_congruence, delta_gamma_residual, detect_gamma_reflection, gamma, round_trips, sequence, transform,
};

#[test]
fn flat_torus_transforms_are_mutually_inverse_at_second_order() {
    let r: Vec<f64> = [32usize, 64]
        .iter()
        .map(|&n| {
            let f = flat_torus(n).unwrap();
            let cal = f.calculus(Order::Second).unwrap();
            let seq = sequence(&f, 0, 0, &cal).unwrap();
            let (_, pm, mp) = round_trips(&seq, &cal).unwrap()[0];
            pm.max(mp)
        })
        .collect();
    assert!(r[0] / r[1] > 3.0, "{r:?}");
}

#[test]
fn flat_torus_delta_equals_minus_gamma() {
    let f = flat_torus(32).unwrap();
    let cal = f.calculus(Order::Second).unwrap();
    let seq = sequence(&f, -1, 1, &cal).unwrap();
    assert!(delta_gamma_residual(&seq, &cal) < 1e-10);
}

#[test]
fn bipolar_plus_transform_is_a_reflection_of_the_surface() {
    let s = lawson_strip(2, 1, 64, LAWSON_STRIP).unwrap();
    let cal = s.calculus(Order::Second).unwrap();
    let fr = build_frame(&bipolar(&s).unwrap(), &cal).unwrap();
    let fp = build_frame(&transform(&fr, 1).unwrap(), &cal).unwrap();
    let g = gamma(&fr, &fp, &cal);
    assert!(cal.max_core(&g, |z| z.norm()) < 0.01);
    let r = detect_gamma_reflection(&fr, &fp, &cal, 0.01).expect("reflection");
    assert!((r.det + 1.0).abs() < 1e-8);
    assert!(r.involution_defect < 1e-8);
    assert!(r.fit_residual < 0.01);
}

#[test]
fn congruence_classifier_reports_parity_and_vanishing_gamma() {
    let s = lawson_strip(2, 1, 64, LAWSON_STRIP).unwrap();
    let cal = s.calculus(Order::Second).unwrap();
    let seq = sequence(&bipolar(&s).unwrap(), -1, 1, &cal).unwrap();
    let c = classify_congruence(&seq, 0, 1, &cal, 1e-6, 0.01);
    assert!(!c.parity_even);
    assert!(c.gamma_zero_at.contains(&0));
}
