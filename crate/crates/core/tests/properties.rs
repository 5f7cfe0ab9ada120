use std::f64::consts::PI;

use minsurf::algebra::{hodge_star, include_complex, wedge, RealVec4, Wedge2};
use minsurf::field::Field;
use minsurf::grid::Grid2;
use minsurf::lift::{admissible_interval, coefficient_identity, fornberg_weights, lift_coefficients};
use minsurf::report::{CheckEntry, CheckReport, Provenance};
use proptest::prelude::*;

fn vec4() -> impl Strategy<Value = RealVec4> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(|a| RealVec4::from_column_slice(&a))
}

proptest! {
    #[test]
    fn coefficient_identity_holds(w in 0.01f64..2.0, wp in 0.01f64..2.0, t in 0.05f64..3.09) {
        let g = Grid2::periodic(2, 2, 1.0, 1.0).unwrap();
        let om = Field::filled(2, 2, w);
        let op = Field::filled(2, 2, wp);
        let k = lift_coefficients(&om, &op, &g, t).unwrap();
        prop_assert!(coefficient_identity(&k, &om, &op, &g) < 1e-12);
        prop_assert!(k.lambda.get(0, 0) > 0.0 && k.z21.get(0, 0) > 0.0);
        prop_assert_eq!(admissible_interval(&om, &op, &g).unwrap(), (0.0, PI));
    }

    #[test]
    fn star_is_an_involution_and_wedge_is_antisymmetric(p in vec4(), q in vec4()) {
        let w = wedge(&p, &q);
        let back = wedge(&q, &p);
        prop_assert!((w.0 + back.0).norm() < 1e-12);
        prop_assert!((hodge_star(&hodge_star(&w)).0 - w.0).norm() < 1e-12);
    }

    #[test]
    fn inclusion_is_isotropic_on_decomposables(p in vec4(), q in vec4()) {
        // w ∧ w = 0 for decomposable w, so the inclusion is null.
        let z = include_complex(&wedge(&p, &q));
        prop_assert!(z.dot(&z).norm() < 1e-10);
    }

    #[test]
    fn fornberg_is_exact_on_quadratics(a in -3.0f64..3.0, b in -3.0f64..3.0, z in 0.3f64..2.8) {
        let xs: Vec<f64> = (1..=9).map(|k| PI * k as f64 / 10.0).collect();
        let w = fornberg_weights(z, &xs, 2);
        let d1: f64 = w[1].iter().zip(&xs).map(|(c, x)| c * (a * x * x + b * x)).sum();
        let d2: f64 = w[2].iter().zip(&xs).map(|(c, x)| c * (a * x * x + b * x)).sum();
        prop_assert!((d1 - (2.0 * a * z + b)).abs() < 1e-8);
        prop_assert!((d2 - 2.0 * a).abs() < 1e-6);
    }

    #[test]
    fn report_pass_iff_residual_within_tolerance(r in 0.0f64..2.0, t in 0.0f64..2.0) {
        let mut rep = CheckReport::new(Provenance { source: "p".into(), grid: [16, 16], order: 2 });
        rep.push(CheckEntry::new("x", r, t));
        prop_assert_eq!(rep.all_pass(), r <= t);
        prop_assert_eq!(rep.to_json().unwrap(), rep.clone().to_json().unwrap());
    }
}

#[test]
fn star_of_basis_pairing() {
    let w = Wedge2::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(hodge_star(&w).0[5], 1.0);
}

#[test]
fn every_rate_check_has_a_pinned_constant() {
    for (k, name) in minsurf::suites::all_rate_names(64).unwrap() {
        assert!(minsurf::tolerances::check_constant(k, &name) > 0.0, "criterion {k}: {name}");
    }
}
