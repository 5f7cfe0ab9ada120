use minsurf::bipolar::{bipolar, check_s3_minimal, clifford_bipolar_closed_form};
use minsurf::calculus::Order;
use minsurf::catalog::{catalog, clifford, lawson_strip, CatalogSurface, LAWSON_STRIP};
use minsurf::frames::build_frame;
use minsurf::integrability::residual_sinh_gordon;
use minsurf::GeomError;

#[test]
fn clifford_pair_has_zero_eta_and_closed_form_bipolar() {
    let s = clifford(32).unwrap();
    assert!(s.eta.iter().all(|&e| e == 0.0));
    let f = bipolar(&s).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..s.grid.nx {
        for j in 0..s.grid.ny {
            let (x, y) = (s.grid.x(i), s.grid.y(j));
            let c = clifford_bipolar_closed_form(2f64.sqrt() * x, 2f64.sqrt() * y);
            let v = f.values.get(i, j);
            worst = worst.max((v - c).norm().min((v + c).norm()));
        }
    }
    assert!(worst < 1e-12, "closed form mismatch {worst:e}");
}

#[test]
fn clifford_bipolar_frame_is_rejected_as_degenerate() {
    let s = clifford(32).unwrap();
    let cal = s.calculus(Order::Second).unwrap();
    let err = build_frame(&bipolar(&s).unwrap(), &cal).unwrap_err();
    assert!(matches!(err, GeomError::DegenerateEllipse { .. }), "{err}");
}

#[test]
fn lawson_strip_is_minimal_and_solves_sinh_gordon_at_second_order() {
    let r: Vec<(f64, f64)> = [32usize, 64]
        .iter()
        .map(|&n| {
            let s = lawson_strip(2, 1, n, LAWSON_STRIP).unwrap();
            let cal = s.calculus(Order::Second).unwrap();
            (check_s3_minimal(&s, &cal).system_max(), residual_sinh_gordon(&s.eta, &cal))
        })
        .collect();
    assert!(r[0].0 / r[1].0 > 3.0, "{r:?}");
    assert!(r[0].1 / r[1].1 > 3.0, "{r:?}");
}

#[test]
fn catalog_names() {
    assert!(matches!(catalog("clifford", 16).unwrap(), CatalogSurface::S3(_)));
    assert!(matches!(catalog("flat-torus", 16).unwrap(), CatalogSurface::S5(_)));
    assert!(matches!(catalog("lawson-2-1-strip:0.3:0.7", 32).unwrap(), CatalogSurface::S3(_)));
    assert!(matches!(catalog("lawson-2-4", 16), Err(GeomError::NotCoprime { m: 2, k: 4 })));
    assert!(matches!(catalog("enneper", 16), Err(GeomError::UnknownCatalog(_))));
}
