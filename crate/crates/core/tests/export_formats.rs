use minsurf::bipolar::bipolar;
use minsurf::catalog::{clifford, lawson_strip, LAWSON_STRIP};
use minsurf::io::{from_csv, principal_projection, to_csv, to_obj};
use minsurf::surface::{SampledSurface, SurfaceFile};

#[test]
fn csv_round_trips_through_the_json_reader() {
    let f = bipolar(&lawson_strip(2, 1, 32, LAWSON_STRIP).unwrap()).unwrap();
    let file = from_csv(&to_csv(&f).unwrap()).unwrap();
    let json = serde_json::to_string(&file).unwrap();
    let back = SampledSurface::from_json(&json).unwrap();
    assert_eq!(back.grid, f.grid);
    assert_eq!(back.mu, f.mu);
    assert!(back.distance(&f) < 1e-15);
    let orig = SurfaceFile::from(&f);
    assert_eq!(file.values, orig.values);
}

#[test]
fn periodic_torus_mesh_counts() {
    let f = bipolar(&clifford(64).unwrap()).unwrap();
    let (mesh, _) = to_obj(&f);
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 4096);
    assert_eq!(mesh.lines().filter(|l| l.starts_with("f ")).count(), 4096);
}

#[test]
fn projection_axes_are_orthonormal() {
    let f = bipolar(&lawson_strip(2, 1, 32, LAWSON_STRIP).unwrap()).unwrap();
    let p = principal_projection(&f.values);
    let m = p.matrix();
    let g = m * m.transpose();
    assert!((g - nalgebra::Matrix3::identity()).amax() < 1e-12);
    assert!(p.variances[0] >= p.variances[1] && p.variances[1] >= p.variances[2]);
}
