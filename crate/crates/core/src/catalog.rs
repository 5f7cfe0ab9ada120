//! Named test surfaces: Lawson tori and the Clifford torus in S^3, a flat
//! minimal torus in S^5, one-dimensional sinh-Gordon data, and a few
//! negative controls.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::algebra::{RealVec4, RealVec6};
use crate::calculus::{Calculus, Order};
use crate::bipolar::{clifford_bipolar_closed_form, S3Surface};
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::grid::Grid2;
use crate::integrability::{integrate_s3_frame, pendulum};
use crate::surface::SampledSurface;

/// A catalog entry lives either in S^3 (with its normal) or in S^5.
#[derive(Clone, Debug)]
pub enum CatalogSurface {
    S3(S3Surface),
    S5(SampledSurface),
}

/// Default `y` range of the Lawson strip; `e^eta > 1` throughout.
pub const LAWSON_STRIP: (f64, f64) = (0.2, 0.8);

/// Looks up a surface by name at resolution `n x n`.
///
/// Names: `clifford`, `lawson-M-K`, `lawson-M-K-strip[:Y0:Y1]`,
/// `sinhgordon-1d:E`, `flat-torus`, `round-torus`, `sphere-patch`,
/// `stretched-clifford-bipolar`.
pub fn catalog(name: &str, n: usize) -> Result<CatalogSurface> {
    let unknown = || GeomError::UnknownCatalog(name.to_string());
    let (head, params) = match name.split_once(':') {
        Some((h, p)) => (h, Some(p)),
        None => (name, None),
    };
    match head {
        "clifford" => Ok(CatalogSurface::S3(clifford(n)?)),
        "flat-torus" => Ok(CatalogSurface::S5(flat_torus(n)?)),
        "round-torus" => Ok(CatalogSurface::S5(round_torus(n, 0.6)?)),
        "sphere-patch" => Ok(CatalogSurface::S5(sphere_patch(n)?)),
        "stretched-clifford-bipolar" => Ok(CatalogSurface::S5(stretched_clifford_bipolar(n)?)),
        "sinhgordon-1d" => {
            let e: f64 = params.and_then(|p| p.parse().ok()).ok_or_else(unknown)?;
            Ok(CatalogSurface::S3(sinh_gordon_1d(n, e)?))
        }
        h if h.starts_with("lawson-") => {
            let parts: Vec<&str> = h["lawson-".len()..].split('-').collect();
            let (m, k, strip) = match parts.as_slice() {
                [m, k] => (*m, *k, false),
                [m, k, "strip"] => (*m, *k, true),
                _ => return Err(unknown()),
            };
            let m: u32 = m.parse().map_err(|_| unknown())?;
            let k: u32 = k.parse().map_err(|_| unknown())?;
            if !strip {
                return Ok(CatalogSurface::S3(lawson(m, k, n)?));
            }
            let range = match params {
                None => LAWSON_STRIP,
                Some(p) => {
                    let v: Vec<f64> = p.split(':').filter_map(|s| s.parse().ok()).collect();
                    match v.as_slice() {
                        [a, b] if a < b => (*a, *b),
                        _ => return Err(unknown()),
                    }
                }
            };
            Ok(CatalogSurface::S3(lawson_strip(m, k, n, range)?))
        }
        _ => Err(unknown()),
    }
}

/// Clifford torus `G1 = (cos sx, sin sx, cos sy, sin sy)/sqrt2`, `s = sqrt2`,
/// with normal `G2 = (-cos sx, -sin sx, cos sy, sin sy)/sqrt2` and `eta = 0`.
pub fn clifford(n: usize) -> Result<S3Surface> {
    let l = SQRT_2 * PI;
    let grid = Grid2::periodic(n, n, l, l)?;
    let g1 = Field::from_fn(n, n, |i, j| clifford_g1(grid.x(i), grid.y(j)));
    let g2 = Field::from_fn(n, n, |i, j| clifford_g2(grid.x(i), grid.y(j)));
    S3Surface::new(grid, Complex64::new(1.0, 0.0), g1, g2, Field::filled(n, n, 0.0))
}

pub fn clifford_g1(x: f64, y: f64) -> RealVec4 {
    let (sx, cx) = (SQRT_2 * x).sin_cos();
    let (sy, cy) = (SQRT_2 * y).sin_cos();
    RealVec4::new(cx, sx, cy, sy) * FRAC_1_SQRT_2
}

pub fn clifford_g2(x: f64, y: f64) -> RealVec4 {
    let (sx, cx) = (SQRT_2 * x).sin_cos();
    let (sy, cy) = (SQRT_2 * y).sin_cos();
    RealVec4::new(-cx, -sx, cy, sy) * FRAC_1_SQRT_2
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_coprime(m: u32, k: u32) -> Result<()> {
    if m == 0 || k == 0 || gcd(m, k) != 1 {
        return Err(GeomError::NotCoprime { m, k });
    }
    Ok(())
}

/// `rho(y) = m^2 cos^2 y + k^2 sin^2 y`, the squared speed of the Lawson map
/// in the `x` direction.
fn lawson_rho(m: f64, k: f64, y: f64) -> f64 {
    let (s, c) = y.sin_cos();
    m * m * c * c + k * k * s * s
}

/// `int_a^b dt / sqrt(rho)` by composite Simpson.
pub fn lawson_ytilde(m: u32, k: u32, a: f64, b: f64) -> f64 {
    let (m, k) = (m as f64, k as f64);
    let n = 4096;
    let h = (b - a) / n as f64;
    let g = |t: f64| 1.0 / lawson_rho(m, k, t).sqrt();
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Samples `y(s)` at `s = j * ds`, `j < count`, solving `dy/ds = sqrt(rho(y))`
/// from `y(0) = y_start` with fine RK4 substeps.
fn lawson_y_samples(m: u32, k: u32, y_start: f64, ds: f64, count: usize) -> Vec<f64> {
    let (m, k) = (m as f64, k as f64);
    let rhs = |y: f64| lawson_rho(m, k, y).sqrt();
    let sub = 32;
    let h = ds / sub as f64;
    let mut y = y_start;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(y);
        for _ in 0..sub {
            let k1 = rhs(y);
            let k2 = rhs(y + 0.5 * h * k1);
            let k3 = rhs(y + 0.5 * h * k2);
            let k4 = rhs(y + h * k3);
            y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
    }
    out
}

/// Lawson's map, its unit normal and `eta` at `(x, y)` with the original
/// (non-conformal) `y`.
fn lawson_point(m: u32, k: u32, x: f64, y: f64) -> (RealVec4, RealVec4, f64) {
    let (mf, kf) = (m as f64, k as f64);
    let (smx, cmx) = (mf * x).sin_cos();
    let (skx, ckx) = (kf * x).sin_cos();
    let (sy, cy) = y.sin_cos();
    let rho = lawson_rho(mf, kf, y);
    let g1 = RealVec4::new(cmx * cy, smx * cy, ckx * sy, skx * sy);
    let g2 = RealVec4::new(-kf * sy * smx, kf * sy * cmx, mf * cy * skx, -mf * cy * ckx) / rho.sqrt();
    (g1, g2, (rho / (mf * kf)).ln())
}

/// Chart factor of the adapted coordinate `w = mu z` on a Lawson torus.
pub fn lawson_mu(m: u32, k: u32) -> Complex64 {
    Complex64::from_polar(((m * k) as f64).sqrt(), PI / 4.0)
}

/// Conformal Lawson torus `tau_{m,k}` on the full period rectangle.
pub fn lawson(m: u32, k: u32, n: usize) -> Result<S3Surface> {
    check_coprime(m, k)?;
    let ly = lawson_ytilde(m, k, 0.0, 2.0 * PI);
    let grid = Grid2::periodic(n, n, 2.0 * PI, ly)?;
    lawson_on(m, k, grid, 0.0)
}

/// A Lawson strip `y0 <= y <= y1`, open in the conformal `y` direction, with
/// an `n/8`-row margin excluded from residuals.
pub fn lawson_strip(m: u32, k: u32, n: usize, (y0, y1): (f64, f64)) -> Result<S3Surface> {
    check_coprime(m, k)?;
    let ly = lawson_ytilde(m, k, y0, y1);
    let grid = Grid2::new(n, n, 2.0 * PI, ly, true, false)?.with_margin(n / 8);
    lawson_on(m, k, grid, y0)
}

fn lawson_on(m: u32, k: u32, grid: Grid2, y_start: f64) -> Result<S3Surface> {
    let ys = lawson_y_samples(m, k, y_start, grid.hy(), grid.ny);
    let (nx, ny) = (grid.nx, grid.ny);
    let pts = Field::from_fn(nx, ny, |i, j| lawson_point(m, k, grid.x(i), ys[j]));
    S3Surface::new(grid, lawson_mu(m, k), pts.map(|p| p.0), pts.map(|p| p.1), pts.map(|p| p.2))
}

/// `G1` from a one-dimensional sinh-Gordon profile `eta(x)` of energy `e`.
pub fn sinh_gordon_1d(n: usize, energy: f64) -> Result<S3Surface> {
    let prof = pendulum(energy, n)?;
    let mu = Complex64::new(1.0, 0.0);
    let cal = Calculus::new(prof.grid, Order::Fourth, mu)?;
    Ok(integrate_s3_frame(prof.grid, mu, &prof.eta, &cal, None)?.surface)
}

/// Flat minimal torus `(r1 e^{5ix}, r2 e^{i(3x+4y)}, r3 e^{i(3x-4y)})` with
/// `r^2 = (7/32, 25/64, 25/64)`, linearly full in S^5.
pub fn flat_torus(n: usize) -> Result<SampledSurface> {
    let grid = Grid2::periodic(n, n, 2.0 * PI, 2.0 * PI)?;
    let r = [(7.0_f64 / 32.0).sqrt(), (25.0_f64 / 64.0).sqrt(), (25.0_f64 / 64.0).sqrt()];
    let freq = [(5.0, 0.0), (3.0, 4.0), (3.0, -4.0)];
    let vals = Field::from_fn(n, n, |i, j| {
        let (x, y) = (grid.x(i), grid.y(j));
        let mut v = RealVec6::zeros();
        for (q, (&rq, &(a, b))) in r.iter().zip(&freq).enumerate() {
            let (s, c) = (a * x + b * y).sin_cos();
            v[2 * q] = rq * c;
            v[2 * q + 1] = rq * s;
        }
        v
    });
    SampledSurface::new(grid, Complex64::new(flat_torus_mu(), 0.0), vals)
}

/// `(275/16)^{1/4}`, the adapted chart factor of [`flat_torus`].
pub fn flat_torus_mu() -> f64 {
    (275.0_f64 / 16.0).powf(0.25)
}

/// Non-minimal product torus `(cos a e^{ix/cos a}, sin a e^{iy/sin a}, 0)`;
/// conformal, minimal only at `a = pi/4`.
pub fn round_torus(n: usize, a: f64) -> Result<SampledSurface> {
    let (sa, ca) = a.sin_cos();
    let grid = Grid2::periodic(n, n, 2.0 * PI * ca, 2.0 * PI * sa)?;
    let vals = Field::from_fn(n, n, |i, j| {
        let (s1, c1) = (grid.x(i) / ca).sin_cos();
        let (s2, c2) = (grid.y(j) / sa).sin_cos();
        RealVec6::new(ca * c1, ca * s1, sa * c2, sa * s2, 0.0, 0.0)
    });
    SampledSurface::new(grid, Complex64::new(1.0, 0.0), vals)
}

/// Great 2-sphere patch through inverse stereographic projection.
pub fn sphere_patch(n: usize) -> Result<SampledSurface> {
    let grid = Grid2::new(n, n, 1.0, 1.0, false, false)?.with_origin(-0.5, -0.5).with_margin(n / 8);
    let vals = Field::from_fn(n, n, |i, j| {
        let (x, y) = (grid.x(i), grid.y(j));
        let r2 = x * x + y * y;
        RealVec6::new(2.0 * x, 2.0 * y, 1.0 - r2, 0.0, 0.0, 0.0) / (1.0 + r2)
    });
    SampledSurface::new(grid, Complex64::new(1.0, 0.0), vals)
}

/// Clifford bipolar with `x` scaled by 2: not conformal.
pub fn stretched_clifford_bipolar(n: usize) -> Result<SampledSurface> {
    let l = SQRT_2 * PI;
    let grid = Grid2::periodic(n, n, l / 2.0, l)?;
    let vals = Field::from_fn(n, n, |i, j| clifford_bipolar_closed_form(2.0 * SQRT_2 * grid.x(i), SQRT_2 * grid.y(j)));
    SampledSurface::new(grid, Complex64::new(1.0, 0.0), vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_coprime() {
        assert!(matches!(catalog("lawson-2-4", 16), Err(GeomError::NotCoprime { m: 2, k: 4 })));
        assert!(matches!(catalog("nope", 16), Err(GeomError::UnknownCatalog(_))));
    }

    #[test]
    fn clifford_has_zero_eta() {
        let s = clifford(16).unwrap();
        assert!(s.eta.iter().all(|&e| e == 0.0));
        assert!(s.pair_defect() < 1e-14);
    }

    #[test]
    fn lawson_y_ode_matches_quadrature() {
        let s_end = lawson_ytilde(2, 1, 0.2, 0.8);
        let ys = lawson_y_samples(2, 1, 0.2, s_end / 64.0, 65);
        assert!((ys[64] - 0.8).abs() < 1e-10);
    }

    #[test]
    fn lawson_normal_is_orthonormal() {
        let s = lawson_strip(2, 1, 16, LAWSON_STRIP).unwrap();
        assert!(s.pair_defect() < 1e-12);
        assert!(s.eta.iter().all(|&e| e > 0.0));
    }
}
