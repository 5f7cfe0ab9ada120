//! Sampled surfaces in S^5, conformality and minimality diagnostics, and
//! normalization of the complex coordinate.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{cbilinear, ComplexVec6, RealVec6};
use crate::calculus::{Calculus, Order};
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::grid::Grid2;
use crate::tolerances;

/// Samples of a map into the unit sphere of R^6.
///
/// `mu` is the chart factor: derivatives are taken in `w = mu * z` where `z`
/// is the grid coordinate.
#[derive(Clone, Debug)]
pub struct SampledSurface {
    pub grid: Grid2,
    pub mu: Complex64,
    pub values: Field<RealVec6>,
}

const UNIT_TOL: f64 = 1e-6;

impl SampledSurface {
    /// Builds a surface, rejecting samples far from the unit sphere and
    /// renormalizing the rest so that every sample has norm 1 to 1e-12.
    pub fn new(grid: Grid2, mu: Complex64, values: Field<RealVec6>) -> Result<Self> {
        grid.validate()?;
        if values.shape() != (grid.nx, grid.ny) {
            return Err(GeomError::ShapeMismatch { expected: (grid.nx, grid.ny), got: values.shape() });
        }
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                let v = values.get(i, j);
                let n = v.norm();
                if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
                    return Err(GeomError::InvalidSurface(format!(
                        "sample ({i},{j}) has norm {n}, expected 1"
                    )));
                }
            }
        }
        Ok(SampledSurface { grid, mu, values: values.map(|v| v / v.norm()) })
    }

    /// Pointwise normalization of arbitrary nonzero samples.
    pub fn normalized(grid: Grid2, mu: Complex64, values: Field<RealVec6>) -> Result<Self> {
        let vals = values.map(|v| v / v.norm());
        Self::new(grid, mu, vals)
    }

    pub fn calculus(&self, order: Order) -> Result<Calculus> {
        Calculus::new(self.grid, order, self.mu)
    }

    pub fn complex(&self) -> Field<ComplexVec6> {
        self.values.to_complex()
    }

    pub fn with_mu(&self, mu: Complex64) -> Self {
        SampledSurface { mu, ..self.clone() }
    }

    /// Applies a linear map to every sample.
    pub fn transformed(&self, a: &nalgebra::Matrix6<f64>) -> Result<Self> {
        Self::normalized(self.grid, self.mu, self.values.map(|v| a * v))
    }

    /// Max pointwise distance to another surface on the same grid, over the core.
    pub fn distance(&self, other: &SampledSurface) -> f64 {
        self.grid
            .core()
            .map(|(i, j)| (self.values.get(i, j) - other.values.get(i, j)).norm())
            .fold(0.0, f64::max)
    }
}

/// `|(f_1, f_1)|` per point; vanishes exactly for isothermal coordinates.
pub fn conformal_defect(f: &SampledSurface, cal: &Calculus) -> Field<f64> {
    let f1 = cal.d(&f.complex());
    f1.map(|v| cbilinear(&v, &v).norm())
}

/// Takahashi diagnostics: `lambda = (dd-bar f, f)` and the part of
/// `dd-bar f` not along `f`.
#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub lambda: Field<f64>,
    pub residual: Field<f64>,
    pub max_residual: f64,
}

pub fn minimality(f: &SampledSurface, cal: &Calculus) -> MinimalityReport {
    let lap = cal.ddbar(&f.values);
    let lambda = lap.zip_map(&f.values, |l, v| l.dot(&v));
    let residual = Field::from_fn(f.grid.nx, f.grid.ny, |i, j| {
        let v = f.values.get(i, j);
        (lap.get(i, j) - v * lambda.get(i, j)).norm()
    });
    let max_residual = cal.max_core(&residual, |x| x);
    MinimalityReport { lambda, residual, max_residual }
}

/// `f_2`: the part of `d f_1` orthogonal to `f_0, f_1, conj f_1`, obtained
/// from the measured 3x3 bilinear Gram matrix of those vectors.
pub fn second_fundamental(
    f0: &Field<ComplexVec6>,
    f1: &Field<ComplexVec6>,
    df1: &Field<ComplexVec6>,
) -> Field<ComplexVec6> {
    Field::from_fn(f0.shape().0, f0.shape().1, |i, j| {
        let basis = [f0.get(i, j), f1.get(i, j), f1.get(i, j).map(|z| z.conj())];
        let g = nalgebra::Matrix3::from_fn(|r, c| cbilinear(&basis[r], &basis[c]));
        let d = df1.get(i, j);
        let rhs = Vector3::from_fn(|r, _| cbilinear(&d, &basis[r]));
        let coef = g.lu().solve(&rhs).unwrap_or_else(Vector3::zeros);
        d - basis[0] * coef[0] - basis[1] * coef[1] - basis[2] * coef[2]
    })
}

/// Outcome of [`adapt_coordinate`].
#[derive(Clone, Debug)]
pub struct Adapted {
    pub surface: SampledSurface,
    /// Factor applied on top of the incoming chart: `w_new = mu * w_old`.
    pub mu: Complex64,
    /// Mean of `(f_2, f_2)` measured in the incoming chart.
    pub q: Complex64,
    pub q_spread: f64,
}

/// Rescales the chart so that `(f_2, f_2) = -1`.
///
/// `Q = (f_2, f_2)` must be constant; the new factor is the principal
/// fourth root of `-Q`. The ellipse of curvature must be neither a circle
/// (`Q = 0`) nor a segment (`|a| = 0` after rescaling).
pub fn adapt_coordinate(f: &SampledSurface, order: Order) -> Result<Adapted> {
    let cal = f.calculus(order)?;
    let f0 = f.complex();
    let f1 = cal.d(&f0);
    let df1 = cal.d(&f1);
    let f2 = second_fundamental(&f0, &f1, &df1);
    let q = f2.map(|v| cbilinear(&v, &v));

    let pts: Vec<(usize, usize)> = f.grid.core().collect();
    let n = pts.len() as f64;
    let mean = pts.iter().map(|&(i, j)| q.get(i, j)).sum::<Complex64>() / n;
    let max_f2 = pts.iter().map(|&(i, j)| f2.get(i, j).norm_squared()).fold(0.0, f64::max);
    let ((ci, cj), qmin) = cal.argmin_core(&q, |z| z.norm());
    if qmin < tolerances::CIRCULAR_Q_REL * max_f2 || mean.norm() < tolerances::CIRCULAR_Q_REL * max_f2 {
        return Err(GeomError::CircularEllipse { i: ci, j: cj, q_abs: qmin });
    }
    let var = pts.iter().map(|&(i, j)| (q.get(i, j) - mean).norm_sqr()).sum::<f64>() / n;
    let spread = var.sqrt() / mean.norm();
    if spread > tolerances::NONCONSTANT_Q_SPREAD {
        return Err(GeomError::NonconstantQ { spread });
    }

    let mu = (-mean).powf(0.25);
    let adapted = f.with_mu(f.mu * mu);
    // With the new chart f_2 scales by mu^-2; a segment has Re f_2 = 0.
    let inv2 = (mu * mu).inv();
    let threshold = tolerances::degenerate_sinh(f.grid.h());
    for &(i, j) in &pts {
        let sinh_phi = (f2.get(i, j) * inv2).map(|z| z.re).norm();
        if sinh_phi < threshold {
            return Err(GeomError::DegenerateEllipse { i, j, sinh_phi });
        }
    }
    Ok(Adapted { surface: adapted, mu, q: mean, q_spread: spread })
}

/// Interchange format shared by every file-based tool.
///
/// `values` lists the samples in index order `i * ny + j` (`i` along x).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub periodic_x: bool,
    pub periodic_y: bool,
    pub ambient_dim: usize,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub x0: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub y0: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub mu_re: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub mu_im: f64,
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub margin: usize,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}
fn is_one(x: &f64) -> bool {
    *x == 1.0
}
fn one() -> f64 {
    1.0
}
fn is_zero_usize(x: &usize) -> bool {
    *x == 0
}

impl SurfaceFile {
    pub fn from_rows(grid: &Grid2, mu: Complex64, ambient_dim: usize, values: Vec<Vec<f64>>) -> Self {
        SurfaceFile {
            nx: grid.nx,
            ny: grid.ny,
            lx: grid.lx,
            ly: grid.ly,
            periodic_x: grid.periodic_x,
            periodic_y: grid.periodic_y,
            ambient_dim,
            values,
            x0: grid.x0,
            y0: grid.y0,
            mu_re: mu.re,
            mu_im: mu.im,
            margin: grid.margin,
        }
    }

    pub fn grid(&self) -> Result<Grid2> {
        let g = Grid2 {
            nx: self.nx,
            ny: self.ny,
            lx: self.lx,
            ly: self.ly,
            x0: self.x0,
            y0: self.y0,
            periodic_x: self.periodic_x,
            periodic_y: self.periodic_y,
            margin: self.margin,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn mu(&self) -> Complex64 {
        Complex64::new(self.mu_re, self.mu_im)
    }

    /// Checks shape and row width, returning the grid.
    pub fn checked_grid(&self, dim: usize) -> Result<Grid2> {
        if self.ambient_dim != dim {
            return Err(GeomError::AmbientDimension { expected: dim, got: self.ambient_dim });
        }
        let g = self.grid()?;
        if self.values.len() != g.len() {
            return Err(GeomError::ShapeMismatch { expected: (g.nx, g.ny), got: (self.values.len(), 1) });
        }
        if let Some(bad) = self.values.iter().position(|r| r.len() != dim) {
            return Err(GeomError::InvalidSurface(format!(
                "sample {bad} has {} coordinates, expected {dim}",
                self.values[bad].len()
            )));
        }
        Ok(g)
    }
}

impl From<&SampledSurface> for SurfaceFile {
    fn from(s: &SampledSurface) -> Self {
        let rows = s.values.iter().map(|v| v.iter().copied().collect()).collect();
        SurfaceFile::from_rows(&s.grid, s.mu, 6, rows)
    }
}

impl TryFrom<&SurfaceFile> for SampledSurface {
    type Error = GeomError;
    fn try_from(file: &SurfaceFile) -> Result<Self> {
        let g = file.checked_grid(6)?;
        let data = file.values.iter().map(|r| RealVec6::from_column_slice(r)).collect();
        SampledSurface::new(g, file.mu(), Field::from_vec(g.nx, g.ny, data)?)
    }
}

impl SampledSurface {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SurfaceFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SurfaceFile = serde_json::from_str(s)?;
        SampledSurface::try_from(&file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Totally geodesic sphere, stereographic chart.
    fn sphere(n: usize) -> SampledSurface {
        let g = Grid2::new(n, n, 1.0, 1.0, false, false).unwrap().with_origin(-0.5, -0.5).with_margin(2);
        let vals = Field::from_fn(n, n, |i, j| {
            let (x, y) = (g.x(i), g.y(j));
            let r2 = x * x + y * y;
            RealVec6::new(2.0 * x, 2.0 * y, 1.0 - r2, 0.0, 0.0, 0.0) / (1.0 + r2)
        });
        SampledSurface::new(g, c(1.0, 0.0), vals).unwrap()
    }

    #[test]
    fn rejects_non_unit_samples() {
        let g = Grid2::periodic(5, 5, 1.0, 1.0).unwrap();
        let vals = Field::filled(5, 5, RealVec6::new(2.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert!(SampledSurface::new(g, c(1.0, 0.0), vals).is_err());
    }

    #[test]
    fn stereographic_sphere_is_conformal_at_second_order() {
        let mut prev = None;
        for n in [16, 32] {
            let s = sphere(n);
            let cal = s.calculus(Order::Second).unwrap();
            let d = cal.max_core(&conformal_defect(&s, &cal), |x| x);
            if let Some(p) = prev {
                assert!(p / d > 3.0, "ratio {}", p / d);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn json_round_trip() {
        let s = sphere(8).with_mu(c(0.5, 0.25));
        let t = SampledSurface::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(t.grid, s.grid);
        assert_eq!(t.mu, s.mu);
        assert!(t.distance(&s) < 1e-15);
    }

    #[test]
    fn json_rejects_wrong_dimension() {
        let s = sphere(6);
        let mut f = SurfaceFile::from(&s);
        f.ambient_dim = 4;
        assert!(matches!(SampledSurface::try_from(&f), Err(GeomError::AmbientDimension { .. })));
    }

    #[test]
    fn great_sphere_is_minimal() {
        let s = sphere(32);
        let cal = s.calculus(Order::Fourth).unwrap();
        let m = minimality(&s, &cal);
        assert!(m.max_residual < 1e-4, "{}", m.max_residual);
    }
}
