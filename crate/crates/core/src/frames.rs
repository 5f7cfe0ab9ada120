//! The adapted complex frame `{f0, f1, conj f1, f2, conj f2, N}` and the
//! invariants `omega`, `phi`, `alpha`.

use nalgebra::Matrix6;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{c, cbilinear, complexify6, conj6, cross5, im6, re6, volume6, ComplexVec6, RealVec6, I};
use crate::calculus::Calculus;
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::grid::Grid2;
use crate::surface::{second_fundamental, SampledSurface};
use crate::tolerances;

/// Frame and invariants of an adapted minimal surface at every grid point.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub grid: Grid2,
    pub mu: Complex64,
    pub f0: Field<ComplexVec6>,
    pub f1: Field<ComplexVec6>,
    /// `d f1`, kept because several identities need it.
    pub df1: Field<ComplexVec6>,
    pub f2: Field<ComplexVec6>,
    /// `f2 = a - i b`: minor and major semi-axis directions.
    pub a: Field<RealVec6>,
    pub b: Field<RealVec6>,
    pub n: Field<RealVec6>,
    /// `tanh(phi) N`, computed without dividing by `|a|`.
    pub tanh_n: Field<RealVec6>,
    pub omega: Field<f64>,
    pub phi: Field<f64>,
    pub alpha: Field<Complex64>,
    /// Rotation angle with `cos(theta) = tanh(phi)`.
    pub theta: Field<f64>,
}

impl FrameField {
    /// Eccentricity `sech(phi)` of the ellipse of curvature.
    pub fn eccentricity(&self) -> Field<f64> {
        self.phi.map(|p| 1.0 / p.cosh())
    }

    /// The six frame vectors at one point, in frame order.
    pub fn columns(&self, i: usize, j: usize) -> [ComplexVec6; 6] {
        let f1 = self.f1.get(i, j);
        let f2 = self.f2.get(i, j);
        [self.f0.get(i, j), f1, conj6(&f1), f2, conj6(&f2), complexify6(&self.n.get(i, j))]
    }

    pub fn surface(&self) -> SampledSurface {
        SampledSurface {
            grid: self.grid,
            mu: self.mu,
            values: self.f0.map(|v| re6(&v)),
        }
    }
}

/// The matrix of bilinear products every adapted frame must have.
pub fn gram_model(omega: f64, phi: f64) -> Matrix6<Complex64> {
    let e = omega.exp();
    let ch = (2.0 * phi).cosh();
    let mut a = Matrix6::from_element(c(0.0, 0.0));
    a[(0, 0)] = c(1.0, 0.0);
    a[(1, 2)] = c(e, 0.0);
    a[(2, 1)] = c(e, 0.0);
    a[(3, 3)] = c(-1.0, 0.0);
    a[(4, 4)] = c(-1.0, 0.0);
    a[(3, 4)] = c(ch, 0.0);
    a[(4, 3)] = c(ch, 0.0);
    a[(5, 5)] = c(1.0, 0.0);
    a
}

fn gram(cols: &[ComplexVec6; 6]) -> Matrix6<Complex64> {
    Matrix6::from_fn(|r, s| cbilinear(&cols[r], &cols[s]))
}

/// Builds the frame of an adapted surface.
///
/// Fails with [`GeomError::CircularEllipse`] where `(f2, f2)` vanishes and
/// with [`GeomError::DegenerateEllipse`] where the minor axis collapses or
/// the axes become parallel.
pub fn build_frame(f: &SampledSurface, cal: &Calculus) -> Result<FrameField> {
    let grid = f.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    let f0 = f.complex();
    let f1 = cal.d(&f0);
    let df1 = cal.d(&f1);
    let f2 = second_fundamental(&f0, &f1, &df1);
    let a = f2.map(|v| re6(&v));
    let b = f2.map(|v| -im6(&v));

    let max_f2 = cal.max_core(&f2, |v| v.norm_squared());
    let threshold = tolerances::degenerate_sinh(grid.h());
    for (i, j) in grid.core() {
        let v = f2.get(i, j);
        let q = cbilinear(&v, &v).norm();
        if q < tolerances::CIRCULAR_Q_REL * max_f2 {
            return Err(GeomError::CircularEllipse { i, j, q_abs: q });
        }
        let sinh_phi = a.get(i, j).norm();
        if sinh_phi < threshold {
            return Err(GeomError::DegenerateEllipse { i, j, sinh_phi });
        }
    }

    let mut n = Field::zeros(nx, ny);
    let mut tanh_n = Field::zeros(nx, ny);
    for i in 0..nx {
        for j in 0..ny {
            let p = f.values.get(i, j);
            let v1 = f1.get(i, j);
            let (r, im) = (re6(&v1), im6(&v1));
            let (av, bv) = (a.get(i, j), b.get(i, j));
            let w = cross5([&p, &r, &im, &av, &bv]);
            let wn = w.norm();
            let scale = r.norm() * im.norm() * av.norm() * bv.norm();
            if grid.in_core(i, j) && !(wn > 0.5 * scale) {
                return Err(GeomError::DegenerateEllipse { i, j, sinh_phi: av.norm() });
            }
            let mut nv = w / wn;
            // Orientation: vol(f0, f1, conj f1, f2, conj f2, N) must be negative.
            let vol = volume6([
                &f0.get(i, j),
                &v1,
                &conj6(&v1),
                &f2.get(i, j),
                &conj6(&f2.get(i, j)),
                &complexify6(&nv),
            ]);
            let sign = if vol.re > 0.0 { -1.0 } else { 1.0 };
            nv *= sign;
            n.set(i, j, nv);
            // tanh(phi) = |a| / |b|, and |w| = |R||I||a||b| for orthogonal inputs.
            let tn = w * (sign / (r.norm() * im.norm() * bv.norm_squared()));
            tanh_n.set(i, j, tn);
        }
    }

    let omega = f1.map(|v| cbilinear(&v, &conj6(&v)).re.ln());
    let phi = a.map(|v| v.norm().asinh());
    let theta = phi.map(|p| p.tanh().acos());
    let df2 = cal.d(&f2);
    let alpha = df2.zip_map(&n, |d, nv| cbilinear(&d, &complexify6(&nv)));

    Ok(FrameField {
        grid,
        mu: f.mu,
        f0,
        f1,
        df1,
        f2,
        a,
        b,
        n,
        tanh_n,
        omega,
        phi,
        alpha,
        theta,
    })
}

/// Pointwise identities that need no further differentiation.
#[derive(Clone, Debug, Serialize)]
pub struct FrameIdentities {
    /// Max entrywise deviation of the frame's Gram matrix from the model.
    pub gram: f64,
    /// `|vol(frame) + e^omega sinh 2phi|`.
    pub volume: f64,
    /// `|(a,a) - (b,b) + 1|`.
    pub axes_norm: f64,
    /// `|(a,b)|`.
    pub axes_orth: f64,
    /// `|(N, v)|` for `v` in `f0, Re f1, Im f1, a, b`; exact linear algebra.
    pub normal_orth: f64,
    /// `| |N| - 1 |`.
    pub normal_unit: f64,
}

pub fn frame_identities(fr: &FrameField) -> FrameIdentities {
    let mut out = FrameIdentities {
        gram: 0.0,
        volume: 0.0,
        axes_norm: 0.0,
        axes_orth: 0.0,
        normal_orth: 0.0,
        normal_unit: 0.0,
    };
    for (i, j) in fr.grid.core() {
        let cols = fr.columns(i, j);
        let (om, ph) = (fr.omega.get(i, j), fr.phi.get(i, j));
        let g = gram(&cols) - gram_model(om, ph);
        out.gram = out.gram.max(g.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let vol = volume6([&cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5]]);
        out.volume = out.volume.max((vol + om.exp() * (2.0 * ph).sinh()).norm());
        let (a, b) = (fr.a.get(i, j), fr.b.get(i, j));
        out.axes_norm = out.axes_norm.max((a.dot(&a) - b.dot(&b) + 1.0).abs());
        out.axes_orth = out.axes_orth.max(a.dot(&b).abs());
        let n = fr.n.get(i, j);
        let f1 = fr.f1.get(i, j);
        let probes = [re6(&fr.f0.get(i, j)), re6(&f1), im6(&f1), a, b];
        for p in probes {
            out.normal_orth = out.normal_orth.max(n.dot(&p).abs() / p.norm().max(1.0));
        }
        out.normal_unit = out.normal_unit.max((n.norm() - 1.0).abs());
    }
    out
}

/// Largest Gram-matrix deviation from the model matrix.
pub fn gram_residual(fr: &FrameField) -> f64 {
    frame_identities(fr).gram
}

/// Residuals of the six moving-frame equations (the conjugate equations
/// follow exactly from stencil symmetry).
#[derive(Clone, Debug, Serialize)]
pub struct FrameEquationResidual {
    pub df0: f64,
    pub df1: f64,
    pub df1_bar: f64,
    pub df2: f64,
    pub df2_bar: f64,
    pub dn: f64,
}

impl FrameEquationResidual {
    pub fn max(&self) -> f64 {
        [self.df0, self.df1, self.df1_bar, self.df2, self.df2_bar, self.dn]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn frame_equation_residual(fr: &FrameField, cal: &Calculus) -> FrameEquationResidual {
    let d_f0 = cal.d(&fr.f0);
    let f1_bar = fr.f1.conj();
    let d_f1_bar = cal.d(&f1_bar);
    let d_f2 = cal.d(&fr.f2);
    let d_f2_bar = cal.d(&fr.f2.conj());
    let n_c = fr.n.to_complex();
    let d_n = cal.d(&n_c);
    let d_omega = cal.d(&fr.omega.to_complex());
    let d_phi = cal.d(&fr.phi.to_complex());

    let mut r = FrameEquationResidual { df0: 0.0, df1: 0.0, df1_bar: 0.0, df2: 0.0, df2_bar: 0.0, dn: 0.0 };
    for (i, j) in fr.grid.core() {
        let f0 = fr.f0.get(i, j);
        let f1 = fr.f1.get(i, j);
        let f1b = f1_bar.get(i, j);
        let f2 = fr.f2.get(i, j);
        let f2b = conj6(&f2);
        let n = n_c.get(i, j);
        let om = fr.omega.get(i, j);
        let ph = fr.phi.get(i, j);
        let al = fr.alpha.get(i, j);
        let dp = d_phi.get(i, j);
        let (s2, c2) = ((2.0 * ph).sinh(), (2.0 * ph).cosh());
        let em = (-om).exp();

        r.df0 = r.df0.max((d_f0.get(i, j) - f1).norm());
        r.df1 = r.df1.max((fr.df1.get(i, j) - f2 - f1 * d_omega.get(i, j)).norm());
        r.df1_bar = r.df1_bar.max((d_f1_bar.get(i, j) + f0 * c(om.exp(), 0.0)).norm());
        let rhs2 = f1b * c(em, 0.0) + f2 * (dp * 2.0 * c2 / s2) + f2b * (dp * 2.0 / s2) + n * al;
        r.df2 = r.df2.max((d_f2.get(i, j) - rhs2).norm());
        r.df2_bar = r.df2_bar.max((d_f2_bar.get(i, j) + f1b * c(em * c2, 0.0)).norm());
        let rhs_n = (f2 + f2b * c(c2, 0.0)) * (-al / (s2 * s2));
        r.dn = r.dn.max((d_n.get(i, j) - rhs_n).norm());
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EllipseClass {
    NondegenerateNoncircular,
    Circle,
    Segment,
    Point,
}

/// Shape of the ellipse of curvature over the grid.
#[derive(Clone, Debug)]
pub struct EllipseReport {
    /// Most degenerate class seen over the core (point > segment > circle).
    pub classification: EllipseClass,
    pub per_point: Field<EllipseClass>,
    pub counts: [usize; 4],
    /// `sqrt(1 - minor^2/major^2)`; equals `sech(phi)` in an adapted chart.
    pub eccentricity: Field<f64>,
    pub minor_axis: Field<RealVec6>,
    pub major_axis: Field<RealVec6>,
}

const ELLIPSE_SAMPLES: usize = 256;

/// Classifies the ellipse `psi -> 2(a cos 2psi + b sin 2psi)` by sampling.
///
/// Works in any conformal chart; `a` and `b` need not be orthogonal.
pub fn classify_ellipse(f: &SampledSurface, cal: &Calculus) -> EllipseReport {
    let f0 = f.complex();
    let f1 = cal.d(&f0);
    let df1 = cal.d(&f1);
    let f2 = second_fundamental(&f0, &f1, &df1);
    let h2 = f.grid.h().powi(2);
    let (nx, ny) = (f.grid.nx, f.grid.ny);
    let mut per_point = Field::filled(nx, ny, EllipseClass::NondegenerateNoncircular);
    let mut ecc = Field::zeros(nx, ny);
    let mut minor = Field::zeros(nx, ny);
    let mut major = Field::zeros(nx, ny);
    let scale = f2.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    for i in 0..nx {
        for j in 0..ny {
            let v = f2.get(i, j);
            let (a, b) = (re6(&v), -im6(&v));
            let mut lo = (f64::INFINITY, RealVec6::zeros());
            let mut hi = (0.0, RealVec6::zeros());
            for k in 0..ELLIPSE_SAMPLES {
                let psi = std::f64::consts::PI * k as f64 / ELLIPSE_SAMPLES as f64;
                let p = (a * (2.0 * psi).cos() + b * (2.0 * psi).sin()) * 2.0;
                let n = p.norm();
                if n < lo.0 {
                    lo = (n, p);
                }
                if n > hi.0 {
                    hi = (n, p);
                }
            }
            let ratio = if hi.0 > 0.0 { lo.0 / hi.0 } else { 0.0 };
            let class = if hi.0 < 1e-8 * scale.max(1.0) {
                EllipseClass::Point
            } else if ratio < tolerances::DEGENERATE_C * h2 {
                EllipseClass::Segment
            } else if 1.0 - ratio < tolerances::CIRCULAR_Q_REL {
                EllipseClass::Circle
            } else {
                EllipseClass::NondegenerateNoncircular
            };
            per_point.set(i, j, class);
            ecc.set(i, j, (1.0 - ratio * ratio).max(0.0).sqrt());
            let unit = |x: RealVec6| if x.norm() > 0.0 { x / x.norm() } else { x };
            minor.set(i, j, unit(lo.1));
            major.set(i, j, unit(hi.1));
        }
    }
    let mut counts = [0usize; 4];
    for (i, j) in f.grid.core() {
        counts[per_point.get(i, j) as usize] += 1;
    }
    let classification = if counts[3] > 0 {
        EllipseClass::Point
    } else if counts[2] > 0 {
        EllipseClass::Segment
    } else if counts[1] > 0 {
        EllipseClass::Circle
    } else {
        EllipseClass::NondegenerateNoncircular
    };
    EllipseReport { classification, per_point, counts, eccentricity: ecc, minor_axis: minor, major_axis: major }
}

/// `i` as a complex scalar, re-exported for formula-heavy callers.
pub const IM: Complex64 = I;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_determinant() {
        let (om, ph) = (0.3_f64, 0.7_f64);
        let d = gram_model(om, ph).determinant();
        let expect = (2.0 * om).exp() * (2.0 * ph).sinh().powi(2);
        assert!((d - c(expect, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn synthetic_frame_matches_model() {
        // The standard seed frame satisfies the model exactly.
        let (om, ph) = (0.4_f64, 0.9_f64);
        let e = |k: usize| {
            let mut v = ComplexVec6::zeros();
            v[k] = c(1.0, 0.0);
            v
        };
        let s = (om.exp() / 2.0).sqrt();
        let f1 = (e(1) - e(2) * I) * c(s, 0.0);
        let f2 = e(3) * c(ph.sinh(), 0.0) - e(4) * (I * ph.cosh());
        let cols = [e(0), f1, conj6(&f1), f2, conj6(&f2), e(5)];
        let g = gram(&cols) - gram_model(om, ph);
        assert!(g.iter().all(|z| z.norm() < 1e-12));
        let vol = volume6([&cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5]]);
        assert!((vol + om.exp() * (2.0 * ph).sinh()).norm() < 1e-12);
        // Flipping N leaves the Gram matrix alone but flips the volume.
        let flipped = [cols[0], cols[1], cols[2], cols[3], cols[4], -cols[5]];
        assert!((gram(&flipped) - gram_model(om, ph)).iter().all(|z| z.norm() < 1e-12));
        let v2 = volume6([&flipped[0], &flipped[1], &flipped[2], &flipped[3], &flipped[4], &flipped[5]]);
        assert!((v2 - om.exp() * (2.0 * ph).sinh()).norm() < 1e-12);
    }
}
