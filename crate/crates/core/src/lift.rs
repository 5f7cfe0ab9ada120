//! The ruled Lagrangian lift: the `SO(6)`-valued frame `U(t, z)` built from
//! a surface and its (+)transform, its structure identities, and the
//! horizontal lift `F = G1 cos(t/2) + i G2 sin(t/2)` of a bipolar surface.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix6;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{
    c, cbilinear, complexify4, complexify6, conj6, im6, include_complex_oriented, re6, volume6_real, wedge,
    wedge_c, ComplexVec4, ComplexVec6, RealVec6, I,
};
use crate::bipolar::{fit_phase, frame_orientation, S3Surface};
use crate::calculus::Calculus;
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::frames::FrameField;
use crate::grid::Grid2;

/// `lambda`, `z_12^3`, `z_21^2` and `s = sqrt(e^{omega+omega+} - 1)` at one `t`.
#[derive(Clone, Debug)]
pub struct LiftCoefficients {
    pub t: f64,
    pub lambda: Field<f64>,
    pub z12: Field<f64>,
    pub z21: Field<f64>,
    pub root: Field<f64>,
}

fn check_positive(omega: &Field<f64>, omega_plus: &Field<f64>, grid: &Grid2) -> Result<()> {
    for (i, j) in grid.core() {
        let v = omega.get(i, j) + omega_plus.get(i, j);
        if v <= 0.0 {
            return Err(GeomError::PositivityViolation { i, j, value: v });
        }
    }
    Ok(())
}

pub fn lift_coefficients(omega: &Field<f64>, omega_plus: &Field<f64>, grid: &Grid2, t: f64) -> Result<LiftCoefficients> {
    check_positive(omega, omega_plus, grid)?;
    let root = omega.zip_map(omega_plus, |a, b| ((a + b).exp() - 1.0).max(0.0).sqrt());
    let lambda = Field::from_fn(grid.nx, grid.ny, |i, j| {
        2.0 / (omega.get(i, j).exp() + omega_plus.get(i, j).exp() + 2.0 * t.cos() * root.get(i, j))
    });
    let z21 = lambda.zip_map(&root, |l, s| l * t.sin() * s);
    let z12 = Field::from_fn(grid.nx, grid.ny, |i, j| {
        0.5 * lambda.get(i, j) * (omega.get(i, j).exp() - omega_plus.get(i, j).exp())
    });
    for (i, j) in grid.core() {
        let (l, z) = (lambda.get(i, j), z21.get(i, j));
        if !(l > 0.0 && l.is_finite()) {
            return Err(GeomError::InadmissibleT { t, reason: format!("lambda = {l:.3e} at ({i},{j})") });
        }
        if !(z > 0.0) {
            return Err(GeomError::InadmissibleT { t, reason: format!("z21 = {z:.3e} at ({i},{j})") });
        }
    }
    Ok(LiftCoefficients { t, lambda, z12, z21, root })
}

/// `(z21)^2 + (1 - lambda (e^omega + e^omega+)/2)^2 - lambda^2 (e^{omega+omega+} - 1)`.
pub fn coefficient_identity(k: &LiftCoefficients, omega: &Field<f64>, omega_plus: &Field<f64>, grid: &Grid2) -> f64 {
    grid.core()
        .map(|(i, j)| {
            let (l, s) = (k.lambda.get(i, j), k.root.get(i, j));
            let sum = omega.get(i, j).exp() + omega_plus.get(i, j).exp();
            (k.z21.get(i, j).powi(2) + (1.0 - 0.5 * l * sum).powi(2) - l * l * s * s).abs()
        })
        .fold(0.0, f64::max)
}

/// The set of `t` with `lambda > 0` and `z21 > 0` at every core point.
///
/// `e^omega + e^omega+ > 2 sqrt(e^{omega+omega+} - 1)` always holds, so the
/// denominator of `lambda` never vanishes and the interval is all of `(0, pi)`
/// once `omega + omega+ > 0`.
pub fn admissible_interval(omega: &Field<f64>, omega_plus: &Field<f64>, grid: &Grid2) -> Result<(f64, f64)> {
    check_positive(omega, omega_plus, grid)?;
    let mut lo = 0.0_f64;
    let mut hi = PI;
    for (i, j) in grid.core() {
        let (a, b) = (omega.get(i, j).exp(), omega_plus.get(i, j).exp());
        let s = (a * b - 1.0).sqrt();
        // cos t > -(a + b) / (2 s): binding only if that ratio is below 1.
        let r = (a + b) / (2.0 * s);
        if r < 1.0 {
            hi = hi.min(r.acos().max(PI - r.acos()));
            lo = lo.max(0.0);
        }
    }
    Ok((lo, hi))
}

/// `count` equally spaced samples strictly inside `(lo, hi)`.
pub fn t_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo + (hi - lo) * (k + 1) as f64 / (count + 1) as f64).collect()
}

/// The frame `U = (U1, ..., U6)` at one `t`.
#[derive(Clone, Debug)]
pub struct LiftFrame {
    pub coeffs: LiftCoefficients,
    /// `U1 + i U3`.
    pub u13: Field<ComplexVec6>,
    /// `U5 + i U6`.
    pub u56: Field<ComplexVec6>,
    /// `U2 = g0`, the (+)transform.
    pub u2: Field<RealVec6>,
    /// `U4 = f0`.
    pub u4: Field<RealVec6>,
    /// `C = sqrt(lambda / (e^{omega+omega+} - 1))`.
    pub c_factor: Field<f64>,
}

impl LiftFrame {
    pub fn t(&self) -> f64 {
        self.coeffs.t
    }

    pub fn matrix(&self, i: usize, j: usize) -> Matrix6<f64> {
        let (a, b) = (self.u13.get(i, j), self.u56.get(i, j));
        Matrix6::from_columns(&[re6(&a), self.u2.get(i, j), im6(&a), self.u4.get(i, j), re6(&b), im6(&b)])
    }
}

pub fn build_u(fr: &FrameField, fp: &FrameField, t: f64) -> Result<LiftFrame> {
    let grid = fr.grid;
    let k = lift_coefficients(&fr.omega, &fp.omega, &grid, t)?;
    let e_it = Complex64::from_polar(1.0, -t);
    let cf = k.lambda.zip_map(&k.root, |l, s| (l / (s * s)).sqrt());
    let u13 = Field::from_fn(grid.nx, grid.ny, |i, j| {
        let (s, cc) = (k.root.get(i, j), cf.get(i, j));
        let g1 = fp.f1.get(i, j);
        let f1b = conj6(&fr.f1.get(i, j));
        (g1 * (s + e_it * fr.omega.get(i, j).exp()) + f1b * (I * e_it)) * c(-cc, 0.0)
    });
    let u56 = Field::from_fn(grid.nx, grid.ny, |i, j| {
        let (s, cc) = (k.root.get(i, j), cf.get(i, j));
        let g1 = fp.f1.get(i, j);
        let f1b = conj6(&fr.f1.get(i, j));
        (g1 * e_it + f1b * (I * (s + e_it * fp.omega.get(i, j).exp()))) * c(cc, 0.0)
    });
    Ok(LiftFrame {
        coeffs: k,
        u13,
        u56,
        u2: fp.f0.map(|v| re6(&v)),
        u4: fr.f0.map(|v| re6(&v)),
        c_factor: cf,
    })
}

/// Finite-difference weights for derivatives `0..=m` at `z` from nodes `x`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut w = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    w
}

/// Identities of the lift frame at one `t`.
#[derive(Clone, Debug, Serialize)]
pub struct LiftRow {
    pub t: f64,
    /// `max |U^T U - I|`.
    pub gram: f64,
    /// `max |vol(U) - 1|`.
    pub volume: f64,
    /// `max |d U2 (d/dt)|`.
    pub du2_dt: f64,
    /// `|(z21)^2 + (1 - lambda(e^w + e^w+)/2)^2 - lambda^2 (e^{w+w+} - 1)|`.
    pub coefficient_identity: f64,
    /// `d U2 (e2 - i e3) = 2 sqrt(lambda) g1` and `d U4 (e2 - i e3) = 2 sqrt(lambda) f1`.
    pub defining_relations: f64,
    /// Symmetric part of `U^T dU` along `d/dt`, `d/du`, `d/dv`.
    pub antisymmetry: f64,
    /// `(d(U1+iU3), U1-iU3) + (d(U5+iU6), U5-iU6) = 4 i omega1`, along `d/dt`
    /// with `omega1(d/dt) = -1/2`.
    pub omega1_dt: f64,
    /// The same identity along `d-bar`.
    pub omega1_dbar: f64,
    /// `(d(U1+iU3), U5-iU6)(d/dt) = i lambda`.
    pub projection_dt: f64,
    /// `(d(U1+iU3), U1-iU3)(d/dt) - (d(U5+iU6), U5-iU6)(d/dt) + 2 i z12 = 0`.
    pub projection_z12: f64,
    /// `(d(U1+iU3), U5-iU6)(d-bar) = -2 i lambda omega1(d-bar)`.
    pub projection_dbar: f64,
}

impl LiftRow {
    pub fn projections_max(&self) -> f64 {
        self.projection_dt.max(self.projection_z12).max(self.projection_dbar)
    }
}

/// Coefficients read off `d(U1+iU3)` at one `t`.
#[derive(Clone, Debug)]
pub struct LiftExtraction {
    pub t: f64,
    pub lambda: Field<f64>,
    pub z12: Field<f64>,
    pub z21: Field<f64>,
    /// `omega1(d-bar)`; `omega1(d/dt) = -1/2`.
    pub omega1_dbar: Field<Complex64>,
    pub z22: Field<f64>,
    pub z32: Field<f64>,
    /// `c = -b - i a`.
    pub c_lift: Field<Complex64>,
}

impl LiftExtraction {
    pub fn a_lift(&self) -> Field<f64> {
        self.c_lift.map(|z| -z.im)
    }

    pub fn b_lift(&self) -> Field<f64> {
        self.c_lift.map(|z| -z.re)
    }
}

/// `omega1(d-bar) = -(i/4) (2i conj(gamma+) + e^{w+w+} d-bar(w - w+)) / (e^{w+w+} - 1)`.
pub fn omega1_dbar(fr: &FrameField, fp: &FrameField, gamma_plus: &Field<Complex64>, cal: &Calculus) -> Field<Complex64> {
    let diff = fr.omega.zip_map(&fp.omega, |a, b| c(a - b, 0.0));
    let dbar_diff = cal.dbar(&diff);
    Field::from_fn(fr.grid.nx, fr.grid.ny, |i, j| {
        let e = (fr.omega.get(i, j) + fp.omega.get(i, j)).exp();
        -0.25 * I * (2.0 * I * gamma_plus.get(i, j).conj() + e * dbar_diff.get(i, j)) / (e - 1.0)
    })
}

/// Full lift analysis over a set of `t` samples.
#[derive(Clone, Debug)]
pub struct LiftAnalysis {
    pub interval: (f64, f64),
    pub rows: Vec<LiftRow>,
    pub extractions: Vec<LiftExtraction>,
    /// Rotation of the adapted coordinate applied to make `theta1 = 1`
    /// (a multiple of `pi/2`); with `U2 = g0` and `omega2 = dx/sqrt(lambda)`
    /// no rotation is needed.
    pub coordinate_rotation: f64,
}

impl LiftAnalysis {
    pub fn max_of(&self, f: impl Fn(&LiftRow) -> f64) -> f64 {
        self.rows.iter().map(f).fold(0.0, f64::max)
    }
}

/// Builds `U` at each `t` in `ts`, differentiates in `t` with Fornberg
/// weights over all samples and in `z` with `cal`, and evaluates the
/// structure identities and the extracted coefficients.
pub fn analyze_lift(
    fr: &FrameField,
    fp: &FrameField,
    gamma_plus: &Field<Complex64>,
    cal: &Calculus,
    ts: &[f64],
) -> Result<LiftAnalysis> {
    if ts.len() < 5 {
        return Err(GeomError::InvalidGrid(format!("need at least 5 t samples, got {}", ts.len())));
    }
    let grid = fr.grid;
    let interval = admissible_interval(&fr.omega, &fp.omega, &grid)?;
    let frames: Vec<LiftFrame> = ts.iter().map(|&t| build_u(fr, fp, t)).collect::<Result<_>>()?;
    let om1 = omega1_dbar(fr, fp, gamma_plus, cal);
    let sq_l = |l: f64| l.sqrt();
    let mut rows = Vec::new();
    let mut extractions = Vec::new();
    let (nx, ny) = (grid.nx, grid.ny);
    let du2 = cal.d(&frames[0].u2.to_complex());
    let du4 = cal.d(&frames[0].u4.to_complex());
    let u2_u = cal.du(&frames[0].u2);
    let u2_v = cal.dv(&frames[0].u2);
    let u4_u = cal.du(&frames[0].u4);
    let u4_v = cal.dv(&frames[0].u4);
    for (k, lf) in frames.iter().enumerate() {
        let t = lf.t();
        let w = fornberg_weights(t, ts, 1);
        let dt = |sel: &dyn Fn(&LiftFrame) -> &Field<ComplexVec6>| -> Field<ComplexVec6> {
            let mut acc = Field::zeros(nx, ny);
            for (m, f) in frames.iter().enumerate() {
                let wm = w[1][m];
                acc = acc.zip_map(sel(f), |a, b| a + b * c(wm, 0.0));
            }
            acc
        };
        let u13_t = dt(&|f| &f.u13);
        let u56_t = dt(&|f| &f.u56);
        let u13_b = cal.dbar(&lf.u13);
        let u56_b = cal.dbar(&lf.u56);
        let u13_d = cal.d(&lf.u13);
        let u13_u = cal.du(&lf.u13);
        let u13_v = cal.dv(&lf.u13);
        let u56_u = cal.du(&lf.u56);
        let u56_v = cal.dv(&lf.u56);
        let mut row = LiftRow {
            t,
            gram: 0.0,
            volume: 0.0,
            du2_dt: 0.0,
            coefficient_identity: coefficient_identity(&lf.coeffs, &fr.omega, &fp.omega, &grid),
            defining_relations: 0.0,
            antisymmetry: 0.0,
            omega1_dt: 0.0,
            omega1_dbar: 0.0,
            projection_dt: 0.0,
            projection_z12: 0.0,
            projection_dbar: 0.0,
        };
        // U2 does not depend on t: its Fornberg derivative is a weighted sum of equal vectors.
        let wsum: f64 = w[1].iter().sum();
        let mut z22 = Field::zeros(nx, ny);
        let mut z32 = Field::zeros(nx, ny);
        let mut c_lift = Field::zeros(nx, ny);
        for (i, j) in grid.core() {
            let u = lf.matrix(i, j);
            row.gram = row.gram.max((u.transpose() * u - Matrix6::identity()).amax());
            let cols: Vec<RealVec6> = (0..6).map(|q| u.column(q).into_owned()).collect();
            let vol = volume6_real([&cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5]]);
            row.volume = row.volume.max((vol - 1.0).abs());
            row.du2_dt = row.du2_dt.max((lf.u2.get(i, j) * wsum).norm());

            let l = lf.coeffs.lambda.get(i, j);
            let g1 = fp.f1.get(i, j);
            let f1 = fr.f1.get(i, j);
            let r2 = (du2.get(i, j) * c(2.0 * sq_l(l), 0.0) - g1 * c(2.0 * sq_l(l), 0.0)).norm();
            let r4 = (du4.get(i, j) * c(2.0 * sq_l(l), 0.0) - f1 * c(2.0 * sq_l(l), 0.0)).norm();
            row.defining_relations = row.defining_relations.max(r2).max(r4);

            // Omega = U^T dU must be skew.
            let d_t = Matrix6::from_columns(&[
                re6(&u13_t.get(i, j)),
                RealVec6::zeros(),
                im6(&u13_t.get(i, j)),
                RealVec6::zeros(),
                re6(&u56_t.get(i, j)),
                im6(&u56_t.get(i, j)),
            ]);
            let d_u = Matrix6::from_columns(&[
                re6(&u13_u.get(i, j)),
                u2_u.get(i, j),
                im6(&u13_u.get(i, j)),
                u4_u.get(i, j),
                re6(&u56_u.get(i, j)),
                im6(&u56_u.get(i, j)),
            ]);
            let d_v = Matrix6::from_columns(&[
                re6(&u13_v.get(i, j)),
                u2_v.get(i, j),
                im6(&u13_v.get(i, j)),
                u4_v.get(i, j),
                re6(&u56_v.get(i, j)),
                im6(&u56_v.get(i, j)),
            ]);
            for d in [d_t, d_u, d_v] {
                let om = u.transpose() * d;
                row.antisymmetry = row.antisymmetry.max((om + om.transpose()).amax());
            }

            let a = lf.u13.get(i, j);
            let b = lf.u56.get(i, j);
            let (ac, bc) = (conj6(&a), conj6(&b));
            let o1b = om1.get(i, j);
            let z12 = lf.coeffs.z12.get(i, j);
            let sum_t = cbilinear(&u13_t.get(i, j), &ac) + cbilinear(&u56_t.get(i, j), &bc);
            row.omega1_dt = row.omega1_dt.max((sum_t - 4.0 * I * -0.5).norm());
            let sum_b = cbilinear(&u13_b.get(i, j), &ac) + cbilinear(&u56_b.get(i, j), &bc);
            row.omega1_dbar = row.omega1_dbar.max((sum_b - 4.0 * I * o1b).norm());
            row.projection_dt = row.projection_dt.max((cbilinear(&u13_t.get(i, j), &bc) - I * l).norm());
            let pz = cbilinear(&u13_t.get(i, j), &ac) - cbilinear(&u56_t.get(i, j), &bc) + 2.0 * I * z12;
            row.projection_z12 = row.projection_z12.max(pz.norm());
            let pb = cbilinear(&u13_b.get(i, j), &bc) + 2.0 * I * l * o1b;
            row.projection_dbar = row.projection_dbar.max(pb.norm());

            // omega1(d/du) = 2 Re omega1(d-bar), omega1(d/dv) = 2 Im omega1(d-bar).
            let (o1u, o1v) = (2.0 * o1b.re, 2.0 * o1b.im);
            let xu = cbilinear(&u13_u.get(i, j), &ac);
            let xv = cbilinear(&u13_v.get(i, j), &ac);
            z22.set(i, j, (sq_l(l) * (-I * xu * 0.5 - (1.0 + z12) * o1u)).re);
            z32.set(i, j, (sq_l(l) * (-I * xv * 0.5 - (1.0 + z12) * o1v)).re);
            let x = cbilinear(&u13_d.get(i, j), &bc);
            c_lift.set(i, j, sq_l(l) * (x * 0.5 + I * l * o1b.conj()));
        }
        rows.push(row);
        extractions.push(LiftExtraction {
            t,
            lambda: lf.coeffs.lambda.clone(),
            z12: lf.coeffs.z12.clone(),
            z21: lf.coeffs.z21.clone(),
            omega1_dbar: om1.clone(),
            z22,
            z32,
            c_lift,
        });
        let _ = k;
    }
    Ok(LiftAnalysis { interval, rows, extractions, coordinate_rotation: 0.0 })
}

/// Fails with the first structure identity whose residual exceeds `tol`.
pub fn check_structure(analysis: &LiftAnalysis, tol: f64) -> Result<()> {
    let named: [(&str, fn(&LiftRow) -> f64); 6] = [
        ("omega1 sum along d/dt", |r| r.omega1_dt),
        ("omega1 sum along d-bar", |r| r.omega1_dbar),
        ("(d(U1+iU3), U5-iU6)(d/dt) = i lambda", |r| r.projection_dt),
        ("z12 relation", |r| r.projection_z12),
        ("(d(U1+iU3), U5-iU6)(d-bar) = -2i lambda omega1", |r| r.projection_dbar),
        ("U^T dU antisymmetric", |r| r.antisymmetry),
    ];
    for (identity, f) in named {
        let residual = analysis.max_of(f);
        if !(residual <= tol) {
            return Err(GeomError::StructureViolation { identity: identity.to_string(), residual });
        }
    }
    Ok(())
}

/// JSON form of a lift run.
#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub interval: (f64, f64),
    pub coordinate_rotation: f64,
    pub rows: Vec<LiftRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specialization: Option<BipolarSpecialization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizontal: Option<HorizontalReport>,
}

/// Deviation of the extracted lift data from the closed forms for a bipolar
/// surface, where `e^omega = cosh eta` and derivatives are in the adapted
/// real directions.
#[derive(Clone, Debug, Serialize)]
pub struct BipolarSpecialization {
    /// `lambda = 1/(cosh eta + cos t sinh eta)`.
    pub lambda: f64,
    /// `z21 = sin t sinh eta / (cosh eta + cos t sinh eta)`.
    pub z21: f64,
    /// `z12 = 0`.
    pub z12: f64,
    /// `omega1 = -dt/2`, i.e. `omega1(d-bar) = 0`.
    pub omega1: f64,
    /// `omega2 = dx/sqrt(lambda)` and `omega3 = dy/sqrt(lambda)`, through the
    /// defining relations for `U2`, `U4`.
    pub omega23: f64,
    /// `b = lambda^{3/2} eta_y sin t / 2`.
    pub b: f64,
    /// `a = lambda^{3/2} eta_x sin t / 2`.
    pub a: f64,
    /// `z32 = lambda^{3/2} eta_x (cos t cosh eta + sinh eta) / 2`.
    pub z32: f64,
    /// `z22 = -lambda^{3/2} eta_y (cos t cosh eta + sinh eta) / 2`.
    pub z22: f64,
}

impl BipolarSpecialization {
    pub fn max(&self) -> f64 {
        [self.lambda, self.z21, self.z12, self.omega1, self.omega23, self.b, self.a, self.z32, self.z22]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn bipolar_specialization(analysis: &LiftAnalysis, eta: &Field<f64>, cal: &Calculus) -> BipolarSpecialization {
    let eu = cal.du(eta);
    let ev = cal.dv(eta);
    let mut r = BipolarSpecialization {
        lambda: 0.0,
        z21: 0.0,
        z12: 0.0,
        omega1: 0.0,
        omega23: analysis.max_of(|row| row.defining_relations),
        b: 0.0,
        a: 0.0,
        z32: 0.0,
        z22: 0.0,
    };
    for ex in &analysis.extractions {
        let t = ex.t;
        let (st, ct) = t.sin_cos();
        let (a_l, b_l) = (ex.a_lift(), ex.b_lift());
        for (i, j) in cal.grid().core() {
            let e = eta.get(i, j);
            let d = e.cosh() + ct * e.sinh();
            let l = 1.0 / d;
            let l32 = l.powf(1.5);
            let k = ct * e.cosh() + e.sinh();
            r.lambda = r.lambda.max((ex.lambda.get(i, j) - l).abs());
            r.z21 = r.z21.max((ex.z21.get(i, j) - st * e.sinh() / d).abs());
            r.z12 = r.z12.max(ex.z12.get(i, j).abs());
            r.omega1 = r.omega1.max(ex.omega1_dbar.get(i, j).norm());
            r.b = r.b.max((b_l.get(i, j) - 0.5 * l32 * ev.get(i, j) * st).abs());
            r.a = r.a.max((a_l.get(i, j) - 0.5 * l32 * eu.get(i, j) * st).abs());
            r.z32 = r.z32.max((ex.z32.get(i, j) - 0.5 * l32 * eu.get(i, j) * k).abs());
            r.z22 = r.z22.max((ex.z22.get(i, j) + 0.5 * l32 * ev.get(i, j) * k).abs());
        }
    }
    r
}

/// Horizontal lift of a bipolar surface at one `t`.
#[derive(Clone, Debug)]
pub struct HorizontalLift {
    pub t: f64,
    /// `theta1 = theta2 = 1`.
    pub theta: (Complex64, Complex64),
    pub f: Field<ComplexVec4>,
}

pub fn horizontal_lift(s: &S3Surface, t: f64) -> HorizontalLift {
    let (sh, ch) = (0.5 * t).sin_cos();
    let f = s.g1.zip_map(&s.g2, |p, q| complexify4(&p) * c(ch, 0.0) + complexify4(&q) * c(0.0, sh));
    HorizontalLift { t, theta: (c(1.0, 0.0), c(1.0, 0.0)), f }
}

/// Residuals of the system satisfied by `F` at one `t`.
#[derive(Clone, Debug, Serialize)]
pub struct HorizontalRow {
    pub t: f64,
    /// `F_tt + F/4`, with `t`-derivatives taken analytically.
    pub ftt: f64,
    pub ftx: f64,
    pub fty: f64,
    pub fxx: f64,
    pub fxy: f64,
    pub fyy: f64,
    /// `(G2)_x + e^-eta (G1)_x`.
    pub g2x: f64,
    /// `(G2)_y - e^-eta (G1)_y`.
    pub g2y: f64,
    /// `| |F| - 1 |`.
    pub unit: f64,
    /// `(1/(i sqrt2))(F ∧ (-2F_t) - lambda F_x ∧ F_y)` against
    /// `(1/sqrt2)(i e^-eta G1_x ∧ G1_y - G1 ∧ G2)`.
    pub wedge_formula: f64,
}

impl HorizontalRow {
    pub fn system_max(&self) -> f64 {
        [self.ftx, self.fty, self.fxx, self.fxy, self.fyy].into_iter().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizontalReport {
    pub rows: Vec<HorizontalRow>,
    /// Orientation of `R^4` used for the Hodge star.
    pub orientation: f64,
    pub phase_re: f64,
    pub phase_im: f64,
    /// Max `|f - phase * (w - i *w)/sqrt2|` with `w = G1 ∧ G2`, over all `t`.
    pub inclusion_residual: f64,
    pub phase_modulus_defect: f64,
}

fn wedge_formula(s: &S3Surface, cal: &Calculus, t: f64, keep: &mut Vec<ComplexVec6>) -> f64 {
    let (sh, ch) = (0.5 * t).sin_cos();
    let g1u = cal.du(&s.g1);
    let g1v = cal.dv(&s.g1);
    let g2u = cal.du(&s.g2);
    let g2v = cal.dv(&s.g2);
    let mut worst = 0.0_f64;
    for (i, j) in s.grid.core() {
        let (p, q) = (complexify4(&s.g1.get(i, j)), complexify4(&s.g2.get(i, j)));
        let f = p * c(ch, 0.0) + q * c(0.0, sh);
        let ft = p * c(-0.5 * sh, 0.0) + q * c(0.0, 0.5 * ch);
        let fx = complexify4(&g1u.get(i, j)) * c(ch, 0.0) + complexify4(&g2u.get(i, j)) * c(0.0, sh);
        let fy = complexify4(&g1v.get(i, j)) * c(ch, 0.0) + complexify4(&g2v.get(i, j)) * c(0.0, sh);
        let e = s.eta.get(i, j);
        let lambda = 1.0 / (e.cosh() + t.cos() * e.sinh());
        let lhs = (wedge_c(&f, &(ft * c(-2.0, 0.0))) - wedge_c(&fx, &fy) * c(lambda, 0.0)) * (1.0 / (I * 2f64.sqrt()));
        let rhs = (wedge_c(&complexify4(&g1u.get(i, j)), &complexify4(&g1v.get(i, j))) * (I * (-e).exp())
            - wedge_c(&p, &q))
            * c(FRAC_1_SQRT_2, 0.0);
        worst = worst.max((lhs - rhs).norm());
        keep.push(lhs);
    }
    worst
}

/// Residuals of the horizontal-lift system at each `t`, plus the comparison
/// of the lift's `U4` with the complexified bipolar `G1 ∧ G2`.
pub fn bipolar_lift(s: &S3Surface, cal: &Calculus, ts: &[f64]) -> HorizontalReport {
    let g1u = cal.du(&s.g1).to_complex();
    let g1v = cal.dv(&s.g1).to_complex();
    let g2u = cal.du(&s.g2).to_complex();
    let g2v = cal.dv(&s.g2).to_complex();
    let (g1uu, g1uv, g1vv) = cal.second_uv(&s.g1);
    let (g2uu, g2uv, g2vv) = cal.second_uv(&s.g2);
    let eu = cal.du(&s.eta);
    let ev = cal.dv(&s.eta);
    let orientation = frame_orientation(s, cal);
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut models = Vec::new();
    for &t in ts {
        let (sh, ch) = (0.5 * t).sin_cos();
        let comb = |a: ComplexVec4, b: ComplexVec4| a * c(ch, 0.0) + b * c(0.0, sh);
        let comb_t = |a: ComplexVec4, b: ComplexVec4| a * c(-0.5 * sh, 0.0) + b * c(0.0, 0.5 * ch);
        let comb_tt = |a: ComplexVec4, b: ComplexVec4| a * c(-0.25 * ch, 0.0) + b * c(0.0, -0.25 * sh);
        let (st, ct) = t.sin_cos();
        let mut row = HorizontalRow {
            t,
            ftt: 0.0,
            ftx: 0.0,
            fty: 0.0,
            fxx: 0.0,
            fxy: 0.0,
            fyy: 0.0,
            g2x: 0.0,
            g2y: 0.0,
            unit: 0.0,
            wedge_formula: 0.0,
        };
        for (i, j) in s.grid.core() {
            let (p, q) = (complexify4(&s.g1.get(i, j)), complexify4(&s.g2.get(i, j)));
            let f = comb(p, q);
            let ft = comb_t(p, q);
            let ftt = comb_tt(p, q);
            let fx = comb(g1u.get(i, j), g2u.get(i, j));
            let fy = comb(g1v.get(i, j), g2v.get(i, j));
            let ftx = comb_t(g1u.get(i, j), g2u.get(i, j));
            let fty = comb_t(g1v.get(i, j), g2v.get(i, j));
            let fxx = comb(complexify4(&g1uu.get(i, j)), complexify4(&g2uu.get(i, j)));
            let fxy = comb(complexify4(&g1uv.get(i, j)), complexify4(&g2uv.get(i, j)));
            let fyy = comb(complexify4(&g1vv.get(i, j)), complexify4(&g2vv.get(i, j)));
            let e = s.eta.get(i, j);
            let (she, che) = (e.sinh(), e.cosh());
            let d = che + ct * she;
            let ap = ct * che + I * st + she;
            let am = ct * che - I * st + she;
            let (ex, ey) = (eu.get(i, j), ev.get(i, j));
            row.ftt = row.ftt.max((ftt + f * c(0.25, 0.0)).norm());
            row.ftx = row.ftx.max((ftx + fx * ((I + st * she) / (2.0 * d))).norm());
            row.fty = row.fty.max((fty - fy * ((I - st * she) / (2.0 * d))).norm());
            let rxx = f * c(-d, 0.0) + ft * (2.0 * (st * she - I)) + fx * (ex * ap / (2.0 * d)) - fy * (ey * am / (2.0 * d));
            row.fxx = row.fxx.max((fxx - rxx).norm());
            let rxy = fx * (ey * ap / (2.0 * d)) + fy * (ex * am / (2.0 * d));
            row.fxy = row.fxy.max((fxy - rxy).norm());
            let ryy = f * c(-d, 0.0) + ft * (2.0 * (I + st * she)) - fx * (ex * ap / (2.0 * d)) + fy * (ey * am / (2.0 * d));
            row.fyy = row.fyy.max((fyy - ryy).norm());
            let em = (-e).exp();
            row.g2x = row.g2x.max((g2u.get(i, j) + g1u.get(i, j) * c(em, 0.0)).norm());
            row.g2y = row.g2y.max((g2v.get(i, j) - g1v.get(i, j) * c(em, 0.0)).norm());
            row.unit = row.unit.max((f.norm() - 1.0).abs());
            models.push(include_complex_oriented(&wedge(&s.g1.get(i, j), &s.g2.get(i, j)), orientation));
        }
        row.wedge_formula = wedge_formula(s, cal, t, &mut targets);
        rows.push(row);
    }
    let (phase, inclusion_residual) = fit_phase(&targets, &models);
    HorizontalReport {
        rows,
        orientation,
        phase_re: phase.re,
        phase_im: phase.im,
        inclusion_residual,
        phase_modulus_defect: (phase.norm() - 1.0).abs(),
    }
}

/// `U4 = f0` from the (f, f+) lift against the horizontal-lift formula for
/// `f`, up to one fitted phase.
pub fn cross_module_closure(u4: &Field<RealVec6>, s: &S3Surface, cal: &Calculus, t: f64) -> (Complex64, f64) {
    let mut targets = Vec::new();
    wedge_formula(s, cal, t, &mut targets);
    let orientation = frame_orientation(s, cal);
    let models: Vec<ComplexVec6> = s
        .grid
        .core()
        .map(|(i, j)| {
            let v = u4.get(i, j);
            let wv = crate::algebra::Wedge2(v);
            let _ = complexify6(&v);
            include_complex_oriented(&wv, orientation)
        })
        .collect();
    fit_phase(&targets, &models)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_first_derivative_of_sine() {
        let ts = t_samples(0.0, PI, 9);
        let w = fornberg_weights(ts[4], &ts, 1);
        let d: f64 = w[1].iter().zip(&ts).map(|(a, t)| a * t.sin()).sum();
        assert!((d - ts[4].cos()).abs() < 1e-8);
        let s: f64 = w[1].iter().sum();
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn coefficients_satisfy_identity() {
        let g = Grid2::periodic(4, 4, 1.0, 1.0).unwrap();
        let om = Field::from_fn(4, 4, |i, j| 0.2 + 0.1 * i as f64 - 0.03 * j as f64);
        let op = Field::from_fn(4, 4, |i, j| 0.3 - 0.05 * i as f64 + 0.02 * j as f64);
        for t in t_samples(0.0, PI, 9) {
            let k = lift_coefficients(&om, &op, &g, t).unwrap();
            assert!(coefficient_identity(&k, &om, &op, &g) < 1e-12);
        }
        let (lo, hi) = admissible_interval(&om, &op, &g).unwrap();
        assert_eq!((lo, hi), (0.0, PI));
    }

    #[test]
    fn bipolar_coefficients_at_half_pi() {
        let g = Grid2::periodic(2, 2, 1.0, 1.0).unwrap();
        let eta = 0.7_f64;
        let om = Field::filled(2, 2, eta.cosh().ln());
        let k = lift_coefficients(&om, &om, &g, PI / 2.0).unwrap();
        assert!((k.lambda.get(0, 0) - 1.0 / eta.cosh()).abs() < 1e-14);
        assert!(k.z12.get(0, 0).abs() < 1e-15);
        assert!((k.z21.get(0, 0) - eta.sinh() / eta.cosh()).abs() < 1e-14);
    }

    #[test]
    fn inadmissible_t_is_rejected() {
        let g = Grid2::periodic(2, 2, 1.0, 1.0).unwrap();
        let om = Field::filled(2, 2, 0.3);
        assert!(matches!(lift_coefficients(&om, &om, &g, -0.5), Err(GeomError::InadmissibleT { .. })));
        let neg = Field::filled(2, 2, -0.3);
        assert!(matches!(lift_coefficients(&neg, &neg, &g, 1.0), Err(GeomError::PositivityViolation { .. })));
    }
}
