//! Small fixed-dimension algebra.
//!
//! Vectors in C^6 carry two products: the complex-bilinear extension of the
//! Euclidean inner product ([`cbilinear`], no conjugation) and the Hermitian
//! one. Λ²R⁴ is identified with R^6 through the lexicographic basis
//! e0∧e1, e0∧e2, e0∧e3, e1∧e2, e1∧e3, e2∧e3, with e0∧e1∧e2∧e3 positive.

use nalgebra::{Matrix5, Matrix6, Vector4, Vector6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type ComplexVec6 = Vector6<Complex64>;
pub type RealVec6 = Vector6<f64>;
pub type RealVec4 = Vector4<f64>;
pub type ComplexVec4 = Vector4<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Index pairs of the Λ² basis, in storage order.
pub const WEDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Complex-bilinear product: sum of u_k v_k without conjugation.
#[inline]
pub fn cbilinear(u: &ComplexVec6, v: &ComplexVec6) -> Complex64 {
    u.dot(v)
}

#[inline]
pub fn hermitian_norm2(u: &ComplexVec6) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
pub fn conj6(u: &ComplexVec6) -> ComplexVec6 {
    u.map(|z| z.conj())
}

#[inline]
pub fn re6(u: &ComplexVec6) -> RealVec6 {
    u.map(|z| z.re)
}

#[inline]
pub fn im6(u: &ComplexVec6) -> RealVec6 {
    u.map(|z| z.im)
}

#[inline]
pub fn complexify6(v: &RealVec6) -> ComplexVec6 {
    v.map(|x| Complex64::new(x, 0.0))
}

#[inline]
pub fn complexify4(v: &RealVec4) -> ComplexVec4 {
    v.map(|x| Complex64::new(x, 0.0))
}

pub fn is_real6(u: &ComplexVec6, tol: f64) -> bool {
    u.iter().all(|z| z.im.abs() <= tol)
}

/// Determinant of the matrix whose columns are `cols`, i.e. the complexified
/// standard volume form of R^6.
pub fn volume6(cols: [&ComplexVec6; 6]) -> Complex64 {
    Matrix6::from_columns(&cols.map(|c| *c)).determinant()
}

pub fn volume6_real(cols: [&RealVec6; 6]) -> f64 {
    Matrix6::from_columns(&cols.map(|c| *c)).determinant()
}

/// Generalized cross product of five vectors in R^6.
///
/// The result is orthogonal to every input and satisfies
/// `volume6(v1..v5, w) = |w|^2`; it vanishes exactly when the inputs are
/// linearly dependent.
pub fn cross5(v: [&RealVec6; 5]) -> RealVec6 {
    let mut w = RealVec6::zeros();
    for row in 0..6 {
        let minor = Matrix5::from_fn(|r, col| {
            let src = if r < row { r } else { r + 1 };
            v[col][src]
        });
        let sign = if (row + 5) % 2 == 0 { 1.0 } else { -1.0 };
        w[row] = sign * minor.determinant();
    }
    w
}

/// An element of Λ²R⁴ in the lexicographic basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wedge2(pub RealVec6);

impl Wedge2 {
    pub fn new(w: [f64; 6]) -> Self {
        Wedge2(RealVec6::from_column_slice(&w))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

pub fn wedge(p: &RealVec4, q: &RealVec4) -> Wedge2 {
    let mut w = RealVec6::zeros();
    for (k, &(i, j)) in WEDGE_PAIRS.iter().enumerate() {
        w[k] = p[i] * q[j] - p[j] * q[i];
    }
    Wedge2(w)
}

/// Wedge product in Λ²C⁴ (complex-bilinear), same basis as [`wedge`].
pub fn wedge_c(p: &ComplexVec4, q: &ComplexVec4) -> ComplexVec6 {
    let mut w = ComplexVec6::zeros();
    for (k, &(i, j)) in WEDGE_PAIRS.iter().enumerate() {
        w[k] = p[i] * q[j] - p[j] * q[i];
    }
    w
}

/// Hodge star on Λ²R⁴ for the orientation e0∧e1∧e2∧e3 > 0.
pub fn hodge_star(w: &Wedge2) -> Wedge2 {
    let v = &w.0;
    Wedge2::new([v[5], -v[4], v[3], v[2], -v[1], v[0]])
}

/// The star as a 6x6 matrix acting on lexicographic coordinates.
pub fn hodge_matrix() -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    for k in 0..6 {
        let mut e = [0.0; 6];
        e[k] = 1.0;
        m.set_column(k, &hodge_star(&Wedge2::new(e)).0);
    }
    m
}

/// `(1/sqrt 2)(w - i *w)`, the inclusion Λ²R⁴ → Λ²C⁴ used for bipolar surfaces.
pub fn include_complex(w: &Wedge2) -> ComplexVec6 {
    include_complex_oriented(w, 1.0)
}

/// Same as [`include_complex`] with the star taken for orientation `sign`
/// (`-1.0` reverses e0∧e1∧e2∧e3).
pub fn include_complex_oriented(w: &Wedge2, sign: f64) -> ComplexVec6 {
    let s = hodge_star(w).0 * sign;
    let k = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVec6::from_fn(|r, _| Complex64::new(k * w.0[r], -k * s[r]))
}

/// Matrix with the given complex columns.
pub fn columns6(cols: &[ComplexVec6; 6]) -> Matrix6<Complex64> {
    Matrix6::from_columns(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: usize) -> RealVec6 {
        let mut v = RealVec6::zeros();
        v[k] = 1.0;
        v
    }

    fn ce(k: usize) -> ComplexVec6 {
        complexify6(&e(k))
    }

    #[test]
    fn bilinear_products() {
        let u = ComplexVec6::from_column_slice(&[c(1.0, 0.0), I, c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        assert!(cbilinear(&u, &u).norm() < 1e-15);
        assert_eq!(cbilinear(&ce(0), &ce(0)), c(1.0, 0.0));
        assert!((cbilinear(&u, &conj6(&u)) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((hermitian_norm2(&u) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn volume_of_standard_basis() {
        let b: Vec<ComplexVec6> = (0..6).map(ce).collect();
        let v = volume6([&b[0], &b[1], &b[2], &b[3], &b[4], &b[5]]);
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
        let v = volume6([&b[1], &b[0], &b[2], &b[3], &b[4], &b[5]]);
        assert!((v + c(1.0, 0.0)).norm() < 1e-14);
        let v = volume6([&b[0], &b[0], &b[2], &b[3], &b[4], &b[5]]);
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn cross5_cases() {
        let w = cross5([&e(0), &e(1), &e(2), &e(3), &e(4)]);
        assert!((w - e(5)).norm() < 1e-14);
        let w = cross5([&e(0), &e(1), &e(2), &e(3), &e(3)]);
        assert!(w.norm() < 1e-14);
        let w = cross5([&e(1), &e(0), &e(2), &e(3), &e(4)]);
        assert!((w + e(5)).norm() < 1e-14);
    }

    #[test]
    fn wedge_cases() {
        let p = RealVec4::new(1.0, 0.0, 0.0, 0.0);
        let q = RealVec4::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(wedge(&p, &q), Wedge2::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        let r = RealVec4::new(0.3, -1.0, 2.0, 0.5);
        assert!(wedge(&r, &r).norm() < 1e-15);
        let p = RealVec4::new(0.6, 0.8, 0.0, 0.0);
        let q = RealVec4::new(0.0, 0.0, 0.28, 0.96);
        assert!((wedge(&p, &q).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hodge_cases() {
        let s = hodge_star(&Wedge2::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(s, Wedge2::new([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        let s = hodge_star(&Wedge2::new([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(s, Wedge2::new([0.0, 0.0, 0.0, 0.0, -1.0, 0.0]));
        let s = hodge_star(&Wedge2::new([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]));
        assert_eq!(s, Wedge2::new([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        let w = Wedge2::new([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(hodge_star(&hodge_star(&w)), w);
        let h = hodge_matrix();
        assert!((h * h - Matrix6::identity()).norm() < 1e-15);
        assert!((h.determinant() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn star_agrees_with_volume_pairing() {
        // w ∧ *w = |w|^2 vol for the pairing induced by the 4-form.
        let p = RealVec4::new(0.2, -0.7, 1.1, 0.4);
        let q = RealVec4::new(-0.5, 0.3, 0.9, -1.2);
        let r = RealVec4::new(1.0, 0.1, -0.3, 0.8);
        let s = RealVec4::new(0.0, 0.6, 0.2, -0.1);
        let a = wedge(&p, &q);
        let b = wedge(&r, &s);
        let m = nalgebra::Matrix4::from_columns(&[p, q, r, s]);
        // a ∧ b = <*a, b> vol  (for 2-forms in four dimensions)
        assert!((hodge_star(&a).0.dot(&b.0) - m.determinant()).abs() < 1e-12);
    }

    #[test]
    fn include_cases() {
        let w = Wedge2::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let z = include_complex(&w);
        let k = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z[0] - c(k, 0.0)).norm() < 1e-15);
        assert!((z[5] - c(0.0, -k)).norm() < 1e-15);
        assert!(include_complex(&Wedge2::new([0.0; 6])).norm() == 0.0);
        // self-dual: e01 + e23
        let sd = Wedge2::new([1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let z = include_complex(&sd);
        for r in 0..6 {
            let expect = c(k, -k) * sd.0[r];
            assert!((z[r] - expect).norm() < 1e-15);
        }
    }
}
