//! Grid-shaped storage.

use std::ops::{Add, Sub};

use nalgebra::{Vector4, Vector6};
use num_complex::Complex64;

use crate::error::{GeomError, Result};

/// Values that finite-difference stencils can combine.
pub trait Value: Copy + Add<Output = Self> + Sub<Output = Self> + Send + Sync + 'static {
    fn zero() -> Self;
    fn scale(self, s: f64) -> Self;
}

/// Values admitting multiplication by a complex scalar and conjugation.
pub trait CValue: Value {
    fn cscale(self, c: Complex64) -> Self;
    fn conjugate(self) -> Self;
}

impl Value for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Value for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl CValue for Complex64 {
    fn cscale(self, c: Complex64) -> Self {
        self * c
    }
    fn conjugate(self) -> Self {
        self.conj()
    }
}

macro_rules! impl_vector_value {
    ($t:ty) => {
        impl Value for $t {
            fn zero() -> Self {
                <$t>::zeros()
            }
            fn scale(self, s: f64) -> Self {
                self * s
            }
        }
    };
}

impl_vector_value!(Vector6<f64>);
impl_vector_value!(Vector4<f64>);

macro_rules! impl_cvector_value {
    ($t:ty) => {
        impl Value for $t {
            fn zero() -> Self {
                <$t>::zeros()
            }
            fn scale(self, s: f64) -> Self {
                self * Complex64::new(s, 0.0)
            }
        }
        impl CValue for $t {
            fn cscale(self, c: Complex64) -> Self {
                self * c
            }
            fn conjugate(self) -> Self {
                self.map(|z| z.conj())
            }
        }
    };
}

impl_cvector_value!(Vector6<Complex64>);
impl_cvector_value!(Vector4<Complex64>);

/// An `nx` by `ny` array stored with index `i * ny + j` (`i` runs along x).
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    nx: usize,
    ny: usize,
    data: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: Copy> Field<T> {
    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                data.push(f(i, j));
            }
        }
        Field { nx, ny, data }
    }

    pub fn filled(nx: usize, ny: usize, v: T) -> Self {
        Field { nx, ny, data: vec![v; nx * ny] }
    }

    pub fn from_vec(nx: usize, ny: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != nx * ny {
            return Err(GeomError::ShapeMismatch {
                expected: (nx, ny),
                got: (data.len(), 1),
            });
        }
        Ok(Field { nx, ny, data })
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.ny + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.ny + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U: Copy, V: Copy>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Field<V> {
        assert_eq!(self.shape(), other.shape(), "field shapes differ");
        Field {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Pointwise map with access to the grid index.
    pub fn map_indexed<U: Copy>(&self, f: impl Fn(usize, usize, T) -> U) -> Field<U> {
        Field::from_fn(self.nx, self.ny, |i, j| f(i, j, self.get(i, j)))
    }
}

impl<T: Value> Field<T> {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Field::filled(nx, ny, T::zero())
    }
}

impl<T: Value> Add for &Field<T> {
    type Output = Field<T>;
    fn add(self, rhs: Self) -> Field<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<T: Value> Sub for &Field<T> {
    type Output = Field<T>;
    fn sub(self, rhs: Self) -> Field<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: CValue> Field<T> {
    pub fn conj(&self) -> Self {
        self.map(|v| v.conjugate())
    }
}

impl Field<f64> {
    pub fn to_complex(&self) -> Field<Complex64> {
        self.map(|x| Complex64::new(x, 0.0))
    }
}

impl Field<Vector6<f64>> {
    pub fn to_complex(&self) -> Field<Vector6<Complex64>> {
        self.map(|v| v.map(|x| Complex64::new(x, 0.0)))
    }
}

impl Field<Vector4<f64>> {
    pub fn to_complex(&self) -> Field<Vector4<Complex64>> {
        self.map(|v| v.map(|x| Complex64::new(x, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_x_major() {
        let f = Field::from_fn(3, 4, |i, j| (i * 10 + j) as f64);
        assert_eq!(f.as_slice()[5], 11.0);
        assert_eq!(f.get(2, 3), 23.0);
        assert_eq!(f.shape(), (3, 4));
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(Field::from_vec(2, 2, vec![1.0; 3]).is_err());
        assert!(Field::from_vec(2, 2, vec![1.0; 4]).is_ok());
    }

    #[test]
    fn arithmetic() {
        let a = Field::filled(2, 2, 3.0);
        let b = Field::filled(2, 2, 1.0);
        assert_eq!((&a - &b).get(1, 1), 2.0);
        assert_eq!((&a + &b).get(0, 1), 4.0);
    }
}
