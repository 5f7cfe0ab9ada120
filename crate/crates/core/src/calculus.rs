//! Finite-difference Wirtinger calculus on a [`Grid2`].
//!
//! The grid coordinate is `z = x + iy`. Derivatives are taken with respect to
//! the chart coordinate `w = mu * z`, so an adapted coordinate is obtained by
//! storing the right `mu` rather than by resampling:
//! `d/dw = (1/mu) * (d/dx - i d/dy) / 2`. The real directions `u, v` of
//! `w = u + iv` are available as [`Calculus::du`] and [`Calculus::dv`].

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::field::{CValue, Field, Value};
use crate::grid::Grid2;

/// Order of the finite-difference stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Order {
    Second,
    Fourth,
}

impl Order {
    pub fn from_int(n: u32) -> Option<Order> {
        match n {
            2 => Some(Order::Second),
            4 => Some(Order::Fourth),
            _ => None,
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::Second => 2,
            Order::Fourth => 4,
        }
    }
}

type Rows = Vec<Vec<(usize, f64)>>;

const MIN_SAMPLES: usize = 5;

fn periodic_rows(n: usize, weights: &[f64], scale: f64) -> Rows {
    let half = (weights.len() / 2) as isize;
    (0..n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(k, &w)| {
                    let idx = (i as isize + k as isize - half).rem_euclid(n as isize) as usize;
                    (idx, w * scale)
                })
                .collect()
        })
        .collect()
}

/// Rows for an open direction: centered interior, one-sided `left` rows at
/// the start, mirrored at the end (`sign` is -1 for odd derivatives).
fn open_rows(n: usize, interior: &[f64], left: &[&[f64]], sign: f64, scale: f64) -> Rows {
    let half = interior.len() / 2;
    let nb = left.len();
    (0..n)
        .map(|i| {
            if i < nb {
                left[i].iter().enumerate().map(|(k, &w)| (k, w * scale)).collect()
            } else if i >= n - nb {
                let r = n - 1 - i;
                left[r]
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| (n - 1 - k, sign * w * scale))
                    .collect()
            } else {
                interior
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(|(k, &w)| (i + k - half, w * scale))
                    .collect()
            }
        })
        .collect()
}

fn build_rows(n: usize, h: f64, periodic: bool, order: Order, deriv: u8) -> Rows {
    match (order, deriv) {
        (Order::Second, 1) => {
            let c = [-0.5, 0.0, 0.5];
            if periodic {
                periodic_rows(n, &c, 1.0 / h)
            } else {
                open_rows(n, &c, &[&[-1.5, 2.0, -0.5]], -1.0, 1.0 / h)
            }
        }
        (Order::Second, _) => {
            let c = [1.0, -2.0, 1.0];
            if periodic {
                periodic_rows(n, &c, 1.0 / (h * h))
            } else {
                open_rows(n, &c, &[&[2.0, -5.0, 4.0, -1.0]], 1.0, 1.0 / (h * h))
            }
        }
        (Order::Fourth, 1) => {
            let c = [1.0, -8.0, 0.0, 8.0, -1.0];
            let s = 1.0 / (12.0 * h);
            if periodic {
                periodic_rows(n, &c, s)
            } else {
                open_rows(
                    n,
                    &c,
                    &[&[-25.0, 48.0, -36.0, 16.0, -3.0], &[-3.0, -10.0, 18.0, -6.0, 1.0]],
                    -1.0,
                    s,
                )
            }
        }
        (Order::Fourth, _) => {
            let c = [-1.0, 16.0, -30.0, 16.0, -1.0];
            let s = 1.0 / (12.0 * h * h);
            if periodic {
                periodic_rows(n, &c, s)
            } else {
                open_rows(
                    n,
                    &c,
                    &[
                        &[45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
                        &[10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
                    ],
                    1.0,
                    s,
                )
            }
        }
    }
}

/// Derivative operators bound to one grid, stencil order and chart factor.
#[derive(Clone, Debug)]
pub struct Calculus {
    grid: Grid2,
    order: Order,
    mu: Complex64,
    x1: Rows,
    x2: Rows,
    y1: Rows,
    y2: Rows,
}

impl Calculus {
    pub fn new(grid: Grid2, order: Order, mu: Complex64) -> Result<Self> {
        grid.validate()?;
        let need = |periodic: bool| match (order, periodic) {
            (Order::Fourth, false) => 6,
            _ => MIN_SAMPLES,
        };
        if grid.nx < need(grid.periodic_x) {
            return Err(GeomError::StencilUnderflow { axis: 'x', n: grid.nx, min: need(grid.periodic_x) });
        }
        if grid.ny < need(grid.periodic_y) {
            return Err(GeomError::StencilUnderflow { axis: 'y', n: grid.ny, min: need(grid.periodic_y) });
        }
        if !(mu.norm() > 0.0 && mu.norm().is_finite()) {
            return Err(GeomError::InvalidGrid(format!("chart factor must be nonzero, got {mu}")));
        }
        Ok(Calculus {
            x1: build_rows(grid.nx, grid.hx(), grid.periodic_x, order, 1),
            x2: build_rows(grid.nx, grid.hx(), grid.periodic_x, order, 2),
            y1: build_rows(grid.ny, grid.hy(), grid.periodic_y, order, 1),
            y2: build_rows(grid.ny, grid.hy(), grid.periodic_y, order, 2),
            grid,
            order,
            mu,
        })
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    pub fn with_mu(&self, mu: Complex64) -> Self {
        Calculus { mu, ..self.clone() }
    }

    fn check<T: Copy>(&self, f: &Field<T>) {
        assert_eq!(
            f.shape(),
            (self.grid.nx, self.grid.ny),
            "field shape does not match the calculus grid"
        );
    }

    fn along_x<T: Value>(&self, f: &Field<T>, rows: &Rows) -> Field<T> {
        self.check(f);
        Field::from_fn(self.grid.nx, self.grid.ny, |i, j| {
            rows[i].iter().fold(T::zero(), |acc, &(k, w)| acc + f.get(k, j).scale(w))
        })
    }

    fn along_y<T: Value>(&self, f: &Field<T>, rows: &Rows) -> Field<T> {
        self.check(f);
        Field::from_fn(self.grid.nx, self.grid.ny, |i, j| {
            rows[j].iter().fold(T::zero(), |acc, &(k, w)| acc + f.get(i, k).scale(w))
        })
    }

    pub fn dx<T: Value>(&self, f: &Field<T>) -> Field<T> {
        self.along_x(f, &self.x1)
    }

    pub fn dy<T: Value>(&self, f: &Field<T>) -> Field<T> {
        self.along_y(f, &self.y1)
    }

    pub fn dxx<T: Value>(&self, f: &Field<T>) -> Field<T> {
        self.along_x(f, &self.x2)
    }

    pub fn dyy<T: Value>(&self, f: &Field<T>) -> Field<T> {
        self.along_y(f, &self.y2)
    }

    pub fn dxy<T: Value>(&self, f: &Field<T>) -> Field<T> {
        self.dx(&self.dy(f))
    }

    /// `d/dw`.
    pub fn d<T: CValue>(&self, f: &Field<T>) -> Field<T> {
        let k = (2.0 * self.mu).inv();
        let i = Complex64::i();
        self.dx(f).zip_map(&self.dy(f), |a, b| (a - b.cscale(i)).cscale(k))
    }

    /// `d/dw-bar`.
    pub fn dbar<T: CValue>(&self, f: &Field<T>) -> Field<T> {
        let k = (2.0 * self.mu.conj()).inv();
        let i = Complex64::i();
        self.dx(f).zip_map(&self.dy(f), |a, b| (a + b.cscale(i)).cscale(k))
    }

    /// `d^2/dw^2`, assembled from second-derivative stencils.
    pub fn dd<T: CValue>(&self, f: &Field<T>) -> Field<T> {
        let k = (4.0 * self.mu * self.mu).inv();
        let i = Complex64::i();
        let xx = self.dxx(f);
        let yy = self.dyy(f);
        let xy = self.dxy(f);
        Field::from_fn(self.grid.nx, self.grid.ny, |a, b| {
            (xx.get(a, b) - yy.get(a, b) - xy.get(a, b).cscale(2.0 * i)).cscale(k)
        })
    }

    /// `d^2/(dw dw-bar)`, one quarter of the Laplacian in `w`.
    pub fn ddbar<T: Value>(&self, f: &Field<T>) -> Field<T> {
        let k = 1.0 / (4.0 * self.mu.norm_sqr());
        self.dxx(f).zip_map(&self.dyy(f), |a, b| (a + b).scale(k))
    }

    fn nu(&self) -> (f64, f64) {
        let nu = self.mu.inv();
        (nu.re, nu.im)
    }

    /// Derivative along `u = Re w`.
    pub fn du<T: Value>(&self, f: &Field<T>) -> Field<T> {
        let (p, q) = self.nu();
        self.dx(f).zip_map(&self.dy(f), |a, b| a.scale(p) + b.scale(q))
    }

    /// Derivative along `v = Im w`.
    pub fn dv<T: Value>(&self, f: &Field<T>) -> Field<T> {
        let (p, q) = self.nu();
        self.dx(f).zip_map(&self.dy(f), |a, b| b.scale(p) - a.scale(q))
    }

    /// Second derivatives `(f_uu, f_uv, f_vv)` in the adapted real directions.
    pub fn second_uv<T: Value>(&self, f: &Field<T>) -> (Field<T>, Field<T>, Field<T>) {
        let (p, q) = self.nu();
        let xx = self.dxx(f);
        let yy = self.dyy(f);
        let xy = self.dxy(f);
        let n = (self.grid.nx, self.grid.ny);
        let uu = Field::from_fn(n.0, n.1, |i, j| {
            xx.get(i, j).scale(p * p) + xy.get(i, j).scale(2.0 * p * q) + yy.get(i, j).scale(q * q)
        });
        let vv = Field::from_fn(n.0, n.1, |i, j| {
            xx.get(i, j).scale(q * q) - xy.get(i, j).scale(2.0 * p * q) + yy.get(i, j).scale(p * p)
        });
        let uv = Field::from_fn(n.0, n.1, |i, j| {
            xx.get(i, j).scale(-p * q) + xy.get(i, j).scale(p * p - q * q) + yy.get(i, j).scale(p * q)
        });
        (uu, uv, vv)
    }

    /// Maximum of `g` over the core of the grid.
    pub fn max_core<T: Copy>(&self, f: &Field<T>, g: impl Fn(T) -> f64) -> f64 {
        self.grid.core().map(|(i, j)| g(f.get(i, j))).fold(0.0, f64::max)
    }

    /// Location and value of the maximum of `g` over the core.
    pub fn argmax_core<T: Copy>(&self, f: &Field<T>, g: impl Fn(T) -> f64) -> ((usize, usize), f64) {
        self.grid
            .core()
            .map(|(i, j)| ((i, j), g(f.get(i, j))))
            .fold(((0, 0), f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
    }

    /// Location and value of the minimum of `g` over the core.
    pub fn argmin_core<T: Copy>(&self, f: &Field<T>, g: impl Fn(T) -> f64) -> ((usize, usize), f64) {
        self.grid
            .core()
            .map(|(i, j)| ((i, j), g(f.get(i, j))))
            .fold(((0, 0), f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn open_grid(n: usize) -> Grid2 {
        Grid2::new(n, n, 1.0, 1.0, false, false).unwrap()
    }

    #[test]
    fn holomorphic_coordinate() {
        for order in [Order::Second, Order::Fourth] {
            let g = open_grid(12);
            let cal = Calculus::new(g, order, c(1.0, 0.0)).unwrap();
            let z = Field::from_fn(12, 12, |i, j| c(g.x(i), g.y(j)));
            let dz = cal.d(&z);
            let dbz = cal.dbar(&z);
            for v in dz.iter() {
                assert!((v - c(1.0, 0.0)).norm() < 1e-12);
            }
            for v in dbz.iter() {
                assert!(v.norm() < 1e-12);
            }
            let zb = z.conj();
            assert!(cal.max_core(&cal.d(&zb), |v| v.norm()) < 1e-12);
            assert!(cal.max_core(&cal.dbar(&zb), |v| (v - c(1.0, 0.0)).norm()) < 1e-12);
        }
    }

    #[test]
    fn periodic_sine() {
        let n = 64;
        let g = Grid2::periodic(n, n, 2.0 * PI, 2.0 * PI).unwrap();
        let cal = Calculus::new(g, Order::Second, c(1.0, 0.0)).unwrap();
        let f = Field::from_fn(n, n, |i, _| c(g.x(i).sin(), 0.0));
        let df = cal.d(&f);
        let err = (0..n).map(|i| (df.get(i, 0) - c(0.5 * g.x(i).cos(), 0.0)).norm()).fold(0.0, f64::max);
        assert!(err < 3e-3, "err {err}");
        let cal4 = Calculus::new(g, Order::Fourth, c(1.0, 0.0)).unwrap();
        let df4 = cal4.d(&f);
        let err4 = (0..n).map(|i| (df4.get(i, 0) - c(0.5 * g.x(i).cos(), 0.0)).norm()).fold(0.0, f64::max);
        assert!(err4 < 1e-5, "err4 {err4}");
    }

    #[test]
    fn second_derivatives_of_quartic_exact_at_order_four() {
        let g = open_grid(10);
        let cal = Calculus::new(g, Order::Fourth, c(1.0, 0.0)).unwrap();
        let f = Field::from_fn(10, 10, |i, j| g.x(i).powi(4) + g.x(i) * g.y(j).powi(3));
        let fxx = cal.dxx(&f);
        let fyy = cal.dyy(&f);
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = (g.x(i), g.y(j));
                assert!((fxx.get(i, j) - 12.0 * x * x).abs() < 1e-9);
                assert!((fyy.get(i, j) - 6.0 * x * y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn boundary_rows_exact_for_quadratics_at_order_two() {
        let g = open_grid(7);
        let cal = Calculus::new(g, Order::Second, c(1.0, 0.0)).unwrap();
        let f = Field::from_fn(7, 7, |i, j| g.x(i) * g.x(i) - 3.0 * g.y(j));
        let fx = cal.dx(&f);
        let fy = cal.dy(&f);
        let fxx = cal.dxx(&f);
        for i in 0..7 {
            for j in 0..7 {
                assert!((fx.get(i, j) - 2.0 * g.x(i)).abs() < 1e-12);
                assert!((fy.get(i, j) + 3.0).abs() < 1e-12);
                assert!((fxx.get(i, j) - 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn chart_factor_scales_derivatives() {
        let g = open_grid(9);
        let mu = c(1.0, 2.0);
        let cal = Calculus::new(g, Order::Second, mu).unwrap();
        // w = mu z, so w itself has d/dw = 1.
        let w = Field::from_fn(9, 9, |i, j| mu * c(g.x(i), g.y(j)));
        assert!(cal.max_core(&cal.d(&w), |v| (v - c(1.0, 0.0)).norm()) < 1e-12);
        assert!(cal.max_core(&cal.dbar(&w), |v| v.norm()) < 1e-12);
        let u = w.map(|v| v.re);
        let v = w.map(|v| v.im);
        assert!(cal.max_core(&cal.du(&u), |a| (a - 1.0).abs()) < 1e-12);
        assert!(cal.max_core(&cal.dv(&u), |a| a.abs()) < 1e-12);
        assert!(cal.max_core(&cal.dv(&v), |a| (a - 1.0).abs()) < 1e-12);
        // u^2 - v^2 + u v: uu = 2, vv = -2, uv = 1
        let q = Field::from_fn(9, 9, |i, j| {
            let (a, b) = (u.get(i, j), v.get(i, j));
            a * a - b * b + a * b
        });
        let (uu, uv, vv) = cal.second_uv(&q);
        assert!(cal.max_core(&uu, |a| (a - 2.0).abs()) < 1e-9);
        assert!(cal.max_core(&vv, |a| (a + 2.0).abs()) < 1e-9);
        assert!(cal.max_core(&uv, |a| (a - 1.0).abs()) < 1e-9);
        // w^2 has d^2/dw^2 = 2
        let w2 = w.map(|a| a * a);
        assert!(cal.max_core(&cal.dd(&w2), |a| (a - c(2.0, 0.0)).norm()) < 1e-9);
    }

    #[test]
    fn ddbar_of_real_is_quarter_laplacian() {
        let n = 32;
        let g = Grid2::periodic(n, n, 2.0 * PI, 2.0 * PI).unwrap();
        let cal = Calculus::new(g, Order::Second, c(1.0, 0.0)).unwrap();
        let f = Field::from_fn(n, n, |i, j| (g.x(i)).sin() * (2.0 * g.y(j)).cos());
        let fc = f.to_complex();
        let composed = cal.d(&cal.dbar(&fc));
        let direct = cal.ddbar(&f);
        let diff = composed.zip_map(&direct, |a, b| (a - c(b, 0.0)).norm());
        assert!(cal.max_core(&diff, |x| x) < 0.2 * (2.0 * PI / n as f64).powi(2) * 10.0);
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let n = 16;
        let g = Grid2::new(n, n, 3.0, 2.0, true, false).unwrap();
        let cal = Calculus::new(g, Order::Fourth, c(0.7, -0.4)).unwrap();
        let f = Field::from_fn(n, n, |i, j| c((g.x(i) * 2.0).sin() + g.y(j), g.y(j) * g.y(j)));
        let lhs = cal.d(&f.conj());
        let rhs = cal.dbar(&f).conj();
        assert!(cal.max_core(&(&lhs - &rhs), |v| v.norm()) == 0.0);
    }

    #[test]
    fn rejects_small_grids() {
        let g = Grid2::periodic(4, 8, 1.0, 1.0).unwrap();
        assert!(matches!(
            Calculus::new(g, Order::Second, c(1.0, 0.0)),
            Err(GeomError::StencilUnderflow { axis: 'x', n: 4, .. })
        ));
        let g = Grid2::new(8, 5, 1.0, 1.0, true, false).unwrap();
        assert!(Calculus::new(g, Order::Second, c(1.0, 0.0)).is_ok());
        assert!(Calculus::new(g, Order::Fourth, c(1.0, 0.0)).is_err());
    }
}
