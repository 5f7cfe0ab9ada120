use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Uniform rectangular parameter grid.
///
/// Sample `(i, j)` sits at `(x0 + i*hx, y0 + j*hy)` with `hx = lx/nx`, for
/// periodic and open directions alike. `margin` is the number of rows near an
/// open edge that residual reductions skip, because composed one-sided
/// stencils lose accuracy there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
    pub periodic_x: bool,
    pub periodic_y: bool,
    #[serde(default)]
    pub margin: usize,
}

impl Grid2 {
    pub fn new(
        nx: usize,
        ny: usize,
        lx: f64,
        ly: f64,
        periodic_x: bool,
        periodic_y: bool,
    ) -> Result<Self> {
        let g = Grid2 {
            nx,
            ny,
            lx,
            ly,
            x0: 0.0,
            y0: 0.0,
            periodic_x,
            periodic_y,
            margin: 0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn periodic(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::new(nx, ny, lx, ly, true, true)
    }

    pub fn with_origin(mut self, x0: f64, y0: f64) -> Self {
        self.x0 = x0;
        self.y0 = y0;
        self
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(GeomError::InvalidGrid("empty grid".into()));
        }
        if !(self.lx.is_finite() && self.lx > 0.0 && self.ly.is_finite() && self.ly > 0.0) {
            return Err(GeomError::InvalidGrid(format!(
                "extents must be positive, got lx={} ly={}",
                self.lx, self.ly
            )));
        }
        let open_span = |n: usize, periodic: bool| if periodic { n } else { n.saturating_sub(2 * self.margin) };
        if open_span(self.nx, self.periodic_x) == 0 || open_span(self.ny, self.periodic_y) == 0 {
            return Err(GeomError::InvalidGrid("margin leaves no interior".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Largest spacing; the `h` in every `C*h^p` tolerance.
    pub fn h(&self) -> f64 {
        self.hx().max(self.hy())
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn core_x(&self) -> std::ops::Range<usize> {
        if self.periodic_x {
            0..self.nx
        } else {
            self.margin..self.nx - self.margin
        }
    }

    pub fn core_y(&self) -> std::ops::Range<usize> {
        if self.periodic_y {
            0..self.ny
        } else {
            self.margin..self.ny - self.margin
        }
    }

    /// Indices used by residual reductions.
    pub fn core(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ys = self.core_y();
        self.core_x().flat_map(move |i| ys.clone().map(move |j| (i, j)))
    }

    pub fn in_core(&self, i: usize, j: usize) -> bool {
        self.core_x().contains(&i) && self.core_y().contains(&j)
    }

    /// Same domain with `factor` times as many samples per direction.
    pub fn refined(&self, factor: usize) -> Grid2 {
        Grid2 {
            nx: self.nx * factor,
            ny: self.ny * factor,
            margin: self.margin * factor,
            ..*self
        }
    }

    pub fn same_shape(&self, other: &Grid2) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_points() {
        let g = Grid2::periodic(8, 4, 2.0, 1.0).unwrap().with_origin(1.0, -1.0);
        assert_eq!(g.hx(), 0.25);
        assert_eq!(g.hy(), 0.25);
        assert_eq!(g.x(2), 1.5);
        assert_eq!(g.y(1), -0.75);
    }

    #[test]
    fn core_skips_open_margins_only() {
        let g = Grid2::new(10, 10, 1.0, 1.0, true, false).unwrap().with_margin(2);
        assert_eq!(g.core().count(), 10 * 6);
        assert!(!g.in_core(0, 1));
        assert!(g.in_core(0, 2));
    }

    #[test]
    fn rejects_bad_extent() {
        assert!(Grid2::periodic(8, 8, 0.0, 1.0).is_err());
        assert!(Grid2::periodic(0, 8, 1.0, 1.0).is_err());
    }

    #[test]
    fn refinement_keeps_domain() {
        let g = Grid2::new(16, 16, 3.0, 2.0, true, false).unwrap().with_margin(2);
        let r = g.refined(2);
        assert_eq!((r.nx, r.margin), (32, 4));
        assert_eq!(r.lx, g.lx);
    }
}
