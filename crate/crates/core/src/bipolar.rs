//! Minimal surfaces in S^3 with their unit normal, and Lawson's bipolar
//! construction `G1 ∧ G2` into `Λ²R⁴ = R⁶`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    complexify4, include_complex_oriented, wedge, wedge_c, ComplexVec6, RealVec4, RealVec6, I,
};
use crate::calculus::{Calculus, Order};
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::frames::{build_frame, FrameField};
use crate::grid::Grid2;
use crate::surface::{SampledSurface, SurfaceFile};
use crate::transforms::{detect_gamma_reflection, gamma, transform, ReflectionReport};

/// A minimal surface `G1` in S^3 with unit normal `G2` and conformal factor
/// `e^eta`, sampled in a chart where `(II(d,d), II(d,d)) = 1/4`.
#[derive(Clone, Debug)]
pub struct S3Surface {
    pub grid: Grid2,
    pub mu: Complex64,
    pub g1: Field<RealVec4>,
    pub g2: Field<RealVec4>,
    pub eta: Field<f64>,
}

const UNIT_TOL: f64 = 1e-6;

impl S3Surface {
    pub fn new(
        grid: Grid2,
        mu: Complex64,
        g1: Field<RealVec4>,
        g2: Field<RealVec4>,
        eta: Field<f64>,
    ) -> Result<Self> {
        grid.validate()?;
        let shape = (grid.nx, grid.ny);
        for got in [g1.shape(), g2.shape(), eta.shape()] {
            if got != shape {
                return Err(GeomError::ShapeMismatch { expected: shape, got });
            }
        }
        for (i, j) in (0..grid.nx).flat_map(|i| (0..grid.ny).map(move |j| (i, j))) {
            let (p, q) = (g1.get(i, j), g2.get(i, j));
            let bad = (p.norm() - 1.0).abs() > UNIT_TOL
                || (q.norm() - 1.0).abs() > UNIT_TOL
                || p.dot(&q).abs() > UNIT_TOL
                || !eta.get(i, j).is_finite();
            if bad {
                return Err(GeomError::InvalidSurface(format!(
                    "G1/G2 not an orthonormal pair at ({i},{j})"
                )));
            }
        }
        // Polish to orthonormal to rounding.
        let g1 = g1.map(|p| p / p.norm());
        let g2 = g2.zip_map(&g1, |q, p| {
            let r = q - p * p.dot(&q);
            r / r.norm()
        });
        Ok(S3Surface { grid, mu, g1, g2, eta })
    }

    pub fn calculus(&self, order: Order) -> Result<Calculus> {
        Calculus::new(self.grid, order, self.mu)
    }

    /// Largest deviation from `|G1| = |G2| = 1`, `(G1, G2) = 0`.
    pub fn pair_defect(&self) -> f64 {
        self.grid
            .core()
            .map(|(i, j)| {
                let (p, q) = (self.g1.get(i, j), self.g2.get(i, j));
                (p.norm() - 1.0).abs().max((q.norm() - 1.0).abs()).max(p.dot(&q).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Residuals of the S^3 minimal-surface system in adapted real directions
/// `u, v`, plus the compatibility relations for the normal.
#[derive(Clone, Debug, Serialize)]
pub struct S3Residual {
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
    /// `G2_u + e^-eta G1_u`.
    pub normal_u: f64,
    /// `G2_v - e^-eta G1_v`.
    pub normal_v: f64,
    /// `|G1_u|^2 = |G1_v|^2 = e^eta`, `(G1_u, G1_v) = 0`.
    pub metric: f64,
    /// `(II(d,d), II(d,d)) = 1/4`.
    pub quartic: f64,
    pub unit: f64,
}

impl S3Residual {
    pub fn system_max(&self) -> f64 {
        self.uu.max(self.uv).max(self.vv)
    }

    pub fn max(&self) -> f64 {
        [self.uu, self.uv, self.vv, self.normal_u, self.normal_v, self.metric, self.quartic]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn check_s3_minimal(s: &S3Surface, cal: &Calculus) -> S3Residual {
    let g1u = cal.du(&s.g1);
    let g1v = cal.dv(&s.g1);
    let g2u = cal.du(&s.g2);
    let g2v = cal.dv(&s.g2);
    let (uu, uv, vv) = cal.second_uv(&s.g1);
    let eu = cal.du(&s.eta);
    let ev = cal.dv(&s.eta);
    let mut r = S3Residual {
        uu: 0.0,
        uv: 0.0,
        vv: 0.0,
        normal_u: 0.0,
        normal_v: 0.0,
        metric: 0.0,
        quartic: 0.0,
        unit: s.pair_defect(),
    };
    for (i, j) in s.grid.core() {
        let (g1, g2) = (s.g1.get(i, j), s.g2.get(i, j));
        let (pu, pv) = (g1u.get(i, j), g1v.get(i, j));
        let (a, b) = (eu.get(i, j), ev.get(i, j));
        let e = s.eta.get(i, j).exp();
        let em = 1.0 / e;
        r.uu = r.uu.max((uu.get(i, j) - pu * (0.5 * a) + pv * (0.5 * b) - g2 + g1 * e).norm());
        r.uv = r.uv.max((uv.get(i, j) - pu * (0.5 * b) - pv * (0.5 * a)).norm());
        r.vv = r.vv.max((vv.get(i, j) + pu * (0.5 * a) - pv * (0.5 * b) + g2 + g1 * e).norm());
        r.normal_u = r.normal_u.max((g2u.get(i, j) + pu * em).norm());
        r.normal_v = r.normal_v.max((g2v.get(i, j) - pv * em).norm());
        let m = (pu.norm_squared() - e).abs().max((pv.norm_squared() - e).abs()).max(pu.dot(&pv).abs());
        r.metric = r.metric.max(m / e.max(1.0));
        // II(d,d) = (G1_dd, G2) with d = (d_u - i d_v)/2.
        let h = Complex64::new(uu.get(i, j).dot(&g2) - vv.get(i, j).dot(&g2), -2.0 * uv.get(i, j).dot(&g2)) / 4.0;
        r.quartic = r.quartic.max((h * h - 0.25).norm());
    }
    r
}

/// Lawson's bipolar surface: `G1 ∧ G2` in the lexicographic basis of Λ²R⁴.
pub fn bipolar(s: &S3Surface) -> Result<SampledSurface> {
    let vals = s.g1.zip_map(&s.g2, |p, q| wedge(&p, &q).0);
    SampledSurface::new(s.grid, s.mu, vals)
}

/// Sign of `det(G1, G2, G1_u, G1_v)`, which orients R^4 for the complex
/// cross-check of the bipolar formula.
pub fn frame_orientation(s: &S3Surface, cal: &Calculus) -> f64 {
    let g1u = cal.du(&s.g1);
    let g1v = cal.dv(&s.g1);
    let total: f64 = s
        .grid
        .core()
        .map(|(i, j)| {
            Matrix4::from_columns(&[s.g1.get(i, j), s.g2.get(i, j), g1u.get(i, j), g1v.get(i, j)]).determinant()
        })
        .sum();
    if total >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Comparison of the complex bipolar formula
/// `(1/sqrt2)(i e^-eta G1_u ∧ G1_v - G1 ∧ G2)` with the inclusion
/// `(1/sqrt2)(w - i *w)` of `w = G1 ∧ G2`, up to one global phase.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexFormCheck {
    /// Orientation used for the star (+1: e0∧e1∧e2∧e3 positive).
    pub orientation: f64,
    pub phase_re: f64,
    pub phase_im: f64,
    /// `| |phase| - 1 |`.
    pub phase_modulus_defect: f64,
    /// Max pointwise `|formula - phase * inclusion|`.
    pub residual: f64,
}

/// Best single phase `c` with `target ≈ c * model`, and the residual.
pub fn fit_phase(target: &[ComplexVec6], model: &[ComplexVec6]) -> (Complex64, f64) {
    let num: Complex64 = model.iter().zip(target).map(|(m, t)| m.dotc(t)).sum();
    let den: f64 = model.iter().map(|m| m.norm_squared()).sum();
    let c = num / den;
    let res = model.iter().zip(target).map(|(m, t)| (t - m * c).norm()).fold(0.0, f64::max);
    (c, res)
}

pub fn complex_form_check(s: &S3Surface, cal: &Calculus, orientation: f64) -> ComplexFormCheck {
    let g1u = cal.du(&s.g1);
    let g1v = cal.dv(&s.g1);
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let mut target = Vec::new();
    let mut model = Vec::new();
    for (i, j) in s.grid.core() {
        let (g1, g2) = (s.g1.get(i, j), s.g2.get(i, j));
        let t = wedge_c(&complexify4(&g1u.get(i, j)), &complexify4(&g1v.get(i, j)))
            * (I * (-s.eta.get(i, j)).exp())
            - wedge_c(&complexify4(&g1), &complexify4(&g2));
        target.push(t * Complex64::new(k, 0.0));
        model.push(include_complex_oriented(&wedge(&g1, &g2), orientation));
    }
    let (c, residual) = fit_phase(&target, &model);
    ComplexFormCheck {
        orientation,
        phase_re: c.re,
        phase_im: c.im,
        phase_modulus_defect: (c.norm() - 1.0).abs(),
        residual,
    }
}

/// Outcome of the three-way equivalence check for bipolar surfaces.
#[derive(Clone, Debug, Serialize)]
pub struct BipolarEquivalenceReport {
    /// `max |gamma+|`.
    pub gamma_plus_max: f64,
    pub gamma_tolerance: f64,
    pub gamma_vanishes: bool,
    /// Constant reflection with `f+ = A f`.
    pub reflection: Option<ReflectionReport>,
    pub reflection_found: bool,
    /// Whether the surface is a bipolar, known only when it was built as one.
    pub bipolar_by_construction: Option<bool>,
    /// `max |omega - omega+|`.
    pub omega_gap: f64,
    /// Vanishing `gamma+` and the reflection agree.
    pub consistent: bool,
}

pub fn verify_bipolar_equivalence(
    f: &SampledSurface,
    cal: &Calculus,
    bipolar_by_construction: Option<bool>,
    gamma_tolerance: f64,
    fit_tolerance: f64,
) -> Result<BipolarEquivalenceReport> {
    let fr = build_frame(f, cal)?;
    let plus = transform(&fr, 1)?;
    let fr_plus: FrameField = build_frame(&plus, cal)?;
    let g = gamma(&fr, &fr_plus, cal);
    let gamma_plus_max = cal.max_core(&g, |z| z.norm());
    let gamma_vanishes = gamma_plus_max <= gamma_tolerance;
    let refl = detect_gamma_reflection(&fr, &fr_plus, cal, gamma_tolerance);
    let reflection_found = refl.as_ref().map(|r| r.fit_residual <= fit_tolerance).unwrap_or(false);
    let omega_gap = fr
        .grid
        .core()
        .map(|(i, j)| (fr.omega.get(i, j) - fr_plus.omega.get(i, j)).abs())
        .fold(0.0, f64::max);
    Ok(BipolarEquivalenceReport {
        gamma_plus_max,
        gamma_tolerance,
        gamma_vanishes,
        reflection: refl,
        reflection_found,
        bipolar_by_construction,
        omega_gap,
        consistent: gamma_vanishes == reflection_found,
    })
}

/// File form: `{"G1": surface, "G2": surface, "eta": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct S3File {
    #[serde(rename = "G1")]
    pub g1: SurfaceFile,
    #[serde(rename = "G2")]
    pub g2: SurfaceFile,
    pub eta: Vec<f64>,
}

impl From<&S3Surface> for S3File {
    fn from(s: &S3Surface) -> Self {
        let rows = |f: &Field<RealVec4>| f.iter().map(|v| v.iter().copied().collect()).collect();
        S3File {
            g1: SurfaceFile::from_rows(&s.grid, s.mu, 4, rows(&s.g1)),
            g2: SurfaceFile::from_rows(&s.grid, s.mu, 4, rows(&s.g2)),
            eta: s.eta.as_slice().to_vec(),
        }
    }
}

impl TryFrom<&S3File> for S3Surface {
    type Error = GeomError;
    fn try_from(f: &S3File) -> Result<Self> {
        let grid = f.g1.checked_grid(4)?;
        let grid2 = f.g2.checked_grid(4)?;
        if !grid.same_shape(&grid2) {
            return Err(GeomError::ShapeMismatch { expected: (grid.nx, grid.ny), got: (grid2.nx, grid2.ny) });
        }
        let field = |sf: &SurfaceFile| -> Result<Field<RealVec4>> {
            Field::from_vec(grid.nx, grid.ny, sf.values.iter().map(|r| RealVec4::from_column_slice(r)).collect())
        };
        S3Surface::new(grid, f.g1.mu(), field(&f.g1)?, field(&f.g2)?, Field::from_vec(grid.nx, grid.ny, f.eta.clone())?)
    }
}

impl S3Surface {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&S3File::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: S3File = serde_json::from_str(s)?;
        S3Surface::try_from(&f)
    }
}

/// Clifford-torus bipolar image in closed form, `(0, cu cv, cu sv, su cv, su sv, 0)`.
pub fn clifford_bipolar_closed_form(u: f64, v: f64) -> RealVec6 {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    RealVec6::new(0.0, cu * cv, cu * sv, su * cv, su * sv, 0.0)
}
