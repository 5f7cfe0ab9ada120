//! Compatibility residuals for the invariant systems, the sinh-Gordon
//! reduction, and moving-frame integrators that rebuild surfaces from their
//! invariants.

use nalgebra::{ComplexField, Matrix4, Matrix6, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{c, cbilinear, re6, ComplexVec6, RealVec4, RealVec6, I};
use crate::bipolar::S3Surface;
use crate::calculus::Calculus;
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::frames::{gram_model, FrameField};
use crate::grid::Grid2;
use crate::surface::SampledSurface;
use crate::tolerances::GRAM_DRIFT_MAX;
use crate::transforms::{gamma, polar};

/// The invariants `(omega, phi, alpha)` that fix a surface up to congruence.
#[derive(Clone, Debug)]
pub struct InvariantTriple {
    pub grid: Grid2,
    pub mu: Complex64,
    pub omega: Field<f64>,
    pub phi: Field<f64>,
    pub alpha: Field<Complex64>,
}

impl InvariantTriple {
    pub fn new(grid: Grid2, mu: Complex64, omega: Field<f64>, phi: Field<f64>, alpha: Field<Complex64>) -> Result<Self> {
        let shape = (grid.nx, grid.ny);
        for got in [omega.shape(), phi.shape(), alpha.shape()] {
            if got != shape {
                return Err(GeomError::ShapeMismatch { expected: shape, got });
            }
        }
        if let Some(k) = phi.iter().position(|&p| !(p > 0.0)) {
            return Err(GeomError::InvalidSurface(format!(
                "phi must be positive, found {} at sample {k}",
                phi.as_slice()[k]
            )));
        }
        Ok(InvariantTriple { grid, mu, omega, phi, alpha })
    }

    pub fn from_frame(fr: &FrameField) -> Self {
        InvariantTriple {
            grid: fr.grid,
            mu: fr.mu,
            omega: fr.omega.clone(),
            phi: fr.phi.clone(),
            alpha: fr.alpha.clone(),
        }
    }
}

/// Pointwise maxima of the three equations satisfied by `(omega, phi, alpha)`.
#[derive(Clone, Debug, Serialize)]
pub struct SystemFResidual {
    /// `d-bar alpha + 2 conj(alpha) d phi csch 2phi`.
    pub alpha_eq: f64,
    /// `d-bar d omega + e^omega - e^-omega cosh 2phi`.
    pub omega_eq: f64,
    /// `2 d-bar d phi - |alpha|^2 csch 2phi + e^-omega sinh 2phi`.
    pub phi_eq: f64,
}

impl SystemFResidual {
    pub fn max(&self) -> f64 {
        self.alpha_eq.max(self.omega_eq).max(self.phi_eq)
    }
}

#[allow(non_snake_case)]
pub fn residual_system_F(t: &InvariantTriple, cal: &Calculus) -> SystemFResidual {
    let dbar_alpha = cal.dbar(&t.alpha);
    let d_phi = cal.d(&t.phi.to_complex());
    let lap_omega = cal.ddbar(&t.omega);
    let lap_phi = cal.ddbar(&t.phi);
    let mut r = SystemFResidual { alpha_eq: 0.0, omega_eq: 0.0, phi_eq: 0.0 };
    for (i, j) in t.grid.core() {
        let (om, ph, al) = (t.omega.get(i, j), t.phi.get(i, j), t.alpha.get(i, j));
        let (s2, c2) = ((2.0 * ph).sinh(), (2.0 * ph).cosh());
        let e1 = dbar_alpha.get(i, j) + 2.0 * al.conj() * d_phi.get(i, j) / s2;
        let e2 = lap_omega.get(i, j) + om.exp() - (-om).exp() * c2;
        let e3 = 2.0 * lap_phi.get(i, j) - al.norm_sqr() / s2 + (-om).exp() * s2;
        r.alpha_eq = r.alpha_eq.max(e1.norm());
        r.omega_eq = r.omega_eq.max(e2.abs());
        r.phi_eq = r.phi_eq.max(e3.abs());
    }
    r
}

/// Invariants `(omega, omega^e, gamma^e)` of a surface paired with one of its
/// transforms.
#[derive(Clone, Debug)]
pub struct SymmetricInvariants {
    pub grid: Grid2,
    pub mu: Complex64,
    pub omega: Field<f64>,
    pub omega_eps: Field<f64>,
    pub gamma_eps: Field<Complex64>,
}

impl SymmetricInvariants {
    pub fn from_frames(fr: &FrameField, fe: &FrameField, cal: &Calculus) -> Self {
        SymmetricInvariants {
            grid: fr.grid,
            mu: fr.mu,
            omega: fr.omega.clone(),
            omega_eps: fe.omega.clone(),
            gamma_eps: gamma(fr, fe, cal),
        }
    }

    /// `(omega, omega, 0)`: the data of a bipolar surface.
    pub fn diagonal(grid: Grid2, mu: Complex64, omega: Field<f64>) -> Self {
        let n = (grid.nx, grid.ny);
        SymmetricInvariants { grid, mu, omega_eps: omega.clone(), omega, gamma_eps: Field::zeros(n.0, n.1) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemBResidual {
    /// `d-bar gamma - i (e^omega - e^omega^e)`.
    pub gamma_eq: f64,
    /// `dd-bar omega + 2 sinh omega - |gamma + i d omega|^2 / (e^{omega+omega^e} - 1)`.
    pub omega_eq: f64,
    /// `dd-bar omega^e + 2 sinh omega^e - |gamma - i d omega^e|^2 / (e^{omega+omega^e} - 1)`.
    pub omega_eps_eq: f64,
}

impl SystemBResidual {
    pub fn max(&self) -> f64 {
        self.gamma_eq.max(self.omega_eq).max(self.omega_eps_eq)
    }
}

#[allow(non_snake_case)]
pub fn residual_system_B(s: &SymmetricInvariants, cal: &Calculus) -> Result<SystemBResidual> {
    for (i, j) in s.grid.core() {
        let v = s.omega.get(i, j) + s.omega_eps.get(i, j);
        if v <= 0.0 {
            return Err(GeomError::PositivityViolation { i, j, value: v });
        }
    }
    let dbar_g = cal.dbar(&s.gamma_eps);
    let d_om = cal.d(&s.omega.to_complex());
    let d_ome = cal.d(&s.omega_eps.to_complex());
    let lap = cal.ddbar(&s.omega);
    let lap_e = cal.ddbar(&s.omega_eps);
    let mut r = SystemBResidual { gamma_eq: 0.0, omega_eq: 0.0, omega_eps_eq: 0.0 };
    for (i, j) in s.grid.core() {
        let (om, ome, g) = (s.omega.get(i, j), s.omega_eps.get(i, j), s.gamma_eps.get(i, j));
        let den = (om + ome).exp() - 1.0;
        let e1 = dbar_g.get(i, j) - I * (om.exp() - ome.exp());
        let e2 = lap.get(i, j) + 2.0 * om.sinh() - (g + I * d_om.get(i, j)).norm_sqr() / den;
        let e3 = lap_e.get(i, j) + 2.0 * ome.sinh() - (g - I * d_ome.get(i, j)).norm_sqr() / den;
        r.gamma_eq = r.gamma_eq.max(e1.norm());
        r.omega_eq = r.omega_eq.max(e2.abs());
        r.omega_eps_eq = r.omega_eps_eq.max(e3.abs());
    }
    Ok(r)
}

/// `max |dd-bar eta + sinh eta|` over the core.
pub fn residual_sinh_gordon(eta: &Field<f64>, cal: &Calculus) -> f64 {
    let lap = cal.ddbar(eta);
    cal.grid()
        .core()
        .map(|(i, j)| (lap.get(i, j) + eta.get(i, j).sinh()).abs())
        .fold(0.0, f64::max)
}

/// `eta = acosh(e^omega)` on the `eta >= 0` branch. Values of `e^omega` in
/// `[1 - tol, 1)` are treated as 1.
pub fn substitute(omega: &Field<f64>, grid: &Grid2, tol: f64) -> Result<Field<f64>> {
    for (i, j) in grid.core() {
        let e = omega.get(i, j).exp();
        if e < 1.0 - tol {
            return Err(GeomError::SubstitutionDomain { i, j, value: e });
        }
    }
    Ok(omega.map(|w| w.exp().max(1.0).acosh()))
}

/// `omega = log cosh eta`.
pub fn unsubstitute(eta: &Field<f64>) -> Field<f64> {
    eta.map(|e| e.cosh().ln())
}

/// One-dimensional sinh-Gordon profile `eta(x)`, constant in `y`.
#[derive(Clone, Debug)]
pub struct PendulumProfile {
    pub grid: Grid2,
    pub eta: Field<f64>,
    pub energy: f64,
    pub period: f64,
    /// Max `|E(x) - E|` along the sampled orbit.
    pub energy_drift: f64,
}

fn pendulum_step(state: (f64, f64), h: f64) -> (f64, f64) {
    let f = |(e, p): (f64, f64)| (p, -4.0 * e.sinh());
    let k1 = f(state);
    let k2 = f((state.0 + 0.5 * h * k1.0, state.1 + 0.5 * h * k1.1));
    let k3 = f((state.0 + 0.5 * h * k2.0, state.1 + 0.5 * h * k2.1));
    let k4 = f((state.0 + h * k3.0, state.1 + h * k3.1));
    (
        state.0 + h * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) / 6.0,
        state.1 + h * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) / 6.0,
    )
}

fn pendulum_energy((e, p): (f64, f64)) -> f64 {
    0.5 * p * p + 4.0 * e.cosh()
}

/// Period of `eta'' = -4 sinh eta` at energy `E`, located by stepping to the
/// second upward zero crossing and refining with the secant rule.
pub fn pendulum_period(energy: f64) -> Result<f64> {
    if !(energy > 4.0) {
        return Err(GeomError::InvalidSurface(format!("pendulum energy must exceed 4, got {energy}")));
    }
    let p0 = (2.0 * (energy - 4.0)).sqrt();
    let h = 1e-4;
    let mut s = (0.0, p0);
    let mut t = 0.0;
    let mut went_negative = false;
    loop {
        let next = pendulum_step(s, h);
        if next.0 < 0.0 {
            went_negative = true;
        }
        if went_negative && s.0 < 0.0 && next.0 >= 0.0 {
            // Root of eta on [t, t+h]: Newton in the step length.
            let mut dt = -s.0 / s.1;
            for _ in 0..20 {
                let q = pendulum_step(s, dt);
                let corr = q.0 / q.1;
                dt -= corr;
                if corr.abs() < 1e-15 {
                    break;
                }
            }
            return Ok(t + dt);
        }
        s = next;
        t += h;
        if t > 1e4 {
            return Err(GeomError::InvalidSurface("pendulum orbit did not close".into()));
        }
    }
}

/// Samples one period of the pendulum orbit on an `n x n` grid, periodic in
/// `x` and open in `y` (with an `n/8` margin), side length one period.
pub fn pendulum(energy: f64, n: usize) -> Result<PendulumProfile> {
    let period = pendulum_period(energy)?;
    let grid = Grid2::new(n, n, period, period, true, false)?.with_margin(n / 8);
    let sub = 64;
    let h = grid.hx() / sub as f64;
    let mut s = (0.0, (2.0 * (energy - 4.0)).sqrt());
    let mut eta_x = Vec::with_capacity(n);
    let mut drift = 0.0_f64;
    for _ in 0..n {
        eta_x.push(s.0);
        drift = drift.max((pendulum_energy(s) - energy).abs());
        for _ in 0..sub {
            s = pendulum_step(s, h);
        }
    }
    drift = drift.max((pendulum_energy(s) - energy).abs());
    let eta = Field::from_fn(n, n, |i, _| eta_x[i]);
    Ok(PendulumProfile { grid, eta, energy, period, energy_drift: drift })
}

/// Midpoint value of a sampled coefficient between `k` and `k+1` by cubic
/// interpolation, one-sided at the ends of an open line.
fn cubic_mid<T: ComplexField + Copy, const R: usize, const C: usize>(
    m: &[SMatrix<T, R, C>],
    k: usize,
    periodic: bool,
) -> SMatrix<T, R, C> {
    let n = m.len();
    let w = |a: f64, b: f64, c: f64, d: f64, i: [usize; 4]| {
        (m[i[0]] * T::from_real(nalgebra::convert(a))
            + m[i[1]] * T::from_real(nalgebra::convert(b))
            + m[i[2]] * T::from_real(nalgebra::convert(c))
            + m[i[3]] * T::from_real(nalgebra::convert(d)))
            * T::from_real(nalgebra::convert(1.0 / 16.0))
    };
    if periodic {
        let at = |o: isize| (k as isize + o).rem_euclid(n as isize) as usize;
        return w(-1.0, 9.0, 9.0, -1.0, [at(-1), at(0), at(1), at(2)]);
    }
    if k == 0 {
        w(5.0, 15.0, -5.0, 1.0, [0, 1, 2, 3])
    } else if k + 2 >= n {
        w(1.0, -5.0, 15.0, 5.0, [n - 4, n - 3, n - 2, n - 1])
    } else {
        w(-1.0, 9.0, 9.0, -1.0, [k - 1, k, k + 1, k + 2])
    }
}

/// Classical RK4 for `X' = X G(s)` on a line of samples with spacing `h`.
/// `post` may renormalize the state after each step (argument: step count).
fn rk4_line<T, const R: usize, const D: usize>(
    x0: SMatrix<T, R, D>,
    gens: &[SMatrix<T, D, D>],
    h: f64,
    periodic: bool,
    steps: usize,
    post: &mut dyn FnMut(usize, usize, &mut SMatrix<T, R, D>) -> Result<()>,
) -> Result<Vec<SMatrix<T, R, D>>>
where
    T: ComplexField + Copy,
{
    let n = gens.len();
    let ht = T::from_real(nalgebra::convert(h));
    let half = T::from_real(nalgebra::convert(0.5));
    let two = T::from_real(nalgebra::convert(2.0));
    let sixth = T::from_real(nalgebra::convert(1.0 / 6.0));
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    out.push(x);
    for k in 0..steps {
        let g0 = gens[k % n];
        let g1 = gens[(k + 1) % n];
        let gm = cubic_mid(gens, k % n, periodic);
        let k1 = x * g0;
        let k2 = (x + k1 * (ht * half)) * gm;
        let k3 = (x + k2 * (ht * half)) * gm;
        let k4 = (x + k3 * ht) * g1;
        x += (k1 + k2 * two + k3 * two + k4) * (ht * sixth);
        post(k + 1, (k + 1) % n, &mut x)?;
        out.push(x);
    }
    Ok(out)
}

/// Integrates along a line from index `start`: forward to the end and
/// backward to 0 on an open line, or once around (returning `n + 1` states,
/// the last being the holonomy image of the start) on a periodic line.
fn integrate_line<T, const R: usize, const D: usize>(
    x0: SMatrix<T, R, D>,
    gens: &[SMatrix<T, D, D>],
    start: usize,
    h: f64,
    periodic: bool,
    post: &mut dyn FnMut(usize, usize, &mut SMatrix<T, R, D>) -> Result<()>,
) -> Result<Vec<SMatrix<T, R, D>>>
where
    T: ComplexField + Copy,
{
    let n = gens.len();
    if periodic {
        let rotated: Vec<_> = (0..n).map(|k| gens[(start + k) % n]).collect();
        let mut wrapped = |s: usize, idx: usize, x: &mut SMatrix<T, R, D>| post(s, (idx + start) % n, x);
        let line = rk4_line(x0, &rotated, h, true, n, &mut wrapped)?;
        let mut out = vec![x0; n + 1];
        for (k, v) in line.into_iter().enumerate() {
            if k < n {
                out[(start + k) % n] = v;
            } else {
                out[n] = v;
            }
        }
        return Ok(out);
    }
    let mut out = vec![x0; n];
    let fwd: Vec<_> = gens[start..].to_vec();
    if fwd.len() > 1 {
        let mut wrapped = |s: usize, idx: usize, x: &mut SMatrix<T, R, D>| post(s, idx + start, x);
        for (k, v) in rk4_line(x0, &fwd, h, false, fwd.len() - 1, &mut wrapped)?.into_iter().enumerate() {
            out[start + k] = v;
        }
    }
    let back: Vec<_> = gens[..=start].iter().rev().copied().collect();
    if back.len() > 1 {
        let mut wrapped = |s: usize, idx: usize, x: &mut SMatrix<T, R, D>| post(s, start - idx, x);
        for (k, v) in rk4_line(x0, &back, -h, false, back.len() - 1, &mut wrapped)?.into_iter().enumerate() {
            out[start - k] = v;
        }
    }
    Ok(out)
}

/// Steps between full re-projections of an integrated frame.
pub const REPROJECT_EVERY: usize = 16;

/// Output of [`integrate_frame_F`].
#[derive(Clone, Debug)]
pub struct FrameIntegration {
    pub surface: SampledSurface,
    /// Max entry of `F(end) - F(start)` after a full period along each
    /// periodic direction (0 when there is none).
    pub holonomy: f64,
    /// Max Gram residual seen before any re-projection.
    pub max_gram_drift: f64,
}

/// Generator `P` with `d F = F P` in the frame `F = (f0, f1, conj f1, f2, conj f2, N)`.
pub fn frame_generator(omega: f64, phi: f64, alpha: Complex64, d_omega: Complex64, d_phi: Complex64) -> Matrix6<Complex64> {
    let mut p = Matrix6::from_element(c(0.0, 0.0));
    let (s2, c2) = ((2.0 * phi).sinh(), (2.0 * phi).cosh());
    let em = (-omega).exp();
    p[(1, 0)] = c(1.0, 0.0);
    p[(3, 1)] = c(1.0, 0.0);
    p[(1, 1)] = d_omega;
    p[(0, 2)] = c(-omega.exp(), 0.0);
    p[(2, 3)] = c(em, 0.0);
    p[(3, 3)] = d_phi * (2.0 * c2 / s2);
    p[(4, 3)] = d_phi * (2.0 / s2);
    p[(5, 3)] = alpha;
    p[(2, 4)] = c(-em * c2, 0.0);
    p[(3, 5)] = -alpha / (s2 * s2);
    p[(4, 5)] = -alpha * c2 / (s2 * s2);
    p
}

/// `Q` with `d-bar F = F Q`: conjugate of `P` with the conjugate pairs swapped.
pub fn frame_generator_bar(p: &Matrix6<Complex64>) -> Matrix6<Complex64> {
    let perm = [0usize, 2, 1, 4, 3, 5];
    Matrix6::from_fn(|r, s| p[(perm[r], perm[s])].conj())
}

/// Standard seed: `f0 = e0`, `f1 = sqrt(e^omega/2)(e1 - i e2)`,
/// `f2 = sinh(phi) e3 - i cosh(phi) e4`, `N = e5`.
pub fn standard_seed(omega: f64, phi: f64) -> Matrix6<Complex64> {
    let s = (omega.exp() / 2.0).sqrt();
    let mut f = Matrix6::from_element(c(0.0, 0.0));
    f[(0, 0)] = c(1.0, 0.0);
    f[(1, 1)] = c(s, 0.0);
    f[(2, 1)] = c(0.0, -s);
    f[(1, 2)] = c(s, 0.0);
    f[(2, 2)] = c(0.0, s);
    f[(3, 3)] = c(phi.sinh(), 0.0);
    f[(4, 3)] = c(0.0, -phi.cosh());
    f[(3, 4)] = c(phi.sinh(), 0.0);
    f[(4, 4)] = c(0.0, phi.cosh());
    f[(5, 5)] = c(1.0, 0.0);
    f
}

fn frame_gram_residual(f: &Matrix6<Complex64>, omega: f64, phi: f64) -> f64 {
    let cols: Vec<ComplexVec6> = (0..6).map(|k| f.column(k).into_owned()).collect();
    let g = Matrix6::from_fn(|a, b| cbilinear(&cols[a], &cols[b]));
    (g - gram_model(omega, phi)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Polar-projects the real directions of `F` and rebuilds it with the exact
/// lengths for `(omega, phi)`.
fn reproject_frame(f: &mut Matrix6<Complex64>, omega: f64, phi: f64) {
    let col = |k: usize| -> ComplexVec6 { f.column(k).into_owned() };
    let (f1, f2) = (col(1), col(3));
    let dirs = [re6(&col(0)), re6(&f1), f1.map(|z| z.im), re6(&f2), -f2.map(|z| z.im), re6(&col(5))];
    let m = Matrix6::from_fn(|r, s| dirs[s][r] / dirs[s].norm());
    let o = polar(&m);
    let e = |k: usize| -> RealVec6 { o.column(k).into_owned() };
    let s = (omega.exp() / 2.0).sqrt();
    let cx = |v: RealVec6, w: RealVec6| -> ComplexVec6 { v.zip_map(&w, |a, b| c(a, b)) };
    let z = RealVec6::zeros();
    let nf1 = cx(e(1) * s, e(2) * s);
    let nf2 = cx(e(3) * phi.sinh(), -e(4) * phi.cosh());
    let new = [cx(e(0), z), nf1, nf1.map(|q| q.conj()), nf2, nf2.map(|q| q.conj()), cx(e(5), z)];
    for (k, v) in new.iter().enumerate() {
        f.set_column(k, v);
    }
}

fn renormalize_f0(f: &mut Matrix6<Complex64>) {
    let v = re6(&f.column(0).into_owned());
    let n = v.norm();
    let fixed: ComplexVec6 = v.map(|a| c(a / n, 0.0));
    f.set_column(0, &fixed);
}

/// Which direction is integrated first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOrder {
    RowThenColumns,
    ColumnThenRows,
}

/// Rebuilds `f` from `(omega, phi, alpha)` by integrating the frame system
/// from the grid centre, first along a base line and then across.
///
/// `seed` rotates the standard seed frame.
#[allow(non_snake_case)]
pub fn integrate_frame_F(
    t: &InvariantTriple,
    cal: &Calculus,
    seed: Option<&Matrix6<f64>>,
    order: SweepOrder,
) -> Result<FrameIntegration> {
    let g = t.grid;
    let (nx, ny) = (g.nx, g.ny);
    let d_om = cal.d(&t.omega.to_complex());
    let d_ph = cal.d(&t.phi.to_complex());
    let mu = t.mu;
    let (gx, gy): (Field<Matrix6<Complex64>>, Field<Matrix6<Complex64>>) = {
        let p = Field::from_fn(nx, ny, |i, j| {
            frame_generator(t.omega.get(i, j), t.phi.get(i, j), t.alpha.get(i, j), d_om.get(i, j), d_ph.get(i, j))
        });
        let q = p.map(|m| frame_generator_bar(&m));
        (
            p.zip_map(&q, |a, b| a * mu + b * mu.conj()),
            p.zip_map(&q, |a, b| (a * mu - b * mu.conj()) * I),
        )
    };
    let (i0, j0) = (if g.periodic_x { 0 } else { nx / 2 }, if g.periodic_y { 0 } else { ny / 2 });
    let mut start = standard_seed(t.omega.get(i0, j0), t.phi.get(i0, j0));
    if let Some(r) = seed {
        start = r.map(|a| c(a, 0.0)) * start;
    }
    let mut max_drift = 0.0_f64;
    let mut post = |step: usize, i: usize, j: usize, f: &mut Matrix6<Complex64>| -> Result<()> {
        renormalize_f0(f);
        if step % REPROJECT_EVERY == 0 {
            let (om, ph) = (t.omega.get(i, j), t.phi.get(i, j));
            let r = frame_gram_residual(f, om, ph);
            max_drift = max_drift.max(r);
            if r > GRAM_DRIFT_MAX {
                return Err(GeomError::GramDrift { step, residual: r });
            }
            reproject_frame(f, om, ph);
        }
        Ok(())
    };
    let mut frames = Field::filled(nx, ny, start);
    let mut holonomy = 0.0_f64;
    let hol = |line: &[Matrix6<Complex64>], n: usize| (line[n] - line[0]).iter().map(|z| z.norm()).fold(0.0, f64::max);
    match order {
        SweepOrder::RowThenColumns => {
            let row_gens: Vec<_> = (0..nx).map(|i| gx.get(i, j0)).collect();
            let row = integrate_line(start, &row_gens, i0, g.hx(), g.periodic_x, &mut |s, i, f| post(s, i, j0, f))?;
            if g.periodic_x {
                holonomy = holonomy.max(hol(&row, nx));
            }
            for i in 0..nx {
                let col_gens: Vec<_> = (0..ny).map(|j| gy.get(i, j)).collect();
                let col = integrate_line(row[i], &col_gens, j0, g.hy(), g.periodic_y, &mut |s, j, f| post(s, i, j, f))?;
                if g.periodic_y {
                    holonomy = holonomy.max(hol(&col, ny));
                }
                for j in 0..ny {
                    frames.set(i, j, col[j]);
                }
            }
        }
        SweepOrder::ColumnThenRows => {
            let col_gens: Vec<_> = (0..ny).map(|j| gy.get(i0, j)).collect();
            let col = integrate_line(start, &col_gens, j0, g.hy(), g.periodic_y, &mut |s, j, f| post(s, i0, j, f))?;
            if g.periodic_y {
                holonomy = holonomy.max(hol(&col, ny));
            }
            for j in 0..ny {
                let row_gens: Vec<_> = (0..nx).map(|i| gx.get(i, j)).collect();
                let row = integrate_line(col[j], &row_gens, i0, g.hx(), g.periodic_x, &mut |s, i, f| post(s, i, j, f))?;
                if g.periodic_x {
                    holonomy = holonomy.max(hol(&row, nx));
                }
                for i in 0..nx {
                    frames.set(i, j, row[i]);
                }
            }
        }
    }
    let values = frames.map(|f| re6(&f.column(0).into_owned()));
    Ok(FrameIntegration { surface: SampledSurface::normalized(g, mu, values)?, holonomy, max_gram_drift: max_drift })
}

/// Optimal `R in O(6)` aligning `moved` to `target`, and the max distance
/// `|R moved - target|` over the core.
pub fn procrustes(target: &SampledSurface, moved: &SampledSurface) -> (Matrix6<f64>, f64) {
    let mut m = Matrix6::zeros();
    for (i, j) in target.grid.core() {
        m += target.values.get(i, j) * moved.values.get(i, j).transpose();
    }
    let r = polar(&m);
    let d = target
        .grid
        .core()
        .map(|(i, j)| (r * moved.values.get(i, j) - target.values.get(i, j)).norm())
        .fold(0.0, f64::max);
    (r, d)
}

/// Output of [`integrate_s3_frame`].
#[derive(Clone, Debug)]
pub struct S3Integration {
    pub surface: S3Surface,
    pub holonomy: f64,
}

fn s3_generators(eta: f64, eta_u: f64, eta_v: f64) -> (Matrix4<f64>, Matrix4<f64>) {
    // Columns of the state: G1, G2, P = G1_u, Q = G1_v.
    let (e, em) = (eta.exp(), (-eta).exp());
    let mut au = Matrix4::zeros();
    au[(2, 0)] = 1.0;
    au[(2, 1)] = -em;
    au[(0, 2)] = -e;
    au[(1, 2)] = 1.0;
    au[(2, 2)] = 0.5 * eta_u;
    au[(3, 2)] = -0.5 * eta_v;
    au[(2, 3)] = 0.5 * eta_v;
    au[(3, 3)] = 0.5 * eta_u;
    let mut av = Matrix4::zeros();
    av[(3, 0)] = 1.0;
    av[(3, 1)] = em;
    av[(2, 2)] = 0.5 * eta_v;
    av[(3, 2)] = 0.5 * eta_u;
    av[(2, 3)] = -0.5 * eta_u;
    av[(3, 3)] = 0.5 * eta_v;
    av[(0, 3)] = -e;
    av[(1, 3)] = -1.0;
    (au, av)
}

fn s3_residual(x: &Matrix4<f64>, eta: f64) -> f64 {
    let g = x.transpose() * x;
    let e = eta.exp();
    let model = Matrix4::from_diagonal(&RealVec4::new(1.0, 1.0, e, e));
    (g - model).amax()
}

fn s3_reproject(x: &mut Matrix4<f64>, eta: f64) {
    // Scale P, Q to unit length before the polar step.
    let o = {
        let s = (-0.5 * eta).exp();
        let m = Matrix4::from_columns(&[x.column(0).into_owned(), x.column(1).into_owned(), x.column(2) * s, x.column(3) * s]);
        let svd = m.svd(true, true);
        svd.u.unwrap() * svd.v_t.unwrap()
    };
    let s = (0.5 * eta).exp();
    *x = Matrix4::from_columns(&[o.column(0).into_owned(), o.column(1).into_owned(), o.column(2) * s, o.column(3) * s]);
}

/// Integrates `(G1, G2, G1_u, G1_v)` from `eta` through the S^3 system with
/// seed `G1 = (e0+e2)/sqrt2`, `G2 = (e2-e0)/sqrt2`, `G1_u = e^{eta/2} e1`,
/// `G1_v = e^{eta/2} e3` (optionally rotated by `seed`).
pub fn integrate_s3_frame(
    grid: Grid2,
    mu: Complex64,
    eta: &Field<f64>,
    cal: &Calculus,
    seed: Option<&Matrix4<f64>>,
) -> Result<S3Integration> {
    let (nx, ny) = (grid.nx, grid.ny);
    let eu = cal.du(eta);
    let ev = cal.dv(eta);
    let gens = Field::from_fn(nx, ny, |i, j| s3_generators(eta.get(i, j), eu.get(i, j), ev.get(i, j)));
    // d/dx = Re(mu) d_u + Im(mu) d_v, d/dy = -Im(mu) d_u + Re(mu) d_v.
    let gx = gens.map(|(a, b)| a * mu.re + b * mu.im);
    let gy = gens.map(|(a, b)| a * (-mu.im) + b * mu.re);
    let (i0, j0) = (if grid.periodic_x { 0 } else { nx / 2 }, if grid.periodic_y { 0 } else { ny / 2 });
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let s = (0.5 * eta.get(i0, j0)).exp();
    let mut start = Matrix4::from_columns(&[
        RealVec4::new(k, 0.0, k, 0.0),
        RealVec4::new(-k, 0.0, k, 0.0),
        RealVec4::new(0.0, s, 0.0, 0.0),
        RealVec4::new(0.0, 0.0, 0.0, s),
    ]);
    if let Some(r) = seed {
        start = r * start;
    }
    let post = |step: usize, i: usize, j: usize, x: &mut Matrix4<f64>| -> Result<()> {
        let g1 = x.column(0).into_owned();
        x.set_column(0, &(g1 / g1.norm()));
        if step % REPROJECT_EVERY == 0 {
            let r = s3_residual(x, eta.get(i, j));
            if r > GRAM_DRIFT_MAX {
                return Err(GeomError::GramDrift { step, residual: r });
            }
            s3_reproject(x, eta.get(i, j));
        }
        Ok(())
    };
    let row_gens: Vec<_> = (0..nx).map(|i| gx.get(i, j0)).collect();
    let row = integrate_line(start, &row_gens, i0, grid.hx(), grid.periodic_x, &mut |st, i, x| post(st, i, j0, x))?;
    let mut holonomy = if grid.periodic_x { (row[nx] - row[0]).amax() } else { 0.0 };
    let mut states = Field::filled(nx, ny, start);
    for i in 0..nx {
        let col_gens: Vec<_> = (0..ny).map(|j| gy.get(i, j)).collect();
        let col = integrate_line(row[i], &col_gens, j0, grid.hy(), grid.periodic_y, &mut |st, j, x| post(st, i, j, x))?;
        if grid.periodic_y {
            holonomy = holonomy.max((col[ny] - col[0]).amax());
        }
        for j in 0..ny {
            states.set(i, j, col[j]);
        }
    }
    let g1 = states.map(|x| {
        let v: RealVec4 = x.column(0).into_owned();
        v / v.norm()
    });
    let g2 = states.zip_map(&g1, |x, p| {
        let q: RealVec4 = x.column(1).into_owned();
        let r = q - p * p.dot(&q);
        r / r.norm()
    });
    let surface = S3Surface::new(grid, mu, g1, g2, eta.clone())?;
    Ok(S3Integration { surface, holonomy })
}

/// Invariant-field file: grid metadata plus `omega`, `phi`, `alpha_re`,
/// `alpha_im`, or just `eta`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantFile {
    pub grid: Grid2,
    #[serde(default)]
    pub mu_re: Option<f64>,
    #[serde(default)]
    pub mu_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
}

impl From<&InvariantTriple> for InvariantFile {
    fn from(t: &InvariantTriple) -> Self {
        InvariantFile {
            grid: t.grid,
            mu_re: Some(t.mu.re),
            mu_im: Some(t.mu.im),
            omega: Some(t.omega.as_slice().to_vec()),
            phi: Some(t.phi.as_slice().to_vec()),
            alpha_re: Some(t.alpha.iter().map(|z| z.re).collect()),
            alpha_im: Some(t.alpha.iter().map(|z| z.im).collect()),
            eta: None,
        }
    }
}

impl InvariantFile {
    pub fn mu(&self) -> Complex64 {
        Complex64::new(self.mu_re.unwrap_or(1.0), self.mu_im.unwrap_or(0.0))
    }

    pub fn triple(&self) -> Result<InvariantTriple> {
        let g = self.grid;
        g.validate()?;
        let missing = |k: &str| GeomError::InvalidSurface(format!("invariant file lacks '{k}'"));
        let f = |v: &Option<Vec<f64>>, k: &str| -> Result<Field<f64>> {
            Field::from_vec(g.nx, g.ny, v.clone().ok_or_else(|| missing(k))?)
        };
        let are = f(&self.alpha_re, "alpha_re")?;
        let aim = f(&self.alpha_im, "alpha_im")?;
        InvariantTriple::new(g, self.mu(), f(&self.omega, "omega")?, f(&self.phi, "phi")?, are.zip_map(&aim, |a, b| c(a, b)))
    }

    pub fn eta(&self) -> Result<Field<f64>> {
        let v = self.eta.clone().ok_or_else(|| GeomError::InvalidSurface("invariant file lacks 'eta'".into()))?;
        Field::from_vec(self.grid.nx, self.grid.ny, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Order;

    #[test]
    fn flat_constant_solution_satisfies_system() {
        // e^{2 omega} = cosh 2phi and |alpha|^2 = e^-omega sinh^2 2phi.
        let phi = 0.7_f64;
        let omega = 0.5 * (2.0 * phi).cosh().ln();
        let alpha = ((-omega).exp() * (2.0 * phi).sinh().powi(2)).sqrt();
        let g = Grid2::new(24, 24, 1.0, 1.0, false, false).unwrap();
        let t = InvariantTriple::new(
            g,
            c(1.0, 0.0),
            Field::filled(24, 24, omega),
            Field::filled(24, 24, phi),
            Field::filled(24, 24, c(alpha * 0.6, alpha * 0.8)),
        )
        .unwrap();
        let cal = Calculus::new(g, Order::Second, t.mu).unwrap();
        assert!(residual_system_F(&t, &cal).max() < 1e-12);

        // Planted defect in the first equation: alpha += delta * conj(w).
        let delta = 1e-3;
        let mut bad = t.clone();
        bad.alpha = Field::from_fn(24, 24, |i, j| t.alpha.get(i, j) + delta * c(g.x(i), -g.y(j)));
        assert!(residual_system_F(&bad, &cal).alpha_eq >= delta / 2.0);
    }

    #[test]
    fn zero_eta_is_a_sinh_gordon_solution() {
        let g = Grid2::periodic(16, 16, 1.0, 1.0).unwrap();
        let cal = Calculus::new(g, Order::Second, c(1.0, 0.0)).unwrap();
        assert_eq!(residual_sinh_gordon(&Field::filled(16, 16, 0.0), &cal), 0.0);
    }

    #[test]
    fn substitution_domain() {
        let g = Grid2::periodic(4, 4, 1.0, 1.0).unwrap();
        let bad = Field::filled(4, 4, -0.5);
        assert!(matches!(substitute(&bad, &g, 1e-9), Err(GeomError::SubstitutionDomain { .. })));
        let ok = Field::filled(4, 4, 0.3);
        let eta = substitute(&ok, &g, 1e-9).unwrap();
        assert!((unsubstitute(&eta).get(1, 1) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn pendulum_conserves_energy() {
        let p = pendulum(6.0, 64).unwrap();
        assert!(p.energy_drift < 1e-8, "{}", p.energy_drift);
        assert!(p.period > 0.0);
    }

    #[test]
    fn seed_has_model_gram() {
        let (om, ph) = (0.3, 0.8);
        assert!(frame_gram_residual(&standard_seed(om, ph), om, ph) < 1e-14);
    }

    #[test]
    fn bar_generator_conjugates_equations() {
        let p = frame_generator(0.2, 0.5, c(0.3, -0.1), c(0.1, 0.2), c(-0.3, 0.05));
        let q = frame_generator_bar(&p);
        // d-bar f0 = conj f1 (column 0 picks row 2).
        assert_eq!(q[(2, 0)], c(1.0, 0.0));
        assert_eq!(q[(0, 1)], c(-(0.2_f64).exp(), 0.0));
    }
}
