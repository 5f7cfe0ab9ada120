//! The (+) and (-) transforms, their closed-form jets, the symmetric frame
//! `B = {f0, f1, conj f1, conj f1^e, f1^e, f0^e}`, transform sequences and
//! the congruence detectors.

use nalgebra::{Matrix6, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{c, cbilinear, complexify6, conj6, re6, volume6, ComplexVec6, RealVec6, I};
use crate::calculus::Calculus;
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::frames::{build_frame, FrameField};
use crate::surface::SampledSurface;

/// `f^eps = -b / (cosh(phi) |b|) + eps tanh(phi) N`, renormalized.
pub fn transform(fr: &FrameField, eps: i32) -> Result<SampledSurface> {
    let e = eps_sign(eps);
    let vals = Field::from_fn(fr.grid.nx, fr.grid.ny, |i, j| {
        let b = fr.b.get(i, j);
        let cosh_phi = fr.phi.get(i, j).cosh();
        -b / (cosh_phi * b.norm()) + fr.tanh_n.get(i, j) * e
    });
    SampledSurface::normalized(fr.grid, fr.mu, vals)
}

fn eps_sign(eps: i32) -> f64 {
    if eps >= 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form first and second derivative data of a transform.
#[derive(Clone, Debug)]
pub struct EpsilonJet {
    pub eps: i32,
    pub f_eps: SampledSurface,
    pub f1_eps: Field<ComplexVec6>,
    pub omega_eps: Field<f64>,
    pub df1_eps: Field<ComplexVec6>,
    pub f2_eps: Field<ComplexVec6>,
    pub nu: Field<Complex64>,
}

/// Evaluates `f1^e`, `omega^e`, `nu`, `d f1^e` and `f2^e` from the frame
/// of `f` (only `d phi`, `d alpha`, `dd phi` and `d omega^e` are
/// differentiated numerically).
pub fn epsilon_jet(fr: &FrameField, eps: i32, cal: &Calculus) -> Result<EpsilonJet> {
    let e = eps_sign(eps);
    let f_eps = transform(fr, eps)?;
    let phi_c = fr.phi.to_complex();
    let d_phi = cal.d(&phi_c);
    let dd_phi = cal.dd(&phi_c);
    let d_alpha = cal.d(&fr.alpha);
    let d_omega = cal.d(&fr.omega.to_complex());
    let (nx, ny) = (fr.grid.nx, fr.grid.ny);

    let mut f1e = Field::zeros(nx, ny);
    let mut om_e = Field::zeros(nx, ny);
    let mut nu = Field::zeros(nx, ny);
    let mut df1e = Field::zeros(nx, ny);
    for i in 0..nx {
        for j in 0..ny {
            let [f0, _f1, f1b, f2, f2b, n] = fr.columns(i, j);
            let om = fr.omega.get(i, j);
            let ph = fr.phi.get(i, j);
            let al = fr.alpha.get(i, j);
            let dp = d_phi.get(i, j);
            let (s2, c2) = ((2.0 * ph).sinh(), (2.0 * ph).cosh());
            let sech2 = 1.0 / ph.cosh().powi(2);
            let k = al * e + 2.0 * I * dp;
            let v1 = f1b * (-I * (-om).exp())
                - (f2 * c(1.0 / s2, 0.0) + f2b * c(c2 / s2, 0.0) + n * (I * e)) * (0.5 * k * sech2);
            f1e.set(i, j, v1);
            om_e.set(i, j, ((-om).exp() + 0.5 * k.norm_sqr() * sech2).ln());
            let nv = 2.0 * al * e * dp * (c2 - 2.0) + 8.0 * I * ph.sinh().powi(2) * dp * dp
                - e * d_alpha.get(i, j) * s2
                + I * al * al
                - 2.0 * I * s2 * dd_phi.get(i, j);
            nu.set(i, j, nv);
            let sh2 = ph.sinh().powi(2);
            let th = ph.tanh();
            let dv = f0 * I
                + f1b * ((-om).exp() * (I * d_omega.get(i, j) + th * k))
                + f2 * (2.0 * nv * sh2 / s2.powi(4))
                + f2b * (0.5 * nv * (c2 / s2) / s2 * sech2)
                + n * (I * e * nv * th / (s2 * s2));
            df1e.set(i, j, dv);
        }
    }
    let d_om_e = cal.d(&om_e.to_complex());
    let f2e = Field::from_fn(nx, ny, |i, j| df1e.get(i, j) - f1e.get(i, j) * d_om_e.get(i, j));
    Ok(EpsilonJet { eps, f_eps, f1_eps: f1e, omega_eps: om_e, df1_eps: df1e, f2_eps: f2e, nu })
}

/// `gamma = (d f1, f1^next)` for consecutive sequence members.
pub fn gamma(fr: &FrameField, next: &FrameField, cal: &Calculus) -> Field<Complex64> {
    let _ = cal;
    fr.df1.zip_map(&next.f1, |a, b| cbilinear(&a, &b))
}

/// Quantities that make one transform a minimal, conformal, adapted surface.
#[derive(Clone, Debug, Serialize)]
pub struct TransformChecks {
    pub eps: i32,
    /// `|(f1^e, f1^e)|` from differentiating the transformed samples.
    pub conformality: f64,
    /// `|(f2^e, f2^e) + 1|`.
    pub adaptedness: f64,
    /// `|dd-bar f^e + |f1^e|^2 f^e|`.
    pub minimality: f64,
    /// `(f^e,f0)`, `(f^e,f1)`, `(f^e,f2) - i`, `(f^e,N) - e tanh(phi)`.
    pub orthogonality: f64,
    /// Closed-form `f1^e` against the differentiated transform.
    pub jet_f1: f64,
    /// `|(d f1^e, d f1^e) + 1|` from the closed form.
    pub jet_df1_isotropy: f64,
    /// Closed-form `omega^e` against `log |d f^e|^2`.
    pub jet_omega: f64,
    /// `|(f2^e, f2^e) + 1|` from the closed form.
    pub jet_f2: f64,
}

pub fn transform_checks(fr: &FrameField, eps: i32, cal: &Calculus) -> Result<(TransformChecks, FrameField)> {
    let jet = epsilon_jet(fr, eps, cal)?;
    let fe = &jet.f_eps;
    let fre = build_frame(fe, cal)?;
    let e = eps_sign(eps);
    let lap = cal.ddbar(&fe.values);
    let mut ch = TransformChecks {
        eps,
        conformality: 0.0,
        adaptedness: 0.0,
        minimality: 0.0,
        orthogonality: 0.0,
        jet_f1: 0.0,
        jet_df1_isotropy: 0.0,
        jet_omega: 0.0,
        jet_f2: 0.0,
    };
    for (i, j) in fr.grid.core() {
        let g1 = fre.f1.get(i, j);
        ch.conformality = ch.conformality.max(cbilinear(&g1, &g1).norm());
        let g2 = fre.f2.get(i, j);
        ch.adaptedness = ch.adaptedness.max((cbilinear(&g2, &g2) + 1.0).norm());
        let v = fe.values.get(i, j);
        ch.minimality = ch.minimality.max((lap.get(i, j) + v * g1.norm_squared()).norm());
        let vc = complexify6(&v);
        let [f0, f1, _, f2, _, n] = fr.columns(i, j);
        let th = fr.phi.get(i, j).tanh();
        let o = cbilinear(&vc, &f0)
            .norm()
            .max(cbilinear(&vc, &f1).norm())
            .max((cbilinear(&vc, &f2) - I).norm())
            .max((cbilinear(&vc, &n) - e * th).norm());
        ch.orthogonality = ch.orthogonality.max(o);
        ch.jet_f1 = ch.jet_f1.max((jet.f1_eps.get(i, j) - g1).norm());
        let d = jet.df1_eps.get(i, j);
        ch.jet_df1_isotropy = ch.jet_df1_isotropy.max((cbilinear(&d, &d) + 1.0).norm());
        ch.jet_omega = ch.jet_omega.max((jet.omega_eps.get(i, j) - fre.omega.get(i, j)).abs());
        let f2e = jet.f2_eps.get(i, j);
        ch.jet_f2 = ch.jet_f2.max((cbilinear(&f2e, &f2e) + 1.0).norm());
    }
    Ok((ch, fre))
}

/// Identities of the symmetric frame `B` for a surface and its transform.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetricFrameReport {
    pub eps: i32,
    /// Entrywise deviation of the measured products from the model `B`.
    pub gram_b: f64,
    /// `|det B - (e^{omega+omega^e} - 1)^2|`.
    pub det_b: f64,
    /// `|vol(B) + eps (e^{omega+omega^e} - 1)|`.
    pub volume: f64,
    /// `min (omega + omega^e)`; positive on every admissible surface.
    pub min_omega_sum: f64,
    /// Deviation in `e^{omega^e} |gamma - i d omega^e|^2 / (e^{omega+omega^e} - 1) = 2 sinh^2 phi^e`.
    pub sinh_phi_eps: f64,
}

/// Model matrix of products in the frame `B`.
pub fn gram_b_model(omega: f64, omega_eps: f64) -> Matrix6<Complex64> {
    let mut m = Matrix6::from_element(c(0.0, 0.0));
    let (e, f) = (omega.exp(), omega_eps.exp());
    m[(0, 0)] = c(1.0, 0.0);
    m[(5, 5)] = c(1.0, 0.0);
    m[(1, 2)] = c(e, 0.0);
    m[(2, 1)] = c(e, 0.0);
    m[(3, 4)] = c(f, 0.0);
    m[(4, 3)] = c(f, 0.0);
    m[(1, 4)] = -I;
    m[(4, 1)] = -I;
    m[(2, 3)] = I;
    m[(3, 2)] = I;
    m
}

pub fn b_columns(fr: &FrameField, fe: &FrameField, i: usize, j: usize) -> [ComplexVec6; 6] {
    let f1 = fr.f1.get(i, j);
    let g1 = fe.f1.get(i, j);
    [fr.f0.get(i, j), f1, conj6(&f1), conj6(&g1), g1, fe.f0.get(i, j)]
}

pub fn symmetric_frame_report(fr: &FrameField, fe: &FrameField, eps: i32, cal: &Calculus) -> SymmetricFrameReport {
    let e = eps_sign(eps);
    let g = gamma(fr, fe, cal);
    let d_om_e = cal.d(&fe.omega.to_complex());
    let mut r = SymmetricFrameReport {
        eps,
        gram_b: 0.0,
        det_b: 0.0,
        volume: 0.0,
        min_omega_sum: f64::INFINITY,
        sinh_phi_eps: 0.0,
    };
    for (i, j) in fr.grid.core() {
        let cols = b_columns(fr, fe, i, j);
        let (om, ome) = (fr.omega.get(i, j), fe.omega.get(i, j));
        let s = (om + ome).exp() - 1.0;
        let gm = Matrix6::from_fn(|a, b| cbilinear(&cols[a], &cols[b]));
        r.gram_b = r.gram_b.max((gm - gram_b_model(om, ome)).iter().map(|z| z.norm()).fold(0.0, f64::max));
        r.det_b = r.det_b.max((gm.determinant() - s * s).norm());
        let vol = volume6([&cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5]]);
        r.volume = r.volume.max((vol + e * s).norm());
        r.min_omega_sum = r.min_omega_sum.min(om + ome);
        let lhs = ome.exp() * (g.get(i, j) - I * d_om_e.get(i, j)).norm_sqr() / s;
        let rhs = 2.0 * fe.phi.get(i, j).sinh().powi(2);
        r.sinh_phi_eps = r.sinh_phi_eps.max((lhs - rhs).abs());
    }
    r
}

/// One member `f^p` of a transform sequence.
#[derive(Clone, Debug)]
pub struct SequenceEntry {
    pub p: i32,
    pub frame: FrameField,
    /// `gamma^{p+1} = (d f1^p, f1^{p+1})`, when the next member exists.
    pub gamma_next: Option<Field<Complex64>>,
    /// `delta^{p-1} = (d f1^p, f1^{p-1})`, when the previous member exists.
    pub delta_prev: Option<Field<Complex64>>,
}

impl SequenceEntry {
    pub fn surface(&self) -> SampledSurface {
        self.frame.surface()
    }
}

/// Builds `f^pmin, ..., f^pmax` with `f^0 = f`, `f^{p+1} = (f^p)^+` and
/// `f^{p-1} = (f^p)^-`. Each member is computed once.
pub fn sequence(f: &SampledSurface, pmin: i32, pmax: i32, cal: &Calculus) -> Result<Vec<SequenceEntry>> {
    if pmin > 0 || pmax < 0 {
        return Err(GeomError::InvalidSurface(format!("sequence range {pmin}..{pmax} must contain 0")));
    }
    let wrap = |index: i32| move |e: GeomError| GeomError::SequenceBreak { index, source: Box::new(e) };
    let f0 = build_frame(f, cal).map_err(wrap(0))?;
    let mut up = vec![f0.clone()];
    for p in 1..=pmax {
        let s = transform(up.last().unwrap(), 1).map_err(wrap(p))?;
        up.push(build_frame(&s, cal).map_err(wrap(p))?);
    }
    let mut down = Vec::new();
    let mut cur = f0;
    for p in (pmin..0).rev() {
        let s = transform(&cur, -1).map_err(wrap(p))?;
        cur = build_frame(&s, cal).map_err(wrap(p))?;
        down.push(cur.clone());
    }
    let frames: Vec<FrameField> = down.into_iter().rev().chain(up).collect();
    let mut out: Vec<SequenceEntry> = frames
        .into_iter()
        .enumerate()
        .map(|(k, frame)| SequenceEntry { p: pmin + k as i32, frame, gamma_next: None, delta_prev: None })
        .collect();
    for k in 0..out.len() {
        if k + 1 < out.len() {
            out[k].gamma_next = Some(gamma(&out[k].frame, &out[k + 1].frame, cal));
        }
        if k > 0 {
            out[k].delta_prev = Some(gamma(&out[k].frame, &out[k - 1].frame, cal));
        }
    }
    Ok(out)
}

/// Max `|delta^p + gamma^{p+1}|` over the sequence, where
/// `delta^p = (d f1^{p+1}, f1^p)`.
pub fn delta_gamma_residual(seq: &[SequenceEntry], cal: &Calculus) -> f64 {
    let mut worst = 0.0_f64;
    for w in seq.windows(2) {
        let g = w[0].gamma_next.as_ref().expect("gamma of non-final entry");
        let d = w[1].delta_prev.as_ref().expect("delta of non-initial entry");
        worst = worst.max(cal.max_core(&(g + d), |z| z.norm()));
    }
    worst
}

/// Round trips `(f^+)^-` and `(f^-)^+` for every member, as max distances.
pub fn round_trips(seq: &[SequenceEntry], cal: &Calculus) -> Result<Vec<(i32, f64, f64)>> {
    let mut out = Vec::new();
    for e in seq {
        let f = e.surface();
        let plus = build_frame(&transform(&e.frame, 1)?, cal)?;
        let minus = build_frame(&transform(&e.frame, -1)?, cal)?;
        let pm = transform(&plus, -1)?.distance(&f);
        let mp = transform(&minus, 1)?.distance(&f);
        out.push((e.p, pm, mp));
    }
    Ok(out)
}

/// A constant linear map recovered from sampled data, in nearest-reflection form.
#[derive(Clone, Debug, Serialize)]
pub struct ReflectionReport {
    /// Row-major entries of the reflection.
    pub matrix: Vec<Vec<f64>>,
    /// Max `|A f^q - f^{q+1}|` (or the pair it was fitted on).
    pub fit_residual: f64,
    /// Max entrywise deviation of the pointwise maps `A(z)` from the fit.
    pub z_dependence: f64,
    /// `||O^2 - I||` for the orthogonal polar factor before projection.
    pub polar_involution_defect: f64,
    /// `||A^2 - I||` after projection onto reflections.
    pub involution_defect: f64,
    pub det: f64,
    /// Dimension of the fixed subspace.
    pub fixed_dim: usize,
}

impl ReflectionReport {
    pub fn matrix6(&self) -> Matrix6<f64> {
        Matrix6::from_fn(|r, s| self.matrix[r][s])
    }
}

fn to_rows(m: &Matrix6<f64>) -> Vec<Vec<f64>> {
    (0..6).map(|r| (0..6).map(|s| m[(r, s)]).collect()).collect()
}

/// Nearest orthogonal matrix (polar factor).
pub fn polar(m: &Matrix6<f64>) -> Matrix6<f64> {
    let svd = m.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Nearest symmetric involution: eigenvalues of the symmetric part rounded to ±1.
pub fn nearest_reflection(o: &Matrix6<f64>) -> Matrix6<f64> {
    let s = (o + o.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let signs = eig.eigenvalues.map(|l| if l >= 0.0 { 1.0 } else { -1.0 });
    &eig.eigenvectors * Matrix6::from_diagonal(&signs) * eig.eigenvectors.transpose()
}

fn frobenius(m: &Matrix6<f64>) -> f64 {
    m.norm()
}

fn reflection_from_fit(xxt: Matrix6<f64>, yxt: Matrix6<f64>) -> Option<(Matrix6<f64>, Matrix6<f64>)> {
    let inv = xxt.try_inverse()?;
    let a = yxt * inv;
    let o = polar(&a);
    Some((a, o))
}

/// Looks for the constant reflection swapping a surface and its successor:
/// `A f0 = g0, A f1 = g1, A conj f1 = conj g1` and the reverse.
///
/// Returns `None` when `max |gamma| > gamma_tol`.
pub fn detect_gamma_reflection(
    fr: &FrameField,
    next: &FrameField,
    cal: &Calculus,
    gamma_tol: f64,
) -> Option<ReflectionReport> {
    let g = gamma(fr, next, cal);
    if cal.max_core(&g, |z| z.norm()) > gamma_tol {
        return None;
    }
    let pts: Vec<(usize, usize)> = fr.grid.core().collect();
    let cols = |i: usize, j: usize| -> (Matrix6<f64>, Matrix6<f64>) {
        let f1 = fr.f1.get(i, j);
        let g1 = next.f1.get(i, j);
        let f0 = re6(&fr.f0.get(i, j));
        let g0 = re6(&next.f0.get(i, j));
        let (fr_, fi) = (re6(&f1), f1.map(|z| z.im));
        let (gr, gi) = (re6(&g1), g1.map(|z| z.im));
        let x = Matrix6::from_columns(&[f0, fr_, fi, g0, gr, gi]);
        let y = Matrix6::from_columns(&[g0, gr, gi, f0, fr_, fi]);
        (x, y)
    };
    let mut xxt = Matrix6::zeros();
    let mut yxt = Matrix6::zeros();
    for &(i, j) in &pts {
        let (x, y) = cols(i, j);
        xxt += x * x.transpose();
        yxt += y * x.transpose();
    }
    let (_, o) = reflection_from_fit(xxt, yxt)?;
    let a = nearest_reflection(&o);
    let id = Matrix6::identity();
    let mut z_dep = 0.0_f64;
    let mut fit = 0.0_f64;
    for &(i, j) in &pts {
        let (x, y) = cols(i, j);
        if let Some(xi) = x.try_inverse() {
            let az = y * xi;
            z_dep = z_dep.max((az - a).amax());
        }
        let f0 = re6(&fr.f0.get(i, j));
        let g0 = re6(&next.f0.get(i, j));
        fit = fit.max((a * f0 - g0).norm());
    }
    Some(ReflectionReport {
        matrix: to_rows(&a),
        fit_residual: fit,
        z_dependence: z_dep,
        polar_involution_defect: frobenius(&(o * o - id)),
        involution_defect: frobenius(&(a * a - id)),
        det: a.determinant(),
        fixed_dim: (0..6).filter(|&k| (a + id).column(k).norm() > 0.0).count().min(
            SymmetricEigen::new(a).eigenvalues.iter().filter(|&&l| l > 0.0).count(),
        ),
    })
}

/// Linear fullness diagnostics for one sequence member.
#[derive(Clone, Debug, Serialize)]
pub struct NotFullReport {
    pub alpha_max: f64,
    /// Singular values of the sample cloud, scaled so the largest is 1.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub linearly_full: bool,
    /// Reflection in the great S^4 containing the surface.
    pub reflection: Option<Vec<Vec<f64>>>,
    /// `max |f^{q+1} - A f^{q-1}|` when both neighbours were supplied.
    pub pair_residual: Option<f64>,
}

pub fn detect_not_full(
    fr: &FrameField,
    prev: Option<&SampledSurface>,
    next: Option<&SampledSurface>,
    cal: &Calculus,
    rank_tol: f64,
) -> NotFullReport {
    let alpha_max = cal.max_core(&fr.alpha, |z| z.norm());
    let mut m = Matrix6::<f64>::zeros();
    let mut count = 0.0;
    for (i, j) in fr.grid.core() {
        let v = re6(&fr.f0.get(i, j));
        m += v * v.transpose();
        count += 1.0;
    }
    m /= count;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let top = eig.eigenvalues[order[0]].max(0.0).sqrt();
    let sv: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt() / top).collect();
    let rank = sv.iter().filter(|&&s| s > rank_tol).count();
    let linearly_full = rank == 6;
    let (reflection, pair_residual) = if linearly_full {
        (None, None)
    } else {
        let e: RealVec6 = eig.eigenvectors.column(order[5]).into_owned();
        let a = Matrix6::identity() - e * e.transpose() * 2.0;
        let pr = match (prev, next) {
            (Some(p), Some(n)) => Some(
                fr.grid
                    .core()
                    .map(|(i, j)| (n.values.get(i, j) - a * p.values.get(i, j)).norm())
                    .fold(0.0, f64::max),
            ),
            _ => None,
        };
        (Some(to_rows(&a)), pr)
    };
    NotFullReport { alpha_max, singular_values: sv, rank, linearly_full, reflection, pair_residual }
}

/// Orientation-reversing congruence found between members `q` and `r`,
/// and which invariant was seen to vanish along the sequence.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceClassification {
    pub q: i32,
    pub r: i32,
    pub parity_even: bool,
    /// Members `s` with `alpha^s = 0`.
    pub alpha_zero_at: Vec<i32>,
    /// Members `s` with `gamma^{s+1} = 0`.
    pub gamma_zero_at: Vec<i32>,
}

/// Reports the parity of `q - r` next to the vanishing invariants, without
/// presuming which parity goes with which case.
pub fn classify_congruence(
    seq: &[SequenceEntry],
    q: i32,
    r: i32,
    cal: &Calculus,
    alpha_tol: f64,
    gamma_tol: f64,
) -> CongruenceClassification {
    let alpha_zero_at = seq
        .iter()
        .filter(|e| cal.max_core(&e.frame.alpha, |z| z.norm()) <= alpha_tol)
        .map(|e| e.p)
        .collect();
    let gamma_zero_at = seq
        .iter()
        .filter(|e| e.gamma_next.as_ref().map(|g| cal.max_core(g, |z| z.norm()) <= gamma_tol).unwrap_or(false))
        .map(|e| e.p)
        .collect();
    CongruenceClassification { q, r, parity_even: (q - r) % 2 == 0, alpha_zero_at, gamma_zero_at }
}

/// For an orientation-reversing isometry `A`: max of
/// `|(A f)^+ - A (f^-)|` and `|(A f)^- - A (f^+)|`.
pub fn reflection_equivariance_residual(f: &SampledSurface, a: &Matrix6<f64>, cal: &Calculus) -> Result<f64> {
    let fr = build_frame(f, cal)?;
    let af = f.transformed(a)?;
    let fra = build_frame(&af, cal)?;
    let lhs_p = transform(&fra, 1)?;
    let lhs_m = transform(&fra, -1)?;
    let rhs_p = transform(&fr, -1)?.transformed(a)?;
    let rhs_m = transform(&fr, 1)?.transformed(a)?;
    Ok(lhs_p.distance(&rhs_p).max(lhs_m.distance(&rhs_m)))
}

/// Distance from `A` to `+*` and `-*` (Hodge star on Λ²R⁴ = R⁶).
pub fn star_distance(a: &Matrix6<f64>) -> (f64, f64) {
    let h = crate::algebra::hodge_matrix();
    ((a - h).amax(), (a + h).amax())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_reflection_of_reflection_is_itself() {
        let e = RealVec6::new(1.0, 2.0, -1.0, 0.5, 0.0, 3.0).normalize();
        let a = Matrix6::identity() - e * e.transpose() * 2.0;
        let r = nearest_reflection(&polar(&a));
        assert!((r - a).amax() < 1e-12);
        assert!((r.determinant() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn b_model_determinant() {
        let (om, ome) = (0.4_f64, 0.1_f64);
        let d = gram_b_model(om, ome).determinant();
        let s = (om + ome).exp() - 1.0;
        assert!((d - c(s * s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exact_reflection_data_is_recovered() {
        // Synthetic data: random-ish vectors and their images under a reflection.
        let e = RealVec6::new(0.3, -0.2, 0.9, 0.1, 0.4, -0.6).normalize();
        let a = Matrix6::identity() - e * e.transpose() * 2.0;
        let mut xxt = Matrix6::zeros();
        let mut yxt = Matrix6::zeros();
        for k in 0..40 {
            let t = k as f64 * 0.37;
            let x = RealVec6::new(t.sin(), (2.0 * t).cos(), (3.0 * t).sin(), t.cos(), (0.5 * t).sin(), (1.7 * t).cos());
            let y = a * x;
            xxt += x * x.transpose();
            yxt += y * x.transpose();
        }
        let (_, o) = reflection_from_fit(xxt, yxt).unwrap();
        let r = nearest_reflection(&o);
        assert!((r - a).amax() < 1e-10);
    }
}
