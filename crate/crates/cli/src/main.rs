use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use minsurf::bipolar::{
    bipolar, check_s3_minimal, complex_form_check, frame_orientation, verify_bipolar_equivalence,
    BipolarEquivalenceReport, S3Residual, S3Surface,
};
use minsurf::calculus::{Calculus, Order};
use minsurf::catalog::{catalog, CatalogSurface};
use minsurf::frames::{build_frame, classify_ellipse, frame_identities, EllipseClass, FrameField, FrameIdentities};
use minsurf::integrability::{residual_system_F, InvariantTriple};
use minsurf::io::{from_csv, to_csv, to_obj, ExportFormat};
use minsurf::lift::{
    analyze_lift, bipolar_lift, bipolar_specialization, build_u, t_samples, HorizontalReport, LiftReport,
};
use minsurf::report::{to_fixed_json, CheckEntry, CheckReport, Provenance};
use minsurf::suites::{run_convergence, run_suite, SUITES};
use minsurf::surface::{minimality, SampledSurface, SurfaceFile};
use minsurf::transforms::{
    delta_gamma_residual, detect_not_full, gamma, round_trips, sequence, symmetric_frame_report, transform,
    transform_checks, NotFullReport,
};

#[derive(Parser)]
#[command(name = "minsurf", version, about = "Minimal surfaces in S^5: frames, transforms, bipolar surfaces and lifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Numerics {
    /// Stencil order, 2 or 4.
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Constant C in the tolerances C*h^p.
    #[arg(long = "tol-c", default_value_t = 10.0)]
    tol_c: f64,
}

impl Numerics {
    fn order(&self) -> Result<Order> {
        if !(self.tol_c > 0.0) {
            bail!("--tol-c must be positive");
        }
        Order::from_int(self.order).ok_or_else(|| anyhow!("--order must be 2 or 4, got {}", self.order))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a catalog surface as JSON.
    Catalog {
        name: String,
        #[arg(long, default_value = "64x64")]
        grid: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Frame invariants and identities of a surface file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        num: Numerics,
    },
    /// One transform (--eps) or a run of them (--steps A..B).
    Transform {
        #[arg(long)]
        input: PathBuf,
        /// `plus` or `minus`.
        #[arg(long, conflicts_with = "steps")]
        eps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        steps: Option<String>,
        /// Surface file for --eps, directory for --steps.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        num: Numerics,
    },
    /// The sequence f^A..f^B with fullness diagnostics.
    Sequence {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "-2..2")]
        steps: String,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        num: Numerics,
    },
    /// Bipolar surface of an S^3 pair, with the characterisation checks.
    Bipolar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Where to write the check report; defaults to OUTPUT with `.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        num: Numerics,
    },
    /// Lagrangian lift of a surface (S^5 file), or of its bipolar plus the
    /// horizontal lift (S^3 file).
    Lift {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated t values; defaults to nine samples in (0, pi).
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        num: Numerics,
    },
    /// Check a file, or run the numbered suites (with --convergence at N and 2N).
    Check {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        convergence: bool,
        /// Suite number 1-9; all when omitted.
        #[arg(long)]
        suite: Option<u8>,
        #[arg(long, default_value = "64x64")]
        grid: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        num: Numerics,
    },
    /// Export a surface as csv or obj.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "export")]
        format: String,
        #[arg(long)]
        output: PathBuf,
    },
}

enum Loaded {
    S3(S3Surface),
    S5(SampledSurface),
}

fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "csv") {
        let file = from_csv(&text)?;
        return Ok(Loaded::S5(SampledSurface::try_from(&file)?));
    }
    let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if v.get("G1").is_some() {
        Ok(Loaded::S3(S3Surface::from_json(&text)?))
    } else {
        let file: SurfaceFile = serde_json::from_value(v)?;
        Ok(Loaded::S5(SampledSurface::try_from(&file)?))
    }
}

fn load_s5(path: &Path) -> Result<SampledSurface> {
    match load(path)? {
        Loaded::S5(s) => Ok(s),
        Loaded::S3(s) => Ok(bipolar(&s)?),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse_grid(s: &str) -> Result<usize> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| anyhow!("--grid must look like NxN, got {s}"))?;
    let (a, b): (usize, usize) = (a.parse()?, b.parse()?);
    if a != b {
        bail!("only square grids are generated, got {a}x{b}");
    }
    if a < 16 {
        bail!("grid resolution must be at least 16, got {a}");
    }
    Ok(a)
}

fn parse_steps(s: &str) -> Result<(i32, i32)> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("--steps must look like A..B, got {s}"))?;
    let (a, b): (i32, i32) = (a.trim().parse()?, b.trim().parse()?);
    if a > 0 || b < 0 || a > b {
        bail!("--steps range {a}..{b} must contain 0");
    }
    Ok((a, b))
}

fn provenance(source: &Path, grid: (usize, usize), order: Order) -> Provenance {
    Provenance { source: source.display().to_string(), grid: [grid.0, grid.1], order: order.as_int() }
}

/// `C h^p` checks shared by `analyze` and `check`.
struct Judge {
    c: f64,
    h: f64,
}

impl Judge {
    fn rate(&self, rep: &mut CheckReport, name: &str, value: f64, p: i32) {
        rep.push(CheckEntry::new(name, value, self.c * self.h.powi(p)));
    }
}

fn surface_checks(f: &SampledSurface, cal: &Calculus, judge: &Judge, rep: &mut CheckReport) -> Result<FrameField> {
    let fr = match build_frame(f, cal) {
        Ok(fr) => fr,
        Err(e) => {
            rep.push(CheckEntry::new(format!("frame: {e}"), 1.0, 0.0));
            return Err(e.into());
        }
    };
    judge.rate(rep, "minimality", minimality(f, cal).max_residual, 2);
    let id = frame_identities(&fr);
    judge.rate(rep, "frame.gram", id.gram, 2);
    judge.rate(rep, "frame.volume", id.volume, 2);
    for eps in [1, -1] {
        let tag = if eps > 0 { "plus" } else { "minus" };
        let (ch, fe) = transform_checks(&fr, eps, cal)?;
        judge.rate(rep, &format!("{tag}.conformality"), ch.conformality, 2);
        judge.rate(rep, &format!("{tag}.adaptedness"), ch.adaptedness, 2);
        judge.rate(rep, &format!("{tag}.minimality"), ch.minimality, 2);
        let b = symmetric_frame_report(&fr, &fe, eps, cal);
        judge.rate(rep, &format!("{tag}.b_frame.volume"), b.volume, 2);
        rep.push(CheckEntry::new(format!("{tag}.omega_sum_positive"), -b.min_omega_sum, 0.0));
    }
    let seq = sequence(f, 0, 0, cal)?;
    let (_, pm, mp) = round_trips(&seq, cal)?[0];
    judge.rate(rep, "round_trip", pm.max(mp), 2);
    judge.rate(rep, "system_f", residual_system_F(&InvariantTriple::from_frame(&fr), cal).max(), 1);
    Ok(fr)
}

fn s3_checks(s: &S3Surface, cal: &Calculus, judge: &Judge, rep: &mut CheckReport) -> S3Residual {
    let r = check_s3_minimal(s, cal);
    judge.rate(rep, "s3.minimal_system", r.system_max(), 2);
    judge.rate(rep, "s3.normal", r.normal_u.max(r.normal_v), 2);
    judge.rate(rep, "s3.metric", r.metric, 2);
    rep.push(CheckEntry::new("s3.orthonormal_pair", s.pair_defect(), 1e-10));
    r
}

fn bipolar_checks(
    f: &SampledSurface,
    cal: &Calculus,
    judge: &Judge,
    rep: &mut CheckReport,
) -> Result<BipolarEquivalenceReport> {
    let h2 = judge.c * judge.h * judge.h;
    let eq = verify_bipolar_equivalence(f, cal, Some(true), h2, h2)?;
    rep.push(CheckEntry::new("bipolar.gamma_plus", eq.gamma_plus_max, h2));
    rep.push(CheckEntry::new("bipolar.omega_gap", eq.omega_gap, h2));
    match &eq.reflection {
        Some(r) => {
            let a = r.matrix6();
            rep.push(CheckEntry::new("bipolar.reflection.involution", (a * a - nalgebra::Matrix6::identity()).amax(), 1e-8));
            rep.push(CheckEntry::new("bipolar.reflection.det", (a.determinant() + 1.0).abs(), 1e-8));
            rep.push(CheckEntry::new("bipolar.reflection.fit", r.fit_residual, h2));
        }
        None => rep.push(CheckEntry::new("bipolar.reflection.found", 1.0, 0.0)),
    }
    rep.push(CheckEntry::new("bipolar.consistent", if eq.consistent { 0.0 } else { 1.0 }, 0.5));
    Ok(eq)
}

#[derive(Serialize)]
struct FrameSummary {
    ellipse: EllipseClass,
    omega_range: (f64, f64),
    phi_range: (f64, f64),
    alpha_max: f64,
    identities: FrameIdentities,
    fullness: NotFullReport,
}

fn frame_summary(f: &SampledSurface, fr: &FrameField, cal: &Calculus) -> FrameSummary {
    let range = |x: &minsurf::field::Field<f64>| {
        (cal.argmin_core(x, |v| v).1, cal.argmax_core(x, |v| v).1)
    };
    FrameSummary {
        ellipse: classify_ellipse(f, cal).classification,
        omega_range: range(&fr.omega),
        phi_range: range(&fr.phi),
        alpha_max: cal.max_core(&fr.alpha, |z| z.norm()),
        identities: frame_identities(fr),
        fullness: detect_not_full(fr, None, None, cal, 1e-6),
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    checks: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<FrameSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s3: Option<S3Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s3_orientation: Option<f64>,
}

fn emit<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    let text = to_fixed_json(value)?;
    match output {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Prints the verdict and turns it into the exit code.
fn verdict(rep: &CheckReport) -> ExitCode {
    match rep.first_failure() {
        None => {
            eprintln!("all {} checks pass", rep.checks.len());
            ExitCode::SUCCESS
        }
        Some(c) => {
            eprintln!("check failed: {} (residual {:.3e} > tolerance {:.3e})", c.name, c.residual, c.tolerance);
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Catalog { name, grid, output } => {
            let n = parse_grid(&grid)?;
            let text = match catalog(&name, n)? {
                CatalogSurface::S3(s) => s.to_json()?,
                CatalogSurface::S5(s) => s.to_json()?,
            };
            write(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { input, output, num } => {
            let order = num.order()?;
            let loaded = load(&input)?;
            let (f, s3) = match loaded {
                Loaded::S5(f) => (f, None),
                Loaded::S3(s) => (bipolar(&s)?, Some(s)),
            };
            let cal = f.calculus(order)?;
            let judge = Judge { c: num.tol_c, h: f.grid.h() };
            let mut rep = CheckReport::new(provenance(&input, (f.grid.nx, f.grid.ny), order));
            let s3_res = s3.as_ref().map(|s| s3_checks(s, &cal, &judge, &mut rep));
            let s3_orientation = s3.as_ref().map(|s| frame_orientation(s, &cal));
            let frame = surface_checks(&f, &cal, &judge, &mut rep).ok().map(|fr| frame_summary(&f, &fr, &cal));
            let out = AnalyzeOutput { checks: rep, frame, s3: s3_res, s3_orientation };
            emit(output.as_deref(), &out)?;
            Ok(verdict(&out.checks))
        }
        Command::Transform { input, eps, steps, output, num } => {
            let order = num.order()?;
            let f = load_s5(&input)?;
            let cal = f.calculus(order)?;
            if let Some(steps) = steps {
                return write_sequence(&input, &f, &cal, &num, parse_steps(&steps)?, &output, false);
            }
            let e = match eps.as_deref() {
                Some("plus") | Some("+1") | Some("1") | None => 1,
                Some("minus") | Some("-1") => -1,
                Some(other) => bail!("--eps must be plus or minus, got {other}"),
            };
            let fr = build_frame(&f, &cal)?;
            let fe = transform(&fr, e)?;
            write(&output, &fe.to_json()?)?;
            let judge = Judge { c: num.tol_c, h: f.grid.h() };
            let mut rep = CheckReport::new(provenance(&input, (f.grid.nx, f.grid.ny), order));
            let (ch, _) = transform_checks(&fr, e, &cal)?;
            judge.rate(&mut rep, "conformality", ch.conformality, 2);
            judge.rate(&mut rep, "adaptedness", ch.adaptedness, 2);
            judge.rate(&mut rep, "minimality", ch.minimality, 2);
            emit(Some(&output.with_extension("report.json")), &rep)?;
            Ok(verdict(&rep))
        }
        Command::Sequence { input, steps, output, num } => {
            let order = num.order()?;
            let f = load_s5(&input)?;
            let cal = f.calculus(order)?;
            write_sequence(&input, &f, &cal, &num, parse_steps(&steps)?, &output, true)
        }
        Command::Bipolar { input, output, report, num } => {
            let order = num.order()?;
            let s = match load(&input)? {
                Loaded::S3(s) => s,
                Loaded::S5(_) => bail!("{} is not an S^3 pair (expected G1, G2, eta)", input.display()),
            };
            let cal = s.calculus(order)?;
            let f = bipolar(&s)?;
            write(&output, &f.to_json()?)?;
            let judge = Judge { c: num.tol_c, h: s.grid.h() };
            let mut rep = CheckReport::new(provenance(&input, (s.grid.nx, s.grid.ny), order));
            s3_checks(&s, &cal, &judge, &mut rep);
            let cf = complex_form_check(&s, &cal, frame_orientation(&s, &cal));
            judge.rate(&mut rep, "bipolar.complex_form", cf.residual, 2);
            judge.rate(&mut rep, "bipolar.complex_form.phase_modulus", cf.phase_modulus_defect, 2);
            if let Err(e) = bipolar_checks(&f, &cal, &judge, &mut rep) {
                rep.push(CheckEntry::new(format!("bipolar: {e}"), 1.0, 0.0));
            }
            let report = report.unwrap_or_else(|| output.with_extension("report.json"));
            emit(Some(&report), &rep)?;
            Ok(verdict(&rep))
        }
        Command::Lift { input, t, output, num } => {
            let order = num.order()?;
            let (f, s3) = match load(&input)? {
                Loaded::S5(f) => (f, None),
                Loaded::S3(s) => (bipolar(&s)?, Some(s)),
            };
            let cal = f.calculus(order)?;
            let fr = build_frame(&f, &cal)?;
            let fp = build_frame(&transform(&fr, 1)?, &cal)?;
            let g = gamma(&fr, &fp, &cal);
            let interval = minsurf::lift::admissible_interval(&fr.omega, &fp.omega, &fr.grid)?;
            let samples = t_samples(interval.0, interval.1, minsurf::suites::LIFT_SAMPLES);
            for &tv in &t {
                build_u(&fr, &fp, tv)?;
            }
            let ts = if t.len() >= 5 { t.clone() } else { samples };
            let an = analyze_lift(&fr, &fp, &g, &cal, &ts)?;
            let (specialization, horizontal): (_, Option<HorizontalReport>) = match &s3 {
                Some(s) => (Some(bipolar_specialization(&an, &s.eta, &cal)), Some(bipolar_lift(s, &cal, &ts))),
                None => (None, None),
            };
            let rep = LiftReport {
                interval: an.interval,
                coordinate_rotation: an.coordinate_rotation,
                rows: an.rows.clone(),
                specialization,
                horizontal,
            };
            emit(Some(&output), &rep)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { input, convergence, suite, grid, output, num } => {
            let order = num.order()?;
            if let Some(input) = input {
                if convergence {
                    bail!("--convergence regenerates catalog data at h/2 and cannot be used with --input");
                }
                let rep = check_file(&input, order, &num)?;
                emit(output.as_deref(), &rep)?;
                return Ok(verdict(&rep));
            }
            let n = parse_grid(&grid)?;
            let which: Vec<u8> = match suite {
                Some(k) if (1..=9).contains(&k) => vec![k],
                Some(k) => bail!("--suite must be 1-9, got {k}"),
                None => SUITES.iter().map(|s| s.criterion).collect(),
            };
            let mut all = CheckReport::new(Provenance {
                source: "suites".into(),
                grid: [n, n],
                order: minsurf::suites::SUITE_ORDER.as_int(),
            });
            for k in which {
                let rep = if convergence { run_convergence(k, n)? } else { run_suite(k, n)? };
                for mut c in rep.checks {
                    c.name = format!("{k}.{}", c.name);
                    all.push(c);
                }
            }
            emit(output.as_deref(), &all)?;
            Ok(verdict(&all))
        }
        Command::Export { input, format, output } => {
            let format: ExportFormat = format.parse()?;
            let f = load_s5(&input)?;
            match format {
                ExportFormat::Csv => write(&output, &to_csv(&f)?)?,
                ExportFormat::Obj => {
                    let (mesh, proj) = to_obj(&f);
                    write(&output, &mesh)?;
                    emit(Some(&output.with_extension("projection.json")), &proj)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn check_file(input: &Path, order: Order, num: &Numerics) -> Result<CheckReport> {
    let loaded = load(input)?;
    let (f, s3) = match loaded {
        Loaded::S5(f) => (f, None),
        Loaded::S3(s) => (bipolar(&s)?, Some(s)),
    };
    let cal = f.calculus(order)?;
    let judge = Judge { c: num.tol_c, h: f.grid.h() };
    let mut rep = CheckReport::new(provenance(input, (f.grid.nx, f.grid.ny), order));
    if let Some(s) = &s3 {
        s3_checks(s, &cal, &judge, &mut rep);
    }
    if surface_checks(&f, &cal, &judge, &mut rep).is_ok() && s3.is_some() {
        if let Err(e) = bipolar_checks(&f, &cal, &judge, &mut rep) {
            rep.push(CheckEntry::new(format!("bipolar: {e}"), 1.0, 0.0));
        }
    }
    Ok(rep)
}

#[derive(Serialize)]
struct ManifestEntry {
    p: i32,
    file: String,
    omega_range: (f64, f64),
    phi_range: (f64, f64),
    alpha_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_next_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fullness: Option<NotFullReport>,
}

#[derive(Serialize)]
struct Manifest {
    steps: (i32, i32),
    entries: Vec<ManifestEntry>,
    checks: CheckReport,
}

fn write_sequence(
    input: &Path,
    f: &SampledSurface,
    cal: &Calculus,
    num: &Numerics,
    (a, b): (i32, i32),
    dir: &Path,
    diagnostics: bool,
) -> Result<ExitCode> {
    let seq = sequence(f, a, b, cal)?;
    fs::create_dir_all(dir)?;
    let judge = Judge { c: num.tol_c, h: f.grid.h() };
    let mut rep = CheckReport::new(provenance(input, (f.grid.nx, f.grid.ny), cal.order()));
    let mut entries = Vec::new();
    for (k, e) in seq.iter().enumerate() {
        let file = format!("f_{}.json", e.p);
        write(&dir.join(&file), &e.surface().to_json()?)?;
        let range = |x: &minsurf::field::Field<f64>| (cal.argmin_core(x, |v| v).1, cal.argmax_core(x, |v| v).1);
        let fullness = diagnostics.then(|| {
            let prev = (k > 0).then(|| seq[k - 1].surface());
            let next = seq.get(k + 1).map(|n| n.surface());
            detect_not_full(&e.frame, prev.as_ref(), next.as_ref(), cal, 1e-6)
        });
        entries.push(ManifestEntry {
            p: e.p,
            file,
            omega_range: range(&e.frame.omega),
            phi_range: range(&e.frame.phi),
            alpha_max: cal.max_core(&e.frame.alpha, |z| z.norm()),
            gamma_next_max: e.gamma_next.as_ref().map(|g| cal.max_core(g, |z| z.norm())),
            fullness,
        });
    }
    judge.rate(&mut rep, "delta_plus_gamma", delta_gamma_residual(&seq, cal), 2);
    let centre: Vec<_> = seq.iter().filter(|e| e.p == 0).cloned().collect();
    let (_, pm, mp) = round_trips(&centre, cal)?[0];
    judge.rate(&mut rep, "round_trip.plus_minus", pm, 2);
    judge.rate(&mut rep, "round_trip.minus_plus", mp, 2);
    let manifest = Manifest { steps: (a, b), entries, checks: rep };
    emit(Some(&dir.join("manifest.json")), &manifest)?;
    Ok(verdict(&manifest.checks))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
