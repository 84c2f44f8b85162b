//! Named experiments behind the command-line subcommands. Each writes its
//! tables into the output directory together with a JSON pass/fail summary.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::audit::{audit_identity, audit_linear_identity, refinement, ForcingDecomposition, Identity, LinearIdentity};
use crate::config::RunConfig;
use crate::domain::{DomainConfig, SpectralField};
use crate::dynamics::{picard_solve, simulate, simulate_spectral, Scheme, StepperConfig};
use crate::error::{Error, Result};
use crate::functionals::{
    decay_fit, max_l2_increase, steklov_check, threshold_time, threshold_time_h2, Constants, DecayFit, NormSpec,
};
use crate::io::{write_diagnostics_file, write_rows, write_snapshots, Check, Summary};
use crate::oracle::{mode_oracle, OdeTolerance};
use crate::semigroup::{apply_semigroup, duhamel_solve, symbol, SymbolTable};
use crate::trajectory::{DiagnosticLevel, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Acceptance tolerances.
    Strict,
    /// Tolerances relaxed a hundredfold, for coarse exploratory runs.
    Default,
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "default" => Ok(Self::Default),
            other => Err(Error::InvalidConfig(format!("unknown tolerance profile `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub semigroup_rel: f64,
    pub duhamel_rel: f64,
    pub flux_rel: f64,
    pub l2_monotone: f64,
    pub steklov: f64,
    pub mass_residual: f64,
    pub linear_mass_residual: f64,
    pub order_lo: f64,
    pub order_hi: f64,
    pub eigen_slope: f64,
    pub decay_slope: f64,
    pub fractional_slope: f64,
    pub picard_match: f64,
}

impl Tolerances {
    pub fn for_profile(p: Profile) -> Self {
        let strict = Self {
            semigroup_rel: 1e-10,
            duhamel_rel: 1e-8,
            flux_rel: 1e-10,
            l2_monotone: 1e-12,
            steklov: 1e-13,
            mass_residual: 1e-6,
            linear_mass_residual: 1e-10,
            order_lo: 1.7,
            order_hi: 2.3,
            eigen_slope: 1e-6,
            decay_slope: 1e-3,
            fractional_slope: 2e-3,
            picard_match: 1e-6,
        };
        match p {
            Profile::Strict => strict,
            Profile::Default => Self {
                semigroup_rel: strict.semigroup_rel * 100.0,
                duhamel_rel: strict.duhamel_rel * 100.0,
                flux_rel: strict.flux_rel * 100.0,
                l2_monotone: strict.l2_monotone * 100.0,
                steklov: strict.steklov * 100.0,
                mass_residual: strict.mass_residual * 100.0,
                linear_mass_residual: strict.linear_mass_residual * 100.0,
                order_lo: 1.5,
                order_hi: 2.5,
                eigen_slope: strict.eigen_slope * 100.0,
                decay_slope: strict.decay_slope * 10.0,
                fractional_slope: strict.fractional_slope * 10.0,
                picard_match: strict.picard_match * 100.0,
            },
        }
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    CheckFailed = 1,
    Blowup = 2,
    ConfigError = 3,
}

impl ExitStatus {
    pub fn of(summary: &Summary) -> Self {
        if summary.passed {
            Self::Pass
        } else {
            Self::CheckFailed
        }
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Blowup { .. } => Self::Blowup,
            Error::ContractionFailed { .. }
            | Error::NormUnderflow { .. }
            | Error::TooFewSamples { .. }
            | Error::NonFinite { .. }
            | Error::NonFiniteForcing { .. } => Self::CheckFailed,
            _ => Self::ConfigError,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub summary: Summary,
    pub status: ExitStatus,
}

impl Outcome {
    fn from_summary(summary: Summary) -> Self {
        let status = ExitStatus::of(&summary);
        Self { summary, status }
    }
}

fn prepare(cfg: &RunConfig, out: &Path) -> Result<DomainConfig> {
    let d = cfg.validate()?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.txt"), cfg.to_text())?;
    Ok(d)
}

fn rel_error(a: &SpectralField, b: &SpectralField) -> f64 {
    let diff = (&a.coeffs - &b.coeffs).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let scale = b.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// `a cos(xi x + phi + (xi^3 + xi lambda) t) e^{-delta (xi^2 + lambda) t} sin(l pi y/L)`
/// evaluated on the grid; the exact solution from a single real mode.
fn traveling_wave(d: &DomainConfig, j: i64, l: usize, a: Complex64, t: f64) -> crate::domain::GridField {
    let xi = std::f64::consts::PI * j as f64 / d.half_period();
    let k = std::f64::consts::PI * l as f64 / d.width();
    let lam = k * k;
    let damp = (-d.delta() * (xi * xi + lam) * t).exp();
    let shift = (xi * xi * xi + xi * lam) * t;
    let (amp, phase) = (a.norm(), a.arg());
    let scale = if j == 0 { 1.0 } else { 2.0 };
    crate::domain::GridField::from_fn(d, |x, y| {
        let angle = if j == 0 { 0.0 } else { xi * x + phase + shift };
        let base = if j == 0 { a.re } else { amp * angle.cos() };
        scale * base * damp * (k * y).sin()
    })
}

fn grid_rel_error(a: &crate::domain::GridField, b: &crate::domain::GridField) -> f64 {
    let diff = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = b.max_abs();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Closed-form propagation of random single modes and superpositions,
/// semigroup property, Duhamel against the ODE oracle, and linear identity
/// audits.
pub fn cmd_linear_verify(cfg: &RunConfig, profile: Profile, out: &Path) -> Result<Outcome> {
    let d = prepare(cfg, out)?;
    let tol = Tolerances::for_profile(profile);
    let s = symbol(&d);
    let mut summary = Summary::new("linear-verify");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jmax = (d.nx() as i64 / 2 - 1).min(20);
    let lmax = d.ny().min(8);

    let zero = apply_semigroup(&SpectralField::zeros(&d), 1.0, &s)?;
    summary.push(Check::at_most("zero data stays zero", zero.max_abs(), 0.0));

    let eig = SpectralField::real_mode(&d, 0, 1, Complex64::new(1.0, 0.0));
    let mut worst = 0.0_f64;
    for t in [0.25, 1.0, 2.0] {
        let ratio = apply_semigroup(&eig, t, &s)?.l2_norm(&d) / eig.l2_norm(&d);
        let exact = (-d.delta() * d.lambda_min() * t).exp();
        worst = worst.max((ratio / exact - 1.0).abs());
    }
    summary.push(Check::at_most("eigenmode decay rate", worst, tol.semigroup_rel));

    let mut worst_single = 0.0_f64;
    let mut worst_super = 0.0_f64;
    let times = [0.0, 0.5, 1.0, 1.5, 2.0];
    let random_mode = |rng: &mut ChaCha8Rng| {
        let j = rng.random_range(-jmax..=jmax);
        let l = rng.random_range(1..=lmax);
        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        (j, l, a)
    };
    for _ in 0..20 {
        let (j, l, a) = random_mode(&mut rng);
        let u0 = SpectralField::real_mode(&d, j, l, a);
        for &t in &times {
            let got = d.to_grid(&apply_semigroup(&u0, t, &s)?)?;
            worst_single = worst_single.max(grid_rel_error(&got, &traveling_wave(&d, j, l, a, t)));
        }
    }
    for _ in 0..5 {
        let modes: Vec<_> = (0..4).map(|_| random_mode(&mut rng)).collect();
        let mut u0 = SpectralField::zeros(&d);
        for &(j, l, a) in &modes {
            u0.coeffs += &SpectralField::real_mode(&d, j, l, a).coeffs;
        }
        for &t in &times {
            let got = d.to_grid(&apply_semigroup(&u0, t, &s)?)?;
            let mut exact = crate::domain::GridField::zeros(&d);
            for &(j, l, a) in &modes {
                exact.values += &traveling_wave(&d, j, l, a, t).values;
            }
            worst_super = worst_super.max(grid_rel_error(&got, &exact));
        }
    }
    summary.push(Check::at_most(
        "single modes vs closed form",
        worst_single,
        tol.semigroup_rel,
    ));
    summary.push(Check::at_most(
        "superpositions vs closed form",
        worst_super,
        tol.semigroup_rel,
    ));

    let band = crate::initial::InitialData::RandomBand {
        seed: cfg.seed,
        jmax: jmax.min(12),
        lmax: lmax.min(6),
    }
    .spectral(1.0, &d)?;
    let composed = apply_semigroup(&apply_semigroup(&band, 0.3, &s)?, 0.45, &s)?;
    let direct = apply_semigroup(&band, 0.75, &s)?;
    summary.push(Check::at_most(
        "semigroup property",
        rel_error(&composed, &direct),
        1e-13,
    ));

    let duhamel = duhamel_oracle_errors(&d, &s, cfg.seed)?;
    for (name, err) in &duhamel {
        summary.push(Check::at_most(
            format!("duhamel vs ODE oracle ({name})"),
            *err,
            tol.duhamel_rel,
        ));
    }

    let small = band.scaled(1e-4);
    let zero_forcing = ForcingDecomposition::plain(|_| SpectralField::zeros(&d));
    let traj = duhamel_solve(&small, &|_| SpectralField::zeros(&d), 1.0, 2e-3, &s, &d)?;
    let mass = audit_linear_identity(&traj, LinearIdentity::Mass, &zero_forcing, &d)?;
    summary.push(Check::at_most(
        "homogeneous mass identity residual",
        mass.max_residual,
        tol.linear_mass_residual,
    ));

    summary.details = json!({
        "jmax": jmax,
        "lmax": lmax,
        "single_mode_error": worst_single,
        "superposition_error": worst_super,
        "duhamel": duhamel.iter().map(|(n, e)| json!({"forcing": n, "relative_error": e})).collect::<Vec<_>>(),
    });
    summary.write(&out.join("linear_verify.json"))?;
    Ok(Outcome::from_summary(summary))
}

/// Forced linear runs on a handful of low modes compared with the adaptive
/// ODE oracle, for constant, polynomial and random trigonometric forcing.
fn duhamel_oracle_errors(d: &DomainConfig, s: &SymbolTable, seed: u64) -> Result<Vec<(&'static str, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let modes: Vec<(i64, usize)> = vec![(0, 1), (1, 1), (3, 2), (-2, 3), (5, 1)];
    let amps: Vec<Complex64> = modes
        .iter()
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let freqs: Vec<(f64, f64)> = modes
        .iter()
        .map(|_| (rng.random_range(0.5..3.0), rng.random_range(0.0..6.0)))
        .collect();
    type Profile = Box<dyn Fn(usize, f64) -> f64>;
    let profiles: [(&'static str, Profile); 3] = [
        ("constant", Box::new(|_, _| 1.0)),
        (
            "polynomial",
            Box::new(|_, t| 1.0 + 0.5 * t - 0.75 * t * t + 0.2 * t * t * t),
        ),
        (
            "random smooth",
            Box::new(move |k, t| (freqs[k].0 * t + freqs[k].1).sin()),
        ),
    ];
    let t_end = 1.0;
    let dt = 1e-2;
    let sample_times: Vec<f64> = (1..=4).map(|i| 0.25 * i as f64).collect();
    let mut out = Vec::new();
    for (name, profile) in profiles.iter() {
        let forcing = |t: f64| {
            let mut f = SpectralField::zeros(d);
            for (k, &(j, l)) in modes.iter().enumerate() {
                f.coeffs += &SpectralField::real_mode(d, j, l, amps[k] * profile(k, t)).coeffs;
            }
            f
        };
        let traj = duhamel_solve(&SpectralField::zeros(d), &forcing, t_end, dt, s, d)?;
        let mut diff = 0.0;
        let mut scale = 0.0;
        for (k, &(j, l)) in modes.iter().enumerate() {
            let row = d.row_of(j);
            let m = s.m[[row, l - 1]];
            let a = if j == 0 {
                Complex64::new(amps[k].re, 0.0)
            } else {
                amps[k]
            };
            let exact = mode_oracle(
                m,
                &|t| a * profile(k, t),
                Complex64::new(0.0, 0.0),
                &sample_times,
                OdeTolerance::default(),
            );
            for (i, &t) in sample_times.iter().enumerate() {
                let step = (t / dt).round() as usize;
                let got = traj.snapshots[step].field.coeffs[[row, l - 1]];
                diff += (got - exact[i]).norm_sqr();
                scale += exact[i].norm_sqr();
            }
        }
        out.push((*name, (diff / scale).sqrt()));
    }
    Ok(out)
}

fn flux_ratio(traj: &Trajectory) -> f64 {
    traj.diagnostics
        .iter()
        .map(|g| g.nonlin_flux.abs() / g.l2.powi(3).max(1.0))
        .fold(0.0, f64::max)
}

fn worst_steklov(traj: &Trajectory, d: &DomainConfig) -> f64 {
    traj.snapshots
        .iter()
        .map(|s| steklov_check(&s.field, d).margin)
        .fold(f64::INFINITY, f64::min)
}

fn run(cfg: &RunConfig, d: &DomainConfig, level: DiagnosticLevel) -> Result<Trajectory> {
    let u0 = cfg.init.grid(cfg.amplitude, d)?;
    simulate(&u0, cfg.t_end, &cfg.stepper(level), cfg.flux()?, d)
}

fn blowup_outcome(mut summary: Summary, traj: &Trajectory) -> Outcome {
    let event = traj.blowup.expect("blowup recorded");
    summary.passed = false;
    summary.notes.push(format!(
        "numerical blowup at t = {} (L2 norm {:.3e}); solutions are global, so reduce dt",
        event.time, event.norm
    ));
    Outcome {
        summary,
        status: ExitStatus::Blowup,
    }
}

/// Run the configured simulation and write diagnostics, snapshots and a
/// summary of the per-step invariants.
pub fn cmd_simulate(cfg: &RunConfig, profile: Profile, out: &Path) -> Result<Outcome> {
    let d = prepare(cfg, out)?;
    let tol = Tolerances::for_profile(profile);
    let traj = run(cfg, &d, DiagnosticLevel::H2)?;
    write_diagnostics_file(&out.join("diagnostics.csv"), &traj, d.delta())?;
    write_snapshots(&out.join("snapshots"), &traj, &d)?;
    let mut summary = Summary::new("simulate");
    if traj.blowup.is_some() {
        let outcome = blowup_outcome(summary, &traj);
        outcome.summary.write(&out.join("summary.json"))?;
        return Ok(outcome);
    }
    summary.push(Check::at_most("flux orthogonality", flux_ratio(&traj), tol.flux_rel));
    summary.push(Check::at_most("L2 monotone", max_l2_increase(&traj), tol.l2_monotone));
    summary.push(Check::at_least(
        "Steklov margin",
        worst_steklov(&traj, &d),
        -tol.steklov,
    ));
    summary.details = json!({
        "steps": traj.len() - 1,
        "t_end": traj.final_time(),
        "l2_initial": traj.diagnostics[0].l2,
        "l2_final": traj.diagnostics.last().map(|g| g.l2),
        "snapshots": traj.snapshots.len(),
    });
    summary.write(&out.join("summary.json"))?;
    Ok(Outcome::from_summary(summary))
}

#[derive(Debug, Serialize)]
struct ResidualRow {
    identity: &'static str,
    dt: f64,
    t: f64,
    residual: f64,
}

/// Audit the energy identities on the configured run and on the run with
/// half the step, reporting residuals and the observed order.
pub fn cmd_audit(cfg: &RunConfig, identities: &[Identity], profile: Profile, out: &Path) -> Result<Outcome> {
    let d = prepare(cfg, out)?;
    let tol = Tolerances::for_profile(profile);
    let level = identities
        .iter()
        .map(|i| i.required_level())
        .max()
        .unwrap_or(DiagnosticLevel::L2);
    let coarse = run(cfg, &d, level)?;
    let fine_cfg = RunConfig {
        dt: cfg.dt / 2.0,
        snapshot_stride: cfg.snapshot_stride * 2,
        ..cfg.clone()
    };
    let fine = run(&fine_cfg, &d, level)?;
    let mut summary = Summary::new("audit");
    for traj in [&coarse, &fine] {
        if traj.blowup.is_some() {
            return Ok(blowup_outcome(summary, traj));
        }
    }
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &id in identities {
        let a = audit_identity(&coarse, id, &d)?;
        let b = audit_identity(&fine, id, &d)?;
        let r = refinement(&a, &b);
        for rep in [&a, &b] {
            rows.extend(
                rep.times
                    .iter()
                    .zip(rep.residuals.iter())
                    .map(|(&t, &residual)| ResidualRow {
                        identity: id.name(),
                        dt: rep.dt,
                        t,
                        residual,
                    }),
            );
        }
        summary.push(Check::within(
            format!("{id} refinement order"),
            r.order,
            tol.order_lo,
            tol.order_hi,
        ));
        if id == Identity::Mass {
            summary.push(Check::at_most(
                "mass max residual",
                a.max_residual,
                tol.mass_residual,
            ));
        }
        reports.push(json!({
            "identity": id.name(),
            "dt": [a.dt, b.dt],
            "max_residual": [a.max_residual, b.max_residual],
            "energy_scale": a.energy_scale,
            "factor": r.factor,
            "order": r.order,
        }));
    }
    write_rows(&out.join("audit_residuals.csv"), &rows)?;
    summary.details = json!({ "reports": reports });
    summary.write(&out.join("audit.json"))?;
    Ok(Outcome::from_summary(summary))
}

#[derive(Debug, Serialize)]
struct DecayRow {
    t: f64,
    l2: f64,
    h1: f64,
    h2: f64,
}

fn fit_with_retry(traj: &Trajectory, spec: NormSpec, d: &DomainConfig, notes: &mut Vec<String>) -> Result<DecayFit> {
    match decay_fit(traj, spec, None, d) {
        Err(Error::NormUnderflow { t }) => {
            let t_end = traj.final_time();
            notes.push(format!(
                "{}: norm underflow at t = {t}; window shrunk to [0.2T, 0.5T]",
                spec.label()
            ));
            decay_fit(traj, spec, Some((0.2 * t_end, 0.5 * t_end)), d)
        }
        other => other,
    }
}

/// Decay rates of the `H^s` norms for `s` in `{0, 1/2, 1, 3/2, 2}`, the
/// Lyapunov checks past the threshold times, and a plot-ready norm table.
pub fn cmd_decay(cfg: &RunConfig, profile: Profile, out: &Path) -> Result<Outcome> {
    let d = prepare(cfg, out)?;
    let tol = Tolerances::for_profile(profile);
    let mut summary = Summary::new("decay");
    if cfg.amplitude == 0.0 {
        summary
            .notes
            .push("zero initial data: nothing decays, fits skipped".into());
        summary.write(&out.join("decay.json"))?;
        return Ok(Outcome::from_summary(summary));
    }
    let traj = run(cfg, &d, DiagnosticLevel::H2)?;
    if traj.blowup.is_some() {
        let outcome = blowup_outcome(summary, &traj);
        outcome.summary.write(&out.join("decay.json"))?;
        return Ok(outcome);
    }
    let rows: Vec<DecayRow> = traj
        .diagnostics
        .iter()
        .map(|g| DecayRow {
            t: g.t,
            l2: g.l2,
            h1: g.h1,
            h2: g.h2,
        })
        .collect();
    write_rows(&out.join("decay.csv"), &rows)?;

    let mut notes = Vec::new();
    let mut fits = Vec::new();
    for s in [0.0, 0.5, 1.0, 1.5, 2.0] {
        fits.push((s, fit_with_retry(&traj, NormSpec::Sobolev { s }, &d, &mut notes)?));
    }
    let slope = |s: f64| fits.iter().find(|f| f.0 == s).expect("fitted").1.slope;
    let bound = -d.delta() * d.lambda_min();
    summary.push(Check::at_most(
        "L2 slope vs -delta pi^2/L^2",
        slope(0.0),
        bound + tol.decay_slope,
    ));
    summary.push(Check::at_most("H1 slope negative", slope(1.0), 0.0));
    summary.push(Check::at_most("H2 slope negative", slope(2.0), 0.0));
    for (s, lo, hi) in [(0.5, 0.0, 1.0), (1.5, 1.0, 2.0)] {
        let theta = s - lo;
        let envelope = slope(lo) * (1.0 - theta) + slope(hi) * theta;
        summary.push(Check::at_most(
            format!("H^{s} slope within envelope"),
            slope(s),
            envelope + tol.fractional_slope,
        ));
    }
    summary.push(Check::at_most("L2 monotone", max_l2_increase(&traj), tol.l2_monotone));

    let constants = Constants::frozen();
    let h1 = threshold_time(&traj, constants.c1, &d);
    let h2 = threshold_time_h2(&traj, constants.c1, constants.c2, &d)?;
    summary.push(Check::at_most(
        "H1 functional violations past threshold",
        h1.violations.len() as f64 + if h1.time.is_none() { f64::INFINITY } else { 0.0 },
        0.0,
    ));
    summary.push(Check::at_most(
        "H2 functional violations past threshold",
        h2.violations.len() as f64 + if h2.time.is_none() { f64::INFINITY } else { 0.0 },
        0.0,
    ));
    summary.notes = notes;
    summary.details = json!({
        "fits": fits.iter().map(|(s, f)| json!({"s": s, "fit": f})).collect::<Vec<_>>(),
        "threshold_h1": h1,
        "threshold_h2": h2,
        "rate_bound": bound,
    });
    summary.write(&out.join("decay.json"))?;
    Ok(Outcome::from_summary(summary))
}

#[derive(Debug, Serialize)]
struct PicardRow {
    t0: f64,
    converged: bool,
    iterations: usize,
    max_ratio: f64,
    last_ratio: f64,
    etd2_difference: f64,
}

/// Contraction study: run the fixed-point iteration on `[0, t0]` for each
/// configured `t0` and compare the fixed point with the ETD2 solution.
pub fn cmd_picard(cfg: &RunConfig, profile: Profile, out: &Path) -> Result<Outcome> {
    let d = prepare(cfg, out)?;
    let tol = Tolerances::for_profile(profile);
    let s = symbol(&d);
    let flux = cfg.flux()?;
    let u0 = cfg.init.spectral(cfg.amplitude, &d)?;
    let mut summary = Summary::new("picard");
    let mut rows = Vec::new();
    for &t0 in &cfg.picard_t0 {
        let step_cfg = cfg.stepper(DiagnosticLevel::L2);
        match picard_solve(&u0, t0, &step_cfg, flux, &s, &d) {
            Ok(rep) => {
                let etd_cfg = StepperConfig {
                    scheme: Scheme::Etd2,
                    dt: t0 / rep.nodes as f64,
                    snapshot_stride: rep.nodes,
                    ..step_cfg
                };
                let reference = simulate_spectral(u0.clone(), rep.nodes, &etd_cfg, flux, &s, &d)?;
                let end = reference.final_field.as_ref().expect("final field");
                let diff = crate::dynamics::difference_l2(&rep.solution, end, &d);
                summary.push(Check::at_most(
                    format!("t0 = {t0}: ratios below one"),
                    rep.max_ratio(),
                    1.0 - 1e-12,
                ));
                summary.push(Check::at_most(
                    format!("t0 = {t0}: matches ETD2"),
                    diff,
                    tol.picard_match,
                ));
                rows.push(PicardRow {
                    t0,
                    converged: true,
                    iterations: rep.iterations,
                    max_ratio: rep.max_ratio(),
                    last_ratio: rep.ratios.last().copied().unwrap_or(0.0),
                    etd2_difference: diff,
                });
            }
            Err(Error::ContractionFailed {
                iterations, last_ratio, ..
            }) => {
                summary
                    .notes
                    .push(format!("t0 = {t0}: contraction failed after {iterations} iterations"));
                rows.push(PicardRow {
                    t0,
                    converged: false,
                    iterations,
                    max_ratio: f64::NAN,
                    last_ratio,
                    etd2_difference: f64::NAN,
                });
            }
            Err(e) => return Err(e),
        }
    }
    write_rows(&out.join("picard.csv"), &rows)?;
    if rows.iter().all(|r| !r.converged) {
        summary.passed = false;
        summary
            .notes
            .push("no t0 converged; use smaller amplitudes or smaller t0".into());
    }
    summary.details = json!({ "amplitude": cfg.amplitude });
    summary.write(&out.join("picard.json"))?;
    Ok(Outcome::from_summary(summary))
}
