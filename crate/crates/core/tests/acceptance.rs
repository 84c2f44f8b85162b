//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Reference values come from closed forms evaluated here (propagator,
//! Duhamel integrals, decay rates) and from energy balances recomputed from
//! the recorded diagnostics with an independent time quadrature.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zkb_core::config::RunConfig;
use zkb_core::domain::{DomainConfig, GridField, SpectralField};
use zkb_core::dynamics::{picard_solve, simulate, simulate_spectral, Scheme, StepperConfig};
use zkb_core::experiments::{cmd_simulate, Profile};
use zkb_core::flux::RegularizedFlux;
use zkb_core::functionals::Constants;
use zkb_core::initial::InitialData;
use zkb_core::semigroup::{apply_semigroup, duhamel_solve, symbol};
use zkb_core::trajectory::{DiagnosticLevel, Trajectory};

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---- independent reference quantities ----

fn xi_of(d: &DomainConfig, idx: usize) -> f64 {
    PI * d.frequency(idx) as f64 / d.half_period()
}

fn lambda_of(d: &DomainConfig, col: usize) -> f64 {
    let k = PI * (col + 1) as f64 / d.width();
    k * k
}

/// `sum w(xi^2, lambda) |c|^2`, up to the constant basis weight.
fn spectral_sum(u: &SpectralField, d: &DomainConfig, w: impl Fn(f64, f64) -> f64) -> f64 {
    let (nx, ny) = d.shape();
    let mut total = 0.0;
    for idx in 0..nx {
        let xi = xi_of(d, idx);
        for col in 0..ny {
            total += w(xi * xi, lambda_of(d, col)) * u.coeffs[[idx, col]].norm_sqr();
        }
    }
    total
}

fn sobolev_norm(u: &SpectralField, d: &DomainConfig, s: f64) -> f64 {
    spectral_sum(u, d, |xi2, lam| (1.0 + xi2 + lam).powf(s)).sqrt()
}

/// Least-squares slope of `ln y` against `t`.
fn log_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let mt = samples.iter().map(|p| p.0).sum::<f64>() / n;
    let my = samples.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|p| (p.0 - mt) * (p.1.ln() - my)).sum();
    let sxx: f64 = samples.iter().map(|p| (p.0 - mt).powi(2)).sum();
    sxy / sxx
}

fn window(samples: &[(f64, f64)], t0: f64, t1: f64) -> Vec<(f64, f64)> {
    samples
        .iter()
        .copied()
        .filter(|p| p.0 >= t0 - 1e-12 && p.0 <= t1 + 1e-12)
        .collect()
}

/// Exact linear evolution of the real mode `a e^{i xi x} sin(l pi y/L) + c.c.`
/// on the grid.
fn exact_mode(d: &DomainConfig, j: i64, l: usize, a: Complex64, t: f64) -> GridField {
    let xi = PI * j as f64 / d.half_period();
    let k = PI * l as f64 / d.width();
    let lam = k * k;
    let growth = Complex64::new(-d.delta() * (xi * xi + lam) * t, (xi * xi * xi + xi * lam) * t).exp();
    GridField::from_fn(d, |x, y| {
        let w = a * growth * Complex64::new(0.0, xi * x).exp();
        let re = if j == 0 { (a * growth).re } else { 2.0 * w.re };
        re * (k * y).sin()
    })
}

fn max_rel(a: &GridField, b: &GridField) -> f64 {
    let diff = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    diff / b.max_abs().max(f64::MIN_POSITIVE)
}

/// `int_0^t e^{m (t - s)} p(s) ds` in closed form for the forcing profiles.
enum Profile0 {
    Constant,
    /// Coefficients of `sum c_k s^k`.
    Polynomial(Vec<f64>),
    /// `sin(w s + phase)`.
    Trig {
        w: f64,
        phase: f64,
    },
}

impl Profile0 {
    fn value(&self, s: f64) -> f64 {
        match self {
            Profile0::Constant => 1.0,
            Profile0::Polynomial(c) => c.iter().rev().fold(0.0, |acc, ck| acc * s + ck),
            Profile0::Trig { w, phase } => (w * s + phase).sin(),
        }
    }

    fn convolve(&self, m: Complex64, t: f64) -> Complex64 {
        let emt = (m * t).exp();
        match self {
            Profile0::Constant => (emt - 1.0) / m,
            Profile0::Polynomial(c) => {
                // int_0^t e^{m(t-s)} s^k ds = k!/m^{k+1} e^{mt} - sum_i k!/(k-i)! t^{k-i}/m^{i+1}
                let mut total = Complex64::new(0.0, 0.0);
                for (k, ck) in c.iter().enumerate() {
                    let fact = |n: usize| (1..=n).product::<usize>() as f64;
                    let mut term = fact(k) / m.powu(k as u32 + 1) * emt;
                    for i in 0..=k {
                        term -= fact(k) / fact(k - i) * t.powi((k - i) as i32) / m.powu(i as u32 + 1);
                    }
                    total += *ck * term;
                }
                total
            }
            Profile0::Trig { w, phase } => {
                let i = Complex64::new(0.0, 1.0);
                let part = |sgn: f64| {
                    let th = i * sgn * *w;
                    (i * sgn * *phase).exp() * ((th * t).exp() - emt) / (th - m)
                };
                (part(1.0) - part(-1.0)) / (2.0 * i)
            }
        }
    }
}

/// Time-integrated balance `|E(t_k) - E(0) - int_0^{t_k} (S - 2 delta D)|`
/// with the trapezoid rule; returns the largest residual.
fn balance_residual(times: &[f64], energy: &[f64], rate: &[f64]) -> f64 {
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    for k in 1..times.len() {
        integral += 0.5 * (times[k] - times[k - 1]) * (rate[k] + rate[k - 1]);
        worst = worst.max((energy[k] - energy[0] - integral).abs());
    }
    worst
}

fn mass_residual(traj: &Trajectory, delta: f64, t_max: f64) -> f64 {
    let g: Vec<_> = traj.diagnostics.iter().filter(|g| g.t <= t_max + 1e-12).collect();
    let times: Vec<f64> = g.iter().map(|g| g.t).collect();
    let energy: Vec<f64> = g.iter().map(|g| g.energy0).collect();
    let rate: Vec<f64> = g.iter().map(|g| -2.0 * delta * g.diss0).collect();
    balance_residual(&times, &energy, &rate)
}

fn hessian_residual(traj: &Trajectory, delta: f64, t_max: f64) -> f64 {
    let g: Vec<_> = traj.diagnostics.iter().filter(|g| g.t <= t_max + 1e-12).collect();
    let times: Vec<f64> = g.iter().map(|g| g.t).collect();
    let energy: Vec<f64> = g.iter().map(|g| g.energy2.expect("H2 level")).collect();
    let rate: Vec<f64> = g
        .iter()
        .map(|g| g.source2.expect("H2 level") - 2.0 * delta * g.diss2.expect("H2 level"))
        .collect();
    balance_residual(&times, &energy, &rate)
}

/// First recorded time at which `control <= level`, and the largest
/// relative increase of `functional` from then on.
fn lyapunov_after(times: &[f64], control: &[f64], functional: &[f64], level: f64) -> Option<(f64, f64)> {
    let start = control.iter().position(|&c| c <= level)?;
    let worst = functional[start..]
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Some((times[start], worst))
}

// ---- shared runs ----

struct Runs {
    cfg: RunConfig,
    d: DomainConfig,
    /// Default scenario to `T = 8` at the default step.
    long: Trajectory,
    /// Default scenario to `T = 1` at twice the default step.
    coarse: Trajectory,
    /// Library initial data at unit amplitude, `T = 2`.
    library: Vec<(String, Trajectory)>,
    /// Exact eigenmode run.
    eigen: Trajectory,
}

const LONG_T: f64 = 8.0;
const AUDIT_T: f64 = 1.0;

fn run(cfg: &RunConfig, d: &DomainConfig, init: &InitialData, amplitude: f64, t_end: f64, dt: f64) -> Trajectory {
    let step = StepperConfig {
        dt,
        snapshot_stride: ((0.1 / dt).round() as usize).max(1),
        ..cfg.stepper(DiagnosticLevel::H2)
    };
    let traj = simulate(&init.grid(amplitude, d).unwrap(), t_end, &step, cfg.flux().unwrap(), d).unwrap();
    assert!(traj.blowup.is_none(), "{} blew up", init.name());
    traj
}

impl Runs {
    fn new() -> Self {
        let cfg = RunConfig::default();
        let d = cfg.domain().unwrap();
        let long = run(&cfg, &d, &cfg.init, cfg.amplitude, LONG_T, cfg.dt);
        let coarse = run(&cfg, &d, &cfg.init, cfg.amplitude, AUDIT_T, 2.0 * cfg.dt);
        let library_data = [
            InitialData::TravelingMode { j: 4, l: 1 },
            InitialData::GaussianBump {
                x0: 5.0,
                sigma_x: 4.0,
                l: 2,
            },
            InitialData::RandomBand {
                seed: 3,
                jmax: 8,
                lmax: 4,
            },
        ];
        let library = library_data
            .iter()
            .map(|g| (g.name().to_string(), run(&cfg, &d, g, 1.0, 2.0, 2e-3)))
            .collect();
        let eigen = run(&cfg, &d, &InitialData::Eigenmode { l: 1 }, 1.0, 2.0, 1e-2);
        Self {
            cfg,
            d,
            long,
            coarse,
            library,
            eigen,
        }
    }

    fn all(&self) -> Vec<&Trajectory> {
        let mut v = vec![&self.long, &self.coarse, &self.eigen];
        v.extend(self.library.iter().map(|(_, t)| t));
        v
    }
}

// ---- criteria ----

fn c1_linear_propagator(d: &DomainConfig) -> Outcome {
    let s = symbol(d);
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mode = |rng: &mut ChaCha8Rng| {
        let j = rng.random_range(-32i64..=32);
        let l = rng.random_range(1usize..=12);
        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        (j, l, a)
    };
    let times = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0];
    let mut worst: f64 = 0.0;
    let mut cases: Vec<Vec<(i64, usize, Complex64)>> = (0..20).map(|_| vec![mode(&mut rng)]).collect();
    cases.extend((0..5).map(|_| (0..5).map(|_| mode(&mut rng)).collect()));
    for modes in &cases {
        let mut u0 = SpectralField::zeros(d);
        for &(j, l, a) in modes {
            u0.coeffs += &SpectralField::real_mode(d, j, l, a).coeffs;
        }
        for &t in &times {
            let got = d.to_grid(&apply_semigroup(&u0, t, &s).unwrap()).unwrap();
            let mut exact = GridField::zeros(d);
            for &(j, l, a) in modes {
                exact.values += &exact_mode(d, j, l, a, t).values;
            }
            worst = worst.max(max_rel(&got, &exact));
        }
    }
    verdict(worst <= 1e-10, format!("max relative error {worst:.2e} (limit 1e-10)"))
}

fn c2_duhamel(d: &DomainConfig) -> Outcome {
    let s = symbol(d);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let modes: Vec<(i64, usize, Complex64)> = [(0, 1), (1, 1), (3, 2), (-2, 3), (6, 1), (10, 4)]
        .iter()
        .map(|&(j, l)| {
            let a = Complex64::new(
                rng.random_range(-1.0..1.0),
                if j == 0 { 0.0 } else { rng.random_range(-1.0..1.0) },
            );
            (j, l, a)
        })
        .collect();
    let profiles = [
        ("constant", Profile0::Constant),
        ("polynomial", Profile0::Polynomial(vec![1.0, 0.5, -0.75, 0.2])),
        (
            "random smooth",
            Profile0::Trig {
                w: rng.random_range(0.5..3.0),
                phase: rng.random_range(0.0..6.0),
            },
        ),
    ];
    let dt = 1e-2;
    let mut report = Vec::new();
    let mut ok = true;
    for (name, p) in &profiles {
        let forcing = |t: f64| {
            let mut f = SpectralField::zeros(d);
            for &(j, l, a) in &modes {
                f.coeffs += &SpectralField::real_mode(d, j, l, a * p.value(t)).coeffs;
            }
            f
        };
        let traj = duhamel_solve(&SpectralField::zeros(d), &forcing, 1.0, dt, &s, d).unwrap();
        let (mut diff, mut scale) = (0.0, 0.0);
        for snap in traj.snapshots.iter().filter(|sn| sn.step % 25 == 0 && sn.step > 0) {
            for &(j, l, a) in &modes {
                let xi = PI * j as f64 / d.half_period();
                let lam = (PI * l as f64 / d.width()).powi(2);
                let m = Complex64::new(-d.delta() * (xi * xi + lam), xi * xi * xi + xi * lam);
                let exact = a * p.convolve(m, snap.t);
                let got = snap.field.get(d, j, l);
                diff += (got - exact).norm_sqr();
                scale += exact.norm_sqr();
            }
        }
        let rel = (diff / scale).sqrt();
        ok &= rel <= 1e-8;
        report.push(format!("{name} {rel:.2e}"));
    }
    verdict(ok, format!("{} (limit 1e-8)", report.join(", ")))
}

fn c3_mass(r: &Runs) -> Outcome {
    let delta = r.d.delta();
    let fine = mass_residual(&r.long, delta, AUDIT_T);
    let coarse = mass_residual(&r.coarse, delta, AUDIT_T);
    let factor = coarse / fine;
    verdict(
        (3.0..=5.0).contains(&factor) && fine <= 1e-6,
        format!("residual {fine:.2e} at dt=1e-3 (limit 1e-6), halving factor {factor:.3} (window [3, 5])"),
    )
}

fn c4_flux(r: &Runs) -> Outcome {
    let worst = r
        .all()
        .iter()
        .flat_map(|t| t.diagnostics.iter())
        .map(|g| g.nonlin_flux.abs() / g.l2.powi(3).max(1.0))
        .fold(0.0, f64::max);
    verdict(
        worst <= 1e-10,
        format!("max |flux| / max(1, |u|^3) = {worst:.2e} (limit 1e-10)"),
    )
}

fn l2_series(t: &Trajectory) -> Vec<(f64, f64)> {
    t.diagnostics.iter().map(|g| (g.t, g.l2)).collect()
}

fn c5_l2_decay(r: &Runs) -> Outcome {
    let rate = -r.d.delta() * PI * PI / (r.d.width() * r.d.width());
    let eig = l2_series(&r.eigen);
    let eig_slope = log_slope(&window(&eig, 0.4, 2.0));
    let mut ok = (eig_slope - rate).abs() <= 1e-6;
    let mut worst_slope = f64::NEG_INFINITY;
    let mut runs: Vec<&Trajectory> = r.library.iter().map(|(_, t)| t).collect();
    runs.push(&r.long);
    for t in &runs {
        let series = l2_series(t);
        let t_end = t.final_time();
        worst_slope = worst_slope.max(log_slope(&window(&series, 0.2 * t_end, t_end)));
    }
    ok &= worst_slope <= rate + 1e-3;
    let worst_increase = r
        .all()
        .iter()
        .flat_map(|t| t.diagnostics.windows(2).map(|w| (w[1].l2 - w[0].l2) / w[0].l2))
        .fold(f64::NEG_INFINITY, f64::max);
    ok &= worst_increase <= 1e-12;
    verdict(
        ok,
        format!(
            "eigenmode slope error {:.2e}, worst library slope {worst_slope:.4} (bound {:.4}), max L2 increase {worst_increase:.2e}",
            (eig_slope - rate).abs(),
            rate + 1e-3
        ),
    )
}

fn c6_steklov(r: &Runs) -> Outcome {
    let d = &r.d;
    let lam1 = lambda_of(d, 0);
    let margin = |u: &SpectralField| {
        let lhs = spectral_sum(u, d, |_, lam| lam);
        let rhs = lam1 * spectral_sum(u, d, |_, _| 1.0);
        (lhs - rhs) / rhs
    };
    let worst = r
        .all()
        .iter()
        .flat_map(|t| t.snapshots.iter())
        .map(|s| margin(&s.field))
        .fold(f64::INFINITY, f64::min);
    let first = d
        .to_spectral(&GridField::from_fn(d, |_, y| (PI * y / d.width()).sin()))
        .unwrap();
    let equality = margin(&first).abs();
    verdict(
        worst >= -1e-13 && equality <= 1e-13,
        format!("worst relative margin {worst:.3e} (limit -1e-13), first eigenfunction {equality:.1e}"),
    )
}

fn h1_threshold_level(d: &DomainConfig, c: &Constants) -> f64 {
    (d.delta() / (2.0 * c.c1)).min(d.delta() * lambda_of(d, 0) / (2.0 * c.c1))
}

fn c7_h1(r: &Runs, c: &Constants) -> Outcome {
    let t = &r.long;
    let l2sq: Vec<f64> = t.diagnostics.iter().map(|g| g.l2 * g.l2).collect();
    let functional: Vec<f64> = t.diagnostics.iter().map(|g| g.energy0 + g.diss0).collect();
    let Some((t1, worst)) = lyapunov_after(&t.times, &l2sq, &functional, h1_threshold_level(&r.d, c)) else {
        return Err("threshold not reached".into());
    };
    let series: Vec<(f64, f64)> = t
        .snapshots
        .iter()
        .map(|s| (s.t, sobolev_norm(&s.field, &r.d, 1.0)))
        .collect();
    let t_end = t.final_time();
    let slope = log_slope(&window(&series, t1.max(0.2 * t_end), t_end));
    verdict(
        worst <= 1e-10 && slope < 0.0,
        format!(
            "threshold t = {t1}, max relative increase after it {worst:.2e} (slack 1e-10), tail H1 slope {slope:.4}"
        ),
    )
}

fn c8_h2(r: &Runs, c: &Constants) -> Outcome {
    let t = &r.long;
    let level = h1_threshold_level(&r.d, c).min(r.d.delta() / (2.0 * c.c2));
    let control: Vec<f64> = t.diagnostics.iter().map(|g| g.energy0 + g.diss0).collect();
    let functional: Vec<f64> = t
        .diagnostics
        .iter()
        .map(|g| g.energy2.expect("H2 level") + g.diss0 + g.energy0)
        .collect();
    let Some((t2, worst)) = lyapunov_after(&t.times, &control, &functional, level) else {
        return Err("threshold not reached".into());
    };
    let series: Vec<(f64, f64)> = t
        .snapshots
        .iter()
        .map(|s| (s.t, sobolev_norm(&s.field, &r.d, 2.0)))
        .collect();
    let t_end = t.final_time();
    let slope = log_slope(&window(&series, t2.max(0.2 * t_end), t_end));
    let delta = r.d.delta();
    let factor = hessian_residual(&r.coarse, delta, AUDIT_T) / hessian_residual(&r.long, delta, AUDIT_T);
    let order = factor.log2();
    verdict(
        worst <= 1e-10 && slope < 0.0 && (1.7..=2.3).contains(&order),
        format!(
            "threshold t = {t2}, max relative increase {worst:.2e}, tail H2 slope {slope:.4}, H2 balance order {order:.3} (window [1.7, 2.3])"
        ),
    )
}

fn c9_picard(r: &Runs) -> Outcome {
    let d = &r.d;
    let s = symbol(d);
    let flux = r.cfg.flux().unwrap();
    let u0 = r.cfg.init.spectral(0.1, d).unwrap();
    let base = r.cfg.stepper(DiagnosticLevel::L2);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_diff: f64 = 0.0;
    for t0 in [0.0125, 0.025, 0.05] {
        let rep = match picard_solve(&u0, t0, &base, flux, &s, d) {
            Ok(rep) => rep,
            Err(e) => return Err(format!("t0 = {t0}: {e}")),
        };
        worst_ratio = worst_ratio.max(rep.max_ratio());
        let etd = StepperConfig {
            scheme: Scheme::Etd2,
            dt: t0 / rep.nodes as f64,
            ..base.clone()
        };
        let reference = simulate_spectral(u0.clone(), rep.nodes, &etd, flux, &s, d).unwrap();
        let end = reference.final_field.expect("final field");
        let diff = (spectral_sum(&SpectralField::new(&rep.solution.coeffs - &end.coeffs), d, |_, _| 1.0)
            * d.half_period()
            * d.width())
        .sqrt();
        worst_diff = worst_diff.max(diff);
    }
    verdict(
        worst_ratio < 1.0 && worst_diff <= 1e-6,
        format!("max successive ratio {worst_ratio:.3e} (< 1), max ETD2 difference {worst_diff:.2e} (limit 1e-6)"),
    )
}

fn c10_regularization(r: &Runs) -> Outcome {
    let d = &r.d;
    let peak = r
        .long
        .snapshots
        .iter()
        .map(|s| d.to_grid(&s.field).unwrap().max_abs())
        .fold(0.0, f64::max);
    let h = (1.0 / (2.0 * peak)).min(1.0);
    let u0 = r.cfg.init.grid(r.cfg.amplitude, d).unwrap();
    let step = r.cfg.stepper(DiagnosticLevel::L2);
    let t_end = 0.5;
    let plain = simulate(&u0, t_end, &step, RegularizedFlux::Quadratic, d).unwrap();
    let reg = simulate(&u0, t_end, &step, RegularizedFlux::regularized(h).unwrap(), d).unwrap();
    let a = plain.final_field.unwrap();
    let b = reg.final_field.unwrap();
    let diff = (spectral_sum(&SpectralField::new(&a.coeffs - &b.coeffs), d, |_, _| 1.0)
        / spectral_sum(&a, d, |_, _| 1.0))
    .sqrt();
    let series = plain
        .diagnostics
        .iter()
        .zip(reg.diagnostics.iter())
        .map(|(p, q)| (p.l2 - q.l2).abs() / p.l2)
        .fold(diff, f64::max);
    verdict(
        series <= 1e-10,
        format!("h = {h:.4} (max|u| = {peak:.4}), max relative difference {series:.2e} (limit 1e-10)"),
    )
}

fn c11_fractional(r: &Runs) -> Outcome {
    let t = &r.long;
    let t_end = t.final_time();
    let slope = |s: f64| {
        let series: Vec<(f64, f64)> = t
            .snapshots
            .iter()
            .map(|sn| (sn.t, sobolev_norm(&sn.field, &r.d, s)))
            .collect();
        log_slope(&window(&series, 0.2 * t_end, t_end))
    };
    let beta: Vec<f64> = [0.0, 1.0, 2.0].iter().map(|&s| slope(s)).collect();
    let mut ok = true;
    let mut report = Vec::new();
    for (s, lo) in [(0.5, 0usize), (1.5, 1usize)] {
        let theta = s - lo as f64;
        let envelope = beta[lo] * (1.0 - theta) + beta[lo + 1] * theta;
        let got = slope(s);
        ok &= got <= envelope + 2e-3;
        report.push(format!("s={s}: {got:.5} vs envelope {envelope:.5}"));
    }
    verdict(ok, format!("{} (slack 2e-3)", report.join(", ")))
}

fn c12_determinism() -> Outcome {
    let cfg = RunConfig {
        t_end: 0.2,
        ..RunConfig::default()
    };
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        cmd_simulate(&cfg, Profile::Strict, dir.path()).map_err(|e| e.to_string())?;
        outputs.push(std::fs::read(dir.path().join("diagnostics.csv")).map_err(|e| e.to_string())?);
    }
    verdict(
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!(
            "diagnostics.csv {} bytes, identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let constants = Constants::frozen();
    let runs = Runs::new();
    println!("shared runs ready in {:.1}s", start.elapsed().as_secs_f64());
    let d = runs.d.clone();
    type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("linear propagator exactness", Box::new(|| c1_linear_propagator(&d))),
        ("Duhamel correctness", Box::new(|| c2_duhamel(&d))),
        ("mass identity", Box::new(|| c3_mass(&runs))),
        ("flux orthogonality", Box::new(|| c4_flux(&runs))),
        ("L2 decay", Box::new(|| c5_l2_decay(&runs))),
        ("Steklov/Poincare", Box::new(|| c6_steklov(&runs))),
        ("H1 decay", Box::new(|| c7_h1(&runs, &constants))),
        ("H2 decay", Box::new(|| c8_h2(&runs, &constants))),
        ("Picard contraction", Box::new(|| c9_picard(&runs))),
        ("regularization consistency", Box::new(|| c10_regularization(&runs))),
        ("fractional decay envelope", Box::new(|| c11_fractional(&runs))),
        ("determinism", Box::new(c12_determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} pass  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
