//! Nonlinear evolution: the dealiased flux term, the ETD2 integrator, the
//! Picard fixed-point solver for the Duhamel map, and trajectory recording.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainConfig, GridField, SpectralField, YParity};
use crate::error::{Error, Result};
use crate::flux::RegularizedFlux;
use crate::phi::{phi1, phi2};
use crate::semigroup::{step_count, symbol, SymbolTable};
use crate::trajectory::{BlowupEvent, DiagnosticLevel, StepDiagnostics, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Explicit second-order exponential Runge-Kutta (predictor-corrector).
    Etd2,
    /// Implicit exponential trapezoid step solved by fixed-point iteration.
    Picard,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "etd2" => Ok(Self::Etd2),
            "picard" => Ok(Self::Picard),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Etd2 => "etd2",
            Self::Picard => "picard",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// 2/3-rule truncation of the nonlinear term in both directions.
    pub dealias: bool,
    pub snapshot_stride: usize,
    pub level: DiagnosticLevel,
    /// Blowup is flagged when the L2 norm exceeds this multiple of the
    /// initial one.
    pub blowup_guard: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Etd2,
            dt: 1e-3,
            picard_tol: 1e-12,
            picard_max_iter: 50,
            dealias: true,
            snapshot_stride: 100,
            level: DiagnosticLevel::H2,
            blowup_guard: 1e6,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidStep(self.dt));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "picard_tol must be positive, got {}",
                self.picard_tol
            )));
        }
        if self.picard_max_iter < 2 {
            return Err(Error::InvalidConfig(format!(
                "picard_max_iter must be >= 2, got {}",
                self.picard_max_iter
            )));
        }
        if !(self.blowup_guard > 1.0) {
            return Err(Error::InvalidConfig("blowup guard must exceed 1".into()));
        }
        Ok(())
    }
}

/// Modes retained by the 2/3 rule: `3|j| < nx` and `3 l < 2 (ny + 1)`.
#[derive(Debug, Clone)]
pub struct DealiasMask {
    keep_x: Vec<bool>,
    keep_y: Vec<bool>,
}

impl DealiasMask {
    pub fn two_thirds(d: &DomainConfig) -> Self {
        let nx = d.nx() as i64;
        let ny = d.ny();
        let keep_x = (0..d.nx()).map(|idx| 3 * d.frequency(idx).abs() < nx).collect();
        let keep_y = (1..=ny).map(|l| 3 * l < 2 * (ny + 1)).collect();
        Self { keep_x, keep_y }
    }

    /// Keeps everything except the unpaired Nyquist row.
    pub fn nyquist_only(d: &DomainConfig) -> Self {
        let keep_x = (0..d.nx()).map(|idx| idx != d.nyquist_row()).collect();
        Self {
            keep_x,
            keep_y: vec![true; d.ny()],
        }
    }

    pub fn for_config(d: &DomainConfig, dealias: bool) -> Self {
        if dealias {
            Self::two_thirds(d)
        } else {
            Self::nyquist_only(d)
        }
    }

    pub fn keeps(&self, idx: usize, col: usize) -> bool {
        self.keep_x[idx] && self.keep_y[col]
    }

    pub fn apply(&self, s: &mut SpectralField) {
        for ((idx, col), c) in s.coeffs.indexed_iter_mut() {
            if !self.keeps(idx, col) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Grid data produced while evaluating the nonlinear term; reused for
/// diagnostics.
#[derive(Debug, Clone)]
pub struct NonlinearEval {
    pub u: GridField,
    pub g: GridField,
    /// Spectral coefficients of `-(g(u))_x`, truncated by the mask.
    pub rhs: SpectralField,
}

pub(crate) fn evaluate_nonlinear(
    u: &SpectralField,
    flux: RegularizedFlux,
    mask: &DealiasMask,
    d: &DomainConfig,
) -> Result<NonlinearEval> {
    let grid = d.synthesize(&u.coeffs, YParity::Sine);
    if !grid.all_finite() {
        return Err(Error::NonFinite {
            context: "nonlinear term",
        });
    }
    if flux.is_zero() {
        return Ok(NonlinearEval {
            g: GridField::zeros(d),
            u: grid,
            rhs: SpectralField::zeros(d),
        });
    }
    let g = GridField::new(grid.values.mapv(|v| flux.value(v)));
    let mut rhs = d.to_spectral(&g)?;
    for ((idx, col), c) in rhs.coeffs.indexed_iter_mut() {
        *c = if mask.keeps(idx, col) {
            -d.x_multiplier(idx, 1) * *c
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    Ok(NonlinearEval { u: grid, g, rhs })
}

/// Spectral coefficients of `-(g(u))_x`, computed pseudospectrally.
pub fn nonlinear_term(
    u: &SpectralField,
    flux: RegularizedFlux,
    cfg: &StepperConfig,
    d: &DomainConfig,
) -> Result<SpectralField> {
    d.check_shape(u.coeffs.dim())?;
    let defect = u.hermitian_defect(d);
    if defect > 1e-12 * u.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { defect });
    }
    let mask = DealiasMask::for_config(d, cfg.dealias);
    Ok(evaluate_nonlinear(u, flux, &mask, d)?.rhs)
}

/// Per-mode coefficients `exp(m h)`, `h phi_1(m h)`, `h phi_2(m h)`.
#[derive(Debug, Clone)]
pub struct EtdCoefficients {
    pub h: f64,
    pub propagator: Array2<Complex64>,
    pub phi1: Array2<Complex64>,
    pub phi2: Array2<Complex64>,
}

impl EtdCoefficients {
    pub fn new(s: &SymbolTable, h: f64) -> Self {
        let propagator = s.m.mapv(|m| (m * h).exp());
        let p1 = s.m.mapv(|m| phi1(m * h) * h);
        let p2 = s.m.mapv(|m| phi2(m * h) * h);
        Self {
            h,
            propagator,
            phi1: p1,
            phi2: p2,
        }
    }
}

/// Time stepper bound to one domain, flux and configuration.
pub struct Stepper<'a> {
    d: &'a DomainConfig,
    cfg: StepperConfig,
    flux: RegularizedFlux,
    mask: DealiasMask,
    coeffs: EtdCoefficients,
    guard_reference: Option<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(d: &'a DomainConfig, s: &SymbolTable, cfg: &StepperConfig, flux: RegularizedFlux) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            d,
            cfg: cfg.clone(),
            flux,
            mask: DealiasMask::for_config(d, cfg.dealias),
            coeffs: EtdCoefficients::new(s, cfg.dt),
            guard_reference: None,
        })
    }

    /// Fix the L2 norm that the blowup guard is measured against.
    pub fn with_guard_reference(mut self, l2: f64) -> Self {
        self.guard_reference = Some(l2);
        self
    }

    pub fn mask(&self) -> &DealiasMask {
        &self.mask
    }

    pub fn eval(&self, u: &SpectralField) -> Result<NonlinearEval> {
        evaluate_nonlinear(u, self.flux, &self.mask, self.d)
    }

    fn check_guard(&self, u: &SpectralField, reference: f64, time: f64) -> Result<()> {
        let norm = u.l2_norm(self.d);
        let guard = self.cfg.blowup_guard * reference;
        if !norm.is_finite() || (reference > 0.0 && norm > guard) {
            return Err(Error::Blowup { time, norm, guard });
        }
        Ok(())
    }

    fn combine(&self, u: &SpectralField, n0: &SpectralField) -> SpectralField {
        let c = &self.coeffs;
        let coeffs = Array2::from_shape_fn(u.coeffs.dim(), |ix| {
            c.propagator[ix] * u.coeffs[ix] + c.phi1[ix] * n0.coeffs[ix]
        });
        SpectralField { coeffs }
    }

    /// One ETD2 step given the nonlinear term at `u`.
    pub fn etd2_advance(&self, u: &SpectralField, n_u: &SpectralField, t: f64) -> Result<SpectralField> {
        let predictor = self.combine(u, n_u);
        let n_pred = self.eval(&predictor)?.rhs;
        let mut next = predictor;
        for ((c, a), b) in next
            .coeffs
            .iter_mut()
            .zip(self.coeffs.phi2.iter())
            .zip(n_pred.coeffs.iter().zip(n_u.coeffs.iter()))
        {
            *c += a * (b.0 - b.1);
        }
        let reference = self.guard_reference.unwrap_or_else(|| u.l2_norm(self.d));
        self.check_guard(&next, reference, t + self.coeffs.h)?;
        Ok(next)
    }

    /// One ETD2 step from `u`.
    pub fn etd2_step(&self, u: &SpectralField) -> Result<SpectralField> {
        let n_u = self.eval(u)?.rhs;
        self.etd2_advance(u, &n_u, 0.0)
    }

    /// One implicit exponential-trapezoid step,
    /// `u+ = e^{mh} u + h phi_1 N(u) + h phi_2 (N(u+) - N(u))`,
    /// solved by fixed-point iteration. Returns the new state and the
    /// iteration count.
    pub fn picard_advance(&self, u: &SpectralField, n_u: &SpectralField, t: f64) -> Result<(SpectralField, usize)> {
        let c = &self.coeffs;
        let base = self.combine(u, n_u);
        let mut iterate = base.clone();
        let mut last_ratio = f64::NAN;
        let mut prev_diff = f64::INFINITY;
        for iter in 1..=self.cfg.picard_max_iter {
            let n_v = self.eval(&iterate)?.rhs;
            let coeffs = Array2::from_shape_fn(u.coeffs.dim(), |ix| {
                base.coeffs[ix] + c.phi2[ix] * (n_v.coeffs[ix] - n_u.coeffs[ix])
            });
            let next = SpectralField { coeffs };
            let diff = difference_l2(&next, &iterate, self.d);
            iterate = next;
            if diff < self.cfg.picard_tol {
                let reference = self.guard_reference.unwrap_or_else(|| u.l2_norm(self.d));
                self.check_guard(&iterate, reference, t + c.h)?;
                return Ok((iterate, iter));
            }
            last_ratio = diff / prev_diff;
            prev_diff = diff;
            if !diff.is_finite() {
                break;
            }
        }
        Err(Error::ContractionFailed {
            t0: c.h,
            iterations: self.cfg.picard_max_iter,
            last_ratio,
        })
    }
}

/// One ETD2 step (exact linear part, `phi_1`-predictor, `phi_2`-corrector).
pub fn etd2_step(
    u: &SpectralField,
    cfg: &StepperConfig,
    flux: RegularizedFlux,
    s: &SymbolTable,
    d: &DomainConfig,
) -> Result<SpectralField> {
    d.check_shape(u.coeffs.dim())?;
    Stepper::new(d, s, cfg, flux)?.etd2_step(u)
}

/// Result of iterating the Duhamel fixed-point map on `[0, t0]`.
#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    pub t0: f64,
    pub nodes: usize,
    pub iterations: usize,
    /// Successive-difference norms `max_k ||v^{n}(t_k) - v^{n-1}(t_k)||_{L2}`.
    pub differences: Vec<f64>,
    /// `differences[n] / differences[n - 1]`.
    pub ratios: Vec<f64>,
    #[serde(skip)]
    pub solution: SpectralField,
}

impl PicardReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Fixed point of `v -> S(t) u0 + int_0^t S(t - s) N(v(s)) ds` on `[0, t0]`.
///
/// Time is discretized into steps of at most `cfg.dt`; the Duhamel integral
/// uses the piecewise-linear (exponential trapezoid) quadrature of the
/// nonlinear term. Iteration starts from `v = 0` and stops when the
/// successive difference in `max_t ||.||_{L2}` drops below `picard_tol`.
pub fn picard_solve(
    u0: &SpectralField,
    t0: f64,
    cfg: &StepperConfig,
    flux: RegularizedFlux,
    s: &SymbolTable,
    d: &DomainConfig,
) -> Result<PicardReport> {
    cfg.validate()?;
    d.check_shape(u0.coeffs.dim())?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidConfig(format!("t0 must be positive, got {t0}")));
    }
    let nodes = ((t0 / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = t0 / nodes as f64;
    let step_cfg = StepperConfig { dt: h, ..cfg.clone() };
    let stepper = Stepper::new(d, s, &step_cfg, flux)?;
    let c = &stepper.coeffs;

    let mut iterate = vec![SpectralField::zeros(d); nodes + 1];
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    for iteration in 1..=cfg.picard_max_iter {
        let forcing = iterate
            .iter()
            .map(|v| stepper.eval(v).map(|e| e.rhs))
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(nodes + 1);
        next.push(u0.clone());
        for k in 0..nodes {
            let prev = &next[k];
            let coeffs = Array2::from_shape_fn(u0.coeffs.dim(), |ix| {
                c.propagator[ix] * prev.coeffs[ix]
                    + c.phi1[ix] * forcing[k].coeffs[ix]
                    + c.phi2[ix] * (forcing[k + 1].coeffs[ix] - forcing[k].coeffs[ix])
            });
            next.push(SpectralField { coeffs });
        }
        let diff = next
            .iter()
            .zip(iterate.iter())
            .map(|(a, b)| difference_l2(a, b, d))
            .fold(0.0, f64::max);
        if let Some(&prev) = differences.last() {
            ratios.push(diff / prev);
        }
        differences.push(diff);
        iterate = next;
        if diff < cfg.picard_tol {
            return Ok(PicardReport {
                t0,
                nodes,
                iterations: iteration,
                differences,
                ratios,
                solution: iterate.pop().expect("at least one node"),
            });
        }
        if !diff.is_finite() || ratios.last().is_some_and(|r| *r > 1.0 && diff > 1e3 * differences[0]) {
            break;
        }
    }
    Err(Error::ContractionFailed {
        t0,
        iterations: differences.len(),
        last_ratio: ratios.last().copied().unwrap_or(f64::NAN),
    })
}

/// `||a - b||_{L2}`.
pub fn difference_l2(a: &SpectralField, b: &SpectralField, d: &DomainConfig) -> f64 {
    SpectralField {
        coeffs: &a.coeffs - &b.coeffs,
    }
    .l2_norm(d)
}

fn record(
    u: &SpectralField,
    eval: &NonlinearEval,
    d: &DomainConfig,
    level: DiagnosticLevel,
    t: f64,
    iters: usize,
) -> StepDiagnostics {
    let mut diag = StepDiagnostics::spectral(u, Some(&eval.rhs), d, level, t, iters);
    let area = d.cell_area();
    let ux = d.synthesize(&multiplied(u, d, |idx, _| d.x_multiplier(idx, 1)), YParity::Sine);
    diag.nonlin_flux = eval
        .g
        .values
        .iter()
        .zip(ux.values.iter())
        .map(|(g, v)| g * v)
        .sum::<f64>()
        * area;
    if level >= DiagnosticLevel::H1 {
        let lap = d.synthesize(
            &multiplied(u, d, |idx, col| {
                Complex64::new(-(d.xi(idx) * d.xi(idx) + d.lambda(col)), 0.0)
            }),
            YParity::Sine,
        );
        diag.cubic = Some(eval.u.values.iter().map(|v| v * v * v).sum::<f64>() * area);
        diag.cubic_dissipation = Some(
            eval.u
                .values
                .iter()
                .zip(lap.values.iter())
                .map(|(v, l)| v * v * l)
                .sum::<f64>()
                * area,
        );
    }
    diag
}

fn multiplied(u: &SpectralField, d: &DomainConfig, f: impl Fn(usize, usize) -> Complex64) -> Array2<Complex64> {
    let _ = d;
    Array2::from_shape_fn(u.coeffs.dim(), |(idx, col)| f(idx, col) * u.coeffs[[idx, col]])
}

/// Integrate from `u0` to `t_end`, recording diagnostics at every step.
///
/// The initial data is projected onto the retained modes (2/3 rule when
/// dealiasing, otherwise only the Nyquist row is dropped). A blowup or
/// non-finite state stops the run and is flagged on the trajectory.
pub fn simulate(
    u0: &GridField,
    t_end: f64,
    cfg: &StepperConfig,
    flux: RegularizedFlux,
    d: &DomainConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !u0.all_finite() {
        return Err(Error::NonFinite {
            context: "initial data",
        });
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidConfig(format!("T must be positive, got {t_end}")));
    }
    let steps = step_count(t_end, cfg.dt)?;
    let s = symbol(d);
    let mut u = d.to_spectral(u0)?;
    let mask = DealiasMask::for_config(d, cfg.dealias);
    mask.apply(&mut u);
    u.enforce_hermitian(d);

    simulate_spectral(u, steps, cfg, flux, &s, d)
}

/// As [`simulate`], from spectral data used as given.
pub fn simulate_spectral(
    u0: SpectralField,
    steps: usize,
    cfg: &StepperConfig,
    flux: RegularizedFlux,
    s: &SymbolTable,
    d: &DomainConfig,
) -> Result<Trajectory> {
    let stepper = Stepper::new(d, s, cfg, flux)?.with_guard_reference(u0.l2_norm(d));
    let mut traj = Trajectory::new(cfg.level, cfg.snapshot_stride);
    let mut u = u0;
    let mut eval = stepper.eval(&u)?;
    traj.push(0.0, record(&u, &eval, d, cfg.level, 0.0, 0), Some(&u));

    for k in 0..steps {
        let t = k as f64 * cfg.dt;
        let t_next = (k + 1) as f64 * cfg.dt;
        let advanced = match cfg.scheme {
            Scheme::Etd2 => stepper.etd2_advance(&u, &eval.rhs, t).map(|v| (v, 1)),
            Scheme::Picard => stepper.picard_advance(&u, &eval.rhs, t),
        };
        let next_eval = advanced.and_then(|(v, iters)| stepper.eval(&v).map(|e| (v, iters, e)));
        match next_eval {
            Ok((v, iters, e)) => {
                u = v;
                eval = e;
                traj.push(t_next, record(&u, &eval, d, cfg.level, t_next, iters), Some(&u));
            }
            Err(Error::Blowup { time, norm, .. }) => {
                traj.blowup = Some(BlowupEvent { time, norm });
                break;
            }
            Err(Error::NonFinite { .. }) => {
                traj.blowup = Some(BlowupEvent {
                    time: t_next,
                    norm: f64::NAN,
                });
                break;
            }
            Err(other) => return Err(other),
        }
    }
    Ok(traj)
}
