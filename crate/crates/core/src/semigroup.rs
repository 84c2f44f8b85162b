//! Exact propagator of the linear equation
//! `u_t + u_xxx + u_xyy - delta (u_xx + u_yy) = f`, diagonal in the
//! Fourier x sine basis, and the Duhamel solver for forced problems.

use ndarray::Array2;
use num_complex::Complex64;

use crate::domain::{DomainConfig, SpectralField};
use crate::error::{Error, Result};
use crate::phi::{phi1, phi2, phi3};
use crate::trajectory::{DiagnosticLevel, StepDiagnostics, Trajectory};

/// Per-mode symbol `m(j, l) = i (xi^3 + xi lambda) - delta (xi^2 + lambda)`.
///
/// The unpaired Nyquist row keeps only its real (dissipative) part so the
/// propagator maps real fields to real fields.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub m: Array2<Complex64>,
}

pub fn symbol(d: &DomainConfig) -> SymbolTable {
    let nyquist = d.nyquist_row();
    let m = Array2::from_shape_fn(d.shape(), |(idx, col)| {
        let xi = d.xi(idx);
        let lam = d.lambda(col);
        let dispersion = if idx == nyquist { 0.0 } else { xi * xi * xi + xi * lam };
        Complex64::new(-d.delta() * (xi * xi + lam), dispersion)
    });
    SymbolTable { m }
}

impl SymbolTable {
    /// Largest real part over the table (the slowest decay rate, negated).
    pub fn max_real(&self) -> f64 {
        self.m.iter().fold(f64::NEG_INFINITY, |a, z| a.max(z.re))
    }

    /// `exp(m t)` for every mode.
    pub fn exponential(&self, t: f64) -> Array2<Complex64> {
        self.m.mapv(|z| (z * t).exp())
    }
}

/// Multiply every coefficient by `exp(m t)`.
pub fn apply_semigroup(u: &SpectralField, t: f64, s: &SymbolTable) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if u.coeffs.dim() != s.m.dim() {
        return Err(Error::ShapeMismatch {
            expected: s.m.dim(),
            found: u.coeffs.dim(),
        });
    }
    let mut out = u.clone();
    out.coeffs.zip_mut_with(&s.m, |c, z| *c *= (z * t).exp());
    Ok(out)
}

/// Per-mode weights of one exponential-quadrature step over `[t, t + h]`
/// with the forcing interpolated quadratically through `t`, `t + h/2`,
/// `t + h`:
///
/// `u(t+h) = e^{mh} u(t) + h (w0 f(t) + wm f(t+h/2) + w1 f(t+h))`.
#[derive(Debug, Clone)]
pub struct DuhamelWeights {
    pub propagator: Array2<Complex64>,
    pub w_start: Array2<Complex64>,
    pub w_mid: Array2<Complex64>,
    pub w_end: Array2<Complex64>,
}

impl DuhamelWeights {
    pub fn new(s: &SymbolTable, h: f64) -> Self {
        let dim = s.m.dim();
        let mut propagator = Array2::zeros(dim);
        let mut w_start = Array2::zeros(dim);
        let mut w_mid = Array2::zeros(dim);
        let mut w_end = Array2::zeros(dim);
        for ((i, j), &m) in s.m.indexed_iter() {
            let z = m * h;
            let (p1, p2, p3) = (phi1(z), phi2(z), phi3(z));
            propagator[[i, j]] = z.exp();
            w_start[[i, j]] = (p1 - p2 * 3.0 + p3 * 4.0) * h;
            w_mid[[i, j]] = (p2 * 4.0 - p3 * 8.0) * h;
            w_end[[i, j]] = (p3 * 4.0 - p2) * h;
        }
        Self {
            propagator,
            w_start,
            w_mid,
            w_end,
        }
    }

    pub fn step(&self, u: &SpectralField, f0: &SpectralField, fm: &SpectralField, f1: &SpectralField) -> SpectralField {
        let coeffs = Array2::from_shape_fn(u.coeffs.dim(), |ix| {
            self.propagator[ix] * u.coeffs[ix]
                + self.w_start[ix] * f0.coeffs[ix]
                + self.w_mid[ix] * fm.coeffs[ix]
                + self.w_end[ix] * f1.coeffs[ix]
        });
        SpectralField { coeffs }
    }
}

fn checked_sample(forcing: &dyn Fn(f64) -> SpectralField, t: f64) -> Result<SpectralField> {
    let f = forcing(t);
    if !f.all_finite() {
        return Err(Error::NonFiniteForcing { t });
    }
    Ok(f)
}

/// Number of steps of size `dt` covering `[0, t_end]`; `dt` must divide
/// `t_end`.
pub fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::NegativeTime(t_end));
    }
    let n = (t_end / dt).round();
    if (n * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
        return Err(Error::InvalidConfig(format!("dt = {dt} does not divide T = {t_end}")));
    }
    Ok(n as usize)
}

/// Solve the forced linear problem on `[0, t_end]` by per-mode exponential
/// quadrature. The forcing is sampled at step boundaries and midpoints; the
/// scheme is exact for forcing that is quadratic in time on each step.
/// Every step is stored as a snapshot, and diagnostics record the forcing
/// power `2 <w u, f>` as the source term.
pub fn duhamel_solve(
    u0: &SpectralField,
    forcing: &dyn Fn(f64) -> SpectralField,
    t_end: f64,
    dt: f64,
    s: &SymbolTable,
    d: &DomainConfig,
) -> Result<Trajectory> {
    d.check_shape(u0.coeffs.dim())?;
    let steps = step_count(t_end, dt)?;
    let weights = DuhamelWeights::new(s, dt);

    let mut traj = Trajectory::new(DiagnosticLevel::H2, 1);
    let mut u = u0.clone();
    let mut f_start = checked_sample(forcing, 0.0)?;
    traj.push(0.0, StepDiagnostics::linear(&u, Some(&f_start), d, 0.0, 0), Some(&u));
    for k in 0..steps {
        let t = k as f64 * dt;
        let t_next = (k + 1) as f64 * dt;
        let f_mid = checked_sample(forcing, t + 0.5 * dt)?;
        let f_end = checked_sample(forcing, t_next)?;
        u = weights.step(&u, &f_start, &f_mid, &f_end);
        traj.push(
            t_next,
            StepDiagnostics::linear(&u, Some(&f_end), d, t_next, 1),
            Some(&u),
        );
        f_start = f_end;
    }
    Ok(traj)
}
