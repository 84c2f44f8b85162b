//! Discrete audits of the energy identities: each identity is written as
//! `E(t) + int_0^t D = E(0) + int_0^t S` and its residual is evaluated on
//! the recorded time levels with trapezoidal time quadrature.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{DomainConfig, SpectralField};
use crate::error::{Error, Result};
use crate::trajectory::{
    weight_grad, weight_grad_dissipation, weight_hess, weight_hess_dissipation, DiagnosticLevel, StepDiagnostics,
    Trajectory,
};

/// Identities of the nonlinear equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Identity {
    /// `d/dt ||u||^2 + 2 delta ||Du||^2 = 0`.
    Mass,
    /// `d/dt ||Du||^2 + 2 delta int (u_xx^2 + 2u_xy^2 + u_yy^2) = 2 int u u_x (u_xx + u_yy)`.
    Gradient,
    /// Gradient identity combined with the cubic balance:
    /// `int (|Du|^2 - u^3/3)` plus `2 delta` times the gradient dissipation
    /// plus `delta int u^2 (u_xx + u_yy)` is conserved.
    Combined,
    /// `d/dt || |D^2 u| ||^2 + 2 delta || |D^3 u| ||^2_w = -2 int D^2(u u_x) : D^2 u`.
    Hessian,
}

impl Identity {
    pub const ALL: [Identity; 4] = [Self::Mass, Self::Gradient, Self::Combined, Self::Hessian];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mass => "mass",
            Self::Gradient => "h1",
            Self::Combined => "combined",
            Self::Hessian => "h2",
        }
    }

    /// Long-form identifier also accepted when parsing.
    pub fn long_name(&self) -> &'static str {
        match self {
            Self::Mass => "mass_3_3",
            Self::Gradient => "h1_3_15",
            Self::Combined => "combined_3_23",
            Self::Hessian => "h2_3_29",
        }
    }

    pub fn required_level(&self) -> DiagnosticLevel {
        match self {
            Self::Mass => DiagnosticLevel::L2,
            Self::Gradient | Self::Combined => DiagnosticLevel::H1,
            Self::Hessian => DiagnosticLevel::H2,
        }
    }
}

impl std::str::FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.name() == s || i.long_name() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Identities of the forced linear equation, `f = f0 + (f1)_x + (f2)_y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinearIdentity {
    Mass,
    Grad,
    Hess,
}

impl LinearIdentity {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Mass => "mass",
            Self::Grad => "grad",
            Self::Hess => "hess",
        }
    }
}

impl std::str::FromStr for LinearIdentity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mass" => Ok(Self::Mass),
            "grad" => Ok(Self::Grad),
            "hess" => Ok(Self::Hess),
            other => Err(Error::UnknownIdentity(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub identity: String,
    pub dt: f64,
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Largest value of `E(t)`, for judging the residual in relative terms.
    pub energy_scale: f64,
}

impl EnergyReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }
}

/// Observed convergence order between two runs whose steps differ by a
/// factor of two: `log2(coarse / fine)` of the maximal residuals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Refinement {
    pub dt_coarse: f64,
    pub dt_fine: f64,
    pub max_coarse: f64,
    pub max_fine: f64,
    pub factor: f64,
    pub order: f64,
}

pub fn refinement(coarse: &EnergyReport, fine: &EnergyReport) -> Refinement {
    let factor = coarse.max_residual / fine.max_residual;
    let ratio = coarse.dt / fine.dt;
    Refinement {
        dt_coarse: coarse.dt,
        dt_fine: fine.dt,
        max_coarse: coarse.max_residual,
        max_fine: fine.max_residual,
        factor,
        order: factor.ln() / ratio.ln(),
    }
}

/// Residual `|E(t_k) + int_0^{t_k} D - E(0) - int_0^{t_k} S|` with the
/// integrals accumulated by the trapezoid rule over the samples.
fn balance(identity: &str, times: &[f64], samples: &[(f64, f64, f64)]) -> Result<EnergyReport> {
    if times.len() < 3 {
        return Err(Error::TrajectoryTooShort(times.len()));
    }
    let e0 = samples[0].0;
    let mut integral = 0.0;
    let mut residuals = Vec::with_capacity(times.len());
    residuals.push(0.0);
    for k in 1..times.len() {
        let h = times[k] - times[k - 1];
        let (_, d0, s0) = samples[k - 1];
        let (_, d1, s1) = samples[k];
        integral += 0.5 * h * ((d0 - s0) + (d1 - s1));
        residuals.push((samples[k].0 + integral - e0).abs());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let energy_scale = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    Ok(EnergyReport {
        identity: identity.to_string(),
        dt: times[1] - times[0],
        times: times.to_vec(),
        residuals,
        max_residual,
        energy_scale,
    })
}

fn missing(identity: Identity, found: DiagnosticLevel) -> Error {
    Error::MissingDiagnostics {
        identity: identity.name().to_string(),
        needed: identity.required_level().to_string(),
        found: found.to_string(),
    }
}

fn sample(identity: Identity, g: &StepDiagnostics, delta: f64, level: DiagnosticLevel) -> Result<(f64, f64, f64)> {
    let need = |v: Option<f64>| v.ok_or_else(|| missing(identity, level));
    Ok(match identity {
        Identity::Mass => (g.energy0, 2.0 * delta * g.diss0, g.source0),
        Identity::Gradient => (need(g.energy1)?, 2.0 * delta * need(g.diss1)?, need(g.source1)?),
        Identity::Combined => (
            need(g.energy1)? - need(g.cubic)? / 3.0,
            2.0 * delta * need(g.diss1)? + delta * need(g.cubic_dissipation)?,
            0.0,
        ),
        Identity::Hessian => (need(g.energy2)?, 2.0 * delta * need(g.diss2)?, need(g.source2)?),
    })
}

/// Audit one identity of the nonlinear equation on a recorded trajectory.
pub fn audit_identity(traj: &Trajectory, identity: Identity, d: &DomainConfig) -> Result<EnergyReport> {
    if traj.level < identity.required_level() {
        return Err(missing(identity, traj.level));
    }
    let samples = traj
        .diagnostics
        .iter()
        .map(|g| sample(identity, g, d.delta(), traj.level))
        .collect::<Result<Vec<_>>>()?;
    balance(identity.name(), &traj.times, &samples)
}

/// Parse an identity name and audit it.
pub fn audit_identity_named(traj: &Trajectory, which: &str, d: &DomainConfig) -> Result<EnergyReport> {
    audit_identity(traj, which.parse()?, d)
}

/// Forcing in divergence form `f = f0 + (f1)_x + (f2)_y`, each component
/// given by its spectral samples in time.
pub struct ForcingDecomposition<'a> {
    pub f0: Box<dyn Fn(f64) -> SpectralField + 'a>,
    pub f1: Option<Box<dyn Fn(f64) -> SpectralField + 'a>>,
    pub f2: Option<Box<dyn Fn(f64) -> SpectralField + 'a>>,
}

/// `int_0^L sin(m pi y / L) (l pi / L) cos(l pi y / L) dy`, i.e. the pairing
/// of a sine mode with the y-derivative of another.
fn sine_cosine_pairing(m: usize, l: usize) -> f64 {
    if (m + l).is_multiple_of(2) {
        return 0.0;
    }
    let (m, l) = (m as f64, l as f64);
    2.0 * m * l / (m * m - l * l)
}

impl<'a> ForcingDecomposition<'a> {
    pub fn plain(f0: impl Fn(f64) -> SpectralField + 'a) -> Self {
        Self {
            f0: Box::new(f0),
            f1: None,
            f2: None,
        }
    }

    /// Sine coefficients of `f0 + (f1)_x + (f2)_y` at time `t`. The
    /// y-derivative of a sine series is projected back onto sines.
    pub fn compose(&self, t: f64, d: &DomainConfig) -> SpectralField {
        let mut f = (self.f0)(t);
        if let Some(f1) = &self.f1 {
            let g = f1(t);
            for ((idx, col), c) in f.coeffs.indexed_iter_mut() {
                *c += d.x_multiplier(idx, 1) * g.coeffs[[idx, col]];
            }
        }
        if let Some(f2) = &self.f2 {
            let g = f2(t);
            let ny = d.ny();
            // sine coefficient m of (f2)_y is (2/L) int (f2)_y sin(m pi y/L) dy
            let proj = Array2::from_shape_fn(d.shape(), |(idx, mcol)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for lcol in 0..ny {
                    acc += g.coeffs[[idx, lcol]] * sine_cosine_pairing(mcol + 1, lcol + 1);
                }
                acc * (2.0 / d.width())
            });
            f.coeffs += &proj;
        }
        f
    }

    /// `2 int int (f0 u - f1 u_x - f2 u_y)`, the forcing power in the mass
    /// identity.
    fn mass_power(&self, u: &SpectralField, t: f64, d: &DomainConfig) -> f64 {
        let one = |_: f64, _: f64| 1.0;
        let mut p = u.weighted_inner(&(self.f0)(t), d, one);
        if let Some(f1) = &self.f1 {
            let g = f1(t);
            let ux = SpectralField::new(Array2::from_shape_fn(d.shape(), |(idx, col)| {
                d.x_multiplier(idx, 1) * u.coeffs[[idx, col]]
            }));
            p -= ux.weighted_inner(&g, d, one);
        }
        if let Some(f2) = &self.f2 {
            let g = f2(t);
            let ny = d.ny();
            let mut acc = 0.0;
            for idx in 0..d.nx() {
                for mcol in 0..ny {
                    let a = g.coeffs[[idx, mcol]].conj();
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for lcol in 0..ny {
                        let w = sine_cosine_pairing(mcol + 1, lcol + 1);
                        if w != 0.0 {
                            acc += (a * u.coeffs[[idx, lcol]]).re * w;
                        }
                    }
                }
            }
            // x integral contributes 2X per Fourier row
            p -= 2.0 * d.half_period() * acc;
        }
        2.0 * p
    }
}

/// Audit one identity of the forced linear equation on a dense trajectory
/// produced by [`crate::semigroup::duhamel_solve`] with the composed forcing.
///
/// `mass` uses the divergence form of the forcing; `grad` and `hess` pair the
/// composed forcing with `(xi^2 + lambda) u` and the Hessian weight
/// respectively.
pub fn audit_linear_identity(
    traj: &Trajectory,
    which: LinearIdentity,
    forcing: &ForcingDecomposition<'_>,
    d: &DomainConfig,
) -> Result<EnergyReport> {
    if traj.len() < 3 {
        return Err(Error::TrajectoryTooShort(traj.len()));
    }
    if !traj.is_dense() {
        return Err(Error::InvalidConfig(
            "linear identity audit needs a snapshot at every step".into(),
        ));
    }
    let delta = d.delta();
    let samples = traj
        .snapshots
        .iter()
        .map(|snap| {
            let u = &snap.field;
            let t = snap.t;
            match which {
                LinearIdentity::Mass => (
                    u.weighted_energy(d, |_, _| 1.0),
                    2.0 * delta * u.weighted_energy(d, weight_grad),
                    forcing.mass_power(u, t, d),
                ),
                LinearIdentity::Grad => (
                    u.weighted_energy(d, weight_grad),
                    2.0 * delta * u.weighted_energy(d, weight_grad_dissipation),
                    2.0 * u.weighted_inner(&forcing.compose(t, d), d, weight_grad),
                ),
                LinearIdentity::Hess => (
                    u.weighted_energy(d, weight_hess),
                    2.0 * delta * u.weighted_energy(d, weight_hess_dissipation),
                    2.0 * u.weighted_inner(&forcing.compose(t, d), d, weight_hess),
                ),
            }
        })
        .collect::<Vec<_>>();
    balance(which.name(), &traj.times, &samples)
}
