//! Time series of spectral snapshots and per-step energy diagnostics.

use serde::Serialize;

use crate::domain::{DomainConfig, SpectralField};

/// How much is recorded per step. Higher levels add the quantities needed by
/// the H1 and H2 energy identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DiagnosticLevel {
    L2,
    H1,
    H2,
}

impl std::fmt::Display for DiagnosticLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DiagnosticLevel::L2 => "L2",
            DiagnosticLevel::H1 => "H1",
            DiagnosticLevel::H2 => "H2",
        };
        f.write_str(s)
    }
}

// Spectral weights as functions of (xi^2, lambda).

/// `|D u|^2 = u_x^2 + u_y^2`.
pub fn weight_grad(xi2: f64, lam: f64) -> f64 {
    xi2 + lam
}

/// `|D^2 u|^2 = u_xx^2 + u_xy^2 + u_yy^2`.
pub fn weight_hess(xi2: f64, lam: f64) -> f64 {
    xi2 * xi2 + xi2 * lam + lam * lam
}

/// `u_xx^2 + 2 u_xy^2 + u_yy^2`, the dissipation of the gradient energy.
pub fn weight_grad_dissipation(xi2: f64, lam: f64) -> f64 {
    let s = xi2 + lam;
    s * s
}

/// `u_xxx^2 + 2 u_xxy^2 + 2 u_xyy^2 + u_yyy^2`, the dissipation of the
/// Hessian energy.
pub fn weight_hess_dissipation(xi2: f64, lam: f64) -> f64 {
    (xi2 + lam) * weight_hess(xi2, lam)
}

/// Sobolev multiplier `(1 + xi^2 + lambda)^s`.
pub fn weight_sobolev(s: f64) -> impl Fn(f64, f64) -> f64 {
    move |xi2, lam| {
        let base = 1.0 + xi2 + lam;
        if s == 0.0 {
            1.0
        } else if s == 1.0 {
            base
        } else if s == 2.0 {
            base * base
        } else {
            base.powf(s)
        }
    }
}

/// Quantities recorded at one time level.
///
/// `energy*` are `||u||^2`, `||Du||^2`, `|| |D^2 u| ||^2`; `diss*` their
/// dissipation densities (without the `2 delta` factor); `source*` the
/// rate `2 <w u, F>` contributed by the right-hand side `F` (nonlinear term
/// or forcing) in the matching weight.
#[derive(Debug, Clone, Serialize)]
pub struct StepDiagnostics {
    pub t: f64,
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub energy0: f64,
    pub diss0: f64,
    pub source0: f64,
    pub energy1: Option<f64>,
    pub diss1: Option<f64>,
    pub source1: Option<f64>,
    pub energy2: Option<f64>,
    pub diss2: Option<f64>,
    pub source2: Option<f64>,
    /// `int int g(u) u_x dx dy`.
    pub nonlin_flux: f64,
    /// `int int u^3 dx dy`.
    pub cubic: Option<f64>,
    /// `int int u^2 (u_xx + u_yy) dx dy`.
    pub cubic_dissipation: Option<f64>,
    pub step_iters: usize,
}

impl StepDiagnostics {
    /// Spectral quantities only; `rhs` is the right-hand side whose power is
    /// recorded as the source terms.
    pub fn spectral(
        u: &SpectralField,
        rhs: Option<&SpectralField>,
        d: &DomainConfig,
        level: DiagnosticLevel,
        t: f64,
        step_iters: usize,
    ) -> Self {
        let energy0 = u.weighted_energy(d, |_, _| 1.0);
        let grad = u.weighted_energy(d, weight_grad);
        let h2 = u.weighted_energy(d, weight_sobolev(2.0)).sqrt();
        let source = |w: &dyn Fn(f64, f64) -> f64| rhs.map_or(0.0, |f| 2.0 * u.weighted_inner(f, d, w));

        let mut diag = Self {
            t,
            l2: energy0.sqrt(),
            h1: (energy0 + grad).sqrt(),
            h2,
            energy0,
            diss0: grad,
            source0: source(&|_, _| 1.0),
            energy1: None,
            diss1: None,
            source1: None,
            energy2: None,
            diss2: None,
            source2: None,
            nonlin_flux: 0.0,
            cubic: None,
            cubic_dissipation: None,
            step_iters,
        };
        if level >= DiagnosticLevel::H1 {
            diag.energy1 = Some(grad);
            diag.diss1 = Some(u.weighted_energy(d, weight_grad_dissipation));
            diag.source1 = Some(source(&weight_grad));
        }
        if level >= DiagnosticLevel::H2 {
            diag.energy2 = Some(u.weighted_energy(d, weight_hess));
            diag.diss2 = Some(u.weighted_energy(d, weight_hess_dissipation));
            diag.source2 = Some(source(&weight_hess));
        }
        diag
    }

    /// Diagnostics of a linear trajectory, forced by `forcing`.
    pub fn linear(u: &SpectralField, forcing: Option<&SpectralField>, d: &DomainConfig, t: f64, iters: usize) -> Self {
        Self::spectral(u, forcing, d, DiagnosticLevel::H2, t, iters)
    }

    /// `int int (|Du|^2 + u^2)`, the H1 Lyapunov functional.
    pub fn h1_functional(&self) -> f64 {
        self.h1 * self.h1
    }

    /// `int int (|D^2 u|^2 + |Du|^2 + u^2)`, if recorded.
    pub fn h2_functional(&self) -> Option<f64> {
        Some(self.energy2? + self.diss0 + self.energy0)
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub field: SpectralField,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlowupEvent {
    pub time: f64,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub level: DiagnosticLevel,
    pub stride: usize,
    pub final_field: Option<SpectralField>,
    pub blowup: Option<BlowupEvent>,
}

impl Trajectory {
    pub fn new(level: DiagnosticLevel, stride: usize) -> Self {
        Self {
            times: Vec::new(),
            diagnostics: Vec::new(),
            snapshots: Vec::new(),
            level,
            stride: stride.max(1),
            final_field: None,
            blowup: None,
        }
    }

    /// Append one time level; the field is kept as a snapshot every `stride`
    /// steps and always as the final field.
    pub fn push(&mut self, t: f64, diag: StepDiagnostics, field: Option<&SpectralField>) {
        let step = self.times.len();
        self.times.push(t);
        self.diagnostics.push(diag);
        if let Some(f) = field {
            if step.is_multiple_of(self.stride) {
                self.snapshots.push(Snapshot {
                    step,
                    t,
                    field: f.clone(),
                });
            }
            self.final_field = Some(f.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// True when every step has a stored snapshot.
    pub fn is_dense(&self) -> bool {
        self.stride == 1 && self.snapshots.len() == self.times.len()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}
