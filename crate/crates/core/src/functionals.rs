//! Norms in the spectral basis, the Steklov inequality, interpolation
//! monitoring, decay-rate fits and the post-threshold Lyapunov checks.

use serde::{Deserialize, Serialize};

use crate::domain::{DomainConfig, GridField, SpectralField};
use crate::error::{Error, Result};
use crate::trajectory::{weight_sobolev, Trajectory};

/// Which norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormSpec {
    /// Full `H^s` norm with multiplier `(1 + xi^2 + lambda)^s`, `s` in `[0, 2]`.
    Sobolev { s: f64 },
    /// `|| |D^k u| ||_{L2}` with `|D^k u|^2 = sum_{k1 + k2 = k} (d_x^{k1} d_y^{k2} u)^2`,
    /// `k` in `{1, 2, 3}`.
    Seminorm { k: u32 },
}

impl NormSpec {
    pub fn l2() -> Self {
        Self::Sobolev { s: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Sobolev { s } if (0.0..=2.0).contains(&s) => Ok(()),
            Self::Sobolev { s } => Err(Error::InvalidNorm(format!("Sobolev exponent {s} outside [0, 2]"))),
            Self::Seminorm { k } if (1..=3).contains(&k) => Ok(()),
            Self::Seminorm { k } => Err(Error::InvalidNorm(format!("seminorm order {k} outside 1..=3"))),
        }
    }

    /// Squared multiplier as a function of `(xi^2, lambda)`.
    pub fn weight(&self) -> impl Fn(f64, f64) -> f64 {
        let spec = *self;
        move |xi2, lam| match spec {
            NormSpec::Sobolev { s } => weight_sobolev(s)(xi2, lam),
            NormSpec::Seminorm { k } => seminorm_weight(k, xi2, lam),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Sobolev { s } => format!("H^{s}"),
            Self::Seminorm { k } => format!("|D^{k}|"),
        }
    }
}

/// `sum_{a = 0}^{k} xi^{2a} lambda^{k - a}`.
pub fn seminorm_weight(k: u32, xi2: f64, lam: f64) -> f64 {
    let mut total = 0.0;
    let mut xp = 1.0;
    for a in 0..=k {
        total += xp * lam.powi((k - a) as i32);
        xp *= xi2;
    }
    total
}

pub fn norm(u: &SpectralField, spec: NormSpec, d: &DomainConfig) -> Result<f64> {
    spec.validate()?;
    Ok(u.weighted_energy(d, spec.weight()).sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SteklovCheck {
    /// `int int u_y^2`.
    pub lhs: f64,
    /// `(pi^2 / L^2) int int u^2`.
    pub rhs: f64,
    /// `(lhs - rhs) / rhs`, zero when `u = 0`.
    pub margin: f64,
}

impl SteklovCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

/// Compare `int int u_y^2` with `(pi/L)^2 int int u^2`. The excess is summed
/// mode by mode as `(lambda_l - lambda_1) |c|^2`, so it is nonnegative by
/// construction and exactly zero on the first eigenfunction.
pub fn steklov_check(u: &SpectralField, d: &DomainConfig) -> SteklovCheck {
    let lam1 = d.lambda_min();
    let lhs = u.weighted_energy(d, |_, lam| lam);
    let rhs = lam1 * u.weighted_energy(d, |_, _| 1.0);
    let excess = u.weighted_energy(d, |_, lam| lam - lam1);
    let margin = if rhs > 0.0 { excess / rhs } else { 0.0 };
    SteklovCheck { lhs, rhs, margin }
}

/// Pointwise `|D^m u|` on the grid.
pub fn gradient_magnitude(u: &SpectralField, m: u32, d: &DomainConfig) -> Result<GridField> {
    let mut acc: Option<GridField> = None;
    for px in 0..=m {
        let part = d.partial(u, px, m - px)?;
        let sq = part.values.mapv(|v| v * v);
        acc = Some(match acc {
            None => GridField::new(sq),
            Some(a) => GridField::new(a.values + sq),
        });
    }
    let total = acc.expect("m + 1 >= 1 terms");
    Ok(GridField::new(total.values.mapv(f64::sqrt)))
}

/// `(int int |f|^q)^{1/q}` by the tensor trapezoid rule of the grid.
pub fn lq_norm(f: &GridField, q: f64, d: &DomainConfig) -> f64 {
    let sum: f64 = f.values.iter().map(|v| v.abs().powf(q)).sum();
    (sum * d.cell_area()).powf(1.0 / q)
}

/// The interpolation exponent `s = (m + 1)/(2k) - 1/(k q)`.
pub fn interpolation_exponent(m: u32, k: u32, q: f64) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidInterpolation(format!("k = {k} must be 1, 2 or 3")));
    }
    if m >= k {
        return Err(Error::InvalidInterpolation(format!("m = {m} must be below k = {k}")));
    }
    if !(q >= 2.0) || !q.is_finite() {
        return Err(Error::InvalidInterpolation(format!("q = {q} must be finite and >= 2")));
    }
    Ok((m as f64 + 1.0) / (2.0 * k as f64) - 1.0 / (k as f64 * q))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InterpolationTerms {
    pub s: f64,
    /// `|| |D^m u| ||_{L_q}`.
    pub lhs: f64,
    /// `|| |D^k u| ||^{2s} ||u||^{1 - 2s}`.
    pub product: f64,
    pub l2: f64,
}

impl InterpolationTerms {
    /// `lhs / (product + ||u||)`, zero for `u = 0`.
    pub fn ratio(&self) -> f64 {
        let den = self.product + self.l2;
        if den > 0.0 {
            self.lhs / den
        } else {
            0.0
        }
    }

    /// `lhs / product`: the ratio without the additive `||u||` term.
    pub fn homogeneous_ratio(&self) -> f64 {
        if self.product > 0.0 {
            self.lhs / self.product
        } else {
            0.0
        }
    }
}

pub fn interpolation_terms(u: &SpectralField, m: u32, k: u32, q: f64, d: &DomainConfig) -> Result<InterpolationTerms> {
    let s = interpolation_exponent(m, k, q)?;
    let lhs = lq_norm(&gradient_magnitude(u, m, d)?, q, d);
    let top = norm(u, NormSpec::Seminorm { k }, d)?;
    let l2 = norm(u, NormSpec::l2(), d)?;
    let product = if top > 0.0 && l2 > 0.0 {
        top.powf(2.0 * s) * l2.powf(1.0 - 2.0 * s)
    } else {
        0.0
    };
    Ok(InterpolationTerms { s, lhs, product, l2 })
}

/// `|| |D^m u| ||_{L_q} / (|| |D^k u| ||^{2s} ||u||^{1-2s} + ||u||)`.
pub fn interpolation_ratio(u: &SpectralField, m: u32, k: u32, q: f64, d: &DomainConfig) -> Result<f64> {
    Ok(interpolation_terms(u, m, k, q, d)?.ratio())
}

/// `||u^2||_{L2}^2 / (int int (|Du|^2 + u^2) * int int u^2)`, the constant
/// in the product estimate used for `u^2` in the weak formulation.
pub fn product_ratio(u: &SpectralField, d: &DomainConfig) -> Result<f64> {
    let grid = d.to_grid(u)?;
    let quartic: f64 = grid.values.iter().map(|v| v.powi(4)).sum::<f64>() * d.cell_area();
    let l2sq = u.weighted_energy(d, |_, _| 1.0);
    let h1sq = u.weighted_energy(d, weight_sobolev(1.0));
    Ok(if l2sq > 0.0 { quartic / (h1sq * l2sq) } else { 0.0 })
}

/// `|int int u u_x (u_xx + u_yy)| / (int int (|D^2 u|^2 + u^2) * int int u^2)`.
pub fn cubic_gradient_ratio(u: &SpectralField, d: &DomainConfig) -> Result<f64> {
    let grid = d.to_grid(u)?;
    let ux = d.partial(u, 1, 0)?;
    let lap = {
        let a = d.partial(u, 2, 0)?;
        let b = d.partial(u, 0, 2)?;
        a.values + b.values
    };
    let num: f64 = grid
        .values
        .iter()
        .zip(ux.values.iter())
        .zip(lap.iter())
        .map(|((v, x), l)| v * x * l)
        .sum::<f64>()
        * d.cell_area();
    let l2sq = u.weighted_energy(d, |_, _| 1.0);
    let hess = u.weighted_energy(d, |a, b| seminorm_weight(2, a, b));
    Ok(if l2sq > 0.0 {
        num.abs() / ((hess + l2sq) * l2sq)
    } else {
        0.0
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub norm: String,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    /// Least-squares slope of `ln ||u(t)||`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of `ln ||u||` from the fitted line.
    pub residual: f64,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Time series of a norm along a trajectory. Full norms of order 0, 1, 2
/// and seminorms of order 1, 2 come from the per-step diagnostics; anything
/// else is evaluated on the stored snapshots.
pub fn norm_series(traj: &Trajectory, spec: NormSpec, d: &DomainConfig) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let from_diag = |f: &dyn Fn(&crate::trajectory::StepDiagnostics) -> Option<f64>| {
        traj.diagnostics
            .iter()
            .map(|g| f(g).map(|v| (g.t, v)))
            .collect::<Option<Vec<_>>>()
    };
    let diag = match spec {
        NormSpec::Sobolev { s: 0.0 } => from_diag(&|g| Some(g.l2)),
        NormSpec::Sobolev { s: 1.0 } => from_diag(&|g| Some(g.h1)),
        NormSpec::Sobolev { s: 2.0 } => from_diag(&|g| Some(g.h2)),
        NormSpec::Seminorm { k: 1 } => from_diag(&|g| Some(g.diss0.sqrt())),
        NormSpec::Seminorm { k: 2 } => from_diag(&|g| g.energy2.map(f64::sqrt)),
        _ => None,
    };
    if let Some(series) = diag {
        return Ok(series);
    }
    traj.snapshots
        .iter()
        .map(|snap| Ok((snap.t, norm(&snap.field, spec, d)?)))
        .collect()
}

/// Least-squares fit of `ln ||u(t)||` against `t` on `[t_a, t_b]`; the
/// default window is `[0.2 T, T]`.
pub fn decay_fit(traj: &Trajectory, spec: NormSpec, window: Option<(f64, f64)>, d: &DomainConfig) -> Result<DecayFit> {
    let series = norm_series(traj, spec, d)?;
    let t_end = traj.final_time();
    let (ta, tb) = window.unwrap_or((0.2 * t_end, t_end));
    if !(ta < tb) {
        return Err(Error::InvalidConfig(format!("empty fit window [{ta}, {tb}]")));
    }
    let eps = 1e-9 * tb.abs().max(1.0);
    let points: Vec<(f64, f64)> = series
        .into_iter()
        .filter(|(t, _)| *t >= ta - eps && *t <= tb + eps)
        .collect();
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            found: points.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    if let Some(&(t, _)) = points.iter().find(|(_, v)| !(*v > f64::MIN_POSITIVE) || !v.is_finite()) {
        return Err(Error::NormUnderflow { t });
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for &(t, v) in &points {
        stt += (t - mean_t) * (t - mean_t);
        sty += (t - mean_t) * (v.ln() - mean_y);
    }
    let slope = sty / stt;
    let intercept = mean_y - slope * mean_t;
    let residual = (points
        .iter()
        .map(|&(t, v)| (v.ln() - intercept - slope * t).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        norm: spec.label(),
        t_start: points[0].0,
        t_end: points[points.len() - 1].0,
        samples: points.len(),
        slope,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Violation {
    pub t: f64,
    /// Relative increase of the functional over one step.
    pub increase: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    /// Smallness level the controlling quantity must reach.
    pub level: f64,
    /// First recorded time at which it is reached, if any.
    pub time: Option<f64>,
    /// Steps after that time where the Lyapunov functional increased by more
    /// than the slack.
    pub violations: Vec<Violation>,
    pub max_increase: f64,
    pub slack: f64,
}

impl ThresholdReport {
    pub fn passed(&self) -> bool {
        self.time.is_some() && self.violations.is_empty()
    }
}

fn monotone_after(times: &[f64], control: &[f64], functional: &[f64], level: f64, slack: f64) -> ThresholdReport {
    let start = control.iter().position(|&v| v <= level);
    let mut violations = Vec::new();
    let mut max_increase = f64::NEG_INFINITY;
    if let Some(k0) = start {
        for k in k0 + 1..functional.len() {
            let prev = functional[k - 1];
            let increase = if prev > 0.0 {
                (functional[k] - prev) / prev
            } else {
                functional[k] - prev
            };
            max_increase = max_increase.max(increase);
            if increase > slack {
                violations.push(Violation { t: times[k], increase });
            }
        }
    }
    ThresholdReport {
        level,
        time: start.map(|k| times[k]),
        violations,
        max_increase,
        slack,
    }
}

/// Relative step-to-step slack allowed in the Lyapunov checks.
pub const LYAPUNOV_SLACK: f64 = 1e-10;

/// First time with `||u||^2 <= min(delta/(2 c1), delta pi^2/(2 c1 L^2))`
/// and the check that `int int (|Du|^2 + u^2)` does not increase afterwards.
pub fn threshold_time(traj: &Trajectory, c1: f64, d: &DomainConfig) -> ThresholdReport {
    let delta = d.delta();
    let level = (delta / (2.0 * c1)).min(delta * d.lambda_min() / (2.0 * c1));
    let control: Vec<f64> = traj.diagnostics.iter().map(|g| g.energy0).collect();
    let functional: Vec<f64> = traj.diagnostics.iter().map(|g| g.h1_functional()).collect();
    monotone_after(&traj.times, &control, &functional, level, LYAPUNOV_SLACK)
}

/// Second-order analogue: once `int int (|Du|^2 + u^2)` is below
/// `min(delta/(2 c1), delta pi^2/(2 c1 L^2), delta/(2 c2))`, the functional
/// `int int (|D^2 u|^2 + |Du|^2 + u^2)` must not increase.
pub fn threshold_time_h2(traj: &Trajectory, c1: f64, c2: f64, d: &DomainConfig) -> Result<ThresholdReport> {
    let delta = d.delta();
    let level = (delta / (2.0 * c1))
        .min(delta * d.lambda_min() / (2.0 * c1))
        .min(delta / (2.0 * c2));
    let control: Vec<f64> = traj.diagnostics.iter().map(|g| g.h1_functional()).collect();
    let functional = traj
        .diagnostics
        .iter()
        .map(|g| g.h2_functional())
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::MissingDiagnostics {
            identity: "h2 threshold".into(),
            needed: "H2".into(),
            found: traj.level.to_string(),
        })?;
    Ok(monotone_after(
        &traj.times,
        &control,
        &functional,
        level,
        LYAPUNOV_SLACK,
    ))
}

/// Largest relative step-to-step increase of the L2 norm.
pub fn max_l2_increase(traj: &Trajectory) -> f64 {
    traj.diagnostics
        .windows(2)
        .map(|w| {
            if w[0].l2 > 0.0 {
                (w[1].l2 - w[0].l2) / w[0].l2
            } else {
                w[1].l2 - w[0].l2
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Constants that the estimates leave unquantified, measured once on the
/// calibration corpus and frozen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Interpolation constant for `m = 0, k = 1, q = 4`.
    pub interpolation_c: f64,
    /// `||u^2||^2 <= C (int int (|Du|^2 + u^2)) (int int u^2)`.
    pub product_c: f64,
    /// `|int int u u_x (u_xx + u_yy)| <= c1 int int (|D^2 u|^2 + u^2) int int u^2`.
    pub c1: f64,
    /// `(S2)_+ <= c2 int int (|Du|^2 + u^2) int int |D^2 u|^2` along runs, where
    /// `S2` is the nonlinear source of the H2 energy balance.
    pub c2: f64,
    /// Bound on the H2 norm at the smoothing time for the rough-data run.
    pub h2_smoothing_bound: f64,
}

const FROZEN: &str = include_str!("../constants.toml");

impl Constants {
    pub fn frozen() -> Self {
        toml::from_str(FROZEN).expect("constants.toml is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::plan_domain;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn d() -> DomainConfig {
        plan_domain(PI, 4.0 * PI, 32, 12, 0.5).unwrap()
    }

    #[test]
    fn eigenfunction_norms() {
        let d = d();
        let u = d.to_spectral(&GridField::from_fn(&d, |_, y| y.sin())).unwrap();
        let l2 = norm(&u, NormSpec::l2(), &d).unwrap();
        assert!((l2 * l2 - d.half_period() * PI).abs() < 1e-12);
        let d1 = norm(&u, NormSpec::Seminorm { k: 1 }, &d).unwrap();
        assert!((d1 * d1 - l2 * l2).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        let d = d();
        let u = SpectralField::zeros(&d);
        assert!(norm(&u, NormSpec::Sobolev { s: 2.5 }, &d).is_err());
        assert!(norm(&u, NormSpec::Sobolev { s: -0.1 }, &d).is_err());
        assert!(norm(&u, NormSpec::Seminorm { k: 0 }, &d).is_err());
        assert!(norm(&u, NormSpec::Seminorm { k: 4 }, &d).is_err());
    }

    #[test]
    fn seminorm_weights_follow_pointwise_definition() {
        assert_eq!(seminorm_weight(1, 2.0, 3.0), 5.0);
        assert_eq!(seminorm_weight(2, 2.0, 3.0), 4.0 + 6.0 + 9.0);
        assert_eq!(seminorm_weight(3, 2.0, 3.0), 8.0 + 12.0 + 18.0 + 27.0);
    }

    #[test]
    fn steklov_examples() {
        let d = d();
        let first = d
            .to_spectral(&GridField::from_fn(&d, |x, y| (1.0 + 0.3 * (x / 4.0).cos()) * y.sin()))
            .unwrap();
        let c = steklov_check(&first, &d);
        assert!(c.margin.abs() <= 1e-13);
        assert!((c.lhs - c.rhs).abs() <= 1e-13 * c.rhs);
        let second = SpectralField::real_mode(&d, 0, 2, Complex64::new(1.0, 0.0));
        let c = steklov_check(&second, &d);
        assert!((c.lhs / c.rhs - 4.0).abs() < 1e-14);
        let zero = steklov_check(&SpectralField::zeros(&d), &d);
        assert_eq!(zero.margin, 0.0);
    }

    #[test]
    fn interpolation_degenerate_and_invalid() {
        let d = d();
        assert_eq!(
            interpolation_ratio(&SpectralField::zeros(&d), 0, 1, 4.0, &d).unwrap(),
            0.0
        );
        assert!(interpolation_exponent(1, 1, 4.0).is_err());
        assert!(interpolation_exponent(0, 1, 1.5).is_err());
        assert!(interpolation_exponent(0, 1, f64::INFINITY).is_err());
        assert!((interpolation_exponent(0, 1, 4.0).unwrap() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn frozen_constants_load() {
        let c = Constants::frozen();
        assert!(c.c1 > 0.0 && c.c2 > 0.0 && c.product_c > 0.0 && c.interpolation_c > 0.0);
    }
}
