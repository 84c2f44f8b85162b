//! Library of initial data. Every generator is a finite sine series in `y`,
//! so the Dirichlet conditions hold by construction.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainConfig, GridField, SpectralField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// `A sin(l pi y / L)`.
    Eigenmode { l: usize },
    /// `A cos(xi_j x) sin(l pi y / L)`.
    TravelingMode { j: i64, l: usize },
    /// `A exp(-((x - x0)/sigma_x)^2) sin(l pi y / L)`.
    GaussianBump { x0: f64, sigma_x: f64, l: usize },
    /// Random Hermitian coefficients on `|j| <= jmax`, `l <= lmax`, scaled
    /// so that `max |u| = A` on the grid.
    RandomBand { seed: u64, jmax: i64, lmax: usize },
}

/// Seam amplitude above which a Gaussian bump is rejected.
pub const SEAM_TOLERANCE: f64 = 1e-12;

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Eigenmode { .. } => "eigenmode",
            Self::TravelingMode { .. } => "traveling_mode",
            Self::GaussianBump { .. } => "gaussian_bump",
            Self::RandomBand { .. } => "random_band",
        }
    }

    pub fn validate(&self, d: &DomainConfig) -> Result<()> {
        let check_l = |l: usize| {
            if l == 0 || l > d.ny() {
                Err(Error::InvalidConfig(format!(
                    "sine mode l = {l} outside 1..={}",
                    d.ny()
                )))
            } else {
                Ok(())
            }
        };
        let check_j = |j: i64| {
            if j.abs() >= d.nx() as i64 / 2 {
                Err(Error::InvalidConfig(format!(
                    "frequency j = {j} not resolved by nx = {}",
                    d.nx()
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            Self::Eigenmode { l } => check_l(l),
            Self::TravelingMode { j, l } => {
                check_j(j)?;
                check_l(l)
            }
            Self::GaussianBump { x0, sigma_x, l } => {
                check_l(l)?;
                if !(sigma_x > 0.0) {
                    return Err(Error::InvalidConfig(format!("sigma_x must be positive, got {sigma_x}")));
                }
                let seam = seam_amplitude(x0, sigma_x, d);
                if seam >= SEAM_TOLERANCE {
                    return Err(Error::InvalidConfig(format!(
                        "gaussian bump has amplitude {seam:.3e} at the periodic seam; narrow it or enlarge X"
                    )));
                }
                Ok(())
            }
            Self::RandomBand { jmax, lmax, .. } => {
                check_j(jmax)?;
                check_l(lmax)?;
                if jmax < 0 {
                    return Err(Error::InvalidConfig("jmax must be nonnegative".into()));
                }
                Ok(())
            }
        }
    }

    /// Grid values with amplitude `amplitude`.
    pub fn grid(&self, amplitude: f64, d: &DomainConfig) -> Result<GridField> {
        self.validate(d)?;
        let width = d.width();
        let ky = |l: usize| std::f64::consts::PI * l as f64 / width;
        Ok(match *self {
            Self::Eigenmode { l } => {
                let k = ky(l);
                GridField::from_fn(d, |_, y| amplitude * (k * y).sin())
            }
            Self::TravelingMode { j, l } => {
                let k = ky(l);
                let xi = std::f64::consts::PI * j as f64 / d.half_period();
                GridField::from_fn(d, |x, y| amplitude * (xi * x).cos() * (k * y).sin())
            }
            Self::GaussianBump { x0, sigma_x, l } => {
                let k = ky(l);
                GridField::from_fn(d, |x, y| {
                    let r = (x - x0) / sigma_x;
                    amplitude * (-r * r).exp() * (k * y).sin()
                })
            }
            Self::RandomBand { seed, jmax, lmax } => {
                let s = random_band_coefficients(seed, jmax, lmax, d);
                let g = d.to_grid(&s)?;
                let peak = g.max_abs();
                if peak == 0.0 {
                    g
                } else {
                    GridField::new(g.values.mapv(|v| v * amplitude / peak))
                }
            }
        })
    }

    pub fn spectral(&self, amplitude: f64, d: &DomainConfig) -> Result<SpectralField> {
        let g = self.grid(amplitude, d)?;
        let mut s = d.to_spectral(&g)?;
        s.enforce_hermitian(d);
        Ok(s)
    }
}

/// `max_y |u|` at `x = -X`, measured in units of the amplitude.
pub fn seam_amplitude(x0: f64, sigma_x: f64, d: &DomainConfig) -> f64 {
    let x = -d.half_period();
    // the seam is reached from both sides of the period
    let left = ((x - x0) / sigma_x).powi(2);
    let right = ((x + 2.0 * d.half_period() - x0) / sigma_x).powi(2);
    (-left.min(right)).exp()
}

fn random_band_coefficients(seed: u64, jmax: i64, lmax: usize, d: &DomainConfig) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = SpectralField::zeros(d);
    for l in 1..=lmax {
        for j in 0..=jmax {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = rng.random_range(-1.0..1.0);
            let decay = 1.0 / (1.0 + (j * j) as f64 + (l * l) as f64);
            let a = Complex64::new(re, im) * decay;
            s.coeffs
                .zip_mut_with(&SpectralField::real_mode(d, j, l, a).coeffs, |c, v| *c += v);
        }
    }
    s
}
