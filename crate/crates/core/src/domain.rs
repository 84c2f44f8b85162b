//! Periodized strip, Fourier x sine basis and the transforms between grid
//! samples and spectral coefficients.
//!
//! # Normalization
//!
//! A real field on `[-X, X) x (0, L)` is represented as
//!
//! ```text
//! u(x, y) = sum_{j, l} c(j, l) exp(i xi_j x) sin(pi l y / L),
//!     xi_j = pi j / X,  j = -nx/2 .. nx/2 - 1,  l = 1 .. ny
//! ```
//!
//! so the coefficient of `sin(pi y / L)` is exactly 1. With this choice
//! `int int |u|^2 dx dy = X L sum |c(j, l)|^2`; [`DomainConfig::norm_weight`]
//! returns `X L` and every norm, energy and inner product in the crate uses it.
//!
//! Grid samples sit at `x_j = -X + 2 X j / nx` and at the interior DST-I nodes
//! `y_k = k L / (ny + 1)`, `k = 1 .. ny`. Arrays have shape `(nx, ny)`, row
//! index = x node (or x frequency in FFT order), column index = y node (or
//! sine mode `l - 1`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Validated strip geometry, resolution and dissipation, with immutable
/// transform plans.
#[derive(Clone)]
pub struct DomainConfig {
    width: f64,
    half_period: f64,
    nx: usize,
    ny: usize,
    delta: f64,
    xi: Vec<f64>,
    ky: Vec<f64>,
    lambda: Vec<f64>,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for DomainConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainConfig")
            .field("L", &self.width)
            .field("X", &self.half_period)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("delta", &self.delta)
            .finish()
    }
}

/// Build a validated [`DomainConfig`].
pub fn plan_domain(width: f64, half_period: f64, nx: usize, ny: usize, delta: f64) -> Result<DomainConfig> {
    DomainConfig::new(width, half_period, nx, ny, delta)
}

impl DomainConfig {
    pub fn new(width: f64, half_period: f64, nx: usize, ny: usize, delta: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "strip width L must be positive, got {width}"
            )));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "x half-period X must be positive, got {half_period}"
            )));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dissipation delta must be positive, got {delta}"
            )));
        }
        if nx < 8 || !nx.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!("nx must be even and >= 8, got {nx}")));
        }
        if ny < 4 {
            return Err(Error::InvalidConfig(format!("ny must be >= 4, got {ny}")));
        }

        let xi = (0..nx)
            .map(|idx| PI * signed_frequency(idx, nx) as f64 / half_period)
            .collect();
        let ky: Vec<f64> = (1..=ny).map(|l| PI * l as f64 / width).collect();
        let lambda = ky.iter().map(|k| k * k).collect();

        let mut planner = FftPlanner::new();
        let fft_x = planner.plan_fft_forward(nx);
        let ifft_x = planner.plan_fft_inverse(nx);
        let fft_y = planner.plan_fft_forward(2 * (ny + 1));

        Ok(Self {
            width,
            half_period,
            nx,
            ny,
            delta,
            xi,
            ky,
            lambda,
            fft_x,
            ifft_x,
            fft_y,
        })
    }

    /// Strip width `L`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Half-period `X`; the x-domain is `[-X, X)`.
    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// x-frequency `xi` for row `idx` (FFT ordering).
    pub fn xi(&self, idx: usize) -> f64 {
        self.xi[idx]
    }

    pub fn xi_table(&self) -> &[f64] {
        &self.xi
    }

    /// Signed frequency index `j` of row `idx`.
    pub fn frequency(&self, idx: usize) -> i64 {
        signed_frequency(idx, self.nx)
    }

    /// Row holding frequency `j`.
    pub fn row_of(&self, j: i64) -> usize {
        j.rem_euclid(self.nx as i64) as usize
    }

    /// Row of the unpaired Nyquist frequency `-nx/2`.
    pub fn nyquist_row(&self) -> usize {
        self.nx / 2
    }

    /// `pi l / L` for column `l - 1`.
    pub fn ky(&self, col: usize) -> f64 {
        self.ky[col]
    }

    /// `lambda_l = (pi l / L)^2` for column `l - 1`.
    pub fn lambda(&self, col: usize) -> f64 {
        self.lambda[col]
    }

    pub fn lambda_table(&self) -> &[f64] {
        &self.lambda
    }

    /// Smallest y-eigenvalue `pi^2 / L^2`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda[0]
    }

    /// Parseval weight `X L`: `||u||^2 = X L sum |c|^2`.
    pub fn norm_weight(&self) -> f64 {
        self.half_period * self.width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_period / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.width / (self.ny + 1) as f64
    }

    /// Tensor quadrature weight of one grid cell.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.x_node(j)).collect()
    }

    pub fn x_node(&self, j: usize) -> f64 {
        -self.half_period + 2.0 * self.half_period * j as f64 / self.nx as f64
    }

    pub fn y_nodes(&self) -> Vec<f64> {
        (1..=self.ny).map(|k| self.y_node(k - 1)).collect()
    }

    /// y-node of column `k` (0-based), `(k + 1) L / (ny + 1)`.
    pub fn y_node(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.width / (self.ny + 1) as f64
    }

    /// Coefficients of a grid field in the `exp(i xi x) sin(pi l y / L)` basis.
    pub fn to_spectral(&self, f: &GridField) -> Result<SpectralField> {
        self.check_shape(f.values.dim())?;
        let (nx, ny) = self.shape();
        let mut coeffs = Array2::from_elem((nx, ny), ZERO);

        let mut row = vec![ZERO; nx];
        let mut scratch = vec![ZERO; self.fft_x.get_inplace_scratch_len()];
        let inv_nx = 1.0 / nx as f64;
        for k in 0..ny {
            for (j, r) in row.iter_mut().enumerate() {
                *r = Complex64::new(f.values[[j, k]], 0.0);
            }
            self.fft_x.process_with_scratch(&mut row, &mut scratch);
            for (idx, r) in row.iter().enumerate() {
                coeffs[[idx, k]] = r * (alternating(idx) * inv_nx);
            }
        }

        let scale = 2.0 / (ny + 1) as f64;
        let mut buf = YBuffer::new(self);
        for idx in 0..nx {
            let mut col = coeffs.row_mut(idx);
            let slice = col.as_slice_mut().expect("row-major storage");
            buf.sine_sum(slice);
            for c in slice.iter_mut() {
                *c *= scale;
            }
        }
        Ok(SpectralField { coeffs })
    }

    /// Real grid samples of a Hermitian spectral field.
    pub fn to_grid(&self, s: &SpectralField) -> Result<GridField> {
        self.check_shape(s.coeffs.dim())?;
        let defect = s.hermitian_defect(self);
        let scale = s.max_abs().max(f64::MIN_POSITIVE);
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian { defect });
        }
        Ok(self.synthesize(&s.coeffs, YParity::Sine))
    }

    /// Grid samples of `d^order u / d axis^order`.
    pub fn derivative(&self, s: &SpectralField, axis: Axis, order: u32) -> Result<GridField> {
        if !(1..=3).contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        match axis {
            Axis::X => self.partial(s, order, 0),
            Axis::Y => self.partial(s, 0, order),
        }
    }

    /// Grid samples of the mixed partial `d_x^px d_y^py u`.
    pub fn partial(&self, s: &SpectralField, px: u32, py: u32) -> Result<GridField> {
        self.check_shape(s.coeffs.dim())?;
        if px > 6 || py > 6 {
            return Err(Error::UnsupportedOrder(px.max(py)));
        }
        let (nx, ny) = self.shape();
        let mut work = s.coeffs.clone();
        for idx in 0..nx {
            let mx = self.x_multiplier(idx, px);
            for col in 0..ny {
                let my = y_multiplier(self.ky[col], py);
                work[[idx, col]] *= mx * my;
            }
        }
        let parity = if py.is_multiple_of(2) {
            YParity::Sine
        } else {
            YParity::Cosine
        };
        Ok(self.synthesize(&work, parity))
    }

    /// `(i xi)^p` for row `idx`; zero on the Nyquist row for odd `p`.
    pub fn x_multiplier(&self, idx: usize, p: u32) -> Complex64 {
        if p % 2 == 1 && idx == self.nyquist_row() {
            return ZERO;
        }
        Complex64::new(0.0, self.xi[idx]).powu(p)
    }

    /// Real part of the inverse transform, evaluated on the grid. No
    /// Hermitian check.
    pub(crate) fn synthesize(&self, coeffs: &Array2<Complex64>, parity: YParity) -> GridField {
        let (nx, ny) = self.shape();
        let mut work = coeffs.clone();
        let mut buf = YBuffer::new(self);
        for idx in 0..nx {
            let mut col = work.row_mut(idx);
            let slice = col.as_slice_mut().expect("row-major storage");
            match parity {
                YParity::Sine => buf.sine_sum(slice),
                YParity::Cosine => buf.cosine_sum(slice),
            }
            let sign = alternating(idx);
            for c in slice.iter_mut() {
                *c *= sign;
            }
        }

        let mut values = Array2::zeros((nx, ny));
        let mut row = vec![ZERO; nx];
        let mut scratch = vec![ZERO; self.ifft_x.get_inplace_scratch_len()];
        for k in 0..ny {
            for (idx, r) in row.iter_mut().enumerate() {
                *r = work[[idx, k]];
            }
            self.ifft_x.process_with_scratch(&mut row, &mut scratch);
            for (j, r) in row.iter().enumerate() {
                values[[j, k]] = r.re;
            }
        }
        GridField { values }
    }

    pub(crate) fn check_shape(&self, found: (usize, usize)) -> Result<()> {
        if found != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum YParity {
    Sine,
    Cosine,
}

fn signed_frequency(idx: usize, nx: usize) -> i64 {
    if idx < nx / 2 {
        idx as i64
    } else {
        idx as i64 - nx as i64
    }
}

// exp(i xi_j x) at x = -X carries (-1)^j; nx is even so the row parity works.
fn alternating(idx: usize) -> f64 {
    if idx.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

// d^p/dy^p sin(k y) = k^p * {sin, cos, -sin, -cos}(k y)
fn y_multiplier(k: f64, p: u32) -> f64 {
    let sign = match p % 4 {
        0 | 1 => 1.0,
        _ => -1.0,
    };
    sign * k.powi(p as i32)
}

/// Odd/even extension buffers for DST-I / DCT-I style sums over interior
/// nodes, computed with one FFT of length `2 (ny + 1)`.
struct YBuffer {
    fft: Arc<dyn Fft<f64>>,
    ext: Vec<Complex64>,
    scratch: Vec<Complex64>,
    ny: usize,
}

impl YBuffer {
    fn new(d: &DomainConfig) -> Self {
        let m = 2 * (d.ny + 1);
        Self {
            fft: Arc::clone(&d.fft_y),
            ext: vec![ZERO; m],
            scratch: vec![ZERO; d.fft_y.get_inplace_scratch_len()],
            ny: d.ny,
        }
    }

    /// In place: `v_k <- sum_l v_l sin(pi l k / (ny + 1))`, `k, l = 1..ny`.
    fn sine_sum(&mut self, v: &mut [Complex64]) {
        let ny = self.ny;
        let m = 2 * (ny + 1);
        self.ext[0] = ZERO;
        self.ext[ny + 1] = ZERO;
        for l in 1..=ny {
            self.ext[l] = v[l - 1];
            self.ext[m - l] = -v[l - 1];
        }
        self.fft.process_with_scratch(&mut self.ext, &mut self.scratch);
        // FFT of the odd extension is -2i times the sine sum.
        for k in 1..=ny {
            let w = self.ext[k];
            v[k - 1] = Complex64::new(-0.5 * w.im, 0.5 * w.re);
        }
    }

    /// In place: `v_k <- sum_l v_l cos(pi l k / (ny + 1))`, `k, l = 1..ny`.
    fn cosine_sum(&mut self, v: &mut [Complex64]) {
        let ny = self.ny;
        let m = 2 * (ny + 1);
        self.ext[0] = ZERO;
        self.ext[ny + 1] = ZERO;
        for l in 1..=ny {
            self.ext[l] = v[l - 1];
            self.ext[m - l] = v[l - 1];
        }
        self.fft.process_with_scratch(&mut self.ext, &mut self.scratch);
        for k in 1..=ny {
            v[k - 1] = self.ext[k] * 0.5;
        }
    }
}

/// Real samples on the `nx x ny` collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub values: Array2<f64>,
}

impl GridField {
    pub fn new(values: Array2<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(d: &DomainConfig) -> Self {
        Self {
            values: Array2::zeros(d.shape()),
        }
    }

    /// Sample `f(x, y)` on the grid of `d`.
    pub fn from_fn(d: &DomainConfig, f: impl Fn(f64, f64) -> f64) -> Self {
        let xs = d.x_nodes();
        let ys = d.y_nodes();
        let values = Array2::from_shape_fn(d.shape(), |(j, k)| f(xs[j], ys[k]));
        Self { values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Tensor-trapezoid integral over the strip (wall values are zero).
    pub fn integrate(&self, d: &DomainConfig) -> f64 {
        self.values.sum() * d.cell_area()
    }

    /// Trapezoid L2 norm.
    pub fn l2_norm(&self, d: &DomainConfig) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * d.cell_area()).sqrt()
    }
}

/// Coefficients in the Fourier x sine basis, shape `(nx, ny)`, rows in FFT
/// frequency order, column `l - 1` for sine mode `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn new(coeffs: Array2<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(d: &DomainConfig) -> Self {
        Self {
            coeffs: Array2::from_elem(d.shape(), ZERO),
        }
    }

    /// Field with a single coefficient at frequency `j`, sine mode `l`.
    /// Not Hermitian unless `j == 0` and `value` is real.
    pub fn single_mode(d: &DomainConfig, j: i64, l: usize, value: Complex64) -> Self {
        let mut s = Self::zeros(d);
        s.coeffs[[d.row_of(j), l - 1]] = value;
        s
    }

    /// Real mode pair `a exp(i xi_j x) + conj(a) exp(-i xi_j x)` in sine mode `l`.
    pub fn real_mode(d: &DomainConfig, j: i64, l: usize, a: Complex64) -> Self {
        let mut s = Self::zeros(d);
        if j == 0 {
            s.coeffs[[0, l - 1]] = Complex64::new(a.re, 0.0);
        } else {
            s.coeffs[[d.row_of(j), l - 1]] = a;
            s.coeffs[[d.row_of(-j), l - 1]] = a.conj();
        }
        s
    }

    pub fn get(&self, d: &DomainConfig, j: i64, l: usize) -> Complex64 {
        self.coeffs[[d.row_of(j), l - 1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()))
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|c(-j, l) - conj(c(j, l))|`; the Nyquist row must be real.
    pub fn hermitian_defect(&self, d: &DomainConfig) -> f64 {
        let (nx, ny) = d.shape();
        let mut defect = 0.0_f64;
        for idx in 0..nx {
            let neg = (nx - idx) % nx;
            for col in 0..ny {
                let diff = self.coeffs[[neg, col]] - self.coeffs[[idx, col]].conj();
                defect = defect.max(diff.norm());
            }
        }
        defect
    }

    /// Symmetrize in place so the field is exactly real.
    pub fn enforce_hermitian(&mut self, d: &DomainConfig) {
        let (nx, ny) = d.shape();
        for idx in 0..=nx / 2 {
            let neg = (nx - idx) % nx;
            for col in 0..ny {
                let avg = 0.5 * (self.coeffs[[idx, col]] + self.coeffs[[neg, col]].conj());
                self.coeffs[[idx, col]] = avg;
                self.coeffs[[neg, col]] = avg.conj();
            }
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> SpectralField {
        SpectralField {
            coeffs: &self.coeffs + &(&other.coeffs * a),
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        SpectralField {
            coeffs: &self.coeffs * a,
        }
    }

    /// Exact L2 norm via Parseval.
    pub fn l2_norm(&self, d: &DomainConfig) -> f64 {
        self.weighted_energy(d, |_, _| 1.0).sqrt()
    }

    /// `X L sum w(xi^2, lambda) |c|^2`.
    pub fn weighted_energy(&self, d: &DomainConfig, w: impl Fn(f64, f64) -> f64) -> f64 {
        let (nx, ny) = d.shape();
        let mut total = 0.0;
        for idx in 0..nx {
            let xi2 = d.xi(idx) * d.xi(idx);
            for col in 0..ny {
                let c = self.coeffs[[idx, col]];
                total += w(xi2, d.lambda(col)) * c.norm_sqr();
            }
        }
        total * d.norm_weight()
    }

    /// `X L Re sum w conj(self) other`, i.e. the weighted L2 inner product.
    pub fn weighted_inner(&self, other: &SpectralField, d: &DomainConfig, w: impl Fn(f64, f64) -> f64) -> f64 {
        let (nx, ny) = d.shape();
        let mut total = 0.0;
        for idx in 0..nx {
            let xi2 = d.xi(idx) * d.xi(idx);
            for col in 0..ny {
                let p = self.coeffs[[idx, col]].conj() * other.coeffs[[idx, col]];
                total += w(xi2, d.lambda(col)) * p.re;
            }
        }
        total * d.norm_weight()
    }

    /// Direct evaluation of the real part of the series at an arbitrary point.
    pub fn evaluate(&self, d: &DomainConfig, x: f64, y: f64) -> f64 {
        let (nx, ny) = d.shape();
        let mut total = 0.0;
        let t = y / d.width();
        for idx in 0..nx {
            let phase = Complex64::from_polar(1.0, d.xi(idx) * x);
            let mut col_sum = ZERO;
            for col in 0..ny {
                col_sum += self.coeffs[[idx, col]] * sin_pi((col + 1) as f64 * t);
            }
            total += (phase * col_sum).re;
        }
        total
    }
}

/// `sin(pi t)`, exactly zero at integer `t`.
pub fn sin_pi(t: f64) -> f64 {
    let r = t.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain() -> DomainConfig {
        plan_domain(PI, 4.0 * PI, 32, 12, 0.5).unwrap()
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(plan_domain(-1.0, 1.0, 16, 8, 0.5).is_err());
        assert!(plan_domain(1.0, 0.0, 16, 8, 0.5).is_err());
        assert!(plan_domain(1.0, 1.0, 15, 8, 0.5).is_err());
        assert!(plan_domain(1.0, 1.0, 16, 3, 0.5).is_err());
        assert!(plan_domain(1.0, 1.0, 16, 8, 0.0).is_err());
        assert!(plan_domain(1.0, 1.0, 6, 8, 0.5).is_err());
    }

    #[test]
    fn eigenvalue_tables() {
        let d = plan_domain(PI, 16.0 * PI, 256, 64, 0.5).unwrap();
        assert_eq!(d.lambda_min(), 1.0);
        assert_eq!(d.xi(1), 1.0 / 16.0);
        assert_eq!(d.frequency(d.nyquist_row()), -128);
        let d2 = plan_domain(2.0, 1.0, 16, 8, 0.5).unwrap();
        assert!((d2.lambda_min() - PI * PI / 4.0).abs() < 1e-15);
        assert!((d2.lambda_min() - 2.4674).abs() < 1e-4);
    }

    #[test]
    fn first_eigenfunction_is_unit_coefficient() {
        let d = domain();
        let f = GridField::from_fn(&d, |_, y| y.sin());
        let s = d.to_spectral(&f).unwrap();
        assert!((s.get(&d, 0, 1).re - 1.0).abs() < 1e-14);
        let rest: f64 = s.coeffs.iter().map(|c| c.norm()).sum::<f64>() - s.get(&d, 0, 1).norm();
        assert!(rest < 1e-13);
    }

    #[test]
    fn cosine_mode_splits_into_conjugate_pair() {
        let d = domain();
        let xi1 = d.xi(1);
        let f = GridField::from_fn(&d, |x, y| (xi1 * x).cos() * (2.0 * y).sin());
        let s = d.to_spectral(&f).unwrap();
        assert!((s.get(&d, 1, 2) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((s.get(&d, -1, 2) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let total: f64 = s.coeffs.iter().map(|c| c.norm()).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn zero_maps_to_zero() {
        let d = domain();
        let s = d.to_spectral(&GridField::zeros(&d)).unwrap();
        assert!(s.coeffs.iter().all(|c| *c == ZERO));
        let g = d.to_grid(&SpectralField::zeros(&d)).unwrap();
        assert!(g.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_coefficient_synthesizes_sine() {
        let d = domain();
        let s = SpectralField::single_mode(&d, 0, 1, Complex64::new(1.0, 0.0));
        let g = d.to_grid(&s).unwrap();
        for (k, y) in d.y_nodes().iter().enumerate() {
            for j in 0..d.nx() {
                assert!((g.values[[j, k]] - y.sin()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shape_and_hermitian_errors() {
        let d = domain();
        let bad = GridField::new(Array2::zeros((8, 8)));
        assert!(matches!(d.to_spectral(&bad), Err(Error::ShapeMismatch { .. })));
        let s = SpectralField::single_mode(&d, 3, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(d.to_grid(&s), Err(Error::NotHermitian { .. })));
        assert!(matches!(d.derivative(&s, Axis::X, 4), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn second_y_derivative_of_eigenfunction() {
        let d = plan_domain(2.0, 3.0, 16, 8, 0.5).unwrap();
        let f = GridField::from_fn(&d, |_, y| (PI * y / 2.0).sin());
        let s = d.to_spectral(&f).unwrap();
        let g = d.derivative(&s, Axis::Y, 2).unwrap();
        let lam = PI * PI / 4.0;
        for (a, b) in g.values.iter().zip(f.values.iter()) {
            assert!((a + lam * b).abs() < 1e-13);
        }
    }

    #[test]
    fn first_x_and_y_derivatives() {
        let d = domain();
        let xi1 = d.xi(1);
        let f = GridField::from_fn(&d, |x, y| (xi1 * x).cos() * y.sin());
        let s = d.to_spectral(&f).unwrap();
        let gx = d.derivative(&s, Axis::X, 1).unwrap();
        let gy = d.derivative(&s, Axis::Y, 1).unwrap();
        let gyyy = d.derivative(&s, Axis::Y, 3).unwrap();
        let ex = GridField::from_fn(&d, |x, y| -xi1 * (xi1 * x).sin() * y.sin());
        let ey = GridField::from_fn(&d, |x, y| (xi1 * x).cos() * y.cos());
        for ((a, b), (c, e)) in gx
            .values
            .iter()
            .zip(ex.values.iter())
            .zip(gy.values.iter().zip(ey.values.iter()))
        {
            assert!((a - b).abs() < 1e-14);
            assert!((c - e).abs() < 1e-13);
        }
        for (a, e) in gyyy.values.iter().zip(ey.values.iter()) {
            assert!((a + e).abs() < 1e-12);
        }
    }

    #[test]
    fn series_vanishes_on_walls() {
        let d = domain();
        let mut s = SpectralField::zeros(&d);
        for (n, c) in s.coeffs.iter_mut().enumerate() {
            *c = Complex64::new((n as f64 * 0.37).sin(), (n as f64 * 0.11).cos());
        }
        s.enforce_hermitian(&d);
        for x in [-3.0, 0.0, 1.7] {
            assert_eq!(s.evaluate(&d, x, 0.0), 0.0);
            assert_eq!(s.evaluate(&d, x, d.width()), 0.0);
        }
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-2.0), 0.0);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
    }
}
