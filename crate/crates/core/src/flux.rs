//! Smooth cutoff and the regularized quadratic flux `g_h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn bump_tail(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth nondecreasing cutoff: 0 for `x <= 0`, 1 for `x >= 1`,
/// `eta(x) + eta(1 - x) = 1`.
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = bump_tail(x);
    let b = bump_tail(1.0 - x);
    a / (a + b)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS_K[i] * pair;
        if i % 2 == 1 {
            gauss += GK_WEIGHTS_G[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 15-point Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod(f, a, b);
        if err <= tol || depth >= 40 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth + 1) + recurse(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    recurse(f, a, b, tol, 0)
}

const QUAD_TOL: f64 = 1e-12;

/// `int_0^r (1 - s) eta(s) ds` for `r` in `[0, 1]`: the correction to
/// `u^2 / 2` accumulated across the transition band, in scaled units.
fn band_correction(r: f64) -> f64 {
    integrate_adaptive(&|s| (1.0 - s) * eta(s), 0.0, r.clamp(0.0, 1.0), QUAD_TOL)
}

/// Nonlinear flux `g`, so the equation reads `u_t + ... + (g(u))_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegularizedFlux {
    /// `g(u) = u^2 / 2`.
    Quadratic,
    /// `g_h` with cutoff scale `h` in `(0, 1]`.
    Regularized { h: f64 },
    /// `g = 0`, i.e. the linear equation.
    Zero,
}

impl RegularizedFlux {
    pub fn regularized(h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "flux cutoff h must lie in (0, 1], got {h}"
            )));
        }
        Ok(Self::Regularized { h })
    }

    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Self::Quadratic => 0.5 * u * u,
            Self::Zero => 0.0,
            Self::Regularized { h } => g_h(u, h),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Self::Quadratic => u,
            Self::Zero => 0.0,
            Self::Regularized { h } => {
                let a = u.abs();
                u * eta(2.0 - h * a) + 2.0 * u.signum() / h * eta(h * a - 1.0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }
}

/// `g_h(u) = int_0^u [theta eta(2 - h|theta|) + (2 sgn theta / h) eta(h|theta| - 1)] dtheta`.
///
/// Exactly `u^2 / 2` for `|u| <= 1/h` and affine with slope `2/h` beyond
/// `2/h`; the band in between is integrated numerically. `g_h` is even.
pub fn g_h(u: f64, h: f64) -> f64 {
    let a = u.abs();
    let inner = 1.0 / h;
    let outer = 2.0 / h;
    if a <= inner {
        return 0.5 * u * u;
    }
    // On the band the integrand is theta + (2/h - theta) eta(h theta - 1).
    let h2 = h * h;
    if a < outer {
        0.5 * a * a + band_correction(h * a - 1.0) / h2
    } else {
        (2.0 + band_correction(1.0)) / h2 + outer * (a - outer)
    }
}
