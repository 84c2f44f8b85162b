//! Independent reference integrator for single-mode problems
//! `y' = m y + f(t)`: adaptive Dormand-Prince 5(4) with no knowledge of the
//! exponential structure.

use num_complex::Complex64;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-15,
        }
    }
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1`.
pub fn dopri5(
    rhs: &dyn Fn(f64, Complex64) -> Complex64,
    y0: Complex64,
    t0: f64,
    t1: f64,
    tol: OdeTolerance,
) -> Complex64 {
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    if span == 0.0 {
        return y;
    }
    let mut h = span / 100.0;
    let mut k = [Complex64::new(0.0, 0.0); 7];
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        for i in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                yi += *kj * (A[i][j] * h);
            }
            k[i] = rhs(t + C[i] * h, yi);
        }
        let mut y5 = y;
        let mut y4 = y;
        for i in 0..7 {
            y5 += k[i] * (B5[i] * h);
            y4 += k[i] * (B4[i] * h);
        }
        let scale = tol.atol + tol.rtol * y.norm().max(y5.norm());
        let err = (y5 - y4).norm() / scale;
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * span {
            h = 1e-14 * span;
        }
    }
    y
}

/// `y' = m y + f(t)`, `y(0) = y0`, integrated to each of `times`
/// (increasing, starting at or after 0).
pub fn mode_oracle(
    m: Complex64,
    f: &dyn Fn(f64) -> Complex64,
    y0: Complex64,
    times: &[f64],
    tol: OdeTolerance,
) -> Vec<Complex64> {
    let rhs = |t: f64, y: Complex64| m * y + f(t);
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut y = y0;
    for &target in times {
        y = dopri5(&rhs, y, t, target, tol);
        t = target;
        out.push(y);
    }
    out
}
