//! The `phi_k` functions of exponential integrators,
//! `phi_k(z) = sum_{n >= 0} z^n / (n + k)!`.

use num_complex::Complex64;

// Below this modulus the closed forms lose digits to cancellation (badly
// for phi_3), so the power series is summed instead.
const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 24;

fn series(z: Complex64, k: u32) -> Complex64 {
    // term_n = z^n / (n + k)!
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    let mut term = Complex64::new(1.0 / fact, 0.0);
    let mut sum = term;
    for n in 1..SERIES_TERMS {
        term = term * z / (n as f64 + k as f64);
        sum += term;
    }
    sum
}

pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 1)
    } else {
        (z.exp() - 1.0) / z
    }
}

pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 2)
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

pub fn phi3(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 3)
    } else {
        (z.exp() - 1.0 - z - z * z * 0.5) / (z * z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(phi1(z).re, 1.0);
        assert!((phi2(z).re - 0.5).abs() < 1e-16);
        assert!((phi3(z).re - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn branches_agree_near_switch() {
        // recurrence phi_{k+1}(z) = (phi_k(z) - 1/k!) / z holds on both sides
        for &(re, im) in &[(-0.99, 0.0), (-1.01, 0.0), (0.3, 0.95), (0.3, 1.05), (-20.0, 300.0)] {
            let z = Complex64::new(re, im);
            let r2 = (phi1(z) - 1.0) / z;
            let r3 = (phi2(z) - 0.5) / z;
            assert!((phi2(z) - r2).norm() < 1e-13 * (1.0 + z.norm()));
            if z.norm() > 0.9 {
                assert!((phi3(z) - r3).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tiny_argument_has_no_cancellation() {
        let z = Complex64::new(1e-9, -2e-9);
        assert!((phi1(z) - (1.0 + z * 0.5)).norm() < 1e-17);
        assert!((phi3(z) - (1.0 / 6.0 + z / 24.0)).norm() < 1e-17);
    }
}
