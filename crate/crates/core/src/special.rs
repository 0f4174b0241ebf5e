//! Scalar special functions used by the quadrature engines: Bessel J0/J1
//! and the log-gamma function.
//!
//! J0/J1 use the power series up to |x| = 13 and the Hankel asymptotic
//! expansion beyond; worst absolute error is ~3e-10 near the switch point
//! and <1e-13 elsewhere (checked against mpmath in the unit tests).

use std::f64::consts::{FRAC_PI_4, PI};

/// Hankel P-series coefficients for J0, powers of x^{-2}.
const J0_P: [f64; 5] = [
    1.0,
    -0.0703125,
    0.112152099609375,
    -0.5725014209747314,
    6.074042001273483,
];
/// Hankel Q-series coefficients for J0, powers of x^{-2} (overall factor x^{-1}).
const J0_Q: [f64; 4] = [
    -0.125,
    0.0732421875,
    -0.22710800170898438,
    1.7277275025844574,
];
const J1_P: [f64; 5] = [
    1.0,
    0.1171875,
    -0.144195556640625,
    0.6765925884246826,
    -6.883914268109947,
];
const J1_Q: [f64; 4] = [
    0.375,
    -0.1025390625,
    0.2775764465332031,
    -1.993531733751297,
];

const SERIES_CUT: f64 = 13.0;

fn poly_x2(coeffs: &[f64], x2: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x2 + c;
    }
    acc
}

/// Bessel function of the first kind, order zero.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_CUT {
        let q = (x / 2.0) * (x / 2.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            let kf = k as f64;
            term *= -q / (kf * kf);
            sum += term;
            if term.abs() < 1e-19 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let xi = 1.0 / x;
        let x2 = xi * xi;
        let p = poly_x2(&J0_P, x2);
        let q = xi * poly_x2(&J0_Q, x2);
        let chi = x - FRAC_PI_4;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// `J0(x) - 1`, computed without cancellation for small arguments.
pub fn j0m1(x: f64) -> f64 {
    let x = x.abs();
    if x < 0.5 {
        // - (x/2)^2 [1 - (x/2)^2/4 [1 - ...]] with explicit alternating series
        let q = (x / 2.0) * (x / 2.0);
        let mut term = -q;
        let mut sum = -q;
        for k in 2..30 {
            let kf = k as f64;
            term *= -q / (kf * kf);
            sum += term;
            if term.abs() < 1e-20 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    } else {
        j0(x) - 1.0
    }
}

/// Bessel function of the first kind, order one.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    if ax <= SERIES_CUT {
        let q = (ax / 2.0) * (ax / 2.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            let kf = k as f64;
            term *= -q / (kf * (kf + 1.0));
            sum += term;
            if term.abs() < 1e-19 * sum.abs() {
                break;
            }
        }
        sign * (ax / 2.0) * sum
    } else {
        let xi = 1.0 / ax;
        let x2 = xi * xi;
        let p = poly_x2(&J1_P, x2);
        let q = xi * poly_x2(&J1_Q, x2);
        let chi = ax - 3.0 * FRAC_PI_4;
        sign * (2.0 / (PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Lanczos approximation, g = 7, 9 terms.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + 7.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Gamma function for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
