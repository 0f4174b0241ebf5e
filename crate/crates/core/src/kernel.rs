//! The spectral integrand of the harmonizable construction and the
//! frequency-aggregated g-vector of a finite-dimensional probe.
//!
//! For parameters `(α, H, a, b)` the kernel at time `t` and frequency `s` is
//!
//! ```text
//! f_t(s) = (e^{its} - 1)/(is) · (a·s₊^{1-H-1/α} + b·s₋^{1-H-1/α})
//! ```
//!
//! with real part `sin(ts)/s · w(s)` and imaginary part `(1-cos(ts))/s · w(s)`.
//! The oscillating factor satisfies the exact scaling identity
//! `f_{εt}(s) = ε^{H+1/α} f_t(εs)` and the stationary-increment modulus
//! identity `|f_{t+h}(s) - f_h(s)| = |f_t(s)|`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// The parameter tuple `(α, H, a, b)` of the spectral representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParams {
    pub alpha: f64,
    pub hurst: f64,
    pub a: f64,
    pub b: f64,
}

impl ProcessParams {
    pub fn new(alpha: f64, hurst: f64, a: f64, b: f64) -> Result<Self> {
        if !(0.0 < alpha && alpha < 2.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,2), got {alpha}")));
        }
        if !(0.0 < hurst && hurst < 1.0) {
            return Err(Error::Domain(format!("hurst must lie in (0,1), got {hurst}")));
        }
        if a == 0.0 && b == 0.0 {
            return Err(Error::Domain("(a,b) must not both vanish".into()));
        }
        Ok(ProcessParams { alpha, hurst, a, b })
    }

    /// Exponent of the spectral weight, `1 - H - 1/α`.
    pub fn weight_exponent(&self) -> f64 {
        1.0 - self.hurst - 1.0 / self.alpha
    }

    /// Large-frequency decay exponent of the kernel, `H + 1/α`.
    pub fn decay_exponent(&self) -> f64 {
        self.hurst + 1.0 / self.alpha
    }
}

/// A finite-dimensional distribution probe: times `t_j` with paired
/// real/imaginary frequencies `(θ_j⁽¹⁾, θ_j⁽²⁾)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FddSpec {
    times: Vec<f64>,
    theta1: Vec<f64>,
    theta2: Vec<f64>,
}

impl FddSpec {
    pub fn new(times: Vec<f64>, theta1: Vec<f64>, theta2: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Domain("a probe needs at least one time".into()));
        }
        if times.len() != theta1.len() || times.len() != theta2.len() {
            return Err(Error::Domain("times and frequency lists must have equal length".into()));
        }
        Ok(FddSpec { times, theta1, theta2 })
    }

    /// Single time with a single frequency pair.
    pub fn single(t: f64, theta1: f64, theta2: f64) -> Self {
        FddSpec { times: vec![t], theta1: vec![theta1], theta2: vec![theta2] }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn theta1(&self) -> &[f64] {
        &self.theta1
    }

    pub fn theta2(&self) -> &[f64] {
        &self.theta2
    }

    /// All frequency pairs vanish: the probe's characteristic function is 1.
    pub fn is_degenerate(&self) -> bool {
        self.theta1.iter().all(|&x| x == 0.0) && self.theta2.iter().all(|&x| x == 0.0)
    }

    /// Probe with every frequency pair rotated by the angle `phi` (as a
    /// complex number `w_j = θ⁽¹⁾ + iθ⁽²⁾ ↦ e^{iφ} w_j`).
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let theta1 = self
            .theta1
            .iter()
            .zip(&self.theta2)
            .map(|(&t1, &t2)| c * t1 - s * t2)
            .collect();
        let theta2 = self
            .theta1
            .iter()
            .zip(&self.theta2)
            .map(|(&t1, &t2)| s * t1 + c * t2)
            .collect();
        FddSpec { times: self.times.clone(), theta1, theta2 }
    }

    /// Probe with all frequencies scaled by `lambda`.
    pub fn scaled_theta(&self, lambda: f64) -> Self {
        FddSpec {
            times: self.times.clone(),
            theta1: self.theta1.iter().map(|x| lambda * x).collect(),
            theta2: self.theta2.iter().map(|x| lambda * x).collect(),
        }
    }

    /// Probe with all times scaled by `c`.
    pub fn scaled_times(&self, c: f64) -> Self {
        FddSpec {
            times: self.times.iter().map(|t| c * t).collect(),
            theta1: self.theta1.clone(),
            theta2: self.theta2.clone(),
        }
    }
}

/// `(e^{its} - 1)/(is)` split into (real, imaginary) parts, with a series
/// branch near `ts = 0` to avoid cancellation.
pub(crate) fn oscillating_factor(t: f64, s: f64) -> (f64, f64) {
    let x = t * s;
    // below the switch the series reaches ~1e-18 relative; above it the
    // 1-cos evaluation keeps ~1e-13 relative, balancing the two branches
    if x.abs() < 0.03 {
        let x2 = x * x;
        let re = t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)));
        let im = t * (x / 2.0) * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0 * (1.0 - x2 / 56.0)));
        (re, im)
    } else {
        ((x.sin()) / s, (1.0 - x.cos()) / s)
    }
}

/// Spectral weight `a·s₊^{1-H-1/α} + b·s₋^{1-H-1/α}`; zero on the side whose
/// coefficient vanishes.
pub(crate) fn weight(params: &ProcessParams, s: f64) -> f64 {
    let p = params.weight_exponent();
    if s > 0.0 {
        if params.a == 0.0 { 0.0 } else { params.a * s.powf(p) }
    } else {
        if params.b == 0.0 { 0.0 } else { params.b * (-s).powf(p) }
    }
}

fn check_frequency(s: f64) -> Result<()> {
    if s == 0.0 {
        return Err(Error::SingularPoint("kernel frequency s = 0".into()));
    }
    if s.abs() < 1e-300 {
        return Err(Error::SingularPoint(format!(
            "kernel frequency |s| = {} underflows the weight", s.abs()
        )));
    }
    Ok(())
}

/// Kernel value `f_t(s)` as a complex number.
pub fn f_t(params: &ProcessParams, t: f64, s: f64) -> Result<Complex64> {
    let (re, im) = f_t_parts(params, t, s)?;
    Ok(Complex64::new(re, im))
}

/// Kernel value split into `(f_{t,1}, f_{t,2})`, the real and imaginary parts.
pub fn f_t_parts(params: &ProcessParams, t: f64, s: f64) -> Result<(f64, f64)> {
    check_frequency(s)?;
    let w = weight(params, s);
    if w == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (re, im) = oscillating_factor(t, s);
    Ok((re * w, im * w))
}

/// The frequency-aggregated vector of a probe,
/// `g(u) = (Σ_j θ_j⁽¹⁾f_{t_j,1} + θ_j⁽²⁾f_{t_j,2}, Σ_j θ_j⁽²⁾f_{t_j,1} - θ_j⁽¹⁾f_{t_j,2})`.
///
/// Equivalently `g = (Re z, -Im z)` with `z = Σ_j conj(w_j)·f_{t_j}(u)` and
/// `w_j = θ_j⁽¹⁾ + iθ_j⁽²⁾`, so `‖g(u)‖ = |z(u)|` and a common rotation of
/// all frequency pairs leaves `‖g‖` invariant.
pub fn g_vector(params: &ProcessParams, fdd: &FddSpec, u: f64) -> Result<[f64; 2]> {
    check_frequency(u)?;
    let mut z = Complex64::new(0.0, 0.0);
    for j in 0..fdd.len() {
        let w = Complex64::new(fdd.theta1()[j], fdd.theta2()[j]);
        let f = f_t(params, fdd.times()[j], u)?;
        z += w.conj() * f;
    }
    Ok([z.re, -z.im])
}

/// `‖g(u)‖`, the modulus of the aggregated kernel.
pub fn g_norm(params: &ProcessParams, fdd: &FddSpec, u: f64) -> Result<f64> {
    let g = g_vector(params, fdd, u)?;
    Ok(g[0].hypot(g[1]))
}
