//! Numerical evaluation of the Lévy exponent ψ and of the exact
//! log-characteristic function `A_ε` of rescaled finite-dimensional
//! distributions.
//!
//! For a radial Lévy density the exponent reduces to a one-dimensional
//! Bessel transform,
//!
//! ```text
//! ψ(z) = 2π ∫_0^∞ [J0(‖z‖r) - 1] · f_rad(r) · r dr ,
//! ```
//!
//! the compensator and all imaginary parts cancelling by symmetry. The
//! engine splits the radial axis at the J0 transition `r ≈ ξ/ρ`, integrates
//! the smooth part with panel quadrature (a termwise-integrated series when
//! the density is an exact power there), moves the `-1` part into the
//! closed-form tail mass of the family, and expands the oscillatory Bessel
//! tail by integration by parts. The rescaled log-characteristic function
//! is then
//!
//! ```text
//! A_ε = ε^{-1} ∫_ℝ ψ(ε^{1/α}·g_{θ,t}(u)) du
//! ```
//!
//! evaluated on the shared half-line driver with a certified analytic tail.

use crate::error::{Error, Result};
use crate::kernel::{FddSpec, ProcessParams};
use crate::levy_models::{LevyKind, LevyModel};
use crate::outer::{CompiledProbe, TailModel};
use crate::quad::{self, Estimate};
use crate::special::{j0, j0m1, j1};
use crate::stable_limit::StableLimitConstants;
use std::f64::consts::PI;

/// Tolerances, truncation radii and mesh controls for the quadrature
/// engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Absolute tolerance for the outer (frequency) integrals.
    pub abs_tol: f64,
    /// Relative tolerance shared by the radial and outer integrals.
    pub rel_tol: f64,
    /// Cap on the numeric panel horizon of the outer integrals; beyond it
    /// the period-averaged analytic tail takes over.
    pub u_max: f64,
    /// Cap on the radial extent (in units of `1/‖z‖`) of the oscillatory
    /// Bessel panels.
    pub r_max: f64,
    /// Geometric panel density for smooth radial regions and the ψ cache.
    pub panels_per_decade: u32,
    /// Dyadic refinement depth into singular endpoints and lattice kinks.
    pub grading_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            u_max: 1e4,
            r_max: 1e4,
            panels_per_decade: 16,
            grading_depth: 22,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if !(self.u_max >= 1.0) || !(self.r_max >= 1.0) {
            return Err(Error::Domain("truncation horizons must be at least 1".into()));
        }
        if self.panels_per_decade == 0 {
            return Err(Error::Domain("panels_per_decade must be positive".into()));
        }
        Ok(())
    }
}

/// `T(μ, V) = ∫_V^∞ J0(v) v^{-μ} dv` by two levels of integration by parts
/// (via `(v J1)' = v J0` and `J1 = -J0'`); error `O(V^{-μ-7/2})`.
fn bessel_tail(mu: f64, v: f64) -> Estimate {
    let lead = |m: f64| -j1(v) * v.powf(-m) + (m + 1.0) * j0(v) * v.powf(-m - 1.0);
    let value = lead(mu) - (mu + 1.0) * (mu + 1.0) * lead(mu + 2.0);
    let error = (mu + 1.0).powi(2) * (mu + 3.0).powi(2) * (2.0 / PI).sqrt()
        * v.powf(-mu - 3.5)
        / (mu + 3.5);
    Estimate { value, error }
}

/// Termwise integral `∫_0^R (J0(ρr)-1)·c·r^{-1-σ} dr` for an exact power
/// density, valid while `ρR ≲ 8`.
fn power_series_piece(rho: f64, r_end: f64, sigma: f64, c: f64) -> f64 {
    // Σ_{k≥1} (-1)^k (ρ/2)^{2k}/(k!)² · R^{2k-σ}/(2k-σ)
    let x = rho * r_end / 2.0;
    let x2 = x * x;
    let mut term = 1.0f64;
    let mut sum = 0.0f64;
    for k in 1..60 {
        let kf = k as f64;
        term *= -x2 / (kf * kf);
        let contrib = term / (2.0 * kf - sigma);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    c * r_end.powf(-sigma) * sum
}

/// Power segments of the density beyond a radius: `(start, end, exponent)`
/// pieces on which `f_rad(r) = c0·r^{-2-exponent}` exactly (or, for the
/// smoothed family, asymptotically — flagged by `exact = false`).
fn tail_segments(model: &LevyModel, from: f64) -> (Vec<(f64, f64, f64)>, bool) {
    match model.kind {
        LevyKind::PureStable => (vec![(from, f64::INFINITY, model.alpha)], true),
        LevyKind::TruncatedStable { cutoff } => {
            (vec![(from.max(cutoff), f64::INFINITY, model.alpha)], true)
        }
        LevyKind::TwoPower { origin_exponent } => {
            if from < 1.0 {
                (
                    vec![(from, 1.0, origin_exponent), (1.0, f64::INFINITY, model.alpha)],
                    true,
                )
            } else {
                (vec![(from, f64::INFINITY, model.alpha)], true)
            }
        }
        LevyKind::SmoothedPareto => (vec![(from, f64::INFINITY, model.alpha)], false),
        LevyKind::CompactSupport { .. } => (Vec::new(), true),
    }
}

/// Radial Lévy exponent evaluator with an optional log-log interpolation
/// cache.
#[derive(Debug, Clone)]
pub struct LevyExponent {
    model: LevyModel,
    quad: QuadSpec,
    cache: Option<RadialCache>,
}

#[derive(Debug, Clone)]
struct RadialCache {
    ln_lo: f64,
    step: f64,
    /// `ln(-ψ)` on the uniform log grid
    vals: Vec<f64>,
}

impl RadialCache {
    fn eval(&self, ln_rho: f64) -> Option<f64> {
        let n = self.vals.len();
        let x = (ln_rho - self.ln_lo) / self.step;
        if !(0.0 <= x && x <= (n - 1) as f64) {
            return None;
        }
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        let y0 = self.vals[i];
        let y1 = self.vals[i + 1];
        // Catmull-Rom slopes on the uniform grid, one-sided at the ends
        let m0 = if i == 0 { y1 - y0 } else { (y1 - self.vals[i - 1]) / 2.0 };
        let m1 = if i + 2 >= n { y1 - y0 } else { (self.vals[i + 2] - y0) / 2.0 };
        let t2 = t * t;
        let t3 = t2 * t;
        let h = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        Some(-h.exp())
    }
}

impl LevyExponent {
    pub fn new(model: LevyModel, quad: QuadSpec) -> Result<Self> {
        quad.validate()?;
        Ok(LevyExponent { model, quad, cache: None })
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    /// `K(θ, s)`: the integrability kernel of the driving measure. The
    /// driver here is homogeneous (Lebesgue control measure, one jump
    /// family), so `K(θ, s) = ψ(θ)` for every `s`.
    pub fn k_function(&self, theta: [f64; 2], _s: f64) -> Result<f64> {
        self.eval(theta[0].hypot(theta[1]))
    }

    /// ψ at radius ρ with the engine's own tolerance enforcement.
    pub fn eval(&self, rho: f64) -> Result<f64> {
        let est = self.eval_estimate(rho)?;
        let tol = self.quad.abs_tol.max(16.0 * self.quad.rel_tol * est.value.abs());
        if est.error > tol && est.value.abs() > self.quad.abs_tol {
            return Err(Error::NonConvergence {
                value: est.value,
                error_bound: est.error,
                requested: tol,
            });
        }
        Ok(est.value)
    }

    /// ψ with its accumulated error estimate (closed form for the annulus).
    pub fn eval_estimate(&self, rho: f64) -> Result<Estimate> {
        if rho < 0.0 || !rho.is_finite() {
            return Err(Error::Domain(format!("psi radius must be finite nonnegative, got {rho}")));
        }
        if rho == 0.0 {
            return Ok(Estimate::zero());
        }
        if let LevyKind::CompactSupport { inner, outer, height } = self.model.kind {
            // ∫ (J0(ρr)-1) h r dr = h [r J1(ρr)/ρ - r²/2] over the annulus
            let osc = (outer * j1(rho * outer) - inner * j1(rho * inner)) / rho;
            let value = 2.0 * PI * height * (osc - (outer * outer - inner * inner) / 2.0);
            return Ok(Estimate { value, error: 1e-14 * value.abs() });
        }
        self.eval_quadrature(rho)
    }

    /// The generic three-region quadrature path (also valid for the
    /// annulus; used there only as a cross-check).
    pub fn eval_quadrature(&self, rho: f64) -> Result<Estimate> {
        if rho <= 0.0 {
            return Ok(Estimate::zero());
        }
        let model = &self.model;
        let quad_spec = &self.quad;
        let alpha = model.alpha;
        let (r_lo, r_hi) = model.support();
        let xi = 6.0;
        let r1 = xi / rho;

        let consts = StableLimitConstants::new(if model.has_power_tail() { alpha } else { 1.0 })?;
        let kc1 = consts.kappa_alpha * consts.c1;
        let slice = 0.25 * quad_spec.rel_tol;

        let mut total = Estimate::zero(); // value of ψ / 2π

        // --- region a: supp ∩ (0, r1], integrand (J0(ρr)-1)·f·r ---
        let a_hi = r1.min(r_hi);
        if a_hi > r_lo {
            if let Some(sigma) = model.origin_exponent() {
                // exact power at the origin: termwise series up to the end
                // of the exact-power range, panels beyond
                let exact_end = match model.kind {
                    LevyKind::TwoPower { .. } => 1.0f64.min(a_hi),
                    _ => a_hi,
                };
                total.value += power_series_piece(rho, exact_end, sigma, model.c0_tail);
                if a_hi > exact_end {
                    let f = |r: f64| {
                        j0m1(rho * r) * model.radial_density(r).unwrap_or(0.0) * r
                    };
                    let mut edges = vec![exact_end];
                    let ratio = 10f64.powf(1.0 / quad_spec.panels_per_decade as f64);
                    let mut r = exact_end;
                    while r < a_hi {
                        r = (r * ratio).min(a_hi);
                        edges.push(r);
                    }
                    total.add(quad::integrate_edges(&f, &edges));
                }
            } else {
                // bounded density at the support start: geometric panels
                // from a negligible-contribution floor
                let f = |r: f64| j0m1(rho * r) * model.radial_density(r).unwrap_or(0.0) * r;
                let f_top = model.c_bound; // crude density scale
                let floor_target = 1e-18 * kc1 * rho.powf(alpha) / model.c0_tail.max(1e-300);
                let mut r_start =
                    (16.0 * floor_target / (rho * rho * f_top)).powf(0.25).min(a_hi / 2.0);
                r_start = r_start.max(a_hi * 1e-14).max(r_lo);
                if r_lo > 0.0 {
                    r_start = r_lo;
                }
                let mut edges = vec![r_start];
                let ratio = 10f64.powf(1.0 / quad_spec.panels_per_decade as f64);
                let mut r = r_start;
                while r < a_hi {
                    r = (r * ratio).min(a_hi);
                    edges.push(r);
                }
                total.add(quad::integrate_edges(&f, &edges));
                if r_lo == 0.0 {
                    total.error += rho * rho * f_top * r_start.powi(4) / 16.0;
                }
            }
        }

        // --- the "-1" part beyond r1, in closed form ---
        total.value -= model.tail_mass_above(r1.max(r_lo));

        // --- region b: oscillatory J0 panels on [max(r1, r_lo), r_b_end] ---
        let b_lo = r1.max(r_lo);
        let v_adaptive = if matches!(model.kind, LevyKind::SmoothedPareto) {
            let c = (2.0 / PI).sqrt() * (2.0 + alpha) / (1.5 + alpha) * 2.0 * PI * 2.0;
            (c * rho / (slice * kc1)).powf(1.0 / (1.5 + alpha))
        } else {
            0.0
        };
        let v_target = (40.0f64).max(v_adaptive).min(quad_spec.r_max * rho.max(1.0));
        let r_b_end = (v_target / rho).max(b_lo).min(r_hi);
        if r_b_end > b_lo {
            let f = |r: f64| j0(rho * r) * model.radial_density(r).unwrap_or(0.0) * r;
            let edges = quad::cap_panel_width(&[b_lo, r_b_end], PI / rho);
            total.add(quad::integrate_edges(&f, &edges));
        }

        // --- Bessel tail beyond r_b_end by parts, per power segment ---
        if r_hi.is_infinite() {
            let (segments, exact) = tail_segments(model, r_b_end);
            for (start, end, sigma) in segments {
                let mu = 1.0 + sigma;
                let lo = bessel_tail(mu, rho * start);
                total.value += model.c0_tail * rho.powf(sigma) * lo.value;
                total.error += model.c0_tail * rho.powf(sigma) * lo.error;
                if end.is_finite() {
                    let hi = bessel_tail(mu, rho * end);
                    total.value -= model.c0_tail * rho.powf(sigma) * hi.value;
                    total.error += model.c0_tail * rho.powf(sigma) * hi.error;
                }
            }
            if !exact {
                // |f - c0 r^{-2-α}| ≤ c0(2+α)r^{-3-α} for the smoothed family
                let v_eff = rho * r_b_end;
                total.error += (2.0 / PI).sqrt() * model.c0_tail * (2.0 + alpha)
                    / (1.5 + alpha)
                    * rho.powf(1.0 + alpha)
                    * v_eff.powf(-1.5 - alpha);
            }
        }

        Ok(Estimate { value: 2.0 * PI * total.value, error: 2.0 * PI * total.error })
    }

    /// Upper edge of the log-log cache band: beyond it `ψ(ρ)` carries
    /// under-resolved Bessel oscillations from the density's feature scale.
    fn cache_band_limit(&self) -> f64 {
        match self.model.kind {
            LevyKind::PureStable => f64::INFINITY,
            LevyKind::TruncatedStable { cutoff } => 16.0 / cutoff,
            LevyKind::SmoothedPareto => 16.0,
            LevyKind::TwoPower { .. } => 16.0,
            LevyKind::CompactSupport { .. } => 0.0, // closed form, no cache
        }
    }

    /// Precompute `ln(-ψ)` on a uniform log grid covering `[rho_lo, rho_hi]`
    /// (clipped to the smooth band); evaluations outside fall back to the
    /// direct path.
    pub fn with_cache(mut self, rho_lo: f64, rho_hi: f64) -> Result<Self> {
        use rayon::prelude::*;
        let limit = self.cache_band_limit();
        let lo = rho_lo.max(1e-300);
        let hi = rho_hi.min(limit);
        if !(hi > lo) || limit == 0.0 {
            return Ok(self);
        }
        let per_decade = (4 * self.quad.panels_per_decade).max(64) as f64;
        let decades = (hi / lo).log10().max(0.1);
        let n = ((decades * per_decade).ceil() as usize + 2).max(8);
        let ln_lo = lo.ln();
        let step = (hi.ln() - ln_lo) / (n - 1) as f64;
        let vals: Vec<Result<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let rho = (ln_lo + step * i as f64).exp();
                let est = self.eval_estimate(rho)?;
                if est.value >= 0.0 {
                    return Err(Error::NonConvergence {
                        value: est.value,
                        error_bound: est.error,
                        requested: 0.0,
                    });
                }
                if est.error > 0.125 * self.quad.rel_tol * est.value.abs() {
                    return Err(Error::NonConvergence {
                        value: est.value,
                        error_bound: est.error,
                        requested: 0.125 * self.quad.rel_tol * est.value.abs(),
                    });
                }
                Ok((-est.value).ln())
            })
            .collect();
        let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
        self.cache = Some(RadialCache { ln_lo, step, vals });
        Ok(self)
    }

    /// Fast-path value: cache interpolation inside the band, direct
    /// quadrature (or the annulus closed form) outside.
    pub fn eval_value(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.eval(rho.ln()) {
                return v;
            }
        }
        self.eval_estimate(rho).map(|e| e.value).unwrap_or(f64::NAN)
    }

    /// Rescaled log-characteristic function at the probe:
    /// `A_ε = ε^{-1} ∫ ψ(ε^{H+1/α-κ}·‖g(u)‖) du` for rescaling exponent κ.
    pub fn log_chf_rescaled(
        &self,
        params: &ProcessParams,
        fdd: &FddSpec,
        eps: f64,
        rescale_exponent: f64,
    ) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        check_existence(&self.model, params)?;
        let Some(probe) = CompiledProbe::new(params, fdd) else {
            return Ok(0.0);
        };
        let zoom = eps.powf(params.decay_exponent() - rescale_exponent);
        let model = &self.model;
        let tail = if model.has_power_tail() {
            let consts = StableLimitConstants::new(params.alpha)?;
            let kc1 = consts.kappa_alpha * consts.c1;
            let c = model.c0_tail * kc1 * zoom.powf(params.alpha) / eps;
            TailModel {
                q: params.alpha,
                coef: -c,
                bound_coef: c * model.c_bound / model.c0_tail,
            }
        } else {
            let m2 = model.second_radial_moment().ok_or_else(|| {
                Error::UnsupportedModel("light-tail mode needs a finite second moment".into())
            })?;
            let c = PI / 2.0 * m2 * zoom * zoom / eps;
            TailModel { q: 2.0, coef: -c, bound_coef: c }
        };
        let est = probe.integrate(|_, g| self.eval_value(zoom * g) / eps, tail, &self.quad);
        let psi_rel = 0.25 * self.quad.rel_tol;
        let error = est.error + psi_rel * est.value.abs();
        let tol = self.quad.abs_tol.max(16.0 * self.quad.rel_tol * est.value.abs());
        if error > tol && est.value.abs() > self.quad.abs_tol {
            return Err(Error::NonConvergence { value: est.value, error_bound: error, requested: tol });
        }
        Ok(est.value)
    }

    /// Bounds on `‖g‖` seen by the driver, used to size the cache band.
    pub fn probe_g_range(params: &ProcessParams, fdd: &FddSpec, quad: &QuadSpec) -> Option<(f64, f64)> {
        CompiledProbe::new(params, fdd).map(|p| p.g_norm_range(quad))
    }
}

/// Analytic existence shortcut for the built-in families: the outer
/// projection condition holds for every power tail, and the inner condition
/// fails exactly when the origin exponent reaches `1/(H+1/α-1)`.
fn check_existence(model: &LevyModel, params: &ProcessParams) -> Result<()> {
    let dec = params.decay_exponent();
    if dec > 1.0 {
        if let Some(sigma) = model.origin_exponent() {
            if sigma >= 1.0 / (dec - 1.0) {
                return Err(Error::ExistencePrecondition(format!(
                    "origin exponent {sigma} ≥ 1/(H+1/α-1) = {}",
                    1.0 / (dec - 1.0)
                )));
            }
        }
    }
    Ok(())
}

/// The Lévy exponent `ψ(z)` of the model, by radial Bessel reduction.
pub fn psi(model: &LevyModel, z: [f64; 2], quad: &QuadSpec) -> Result<f64> {
    LevyExponent::new(*model, *quad)?.eval(z[0].hypot(z[1]))
}

/// Log-characteristic function of the rescaled finite-dimensional
/// distribution `(X_{εt_j}/ε^H)_j` at the probe; `eps = 1` gives the plain
/// fdd log-characteristic function.
pub fn log_chf_fdd(
    model: &LevyModel,
    params: &ProcessParams,
    fdd: &FddSpec,
    eps: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    let engine = LevyExponent::new(*model, *quad)?;
    engine.log_chf_rescaled(params, fdd, eps, params.hurst)
}

/// Lattice controls for the brute-force Cartesian oracle.
#[derive(Debug, Clone, Copy)]
pub struct LatticeSpec {
    /// Half-width of the covered square.
    pub r_max: f64,
    /// Radius of the excluded hole around the origin (0 for bounded
    /// densities).
    pub hole: f64,
    /// Cells per shell half-width (resolution of each dyadic shell).
    pub cells_per_shell: u32,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec { r_max: 140.0, hole: 0.0, cells_per_shell: 48 }
    }
}

/// Brute-force estimate with its certified-remainder components.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceEstimate {
    /// Riemann-sum value of the real part (= the ψ estimate).
    pub value: f64,
    /// Imaginary part of the sum; vanishes by symmetry up to lattice error.
    pub imag: f64,
    /// Compensator contribution `-Σ ⟨z,x⟩·f·ΔA` over `‖x‖ ≤ 1` (imaginary);
    /// cancels on the symmetric lattice.
    pub compensator: f64,
    /// Bound on the neglected tail and hole.
    pub bound: f64,
}

/// Direct two-dimensional Riemann sum of the ψ integrand in Cartesian
/// coordinates over dyadic square shells. Independent of the radial
/// reduction; intended for tests and validation runs.
pub fn psi_bruteforce(model: &LevyModel, z: [f64; 2], lattice: &LatticeSpec) -> Result<BruteForceEstimate> {
    if model.origin_exponent().is_some() && !(lattice.hole > 0.0) {
        return Err(Error::Domain(
            "a positive hole radius is required for densities singular at the origin".into(),
        ));
    }
    let znorm = z[0].hypot(z[1]);
    let wavelength = if znorm > 0.0 { 2.0 * PI / znorm } else { f64::INFINITY };

    let mut value = 0.0f64;
    let mut imag = 0.0f64;
    let mut compensator = 0.0f64;

    let mut r_hi = lattice.r_max;
    let floor = (lattice.hole / 2.0).max(lattice.r_max * 2f64.powi(-26));
    while r_hi > floor {
        let r_lo_shell = if r_hi / 2.0 > floor { r_hi / 2.0 } else { 0.0 };
        let step = (r_hi / lattice.cells_per_shell as f64).min(wavelength / 8.0);
        let n = (r_hi / step).ceil() as i64;
        let step = r_hi / n as f64;
        for ix in -n..n {
            let x0 = (ix as f64 + 0.5) * step;
            for iy in -n..n {
                let x1 = (iy as f64 + 0.5) * step;
                // keep the shell interior: outside the inner square
                if x0.abs() < r_lo_shell && x1.abs() < r_lo_shell {
                    continue;
                }
                let r = x0.hypot(x1);
                if r < lattice.hole {
                    continue;
                }
                let f = model.density_at([x0, x1])? * step * step;
                let phase = z[0] * x0 + z[1] * x1;
                value += (phase.cos() - 1.0) * f;
                imag += phase.sin() * f;
                if r <= 1.0 {
                    compensator -= phase * f;
                }
            }
        }
        if r_lo_shell == 0.0 {
            break;
        }
        r_hi = r_lo_shell;
    }

    // tail beyond the covered square, |cos-1| ≤ 2
    let mut bound = 2.0 * 2.0 * PI * model.tail_mass_above(lattice.r_max);
    // hole: |cos(⟨z,x⟩)-1| ≤ ⟨z,x⟩²/2 ≤ ‖z‖²r²/2
    if lattice.hole > 0.0 {
        let h = lattice.hole;
        let inner_sq = if let Some(sigma) = model.origin_exponent() {
            model.c0_tail * h.powf(2.0 - sigma) / (2.0 - sigma)
        } else {
            model.c_bound * h.powi(4) / 4.0
        };
        bound += PI * znorm * znorm * inner_sq;
    }
    // the innermost uncovered square for bounded densities
    if lattice.hole == 0.0 {
        bound += PI * znorm * znorm * model.c_bound * floor.powi(4) / 4.0;
    }

    Ok(BruteForceEstimate { value, imag: imag + compensator, compensator, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn stable_psi_closed(model: &LevyModel, rho: f64) -> f64 {
        let c = StableLimitConstants::new(model.alpha).unwrap();
        -model.c0_tail * c.kappa_alpha * c.c1 * rho.powf(model.alpha)
    }

    #[test]
    fn psi_zero_frequency() {
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        assert_eq!(psi(&m, [0.0, 0.0], &QuadSpec::default()).unwrap(), 0.0);
    }

    #[test]
    fn psi_pure_stable_matches_closed_form() {
        let q = QuadSpec::default();
        for alpha in [0.5, 0.8, 1.2, 1.5, 1.9] {
            let m = LevyModel::pure_stable(alpha, 1.3).unwrap();
            let engine = LevyExponent::new(m, q).unwrap();
            for rho in [1e-4, 0.1, 1.0, 7.0, 300.0] {
                let got = engine.eval(rho).unwrap();
                let want = stable_psi_closed(&m, rho);
                assert!(
                    (got - want).abs() <= 1e-6 * want.abs(),
                    "alpha={alpha} rho={rho}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn psi_is_nonpositive_and_radial() {
        let q = QuadSpec::default();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let models = [
            LevyModel::pure_stable(1.2, 1.0).unwrap(),
            LevyModel::smoothed_pareto(0.8, 1.0, 1.0).unwrap(),
            LevyModel::truncated_stable(1.5, 1.0, 0.5).unwrap(),
            LevyModel::compact_support(0.5, 2.0, 1.0).unwrap(),
        ];
        for m in models {
            for _ in 0..20 {
                let z = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
                let v = psi(&m, z, &q).unwrap();
                assert!(v <= 0.0, "{m:?} {z:?}: {v}");
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let rz = [
                    phi.cos() * z[0] - phi.sin() * z[1],
                    phi.sin() * z[0] + phi.cos() * z[1],
                ];
                let vr = psi(&m, rz, &q).unwrap();
                assert!((v - vr).abs() <= 1e-10 * v.abs().max(1e-12), "{m:?} rotation");
            }
        }
    }

    #[test]
    fn psi_smoothed_pareto_regression_values() {
        // anchors from an independent python evaluation of the radial integral
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let engine = LevyExponent::new(m, QuadSpec::default()).unwrap();
        let anchors = [
            (1e-3, -0.00140398263708),
            (0.1, -0.259966399727),
            (1.0, -1.53437769859),
            (3.0, -2.16658183957),
            (10.0, -2.364359705),
        ];
        for (rho, want) in anchors {
            let got = engine.eval(rho).unwrap();
            assert!(
                (got - want).abs() <= 1e-5 * want.abs(),
                "rho={rho}: {got} vs {want}"
            );
        }
        // saturation towards -total mass at huge frequency
        let sat = engine.eval(1e5).unwrap();
        let mass = m.total_mass().unwrap();
        assert!((sat + mass).abs() < 2e-2 * mass, "{sat} vs -{mass}");
    }

    #[test]
    fn psi_annulus_closed_form_matches_quadrature() {
        let m = LevyModel::compact_support(0.5, 2.0, 1.0).unwrap();
        let engine = LevyExponent::new(m, QuadSpec::default()).unwrap();
        for rho in [0.3, 2.0, 17.0] {
            let closed = engine.eval_estimate(rho).unwrap().value;
            let generic = engine.eval_quadrature(rho).unwrap().value;
            assert!(
                (closed - generic).abs() <= 1e-8 * closed.abs(),
                "rho={rho}: {closed} vs {generic}"
            );
        }
    }

    #[test]
    fn psi_cache_matches_direct() {
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let engine = LevyExponent::new(m, QuadSpec::default())
            .unwrap()
            .with_cache(1e-6, 10.0)
            .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..50 {
            let rho = 10f64.powf(rng.random_range(-5.8..0.9));
            let fast = engine.eval_value(rho);
            let direct = engine.eval_estimate(rho).unwrap().value;
            assert!(
                (fast - direct).abs() <= 1e-6 * direct.abs(),
                "rho={rho}: {fast} vs {direct}"
            );
        }
    }

    #[test]
    fn bruteforce_agrees_with_engine_on_smoothed_pareto() {
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let q = QuadSpec::default();
        let lattice = LatticeSpec { r_max: 60.0, hole: 0.0, cells_per_shell: 40 };
        for z in [[1.0, 0.0], [0.7, -1.1]] {
            let bf = psi_bruteforce(&m, z, &lattice).unwrap();
            let engine = psi(&m, z, &q).unwrap();
            assert!(
                (bf.value - engine).abs() <= bf.bound + 5e-3 * engine.abs(),
                "z={z:?}: {} vs {engine} (bound {})",
                bf.value,
                bf.bound
            );
            // symmetry cancels the imaginary part and the compensator
            assert!(bf.imag.abs() < 1e-10 * engine.abs());
        }
    }

    #[test]
    fn bruteforce_rejects_singular_model_without_hole() {
        let m = LevyModel::pure_stable(1.2, 1.0).unwrap();
        let lattice = LatticeSpec { r_max: 20.0, hole: 0.0, cells_per_shell: 16 };
        assert!(psi_bruteforce(&m, [1.0, 0.0], &lattice).is_err());
    }

    #[test]
    fn log_chf_zero_probe_and_times() {
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let p = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let q = QuadSpec::default();
        let zero_times = FddSpec::new(vec![0.0, 0.0], vec![1.0, 0.5], vec![0.0, 0.0]).unwrap();
        assert_eq!(log_chf_fdd(&m, &p, &zero_times, 1.0, &q).unwrap(), 0.0);
        let zero_theta = FddSpec::single(1.0, 0.0, 0.0);
        assert_eq!(log_chf_fdd(&m, &p, &zero_theta, 1.0, &q).unwrap(), 0.0);
    }

    #[test]
    fn log_chf_pure_stable_is_eps_free() {
        let m = LevyModel::pure_stable(1.2, 1.0).unwrap();
        let p = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let q = QuadSpec::default();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let engine = LevyExponent::new(m, q).unwrap();
        let a1 = engine.log_chf_rescaled(&p, &fdd, 1.0, p.hurst).unwrap();
        for eps in [0.25, 1.0 / 64.0] {
            let ae = engine.log_chf_rescaled(&p, &fdd, eps, p.hurst).unwrap();
            assert!((ae - a1).abs() <= 2e-5 * a1.abs(), "eps={eps}: {ae} vs {a1}");
        }
        assert!(a1 < 0.0);
    }

    #[test]
    fn log_chf_invariant_under_theta_rotation() {
        let m = LevyModel::smoothed_pareto(1.5, 1.0, 1.0).unwrap();
        let p = ProcessParams::new(1.5, 0.6, 1.0, 0.4).unwrap();
        let q = QuadSpec::default();
        let fdd = FddSpec::new(vec![1.0, 2.0], vec![1.0, -0.5], vec![0.2, 0.8]).unwrap();
        let engine = LevyExponent::new(m, q).unwrap();
        let base = engine.log_chf_rescaled(&p, &fdd, 1.0, p.hurst).unwrap();
        for phi in [0.7, 2.1] {
            let rot = engine
                .log_chf_rescaled(&p, &fdd.rotated(phi), 1.0, p.hurst)
                .unwrap();
            assert!((rot - base).abs() <= 1e-8 * base.abs(), "phi={phi}");
        }
    }

    #[test]
    fn log_chf_increment_probes_are_stationary() {
        // CF of X_{t+h} - X_h as the probe {(t+h, w), (h, -w)}: independent of h
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let p = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let q = QuadSpec::default();
        let engine = LevyExponent::new(m, q).unwrap();
        let t = 1.0;
        let probe = |h: f64| {
            FddSpec::new(vec![t + h, h], vec![1.0, -1.0], vec![0.5, -0.5]).unwrap()
        };
        let base = engine.log_chf_rescaled(&p, &probe(1.0), 1.0, p.hurst).unwrap();
        for h in [2.0, 3.0] {
            let shifted = engine.log_chf_rescaled(&p, &probe(h), 1.0, p.hurst).unwrap();
            assert!(
                (shifted - base).abs() <= 1e-5 * base.abs(),
                "h={h}: {shifted} vs {base}"
            );
        }
    }

    #[test]
    fn existence_precondition_is_enforced() {
        // two-power with origin exponent 1.9, α=0.8, H=0.9: inner moment diverges
        let m = LevyModel::two_power(0.8, 1.0, 1.9, 1.0).unwrap();
        let p = ProcessParams::new(0.8, 0.9, 1.0, 0.0).unwrap();
        let q = QuadSpec::default();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        assert!(matches!(
            log_chf_fdd(&m, &p, &fdd, 1.0, &q),
            Err(Error::ExistencePrecondition(_))
        ));
    }

    #[test]
    fn k_function_is_frequency_independent() {
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let engine = LevyExponent::new(m, QuadSpec::default()).unwrap();
        let theta = [0.7, -0.4];
        let k0 = engine.k_function(theta, 0.0).unwrap();
        let k7 = engine.k_function(theta, 7.3).unwrap();
        assert_eq!(k0, k7);
        assert!((k0 - psi(&m, theta, &QuadSpec::default()).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn raw_and_substituted_coordinates_agree() {
        // A_ε computed in raw s-coordinates: probe times ε·t_j, frequencies
        // scaled by ε^{-H}, no rescaling (eps = 1)
        let m = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let p = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let q = QuadSpec::default();
        let engine = LevyExponent::new(m, q).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.3);
        let eps = 0.125f64;
        let substituted = engine.log_chf_rescaled(&p, &fdd, eps, p.hurst).unwrap();
        let raw_probe = fdd.scaled_times(eps).scaled_theta(eps.powf(-p.hurst));
        let raw = engine.log_chf_rescaled(&p, &raw_probe, 1.0, p.hurst).unwrap();
        assert!(
            (substituted - raw).abs() <= 1e-6 * substituted.abs(),
            "{substituted} vs {raw}"
        );
    }
}
