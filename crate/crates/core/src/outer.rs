//! Half-line integration driver shared by the characteristic-function
//! engine and the stable-limit scale integral.
//!
//! Both integrate a function of `‖g(u)‖` over the frequency line. The
//! integrand carries three structural features that fix the panelization:
//!
//! * an algebraic singularity at `u = 0` where `‖g(u)‖ ~ u^{2-H-1/α}`,
//! * an oscillating almost-periodic factor `|Q(u)|` with α-power kinks at
//!   the zeros of `Q` (the common-period lattice),
//! * a power envelope `u^{-q(H+1/α)}` in the tail.
//!
//! Panels are aligned to the period lattice with dyadic grading into each
//! lattice point; the far tail is summed analytically from the period mean
//! `M` and the first-order correction `M₁` of the periodic factor. For
//! probes with incommensurate times the tail mean is estimated from a
//! trailing window and the full tail is charged to the error estimate.

use crate::chf_engine::QuadSpec;
use crate::kernel::{oscillating_factor, FddSpec, ProcessParams};
use crate::quad::{self, Estimate};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Tail behaviour of the integrand: `integrand(u, g) ≈ coef·g^q` once `g`
/// is small. `bound_coef` dominates `|integrand|/g^q` everywhere.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailModel {
    pub q: f64,
    pub coef: f64,
    pub bound_coef: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SideProbe {
    /// Weight coefficient of this half-line (`|a|` or `|b|`).
    coef: f64,
    /// `(t_j, c_j)` with `c_j = conj(w_j)` on the positive side and `w_j`
    /// on the negative side; terms with `t_j = 0` or `w_j = 0` dropped.
    terms: Vec<(f64, Complex64)>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledProbe {
    sides: Vec<SideProbe>,
    /// `1 - H - 1/α`
    weight_exp: f64,
    /// `H + 1/α`
    decay_exp: f64,
    /// base period `2π/gcd(|t_j|)` when the times are commensurate
    period: Option<f64>,
    /// oscillation-resolving subdivision of one period
    n_sub: usize,
    t_scale: f64,
}

/// Greatest common divisor of positive reals by Euclid with a relative
/// tolerance; `None` when the ratios do not resolve to small integers.
fn real_gcd(values: &[f64]) -> Option<f64> {
    let scale = values.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-9 * scale;
    let mut g = values[0];
    for &v in &values[1..] {
        let mut a = g.max(v);
        let mut b = g.min(v);
        while b > tol {
            let r = a % b;
            a = b;
            b = if r < tol { 0.0 } else { r };
        }
        g = a;
    }
    for &v in values {
        let k = v / g;
        if (k - k.round()).abs() > 1e-6 || k.round() > 4096.0 {
            return None;
        }
    }
    Some(g)
}

impl CompiledProbe {
    /// `None` when the probe is degenerate (all frequencies zero, all times
    /// zero, or both weight coefficients zero): the integral is 0.
    pub fn new(params: &ProcessParams, fdd: &FddSpec) -> Option<Self> {
        let collect = |conjugate: bool| -> Vec<(f64, Complex64)> {
            (0..fdd.len())
                .filter_map(|j| {
                    let w = Complex64::new(fdd.theta1()[j], fdd.theta2()[j]);
                    let t = fdd.times()[j];
                    (w.norm_sqr() > 0.0 && t != 0.0)
                        .then(|| (t, if conjugate { w.conj() } else { w }))
                })
                .collect()
        };
        let pos = collect(true);
        let neg = collect(false);
        if pos.is_empty() {
            return None;
        }
        let mut sides = Vec::new();
        if params.a != 0.0 {
            sides.push(SideProbe { coef: params.a.abs(), terms: pos.clone() });
        }
        if params.b != 0.0 {
            sides.push(SideProbe { coef: params.b.abs(), terms: neg });
        }
        if sides.is_empty() {
            return None;
        }
        let freqs: Vec<f64> = pos.iter().map(|(t, _)| t.abs()).collect();
        let t_scale = freqs.iter().cloned().fold(0.0f64, f64::max);
        let gcd = real_gcd(&freqs);
        let (period, k_max) = match gcd {
            Some(g) => (Some(TAU / g), (t_scale / g).round() as usize),
            None => (None, 1),
        };
        let n_sub = (4 * k_max).clamp(8, 4096);
        Some(CompiledProbe {
            sides,
            weight_exp: params.weight_exponent(),
            decay_exp: params.decay_exponent(),
            period,
            n_sub,
            t_scale,
        })
    }

    /// `‖g‖` evaluated on one side at `u > 0` (the reflected coordinate for
    /// the negative side).
    fn g_norm_side(&self, side: &SideProbe, u: f64) -> f64 {
        let mut z = Complex64::new(0.0, 0.0);
        for &(t, c) in &side.terms {
            let (re, im) = oscillating_factor(t, u);
            z += c * Complex64::new(re, im);
        }
        side.coef * u.powf(self.weight_exp) * z.norm()
    }

    /// The periodic tail factor `h(u) = (coef·|Q(u)|)^q` with
    /// `Q(u) = Σ c_j (e^{i t_j u} - 1)`; `‖g(u)‖^q = h(u)·u^{-q(H+1/α)}`.
    fn h_side(&self, side: &SideProbe, u: f64, q: f64) -> f64 {
        let mut z = Complex64::new(0.0, 0.0);
        for &(t, c) in &side.terms {
            z += c * (Complex64::new(0.0, t * u).exp() - 1.0);
        }
        (side.coef * z.norm()).powf(q)
    }

    /// Coarse global bounds on `‖g(u)‖` over panels that the driver will
    /// visit, used to size the ψ-cache band.
    pub fn g_norm_range(&self, quad: &QuadSpec) -> (f64, f64) {
        let t_ref = if self.t_scale > 0.0 { self.t_scale } else { 1.0 };
        let lo_u = 1e-14 / t_ref;
        let hi_u = quad.u_max.max(1e4) * 4.0 / t_ref.min(1.0);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for side in &self.sides {
            for k in 0..512 {
                let f = k as f64 / 511.0;
                let u = lo_u * (hi_u / lo_u).powf(f);
                let g = self.g_norm_side(side, u);
                if g > 0.0 {
                    lo = lo.min(g);
                    hi = hi.max(g);
                }
            }
        }
        if !lo.is_finite() || hi == 0.0 {
            (1e-8, 1.0)
        } else {
            (lo, hi)
        }
    }

    /// Period of the tail factor on both sides (`|Q|` has the same period
    /// on either side), in `u` units.
    fn period_or_pseudo(&self) -> f64 {
        self.period.unwrap_or(TAU / self.t_scale)
    }

    /// Integrate `integrand(u, ‖g(u)‖)` over the full line.
    pub fn integrate<F: Fn(f64, f64) -> f64>(
        &self,
        integrand: F,
        tail: TailModel,
        quad: &QuadSpec,
    ) -> Estimate {
        let mut total = Estimate::zero();
        for side in &self.sides {
            total.add(self.integrate_side(side, &integrand, tail, quad));
        }
        total
    }

    fn period_panel_edges(&self, lo: f64, hi: f64, depth: u32) -> Vec<f64> {
        let cell = (hi - lo) / self.n_sub as f64;
        let mut edges: Vec<f64> = (0..=self.n_sub).map(|j| lo + cell * j as f64).collect();
        for d in 1..=depth {
            let off = cell * 0.5f64.powi(d as i32);
            edges.push(lo + off);
            edges.push(hi - off);
        }
        quad::normalize_edges(edges, lo, hi)
    }

    fn integrate_side<F: Fn(f64, f64) -> f64>(
        &self,
        side: &SideProbe,
        integrand: &F,
        tail: TailModel,
        quad: &QuadSpec,
    ) -> Estimate {
        let q = tail.q;
        let t_period = self.period_or_pseudo();
        let p = q * self.decay_exp; // tail envelope exponent, > 1
        let slice_tol = 0.25 * quad.rel_tol;

        let f = |u: f64| integrand(u, self.g_norm_side(side, u));

        let mut est = Estimate::zero();

        // --- head: (0, T], dyadic descent with a certified remainder ---
        // |(e^{itu}-1)/(iu)| ≤ |t|, so ‖g(u)‖ ≤ coef·K_t·u^{weight_exp} with
        // K_t = Σ|c_j||t_j|, and ∫_0^{u1} ‖g‖^q du carries the exponent
        // 1 + q·weight_exp (positive for every admissible parameter set).
        let k_t: f64 = side.terms.iter().map(|(t, c)| c.norm() * t.abs()).sum();
        let head_expo = 1.0 + q * self.weight_exp;
        let head_bound = |u1: f64| {
            tail.bound_coef.abs() * (side.coef * k_t).powf(q) * u1.powf(head_expo) / head_expo
        };
        let cell = t_period / self.n_sub as f64;
        let head_floor = {
            let target = 1e-4 * slice_tol * head_bound(t_period);
            // keep u^{weight_exp} representable for the deepest panels
            let overflow_guard = 10f64.powf(-280.0 / self.weight_exp.abs().max(1.0));
            let mut u = cell;
            let mut k = 0u32;
            while k < 900 && head_bound(u) > target && u > overflow_guard {
                u *= 0.5;
                k += 1;
            }
            u
        };
        let top_edges = {
            let mut e = self.period_panel_edges(0.0, t_period, 20);
            e.retain(|&x| x >= cell);
            let mut u = cell;
            while u > head_floor * 1.5 {
                u *= 0.5;
                e.push(u);
            }
            quad::normalize_edges(e, head_floor, t_period)
        };
        est.add(quad::integrate_edges(&f, &top_edges));
        est.error += head_bound(head_floor);

        // --- periods 1..=K ---
        let max_h = (side.coef * 2.0 * side.terms.iter().map(|(_, c)| c.norm()).sum::<f64>()).powf(q);
        let mut k = 1usize;
        let k_cap = ((quad.u_max / t_period).ceil() as usize).max(64);
        let mut needed_k = 16usize.min(k_cap);
        while k <= needed_k {
            let depth = if k <= 8 { 20 } else { 12 };
            let edges = self.period_panel_edges(k as f64 * t_period, (k + 1) as f64 * t_period, depth);
            est.add(quad::integrate_edges(&f, &edges));
            if k == needed_k && needed_k < k_cap {
                // decide whether more periods are required for the
                // correction error of the analytic tail
                let u_next = (k + 1) as f64 * t_period;
                let corr = tail.bound_coef.abs() * 4.0 * p * t_period * t_period * max_h
                    * u_next.powf(-p - 1.0);
                let scale = est.value.abs().max(
                    tail.coef.abs() * max_h * u_next.powf(1.0 - p) / (p - 1.0),
                );
                if corr > slice_tol * scale {
                    let target = (slice_tol * scale
                        / (tail.bound_coef.abs() * 4.0 * p * t_period * t_period * max_h))
                        .powf(-1.0 / (p + 1.0));
                    needed_k = ((target / t_period).ceil() as usize).clamp(needed_k + 1, k_cap);
                }
            }
            k += 1;
        }
        let u_far = k as f64 * t_period;

        // --- analytic tail from the period mean ---
        est.add(self.tail_piece(side, integrand, tail, u_far, p, max_h));

        est
    }

    /// Tail `∫_U^∞ integrand ≈ coef·[M·U^{1-p}/(p-1) + M₁·U^{-p}]` from the
    /// period mean `M` and the mean `M₁` of the running integral of `h - M`.
    fn tail_piece<F: Fn(f64, f64) -> f64>(
        &self,
        side: &SideProbe,
        integrand: &F,
        tail: TailModel,
        u_far: f64,
        p: f64,
        max_h: f64,
    ) -> Estimate {
        let q = tail.q;
        let t_period = self.period_or_pseudo();
        let h = |u: f64| self.h_side(side, u, q);

        let mut out = Estimate::zero();
        if self.period.is_some() {
            let edges = self.period_panel_edges(u_far, u_far + t_period, 22);
            let m = quad::integrate_edges(&h, &edges).value / t_period;
            // cumulative values of P(v) = ∫_{u_far}^{v} (h - M) at panel edges
            let hm = |u: f64| h(u) - m;
            let mut cum = vec![0.0f64];
            for w in edges.windows(2) {
                let inc = quad::gk15(&hm, w[0], w[1]).value;
                cum.push(cum.last().unwrap() + inc);
            }
            let p_of = |x: f64| -> f64 {
                match edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
                    Ok(i) => cum[i],
                    Err(i) => {
                        let i = i.saturating_sub(1).min(edges.len() - 2);
                        cum[i] + quad::gk15(&hm, edges[i], x).value
                    }
                }
            };
            let m1 = quad::integrate_edges(&p_of, &edges).value / t_period;

            out.value = tail.coef * (m * u_far.powf(1.0 - p) / (p - 1.0) + m1 * u_far.powf(-p));
            out.error = tail.bound_coef.abs() * 4.0 * p * t_period * t_period * max_h
                * u_far.powf(-p - 1.0);

            // mismatch between the true integrand and its tail model at the
            // boundary (covers the deviation of ψ from its small-argument
            // power behaviour)
            let mut mismatch: f64 = 0.0;
            for frac in [0.21, 0.52, 0.77] {
                let u = u_far + frac * t_period;
                let model = tail.coef * h(u) * u.powf(-p);
                let actual = integrand(u, self.g_norm_side(side, u));
                let denom = model.abs().max(1e-300);
                mismatch = mismatch.max((actual - model).abs() / denom);
            }
            out.error += mismatch.min(1.0) * out.value.abs();
        } else {
            // incommensurate times: estimate the mean over a trailing window
            // and charge the estimate's spread to the error
            let window = 8.0 * t_period;
            let lo = (u_far - window).max(u_far * 0.5);
            let edges = quad::cap_panel_width(&[lo, u_far], t_period / 8.0);
            let m_hat = quad::integrate_edges(&h, &edges).value / (u_far - lo);
            let mut h_min = f64::INFINITY;
            let mut h_max = 0.0f64;
            for k in 0..64 {
                let v = h(lo + (u_far - lo) * k as f64 / 63.0);
                h_min = h_min.min(v);
                h_max = h_max.max(v);
            }
            let tail_val = tail.coef * m_hat * u_far.powf(1.0 - p) / (p - 1.0);
            out.value = tail_val;
            let spread = if m_hat > 0.0 { (h_max - h_min) / (2.0 * m_hat) } else { 1.0 };
            out.error = tail_val.abs() * spread.min(1.0)
                + tail.bound_coef.abs() * 4.0 * p * t_period * t_period * max_h
                    * u_far.powf(-p - 1.0);
        }
        out
    }
}
