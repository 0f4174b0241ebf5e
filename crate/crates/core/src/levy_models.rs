//! Families of rotationally invariant two-dimensional Lévy densities.
//!
//! Every family is radial, `f(x) = f_rad(‖x‖)`, with explicit constants:
//! `c0_tail` is the asymptotic tail constant (`f_rad(r)·r^{2+α} → c0_tail`)
//! and `c_bound` the global domination constant (`f_rad(r) ≤ c_bound·r^{-2-α}`)
//! for the heavy-tailed kinds.

use crate::error::{Error, Result};
use crate::quad::{self, Estimate};

/// Family selector together with the family-specific shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyKind {
    /// `c0·(1+r)^{-2-α}`: finite total mass, bounded at the origin, exactly
    /// simulable by shot noise.
    SmoothedPareto,
    /// `c0·r^{-2-α}·1{r ≥ cutoff}`: the pure power tail with the origin
    /// singularity removed.
    TruncatedStable { cutoff: f64 },
    /// `c0·r^{-2-α}` everywhere: the isotropic stable density, the
    /// self-similar oracle.
    PureStable,
    /// Uniform density `height` on the annulus `inner ≤ r ≤ outer`: all
    /// moments finite (light-tail mode).
    CompactSupport { inner: f64, outer: f64, height: f64 },
    /// `c0·r^{-2-origin_exponent}` for `r ≤ 1`, `c0·r^{-2-α}` beyond: the
    /// domination-violating counterexample when `origin_exponent > α`.
    TwoPower { origin_exponent: f64 },
}

/// A rotationally invariant Lévy density on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyModel {
    pub kind: LevyKind,
    /// Tail index of the heavy-tailed kinds; ignored for compact support.
    pub alpha: f64,
    /// Asymptotic tail constant c₀.
    pub c0_tail: f64,
    /// Global domination constant C.
    pub c_bound: f64,
}

/// Region selector for the first-coordinate projection moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `|x₁| ≤ 1`
    Inner,
    /// `|x₁| > 1`
    Outer,
}

/// A moment that may be certified divergent before any quadrature runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentValue {
    Finite(f64),
    Infinite,
}

impl MomentValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, MomentValue::Finite(_))
    }
}

/// Tail-verification report: `ratio_curve[k] = f_rad(r_k)·r_k^{2+α}/c0`.
#[derive(Debug, Clone)]
pub struct AssumptionAReport {
    pub ratio_curve: Vec<f64>,
    pub max_violation: f64,
    pub pass: bool,
}

impl LevyModel {
    pub fn new(kind: LevyKind, alpha: f64, c0_tail: f64, c_bound: f64) -> Result<Self> {
        if !matches!(kind, LevyKind::CompactSupport { .. }) && !(0.0 < alpha && alpha < 2.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,2), got {alpha}")));
        }
        if !(c0_tail > 0.0) || !(c_bound > 0.0) {
            return Err(Error::Domain("c0_tail and c_bound must be positive".into()));
        }
        match kind {
            LevyKind::TruncatedStable { cutoff } if !(cutoff > 0.0) => {
                return Err(Error::Domain("truncation radius must be positive".into()));
            }
            LevyKind::CompactSupport { inner, outer, height } => {
                if !(0.0 <= inner && inner < outer) || !(height > 0.0) {
                    return Err(Error::Domain(
                        "annulus needs 0 ≤ inner < outer and positive height".into(),
                    ));
                }
            }
            LevyKind::TwoPower { origin_exponent } => {
                if !(0.0 < origin_exponent && origin_exponent < 2.0) {
                    return Err(Error::Domain(format!(
                        "origin exponent must lie in (0,2) for Lévy-measure admissibility, got {origin_exponent}"
                    )));
                }
            }
            _ => {}
        }
        Ok(LevyModel { kind, alpha, c0_tail, c_bound })
    }

    pub fn smoothed_pareto(alpha: f64, c0_tail: f64, c_bound: f64) -> Result<Self> {
        Self::new(LevyKind::SmoothedPareto, alpha, c0_tail, c_bound)
    }

    pub fn pure_stable(alpha: f64, c0_tail: f64) -> Result<Self> {
        Self::new(LevyKind::PureStable, alpha, c0_tail, c0_tail)
    }

    pub fn truncated_stable(alpha: f64, c0_tail: f64, cutoff: f64) -> Result<Self> {
        Self::new(LevyKind::TruncatedStable { cutoff }, alpha, c0_tail, c0_tail)
    }

    pub fn compact_support(inner: f64, outer: f64, height: f64) -> Result<Self> {
        // alpha is unused for this kind; store a placeholder in (0,2)
        Self::new(LevyKind::CompactSupport { inner, outer, height }, 1.0, height.max(1.0), height.max(1.0))
    }

    pub fn two_power(alpha: f64, c0_tail: f64, origin_exponent: f64, c_bound: f64) -> Result<Self> {
        Self::new(LevyKind::TwoPower { origin_exponent }, alpha, c0_tail, c_bound)
    }

    /// Radial density profile `f_rad(r)`.
    pub fn radial_density(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
        }
        match self.kind {
            LevyKind::SmoothedPareto => Ok(self.c0_tail * (1.0 + r).powf(-2.0 - self.alpha)),
            LevyKind::TruncatedStable { cutoff } => Ok(if r < cutoff {
                0.0
            } else {
                self.c0_tail * r.powf(-2.0 - self.alpha)
            }),
            LevyKind::PureStable => {
                if r == 0.0 {
                    Err(Error::SingularPoint("pure-stable density at the origin".into()))
                } else {
                    Ok(self.c0_tail * r.powf(-2.0 - self.alpha))
                }
            }
            LevyKind::CompactSupport { inner, outer, height } => {
                Ok(if (inner..=outer).contains(&r) { height } else { 0.0 })
            }
            LevyKind::TwoPower { origin_exponent } => {
                if r == 0.0 {
                    Err(Error::SingularPoint("two-power density at the origin".into()))
                } else if r <= 1.0 {
                    Ok(self.c0_tail * r.powf(-2.0 - origin_exponent))
                } else {
                    Ok(self.c0_tail * r.powf(-2.0 - self.alpha))
                }
            }
        }
    }

    /// Lévy density at a point of the plane.
    pub fn density_at(&self, x: [f64; 2]) -> Result<f64> {
        self.radial_density(x[0].hypot(x[1]))
    }

    /// `∫_r^∞ f_rad(s)·s ds`, in closed form.
    pub fn tail_mass_above(&self, r: f64) -> f64 {
        let a = self.alpha;
        let c0 = self.c0_tail;
        match self.kind {
            LevyKind::SmoothedPareto => {
                c0 * ((1.0 + r).powf(-a) / a - (1.0 + r).powf(-1.0 - a) / (1.0 + a))
            }
            LevyKind::TruncatedStable { cutoff } => {
                let r = r.max(cutoff);
                c0 * r.powf(-a) / a
            }
            LevyKind::PureStable => {
                if r <= 0.0 {
                    f64::INFINITY
                } else {
                    c0 * r.powf(-a) / a
                }
            }
            LevyKind::CompactSupport { inner, outer, height } => {
                if r >= outer {
                    0.0
                } else {
                    let lo = r.max(inner);
                    height * (outer * outer - lo * lo) / 2.0
                }
            }
            LevyKind::TwoPower { origin_exponent } => {
                if r >= 1.0 {
                    c0 * r.powf(-a) / a
                } else if r > 0.0 {
                    c0 * ((r.powf(-origin_exponent) - 1.0) / origin_exponent + 1.0 / a)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Total mass `∫ν(dx) = 2π·∫_0^∞ f_rad(s)·s ds`, when finite.
    pub fn total_mass(&self) -> Option<f64> {
        let m = self.tail_mass_above(0.0);
        m.is_finite().then(|| 2.0 * std::f64::consts::PI * m)
    }

    /// `∫_0^∞ r^3 f_rad(r) dr`, finite only for compact support.
    pub fn second_radial_moment(&self) -> Option<f64> {
        match self.kind {
            LevyKind::CompactSupport { inner, outer, height } => {
                Some(height * (outer.powi(4) - inner.powi(4)) / 4.0)
            }
            _ => None,
        }
    }

    /// Support of the radial profile, `(r_lo, r_hi)`.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            LevyKind::TruncatedStable { cutoff } => (cutoff, f64::INFINITY),
            LevyKind::CompactSupport { inner, outer, .. } => (inner, outer),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Power exponent σ with `f_rad(r) ~ c0·r^{-2-σ}` at the origin, when the
    /// density is singular there.
    pub fn origin_exponent(&self) -> Option<f64> {
        match self.kind {
            LevyKind::PureStable => Some(self.alpha),
            LevyKind::TwoPower { origin_exponent } => Some(origin_exponent),
            _ => None,
        }
    }

    /// Whether the family carries the `c0·r^{-2-α}` power tail.
    pub fn has_power_tail(&self) -> bool {
        !matches!(self.kind, LevyKind::CompactSupport { .. })
    }

    /// Radius beyond which the tail is *exactly* `c0·r^{-2-α}`, if any.
    pub fn power_tail_exact_beyond(&self) -> Option<f64> {
        match self.kind {
            LevyKind::PureStable => Some(0.0),
            LevyKind::TruncatedStable { cutoff } => Some(cutoff),
            LevyKind::TwoPower { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Finite total activity (a requirement for plain shot-noise simulation).
    pub fn is_finite_activity(&self) -> bool {
        self.total_mass().is_some()
    }

    /// Inverse of the normalized radial CDF, for finite-mass kinds.
    ///
    /// Maps a uniform variate `u ∈ [0,1)` to a radius so that the returned
    /// radius has density `f_rad(r)·r / ∫ f_rad·s ds`.
    pub fn sample_radius(&self, u: f64) -> Result<f64> {
        let total = self.tail_mass_above(0.0);
        if !total.is_finite() {
            return Err(Error::UnsupportedModel(
                "radius sampling needs finite total mass".into(),
            ));
        }
        let u = u.clamp(0.0, 1.0 - 1e-16);
        match self.kind {
            LevyKind::TruncatedStable { cutoff } => Ok(cutoff * (1.0 - u).powf(-1.0 / self.alpha)),
            LevyKind::CompactSupport { inner, outer, .. } => {
                Ok((inner * inner + u * (outer * outer - inner * inner)).sqrt())
            }
            LevyKind::SmoothedPareto => {
                // solve tail_mass_above(r) = (1-u)·total by bisection + Newton
                let target = (1.0 - u) * total;
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                while self.tail_mass_above(hi) > target {
                    hi *= 2.0;
                    if hi > 1e150 {
                        return Err(Error::Domain("radius inversion overflow".into()));
                    }
                }
                let mut r = 0.5 * (lo + hi);
                for _ in 0..200 {
                    let g = self.tail_mass_above(r) - target;
                    if g > 0.0 {
                        lo = r;
                    } else {
                        hi = r;
                    }
                    // tail_mass' = -f_rad(r)·r
                    let slope = -self.radial_density(r)? * r;
                    let step = if slope != 0.0 { -g / slope } else { 0.0 };
                    let newton = r + step;
                    r = if newton > lo && newton < hi {
                        newton
                    } else {
                        0.5 * (lo + hi)
                    };
                    if hi - lo <= 1e-14 * (1.0 + r) {
                        break;
                    }
                }
                Ok(r)
            }
            _ => Err(Error::UnsupportedModel(
                "radius sampling needs finite total mass".into(),
            )),
        }
    }

    /// Checks the heavy-tail asymptotics and the global domination bound on
    /// a positive increasing radius grid.
    ///
    /// `ratio_curve[k] = f_rad(r_k)·r_k^{2+α}/c0`; pass requires the last
    /// ratio within `tol` of 1 and no point exceeding the `c_bound`
    /// domination (violation reported as the largest relative excess).
    pub fn verify_assumption_a(&self, radius_grid: &[f64], tol: f64) -> Result<AssumptionAReport> {
        if !self.has_power_tail() {
            return Err(Error::UnsupportedModel(
                "compact support has no power tail to verify".into(),
            ));
        }
        if radius_grid.is_empty() || radius_grid.windows(2).any(|w| w[1] <= w[0]) || radius_grid[0] <= 0.0 {
            return Err(Error::Domain("radius grid must be positive and increasing".into()));
        }
        let mut ratio_curve = Vec::with_capacity(radius_grid.len());
        let mut max_violation: f64 = 0.0;
        for &r in radius_grid {
            let f = self.radial_density(r)?;
            let power = r.powf(-2.0 - self.alpha);
            ratio_curve.push(f * r.powf(2.0 + self.alpha) / self.c0_tail);
            let excess = f / (self.c_bound * power) - 1.0;
            max_violation = max_violation.max(excess.max(0.0));
        }
        let last = *ratio_curve.last().unwrap();
        let pass = (last - 1.0).abs() <= tol && max_violation <= 1e-9;
        Ok(AssumptionAReport { ratio_curve, max_violation, pass })
    }

    /// Lévy-measure admissibility integral `∫ min(1,‖x‖²) ν(dx)` evaluated
    /// as `2π [∫_0^1 r³ f_rad dr + tail_mass_above(1)]`; `level` controls the
    /// mesh used on the inner part so refinement convergence can be tested.
    pub fn admissibility_integral(&self, level: u32) -> Result<f64> {
        let (lo, _) = self.support();
        let inner_lo = lo.min(1.0);
        let depth = 12 + 6 * level;
        let edges = quad::graded_edges(inner_lo, 1.0, true, depth);
        let edges = quad::cap_panel_width(&edges, 1.0 / (8 << level) as f64);
        let inner = if inner_lo < 1.0 {
            let f = |r: f64| {
                if r <= inner_lo {
                    0.0
                } else {
                    self.radial_density(r).unwrap_or(0.0) * r * r * r
                }
            };
            quad::integrate_edges(&f, &edges).value
        } else {
            0.0
        };
        Ok(2.0 * std::f64::consts::PI * (inner + self.tail_mass_above(1.0)))
    }

    /// Moment of the first-coordinate projection of the measure:
    /// `∫_{|x₁|>1} |x₁|^p ν(dx)` (outer) or `∫_{|x₁|≤1} |x₁|^p ν(dx)` (inner).
    ///
    /// Finiteness is decided analytically from the power exponents before
    /// any quadrature runs; divergent cases return `Infinite`.
    pub fn real_part_moment(&self, p: f64, region: Region) -> Result<MomentValue> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("moment exponent must be positive, got {p}")));
        }
        match region {
            Region::Outer => {
                if self.has_power_tail() && p >= self.alpha {
                    return Ok(MomentValue::Infinite);
                }
                if let LevyKind::CompactSupport { outer, .. } = self.kind {
                    if outer <= 1.0 {
                        return Ok(MomentValue::Finite(0.0));
                    }
                }
                Ok(MomentValue::Finite(self.projection_moment(p, Region::Outer)))
            }
            Region::Inner => {
                if let Some(sigma) = self.origin_exponent() {
                    if p <= sigma {
                        return Ok(MomentValue::Infinite);
                    }
                }
                Ok(MomentValue::Finite(self.projection_moment(p, Region::Inner)))
            }
        }
    }

    /// `∫_ℓ^∞ r^{p+1} f_rad(r) dr` for p < α (power-tail kinds) or any p
    /// (compact). The smoothed-pareto case is numeric with an asymptotic
    /// tail continuation; all others are closed form.
    fn radial_moment_above(&self, l: f64, p: f64) -> Estimate {
        let a = self.alpha;
        let c0 = self.c0_tail;
        let exact = |x: f64| c0 * x.powf(p - a) / (a - p);
        match self.kind {
            LevyKind::PureStable => Estimate { value: exact(l.max(1e-300)), error: 0.0 },
            LevyKind::TruncatedStable { cutoff } => {
                Estimate { value: exact(l.max(cutoff)), error: 0.0 }
            }
            LevyKind::TwoPower { origin_exponent: eta } => {
                if l >= 1.0 {
                    Estimate { value: exact(l), error: 0.0 }
                } else {
                    let near = if (p - eta).abs() > 1e-12 {
                        c0 * (1.0 - l.powf(p - eta)) / (p - eta)
                    } else {
                        c0 * (1.0 / l).ln()
                    };
                    Estimate { value: near + exact(1.0), error: 0.0 }
                }
            }
            LevyKind::CompactSupport { inner, outer, height } => {
                let lo = l.max(inner);
                let v = if lo >= outer {
                    0.0
                } else {
                    height * (outer.powf(p + 2.0) - lo.powf(p + 2.0)) / (p + 2.0)
                };
                Estimate { value: v, error: 0.0 }
            }
            LevyKind::SmoothedPareto => {
                // numeric on [l, R], then r^{-2-α}(1-(2+α)/r) continuation
                let r_big = 1e4f64.max(2.0 * l);
                let f = |r: f64| c0 * r.powf(p + 1.0) * (1.0 + r).powf(-2.0 - a);
                let mut edges = quad::graded_edges(l, l + 1.0, true, 20);
                let mut r = l + 1.0;
                while r < r_big {
                    edges.push(r);
                    r *= 1.25;
                }
                edges.push(r_big);
                let mut est = quad::integrate_edges(&f, &quad::normalize_edges(edges, l, r_big));
                let tail = c0
                    * (r_big.powf(p - a) / (a - p)
                        - (2.0 + a) * r_big.powf(p - a - 1.0) / (a + 1.0 - p));
                est.value += tail;
                est.error += c0 * (2.0 + a) * (3.0 + a) / 2.0 * r_big.powf(p - a - 2.0)
                    / (a + 2.0 - p).max(0.5);
                est
            }
        }
    }

    /// `∫_0^ℓ r^{p+1} f_rad(r) dr` for p above the origin exponent.
    fn radial_moment_below(&self, l: f64, p: f64) -> Estimate {
        let a = self.alpha;
        let c0 = self.c0_tail;
        let pow_piece = |lo: f64, hi: f64, expo: f64| -> f64 {
            // ∫_lo^hi c0 r^{p+1-2-expo} dr
            let q = p - expo;
            if q.abs() > 1e-12 {
                c0 * (hi.powf(q) - lo.powf(q)) / q
            } else {
                c0 * (hi / lo).ln()
            }
        };
        match self.kind {
            LevyKind::PureStable => {
                Estimate { value: c0 * l.powf(p - a) / (p - a), error: 0.0 }
            }
            LevyKind::TwoPower { origin_exponent: eta } => {
                let v = if l <= 1.0 {
                    c0 * l.powf(p - eta) / (p - eta)
                } else {
                    c0 / (p - eta) + pow_piece(1.0, l, a)
                };
                Estimate { value: v, error: 0.0 }
            }
            LevyKind::TruncatedStable { cutoff } => {
                let v = if l <= cutoff { 0.0 } else { pow_piece(cutoff, l, a) };
                Estimate { value: v, error: 0.0 }
            }
            LevyKind::CompactSupport { inner, outer, height } => {
                let hi = l.min(outer);
                let v = if hi <= inner {
                    0.0
                } else {
                    height * (hi.powf(p + 2.0) - inner.powf(p + 2.0)) / (p + 2.0)
                };
                Estimate { value: v, error: 0.0 }
            }
            LevyKind::SmoothedPareto => {
                let r_big = 1e4f64;
                let hi = l.min(r_big);
                let f = |r: f64| c0 * r.powf(p + 1.0) * (1.0 + r).powf(-2.0 - a);
                let edges = quad::cap_panel_width(&[0.0, hi.min(4.0)], 0.125);
                let mut est = quad::integrate_edges(&f, &edges);
                if hi > 4.0 {
                    let mut edges = vec![4.0];
                    let mut r = 4.0;
                    while r < hi {
                        r = (r * 1.25).min(hi);
                        edges.push(r);
                    }
                    est.add(quad::integrate_edges(&f, &edges));
                }
                if l > r_big {
                    // asymptotic continuation of the integrand beyond R
                    let q = p - a;
                    let main = if q.abs() > 1e-12 {
                        c0 * (l.powf(q) - r_big.powf(q)) / q
                    } else {
                        c0 * (l / r_big).ln()
                    };
                    let corr = -c0 * (2.0 + a) * (l.powf(q - 1.0) - r_big.powf(q - 1.0)) / (q - 1.0);
                    est.value += main + corr;
                    est.error += c0 * (2.0 + a) * (3.0 + a) / 2.0
                        * r_big.powf(q - 2.0).max(l.powf(q - 2.0))
                        / (q - 2.0).abs().max(0.5);
                }
                est
            }
        }
    }

    /// Angular assembly of the projection moment over the strip boundary
    /// `|x₁| = 1`: `4·∫_0^{π/2} cos^p(φ)·R(1/cos φ) dφ` with a graded mesh
    /// into φ = π/2.
    fn projection_moment(&self, p: f64, region: Region) -> f64 {
        let edges = quad::graded_edges(0.0, std::f64::consts::FRAC_PI_2, false, 44);
        let edges = quad::cap_panel_width(&edges, 0.05);
        let f = |phi: f64| {
            let c = phi.cos();
            if c <= 1e-300 {
                return 0.0;
            }
            let l = 1.0 / c;
            let radial = match region {
                Region::Outer => self.radial_moment_above(l, p).value,
                Region::Inner => self.radial_moment_below(l, p).value,
            };
            let w = c.powf(p);
            if w == 0.0 {
                0.0
            } else {
                w * radial
            }
        };
        4.0 * quad::integrate_edges(&f, &edges).value
    }
}
