//! Convergence verification of the rescaled finite-dimensional laws
//! towards the tangent process.
//!
//! [`lass_report`] evaluates `A_ε` along an ε-schedule against the stable
//! limit; [`gaussian_tangent_report`] runs the light-tail mode, where the
//! correct rescaling uses the effective Gaussian index
//! `H_G = H + 1/α - 1/2` and the limit is a quadratic form proportional to
//! the fractional-Brownian Gram matrix (an experimental, structural check).

use crate::chf_engine::{LevyExponent, QuadSpec};
use crate::error::{Error, Result};
use crate::kernel::{FddSpec, ProcessParams};
use crate::levy_models::LevyModel;
use crate::simulate::fbm_covariance;
use crate::stable_limit::log_chf_limit;
use rayon::prelude::*;

/// Convergence report of `A_ε → A_limit` along a decreasing ε-schedule.
#[derive(Debug, Clone)]
pub struct LassReport {
    pub eps_schedule: Vec<f64>,
    pub a_eps: Vec<f64>,
    pub a_limit: f64,
    pub abs_err: Vec<f64>,
    pub rel_err: Vec<f64>,
    /// Log-log regression slope of the error against ε (empirical order;
    /// descriptive only).
    pub fitted_order: f64,
    /// Spearman rank correlation between ε and the error.
    pub spearman: f64,
    /// Relative error at the smallest ε is below the target.
    pub pass: bool,
}

/// Spearman rank correlation of two sequences.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..xs.len() {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx).powi(2);
        dy += (ry[i] - my).powi(2);
    }
    num / (dx * dy).sqrt().max(1e-300)
}

fn loglog_slope(eps: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(err)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&x, &e)| (x.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den.max(1e-300)
}

fn build_engine(
    model: &LevyModel,
    params: &ProcessParams,
    fdd: &FddSpec,
    eps_schedule: &[f64],
    rescale: f64,
    quad: &QuadSpec,
) -> Result<LevyExponent> {
    let engine = LevyExponent::new(*model, *quad)?;
    let Some((g_lo, g_hi)) = LevyExponent::probe_g_range(params, fdd, quad) else {
        return Ok(engine);
    };
    let mut zoom_lo = f64::INFINITY;
    let mut zoom_hi = 0.0f64;
    for &e in eps_schedule {
        let z = e.powf(params.decay_exponent() - rescale);
        zoom_lo = zoom_lo.min(z);
        zoom_hi = zoom_hi.max(z);
    }
    engine.with_cache(0.5 * zoom_lo * g_lo, 2.0 * zoom_hi * g_hi)
}

/// Evaluates `A_ε` along the schedule and compares with the tangent limit
/// built from the model's tail constant.
pub fn lass_report(
    model: &LevyModel,
    params: &ProcessParams,
    fdd: &FddSpec,
    eps_schedule: &[f64],
    quad: &QuadSpec,
    target_rel_tol: f64,
) -> Result<LassReport> {
    if eps_schedule.is_empty() || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("eps schedule must be decreasing and nonempty".into()));
    }
    if !model.has_power_tail() {
        return Err(Error::UnsupportedModel(
            "the heavy-tail report needs a power-tail model; use the Gaussian mode".into(),
        ));
    }
    let engine = build_engine(model, params, fdd, eps_schedule, params.hurst, quad)?;
    let a_eps: Vec<f64> = eps_schedule
        .par_iter()
        .map(|&eps| engine.log_chf_rescaled(params, fdd, eps, params.hurst))
        .collect::<Result<_>>()?;
    let a_limit = log_chf_limit(params, fdd, model.c0_tail, quad)?;
    let abs_err: Vec<f64> = a_eps.iter().map(|a| (a - a_limit).abs()).collect();
    let denom = a_limit.abs().max(1e-300);
    let rel_err: Vec<f64> = abs_err.iter().map(|e| e / denom).collect();
    let fitted_order = loglog_slope(eps_schedule, &abs_err);
    let rho = spearman(eps_schedule, &abs_err);
    let pass = *rel_err.last().unwrap() < target_rel_tol;
    Ok(LassReport {
        eps_schedule: eps_schedule.to_vec(),
        a_eps,
        a_limit,
        abs_err,
        rel_err,
        fitted_order,
        spearman: rho,
        pass,
    })
}

/// Rescaling-exponent sweep: `A_ε` under the exponent `H + offset` must
/// blow up (towards -∞) or collapse to 0 when `offset ≠ 0` — the index `H`
/// is the unique stabilizing rescaling.
#[derive(Debug, Clone, Copy)]
pub struct RescaleCheck {
    pub offset: f64,
    pub a_first: f64,
    pub a_last: f64,
    /// `|A|` grew or shrank by more than a decade across the schedule.
    pub diverged: bool,
}

pub fn wrong_exponent_check(
    model: &LevyModel,
    params: &ProcessParams,
    fdd: &FddSpec,
    eps_schedule: &[f64],
    offset: f64,
    quad: &QuadSpec,
) -> Result<RescaleCheck> {
    let rescale = params.hurst + offset;
    let engine = build_engine(model, params, fdd, eps_schedule, rescale, quad)?;
    let a_first = engine.log_chf_rescaled(params, fdd, eps_schedule[0], rescale)?;
    let a_last =
        engine.log_chf_rescaled(params, fdd, *eps_schedule.last().unwrap(), rescale)?;
    let ratio = a_last.abs() / a_first.abs().max(1e-300);
    Ok(RescaleCheck { offset, a_first, a_last, diverged: !(0.1..=10.0).contains(&ratio) })
}

/// Light-tail (Gaussian-tangent) report: fitted quadratic form vs the
/// fractional-Brownian Gram matrix at Hurst index `H_G = H + 1/α - 1/2`.
#[derive(Debug, Clone)]
pub struct GaussianTangentReport {
    pub h_gauss: f64,
    /// `A_ε(single-time probes)` stabilization ratios across the schedule,
    /// `A_ε/A_{ε_min}` for the first probe time.
    pub stabilization: Vec<f64>,
    /// Fitted quadratic form on the probe times (row-major, n×n).
    pub sigma: Vec<f64>,
    /// Target Gram matrix `fbm_covariance(H_G, t_i, t_j)`.
    pub gram: Vec<f64>,
    /// Frobenius residual of `Σ - λ*·Gram` relative to `λ*·Gram`.
    pub residual: f64,
    /// Best proportionality scale λ*.
    pub scale: f64,
}

/// Fits the limiting quadratic form `-½ θᵀΣθ` from single- and pair-time
/// probes at the smallest ε of the schedule and compares its shape with
/// the fBm Gram matrix (one free overall scale).
pub fn gaussian_tangent_report(
    model: &LevyModel,
    params: &ProcessParams,
    times: &[f64],
    eps_schedule: &[f64],
    quad: &QuadSpec,
) -> Result<GaussianTangentReport> {
    if model.has_power_tail() {
        return Err(Error::UnsupportedModel(
            "the Gaussian mode needs a compact-support model".into(),
        ));
    }
    if times.is_empty() || times.iter().any(|&t| t == 0.0) {
        return Err(Error::Domain("probe times must be nonzero".into()));
    }
    if eps_schedule.is_empty() || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("eps schedule must be decreasing and nonempty".into()));
    }
    let h_gauss = params.hurst + 1.0 / params.alpha - 0.5;
    if !(0.0 < h_gauss && h_gauss < 1.0) {
        return Err(Error::Domain(format!(
            "effective Gaussian index H_G = {h_gauss} outside (0,1); mode refused"
        )));
    }
    let rescale = h_gauss;
    let eps_min = *eps_schedule.last().unwrap();

    let single = |t: f64| FddSpec::single(t, 1.0, 0.0);
    let pair = |t1: f64, t2: f64| {
        FddSpec::new(vec![t1, t2], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap()
    };

    let engine = build_engine(model, params, &single(times[0]), eps_schedule, rescale, quad)?;

    // stabilization of the first single-time probe across the schedule
    let a_series: Vec<f64> = eps_schedule
        .par_iter()
        .map(|&eps| engine.log_chf_rescaled(params, &single(times[0]), eps, rescale))
        .collect::<Result<_>>()?;
    let a_min = a_series.last().copied().unwrap();
    let stabilization = a_series.iter().map(|a| a / a_min).collect();

    // fit Σ at the smallest ε: Σ_jj = -2A(e@t_j), Σ_jk = A_j + A_k - A_{jk}
    let n = times.len();
    let diag: Vec<f64> = times
        .par_iter()
        .map(|&t| engine.log_chf_rescaled(params, &single(t), eps_min, rescale))
        .collect::<Result<_>>()?;
    let mut sigma = vec![0.0; n * n];
    for i in 0..n {
        sigma[i * n + i] = -2.0 * diag[i];
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let a_both =
                engine.log_chf_rescaled(params, &pair(times[i], times[j]), eps_min, rescale)?;
            let s = diag[i] + diag[j] - a_both;
            sigma[i * n + j] = s;
            sigma[j * n + i] = s;
        }
    }
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            gram[i * n + j] = fbm_covariance(h_gauss, times[i], times[j]);
        }
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let scale = dot(&sigma, &gram) / dot(&gram, &gram).max(1e-300);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n * n {
        num += (sigma[k] - scale * gram[k]).powi(2);
        den += (scale * gram[k]).powi(2);
    }
    let residual = (num / den.max(1e-300)).sqrt();

    Ok(GaussianTangentReport { h_gauss, stabilization, sigma, gram, residual, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_models::LevyModel;

    fn pow2_schedule(k_max: u32) -> Vec<f64> {
        (0..=k_max).map(|k| 0.5f64.powi(k as i32)).collect()
    }

    #[test]
    fn spearman_of_monotone_sequences_is_one() {
        let x = [1.0, 0.5, 0.25, 0.125];
        let y = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &y) - 1.0).abs() < 1e-12);
        let z = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &z) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_stable_report_has_quadrature_level_errors() {
        let model = LevyModel::pure_stable(1.2, 1.0).unwrap();
        let params = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let report = lass_report(
            &model,
            &params,
            &fdd,
            &pow2_schedule(6),
            &QuadSpec::default(),
            1e-3,
        )
        .unwrap();
        assert!(report.pass);
        for (k, rel) in report.rel_err.iter().enumerate() {
            assert!(*rel < 1e-4, "eps index {k}: rel err {rel}");
        }
    }

    #[test]
    fn smoothed_pareto_errors_decrease_along_the_schedule() {
        let model = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let report = lass_report(
            &model,
            &params,
            &fdd,
            &pow2_schedule(6),
            &QuadSpec::default(),
            0.5,
        )
        .unwrap();
        assert!(report.spearman > 0.99, "spearman {}", report.spearman);
        assert!(report.abs_err.windows(2).all(|w| w[1] < w[0]));
        assert!(report.fitted_order > 0.2, "order {}", report.fitted_order);
    }

    #[test]
    fn theta_scaling_consistency_of_reports() {
        // rescaling θ → λθ multiplies both A_ε and the limit by λ^α: the
        // relative errors coincide
        let model = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let q = QuadSpec::default();
        let sched = pow2_schedule(3);
        let base = lass_report(&model, &params, &FddSpec::single(1.0, 1.0, 0.0), &sched, &q, 0.5)
            .unwrap();
        let lam = 1.6f64;
        let scaled = lass_report(
            &model,
            &params,
            &FddSpec::single(1.0, lam, 0.0),
            &sched,
            &q,
            0.5,
        )
        .unwrap();
        let factor = lam.powf(params.alpha);
        assert!((scaled.a_limit - factor * base.a_limit).abs() < 1e-6 * scaled.a_limit.abs());
        for k in 0..sched.len() {
            assert!(
                (scaled.rel_err[k] - base.rel_err[k]).abs() < 1e-4,
                "k={k}: {} vs {}",
                scaled.rel_err[k],
                base.rel_err[k]
            );
        }
    }

    #[test]
    fn wrong_exponents_fail_to_stabilize() {
        let model = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let sched = pow2_schedule(10);
        let q = QuadSpec::default();
        for offset in [-0.1, 0.1] {
            let check =
                wrong_exponent_check(&model, &params, &fdd, &sched, offset, &q).unwrap();
            assert!(check.diverged, "offset {offset}: {check:?}");
        }
        let right = wrong_exponent_check(&model, &params, &fdd, &sched, 0.0, &q).unwrap();
        assert!(!right.diverged, "{right:?}");
    }

    #[test]
    fn gaussian_mode_is_refused_outside_the_index_window() {
        // H + 1/α - 1/2 ≥ 1 ⇒ refusal
        let model = LevyModel::compact_support(0.5, 2.0, 1.0).unwrap();
        let params = ProcessParams::new(0.8, 0.9, 1.0, 0.0).unwrap(); // H_G = 1.65
        let err = gaussian_tangent_report(
            &model,
            &params,
            &[1.0, 2.0],
            &pow2_schedule(4),
            &QuadSpec::default(),
        );
        assert!(err.is_err());
        // power-tail models are rejected outright
        let heavy = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let params_ok = ProcessParams::new(1.6, 0.4, 1.0, 0.0).unwrap();
        assert!(gaussian_tangent_report(
            &heavy,
            &params_ok,
            &[1.0],
            &pow2_schedule(4),
            &QuadSpec::default()
        )
        .is_err());
    }

    #[test]
    fn gaussian_mode_matches_the_fbm_gram_shape() {
        let model = LevyModel::compact_support(0.5, 2.0, 1.0).unwrap();
        let params = ProcessParams::new(1.6, 0.4, 1.0, 0.0).unwrap(); // H_G = 0.525
        let report = gaussian_tangent_report(
            &model,
            &params,
            &[1.0, 2.0],
            &pow2_schedule(8),
            &QuadSpec::default(),
        )
        .unwrap();
        assert!((report.h_gauss - 0.525).abs() < 1e-12);
        // stabilization: A_ε/A_min within 5% by the end of the schedule
        let last = report.stabilization[report.stabilization.len() - 2];
        assert!((last - 1.0).abs() < 0.05, "stabilization {last}");
        // Σ ratio vs Gram ratio: Σ12/Σ11 ≈ 2^{2H_G-1}
        let ratio = report.sigma[1] / report.sigma[0];
        let want = 2f64.powf(2.0 * report.h_gauss - 1.0);
        assert!((ratio - want).abs() < 0.05 * want, "{ratio} vs {want}");
        assert!(report.residual < 0.05, "residual {}", report.residual);
    }
}
