//! Seeded Monte-Carlo path generation and empirical characteristic
//! functions.
//!
//! Three samplers share the [`PathEnsemble`] container:
//!
//! * [`sample_hflm`] — exact shot-noise paths for finite-activity models:
//!   a Poisson point process with intensity `ds ⊗ ν(dx)` on
//!   `[-s_cap, s_cap] × ℝ²`, summed through the spectral kernel,
//! * [`sample_hfsm`] — the stable tangent process via sub-Gaussian spectral
//!   sums on a graded frequency grid,
//! * [`sample_fbm`] — fractional Brownian motion by dense Cholesky
//!   factorization of its covariance.
//!
//! Reproducibility contract: paths are generated from independent
//! counter-based streams (ChaCha12 keyed by the ensemble seed, one stream
//! per path), so parallel generation is order-independent and identical
//! `(seed, config)` reproduce bit-identical ensembles.

use crate::error::{Error, Result};
use crate::kernel::{f_t, FddSpec, ProcessParams};
use crate::levy_models::LevyModel;
use crate::stable_limit::StableLimitConstants;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::io::Write;

/// Method metadata recorded with every ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMeta {
    pub process: String,
    pub seed: u64,
    pub n_paths: usize,
    /// Named truncation/discretization settings of the scheme.
    pub settings: Vec<(String, f64)>,
}

/// Seeded Monte-Carlo sample paths on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub time_grid: Vec<f64>,
    pub paths: Vec<Vec<Complex64>>,
    pub meta: EnsembleMeta,
}

impl PathEnsemble {
    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    fn grid_index(&self, t: f64) -> Result<usize> {
        self.time_grid
            .iter()
            .position(|&g| (g - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or(Error::TimeNotOnGrid(t))
    }

    /// Multiply every path value by the unit complex `e^{iφ}` (rotational
    /// invariance diagnostics).
    pub fn rotated(&self, phi: f64) -> PathEnsemble {
        let rot = Complex64::from_polar(1.0, phi);
        PathEnsemble {
            time_grid: self.time_grid.clone(),
            paths: self
                .paths
                .iter()
                .map(|p| p.iter().map(|v| v * rot).collect())
                .collect(),
            meta: self.meta.clone(),
        }
    }

    /// One CSV row per (path, time): `path,time,re,im`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "path,time,re,im\r\n")?;
        for (i, path) in self.paths.iter().enumerate() {
            for (t, v) in self.time_grid.iter().zip(path) {
                write!(w, "{i},{t},{},{}\r\n", v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Sidecar metadata in TOML form.
    pub fn write_metadata<W: Write>(&self, w: &mut W, config_hash: &str) -> std::io::Result<()> {
        writeln!(w, "process = \"{}\"", self.meta.process)?;
        writeln!(w, "seed = {}", self.meta.seed)?;
        writeln!(w, "n_paths = {}", self.meta.n_paths)?;
        writeln!(w, "config_hash = \"{config_hash}\"")?;
        writeln!(w, "\n[settings]")?;
        for (k, v) in &self.meta.settings {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn validate_grid(time_grid: &[f64], n_paths: usize) -> Result<()> {
    if time_grid.is_empty() {
        return Err(Error::Domain("time grid must be nonempty".into()));
    }
    if time_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be positive".into()));
    }
    Ok(())
}

/// Kernel value at every grid time, `f_t(s)`, reusing the weight factor.
fn kernel_row(params: &ProcessParams, time_grid: &[f64], s: f64) -> Vec<Complex64> {
    time_grid
        .iter()
        .map(|&t| f_t(params, t, s).unwrap_or(Complex64::new(0.0, 0.0)))
        .collect()
}

/// Bound on the log-characteristic-function perturbation caused by
/// truncating the spectral line to `|s| ≤ s_cap`, at the given probe:
/// `C·κ_α·c₁·(2 max(|a|,|b|)·Σ|w_j|)^α · 2 s_cap^{-αH} / (αH)`.
pub fn hflm_truncation_bound(
    model: &LevyModel,
    params: &ProcessParams,
    fdd: &FddSpec,
    s_cap: f64,
) -> Result<f64> {
    let consts = StableLimitConstants::new(params.alpha)?;
    let wsum: f64 = (0..fdd.len())
        .map(|j| fdd.theta1()[j].hypot(fdd.theta2()[j]))
        .sum();
    let coef = 2.0 * params.a.abs().max(params.b.abs()) * wsum;
    let ah = params.alpha * params.hurst;
    Ok(model.c_bound * consts.kappa_alpha * consts.c1 * coef.powf(params.alpha) * 2.0
        * s_cap.powf(-ah)
        / ah)
}

/// Shot-noise sampler for finite-activity models: exact up to the spectral
/// truncation `|s| ≤ s_cap`.
pub fn sample_hflm(
    model: &LevyModel,
    params: &ProcessParams,
    time_grid: &[f64],
    s_cap: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    validate_grid(time_grid, n_paths)?;
    if !(s_cap > 0.0) {
        return Err(Error::Domain("s_cap must be positive".into()));
    }
    let Some(total_mass) = model.total_mass() else {
        return Err(Error::UnsupportedModel(
            "shot-noise sampling needs finite total activity".into(),
        ));
    };
    let rate = 2.0 * s_cap * total_mass;
    let poisson =
        Poisson::new(rate).map_err(|e| Error::Domain(format!("jump intensity: {e}")))?;

    let paths: Vec<Vec<Complex64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p);
            let n_jumps = poisson.sample(&mut rng) as usize;
            let mut acc = vec![Complex64::new(0.0, 0.0); time_grid.len()];
            for _ in 0..n_jumps {
                let s = rng.random_range(-s_cap..s_cap);
                let radius = model.sample_radius(rng.random()).expect("finite-mass model");
                let angle = rng.random_range(0.0..TAU);
                let jump = Complex64::from_polar(radius, angle);
                for (k, &t) in time_grid.iter().enumerate() {
                    if t != 0.0 {
                        acc[k] += f_t(params, t, s).expect("s != 0 a.s.") * jump;
                    }
                }
            }
            acc
        })
        .collect();

    Ok(PathEnsemble {
        time_grid: time_grid.to_vec(),
        paths,
        meta: EnsembleMeta {
            process: "hflm".into(),
            seed,
            n_paths,
            settings: vec![
                ("s_cap".into(), s_cap),
                ("total_mass".into(), total_mass),
                ("jump_rate".into(), rate),
            ],
        },
    })
}

/// Graded spectral grid for the sub-Gaussian sampler.
#[derive(Debug, Clone, Copy)]
pub struct SpectralGrid {
    /// Innermost resolved frequency (the remainder below it is certified
    /// by the scale bound).
    pub s_min: f64,
    /// Spectral truncation.
    pub s_max: f64,
    /// Geometric resolution between `s_min` and 1.
    pub points_per_decade: u32,
    /// Linear cell width beyond 1, before oscillation capping.
    pub max_cell: f64,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        SpectralGrid { s_min: 1e-5, s_max: 1000.0, points_per_decade: 24, max_cell: 0.5 }
    }
}

fn spectral_cells(grid: &SpectralGrid, t_max: f64) -> Vec<(f64, f64)> {
    // (midpoint, width) on the positive axis
    let mut cells = Vec::new();
    let ratio = 10f64.powf(1.0 / grid.points_per_decade as f64);
    let mut left = grid.s_min;
    while left < 1.0 {
        let right = (left * ratio).min(1.0);
        cells.push((0.5 * (left + right), right - left));
        left = right;
    }
    let width = grid.max_cell.min(PI / (4.0 * t_max.max(1e-6)));
    while left < grid.s_max {
        let right = (left + width).min(grid.s_max);
        cells.push((0.5 * (left + right), right - left));
        left = right;
    }
    cells
}

/// Sub-Gaussian spectral-sum sampler of the stable tangent process with
/// `c0_tail = 1` normalization: each grid cell contributes an independent
/// isotropic α-stable pair of scale matched to `κ_α·c₁·Δs`.
pub fn sample_hfsm(
    params: &ProcessParams,
    time_grid: &[f64],
    grid: &SpectralGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    validate_grid(time_grid, n_paths)?;
    if !(grid.s_min > 0.0 && grid.s_min < grid.s_max) {
        return Err(Error::Domain("spectral grid needs 0 < s_min < s_max".into()));
    }
    let consts = StableLimitConstants::new(params.alpha)?;
    let kc1 = consts.kappa_alpha * consts.c1;
    let t_max = time_grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let cells = spectral_cells(grid, t_max);
    let alpha = params.alpha;

    // per-cell Gaussian scale: σ² = 2(κc₁·Δs)^{2/α}
    let sides: &[f64] = if params.b == 0.0 {
        &[1.0]
    } else if params.a == 0.0 {
        &[-1.0]
    } else {
        &[1.0, -1.0]
    };
    let mut cell_data: Vec<(f64, f64)> = Vec::new(); // (signed midpoint, σ_G)
    for &side in sides {
        for &(mid, width) in &cells {
            let sigma = (2.0 * (kc1 * width).powf(2.0 / alpha)).sqrt();
            cell_data.push((side * mid, sigma));
        }
    }
    let kernel_rows: Vec<Vec<Complex64>> = cell_data
        .iter()
        .map(|&(s, _)| kernel_row(params, time_grid, s))
        .collect();

    let paths: Vec<Vec<Complex64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p);
            let mut acc = vec![Complex64::new(0.0, 0.0); time_grid.len()];
            for (cd, row) in cell_data.iter().zip(&kernel_rows) {
                let a = stable::positive_stable(alpha / 2.0, &mut rng);
                let g1: f64 = rng.sample(StandardNormal);
                let g2: f64 = rng.sample(StandardNormal);
                let m = Complex64::new(g1, g2) * (a.sqrt() * cd.1);
                for (v, f) in acc.iter_mut().zip(row) {
                    *v += f * m;
                }
            }
            acc
        })
        .collect();

    Ok(PathEnsemble {
        time_grid: time_grid.to_vec(),
        paths,
        meta: EnsembleMeta {
            process: "hfsm".into(),
            seed,
            n_paths,
            settings: vec![
                ("s_min".into(), grid.s_min),
                ("s_max".into(), grid.s_max),
                ("cells".into(), cell_data.len() as f64),
            ],
        },
    })
}

/// Covariance of fractional Brownian motion,
/// `(|t|^{2H} + |s|^{2H} - |t-s|^{2H})/2`.
pub fn fbm_covariance(hurst: f64, t: f64, s: f64) -> f64 {
    0.5 * (t.abs().powf(2.0 * hurst) + s.abs().powf(2.0 * hurst)
        - (t - s).abs().powf(2.0 * hurst))
}

fn cholesky_lower(mat: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = mat[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * n + j] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Dense-factorization sampler of fractional Brownian motion on the grid.
pub fn sample_fbm(hurst: f64, time_grid: &[f64], n_paths: usize, seed: u64) -> Result<PathEnsemble> {
    validate_grid(time_grid, n_paths)?;
    if !(0.0 < hurst && hurst < 1.0) {
        return Err(Error::Domain(format!("hurst must lie in (0,1), got {hurst}")));
    }
    if time_grid.len() > 2048 {
        return Err(Error::Domain("dense factorization is limited to 2048 grid points".into()));
    }
    // zero times map to the exact value 0; factor the nonzero block
    let active: Vec<usize> = (0..time_grid.len()).filter(|&i| time_grid[i] != 0.0).collect();
    let n = active.len();
    let mut gram = vec![0.0f64; n * n];
    for (i, &gi) in active.iter().enumerate() {
        for (j, &gj) in active.iter().enumerate() {
            gram[i * n + j] = fbm_covariance(hurst, time_grid[gi], time_grid[gj]);
        }
    }
    let mut l = None;
    let mut jitter = 0.0;
    for attempt in 0..4 {
        let mut m = gram.clone();
        if attempt > 0 {
            jitter = 1e-12 * 10f64.powi(attempt - 1)
                * gram.iter().step_by(n + 1).fold(0.0f64, |a, &d| a.max(d));
            for d in 0..n {
                m[d * n + d] += jitter;
            }
        }
        if let Some(fac) = cholesky_lower(&m, n) {
            l = Some(fac);
            break;
        }
    }
    let l = l.ok_or(Error::NotPositiveDefinite)?;

    let paths: Vec<Vec<Complex64>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p);
            let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let mut path = vec![Complex64::new(0.0, 0.0); time_grid.len()];
            for (i, &gi) in active.iter().enumerate() {
                let mut v = 0.0;
                for k in 0..=i {
                    v += l[i * n + k] * z[k];
                }
                path[gi] = Complex64::new(v, 0.0);
            }
            path
        })
        .collect();

    Ok(PathEnsemble {
        time_grid: time_grid.to_vec(),
        paths,
        meta: EnsembleMeta {
            process: "fbm".into(),
            seed,
            n_paths,
            settings: vec![("hurst".into(), hurst), ("jitter".into(), jitter)],
        },
    })
}

/// Empirical log-characteristic-function estimate with a delta-method
/// standard error.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalChf {
    /// `ln |mean exp(iZ)|`
    pub estimate: f64,
    pub std_error: f64,
    /// Phase of the mean; vanishes by rotational symmetry.
    pub imag_part: f64,
}

/// Sample mean of `exp(i Σ_j θ_j⁽¹⁾ Re X_{t_j} + θ_j⁽²⁾ Im X_{t_j})` over
/// the ensemble; returns the log-modulus and its delta-method error bar.
pub fn empirical_log_chf(ensemble: &PathEnsemble, fdd: &FddSpec) -> Result<EmpiricalChf> {
    let n = ensemble.n_paths();
    if n < 1000 {
        return Err(Error::Domain(format!(
            "empirical characteristic functions need at least 1000 paths, got {n}"
        )));
    }
    let idx: Vec<usize> = fdd
        .times()
        .iter()
        .map(|&t| ensemble.grid_index(t))
        .collect::<Result<_>>()?;

    let mut sum_c = 0.0f64;
    let mut sum_s = 0.0f64;
    let mut sum_cc = 0.0f64;
    let mut sum_ss = 0.0f64;
    let mut sum_cs = 0.0f64;
    for path in &ensemble.paths {
        let mut z = 0.0;
        for (j, &i) in idx.iter().enumerate() {
            z += fdd.theta1()[j] * path[i].re + fdd.theta2()[j] * path[i].im;
        }
        let (s, c) = z.sin_cos();
        sum_c += c;
        sum_s += s;
        sum_cc += c * c;
        sum_ss += s * s;
        sum_cs += c * s;
    }
    let nf = n as f64;
    let mc = sum_c / nf;
    let ms = sum_s / nf;
    let var_c = (sum_cc / nf - mc * mc) / nf;
    let var_s = (sum_ss / nf - ms * ms) / nf;
    let cov = (sum_cs / nf - mc * ms) / nf;
    let r2 = mc * mc + ms * ms;
    if r2 <= 0.0 {
        return Err(Error::Domain("empirical characteristic function vanished".into()));
    }
    let std_error = ((mc * mc * var_c + 2.0 * mc * ms * cov + ms * ms * var_s).max(0.0)).sqrt() / r2;
    Ok(EmpiricalChf { estimate: 0.5 * r2.ln(), std_error, imag_part: ms.atan2(mc) })
}

/// Stable variate generation.
pub mod stable {
    use super::*;

    /// Positive strictly stable variate with Laplace transform
    /// `E e^{-λX} = exp(-λ^α)`, 0 < α < 1 (Kanter's representation).
    pub fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
        assert!(0.0 < alpha && alpha < 1.0, "positive stable needs alpha in (0,1)");
        let u: f64 = rng.random_range(1e-12..PI - 1e-12);
        let w: f64 = rng.sample(Exp1);
        let a = (alpha * u).sin().powf(alpha / (1.0 - alpha)) * ((1.0 - alpha) * u).sin()
            / u.sin().powf(1.0 / (1.0 - alpha));
        (a / w).powf((1.0 - alpha) / alpha)
    }

    /// Isotropic complex α-stable variate with log-characteristic function
    /// `-scale_exponent·‖z‖^α`, via the sub-Gaussian representation
    /// `√A·(G₁, G₂)`.
    pub fn isotropic_stable_pair<R: Rng + ?Sized>(
        alpha: f64,
        scale_exponent: f64,
        rng: &mut R,
    ) -> Complex64 {
        let sigma = (2.0 * scale_exponent.powf(2.0 / alpha)).sqrt();
        let a = positive_stable(alpha / 2.0, rng);
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        Complex64::new(g1, g2) * (a.sqrt() * sigma)
    }
}

/// Two-sample Kolmogorov–Smirnov test.
pub mod ks {
    /// Statistic and asymptotic p-value of the two-sample KS test.
    #[derive(Debug, Clone, Copy)]
    pub struct KsTest {
        pub statistic: f64,
        pub p_value: f64,
    }

    pub fn two_sample(a: &[f64], b: &[f64]) -> KsTest {
        let mut xs = a.to_vec();
        let mut ys = b.to_vec();
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let (n, m) = (xs.len(), ys.len());
        let mut i = 0;
        let mut j = 0;
        let mut d: f64 = 0.0;
        while i < n && j < m {
            let v = xs[i].min(ys[j]);
            while i < n && xs[i] <= v {
                i += 1;
            }
            while j < m && ys[j] <= v {
                j += 1;
            }
            d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
        }
        let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
        let lambda = d * ne.sqrt();
        // Kolmogorov survival function
        let mut p = 0.0;
        for k in 1..=100 {
            let term = 2.0 * (-1.0f64).powi(k + 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
            p += term;
            if term.abs() < 1e-12 {
                break;
            }
        }
        KsTest { statistic: d, p_value: p.clamp(0.0, 1.0) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chf_engine::{log_chf_fdd, QuadSpec};
    use crate::stable_limit::log_chf_limit;

    #[test]
    fn identical_seeds_reproduce_bit_identical_ensembles() {
        let model = LevyModel::smoothed_pareto(1.5, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.5, 0.8, 1.0, 0.0).unwrap();
        let grid = [0.0, 1.0, 2.0];
        let a = sample_hflm(&model, &params, &grid, 20.0, 32, 99).unwrap();
        let b = sample_hflm(&model, &params, &grid, 20.0, 32, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_hflm(&model, &params, &grid, 20.0, 32, 100).unwrap();
        assert_ne!(a, c);

        let fa = sample_fbm(0.7, &grid, 16, 4).unwrap();
        let fb = sample_fbm(0.7, &grid, 16, 4).unwrap();
        assert_eq!(fa, fb);
    }

    #[test]
    fn paths_vanish_at_time_zero() {
        let model = LevyModel::smoothed_pareto(1.5, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.5, 0.8, 1.0, 0.0).unwrap();
        let ens = sample_hflm(&model, &params, &[0.0, 1.0], 10.0, 8, 7).unwrap();
        for p in &ens.paths {
            assert_eq!(p[0], Complex64::new(0.0, 0.0));
        }
        let fbm = sample_fbm(0.4, &[0.0, 0.5], 8, 7).unwrap();
        for p in &fbm.paths {
            assert_eq!(p[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn jump_counts_match_the_intensity() {
        // smoothed-pareto α=1.2: mass 2πc0/(α(1+α)) ≈ 2.3800, Poisson mean 2S·m
        let model = LevyModel::smoothed_pareto(1.2, 1.0, 1.0).unwrap();
        let s_cap = 10.0;
        let expect = 2.0 * s_cap * 2.3800;
        let poisson = Poisson::new(2.0 * s_cap * model.total_mass().unwrap()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let n = 4000;
        let mean: f64 = (0..n).map(|_| poisson.sample(&mut rng)).sum::<f64>() / n as f64;
        let sigma = (expect / n as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * sigma, "mean {mean} expect {expect}");
    }

    #[test]
    fn positive_stable_laplace_transform() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let alpha = 0.6;
        let n = 200_000;
        for lambda in [0.5f64, 2.0] {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..n {
                let x = stable::positive_stable(alpha, &mut rng);
                let e = (-lambda * x).exp();
                sum += e;
                sumsq += e * e;
            }
            let mean = sum / n as f64;
            let sd = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
            let expect = (-lambda.powf(alpha)).exp();
            assert!(
                (mean - expect).abs() < 5.0 * sd + 1e-4,
                "lambda={lambda}: {mean} vs {expect}"
            );
        }
    }

    #[test]
    fn isotropic_pair_has_the_stable_exponent() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let alpha = 1.5;
        let scale = 0.7;
        let n = 200_000;
        for z in [[0.8, 0.0], [0.5, -0.9]] {
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..n {
                let m = stable::isotropic_stable_pair(alpha, scale, &mut rng);
                let phase = z[0] * m.re + z[1] * m.im;
                sum += Complex64::from_polar(1.0, phase);
            }
            let mean = sum / n as f64;
            let got = mean.norm().ln();
            let znorm = z[0].hypot(z[1]);
            let expect = -scale * znorm.powf(alpha);
            let sd = (1.0 / n as f64).sqrt() / mean.norm();
            assert!((got - expect).abs() < 5.0 * sd + 2e-3, "z={z:?}: {got} vs {expect}");
        }
    }

    #[test]
    fn fbm_gram_matrix_values() {
        // H=1/2: independent increments, Cov(X_1, X_2) = 1
        assert!((fbm_covariance(0.5, 1.0, 2.0) - 1.0).abs() < 1e-15);
        // general H: Cov(X_1, X_2) = 2^{2H-1}
        for h in [0.3, 0.7] {
            let want = 2f64.powf(2.0 * h - 1.0);
            assert!((fbm_covariance(h, 1.0, 2.0) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn fbm_sample_covariance_matches_gram() {
        let hurst = 0.7;
        let grid = [1.0, 2.0];
        let n = 40_000;
        let ens = sample_fbm(hurst, &grid, n, 11).unwrap();
        let mut c = [[0.0f64; 2]; 2];
        for p in &ens.paths {
            for i in 0..2 {
                for j in 0..2 {
                    c[i][j] += p[i].re * p[j].re;
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let got = c[i][j] / n as f64;
                let want = fbm_covariance(hurst, grid[i], grid[j]);
                // var of the product estimate ≈ (C_ii C_jj + C_ij²)/n
                let sd = ((fbm_covariance(hurst, grid[i], grid[i])
                    * fbm_covariance(hurst, grid[j], grid[j])
                    + want * want)
                    / n as f64)
                    .sqrt();
                assert!((got - want).abs() < 4.0 * sd, "C[{i}][{j}]: {got} vs {want}");
            }
        }
    }

    #[test]
    fn empirical_chf_of_zero_paths_is_zero() {
        let ens = PathEnsemble {
            time_grid: vec![1.0],
            paths: vec![vec![Complex64::new(0.0, 0.0)]; 1500],
            meta: EnsembleMeta { process: "test".into(), seed: 0, n_paths: 1500, settings: vec![] },
        };
        let e = empirical_log_chf(&ens, &FddSpec::single(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(e.estimate, 0.0);
        assert_eq!(e.imag_part, 0.0);
        assert!(
            empirical_log_chf(&ens, &FddSpec::single(2.0, 1.0, 0.0)).is_err(),
            "time off the grid must be rejected"
        );
    }

    #[test]
    fn empirical_chf_error_shrinks_with_path_count() {
        let model = LevyModel::smoothed_pareto(1.5, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.5, 0.8, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let a = sample_hflm(&model, &params, &[1.0], 50.0, 2000, 5).unwrap();
        let b = sample_hflm(&model, &params, &[1.0], 50.0, 8000, 5).unwrap();
        let ea = empirical_log_chf(&a, &fdd).unwrap();
        let eb = empirical_log_chf(&b, &fdd).unwrap();
        let ratio = eb.std_error / ea.std_error;
        assert!((0.35..0.72).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn hflm_empirical_chf_matches_quadrature() {
        let model = LevyModel::smoothed_pareto(1.5, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.5, 0.8, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let s_cap = 400.0;
        assert!(hflm_truncation_bound(&model, &params, &fdd, s_cap).unwrap() < 5e-2);
        let ens = sample_hflm(&model, &params, &[1.0], s_cap, 20_000, 21).unwrap();
        let emp = empirical_log_chf(&ens, &fdd).unwrap();
        let quadrature = log_chf_fdd(&model, &params, &fdd, 1.0, &QuadSpec::default()).unwrap();
        assert!(
            (emp.estimate - quadrature).abs() < 3.0 * emp.std_error + 5e-3,
            "{} vs {quadrature} (3σ = {})",
            emp.estimate,
            3.0 * emp.std_error
        );
        assert!(emp.imag_part.abs() < 4.0 * emp.std_error + 1e-3);
    }

    #[test]
    fn hfsm_empirical_chf_matches_the_limit() {
        let params = ProcessParams::new(1.5, 0.7, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.0);
        let grid = SpectralGrid { s_max: 600.0, ..Default::default() };
        let ens = sample_hfsm(&params, &[1.0], &grid, 20_000, 31).unwrap();
        let emp = empirical_log_chf(&ens, &fdd).unwrap();
        let limit = log_chf_limit(&params, &fdd, 1.0, &QuadSpec::default()).unwrap();
        assert!(
            (emp.estimate - limit).abs() < 3.0 * emp.std_error + 2e-2 * limit.abs(),
            "{} vs {limit} (3σ = {})",
            emp.estimate,
            3.0 * emp.std_error
        );
    }

    #[test]
    fn rotation_leaves_empirical_chf_invariant() {
        let model = LevyModel::smoothed_pareto(1.5, 1.0, 1.0).unwrap();
        let params = ProcessParams::new(1.5, 0.8, 1.0, 0.0).unwrap();
        let fdd = FddSpec::single(1.0, 1.0, 0.3);
        let ens = sample_hflm(&model, &params, &[1.0], 100.0, 10_000, 13).unwrap();
        let base = empirical_log_chf(&ens, &fdd).unwrap();
        let rot = empirical_log_chf(&ens.rotated(1.1), &fdd).unwrap();
        assert!(
            (base.estimate - rot.estimate).abs()
                < 3.0 * (base.std_error + rot.std_error) + 1e-3
        );
    }

    #[test]
    fn ks_test_sanity() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let a: Vec<f64> = (0..4000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let b: Vec<f64> = (0..4000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let same = ks::two_sample(&a, &b);
        assert!(same.p_value > 0.01, "same-law p = {}", same.p_value);
        let shifted: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let diff = ks::two_sample(&a, &shifted);
        assert!(diff.p_value < 1e-6, "shifted p = {}", diff.p_value);
    }

    #[test]
    fn csv_round_trip_format() {
        let ens = PathEnsemble {
            time_grid: vec![0.0, 1.0],
            paths: vec![vec![Complex64::new(0.0, 0.0), Complex64::new(1.5, -2.25)]],
            meta: EnsembleMeta { process: "test".into(), seed: 7, n_paths: 1, settings: vec![] },
        };
        let mut buf = Vec::new();
        ens.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("path,time,re,im\r\n"));
        assert!(text.contains("0,1,1.5,-2.25\r\n"));
        let mut meta = Vec::new();
        ens.write_metadata(&mut meta, "deadbeef").unwrap();
        let meta = String::from_utf8(meta).unwrap();
        assert!(meta.contains("seed = 7"));
        assert!(meta.contains("config_hash = \"deadbeef\""));
    }
}
