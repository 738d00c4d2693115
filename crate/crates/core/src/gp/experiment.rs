//! Convergence experiment: how fast the posterior under an uninformative
//! (random-geometry) prior approaches both the truth and the posterior under
//! the informative prior, as the observation count grows.
//!
//! Per trial: informative points are drawn from a Gaussian mixture (4
//! clusters, centers `N(0, 3^2 I)`, within-cluster spread `N(0, 0.5^2 I)`,
//! round-robin assignment) so their kernel has block structure; random
//! points are i.i.d. standard Gaussian in the same dimension. One latent
//! `y* ~ N(0, K)` is drawn, `m` noisy observations are averaged, and both
//! posteriors are computed from that same average. Errors are relative
//! Euclidean norms against `|y*|`; the covariance norm is spectral.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use crate::detrng::{derive_seed, KeyedRng};
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{default_jitter, gaussian_kernel, posterior, sample_prior, symmetric_spectral_norm};

const STREAM_POINTS: u64 = 0x40;
const STREAM_OBSERVATIONS: u64 = 0x41;
const SEED_PRIOR_DRAW: u64 = 0x42;

const MIXTURE_CLUSTERS: usize = 4;
const CLUSTER_CENTER_SPREAD: f64 = 3.0;
const CLUSTER_WITHIN_SPREAD: f64 = 0.5;

/// Parameters of one convergence run.
#[derive(Debug, Clone, PartialEq)]
pub struct GpExperimentConfig {
    /// Number of points `n`.
    pub n_words: usize,
    /// Embedding dimension `d`.
    pub dim: usize,
    /// Observation noise `sigma`.
    pub sigma_obs: f64,
    /// Kernel bandwidth.
    pub sigma_kernel: f64,
    /// Observation counts, strictly increasing.
    pub m_grid: Vec<usize>,
    /// Trials averaged per grid point.
    pub trials: usize,
    pub seed: u64,
}

impl Default for GpExperimentConfig {
    fn default() -> Self {
        Self {
            n_words: 30,
            dim: 5,
            sigma_obs: 0.5,
            sigma_kernel: 2.0,
            m_grid: vec![1, 10, 100, 1000, 10000],
            trials: 20,
            seed: 42,
        }
    }
}

impl GpExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_words == 0 || self.dim == 0 || self.trials == 0 {
            return Err(Error::invalid("n, d and trials must be positive"));
        }
        if !(self.sigma_obs.is_finite() && self.sigma_obs > 0.0)
            || !(self.sigma_kernel.is_finite() && self.sigma_kernel > 0.0)
        {
            return Err(Error::invalid("sigma values must be positive"));
        }
        if self.m_grid.is_empty() {
            return Err(Error::invalid("m grid must be non-empty"));
        }
        if self.m_grid[0] == 0 || self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("m grid must be strictly increasing"));
        }
        Ok(())
    }

    /// Apply `key=value` lines (`#` comments and blank lines skipped) on top
    /// of the current values. Keys: `n`, `d`, `sigma_obs`, `sigma_kernel`,
    /// `m_grid` (comma-separated), `trials`, `seed`.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::parse(lineno, format!("bad {what} value {value:?}"));
            match key {
                "n" => self.n_words = value.parse().map_err(|_| bad("n"))?,
                "d" => self.dim = value.parse().map_err(|_| bad("d"))?,
                "sigma_obs" => self.sigma_obs = value.parse().map_err(|_| bad("sigma_obs"))?,
                "sigma_kernel" => {
                    self.sigma_kernel = value.parse().map_err(|_| bad("sigma_kernel"))?
                }
                "trials" => self.trials = value.parse().map_err(|_| bad("trials"))?,
                "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
                "m_grid" => self.m_grid = parse_m_grid(value).map_err(|_| bad("m_grid"))?,
                other => {
                    return Err(Error::parse(lineno, format!("unknown key {other:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Parse a comma-separated list of observation counts.
pub fn parse_m_grid(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|p| {
            usize::from_str(p.trim())
                .map_err(|_| Error::invalid(format!("bad m grid entry {p:?}")))
        })
        .collect()
}

/// Trial-averaged results at one observation count.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    pub m: usize,
    /// `|posterior_mean_K - y*| / |y*|` under the informative prior.
    pub mean_err_true_prior: T,
    /// Same error under the random-geometry prior.
    pub mean_err_random_prior: T,
    /// `|posterior_mean_K - posterior_mean_K'| / |y*|`.
    pub prior_disagreement: T,
    /// Spectral norm of the informative-prior posterior covariance.
    pub post_cov_norm: T,
    /// True if the eigensolver fell back to the max-abs entry.
    pub cov_norm_fallback: bool,
}

impl<T: Real> ConvergenceRow<T> {
    pub const TSV_COLUMNS: &'static str =
        "m\tmean_err_true_prior\tmean_err_random_prior\tprior_disagreement\tpost_cov_norm";

    pub fn to_tsv_row(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            self.m,
            self.mean_err_true_prior,
            self.mean_err_random_prior,
            self.prior_disagreement,
            self.post_cov_norm
        )
        .expect("writing to a String cannot fail");
        s
    }
}

/// Informative (clustered) points: cluster `i % 4`, center plus small
/// within-cluster offset.
fn clustered_points<T: Real>(n: usize, d: usize, rng: &mut KeyedRng) -> DMatrix<T> {
    let k = MIXTURE_CLUSTERS.min(n);
    let centers: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            (0..d)
                .map(|_| CLUSTER_CENTER_SPREAD * rng.next_gaussian())
                .collect()
        })
        .collect();
    let mut points = DMatrix::zeros(n, d);
    for i in 0..n {
        let center = &centers[i % k];
        for c in 0..d {
            let v = center[c] + CLUSTER_WITHIN_SPREAD * rng.next_gaussian();
            points[(i, c)] = T::from_f64(v).unwrap();
        }
    }
    points
}

fn iid_points<T: Real>(n: usize, d: usize, rng: &mut KeyedRng) -> DMatrix<T> {
    DMatrix::from_fn(n, d, |_, _| T::from_f64(rng.next_gaussian()).unwrap())
}

/// Run the convergence experiment over the whole grid.
pub fn convergence_experiment<T: Real>(config: &GpExperimentConfig) -> Result<Vec<ConvergenceRow<T>>> {
    config.validate()?;
    let n = config.n_words;
    let sigma = T::from_f64(config.sigma_obs).unwrap();
    let sigma_kernel = T::from_f64(config.sigma_kernel).unwrap();
    let trials = T::from_usize(config.trials).unwrap();

    let mut rows = Vec::with_capacity(config.m_grid.len());
    for (mi, &m) in config.m_grid.iter().enumerate() {
        let mut err_true = T::zero();
        let mut err_random = T::zero();
        let mut disagreement = T::zero();
        let mut cov_norm = T::zero();
        let mut fallback = false;
        for trial in 0..config.trials {
            let sub_seed = derive_seed(config.seed, mi as u64, trial as u64);
            let mut point_rng = KeyedRng::new(sub_seed, STREAM_POINTS);
            let informative = clustered_points::<T>(n, config.dim, &mut point_rng);
            let random = iid_points::<T>(n, config.dim, &mut point_rng);
            let kernel_true = gaussian_kernel(&informative, sigma_kernel)?;
            let kernel_random = gaussian_kernel(&random, sigma_kernel)?;

            let y_star = sample_prior(
                &kernel_true,
                default_jitter(&kernel_true),
                derive_seed(sub_seed, SEED_PRIOR_DRAW, 0),
            )?;

            let mut obs_rng = KeyedRng::new(sub_seed, STREAM_OBSERVATIONS);
            let mut obs_sum = DVector::zeros(n);
            for _ in 0..m {
                for i in 0..n {
                    obs_sum[i] += y_star[i] + sigma * T::from_f64(obs_rng.next_gaussian()).unwrap();
                }
            }
            let obs_mean = obs_sum / T::from_usize(m).unwrap();

            let post_true = posterior(&kernel_true, &obs_mean, m, sigma)?;
            let post_random = posterior(&kernel_random, &obs_mean, m, sigma)?;

            let y_norm = y_star.norm();
            err_true += (&post_true.mean - &y_star).norm() / y_norm;
            err_random += (&post_random.mean - &y_star).norm() / y_norm;
            disagreement += (&post_true.mean - &post_random.mean).norm() / y_norm;
            let (norm, fb) = symmetric_spectral_norm(&post_true.cov);
            cov_norm += norm;
            fallback |= fb;
        }
        rows.push(ConvergenceRow {
            m,
            mean_err_true_prior: err_true / trials,
            mean_err_random_prior: err_random / trials,
            prior_disagreement: disagreement / trials,
            post_cov_norm: cov_norm / trials,
            cov_norm_fallback: fallback,
        });
    }
    Ok(rows)
}
