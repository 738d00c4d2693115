//! Gaussian-process posterior machinery.
//!
//! The label vector for `n` points is modeled as `y* ~ N(0, K)` with `K`
//! built from a Gaussian kernel over the point geometry, and `m` noisy
//! observations `y_i ~ N(y*, sigma^2 I)` are summarized by their average.
//! The posterior is Gaussian with
//!
//! ```text
//! mean = K (K + sigma^2/m I)^-1 (1/m sum y_i)
//! cov  = K (K + sigma^2/m I)^-1 (sigma^2/m) I
//! ```
//!
//! evaluated via a Cholesky solve (never an explicit inverse). The
//! contraction `K (K + sigma^2/m I)^-1` has spectrum in `[0, 1)`, so the
//! posterior covariance norm is bounded by `sigma^2/m` and the posterior
//! collapses onto the observation average as `m` grows, whatever the prior.

pub mod experiment;

pub use experiment::{convergence_experiment, ConvergenceRow, GpExperimentConfig};

use nalgebra::{Cholesky, DMatrix, DVector};
use num_traits::Float;

use crate::detrng::KeyedRng;
use crate::error::{Error, Result};
use crate::scalar::Real;

const STREAM_PRIOR_SAMPLE: u64 = 0x30;

/// Posterior mean and covariance over the `n` latent labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior<T> {
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
}

/// Gaussian kernel matrix: `K_ij = exp(-|x_i - x_j|^2 / (2 sigma^2))` for
/// row-point matrix `points` (n x d). Symmetric with unit diagonal.
pub fn gaussian_kernel<T: Real>(points: &DMatrix<T>, sigma_kernel: T) -> Result<DMatrix<T>> {
    if Float::is_nan(sigma_kernel) || sigma_kernel <= T::zero() {
        return Err(Error::invalid("kernel bandwidth must be positive"));
    }
    let n = points.nrows();
    let denom = T::from_f64(2.0).unwrap() * sigma_kernel * sigma_kernel;
    let mut kernel = DMatrix::from_element(n, n, T::one());
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sq = T::zero();
            for c in 0..points.ncols() {
                let diff = points[(i, c)] - points[(j, c)];
                sq += diff * diff;
            }
            let v = Float::exp(-sq / denom);
            kernel[(i, j)] = v;
            kernel[(j, i)] = v;
        }
    }
    Ok(kernel)
}

/// Default jitter for factorizing a possibly singular kernel:
/// `1e-10 * trace(K) / n`.
pub fn default_jitter<T: Real>(kernel: &DMatrix<T>) -> T {
    let n = T::from_usize(kernel.nrows()).unwrap();
    T::from_f64(1e-10).unwrap() * kernel.trace() / n
}

/// One draw `y* ~ N(0, K)` via the Cholesky factor of `K + jitter I`.
/// Deterministic in the seed.
pub fn sample_prior<T: Real>(kernel: &DMatrix<T>, jitter: T, seed: u64) -> Result<DVector<T>> {
    let n = kernel.nrows();
    let mut regularized = kernel.clone();
    for i in 0..n {
        regularized[(i, i)] += jitter;
    }
    let chol = Cholesky::new(regularized).ok_or_else(|| {
        Error::Numeric("prior covariance is not positive definite after jitter".into())
    })?;
    let mut rng = KeyedRng::new(seed, STREAM_PRIOR_SAMPLE);
    let z = DVector::from_fn(n, |_, _| T::from_f64(rng.next_gaussian()).unwrap());
    Ok(chol.l() * z)
}

/// Closed-form posterior from the observation average `(1/m) sum y_i`.
pub fn posterior<T: Real>(
    kernel: &DMatrix<T>,
    obs_mean: &DVector<T>,
    m: usize,
    sigma_obs: T,
) -> Result<GpPosterior<T>> {
    let n = kernel.nrows();
    if kernel.ncols() != n {
        return Err(Error::invalid("kernel matrix must be square"));
    }
    if obs_mean.len() != n {
        return Err(Error::invalid("observation mean length must match kernel"));
    }
    if m == 0 {
        return Err(Error::invalid("observation count must be at least 1"));
    }
    if Float::is_nan(sigma_obs) || sigma_obs <= T::zero() {
        return Err(Error::invalid("observation noise must be positive"));
    }
    let noise = sigma_obs * sigma_obs / T::from_usize(m).unwrap();

    // A = K + sigma^2/m I, factored once for both solves.
    let mut regularized = kernel.clone();
    for i in 0..n {
        regularized[(i, i)] += noise;
    }
    let chol = Cholesky::new(regularized)
        .ok_or_else(|| Error::Numeric("K + sigma^2/m I is not positive definite".into()))?;

    let mean = kernel * chol.solve(obs_mean);

    // cov = K A^-1 (sigma^2/m) = (A^-1 K)^T * sigma^2/m; K and A commute,
    // so the result is symmetric up to rounding and gets symmetrized.
    let mut cov = chol.solve(kernel).transpose() * noise;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (cov[(i, j)] + cov[(j, i)]) / T::from_f64(2.0).unwrap();
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(GpPosterior { mean, cov })
}

/// Spectral norm of a symmetric matrix via its eigendecomposition. Falls
/// back to the max-absolute entry (flagged `true`) if the eigensolver does
/// not converge.
pub fn symmetric_spectral_norm<T: Real>(matrix: &DMatrix<T>) -> (T, bool) {
    match matrix.clone().try_symmetric_eigen(T::default_epsilon(), 200) {
        Some(eigen) => {
            let norm = eigen
                .eigenvalues
                .iter()
                .fold(T::zero(), |acc, &v| Float::max(acc, Float::abs(v)));
            (norm, false)
        }
        None => (matrix.amax(), true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_points(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = KeyedRng::new(seed, 0x99);
        DMatrix::from_fn(n, d, |_, _| rng.next_gaussian())
    }

    #[test]
    fn kernel_diagonal_is_one_and_known_distance_maps_to_e_inverse() {
        // two points at squared distance 2 sigma^2 -> K_01 = exp(-1)
        let sigma = 1.5f64;
        let gap = (2.0 * sigma * sigma).sqrt();
        let points = DMatrix::from_row_slice(2, 1, &[0.0, gap]);
        let k = gaussian_kernel(&points, sigma).unwrap();
        assert_eq!(k[(0, 0)], 1.0);
        assert_eq!(k[(1, 1)], 1.0);
        assert!((k[(0, 1)] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn kernel_matches_naive_double_loop_oracle() {
        let points = random_points(5, 3, 1);
        let sigma = 0.8;
        let k = gaussian_kernel(&points, sigma).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let mut sq = 0.0;
                for c in 0..3 {
                    sq += (points[(i, c)] - points[(j, c)]).powi(2);
                }
                let want = (-sq / (2.0 * sigma * sigma)).exp();
                assert!((k[(i, j)] - want).abs() < 1e-14);
                assert_eq!(k[(i, j)], k[(j, i)]);
            }
        }
    }

    #[test]
    fn prior_samples_from_identity_have_unit_variance() {
        let k = DMatrix::<f64>::identity(50, 50);
        let mut sum_sq = 0.0;
        let draws = 400;
        for trial in 0..draws {
            let y = sample_prior(&k, 0.0, trial).unwrap();
            sum_sq += y.norm_squared();
        }
        let var = sum_sq / (draws as f64 * 50.0);
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn degenerate_prior_stays_near_zero() {
        let n = 20;
        let k = DMatrix::<f64>::zeros(n, n);
        let jitter = 1e-8;
        let y = sample_prior(&k, jitter, 3).unwrap();
        assert!(y.norm() <= 10.0 * (jitter * n as f64).sqrt());
    }

    #[test]
    fn prior_sampling_is_deterministic() {
        let k = gaussian_kernel(&random_points(8, 2, 5), 1.0).unwrap();
        let a = sample_prior(&k, default_jitter(&k), 42).unwrap();
        let b = sample_prior(&k, default_jitter(&k), 42).unwrap();
        assert_eq!(a, b);
        let c = sample_prior(&k, default_jitter(&k), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn scalar_posterior_m1_is_half() {
        let k = DMatrix::from_element(1, 1, 1.0);
        let obs = DVector::from_element(1, 2.0);
        let post = posterior(&k, &obs, 1, 1.0).unwrap();
        assert!((post.mean[0] - 1.0).abs() < 1e-12);
        assert!((post.cov[(0, 0)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scalar_posterior_m3_contracts_further() {
        let k = DMatrix::from_element(1, 1, 1.0);
        let obs = DVector::from_element(1, 2.0);
        let post = posterior(&k, &obs, 3, 1.0).unwrap();
        assert!((post.mean[0] - 1.5).abs() < 1e-12);
        assert!((post.cov[(0, 0)] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn posterior_matches_explicit_inverse_oracle() {
        for seed in 0..10 {
            let n = 6;
            let k = gaussian_kernel(&random_points(n, 3, seed), 1.2).unwrap();
            let mut rng = KeyedRng::new(seed, 0x77);
            let obs = DVector::from_fn(n, |_, _| rng.next_gaussian());
            let m = 1 + (seed as usize % 5);
            let sigma = 0.7;
            let post = posterior(&k, &obs, m, sigma).unwrap();

            let noise = sigma * sigma / m as f64;
            let a_inv = (k.clone() + DMatrix::identity(n, n) * noise)
                .try_inverse()
                .unwrap();
            let mean_oracle = &k * &a_inv * &obs;
            let cov_oracle = &k * &a_inv * noise;
            assert!((&post.mean - &mean_oracle).norm() <= 1e-10 * mean_oracle.norm());
            assert!((&post.cov - &cov_oracle).norm() <= 1e-10 * cov_oracle.norm());
        }
    }

    #[test]
    fn posterior_mean_is_linear_in_observations() {
        let n = 8;
        let k = gaussian_kernel(&random_points(n, 2, 2), 1.0).unwrap();
        let mut rng = KeyedRng::new(9, 0x78);
        let obs = DVector::from_fn(n, |_, _| rng.next_gaussian());
        let post = posterior(&k, &obs, 4, 0.5).unwrap();
        let scaled = posterior(&k, &(&obs * 3.0), 4, 0.5).unwrap();
        assert!((&scaled.mean - &post.mean * 3.0).norm() < 1e-12 * post.mean.norm());
    }

    #[test]
    fn covariance_norm_is_bounded_by_noise_over_m() {
        for seed in 0..5 {
            let k = gaussian_kernel(&random_points(12, 3, seed), 0.9).unwrap();
            let obs = DVector::zeros(12);
            for m in [1usize, 10, 100] {
                let sigma = 0.5;
                let post = posterior(&k, &obs, m, sigma).unwrap();
                let (norm, fallback) = symmetric_spectral_norm(&post.cov);
                assert!(!fallback);
                assert!(norm <= sigma * sigma / m as f64 + 1e-9);
                let min_eig = post
                    .cov
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                assert!(min_eig >= -1e-9);
            }
        }
    }

    #[test]
    fn noiseless_limit_recovers_observations() {
        let n = 10;
        let k = gaussian_kernel(&random_points(n, 2, 8), 1.1).unwrap();
        let y_star = sample_prior(&k, default_jitter(&k), 1).unwrap();
        // sigma -> 0 at m = 1: the posterior mean collapses onto the data
        let post = posterior(&k, &y_star, 1, 1e-7).unwrap();
        assert!((&post.mean - &y_star).norm() <= 1e-5 * y_star.norm());
    }

    #[test]
    fn single_precision_instantiation_matches_scalar_fixture() {
        let k = DMatrix::<f32>::from_element(1, 1, 1.0);
        let obs = DVector::<f32>::from_element(1, 2.0);
        let post = posterior(&k, &obs, 1, 1.0f32).unwrap();
        assert!((post.mean[0] - 1.0).abs() < 1e-6);
        assert!((post.cov[(0, 0)] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn preconditions_are_enforced() {
        let k = DMatrix::<f64>::identity(2, 2);
        let obs = DVector::zeros(2);
        assert!(posterior(&k, &obs, 0, 1.0).is_err());
        assert!(posterior(&k, &obs, 1, 0.0).is_err());
        assert!(posterior(&k, &DVector::zeros(3), 1, 1.0).is_err());
        assert!(gaussian_kernel(&DMatrix::<f64>::zeros(2, 2), 0.0).is_err());
    }
}
