//! Counter-based deterministic random number generation.
//!
//! Every random value in this crate is a pure function of a 64-bit seed plus
//! a handful of counters, so any value can be regenerated in isolation, in any
//! order, on any platform. The pipeline is:
//!
//! 1. `keyed_u64(seed, stream, hi, lo)` chains the SplitMix64 finalizer over
//!    the four words (hash chaining), producing a well-mixed 64-bit word.
//! 2. Uniforms come from the top 53 bits of that word.
//! 3. Gaussians use the Box-Muller transform `sqrt(-2 ln u1) * cos(2 pi u2)`
//!    (cosine branch only, two uniforms per value).
//!
//! `ln` and `cos` are evaluated by the fixed-coefficient routines below using
//! only IEEE-754 add/sub/mul/div/sqrt, all of which are correctly rounded on
//! every conforming platform. libm is never called, so outputs are
//! bit-identical across architectures and toolchains.

/// Streams used by circulant block generation.
pub const STREAM_GAUSS_RADIUS: u64 = 0x01;
/// Second Box-Muller uniform for circulant blocks.
pub const STREAM_GAUSS_ANGLE: u64 = 0x02;
/// Rademacher sign stream for circulant blocks.
pub const STREAM_SIGN: u64 = 0x03;
/// Stream reserved for deriving sub-seeds (experiments, subsampling).
pub const STREAM_DERIVE: u64 = 0x10;

const SEED_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: a bijective 64-bit mixer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixed 64-bit word keyed by `(seed, stream, hi, lo)`.
///
/// The four inputs are absorbed sequentially, each followed by a full mix, so
/// permuting them yields unrelated outputs.
#[inline]
pub fn keyed_u64(seed: u64, stream: u64, hi: u64, lo: u64) -> u64 {
    let mut h = mix64(seed ^ SEED_GAMMA);
    h = mix64(h ^ stream);
    h = mix64(h ^ hi);
    mix64(h ^ lo)
}

/// Derive an independent sub-seed, e.g. one per experiment trial.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    keyed_u64(seed, STREAM_DERIVE, a, b)
}

/// Map a word to the half-open interval `[0, 1)` with 53-bit resolution.
#[inline]
pub fn unit_half_open(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Map a word to the open-closed interval `(0, 1]` (safe under `ln`).
#[inline]
pub fn unit_open_closed(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Natural logarithm with platform-independent results.
///
/// Decomposes `x = m * 2^e` with `m` in `[sqrt(1/2), sqrt(2))` and sums the
/// atanh series for `ln m` in a fixed order; `|t| <= 0.1716` so eleven odd
/// terms leave a truncation error below 1e-17 relative. Domain: normal
/// positive finite `x` (every uniform above qualifies).
pub fn det_ln(x: f64) -> f64 {
    debug_assert!(x >= f64::MIN_POSITIVE && x.is_finite());
    let bits = x.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        e += 1;
    }
    let t = (m - 1.0) / (m + 1.0);
    let t2 = t * t;
    // ln m = 2 atanh(t) = 2t (1 + t^2/3 + t^4/5 + ...)
    let mut series = 0.0;
    let mut k = 21;
    while k >= 3 {
        series = t2 * (1.0 / k as f64 + series);
        k -= 2;
    }
    2.0 * t * (1.0 + series) + e as f64 * std::f64::consts::LN_2
}

/// `sin(theta)` and `cos(theta)` for `theta` in `[0, pi/2)`, fixed-order
/// Taylor sums (12 terms; truncation below 1e-19 at pi/2).
fn det_sin_cos_quarter(theta: f64) -> (f64, f64) {
    let t2 = theta * theta;
    let mut cos = 1.0;
    let mut term = 1.0;
    for n in 1..=12u32 {
        term *= -t2 / ((2 * n - 1) as f64 * (2 * n) as f64);
        cos += term;
    }
    let mut sin = 1.0;
    term = 1.0;
    for n in 1..=12u32 {
        term *= -t2 / ((2 * n) as f64 * (2 * n + 1) as f64);
        sin += term;
    }
    (theta * sin, cos)
}

/// `cos(2 pi u)` for `u` in `[0, 1)`, platform-independent.
///
/// The quadrant split is exact: `u - q/4` is representable whenever `u` holds
/// at most 53 mantissa bits, which our uniforms guarantee.
pub fn det_cos_2pi(u: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    let q = (4.0 * u) as u32; // 0..=3
    let f = u - 0.25 * q as f64;
    let (sin, cos) = det_sin_cos_quarter(2.0 * std::f64::consts::PI * f);
    match q {
        0 => cos,
        1 => -sin,
        2 => -cos,
        _ => sin,
    }
}

/// Standard Gaussian via Box-Muller from two uniforms.
#[inline]
pub fn gaussian_from_uniforms(u_radius: f64, u_angle: f64) -> f64 {
    (-2.0 * det_ln(u_radius)).sqrt() * det_cos_2pi(u_angle)
}

/// Standard Gaussian keyed by `(seed, hi, lo)`; random access, no state.
#[inline]
pub fn keyed_gaussian(seed: u64, hi: u64, lo: u64) -> f64 {
    let u1 = unit_open_closed(keyed_u64(seed, STREAM_GAUSS_RADIUS, hi, lo));
    let u2 = unit_half_open(keyed_u64(seed, STREAM_GAUSS_ANGLE, hi, lo));
    gaussian_from_uniforms(u1, u2)
}

/// Rademacher sign (+1 or -1) keyed by `(seed, hi, lo)`.
#[inline]
pub fn keyed_sign(seed: u64, hi: u64, lo: u64) -> i8 {
    if keyed_u64(seed, STREAM_SIGN, hi, lo) >> 63 == 0 {
        1
    } else {
        -1
    }
}

/// Sequential generator over the keyed primitive: a seed, a stream id, and a
/// running counter. Cheap to construct; state is just the counter.
#[derive(Debug, Clone)]
pub struct KeyedRng {
    seed: u64,
    stream: u64,
    counter: u64,
}

impl KeyedRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            seed,
            stream,
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = keyed_u64(self.seed, self.stream, 0, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_half_open(self.next_u64())
    }

    /// Standard Gaussian (consumes two words).
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = unit_open_closed(self.next_u64());
        let u2 = unit_half_open(self.next_u64());
        gaussian_from_uniforms(u1, u2)
    }

    /// Uniform index in `0..n`, unbiased via rejection sampling.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index requires a non-empty range");
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_words_are_reproducible_and_distinct() {
        assert_eq!(keyed_u64(42, 1, 2, 3), keyed_u64(42, 1, 2, 3));
        assert_ne!(keyed_u64(42, 1, 2, 3), keyed_u64(43, 1, 2, 3));
        assert_ne!(keyed_u64(42, 1, 2, 3), keyed_u64(42, 1, 3, 2));
        assert_ne!(keyed_u64(42, 1, 2, 3), keyed_u64(42, 2, 2, 3));
    }

    #[test]
    fn det_ln_matches_std_ln() {
        let mut rng = KeyedRng::new(7, 99);
        for _ in 0..20_000 {
            let x = unit_open_closed(rng.next_u64());
            let got = det_ln(x);
            let want = x.ln();
            let tol = 1e-14 * want.abs().max(1.0);
            assert!(
                (got - want).abs() <= tol,
                "det_ln({x}) = {got}, std = {want}"
            );
        }
        assert_eq!(det_ln(1.0), 0.0);
    }

    #[test]
    fn det_cos_matches_std_cos() {
        let mut rng = KeyedRng::new(8, 99);
        for _ in 0..20_000 {
            let u = rng.next_unit();
            let got = det_cos_2pi(u);
            let want = (2.0 * std::f64::consts::PI * u).cos();
            assert!(
                (got - want).abs() <= 1e-13,
                "det_cos_2pi({u}) = {got}, std = {want}"
            );
        }
        assert_eq!(det_cos_2pi(0.0), 1.0);
    }

    #[test]
    fn gaussian_moments_are_standard() {
        let n = 100_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let z = keyed_gaussian(42, 0, i as u64);
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn gaussian_quantiles_match_the_normal_law() {
        let n = 100_000usize;
        let mut within_1 = 0usize;
        let mut within_2 = 0usize;
        for i in 0..n {
            let z = keyed_gaussian(7, 1, i as u64).abs();
            within_1 += usize::from(z < 1.0);
            within_2 += usize::from(z < 2.0);
        }
        let p1 = within_1 as f64 / n as f64;
        let p2 = within_2 as f64 / n as f64;
        assert!((p1 - 0.6827).abs() < 0.005, "P(|z|<1) = {p1}");
        assert!((p2 - 0.9545).abs() < 0.005, "P(|z|<2) = {p2}");
    }

    #[test]
    fn sign_mean_is_balanced() {
        let n = 100_000usize;
        let sum: i64 = (0..n).map(|i| keyed_sign(42, 0, i as u64) as i64).sum();
        let mean = sum as f64 / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn next_index_is_unbiased_over_small_range() {
        let mut rng = KeyedRng::new(3, 5);
        let mut counts = [0usize; 5];
        for _ in 0..50_000 {
            counts[rng.next_index(5)] += 1;
        }
        for &c in &counts {
            assert!((c as f64 / 10_000.0 - 1.0).abs() < 0.05, "{counts:?}");
        }
    }
}
