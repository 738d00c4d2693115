//! Circulant random embedding matrices in O(n) memory.
//!
//! An `n x d` embedding matrix is split into `ceil(n/d)` disjoint `d x d`
//! blocks. Block `b` equals `circulant(c_b) * diag(r_b)` where `c_b` is a
//! standard-Gaussian vector and `r_b` a Rademacher sign vector, both
//! regenerated on demand from `(seed, b)` by the keyed generator in
//! [`crate::detrng`]. Storing the matrix therefore costs one float and one
//! sign per row instead of `d` floats; storing just the seed costs O(1).
//!
//! Indexing convention: entry `(k, j)` of a block is `c[(k - j) mod d] * r[j]`,
//! i.e. `circulant(c)` has first column `c` and each column is the previous
//! one cyclically shifted down. When `d` does not divide `n`, the trailing
//! block keeps only the first `n mod d` rows.
//!
//! Canonical entries are single precision: the keyed Gaussian is computed in
//! `f64` and rounded once to `f32`. Row extraction widens entries into the
//! caller's scalar `T`, multiplies by `scale`, then by the sign, in that
//! order, so every code path that touches an entry performs bit-identical
//! arithmetic.

pub mod format;

use num_traits::Float;

use crate::detrng::{keyed_gaussian, keyed_sign};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fixed size of the compact binary header (see [`mod@format`]):
/// magic (4) + version (4) + n (8) + d (8) + seed (8) + scale (8).
pub const HEADER_BYTES: u64 = 40;

/// Compact description of an `n x d` circulant random embedding matrix.
///
/// Two specs with equal fields imply bit-identical matrices on every
/// platform; no randomness is consumed until a block is requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirculantEmbeddingSpec {
    /// Number of rows `n` (vocabulary size).
    pub vocab_size: usize,
    /// Embedding dimension `d` (also the block size).
    pub dim: usize,
    /// Root of all randomness.
    pub seed: u64,
    /// Global multiplier applied to every entry.
    pub scale: f64,
}

/// One `d x d` block in compact form.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantBlock {
    /// Gaussian vector `c`, canonical single precision, length `d`.
    pub gaussian: Vec<f32>,
    /// Rademacher vector `r`, entries exactly -1 or +1, length `d`.
    pub signs: Vec<i8>,
}

/// Byte accounting for compact vs dense storage of one spec.
///
/// `compact_bytes` is the exact size of the compact binary format at the
/// given entry width: `ceil(n/d) * d` stored entries, one packed sign bit per
/// stored entry, plus the [`HEADER_BYTES`] header. For `d <= n` this stays
/// within `n * entry_width_bytes + n + HEADER_BYTES` (the trailing block may
/// pad up to `d - 1` extra entries, which the bound absorbs only in that
/// regime).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryFootprint {
    pub compact_bytes: u64,
    pub dense_bytes: u64,
    pub entry_width_bytes: u32,
}

/// Dense row-major matrix, used as materialization target and test oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> DenseMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols));
        Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }
}

impl CirculantEmbeddingSpec {
    /// New spec with `scale = 1.0`. Rejects zero `vocab_size` or `dim`.
    pub fn new(vocab_size: usize, dim: usize, seed: u64) -> Result<Self> {
        if vocab_size == 0 {
            return Err(Error::invalid("vocab_size must be at least 1"));
        }
        if dim == 0 {
            return Err(Error::invalid("dim must be at least 1"));
        }
        Ok(Self {
            vocab_size,
            dim,
            seed,
            scale: 1.0,
        })
    }

    /// Number of blocks, `ceil(n/d)`.
    pub fn block_count(&self) -> usize {
        self.vocab_size.div_ceil(self.dim)
    }

    /// Rows of block `b` actually used by the matrix (`d`, except for a
    /// trailing partial block).
    pub fn block_rows(&self, block_index: usize) -> usize {
        let rem = self.vocab_size % self.dim;
        if block_index + 1 == self.block_count() && rem != 0 {
            rem
        } else {
            self.dim
        }
    }

    /// Regenerate block `block_index` from the seed. Deterministic in
    /// `(seed, block_index)`; blocks can be generated in any order.
    pub fn generate_block(&self, block_index: usize) -> Result<CirculantBlock> {
        if block_index >= self.block_count() {
            return Err(Error::invalid(format!(
                "block index {block_index} out of range (blocks: {})",
                self.block_count()
            )));
        }
        let b = block_index as u64;
        let gaussian = (0..self.dim)
            .map(|i| keyed_gaussian(self.seed, b, i as u64) as f32)
            .collect();
        let signs = (0..self.dim)
            .map(|i| keyed_sign(self.seed, b, i as u64))
            .collect();
        Ok(CirculantBlock { gaussian, signs })
    }

    /// Row `i` of the implied dense matrix, in O(d) time and space.
    pub fn row<T: Real>(&self, i: usize) -> Result<Vec<T>> {
        if i >= self.vocab_size {
            return Err(Error::invalid(format!(
                "row index {i} out of range (rows: {})",
                self.vocab_size
            )));
        }
        let block = self.generate_block(i / self.dim)?;
        Ok(block_row::<T>(&block, i % self.dim, self.scale))
    }

    /// Full dense matrix; row `i` equals `row(i)` exactly.
    pub fn materialize<T: Real>(&self) -> DenseMatrix<T> {
        let d = self.dim;
        let mut data = Vec::with_capacity(self.vocab_size * d);
        for b in 0..self.block_count() {
            let block = self.generate_block(b).expect("index in range");
            for k in 0..self.block_rows(b) {
                data.extend_from_slice(&block_row::<T>(&block, k, self.scale));
            }
        }
        DenseMatrix {
            rows: self.vocab_size,
            cols: d,
            data,
        }
    }

    /// Frobenius norm computed from compact form:
    /// `scale * sqrt(sum_b rows_b * |c_b|^2)`.
    ///
    /// Every row of `circulant(c) * diag(r)` is a signed permutation of `c`,
    /// so each used row contributes `|c|^2` regardless of signs.
    pub fn frobenius_norm<T: Real>(&self) -> T {
        let mut total = T::zero();
        for b in 0..self.block_count() {
            let block = self.generate_block(b).expect("index in range");
            total += block_weighted_sumsq::<T>(&block, self.block_rows(b));
        }
        T::from_f64(self.scale).unwrap() * Float::sqrt(total)
    }

    /// Spec with `scale` adjusted so the Frobenius norm equals `target_norm`.
    pub fn normalize_to(&self, target_norm: f64) -> Result<Self> {
        let scale = rescaled(self.frobenius_norm::<f64>(), self.scale, target_norm)?;
        Ok(Self { scale, ..*self })
    }

    /// Byte accounting at the given entry width.
    pub fn memory_footprint(&self, entry_width_bytes: u32) -> Result<MemoryFootprint> {
        if entry_width_bytes == 0 {
            return Err(Error::invalid("entry width must be positive"));
        }
        let n = self.vocab_size as u64;
        let d = self.dim as u64;
        let stored_entries = self.block_count() as u64 * d;
        let sign_bytes = self.block_count() as u64 * d.div_ceil(8);
        Ok(MemoryFootprint {
            compact_bytes: stored_entries * entry_width_bytes as u64 + sign_bytes + HEADER_BYTES,
            dense_bytes: n * d * entry_width_bytes as u64,
            entry_width_bytes,
        })
    }

    /// Generate every block and keep them resident.
    pub fn to_store(&self) -> CirculantStore {
        CirculantStore::generate(*self)
    }
}

/// Row `k` of a block: `out[j] = (c[(k - j) mod d] * scale) * r[j]`.
///
/// The sign multiplication comes last; multiplying by -1/+1 is exact, so
/// `out[j] * r[j]` recovers `fl(c * scale)` bit-for-bit.
fn block_row<T: Real>(block: &CirculantBlock, k: usize, scale: f64) -> Vec<T> {
    let d = block.gaussian.len();
    let scale = T::from_f64(scale).unwrap();
    (0..d)
        .map(|j| {
            let c = T::from_entry(block.gaussian[(k + d - j) % d]);
            let sign = if block.signs[j] < 0 {
                -T::one()
            } else {
                T::one()
            };
            c * scale * sign
        })
        .collect()
}

/// `rows_used * |c|^2` accumulated in `T`.
fn block_weighted_sumsq<T: Real>(block: &CirculantBlock, rows_used: usize) -> T {
    let sumsq: T = block
        .gaussian
        .iter()
        .map(|&c| {
            let v = T::from_entry(c);
            v * v
        })
        .sum();
    T::from_usize(rows_used).unwrap() * sumsq
}

fn rescaled(current_norm: f64, scale: f64, target_norm: f64) -> Result<f64> {
    if !target_norm.is_finite() || target_norm <= 0.0 {
        return Err(Error::invalid("target norm must be positive and finite"));
    }
    if current_norm == 0.0 {
        return Err(Error::Numeric(
            "cannot normalize a zero-norm embedding".into(),
        ));
    }
    Ok(scale * target_norm / current_norm)
}

/// A spec together with its generated (or loaded) blocks.
///
/// This is the in-memory form of the compact binary format: loading a file
/// trusts the stored payload, so handcrafted block data is served as-is.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantStore {
    spec: CirculantEmbeddingSpec,
    blocks: Vec<CirculantBlock>,
}

impl CirculantStore {
    /// Generate all blocks of `spec`.
    pub fn generate(spec: CirculantEmbeddingSpec) -> Self {
        let blocks = (0..spec.block_count())
            .map(|b| spec.generate_block(b).expect("index in range"))
            .collect();
        Self { spec, blocks }
    }

    /// Assemble a store from explicit blocks, validating shapes.
    pub fn from_parts(spec: CirculantEmbeddingSpec, blocks: Vec<CirculantBlock>) -> Result<Self> {
        if blocks.len() != spec.block_count() {
            return Err(Error::invalid(format!(
                "expected {} blocks, got {}",
                spec.block_count(),
                blocks.len()
            )));
        }
        for block in &blocks {
            if block.gaussian.len() != spec.dim || block.signs.len() != spec.dim {
                return Err(Error::invalid("block length does not match dim"));
            }
            if block.signs.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::invalid("signs must be exactly -1 or +1"));
            }
        }
        Ok(Self { spec, blocks })
    }

    pub fn spec(&self) -> &CirculantEmbeddingSpec {
        &self.spec
    }

    pub fn blocks(&self) -> &[CirculantBlock] {
        &self.blocks
    }

    pub fn row<T: Real>(&self, i: usize) -> Result<Vec<T>> {
        if i >= self.spec.vocab_size {
            return Err(Error::invalid(format!(
                "row index {i} out of range (rows: {})",
                self.spec.vocab_size
            )));
        }
        let d = self.spec.dim;
        Ok(block_row::<T>(&self.blocks[i / d], i % d, self.spec.scale))
    }

    pub fn materialize<T: Real>(&self) -> DenseMatrix<T> {
        let mut data = Vec::with_capacity(self.spec.vocab_size * self.spec.dim);
        for (b, block) in self.blocks.iter().enumerate() {
            for k in 0..self.spec.block_rows(b) {
                data.extend_from_slice(&block_row::<T>(block, k, self.spec.scale));
            }
        }
        DenseMatrix {
            rows: self.spec.vocab_size,
            cols: self.spec.dim,
            data,
        }
    }

    pub fn frobenius_norm<T: Real>(&self) -> T {
        let mut total = T::zero();
        for (b, block) in self.blocks.iter().enumerate() {
            total += block_weighted_sumsq::<T>(block, self.spec.block_rows(b));
        }
        T::from_f64(self.spec.scale).unwrap() * Float::sqrt(total)
    }

    /// Same blocks, scale adjusted to hit `target_norm`.
    pub fn normalize_to(&self, target_norm: f64) -> Result<Self> {
        let scale = rescaled(self.frobenius_norm::<f64>(), self.spec.scale, target_norm)?;
        Ok(Self {
            spec: CirculantEmbeddingSpec { scale, ..self.spec },
            blocks: self.blocks.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, d: usize, seed: u64) -> CirculantEmbeddingSpec {
        CirculantEmbeddingSpec::new(n, d, seed).unwrap()
    }

    /// Textbook construction used as an independent oracle: column `j` of
    /// `circulant(c)` is `c` cyclically shifted down by `j`, then scaled by
    /// `r[j]` and the global scale.
    fn dense_oracle(block: &CirculantBlock, rows: usize, scale: f64) -> Vec<Vec<f64>> {
        let d = block.gaussian.len();
        let mut m = vec![vec![0.0; d]; rows];
        for (k, row) in m.iter_mut().enumerate().take(d) {
            for (j, slot) in row.iter_mut().enumerate() {
                // entry (k, j) holds c[(k - j) mod d]
                let src = (k + d - j) % d;
                *slot = block.gaussian[src] as f64 * scale * block.signs[j] as f64;
            }
        }
        m
    }

    #[test]
    fn new_spec_echoes_fields() {
        let s = spec(400_000, 800, 42);
        assert_eq!(
            (s.vocab_size, s.dim, s.seed, s.scale),
            (400_000, 800, 42, 1.0)
        );
        let s = spec(1, 1, 0);
        assert_eq!((s.vocab_size, s.dim, s.seed, s.scale), (1, 1, 0, 1.0));
    }

    #[test]
    fn new_spec_rejects_zero_dimensions() {
        assert!(CirculantEmbeddingSpec::new(0, 800, 42).is_err());
        assert!(CirculantEmbeddingSpec::new(800, 0, 42).is_err());
    }

    #[test]
    fn block_generation_is_deterministic() {
        let s = spec(64, 16, 7);
        assert_eq!(s.generate_block(2).unwrap(), s.generate_block(2).unwrap());
    }

    #[test]
    fn distinct_seeds_give_distinct_blocks() {
        let a = spec(64, 16, 1).generate_block(0).unwrap();
        let b = spec(64, 16, 2).generate_block(0).unwrap();
        assert_ne!(a.gaussian, b.gaussian);
    }

    #[test]
    fn block_entries_have_standard_moments() {
        // 100k Gaussian entries and 100k signs across 200 blocks.
        let s = spec(102_400, 512, 11);
        let mut sum_c = 0.0f64;
        let mut sum_r = 0.0f64;
        for b in 0..200 {
            let block = s.generate_block(b).unwrap();
            sum_c += block.gaussian.iter().map(|&v| v as f64).sum::<f64>();
            sum_r += block.signs.iter().map(|&v| v as f64).sum::<f64>();
        }
        assert!((sum_c / 102_400.0).abs() < 0.02);
        assert!((sum_r / 102_400.0).abs() < 0.02);
    }

    #[test]
    fn block_index_out_of_range_is_rejected() {
        let s = spec(10, 4, 0);
        assert_eq!(s.block_count(), 3);
        assert!(s.generate_block(3).is_err());
    }

    #[test]
    fn unit_impulse_makes_identity_block() {
        let s = spec(3, 3, 0);
        let store = CirculantStore::from_parts(
            s,
            vec![CirculantBlock {
                gaussian: vec![1.0, 0.0, 0.0],
                signs: vec![1, 1, 1],
            }],
        )
        .unwrap();
        assert_eq!(store.row::<f64>(0).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(store.row::<f64>(1).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(store.row::<f64>(2).unwrap(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn hand_expanded_row_matches_index_formula() {
        let s = spec(3, 3, 0);
        let store = CirculantStore::from_parts(
            s,
            vec![CirculantBlock {
                gaussian: vec![1.0, 2.0, 3.0],
                signs: vec![1, -1, 1],
            }],
        )
        .unwrap();
        // k = 0: (c[0]*r[0], c[2]*r[1], c[1]*r[2])
        assert_eq!(store.row::<f64>(0).unwrap(), vec![1.0, -3.0, 2.0]);
        let oracle = dense_oracle(&store.blocks()[0], 3, 1.0);
        assert_eq!(store.row::<f64>(0).unwrap(), oracle[0]);
    }

    #[test]
    fn rows_match_dense_oracle_and_materialization() {
        let s = CirculantEmbeddingSpec {
            scale: 1.75,
            ..spec(10, 4, 99)
        };
        let dense = s.materialize::<f64>();
        assert_eq!(dense.rows(), 10);
        assert_eq!(dense.cols(), 4);
        for b in 0..s.block_count() {
            let oracle = dense_oracle(&s.generate_block(b).unwrap(), s.block_rows(b), s.scale);
            for (k, want) in oracle.iter().enumerate() {
                let i = b * 4 + k;
                let row = s.row::<f64>(i).unwrap();
                assert_eq!(&row, want, "row {i} vs oracle");
                assert_eq!(row.as_slice(), dense.row(i), "row {i} vs materialize");
            }
        }
    }

    #[test]
    fn row_index_out_of_range_is_rejected() {
        assert!(spec(10, 4, 0).row::<f64>(10).is_err());
    }

    #[test]
    fn partial_final_block_is_truncated() {
        let s = spec(6, 4, 5);
        let dense = s.materialize::<f64>();
        assert_eq!((dense.rows(), dense.cols()), (6, 4));
        assert_eq!(s.block_rows(0), 4);
        assert_eq!(s.block_rows(1), 2);
    }

    #[test]
    fn smallest_instance_materializes() {
        let s = spec(1, 1, 3);
        let block = s.generate_block(0).unwrap();
        let want = block.gaussian[0] as f64 * 1.0 * block.signs[0] as f64;
        assert_eq!(s.materialize::<f64>().row(0), &[want]);
    }

    #[test]
    fn frobenius_norm_of_identity_block_is_sqrt_d() {
        let store = CirculantStore::from_parts(
            spec(3, 3, 0),
            vec![CirculantBlock {
                gaussian: vec![1.0, 0.0, 0.0],
                signs: vec![1, 1, 1],
            }],
        )
        .unwrap();
        assert!((store.frobenius_norm::<f64>() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frobenius_norm_matches_dense_and_is_homogeneous() {
        for (n, d, seed) in [(12, 4, 1), (10, 4, 2), (7, 3, 3), (5, 8, 4)] {
            let s = CirculantEmbeddingSpec {
                scale: 0.37,
                ..spec(n, d, seed)
            };
            let dense = s.materialize::<f64>();
            let dense_norm = (0..n)
                .flat_map(|i| dense.row(i).iter().copied())
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            let compact = s.frobenius_norm::<f64>();
            assert!(
                (compact - dense_norm).abs() <= 1e-9 * dense_norm,
                "compact {compact} vs dense {dense_norm}"
            );
            let doubled = CirculantEmbeddingSpec { scale: 0.74, ..s };
            assert!(
                (doubled.frobenius_norm::<f64>() - 2.0 * compact).abs() <= 1e-9 * compact
            );
        }
    }

    #[test]
    fn norm_identity_for_divisible_n() {
        let s = spec(32, 8, 21);
        let sumsq: f64 = (0..s.block_count())
            .map(|b| {
                s.generate_block(b)
                    .unwrap()
                    .gaussian
                    .iter()
                    .map(|&c| (c as f64) * (c as f64))
                    .sum::<f64>()
            })
            .sum();
        let want = (8.0 * sumsq).sqrt();
        let got = s.frobenius_norm::<f64>();
        assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn normalize_to_hits_target() {
        let s = spec(20, 5, 8);
        let same = s.normalize_to(s.frobenius_norm::<f64>()).unwrap();
        assert!((same.scale - s.scale).abs() < 1e-12);

        let halved = s.normalize_to(s.frobenius_norm::<f64>() / 2.0).unwrap();
        assert!((halved.scale - s.scale / 2.0).abs() < 1e-12);

        for target in [1e-3, 1.0, 123.456] {
            let normalized = s.normalize_to(target).unwrap();
            let got = normalized.frobenius_norm::<f64>();
            assert!((got - target).abs() <= 1e-9 * target, "{got} vs {target}");
        }
        assert!(s.normalize_to(0.0).is_err());
        assert!(s.normalize_to(-1.0).is_err());
    }

    #[test]
    fn footprint_matches_paper_scale_accounting() {
        let s = spec(400_000, 800, 0);
        let fp = s.memory_footprint(4).unwrap();
        assert_eq!(fp.dense_bytes, 1_280_000_000);
        // 400k entries * 4 B + 50k packed sign bytes + 40 B header
        assert_eq!(fp.compact_bytes, 1_650_040);
        assert!(fp.compact_bytes >= 1_600_000 && fp.compact_bytes <= 1_750_000);

        let glove_like = spec(400_000, 300, 0);
        assert_eq!(glove_like.memory_footprint(4).unwrap().dense_bytes, 480_000_000);
    }

    #[test]
    fn footprint_single_block_and_linearity() {
        let s = spec(64, 64, 0);
        let fp = s.memory_footprint(4).unwrap();
        assert_eq!(fp.compact_bytes, 64 * 4 + 8 + HEADER_BYTES);

        let small = spec(1024, 64, 0).memory_footprint(4).unwrap();
        let big = spec(2048, 64, 0).memory_footprint(4).unwrap();
        assert_eq!(
            big.compact_bytes - HEADER_BYTES,
            2 * (small.compact_bytes - HEADER_BYTES)
        );
    }

    #[test]
    fn footprint_bound_holds_when_dim_divides_n() {
        for (n, d) in [(400_000usize, 800usize), (64, 8), (30, 30), (1024, 2)] {
            let fp = spec(n, d, 0).memory_footprint(4).unwrap();
            assert!(fp.compact_bytes <= n as u64 * 4 + n as u64 + HEADER_BYTES);
        }
    }

    #[test]
    fn store_and_spec_agree() {
        let s = CirculantEmbeddingSpec {
            scale: 2.5,
            ..spec(22, 8, 77)
        };
        let store = s.to_store();
        for i in 0..22 {
            assert_eq!(store.row::<f64>(i).unwrap(), s.row::<f64>(i).unwrap());
            assert_eq!(store.row::<f32>(i).unwrap(), s.row::<f32>(i).unwrap());
        }
        assert_eq!(store.materialize::<f64>(), s.materialize::<f64>());
        assert_eq!(store.frobenius_norm::<f64>(), s.frobenius_norm::<f64>());
    }
}
