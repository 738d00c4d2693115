//! On-disk formats for circulant embeddings.
//!
//! Compact binary format (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  "CREM"
//! version u32      1
//! n       u64      vocab_size
//! d       u64      dim
//! seed    u64
//! scale   f64      IEEE-754 bits
//! blocks  ceil(n/d) repetitions of:
//!           c       d * f32 (IEEE-754 single, little-endian)
//!           r       ceil(d/8) bytes; bit j%8 of byte j/8 is 1 iff r[j] = -1,
//!                   pad bits written as 0
//! ```
//!
//! The payload is authoritative on load: a reader serves whatever blocks the
//! file holds, so handcrafted fixtures work and no regeneration is needed.
//!
//! Text export is the common embedding interchange format: a `"n d"` header
//! line, then one line per word holding the token and `d` decimal values
//! separated by single spaces. Values are printed with Rust's shortest
//! round-trip formatting, so re-parsing reproduces the stored scalars
//! exactly.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{CirculantBlock, CirculantEmbeddingSpec, CirculantStore, DenseMatrix};

const MAGIC: [u8; 4] = *b"CREM";
const VERSION: u32 = 1;

impl CirculantStore {
    /// Write the compact binary format. The byte count written equals
    /// `memory_footprint(4).compact_bytes`.
    pub fn write_compact<W: Write>(&self, mut w: W) -> Result<()> {
        let spec = self.spec();
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(spec.vocab_size as u64).to_le_bytes())?;
        w.write_all(&(spec.dim as u64).to_le_bytes())?;
        w.write_all(&spec.seed.to_le_bytes())?;
        w.write_all(&spec.scale.to_le_bytes())?;
        for block in self.blocks() {
            for &c in &block.gaussian {
                w.write_all(&c.to_le_bytes())?;
            }
            let mut packed = vec![0u8; spec.dim.div_ceil(8)];
            for (j, &s) in block.signs.iter().enumerate() {
                if s < 0 {
                    packed[j / 8] |= 1 << (j % 8);
                }
            }
            w.write_all(&packed)?;
        }
        Ok(())
    }

    /// Read the compact binary format, validating header and payload shape.
    pub fn read_compact<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 40];
        r.read_exact(&mut header)
            .map_err(|_| Error::Format("file too short for header".into()))?;
        if header[0..4] != MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let d = u64::from_le_bytes(header[16..24].try_into().unwrap());
        let seed = u64::from_le_bytes(header[24..32].try_into().unwrap());
        let scale = f64::from_le_bytes(header[32..40].try_into().unwrap());
        if n == 0 || d == 0 {
            return Err(Error::Format("n and d must be positive".into()));
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::Format("scale must be positive and finite".into()));
        }
        let spec = CirculantEmbeddingSpec {
            vocab_size: usize::try_from(n).map_err(|_| Error::Format("n too large".into()))?,
            dim: usize::try_from(d).map_err(|_| Error::Format("d too large".into()))?,
            seed,
            scale,
        };

        let dim = spec.dim;
        let mut blocks = Vec::with_capacity(spec.block_count());
        let mut c_buf = vec![0u8; dim * 4];
        let mut r_buf = vec![0u8; dim.div_ceil(8)];
        for b in 0..spec.block_count() {
            r.read_exact(&mut c_buf)
                .map_err(|_| Error::Format(format!("truncated block {b}")))?;
            let gaussian = c_buf
                .chunks_exact(4)
                .map(|ch| f32::from_le_bytes(ch.try_into().unwrap()))
                .collect();
            r.read_exact(&mut r_buf)
                .map_err(|_| Error::Format(format!("truncated sign bits in block {b}")))?;
            let signs = (0..dim)
                .map(|j| if r_buf[j / 8] >> (j % 8) & 1 == 1 { -1 } else { 1 })
                .collect();
            blocks.push(CirculantBlock { gaussian, signs });
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after final block".into()));
        }
        CirculantStore::from_parts(spec, blocks)
    }

    /// Write the standard text embedding format for `vocab` (one token per
    /// row, `|vocab|` must equal `vocab_size`).
    pub fn export_dense<T: Real, W: Write>(&self, vocab: &[String], mut w: W) -> Result<()> {
        let spec = self.spec();
        if vocab.len() != spec.vocab_size {
            return Err(Error::invalid(format!(
                "vocabulary has {} entries, expected {}",
                vocab.len(),
                spec.vocab_size
            )));
        }
        if let Some(bad) = vocab
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::invalid(format!(
                "token {bad:?} would corrupt the space-separated format"
            )));
        }
        writeln!(w, "{} {}", spec.vocab_size, spec.dim)?;
        let mut line = String::new();
        for (i, token) in vocab.iter().enumerate() {
            line.clear();
            line.push_str(token);
            for v in self.row::<T>(i)? {
                line.push(' ');
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Parse the text embedding format back into tokens and a dense matrix.
pub fn read_dense_text<T: Real, R: BufRead>(r: R) -> Result<(Vec<String>, DenseMatrix<T>)> {
    let mut lines = r.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line"))?
        .1?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, "bad row count"))?;
    let d: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, "bad column count"))?;

    let mut tokens = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let mut fields = line.split(' ');
        let token = fields
            .next()
            .ok_or_else(|| Error::parse(lineno, "empty line"))?;
        let row = fields
            .map(|f| {
                f.parse::<f64>()
                    .map(|v| T::from_f64(v).unwrap())
                    .map_err(|_| Error::parse(lineno, format!("bad value {f:?}")))
            })
            .collect::<Result<Vec<T>>>()?;
        if row.len() != d {
            return Err(Error::parse(
                lineno,
                format!("expected {d} values, got {}", row.len()),
            ));
        }
        tokens.push(token.to_string());
        rows.push(row);
    }
    if tokens.len() != n {
        return Err(Error::Format(format!(
            "expected {n} rows, got {}",
            tokens.len()
        )));
    }
    Ok((tokens, DenseMatrix::from_rows(rows)))
}
