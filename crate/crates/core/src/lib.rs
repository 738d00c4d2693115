//! Memory-efficient circulant random word embeddings plus the data-profiling
//! toolkit around them: linguistic difficulty metrics for NER and sentence
//! classification, median-split error-gap reports, sample-complexity ratios,
//! and a numerical study of why uninformative-prior GP posteriors converge to
//! informative-prior posteriors as observations accumulate.
//!
//! Everything numeric is generic over the [`scalar::Real`] scalar (`f32` or
//! `f64`); the aliases below pin the `f64` instantiations most callers want.
//! All randomness is counter-based and keyed (see [`detrng`]), so every
//! artifact this crate produces is bit-reproducible from its seed.

pub use indexmap;
pub use nalgebra;

pub mod circulant;
pub mod corpus;
pub mod detrng;
pub mod error;
pub mod fraction;
pub mod gp;
pub mod metrics;
pub mod samplecomp;
pub mod scalar;
pub mod slice;

pub use circulant::{CirculantBlock, CirculantEmbeddingSpec, CirculantStore, MemoryFootprint};
pub use error::{Error, Result};
pub use fraction::GridFraction;
pub use scalar::Real;

/// `f64` instantiations used by the CLI and most callers.
pub type MetricSeries64 = metrics::MetricSeries<f64>;
pub type SliceReport64 = slice::SliceReport<f64>;
pub type AccuracyCurve64 = samplecomp::AccuracyCurve<f64>;
pub type GpPosterior64 = gp::GpPosterior<f64>;
