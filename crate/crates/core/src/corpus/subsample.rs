//! Subsample-and-replicate: for a grid fraction `c`, uniformly select
//! `floor(c*N)` sentences without replacement (deterministic in the seed) and
//! concatenate `1/c` copies, so the output always has `floor(c*N) * (1/c)`
//! sentences. Sampling is at sentence granularity for both corpus kinds.

use crate::detrng::KeyedRng;
use crate::error::{Error, Result};
use crate::fraction::GridFraction;

use super::{NerCorpus, SentenceCorpus};

const STREAM_SUBSAMPLE: u64 = 0x20;

/// Selected sentence indices in original corpus order.
fn select_indices(n: usize, fraction: GridFraction, seed: u64) -> Result<Vec<usize>> {
    let k = n / fraction.denominator();
    if k == 0 {
        return Err(Error::invalid(format!(
            "cannot select {fraction} of {n} sentences: empty selection"
        )));
    }
    // Partial Fisher-Yates, then sort to preserve corpus order.
    let mut rng = KeyedRng::new(seed, STREAM_SUBSAMPLE);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.next_index(n - i);
        indices.swap(i, j);
    }
    indices.truncate(k);
    indices.sort_unstable();
    Ok(indices)
}

/// Subsample-and-replicate a sentence-classification corpus. The label set
/// is kept unchanged even if the selection drops a class.
pub fn subsample_replicate_sentences(
    corpus: &SentenceCorpus,
    fraction: GridFraction,
    seed: u64,
) -> Result<SentenceCorpus> {
    let selected = select_indices(corpus.len(), fraction, seed)?;
    let mut sentences = Vec::with_capacity(selected.len() * fraction.denominator());
    for _ in 0..fraction.denominator() {
        for &i in &selected {
            sentences.push(corpus.sentences()[i].clone());
        }
    }
    SentenceCorpus::from_parts(sentences, corpus.labels().to_vec())
}

/// Subsample-and-replicate an NER corpus (sentence granularity).
pub fn subsample_replicate_ner(
    corpus: &NerCorpus,
    fraction: GridFraction,
    seed: u64,
) -> Result<NerCorpus> {
    let selected = select_indices(corpus.sentences().len(), fraction, seed)?;
    let mut sentences = Vec::with_capacity(selected.len() * fraction.denominator());
    for _ in 0..fraction.denominator() {
        for &i in &selected {
            sentences.push(corpus.sentences()[i].clone());
        }
    }
    Ok(NerCorpus::from_sentences(sentences, corpus.scheme()))
}
