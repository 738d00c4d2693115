//! Sentence-level difficulty metrics. Unigram lookups lowercase the token
//! first; stopwords and punctuation always contribute the uniform label
//! distribution, and so do words never seen in training.

use std::collections::HashMap;

use num_traits::Float;

use crate::corpus::{is_punctuation, DependencyParseSet, SentenceCorpus, StopwordSet};
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{sentence_unit_id, MetricName, MetricSeries};

/// Unigram label statistics from a training corpus: for every lowercased
/// word, the number of training sentences containing it and the label
/// distribution `p(y|w)` over those sentences (uniform for stopwords and
/// punctuation).
#[derive(Debug, Clone, PartialEq)]
pub struct UnigramLabelTable<T> {
    dist: HashMap<String, Vec<T>>,
    counts: HashMap<String, u64>,
    num_classes: usize,
}

impl<T: Real> UnigramLabelTable<T> {
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Sentence-level document frequency of `word` (case-insensitive),
    /// 0 if never seen.
    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(&word.to_lowercase()).copied().unwrap_or(0)
    }

    /// `p(y|word)` if the word was seen in training.
    pub fn distribution(&self, word: &str) -> Option<&[T]> {
        self.dist.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    fn uniform(&self) -> Vec<T> {
        vec![T::one() / T::from_usize(self.num_classes).unwrap(); self.num_classes]
    }
}

/// Build the unigram table: `p(y|w)` is the fraction of training sentences
/// containing `w` (counted once per sentence) that carry label `y`.
pub fn build_unigram_table<T: Real>(
    train: &SentenceCorpus,
    stops: &StopwordSet,
) -> UnigramLabelTable<T> {
    let num_classes = train.num_classes();
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut class_counts: HashMap<String, Vec<u64>> = HashMap::new();
    for (tokens, label) in train.sentences() {
        let mut seen: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        seen.sort_unstable();
        seen.dedup();
        for word in seen {
            *counts.entry(word.clone()).or_default() += 1;
            class_counts.entry(word).or_insert_with(|| vec![0; num_classes])[*label] += 1;
        }
    }

    let mut table = UnigramLabelTable {
        dist: HashMap::new(),
        counts,
        num_classes,
    };
    for (word, per_class) in class_counts {
        let dist = if stops.contains(&word) || is_punctuation(&word) {
            table.uniform()
        } else {
            let total = T::from_u64(table.counts[&word]).unwrap();
            per_class
                .iter()
                .map(|&c| T::from_u64(c).unwrap() / total)
                .collect()
        };
        table.dist.insert(word, dist);
    }
    table
}

/// Complexity per sentence: mean surface distance `|head - dependent|` over
/// qualifying dependency arcs. Root arcs are skipped, and so is any arc
/// whose head or dependent token is a stopword or punctuation. Sentences
/// with no qualifying arc get a missing value.
pub fn sent_complexity<T: Real>(
    eval: &SentenceCorpus,
    parses: &DependencyParseSet,
    stops: &StopwordSet,
) -> Result<MetricSeries<T>> {
    if parses.len() != eval.len() {
        return Err(Error::Alignment(format!(
            "{} parses for {} sentences",
            parses.len(),
            eval.len()
        )));
    }
    let mut series = MetricSeries::new(MetricName::SentComplexity);
    for (s, parse) in parses.parses.iter().enumerate() {
        let tokens = eval.tokens(s);
        if parse.forms.len() != tokens.len() {
            return Err(Error::Alignment(format!(
                "sentence {s}: parse has {} tokens, corpus has {}",
                parse.forms.len(),
                tokens.len()
            )));
        }
        let excluded = |position: usize| {
            let token = &tokens[position - 1];
            stops.contains(token) || is_punctuation(token)
        };
        let mut total = T::zero();
        let mut n_arcs = 0usize;
        for arc in &parse.arcs {
            if arc.head == 0 || excluded(arc.head) || excluded(arc.dependent) {
                continue;
            }
            let dist = arc.head.abs_diff(arc.dependent);
            total += T::from_usize(dist).unwrap();
            n_arcs += 1;
        }
        let value = (n_arcs > 0).then(|| total / T::from_usize(n_arcs).unwrap());
        series.insert(sentence_unit_id(s), value);
    }
    Ok(series)
}

/// Ambiguity per sentence: Shannon entropy (base 2) of the label
/// distribution averaged over the sentence's words, where stopwords,
/// punctuation, and unseen words contribute the uniform distribution. In the
/// binary case this reduces to the entropy of a coin with the averaged
/// positive probability.
pub fn sent_ambiguity<T: Real>(
    table: &UnigramLabelTable<T>,
    eval: &SentenceCorpus,
    stops: &StopwordSet,
) -> MetricSeries<T> {
    let c = table.num_classes();
    let uniform = table.uniform();
    let mut series = MetricSeries::new(MetricName::SentAmbiguity);
    for (s, (tokens, _)) in eval.sentences().iter().enumerate() {
        let mut avg = vec![T::zero(); c];
        for token in tokens {
            let dist = if stops.contains(token) || is_punctuation(token) {
                &uniform
            } else {
                match table.distribution(token) {
                    Some(d) => d,
                    None => &uniform,
                }
            };
            for (a, &p) in avg.iter_mut().zip(dist) {
                *a += p;
            }
        }
        let len = T::from_usize(tokens.len()).unwrap();
        let entropy = entropy_bits(avg.iter().map(|&v| v / len));
        series.insert(sentence_unit_id(s), Some(entropy));
    }
    series
}

/// Shannon entropy in bits with `0 * log 0 := 0`.
fn entropy_bits<T: Real>(probabilities: impl Iterator<Item = T>) -> T {
    let mut h = T::zero();
    for p in probabilities {
        if p > T::zero() {
            h -= p * Float::log2(p);
        }
    }
    h
}

/// Unseen-word prevalence per sentence: the number of non-stopword tokens
/// with training count 0, divided by the sentence's total token count.
pub fn sent_unseen<T: Real>(
    table: &UnigramLabelTable<T>,
    eval: &SentenceCorpus,
    stops: &StopwordSet,
) -> MetricSeries<T> {
    let mut series = MetricSeries::new(MetricName::SentUnseen);
    for (s, (tokens, _)) in eval.sentences().iter().enumerate() {
        let unseen = tokens
            .iter()
            .filter(|t| !stops.contains(t) && table.count(t) == 0)
            .count();
        let value = T::from_usize(unseen).unwrap() / T::from_usize(tokens.len()).unwrap();
        series.insert(sentence_unit_id(s), Some(value));
    }
    series
}
