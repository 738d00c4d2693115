//! NER difficulty metrics. Token lookups are case-sensitive: casing is an
//! entity cue.

use std::collections::{BTreeSet, HashMap};

use crate::corpus::{EntityType, NerCorpus};
use crate::scalar::Real;

use super::{entity_unit_id, token_unit_id, MetricName, MetricSeries};

/// Label a token appears with in training: an entity type or outside.
/// `None` encodes the `O` label.
pub type TokenLabel = Option<EntityType>;

/// Training-set statistics per surface token: the set of labels it appears
/// with (subset of {PER, ORG, LOC, MISC, O}) and its occurrence count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenLabelTable {
    labels_seen: HashMap<String, BTreeSet<TokenLabel>>,
    counts: HashMap<String, u64>,
}

impl TokenLabelTable {
    /// Distinct training labels of `token`; 0 for tokens never seen.
    pub fn ambiguity(&self, token: &str) -> usize {
        self.labels_seen.get(token).map_or(0, BTreeSet::len)
    }

    pub fn labels(&self, token: &str) -> Option<&BTreeSet<TokenLabel>> {
        self.labels_seen.get(token)
    }

    /// Training occurrence count (token granularity), 0 if unseen.
    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }
}

/// Exact label sets and occurrence counts per surface token of the training
/// corpus.
pub fn build_token_table(train: &NerCorpus) -> TokenLabelTable {
    let mut table = TokenLabelTable::default();
    for (s, sentence) in train.sentences().iter().enumerate() {
        let types = train.token_entity_types(s);
        for (token, label) in sentence.iter().zip(types) {
            table
                .labels_seen
                .entry(token.form.clone())
                .or_default()
                .insert(label);
            *table.counts.entry(token.form.clone()).or_default() += 1;
        }
    }
    table
}

/// Complexity per evaluation entity: its span length in tokens.
pub fn ner_complexity<T: Real>(eval: &NerCorpus) -> MetricSeries<T> {
    let mut series = MetricSeries::new(MetricName::NerComplexity);
    for s in 0..eval.sentences().len() {
        for (k, entity) in eval.entities_of_sentence(s).enumerate() {
            let span = entity.end - entity.start;
            series.insert(entity_unit_id(s, k), Some(T::from_usize(span).unwrap()));
        }
    }
    series
}

/// Ambiguity per evaluation token: number of distinct training labels, 0 if
/// the token never occurs in training.
pub fn ner_ambiguity<T: Real>(table: &TokenLabelTable, eval: &NerCorpus) -> MetricSeries<T> {
    let mut series = MetricSeries::new(MetricName::NerAmbiguity);
    for (s, sentence) in eval.sentences().iter().enumerate() {
        for (t, token) in sentence.iter().enumerate() {
            let value = T::from_usize(table.ambiguity(&token.form)).unwrap();
            series.insert(token_unit_id(s, t), Some(value));
        }
    }
    series
}

/// Unseen-ness per evaluation token: reciprocal training count, with
/// `1/0 := inf`.
pub fn ner_unseen<T: Real>(table: &TokenLabelTable, eval: &NerCorpus) -> MetricSeries<T> {
    let mut series = MetricSeries::new(MetricName::NerUnseen);
    for (s, sentence) in eval.sentences().iter().enumerate() {
        for (t, token) in sentence.iter().enumerate() {
            let value = match table.count(&token.form) {
                0 => T::infinity(),
                c => T::one() / T::from_u64(c).unwrap(),
            };
            series.insert(token_unit_id(s, t), Some(value));
        }
    }
    series
}
