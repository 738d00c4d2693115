//! Linguistic difficulty metrics over evaluation units.
//!
//! Three properties are measured for two task families:
//!
//! * complexity — entity span length (NER, per entity) or mean surface
//!   distance of qualifying dependency arcs (sentences, per sentence);
//! * ambiguity — number of distinct training labels of a token (NER, per
//!   token) or entropy of the sentence-averaged unigram label distribution
//!   (sentences, per sentence);
//! * unseen — reciprocal training count of a token with `1/0 := inf` (NER,
//!   per token) or fraction of never-seen non-stopwords (per sentence).
//!
//! Units are addressed by stable string ids so externally produced
//! prediction files can join against them: sentence `s<i>`, token
//! `s<i>.t<j>`, entity `s<i>.e<k>` (all 0-based, `k` counts entities within
//! the sentence in span order).

mod ner;
mod sentence;

pub use ner::{build_token_table, ner_ambiguity, ner_complexity, ner_unseen, TokenLabelTable};
pub use sentence::{
    build_unigram_table, sent_ambiguity, sent_complexity, sent_unseen, UnigramLabelTable,
};

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use indexmap::IndexMap;
use crate::corpus::UnitKind;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn sentence_unit_id(sentence: usize) -> String {
    format!("s{sentence}")
}

pub fn token_unit_id(sentence: usize, token: usize) -> String {
    format!("s{sentence}.t{token}")
}

pub fn entity_unit_id(sentence: usize, entity: usize) -> String {
    format!("s{sentence}.e{entity}")
}

/// The six metric names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    NerComplexity,
    NerAmbiguity,
    NerUnseen,
    SentComplexity,
    SentAmbiguity,
    SentUnseen,
}

impl MetricName {
    pub fn unit_kind(self) -> UnitKind {
        match self {
            MetricName::NerComplexity => UnitKind::Entity,
            MetricName::NerAmbiguity | MetricName::NerUnseen => UnitKind::Token,
            _ => UnitKind::Sentence,
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricName::NerComplexity => "ner_complexity",
            MetricName::NerAmbiguity => "ner_ambiguity",
            MetricName::NerUnseen => "ner_unseen",
            MetricName::SentComplexity => "sent_complexity",
            MetricName::SentAmbiguity => "sent_ambiguity",
            MetricName::SentUnseen => "sent_unseen",
        })
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ner_complexity" => Ok(MetricName::NerComplexity),
            "ner_ambiguity" => Ok(MetricName::NerAmbiguity),
            "ner_unseen" => Ok(MetricName::NerUnseen),
            "sent_complexity" => Ok(MetricName::SentComplexity),
            "sent_ambiguity" => Ok(MetricName::SentAmbiguity),
            "sent_unseen" => Ok(MetricName::SentUnseen),
            other => Err(Error::invalid(format!("unknown metric {other:?}"))),
        }
    }
}

/// Per-unit difficulty scores. Values are non-negative, possibly infinite
/// (`inf` in TSV form) or missing (`NA`); iteration follows insertion order,
/// which parser-driven builders keep equal to corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries<T> {
    unit_kind: UnitKind,
    name: MetricName,
    values: IndexMap<String, Option<T>>,
}

impl<T: Real> MetricSeries<T> {
    pub fn new(name: MetricName) -> Self {
        Self {
            unit_kind: name.unit_kind(),
            name,
            values: IndexMap::new(),
        }
    }

    pub fn insert(&mut self, unit_id: String, value: Option<T>) {
        debug_assert!(value.is_none_or(|v| v >= T::zero()));
        self.values.insert(unit_id, value);
    }

    pub fn name(&self) -> MetricName {
        self.name
    }

    pub fn unit_kind(&self) -> UnitKind {
        self.unit_kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, unit_id: &str) -> Option<Option<T>> {
        self.values.get(unit_id).copied()
    }

    pub fn values(&self) -> &IndexMap<String, Option<T>> {
        &self.values
    }

    /// Write `unit_id<TAB>value` rows (`inf` for infinity, `NA` for missing).
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for (id, value) in &self.values {
            writeln!(w, "{id}\t{}", format_value(*value))?;
        }
        Ok(())
    }
}

fn format_value<T: Real>(value: Option<T>) -> String {
    match value {
        None => "NA".to_string(),
        Some(v) if v == T::infinity() => "inf".to_string(),
        Some(v) => v.to_string(),
    }
}

/// Parse a metric TSV back into a value map, enforcing non-negative values
/// and unique unit ids.
pub fn parse_metric_tsv<T: Real, R: BufRead>(reader: R) -> Result<IndexMap<String, Option<T>>> {
    let mut values = IndexMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (id, raw) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "missing tab between unit id and value"))?;
        let value = match raw {
            "NA" => None,
            "inf" => Some(T::infinity()),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad value {other:?}")))?;
                if v.is_nan() || v < 0.0 {
                    return Err(Error::parse(
                        lineno,
                        format!("metric values must be non-negative, got {other:?}"),
                    ));
                }
                Some(T::from_f64(v).unwrap())
            }
        };
        if values.insert(id.to_string(), value).is_some() {
            return Err(Error::parse(lineno, format!("duplicate unit id {id:?}")));
        }
    }
    Ok(values)
}
