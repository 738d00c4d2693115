//! Corpus parsing and representation: CoNLL-2003-style NER files, TSV
//! sentence-classification files, CoNLL-U dependency parses, prediction
//! correctness files, stopword lists, and the subsample-and-replicate
//! protocol. All parsed corpora are immutable.

mod conllu;
mod ner;
mod predictions;
mod sentence;
mod stopwords;
mod subsample;

pub use conllu::{parse_conllu, DependencyArc, DependencyParseSet, SentenceParse};
pub use ner::{parse_ner, Entity, EntityType, NerCorpus, NerTag, NerToken, TagScheme};
pub use predictions::{parse_predictions, PredictionSet};
pub use sentence::{parse_sentences, SentenceCorpus};
pub use stopwords::{load_stopwords, StopwordSet};
pub use subsample::{subsample_replicate_ner, subsample_replicate_sentences};

/// What a prediction or metric row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    Token,
    Entity,
    Sentence,
}

impl std::fmt::Display for UnitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnitKind::Token => "token",
            UnitKind::Entity => "entity",
            UnitKind::Sentence => "sentence",
        })
    }
}

impl std::str::FromStr for UnitKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token" => Ok(UnitKind::Token),
            "entity" => Ok(UnitKind::Entity),
            "sentence" => Ok(UnitKind::Sentence),
            other => Err(crate::error::Error::invalid(format!(
                "unknown unit kind {other:?}"
            ))),
        }
    }
}

/// A token counts as punctuation iff none of its characters is alphanumeric.
pub fn is_punctuation(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}
