//! Sentence-classification corpus: one record per line, `label`, a tab, then
//! the space-tokenized sentence. The label set is inferred from the file and
//! frozen (indices follow the sorted distinct labels).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceCorpus {
    /// `(tokens, label_index)` in file order.
    sentences: Vec<(Vec<String>, usize)>,
    /// Distinct labels, sorted; `label_index` points here.
    labels: Vec<String>,
}

impl SentenceCorpus {
    /// Build from parts; every label index must be in range and every
    /// sentence non-empty.
    pub fn from_parts(sentences: Vec<(Vec<String>, usize)>, labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("label set must be non-empty"));
        }
        for (tokens, label) in &sentences {
            if tokens.is_empty() {
                return Err(Error::invalid("sentences must be non-empty"));
            }
            if *label >= labels.len() {
                return Err(Error::invalid("label index out of range"));
            }
        }
        Ok(Self { sentences, labels })
    }

    pub fn sentences(&self) -> &[(Vec<String>, usize)] {
        &self.sentences
    }

    pub fn tokens(&self, i: usize) -> &[String] {
        &self.sentences[i].0
    }

    pub fn label(&self, i: usize) -> usize {
        self.sentences[i].1
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Number of classes `C`.
    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Serialize back to the TSV format.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for (tokens, label) in &self.sentences {
            writeln!(w, "{}\t{}", self.labels[*label], tokens.join(" "))?;
        }
        Ok(())
    }
}

/// Parse a label-TSV stream. Blank lines are skipped.
pub fn parse_sentences<R: BufRead>(reader: R) -> Result<SentenceCorpus> {
    let mut raw: Vec<(String, Vec<String>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "missing tab between label and sentence"))?;
        if label.is_empty() {
            return Err(Error::parse(lineno, "empty label"));
        }
        let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        if tokens.is_empty() {
            return Err(Error::parse(lineno, "empty sentence"));
        }
        raw.push((label.to_string(), tokens));
    }

    let mut labels: Vec<String> = raw.iter().map(|(l, _)| l.clone()).collect();
    labels.sort();
    labels.dedup();
    let sentences = raw
        .into_iter()
        .map(|(label, tokens)| {
            let idx = labels.binary_search(&label).expect("label present");
            (tokens, idx)
        })
        .collect();
    SentenceCorpus::from_parts(sentences, labels)
}
