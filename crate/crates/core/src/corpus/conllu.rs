//! CoNLL-U reader, reduced to what dependency-distance metrics need: token
//! forms plus `(head, dependent, relation)` triples per sentence. Comment
//! lines are skipped, multiword-token ranges (`1-2`) are skipped, and any
//! other non-integer ID (e.g. empty nodes like `5.1`) is rejected.

use std::io::BufRead;

use crate::error::{Error, Result};

/// One dependency arc; positions are 1-based, head 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyArc {
    pub head: usize,
    pub dependent: usize,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentenceParse {
    /// Token forms, kept for alignment checks against the task corpus.
    pub forms: Vec<String>,
    pub arcs: Vec<DependencyArc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DependencyParseSet {
    pub parses: Vec<SentenceParse>,
}

impl DependencyParseSet {
    pub fn len(&self) -> usize {
        self.parses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parses.is_empty()
    }
}

/// Parse a standard 10-column CoNLL-U stream.
pub fn parse_conllu<R: BufRead>(reader: R) -> Result<DependencyParseSet> {
    let mut parses = Vec::new();
    let mut current = SentenceParse::default();
    let mut sentence_start_line = 0usize;

    let mut flush = |current: &mut SentenceParse, end_line: usize| -> Result<()> {
        if current.forms.is_empty() {
            return Ok(());
        }
        let len = current.forms.len();
        for arc in &current.arcs {
            if arc.head > len {
                return Err(Error::parse(
                    end_line,
                    format!(
                        "head {} out of range for a {len}-token sentence",
                        arc.head
                    ),
                ));
            }
        }
        parses.push(std::mem::take(current));
        Ok(())
    };

    let mut lineno = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        lineno = idx + 1;
        if line.is_empty() {
            flush(&mut current, lineno)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                lineno,
                format!("expected 10 tab-separated columns, got {}", cols.len()),
            ));
        }
        if cols[0].contains('-') {
            // multiword token range; the word rows follow individually
            continue;
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("non-integer token id {:?}", cols[0])))?;
        if current.forms.is_empty() {
            sentence_start_line = lineno;
        }
        if id != current.forms.len() + 1 {
            return Err(Error::parse(
                lineno,
                format!(
                    "token id {id} out of sequence (sentence starting at line {sentence_start_line})"
                ),
            ));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("non-integer head {:?}", cols[6])))?;
        if head == id {
            return Err(Error::parse(lineno, format!("token {id} is its own head")));
        }
        current.forms.push(cols[1].to_string());
        current.arcs.push(DependencyArc {
            head,
            dependent: id,
            relation: cols[7].to_string(),
        });
    }
    flush(&mut current, lineno + 1)?;
    Ok(DependencyParseSet { parses })
}
