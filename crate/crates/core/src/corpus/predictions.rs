//! Per-unit correctness records for one trained model on one evaluation set:
//! `unit_id<TAB>{1|0}` per line (1 = correct). These files are produced by
//! external training pipelines and joined against metric series.

use indexmap::IndexMap;
use std::io::BufRead;

use crate::error::{Error, Result};

use super::UnitKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    records: IndexMap<String, bool>,
    unit_kind: UnitKind,
}

impl PredictionSet {
    pub fn new(unit_kind: UnitKind) -> Self {
        Self {
            records: IndexMap::new(),
            unit_kind,
        }
    }

    pub fn from_records<I: IntoIterator<Item = (String, bool)>>(
        records: I,
        unit_kind: UnitKind,
    ) -> Result<Self> {
        let mut set = Self::new(unit_kind);
        for (id, correct) in records {
            set.insert(id, correct)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, unit_id: String, correct: bool) -> Result<()> {
        if self.records.insert(unit_id.clone(), correct).is_some() {
            return Err(Error::invalid(format!("duplicate unit id {unit_id:?}")));
        }
        Ok(())
    }

    pub fn get(&self, unit_id: &str) -> Option<bool> {
        self.records.get(unit_id).copied()
    }

    pub fn unit_kind(&self) -> UnitKind {
        self.unit_kind
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.records.iter().map(|(id, &c)| (id.as_str(), c))
    }
}

/// Parse a prediction TSV; unit ids must be unique, correctness is `0`/`1`.
pub fn parse_predictions<R: BufRead>(reader: R, unit_kind: UnitKind) -> Result<PredictionSet> {
    let mut set = PredictionSet::new(unit_kind);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (id, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "missing tab between unit id and value"))?;
        let correct = match value {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::parse(
                    lineno,
                    format!("expected 0 or 1, got {other:?}"),
                ))
            }
        };
        set.insert(id.to_string(), correct)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(set)
}
