//! Median-split error-gap analysis: split evaluation units at the median of
//! a difficulty metric, compute per-slice error rates for two models, and
//! report the gap statistics in absolute and relative terms.
//!
//! Conventions, fixed for reproducibility: the split threshold is the lower
//! median of the defined values, infinity sorts above every finite value,
//! ties go to the below slice (`value <= median`), and missing values are
//! excluded before splitting.

use std::fmt;
use std::io::Write;

use indexmap::IndexMap;
use crate::corpus::PredictionSet;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Outcome of splitting a metric series at its median.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianSplit<T> {
    /// Unit ids with `value <= median`, in input order.
    pub below: Vec<String>,
    /// Unit ids with `value > median`, in input order.
    pub above: Vec<String>,
    /// The split threshold (lower median of defined values).
    pub median: T,
}

/// Split the defined values of a metric series at the lower median.
pub fn median_split<T: Real>(values: &IndexMap<String, Option<T>>) -> Result<MedianSplit<T>> {
    let defined: Vec<(&str, T)> = values
        .iter()
        .filter_map(|(id, v)| v.map(|v| (id.as_str(), v)))
        .collect();
    if defined.len() < 2 {
        return Err(Error::invalid(format!(
            "median split needs at least 2 defined values, got {}",
            defined.len()
        )));
    }
    let mut sorted: Vec<T> = defined.iter().map(|&(_, v)| v).collect();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("metric values are never NaN"));
    let median = sorted[(sorted.len() - 1) / 2];

    let mut below = Vec::new();
    let mut above = Vec::new();
    for (id, v) in defined {
        if v <= median {
            below.push(id.to_string());
        } else {
            above.push(id.to_string());
        }
    }
    Ok(MedianSplit {
        below,
        above,
        median,
    })
}

/// Gap statistics for one metric and one model pair. `base` is the
/// contextual reference model; gaps are `err_other - err_base` per slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport<T> {
    pub metric_name: String,
    pub median: T,
    pub n_below: usize,
    pub n_above: usize,
    pub err_base_below: T,
    pub err_base_above: T,
    pub err_other_below: T,
    pub err_other_above: T,
    pub gap_below: T,
    pub gap_above: T,
    /// `gap_above - gap_below` (the Abs. column).
    pub abs_stat: T,
    /// `gap_above / gap_below` (the Rel. column); undefined when
    /// `gap_below` is 0.
    pub rel_stat: Option<T>,
    /// Units dropped because a prediction set did not cover them.
    pub dropped: usize,
}

/// Join a median split against two prediction sets and compute the report.
/// Units missing from either set are dropped (counted in `dropped`); a slice
/// left empty after joining is an error.
pub fn slice_errors<T: Real>(
    metric_name: &str,
    split: &MedianSplit<T>,
    preds_base: &PredictionSet,
    preds_other: &PredictionSet,
) -> Result<SliceReport<T>> {
    let join = |ids: &[String]| -> (Vec<String>, usize) {
        let joined: Vec<String> = ids
            .iter()
            .filter(|id| preds_base.get(id).is_some() && preds_other.get(id).is_some())
            .cloned()
            .collect();
        let dropped = ids.len() - joined.len();
        (joined, dropped)
    };
    let (below, dropped_below) = join(&split.below);
    let (above, dropped_above) = join(&split.above);
    if below.is_empty() || above.is_empty() {
        return Err(Error::Alignment(
            "a slice is empty after joining against the prediction sets".into(),
        ));
    }

    let rate = |ids: &[String], preds: &PredictionSet| -> T {
        let wrong = ids
            .iter()
            .filter(|id| !preds.get(id).expect("joined ids are covered"))
            .count();
        T::from_usize(wrong).unwrap() / T::from_usize(ids.len()).unwrap()
    };
    let err_base_below = rate(&below, preds_base);
    let err_base_above = rate(&above, preds_base);
    let err_other_below = rate(&below, preds_other);
    let err_other_above = rate(&above, preds_other);
    let (n_below, n_above) = (below.len(), above.len());

    let gap_below = err_other_below - err_base_below;
    let gap_above = err_other_above - err_base_above;
    Ok(SliceReport {
        metric_name: metric_name.to_string(),
        median: split.median,
        n_below,
        n_above,
        err_base_below,
        err_base_above,
        err_other_below,
        err_other_above,
        gap_below,
        gap_above,
        abs_stat: gap_above - gap_below,
        rel_stat: (gap_below != T::zero()).then(|| gap_above / gap_below),
        dropped: dropped_below + dropped_above,
    })
}

impl<T: Real> SliceReport<T> {
    const COLUMNS: [&'static str; 12] = [
        "metric",
        "median",
        "n_below",
        "n_above",
        "err_base_below",
        "err_base_above",
        "err_other_below",
        "err_other_above",
        "gap_below",
        "gap_above",
        "abs",
        "rel",
    ];

    fn fields(&self) -> [String; 12] {
        [
            self.metric_name.clone(),
            self.median.to_string(),
            self.n_below.to_string(),
            self.n_above.to_string(),
            self.err_base_below.to_string(),
            self.err_base_above.to_string(),
            self.err_other_below.to_string(),
            self.err_other_above.to_string(),
            self.gap_below.to_string(),
            self.gap_above.to_string(),
            self.abs_stat.to_string(),
            self.rel_stat.map_or("undef".to_string(), |r| r.to_string()),
        ]
    }

    /// Header plus one data row, tab-separated.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::COLUMNS.join("\t"))?;
        writeln!(w, "{}", self.fields().join("\t"))?;
        Ok(())
    }
}

impl<T: Real> fmt::Display for SliceReport<T> {
    /// Aligned plain-text table with the Abs./Rel. columns last.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = self.fields();
        let widths: Vec<usize> = Self::COLUMNS
            .iter()
            .zip(&fields)
            .map(|(h, v)| h.len().max(v.len()))
            .collect();
        for (i, h) in Self::COLUMNS.iter().enumerate() {
            if i > 0 {
                write!(f, "  ")?;
            }
            write!(f, "{h:>width$}", width = widths[i])?;
        }
        writeln!(f)?;
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                write!(f, "  ")?;
            }
            write!(f, "{v:>width$}", width = widths[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::UnitKind;
    use indexmap::IndexMap;

    fn values(pairs: &[(&str, Option<f64>)]) -> IndexMap<String, Option<f64>> {
        pairs
            .iter()
            .map(|&(id, v)| (id.to_string(), v))
            .collect()
    }

    fn preds(pairs: &[(&str, bool)]) -> PredictionSet {
        PredictionSet::from_records(
            pairs.iter().map(|&(id, c)| (id.to_string(), c)),
            UnitKind::Sentence,
        )
        .unwrap()
    }

    #[test]
    fn lower_median_with_ties_below() {
        let split = median_split(&values(&[
            ("u1", Some(1.0)),
            ("u2", Some(2.0)),
            ("u3", Some(3.0)),
            ("u4", Some(4.0)),
        ]))
        .unwrap();
        assert_eq!(split.median, 2.0);
        assert_eq!(split.below, ["u1", "u2"]);
        assert_eq!(split.above, ["u3", "u4"]);
    }

    #[test]
    fn infinities_sort_above_finite_values() {
        let split = median_split(&values(&[
            ("a", Some(0.5)),
            ("b", Some(f64::INFINITY)),
            ("c", Some(f64::INFINITY)),
            ("d", Some(0.25)),
        ]))
        .unwrap();
        assert_eq!(split.median, 0.5);
        assert_eq!(split.below, ["a", "d"]);
        assert_eq!(split.above, ["b", "c"]);
    }

    #[test]
    fn missing_values_are_excluded_and_single_value_errors() {
        let split = median_split(&values(&[
            ("a", Some(1.0)),
            ("b", None),
            ("c", Some(3.0)),
        ]))
        .unwrap();
        assert_eq!(split.below, ["a"]);
        assert_eq!(split.above, ["c"]);
        assert!(median_split(&values(&[("a", Some(7.0))])).is_err());
        assert!(median_split(&values(&[("a", Some(7.0)), ("b", None)])).is_err());
    }

    #[test]
    fn worked_four_unit_example() {
        let split = median_split(&values(&[
            ("u1", Some(1.0)),
            ("u2", Some(2.0)),
            ("u3", Some(3.0)),
            ("u4", Some(4.0)),
        ]))
        .unwrap();
        let base = preds(&[("u1", false), ("u2", true), ("u3", true), ("u4", true)]);
        let other = preds(&[("u1", false), ("u2", true), ("u3", false), ("u4", false)]);
        let report = slice_errors("demo", &split, &base, &other).unwrap();
        assert_eq!(report.err_base_below, 0.5);
        assert_eq!(report.err_other_below, 0.5);
        assert_eq!(report.gap_below, 0.0);
        assert_eq!(report.err_base_above, 0.0);
        assert_eq!(report.err_other_above, 1.0);
        assert_eq!(report.gap_above, 1.0);
        assert_eq!(report.abs_stat, 1.0);
        assert_eq!(report.rel_stat, None);
        assert_eq!((report.n_below, report.n_above), (2, 2));
        assert_eq!(report.dropped, 0);
    }

    #[test]
    fn identical_prediction_sets_have_zero_gaps() {
        let split = median_split(&values(&[
            ("u1", Some(1.0)),
            ("u2", Some(2.0)),
            ("u3", Some(3.0)),
            ("u4", Some(4.0)),
        ]))
        .unwrap();
        let p = preds(&[("u1", false), ("u2", true), ("u3", true), ("u4", false)]);
        let report = slice_errors("demo", &split, &p, &p).unwrap();
        assert_eq!(report.gap_below, 0.0);
        assert_eq!(report.gap_above, 0.0);
        assert_eq!(report.abs_stat, 0.0);
    }

    #[test]
    fn uncovered_units_are_dropped_with_a_count() {
        let split = median_split(&values(&[
            ("u1", Some(1.0)),
            ("u2", Some(2.0)),
            ("u3", Some(3.0)),
            ("u4", Some(4.0)),
        ]))
        .unwrap();
        let base = preds(&[("u1", true), ("u2", true), ("u3", false), ("u4", true)]);
        let other = preds(&[("u1", false), ("u3", true), ("u4", true)]);
        let report = slice_errors("demo", &split, &base, &other).unwrap();
        assert_eq!(report.dropped, 1);
        assert_eq!((report.n_below, report.n_above), (1, 2));
    }

    #[test]
    fn disjoint_ids_error_as_empty_slice() {
        let split = median_split(&values(&[("u1", Some(1.0)), ("u2", Some(2.0))])).unwrap();
        let base = preds(&[("x", true)]);
        let other = preds(&[("y", false)]);
        assert!(matches!(
            slice_errors("demo", &split, &base, &other),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn tsv_and_table_render() {
        let split = median_split(&values(&[("u1", Some(1.0)), ("u2", Some(2.0))])).unwrap();
        let p = preds(&[("u1", true), ("u2", false)]);
        let report = slice_errors("m", &split, &p, &p).unwrap();
        let mut out = Vec::new();
        report.write_tsv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("metric\tmedian\t"));
        assert!(text.contains("\tundef"));
        let table = report.to_string();
        assert!(table.contains("abs"));
    }
}
