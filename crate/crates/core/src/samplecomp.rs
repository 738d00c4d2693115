//! Sample-complexity ratio: given a model's accuracy at each training
//! fraction and a competitor's full-data score, find the largest grid factor
//! `n` such that the model trained on `1/n` of the data still outperforms
//! the competitor (strictly). Returns 0 when no factor qualifies.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::fraction::GridFraction;
use crate::scalar::Real;

/// Accuracy (higher is better) per training fraction. Must contain the
/// full-data point; scores are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyCurve<T> {
    points: BTreeMap<GridFraction, T>,
}

impl<T: Real> AccuracyCurve<T> {
    pub fn from_points<I: IntoIterator<Item = (GridFraction, T)>>(points: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (fraction, score) in points {
            if !score.is_finite() {
                return Err(Error::invalid(format!(
                    "score at fraction {fraction} must be finite"
                )));
            }
            if map.insert(fraction, score).is_some() {
                return Err(Error::invalid(format!("duplicate fraction {fraction}")));
            }
        }
        if !map.contains_key(&GridFraction::Full) {
            return Err(Error::invalid("curve must contain the full-data point"));
        }
        Ok(Self { points: map })
    }

    pub fn get(&self, fraction: GridFraction) -> Option<T> {
        self.points.get(&fraction).copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Which reading of "largest n" to use (the grid may be non-monotone).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioSemantics {
    /// Largest `n` whose point qualifies, scanning from 256 down.
    #[default]
    LargestQualifying,
    /// Largest `n` such that every grid factor `m <= n` qualifies.
    LargestPrefix,
}

/// The Table-1 style ratio. A grid point is required only until the answer
/// is determined; reaching a missing point is a coverage error.
pub fn sample_complexity_ratio<T: Real>(
    curve_base: &AccuracyCurve<T>,
    score_other_full: T,
    semantics: RatioSemantics,
) -> Result<usize> {
    let score = |fraction: GridFraction| -> Result<T> {
        curve_base.get(fraction).ok_or_else(|| {
            Error::Alignment(format!("curve is missing the grid point {fraction}"))
        })
    };
    match semantics {
        RatioSemantics::LargestQualifying => {
            for fraction in GridFraction::ALL {
                // ascending fractions = descending n
                if score(fraction)? > score_other_full {
                    return Ok(fraction.denominator());
                }
            }
            Ok(0)
        }
        RatioSemantics::LargestPrefix => {
            let mut best = 0;
            for fraction in GridFraction::ALL.iter().rev() {
                // descending fractions = ascending n
                if score(*fraction)? > score_other_full {
                    best = fraction.denominator();
                } else {
                    break;
                }
            }
            Ok(best)
        }
    }
}

/// Parse a `fraction<TAB>score` curve file; fractions may be decimals or
/// `1/256`-style rationals.
pub fn parse_curve_tsv<T: Real, R: BufRead>(reader: R) -> Result<AccuracyCurve<T>> {
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (fraction, score) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "missing tab between fraction and score"))?;
        let fraction: GridFraction = fraction
            .parse()
            .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
        let score: f64 = score
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad score {score:?}")))?;
        points.push((fraction, T::from_f64(score).unwrap()));
    }
    AccuracyCurve::from_points(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn worked_curve() -> AccuracyCurve<f64> {
        AccuracyCurve::from_points([
            (GridFraction::F256, 70.0),
            (GridFraction::F64, 75.0),
            (GridFraction::F16, 80.0),
            (GridFraction::F4, 85.0),
            (GridFraction::Full, 90.0),
        ])
        .unwrap()
    }

    #[test]
    fn worked_example_returns_sixteen() {
        let n = sample_complexity_ratio(&worked_curve(), 78.0, RatioSemantics::default()).unwrap();
        assert_eq!(n, 16);
    }

    #[test]
    fn unbeatable_competitor_returns_zero() {
        let n = sample_complexity_ratio(&worked_curve(), 91.0, RatioSemantics::default()).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn equality_does_not_qualify() {
        // strictly "outperforms": a tie at 1/16 falls through to 1/4
        let n = sample_complexity_ratio(&worked_curve(), 80.0, RatioSemantics::default()).unwrap();
        assert_eq!(n, 4);
    }

    #[test]
    fn missing_point_errors_only_when_needed() {
        let partial = AccuracyCurve::from_points([
            (GridFraction::F256, 88.0),
            (GridFraction::F4, 85.0),
            (GridFraction::Full, 90.0),
        ])
        .unwrap();
        // 1/256 already qualifies; 1/64 never consulted
        assert_eq!(
            sample_complexity_ratio(&partial, 78.0, RatioSemantics::LargestQualifying).unwrap(),
            256
        );
        // now 1/256 fails and the scan reaches the 1/64 hole
        assert!(matches!(
            sample_complexity_ratio(&partial, 89.0, RatioSemantics::LargestQualifying),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn prefix_semantics_differ_on_non_monotone_curves() {
        let dip = AccuracyCurve::from_points([
            (GridFraction::F256, 83.0),
            (GridFraction::F64, 70.0),
            (GridFraction::F16, 80.0),
            (GridFraction::F4, 85.0),
            (GridFraction::Full, 90.0),
        ])
        .unwrap();
        let other = 78.0;
        assert_eq!(
            sample_complexity_ratio(&dip, other, RatioSemantics::LargestQualifying).unwrap(),
            256
        );
        assert_eq!(
            sample_complexity_ratio(&dip, other, RatioSemantics::LargestPrefix).unwrap(),
            16
        );
    }

    #[test]
    fn fuzzed_curves_match_exhaustive_scan_oracle() {
        use crate::detrng::KeyedRng;
        let mut rng = KeyedRng::new(404, 1);
        for _ in 0..1000 {
            let points: Vec<(GridFraction, f64)> = GridFraction::ALL
                .iter()
                .map(|&f| (f, (rng.next_unit() * 100.0 * 8.0).round() / 8.0))
                .collect();
            let curve = AccuracyCurve::from_points(points.clone()).unwrap();
            let other = (rng.next_unit() * 100.0 * 8.0).round() / 8.0;

            // independent oracle: enumerate all candidates, keep the max
            let oracle = points
                .iter()
                .filter(|(_, s)| *s > other)
                .map(|(f, _)| f.denominator())
                .max()
                .unwrap_or(0);
            let got =
                sample_complexity_ratio(&curve, other, RatioSemantics::LargestQualifying).unwrap();
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn result_is_antitone_in_competitor_score() {
        use crate::detrng::KeyedRng;
        let mut rng = KeyedRng::new(405, 1);
        for _ in 0..300 {
            let curve = AccuracyCurve::from_points(
                GridFraction::ALL.map(|f| (f, rng.next_unit() * 100.0)),
            )
            .unwrap();
            let mut a = rng.next_unit() * 100.0;
            let mut b = rng.next_unit() * 100.0;
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let na = sample_complexity_ratio(&curve, a, RatioSemantics::LargestQualifying).unwrap();
            let nb = sample_complexity_ratio(&curve, b, RatioSemantics::LargestQualifying).unwrap();
            assert!(nb <= na, "score {a} -> {na}, score {b} -> {nb}");
        }
    }

    #[test]
    fn curve_tsv_accepts_rationals_and_decimals() {
        let text = "1/256\t70\n1/64\t75\n0.0625\t80\n1/4\t85\n1\t90\n";
        let curve = parse_curve_tsv::<f64, _>(Cursor::new(text)).unwrap();
        assert_eq!(curve, worked_curve());
        assert!(parse_curve_tsv::<f64, _>(Cursor::new("1/3\t50\n")).is_err());
        assert!(parse_curve_tsv::<f64, _>(Cursor::new("1/4\t50\n")).is_err());
    }
}
