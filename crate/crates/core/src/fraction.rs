//! The five-point training-fraction grid `{1/256, 1/64, 1/16, 1/4, 1}`.
//!
//! Shared by the subsample-and-replicate protocol (which consumes a fraction)
//! and the sample-complexity ratio (which scans the reciprocals as candidate
//! data-reduction factors).

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridFraction {
    /// 1/256
    F256,
    /// 1/64
    F64,
    /// 1/16
    F16,
    /// 1/4
    F4,
    /// 1 (full data)
    Full,
}

impl GridFraction {
    /// All grid fractions in increasing order.
    pub const ALL: [GridFraction; 5] = [
        GridFraction::F256,
        GridFraction::F64,
        GridFraction::F16,
        GridFraction::F4,
        GridFraction::Full,
    ];

    /// The reciprocal `1/c`, i.e. the replication factor.
    pub fn denominator(self) -> usize {
        match self {
            GridFraction::F256 => 256,
            GridFraction::F64 => 64,
            GridFraction::F16 => 16,
            GridFraction::F4 => 4,
            GridFraction::Full => 1,
        }
    }

    pub fn value(self) -> f64 {
        1.0 / self.denominator() as f64
    }

    pub fn from_denominator(den: usize) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.denominator() == den)
    }
}

impl fmt::Display for GridFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridFraction::Full => write!(f, "1"),
            other => write!(f, "1/{}", other.denominator()),
        }
    }
}

impl FromStr for GridFraction {
    type Err = Error;

    /// Accepts `"1/256"`-style rationals and exact decimal values
    /// (`"0.25"`, `"1"`, ...).
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            if num.trim() == "1" {
                if let Ok(den) = den.trim().parse::<usize>() {
                    if let Some(f) = Self::from_denominator(den) {
                        return Ok(f);
                    }
                }
            }
        } else if let Ok(v) = s.parse::<f64>() {
            for f in Self::ALL {
                if v == f.value() {
                    return Ok(f);
                }
            }
        }
        Err(Error::invalid(format!(
            "fraction {s:?} is not one of 1/256, 1/64, 1/16, 1/4, 1"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_and_decimal_forms() {
        assert_eq!("1/256".parse::<GridFraction>().unwrap(), GridFraction::F256);
        assert_eq!("0.25".parse::<GridFraction>().unwrap(), GridFraction::F4);
        assert_eq!("1".parse::<GridFraction>().unwrap(), GridFraction::Full);
        assert_eq!("1.0".parse::<GridFraction>().unwrap(), GridFraction::Full);
        assert_eq!(
            "0.00390625".parse::<GridFraction>().unwrap(),
            GridFraction::F256
        );
        assert!("1/3".parse::<GridFraction>().is_err());
        assert!("0.3".parse::<GridFraction>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for f in GridFraction::ALL {
            assert_eq!(f.to_string().parse::<GridFraction>().unwrap(), f);
        }
    }
}
