//! Extended non-negative reals used for periods and rotation numbers.
//!
//! Critical orbits carry exact `0` and `+inf` rotation numbers. These are kept
//! as sentinels rather than floats so callers have to branch on them.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    /// Exactly zero (not a small float).
    Zero,
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn is_zero_exact(&self) -> bool {
        matches!(self, ExtReal::Zero)
    }

    /// Float view for plotting and tolerant comparisons; `Infinity` maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtReal::Zero => 0.0,
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    /// Ratio `num / den` of two positive extended reals, `None` when undefined (inf/inf).
    pub fn ratio(num: ExtReal, den: ExtReal) -> Option<ExtReal> {
        use ExtReal::*;
        match (num, den) {
            (Infinity, Infinity) | (Zero, Zero) => None,
            (Infinity, _) | (_, Zero) => Some(Infinity),
            (_, Infinity) | (Zero, _) => Some(Zero),
            (Finite(a), Finite(b)) => Some(Finite(a / b)),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Zero => write!(f, "0-exact"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl serde::Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinels_format_distinctly() {
        assert_eq!(ExtReal::Infinity.to_string(), "inf");
        assert_eq!(ExtReal::Zero.to_string(), "0-exact");
        assert_eq!(ExtReal::Finite(0.5).to_string(), "0.5");
    }

    #[test]
    fn ratio_branches_on_sentinels() {
        let one = ExtReal::Finite(1.0);
        assert_eq!(ExtReal::ratio(ExtReal::Infinity, one), Some(ExtReal::Infinity));
        assert_eq!(ExtReal::ratio(one, ExtReal::Infinity), Some(ExtReal::Zero));
        assert_eq!(ExtReal::ratio(ExtReal::Infinity, ExtReal::Infinity), None);
        assert_eq!(ExtReal::ratio(ExtReal::Finite(3.0), ExtReal::Finite(2.0)), Some(ExtReal::Finite(1.5)));
    }
}
