//! Domain types shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which quantity the second coordinate of a [`Piece`] carries.
///
/// `Apca` pieces store the value increment across the piece, so the chain is
/// recovered by accumulation from the first sample. `Fapca` pieces store the
/// value at the piece's endpoint, pinning every breakpoint against errors in
/// preceding symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Apca,
    Fapca,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Apca => "apca",
            Variant::Fapca => "fapca",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "apca" => Ok(Variant::Apca),
            "fapca" => Ok(Variant::Fapca),
            other => Err(Error::ModelJson(format!("unknown variant {other:?}"))),
        }
    }
}

/// An ordered sequence of finite real-valued samples at implicit indices
/// `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Wraps raw samples, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteSample { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// One polygonal-chain segment: an index span plus either the increment over
/// the span or the value at its endpoint, depending on [`Variant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    /// Number of index steps covered; always at least 1.
    pub len: usize,
    /// Increment (APCA) or endpoint value (FAPCA).
    pub second: f64,
}

impl Piece {
    pub fn new(len: usize, second: f64) -> Self {
        debug_assert!(len >= 1, "piece must span at least one index step");
        Self { len, second }
    }
}

/// A piece mapped into the normalized space clustering operates on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTuple {
    pub x: f64,
    pub y: f64,
}

impl ScaledTuple {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist_sq(self, other: ScaledTuple) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_samples() {
        let err = TimeSeries::new(vec![0.0, f64::NAN, 1.0]).unwrap_err();
        match err {
            Error::NonFiniteSample { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(TimeSeries::new(vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn variant_round_trips_through_str() {
        for v in [Variant::Apca, Variant::Fapca] {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("sax".parse::<Variant>().is_err());
    }
}
