//! Adaptive piecewise linear continuous approximation.
//!
//! A series is greedily partitioned into pieces. Each piece is the chord from
//! its start sample to its end sample, extended one index at a time for as
//! long as the squared deviation of the interior samples from the chord stays
//! within `(len - 1) * tol^2`. The fixed-point variant uses the identical
//! partition but records endpoint values instead of increments.

use crate::error::{Error, Result};
use crate::types::{Piece, TimeSeries, Variant};

/// The output of compression: the piece list plus everything needed to
/// rebuild the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub variant: Variant,
    pub pieces: Vec<Piece>,
    /// First sample of the original series.
    pub t0: f64,
    /// Original series length; the piece lengths sum to `n - 1`.
    pub n: usize,
    /// Tolerance the partition was computed with.
    pub tol: f64,
}

impl CompressionResult {
    /// Breakpoint indices `i_1..i_N` (the implicit `i_0 = 0` is omitted).
    pub fn breakpoints(&self) -> Vec<usize> {
        let mut acc = 0;
        self.pieces
            .iter()
            .map(|p| {
                acc += p.len;
                acc
            })
            .collect()
    }
}

/// Squared chord residual for the span `values[start..=end]`, summed over a
/// single pass with running moments. `a` and `b` must hold
/// `sum((t[start+q] - t[start])^2)` and `sum(q * (t[start+q] - t[start]))`
/// for `q = 1..=end-start`.
#[inline]
fn chord_residual(a: f64, b: f64, end_dev: f64, d: f64) -> f64 {
    let slope = end_dev / d;
    let sq_sum = d * (d + 1.0) * (2.0 * d + 1.0) / 6.0;
    a - 2.0 * slope * b + slope * slope * sq_sum
}

/// Direct evaluation of the partition criterion for `values[start..=end]`.
///
/// This is the quadratic-time formula the incremental scan must agree with;
/// it doubles as an independent check in tests.
pub fn piece_criterion_holds(values: &[f64], start: usize, end: usize, tol: f64) -> bool {
    let d = (end - start) as f64;
    let ts = values[start];
    let te = values[end];
    let mut residual = 0.0;
    for (q, &t) in values[start..=end].iter().enumerate() {
        let fitted = ts + (te - ts) * q as f64 / d;
        let r = fitted - t;
        residual += r * r;
    }
    residual <= (d - 1.0) * tol * tol
}

/// Greedy partition of `values` into maximal chord pieces; returns breakpoint
/// indices after 0.
#[allow(clippy::needless_range_loop)]
fn partition(values: &[f64], tol: f64) -> Vec<usize> {
    let n = values.len();
    let tol_sq = tol * tol;
    let mut breaks = Vec::new();
    let mut start = 0;
    while start < n - 1 {
        let ts = values[start];
        // A one-step piece has no interior samples and always fits.
        let first_dev = values[start + 1] - ts;
        let mut a = first_dev * first_dev;
        let mut b = first_dev;
        let mut end = start + 1;
        for cand in start + 2..n {
            let d = (cand - start) as f64;
            let dev = values[cand] - ts;
            a += dev * dev;
            b += d * dev;
            if chord_residual(a, b, dev, d) <= (d - 1.0) * tol_sq {
                end = cand;
            } else {
                break;
            }
        }
        breaks.push(end);
        start = end;
    }
    breaks
}

fn compress(series: &TimeSeries, tol: f64, variant: Variant) -> Result<CompressionResult> {
    let values = series.values();
    if values.len() < 2 {
        return Err(Error::SeriesTooShort(values.len()));
    }
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidTolerance(tol));
    }
    let breaks = partition(values, tol);
    let mut pieces = Vec::with_capacity(breaks.len());
    let mut prev = 0;
    for &bp in &breaks {
        let second = match variant {
            Variant::Apca => values[bp] - values[prev],
            Variant::Fapca => values[bp],
        };
        pieces.push(Piece::new(bp - prev, second));
        prev = bp;
    }
    Ok(CompressionResult {
        variant,
        pieces,
        t0: values[0],
        n: values.len(),
        tol,
    })
}

/// Compresses `series` into `(len, increment)` pieces.
pub fn compress_apca(series: &TimeSeries, tol: f64) -> Result<CompressionResult> {
    compress(series, tol, Variant::Apca)
}

/// Compresses `series` into `(len, endpoint value)` pieces. The partition is
/// identical to [`compress_apca`] on the same input.
pub fn compress_fapca(series: &TimeSeries, tol: f64) -> Result<CompressionResult> {
    compress(series, tol, Variant::Fapca)
}

/// Rebuilds the polygonal chain by linear interpolation through the
/// breakpoints. Breakpoint samples are written directly, so knots are pinned
/// rather than re-derived from interpolation arithmetic.
pub fn reconstruct_chain(result: &CompressionResult) -> TimeSeries {
    let mut out = Vec::with_capacity(result.n);
    out.push(result.t0);
    let mut prev = result.t0;
    for piece in &result.pieces {
        let next = match result.variant {
            Variant::Apca => prev + piece.second,
            Variant::Fapca => piece.second,
        };
        let span = piece.len as f64;
        for step in 1..piece.len {
            out.push(prev + (next - prev) * step as f64 / span);
        }
        out.push(next);
        prev = next;
    }
    TimeSeries::new(out).expect("finite pieces reconstruct to finite samples")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> TimeSeries {
        TimeSeries::new(values.to_vec()).unwrap()
    }

    fn pieces_of(result: &CompressionResult) -> Vec<(usize, f64)> {
        result.pieces.iter().map(|p| (p.len, p.second)).collect()
    }

    #[test]
    fn apca_splits_the_triangle() {
        // Expected partition checked against piece_criterion_holds over every
        // candidate extension below.
        let s = series(&[0.0, 1.0, 2.0, 1.0, 0.0]);
        let r = compress_apca(&s, 0.1).unwrap();
        assert_eq!(pieces_of(&r), vec![(2, 2.0), (2, -2.0)]);
        // Direct evaluation: the first piece cannot stretch to index 3.
        assert!(piece_criterion_holds(s.values(), 0, 2, 0.1));
        assert!(!piece_criterion_holds(s.values(), 0, 3, 0.1));
        assert!(piece_criterion_holds(s.values(), 2, 4, 0.1));
    }

    #[test]
    fn exact_line_is_a_single_piece() {
        let s = series(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        for tol in [1e-9, 0.1, 10.0] {
            let r = compress_apca(&s, tol).unwrap();
            assert_eq!(pieces_of(&r), vec![(4, 4.0)]);
        }
    }

    #[test]
    fn constant_series_is_a_single_piece() {
        let r = compress_apca(&series(&[5.0, 5.0, 5.0]), 0.3).unwrap();
        assert_eq!(pieces_of(&r), vec![(2, 0.0)]);
    }

    #[test]
    fn fapca_stores_endpoint_values() {
        let s = series(&[0.0, 1.0, 2.0, 1.0, 0.0]);
        let r = compress_fapca(&s, 0.1).unwrap();
        assert_eq!(pieces_of(&r), vec![(2, 2.0), (2, 0.0)]);
        let line = compress_fapca(&series(&[0.0, 1.0, 2.0, 3.0, 4.0]), 0.5).unwrap();
        assert_eq!(pieces_of(&line), vec![(4, 4.0)]);
    }

    #[test]
    fn piece_lengths_sum_to_n_minus_one() {
        let s = series(&[0.0, 0.4, 1.3, 0.9, 2.0, 2.2, 1.0]);
        let r = compress_apca(&s, 0.2).unwrap();
        let total: usize = r.pieces.iter().map(|p| p.len).sum();
        assert_eq!(total, s.len() - 1);
    }

    #[test]
    fn reconstruct_interpolates_breakpoints() {
        let r = CompressionResult {
            variant: Variant::Apca,
            pieces: vec![Piece::new(2, 2.0), Piece::new(2, -2.0)],
            t0: 0.0,
            n: 5,
            tol: 0.1,
        };
        assert_eq!(reconstruct_chain(&r).values(), &[0.0, 1.0, 2.0, 1.0, 0.0]);

        let single = CompressionResult {
            variant: Variant::Apca,
            pieces: vec![Piece::new(4, 4.0)],
            t0: 0.0,
            n: 5,
            tol: 0.1,
        };
        assert_eq!(
            reconstruct_chain(&single).values(),
            &[0.0, 1.0, 2.0, 3.0, 4.0]
        );
    }

    #[test]
    fn round_trip_pins_breakpoint_samples() {
        let s = series(&[0.3, -0.9, 1.7, 2.4, 2.2, 0.1, -1.5, 0.0]);
        let r = compress_apca(&s, 0.4).unwrap();
        let rec = reconstruct_chain(&r);
        assert_eq!(rec.len(), s.len());
        let mut idx = 0;
        for (bp, piece) in r.breakpoints().iter().zip(&r.pieces) {
            idx += piece.len;
            assert_eq!(idx, *bp);
            let original = s.values()[*bp];
            assert!(
                (rec.values()[*bp] - original).abs() <= 1e-12 * original.abs().max(1.0),
                "breakpoint {bp} drifted"
            );
        }
    }

    #[test]
    fn rejects_short_and_bad_tolerance() {
        assert!(matches!(
            compress_apca(&series(&[1.0]), 0.1),
            Err(Error::SeriesTooShort(1))
        ));
        assert!(matches!(
            compress_apca(&series(&[1.0, 2.0]), 0.0),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(compress_apca(&series(&[1.0, 2.0]), -1.0).is_err());
    }

    #[test]
    fn error_bound_holds_on_the_triangle() {
        let s = series(&[0.0, 1.0, 2.0, 1.0, 0.0]);
        let r = compress_apca(&s, 0.1).unwrap();
        let rec = reconstruct_chain(&r);
        let err_sq: f64 = s
            .values()
            .iter()
            .zip(rec.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let n = s.len();
        let k = r.pieces.len();
        assert!(err_sq <= (n - 1 - k) as f64 * 0.1 * 0.1);
        assert_eq!(err_sq, 0.0);
    }
}
