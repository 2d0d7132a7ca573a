//! Inverse symbolization: symbols back to denormalized center tuples, integer
//! lengths via rounding-error redistribution, and polygonal-chain
//! reconstruction for both variants.

use crate::error::{Error, Result};
use crate::model::{AbbaModel, SymbolSequence};
use crate::types::{TimeSeries, Variant};

/// Replaces each symbol with its denormalized center `(len, second)`,
/// preserving order. An unknown symbol is reported with its position; this is
/// the channel by which a predictor's hallucinated token is caught.
pub fn inverse_digitize(model: &AbbaModel, symbols: &SymbolSequence) -> Result<Vec<(f64, f64)>> {
    symbols
        .iter()
        .enumerate()
        .map(|(position, symbol)| {
            let rank = model
                .center_for_symbol(symbol)
                .ok_or_else(|| Error::UnknownSymbol {
                    symbol: symbol.to_string(),
                    position,
                })?;
            Ok(model.denormalized_center(rank))
        })
        .collect()
}

/// Carry-forward rounding of real-valued lengths to positive integers.
///
/// Each length is rounded together with the running error, half-way values to
/// even; a result below 1 is clamped to 1 and the clamp is charged to the
/// carry so accumulated lengths stay aligned.
pub fn round_lengths(real_lengths: &[f64]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(real_lengths.len());
    let mut carry = 0.0;
    for (index, &len) in real_lengths.iter().enumerate() {
        if len <= 0.0 || !len.is_finite() {
            return Err(Error::NonPositiveLength { index, value: len });
        }
        let target = len + carry;
        let mut rounded = target.round_ties_even();
        if rounded < 1.0 {
            rounded = 1.0;
        }
        carry = target - rounded;
        out.push(rounded as usize);
    }
    Ok(out)
}

/// The integer-length pieces a symbol sequence decodes to.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedPieces {
    pub lens: Vec<usize>,
    pub seconds: Vec<f64>,
    pub t0: f64,
}

/// Decodes symbols into rounded-length pieces anchored at `t0`.
pub fn inverse_pieces(
    model: &AbbaModel,
    symbols: &SymbolSequence,
    t0: f64,
) -> Result<ReconstructedPieces> {
    let decoded = inverse_digitize(model, symbols)?;
    let real_lens: Vec<f64> = decoded.iter().map(|&(len, _)| len).collect();
    let lens = round_lengths(&real_lens)?;
    let seconds = decoded.iter().map(|&(_, second)| second).collect();
    Ok(ReconstructedPieces { lens, seconds, t0 })
}

/// Linear interpolation from `t0` through the breakpoints
/// `(cumulative length_j, value_j)`; breakpoint samples are pinned.
fn chain_through(t0: f64, lens: &[usize], values: &[f64]) -> Vec<f64> {
    let total: usize = lens.iter().sum();
    let mut out = Vec::with_capacity(total + 1);
    out.push(t0);
    let mut prev = t0;
    for (&len, &next) in lens.iter().zip(values) {
        let span = len as f64;
        for step in 1..len {
            out.push(prev + (next - prev) * step as f64 / span);
        }
        out.push(next);
        prev = next;
    }
    out
}

fn breakpoint_values(variant: Variant, t0: f64, seconds: &[f64]) -> Vec<f64> {
    match variant {
        Variant::Apca => {
            let mut acc = t0;
            seconds
                .iter()
                .map(|&inc| {
                    acc += inc;
                    acc
                })
                .collect()
        }
        Variant::Fapca => seconds.to_vec(),
    }
}

/// Reconstructs a numerical series from symbols. APCA breakpoints accumulate
/// increments from `t0`; FAPCA breakpoints take the decoded value directly,
/// independent of all preceding symbols. Output length is one plus the sum of
/// the rounded lengths.
pub fn inverse_symbolize(
    model: &AbbaModel,
    symbols: &SymbolSequence,
    t0: f64,
) -> Result<TimeSeries> {
    let pieces = inverse_pieces(model, symbols, t0)?;
    let values = breakpoint_values(model.variant, t0, &pieces.seconds);
    TimeSeries::new(chain_through(t0, &pieces.lens, &values))
}

/// How a single-symbol substitution propagates through reconstruction, under
/// both chain encodings of the same decoded pieces.
///
/// The increment encoding accumulates the perturbed second coordinate into
/// every later breakpoint; the fixed-point encoding pins later breakpoints to
/// their own decoded values. Drift vectors are indexed by piece ordinal; only
/// entries after the perturbed position are meaningful for drift analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub position: usize,
    /// Change in the decoded second coordinate at `position`.
    pub second_delta: f64,
    /// Per-breakpoint |value difference| when seconds act as increments.
    pub apca_style_drift: Vec<f64>,
    /// Per-breakpoint |value difference| when breakpoint values are pinned.
    pub fapca_style_drift: Vec<f64>,
    /// Breakpoint index displacement caused by the changed rounded length.
    pub index_shift: Vec<i64>,
    /// Max pointwise reconstruction deviation, increment-encoded chain.
    pub apca_max_deviation: f64,
    /// Max pointwise reconstruction deviation, fixed-point chain.
    pub fapca_max_deviation: f64,
}

/// Reconstructs the original and singly-perturbed sequences and reports the
/// per-breakpoint deviation between them under both encodings.
pub fn perturb_and_compare(
    model: &AbbaModel,
    symbols: &SymbolSequence,
    position: usize,
    replacement: &str,
    t0: f64,
) -> Result<PerturbationReport> {
    if position >= symbols.len() {
        return Err(Error::InvalidPosition {
            position,
            len: symbols.len(),
        });
    }
    if model.center_for_symbol(replacement).is_none() {
        return Err(Error::UnknownSymbol {
            symbol: replacement.to_string(),
            position,
        });
    }
    let mut perturbed_symbols: Vec<String> = symbols.iter().map(str::to_string).collect();
    perturbed_symbols[position] = replacement.to_string();
    let perturbed_symbols = SymbolSequence::new(perturbed_symbols);

    let original = inverse_pieces(model, symbols, t0)?;
    let perturbed = inverse_pieces(model, &perturbed_symbols, t0)?;
    let second_delta = perturbed.seconds[position] - original.seconds[position];

    // Increment view of the decoded seconds: identical sequences except for
    // a single increment changed by `second_delta`.
    let incs_orig: Vec<f64> = match model.variant {
        Variant::Apca => original.seconds.clone(),
        Variant::Fapca => {
            let mut prev = t0;
            original
                .seconds
                .iter()
                .map(|&v| {
                    let inc = v - prev;
                    prev = v;
                    inc
                })
                .collect()
        }
    };
    let mut incs_pert = incs_orig.clone();
    incs_pert[position] += second_delta;

    // Pinned-value view: identical except at the perturbed breakpoint.
    let vals_orig = breakpoint_values(model.variant, t0, &original.seconds);
    let mut vals_pert = vals_orig.clone();
    vals_pert[position] += second_delta;

    let cum_orig = breakpoint_values(Variant::Apca, t0, &incs_orig);
    let cum_pert = breakpoint_values(Variant::Apca, t0, &incs_pert);
    let apca_style_drift: Vec<f64> = cum_orig
        .iter()
        .zip(&cum_pert)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let fapca_style_drift: Vec<f64> = vals_orig
        .iter()
        .zip(&vals_pert)
        .map(|(a, b)| (a - b).abs())
        .collect();

    let mut shift = 0i64;
    let index_shift: Vec<i64> = original
        .lens
        .iter()
        .zip(&perturbed.lens)
        .map(|(&a, &b)| {
            shift += b as i64 - a as i64;
            shift
        })
        .collect();

    let apca_max_deviation = max_pointwise_deviation(
        &chain_through(t0, &original.lens, &cum_orig),
        &chain_through(t0, &perturbed.lens, &cum_pert),
    );
    let fapca_max_deviation = max_pointwise_deviation(
        &chain_through(t0, &original.lens, &vals_orig),
        &chain_through(t0, &perturbed.lens, &vals_pert),
    );

    Ok(PerturbationReport {
        position,
        second_delta,
        apca_style_drift,
        fapca_style_drift,
        index_shift,
        apca_max_deviation,
        fapca_max_deviation,
    })
}

fn max_pointwise_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::{compress_apca, compress_fapca, reconstruct_chain};
    use crate::digitization::{fit_default_alphabet, DigitizerParams, FitInput, FitOutput};
    use crate::types::TimeSeries;

    fn fit_series(values: &[f64], variant: Variant, tol: f64, alpha: f64, scl: f64) -> FitOutput {
        let series = TimeSeries::new(values.to_vec()).unwrap();
        let result = match variant {
            Variant::Apca => compress_apca(&series, tol).unwrap(),
            Variant::Fapca => compress_fapca(&series, tol).unwrap(),
        };
        let input = FitInput {
            results: vec![result],
            scl,
            digitizer: DigitizerParams::Greedy { alpha },
        };
        fit_default_alphabet(&input).unwrap()
    }

    #[test]
    fn singleton_centers_decode_to_original_pieces() {
        let out = fit_series(&[0.0, 1.0, 2.0, 1.0, 0.0], Variant::Apca, 0.1, 0.5, 1.0);
        let decoded = inverse_digitize(&out.model, &out.sequences[0]).unwrap();
        assert_eq!(decoded.len(), 2);
        for (got, want) in decoded.iter().zip([(2.0, 2.0), (2.0, -2.0)]) {
            assert!((got.0 - want.0).abs() < 1e-12);
            assert!((got.1 - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_sequence_decodes_to_empty_list() {
        let out = fit_series(&[0.0, 1.0, 2.0, 1.0, 0.0], Variant::Apca, 0.1, 0.5, 1.0);
        let decoded = inverse_digitize(&out.model, &SymbolSequence::new(vec![])).unwrap();
        assert!(decoded.is_empty());
    }

    #[test]
    fn unknown_symbol_reports_position() {
        let out = fit_series(&[0.0, 1.0, 2.0, 1.0, 0.0], Variant::Apca, 0.1, 0.5, 1.0);
        let seq = SymbolSequence::from_strs(["a", "z"]);
        match inverse_digitize(&out.model, &seq).unwrap_err() {
            Error::UnknownSymbol { symbol, position } => {
                assert_eq!(symbol, "z");
                assert_eq!(position, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn carry_forward_rounding_redistributes() {
        // Stepwise: round(1.4)=1 carry 0.4; round(1.8)=2 carry -0.2;
        // round(1.2)=1.
        assert_eq!(round_lengths(&[1.4, 1.4, 1.4]).unwrap(), vec![1, 2, 1]);
        assert_eq!(round_lengths(&[2.0, 3.0]).unwrap(), vec![2, 3]);
    }

    #[test]
    fn clamping_keeps_lengths_positive() {
        // Direct simulation of the rule: every entry rounds to zero or
        // below once the carry goes negative, so each is clamped to 1.
        let lens = round_lengths(&[0.4, 0.4, 0.4, 0.4, 0.4]).unwrap();
        assert_eq!(lens, vec![1, 1, 1, 1, 1]);
        assert!(lens.iter().all(|&l| l >= 1));
    }

    #[test]
    fn ties_round_to_even() {
        assert_eq!(round_lengths(&[1.5, 2.0]).unwrap(), vec![2, 2]);
        assert_eq!(round_lengths(&[2.5]).unwrap(), vec![2]);
    }

    #[test]
    fn rejects_non_positive_lengths() {
        assert!(matches!(
            round_lengths(&[1.0, 0.0]),
            Err(Error::NonPositiveLength { index: 1, .. })
        ));
        assert!(round_lengths(&[-0.5]).is_err());
    }

    #[test]
    fn cumulative_sum_is_preserved_absent_clamping() {
        let reals = [1.4, 2.7, 3.3, 1.9, 4.2];
        let lens = round_lengths(&reals).unwrap();
        let total_real: f64 = reals.iter().sum();
        let total: usize = lens.iter().sum();
        assert!((total as f64 - total_real).abs() <= 0.5);
    }

    #[test]
    fn apca_round_trip_is_lossless_with_singleton_clusters() {
        let values = [0.0, 1.0, 2.0, 1.0, 0.0];
        let out = fit_series(&values, Variant::Apca, 0.1, 0.5, 1.0);
        let rec = inverse_symbolize(&out.model, &out.sequences[0], 0.0).unwrap();
        assert_eq!(rec.values(), &values);
    }

    #[test]
    fn fapca_round_trip_pins_the_chain() {
        let values = [0.0, 1.0, 2.0, 1.0, 0.0];
        let out = fit_series(&values, Variant::Fapca, 0.1, 0.5, 1.0);
        let rec = inverse_symbolize(&out.model, &out.sequences[0], 0.0).unwrap();
        assert_eq!(rec.values(), &values);
    }

    #[test]
    fn single_symbol_reconstructs_a_ramp() {
        let out = fit_series(&[0.0, 1.0, 2.0, 3.0, 4.0], Variant::Apca, 0.5, 0.5, 1.0);
        let rec = inverse_symbolize(&out.model, &out.sequences[0], 0.0).unwrap();
        assert_eq!(rec.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn empty_sequence_reconstructs_to_the_anchor() {
        let out = fit_series(&[0.0, 1.0, 2.0, 1.0, 0.0], Variant::Apca, 0.1, 0.5, 1.0);
        let rec = inverse_symbolize(&out.model, &SymbolSequence::new(vec![]), 7.5).unwrap();
        assert_eq!(rec.values(), &[7.5]);
    }

    #[test]
    fn endpoint_cancellation_after_unperturbed_fit() {
        // Deviations from cluster means telescope to zero over the whole
        // sequence, so the final breakpoint lands back on the last sample.
        let values: Vec<f64> = (0..120)
            .map(|i| {
                let x = i as f64;
                (x * 0.21).sin() * 1.8 + (x * 0.043).cos() * 0.7
            })
            .collect();
        let out = fit_series(&values, Variant::Apca, 0.15, 0.6, 1.0);
        let rec = inverse_symbolize(&out.model, &out.sequences[0], values[0]).unwrap();
        let n = values.len();
        let end_index = rec.len() - 1;
        assert!(
            (end_index as i64 - (n as i64 - 1)).abs() <= 1,
            "index {end_index} vs {}",
            n - 1
        );
        let last = *rec.values().last().unwrap();
        assert!(
            (last - values[n - 1]).abs() <= 1e-9,
            "value {last} vs {}",
            values[n - 1]
        );
    }

    #[test]
    fn apca_perturbation_shifts_every_later_breakpoint() {
        let out = fit_series(&[0.0, 1.0, 2.0, 1.0, 0.0], Variant::Apca, 0.1, 0.5, 1.0);
        let report = perturb_and_compare(&out.model, &out.sequences[0], 0, "b", 0.0).unwrap();
        let delta = report.second_delta.abs();
        assert!(delta > 0.0);
        for &drift in &report.apca_style_drift {
            assert!((drift - delta).abs() <= 1e-12);
        }
        // Pinned encoding confines the error to the perturbed breakpoint.
        assert_eq!(report.fapca_style_drift[1], 0.0);
    }

    #[test]
    fn fapca_perturbation_leaves_later_breakpoints_untouched() {
        let values: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin()).collect();
        let out = fit_series(&values, Variant::Fapca, 0.1, 0.8, 1.0);
        let seq = &out.sequences[0];
        assert!(seq.len() >= 3, "need interior symbols, got {}", seq.len());
        let position = 1;
        let replacement = seq
            .iter()
            .find(|&s| s != seq.get(position).unwrap())
            .unwrap()
            .to_string();
        let report =
            perturb_and_compare(&out.model, seq, position, &replacement, values[0]).unwrap();
        for &drift in &report.fapca_style_drift[position + 1..] {
            assert_eq!(drift, 0.0);
        }
        assert!(report.fapca_max_deviation <= report.apca_max_deviation);
    }

    #[test]
    fn perturb_validates_position_and_replacement() {
        let out = fit_series(&[0.0, 1.0, 2.0, 1.0, 0.0], Variant::Apca, 0.1, 0.5, 1.0);
        assert!(matches!(
            perturb_and_compare(&out.model, &out.sequences[0], 9, "a", 0.0),
            Err(Error::InvalidPosition { position: 9, .. })
        ));
        assert!(matches!(
            perturb_and_compare(&out.model, &out.sequences[0], 0, "z", 0.0),
            Err(Error::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn lossless_limit_matches_the_compression_chain() {
        let values: Vec<f64> = (0..80)
            .map(|i| (i as f64 * 0.3).sin() + 0.01 * i as f64)
            .collect();
        let series = TimeSeries::new(values.clone()).unwrap();
        let result = compress_apca(&series, 0.2).unwrap();
        let chain = reconstruct_chain(&result);

        // Alpha below the minimum pairwise scaled-tuple distance forces
        // singleton clusters.
        let (tuples, _) = crate::digitization::scale_tuples(&result.pieces, 1.0).unwrap();
        let mut min_dist = f64::INFINITY;
        for i in 0..tuples.len() {
            for j in i + 1..tuples.len() {
                let d = tuples[i].dist_sq(tuples[j]).sqrt();
                if d > 0.0 {
                    min_dist = min_dist.min(d);
                }
            }
        }
        let input = FitInput {
            results: vec![result],
            scl: 1.0,
            digitizer: DigitizerParams::Greedy {
                alpha: min_dist * 0.5,
            },
        };
        let out = fit_default_alphabet(&input).unwrap();
        let rec = inverse_symbolize(&out.model, &out.sequences[0], values[0]).unwrap();
        assert_eq!(rec.len(), chain.len());
        for (a, b) in rec.values().iter().zip(chain.values()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}
