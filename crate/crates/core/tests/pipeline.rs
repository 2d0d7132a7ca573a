//! End-to-end checks over a deterministic mixed corpus: partition agreement,
//! piece-count monotonicity, bound satisfaction after unperturbed fits, and
//! the alternating symbol structure of a pure sine.

mod common;

use abba_core::*;

#[test]
fn fapca_matches_apca_breakpoints_on_100_series() {
    for series in common::corpus(100, 11) {
        for tol in [0.05, 0.2] {
            let a = compress_apca(&series, tol).unwrap();
            let f = compress_fapca(&series, tol).unwrap();
            assert_eq!(a.breakpoints(), f.breakpoints());
        }
    }
}

#[test]
fn piece_count_never_drops_as_tol_shrinks() {
    for series in common::corpus(60, 23) {
        let mut last = usize::MAX;
        // Sweeping upward: larger tol must never need more pieces than any
        // smaller tol before it.
        for tol in [0.01, 0.1, 1.0] {
            let n = compress_apca(&series, tol).unwrap().pieces.len();
            assert!(
                n <= last,
                "tol {tol} produced {n} pieces after {last} at a smaller tol"
            );
            last = n;
        }
    }
}

#[test]
fn unperturbed_fits_satisfy_every_bound() {
    let corpus = common::corpus(40, 37);
    for (i, series) in corpus.iter().enumerate() {
        let tol = 0.1;
        let alpha = [0.1, 0.5, 1.0][i % 3];
        let result = compress_apca(series, tol).unwrap();
        let pieces = result.pieces.clone();
        let compression_report = check_compression_bound(series, &result);
        assert!(compression_report.satisfied, "{}", compression_report.table_row());

        let out = fit_default_alphabet(&FitInput {
            results: vec![result],
            scl: 1.0,
            digitizer: DigitizerParams::Greedy { alpha },
        })
        .unwrap();
        let reports = check_digitization_bounds(
            &out.tuples,
            &out.model.codebook.centers,
            &out.labels,
            alpha,
        );
        // The summed-deviation and SSE bounds hold by construction. The
        // per-tuple deviation from the mean center is only bounded by
        // (2*alpha)^2 — members sit within alpha of the group's starting
        // point and the mean drifts up to alpha from it — so the report can
        // legitimately flag the alpha^2 bound; assert the provable factor.
        assert!(reports[1].satisfied, "series {i}: {}", reports[1].table_row());
        assert!(reports[2].satisfied, "series {i}: {}", reports[2].table_row());
        assert!(
            reports[0].measured <= 4.0 * alpha * alpha * (1.0 + 1e-9),
            "series {i}: per-tuple deviation beyond the 2*alpha radius: {}",
            reports[0].table_row()
        );

        let profile = cumulative_error_profile(&out.model, &out.sequences[0], &pieces).unwrap();
        // Same 2x caveat per step for the cumulative shift rates.
        for report in &profile.reports {
            assert!(
                report.measured <= 2.0 * report.bound * (1.0 + 1e-9),
                "series {i}: {}",
                report.table_row()
            );
        }
    }
}

#[test]
fn transform_matches_fit_symbols_in_the_lossless_limit() {
    // With alpha below the minimum pairwise tuple distance every cluster is
    // a singleton, so membership labels and nearest-center assignment agree
    // exactly.
    for (i, series) in common::corpus(20, 51).iter().enumerate() {
        let result = compress_apca(series, 0.2).unwrap();
        let (tuples, _) = scale_tuples(&result.pieces, 1.0).unwrap();
        let mut min_dist_sq = f64::INFINITY;
        for a in 0..tuples.len() {
            for b in a + 1..tuples.len() {
                let d = tuples[a].dist_sq(tuples[b]);
                if d > 0.0 {
                    min_dist_sq = min_dist_sq.min(d);
                }
            }
        }
        let alpha = (min_dist_sq.sqrt() * 0.5).max(1e-12);
        let out = fit_default_alphabet(&FitInput {
            results: vec![result],
            scl: 1.0,
            digitizer: DigitizerParams::Greedy { alpha },
        })
        .unwrap();
        let again = transform(&out.model, series, 0.2).unwrap();
        assert_eq!(again, out.sequences[0], "series {i}");
    }
}

#[test]
fn pure_sine_symbols_alternate() {
    // Eight periods over 1,000 samples compress into 17 pieces; with four
    // symbols the interior strictly alternates between the two half-wave
    // clusters and the edge pieces take their own symbols.
    let sine = common::fig_sine();
    let result = compress_fapca(&sine, 0.2).unwrap();
    let out = fit_default_alphabet(&FitInput {
        results: vec![result],
        scl: 1.0,
        digitizer: DigitizerParams::Greedy { alpha: 0.5 },
    })
    .unwrap();
    let symbols: Vec<&str> = out.sequences[0].iter().collect();
    assert_eq!(symbols.len(), 17, "symbols: {symbols:?}");
    assert_eq!(out.model.k(), 4, "distinct symbol count");

    let interior = &symbols[1..16];
    let mut interior_set: Vec<&str> = interior.to_vec();
    interior_set.sort_unstable();
    interior_set.dedup();
    assert_eq!(interior_set.len(), 2, "interior alternates two symbols");
    for pair in interior.windows(2) {
        assert_ne!(pair[0], pair[1], "strict alternation");
    }
    assert!(!interior.contains(&symbols[0]), "leading symbol is unique");
    assert!(!interior.contains(&symbols[16]), "trailing symbol is unique");
}

#[test]
fn fixed_point_locality_holds_for_every_single_perturbation() {
    let sine = common::fig_sine();
    let result = compress_fapca(&sine, 0.2).unwrap();
    let out = fit_default_alphabet(&FitInput {
        results: vec![result],
        scl: 1.0,
        digitizer: DigitizerParams::Greedy { alpha: 0.5 },
    })
    .unwrap();
    let seq = &out.sequences[0];
    let symbols: Vec<String> = out.model.alphabet.symbols()[..out.model.k()].to_vec();
    for position in 0..seq.len() {
        for replacement in &symbols {
            let report =
                perturb_and_compare(&out.model, seq, position, replacement, sine.values()[0])
                    .unwrap();
            for (j, &drift) in report.fapca_style_drift.iter().enumerate() {
                if j != position {
                    assert_eq!(
                        drift, 0.0,
                        "pinned drift at piece {j} after perturbing {position} -> {replacement}"
                    );
                }
            }
        }
    }
}

#[test]
fn codebook_cardinalities_are_ranked() {
    for series in common::corpus(20, 63) {
        let result = compress_apca(&series, 0.15).unwrap();
        let out = fit_default_alphabet(&FitInput {
            results: vec![result],
            scl: 1.0,
            digitizer: DigitizerParams::Greedy { alpha: 0.4 },
        })
        .unwrap();
        for pair in out.model.codebook.cardinalities.windows(2) {
            assert!(pair[0] >= pair[1], "cardinalities out of rank order");
        }
        assert_eq!(
            out.model.codebook.cardinalities.iter().sum::<usize>(),
            out.tuples.len()
        );
    }
}

#[test]
fn lloyd_fits_cancel_deviations_too() {
    for (i, series) in common::corpus(12, 87).iter().enumerate() {
        let result = compress_apca(series, 0.2).unwrap();
        let (tuples, _) = scale_tuples(&result.pieces, 1.0).unwrap();
        let distinct = {
            let mut seen = std::collections::HashSet::new();
            for t in &tuples {
                seen.insert((t.x.to_bits(), t.y.to_bits()));
            }
            seen.len()
        };
        let k = distinct.min(6);
        let out = fit_default_alphabet(&FitInput {
            results: vec![result],
            scl: 1.0,
            digitizer: DigitizerParams::Lloyd {
                k,
                seed: i as u64,
            },
        })
        .unwrap();
        let reports = check_digitization_bounds(
            &out.tuples,
            &out.model.codebook.centers,
            &out.labels,
            f64::INFINITY,
        );
        assert!(
            reports[1].satisfied,
            "series {i}: {}",
            reports[1].table_row()
        );
    }
}

#[test]
fn sine_symbols_predict_exactly_after_one_period() {
    // The interior of the sine's symbol sequence is purely periodic; with an
    // order-3 context every interior symbol is recovered exactly. Only the
    // final edge piece is unpredictable.
    let sine = common::fig_sine();
    let result = compress_fapca(&sine, 0.2).unwrap();
    let out = fit_default_alphabet(&FitInput {
        results: vec![result],
        scl: 1.0,
        digitizer: DigitizerParams::Greedy { alpha: 0.5 },
    })
    .unwrap();
    let seq = &out.sequences[0];
    let ngram = ngram_fit(std::slice::from_ref(seq), 3, 0.1, &out.model.alphabet).unwrap();
    for position in 4..seq.len() - 1 {
        let prefix = SymbolSequence::from_strs(seq.iter().take(position).map(str::to_string));
        let predicted = ngram_predict(&ngram, &prefix, 1, PredictMode::Greedy).unwrap();
        assert_eq!(
            predicted.get(0),
            seq.get(position),
            "misprediction at piece {position}"
        );
    }
}

#[test]
fn forecasts_always_cover_the_horizon() {
    for series in common::corpus(12, 77) {
        if series.len() < 100 {
            continue;
        }
        let result = compress_fapca(&series, 0.3).unwrap();
        let out = fit_default_alphabet(&FitInput {
            results: vec![result],
            scl: 1.0,
            digitizer: DigitizerParams::Greedy { alpha: 0.8 },
        })
        .unwrap();
        let ngram = ngram_fit(&out.sequences, 3, 0.1, &out.model.alphabet).unwrap();
        for horizon in [1, 5, 24] {
            let fc = forecast(&out.model, &ngram, &series, horizon, 0.3).unwrap();
            assert_eq!(fc.len(), horizon);
        }
    }
}
