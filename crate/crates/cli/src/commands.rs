//! One function per subcommand. Everything prints to stdout; errors bubble up
//! as [`CliError`] with the exit code already decided.

use std::path::{Path, PathBuf};

use abba_core::{
    check_compression_bound, check_digitization_bounds, compress_apca, compress_fapca,
    cumulative_error_profile, evaluate_forecast, fit, fit_default_alphabet, fit_sized, forecast,
    inverse_symbolize, metrics, ngram_fit, perturb_and_compare, persistence_forecast, transform,
    zipf_csv, zipf_profile, AbbaModel, Alphabet, BoundReport, CompressionResult, Digitizer,
    DigitizerParams, FitInput, FitOutput, SampledNGram, SymbolSequence,
    TimeSeries, Variant,
};

use crate::io::{self, CliError, Result, SeriesFile};
use crate::{FitArgs, ForecastArgs, InverseArgs, PerturbArgs, RoundtripArgs, TransformArgs, ZipfArgs};

fn load_columns(path: &Path, znorm: bool) -> Result<SeriesFile> {
    let mut file = io::read_series_csv(path)?;
    if znorm {
        io::znorm(&mut file.columns);
    }
    Ok(file)
}

fn compress_column(values: &[f64], variant: Variant, tol: f64) -> Result<CompressionResult> {
    let series = TimeSeries::new(values.to_vec())?;
    let result = match variant {
        Variant::Apca => compress_apca(&series, tol)?,
        Variant::Fapca => compress_fapca(&series, tol)?,
    };
    Ok(result)
}

/// `builtin`, `ascii`, or a token file path.
enum AlphabetChoice {
    Builtin,
    Ascii,
    File(PathBuf),
}

fn alphabet_choice(raw: &str) -> AlphabetChoice {
    match raw {
        "builtin" => AlphabetChoice::Builtin,
        "ascii" => AlphabetChoice::Ascii,
        other => AlphabetChoice::File(PathBuf::from(other)),
    }
}

fn run_fit(input: FitInput, choice: &AlphabetChoice) -> Result<FitOutput> {
    match choice {
        AlphabetChoice::Builtin => fit_default_alphabet(&input).map_err(CliError::from),
        AlphabetChoice::Ascii => {
            fit_sized(&input, Alphabet::ascii_extended).map_err(CliError::from)
        }
        AlphabetChoice::File(path) => {
            let alphabet = io::read_token_file(path)?;
            fit(&input, &alphabet).map_err(CliError::from)
        }
    }
}

fn digitizer_params(
    digitizer: Digitizer,
    alpha: Option<f64>,
    k: Option<usize>,
    seed: u64,
) -> Result<DigitizerParams> {
    match digitizer {
        Digitizer::Greedy => {
            let alpha = alpha.ok_or_else(|| CliError::usage("--digitizer greedy requires --alpha"))?;
            Ok(DigitizerParams::Greedy { alpha })
        }
        Digitizer::Lloyd => {
            let k = k.ok_or_else(|| CliError::usage("--digitizer lloyd requires --k"))?;
            Ok(DigitizerParams::Lloyd { k, seed })
        }
    }
}

/// Column-index suffix for per-column model files: `model.json` becomes
/// `model.col3.json`.
fn indexed_path(path: &Path, col: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("json");
    path.with_file_name(format!("{stem}.col{col}.{ext}"))
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let file = load_columns(&args.input, args.znorm)?;
    let params = digitizer_params(args.digitizer, args.alpha, args.k, args.seed)?;
    let choice = alphabet_choice(&args.alphabet);

    let results: Vec<CompressionResult> = file
        .columns
        .iter()
        .map(|col| compress_column(col, args.variant, args.tol))
        .collect::<Result<_>>()?;

    if args.independent {
        let mut all_sequences = Vec::new();
        for (col, result) in results.into_iter().enumerate() {
            let out = run_fit(
                FitInput {
                    results: vec![result],
                    scl: args.scl,
                    digitizer: params,
                },
                &choice,
            )?;
            let model_path = indexed_path(&args.model, col);
            std::fs::write(&model_path, out.model.to_json())?;
            println!(
                "column {col}: {} pieces, {} symbols, model {}",
                out.sequences[0].len(),
                out.model.k(),
                model_path.display()
            );
            all_sequences.push((out.sequences.into_iter().next().unwrap(), out.model.alphabet));
        }
        let mut text = String::new();
        for (seq, alphabet) in &all_sequences {
            text.push_str(&io::format_symbols(seq, alphabet));
            text.push('\n');
        }
        std::fs::write(&args.symbols, text)?;
    } else {
        let out = run_fit(
            FitInput {
                results,
                scl: args.scl,
                digitizer: params,
            },
            &choice,
        )?;
        std::fs::write(&args.model, out.model.to_json())?;
        io::write_symbols(&args.symbols, &out.sequences, &out.model.alphabet)?;
        for (col, seq) in out.sequences.iter().enumerate() {
            println!("column {col}: {} pieces", seq.len());
        }
        println!(
            "codebook: {} symbols, model {}",
            out.model.k(),
            args.model.display()
        );
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<AbbaModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    AbbaModel::from_json(&text).map_err(CliError::from)
}

pub fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let file = load_columns(&args.input, args.znorm)?;
    let tol = args.tol.unwrap_or(model.tol);
    let sequences: Vec<SymbolSequence> = file
        .columns
        .iter()
        .map(|col| {
            let series = TimeSeries::new(col.clone())?;
            transform(&model, &series, tol)
        })
        .collect::<abba_core::Result<_>>()?;
    io::write_symbols(&args.symbols, &sequences, &model.alphabet)?;
    for (col, seq) in sequences.iter().enumerate() {
        println!("column {col}: {} symbols", seq.len());
    }
    Ok(())
}

pub fn cmd_inverse(args: &InverseArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let sequences = io::read_symbols(&args.symbols, &model.alphabet)?;
    if sequences.is_empty() {
        return Err(CliError::new(
            1,
            format!("{}: empty symbols file", args.symbols.display()),
        ));
    }
    let t0s: Vec<f64> = args
        .t0
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("cannot parse --t0 value {s:?}")))
        })
        .collect::<Result<_>>()?;
    if t0s.len() != 1 && t0s.len() != sequences.len() {
        return Err(CliError::usage(format!(
            "--t0 has {} values for {} sequences",
            t0s.len(),
            sequences.len()
        )));
    }
    let columns: Vec<Vec<f64>> = sequences
        .iter()
        .enumerate()
        .map(|(i, seq)| {
            let t0 = t0s[if t0s.len() == 1 { 0 } else { i }];
            Ok(inverse_symbolize(&model, seq, t0)?.into_values())
        })
        .collect::<Result<_>>()?;
    io::write_series_csv(&args.output, &columns)?;
    for (col, values) in columns.iter().enumerate() {
        println!("column {col}: {} samples", values.len());
    }
    Ok(())
}

fn print_bound_table(reports: &[BoundReport]) -> bool {
    let mut all_ok = true;
    println!(
        "{:<28} {:>14} {:>14} verdict",
        "bound", "measured", "allowed"
    );
    for report in reports {
        println!("{}", report.table_row());
        all_ok &= report.satisfied;
    }
    all_ok
}

pub fn cmd_roundtrip(args: &RoundtripArgs) -> Result<()> {
    let file = load_columns(&args.input, args.znorm)?;
    let params = digitizer_params(args.digitizer, args.alpha, args.k, args.seed)?;
    let choice = alphabet_choice(&args.alphabet);
    let results: Vec<CompressionResult> = file
        .columns
        .iter()
        .map(|col| compress_column(col, args.variant, args.tol))
        .collect::<Result<_>>()?;

    // One fit covering all columns, or one per column with --independent.
    let fits: Vec<FitOutput> = if args.independent {
        results
            .iter()
            .map(|r| {
                run_fit(
                    FitInput {
                        results: vec![r.clone()],
                        scl: args.scl,
                        digitizer: params,
                    },
                    &choice,
                )
            })
            .collect::<Result<_>>()?
    } else {
        vec![run_fit(
            FitInput {
                results: results.clone(),
                scl: args.scl,
                digitizer: params,
            },
            &choice,
        )?]
    };
    if args.independent {
        let sizes: Vec<String> = fits.iter().map(|f| f.model.k().to_string()).collect();
        println!("codebook sizes: {}", sizes.join(","));
    } else {
        println!("codebook size: {}", fits[0].model.k());
    }

    println!(
        "{:<4} {:>7} {:>9} {:>12} {:>12} {:>9}",
        "col", "pieces", "distinct", "mse", "mae", "pearson"
    );
    let mut reports: Vec<BoundReport> = Vec::new();
    for (col, column) in file.columns.iter().enumerate() {
        let out = if args.independent { &fits[col] } else { &fits[0] };
        let seq = if args.independent {
            &out.sequences[0]
        } else {
            &out.sequences[col]
        };
        let series = TimeSeries::new(column.clone())?;
        let rec = inverse_symbolize(&out.model, seq, column[0])?;
        let m = metrics(&series, &rec)?;
        let mut distinct: Vec<&str> = seq.iter().collect();
        distinct.sort_unstable();
        distinct.dedup();
        println!(
            "{:<4} {:>7} {:>9} {:>12.6e} {:>12.6e} {:>9}",
            col,
            seq.len(),
            distinct.len(),
            m.mse,
            m.mae,
            m.pearson
                .map(|p| format!("{p:.4}"))
                .unwrap_or_else(|| "undefined".into()),
        );

        reports.push(check_compression_bound(&series, &results[col]));
        if out.model.alpha > 0.0 {
            let profile = cumulative_error_profile(&out.model, seq, &results[col].pieces)?;
            reports.extend(profile.reports);
        }
    }
    let alpha_for_bounds = match params {
        DigitizerParams::Greedy { alpha } => alpha,
        // Lloyd has no radius bound; SSE and cancellation checks still run
        // against an infinite allowance only where alpha participates.
        DigitizerParams::Lloyd { .. } => f64::INFINITY,
    };
    for out in &fits {
        reports.extend(check_digitization_bounds(
            &out.tuples,
            &out.model.codebook.centers,
            &out.labels,
            alpha_for_bounds,
        ));
    }

    let all_ok = if args.json {
        let rows: Vec<String> = reports.iter().map(BoundReport::to_json).collect();
        println!("[{}]", rows.join(","));
        reports.iter().all(|r| r.satisfied)
    } else {
        print_bound_table(&reports)
    };
    if !all_ok {
        return Err(CliError::new(5, "one or more bounds violated".to_string()));
    }
    Ok(())
}

pub fn cmd_perturb(args: &PerturbArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let sequences = io::read_symbols(&args.symbols, &model.alphabet)?;
    let seq = sequences.get(args.line).ok_or_else(|| {
        CliError::usage(format!(
            "--line {} out of range ({} sequences)",
            args.line,
            sequences.len()
        ))
    })?;
    let report = perturb_and_compare(&model, seq, args.position, &args.replacement, args.t0)?;
    println!(
        "perturbed position {} ({:?} -> {:?}), second-coordinate delta {:+.6e}",
        report.position,
        seq.get(args.position).unwrap_or("?"),
        args.replacement,
        report.second_delta
    );
    println!(
        "{:<6} {:>14} {:>14} {:>12}",
        "piece", "apca drift", "fapca drift", "index shift"
    );
    for j in args.position..report.apca_style_drift.len() {
        println!(
            "{:<6} {:>14.6e} {:>14.6e} {:>12}",
            j, report.apca_style_drift[j], report.fapca_style_drift[j], report.index_shift[j]
        );
    }
    println!(
        "max reconstruction deviation: apca-style {:.6e}, fapca-style {:.6e}",
        report.apca_max_deviation, report.fapca_max_deviation
    );
    Ok(())
}

pub fn cmd_zipf(args: &ZipfArgs) -> Result<()> {
    let mut sequences: Vec<SymbolSequence> = Vec::new();
    let model = match &args.model {
        Some(path) => Some(load_model(path)?),
        None => None,
    };
    for path in &args.symbols {
        let seqs = match &model {
            Some(m) => io::read_symbols(path, &m.alphabet)?,
            None => io::read_symbols_heuristic(path)?,
        };
        sequences.extend(seqs);
    }
    let profile = zipf_profile(sequences.iter()).map_err(CliError::from)?;
    std::fs::write(&args.csv, zipf_csv(&profile))?;
    let total: usize = profile.iter().map(|e| e.frequency).sum();
    println!(
        "{} distinct symbols over {} occurrences -> {}",
        profile.len(),
        total,
        args.csv.display()
    );
    for entry in profile.iter().take(5) {
        println!("rank {:<3} {:<8} x{}", entry.rank, entry.symbol, entry.frequency);
    }
    Ok(())
}

pub fn cmd_forecast(args: &ForecastArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let file = load_columns(&args.history, args.znorm)?;
    let tol = args.tol.unwrap_or(model.tol);

    let histories: Vec<TimeSeries> = file
        .columns
        .iter()
        .map(|col| TimeSeries::new(col.clone()).map_err(CliError::from))
        .collect::<Result<_>>()?;
    let sequences: Vec<SymbolSequence> = histories
        .iter()
        .map(|h| transform(&model, h, tol))
        .collect::<abba_core::Result<_>>()?;
    let ngram = ngram_fit(&sequences, args.predictor_order, args.delta, &model.alphabet)?;

    let mut forecasts: Vec<Vec<f64>> = Vec::new();
    for history in &histories {
        let predicted = match args.mode.as_str() {
            "greedy" => forecast(&model, &ngram, history, args.horizon, tol)?,
            "sample" => {
                let predictor = SampledNGram {
                    model: &ngram,
                    seed: args.seed,
                };
                forecast(&model, &predictor, history, args.horizon, tol)?
            }
            other => {
                return Err(CliError::usage(format!(
                    "--mode must be greedy or sample, got {other:?}"
                )))
            }
        };
        forecasts.push(predicted.into_values());
    }

    match &args.output {
        Some(path) => io::write_series_csv(path, &forecasts)?,
        None => {
            for row in 0..args.horizon {
                let line: Vec<String> = forecasts.iter().map(|c| c[row].to_string()).collect();
                println!("{}", line.join(","));
            }
        }
    }

    if let Some(truth_path) = &args.truth {
        let truth = load_columns(truth_path, args.znorm)?;
        if truth.columns.len() != forecasts.len() {
            return Err(CliError::usage(format!(
                "truth has {} columns, history has {}",
                truth.columns.len(),
                forecasts.len()
            )));
        }
        println!(
            "{:<4} {:>12} {:>12} {:>12} {:>12}",
            "col", "mse", "mae", "persist mse", "persist mae"
        );
        for (col, (truth_col, fc)) in truth.columns.iter().zip(&forecasts).enumerate() {
            if truth_col.len() < args.horizon {
                return Err(CliError::new(
                    1,
                    format!(
                        "truth column {col} has {} samples, horizon needs {}",
                        truth_col.len(),
                        args.horizon
                    ),
                ));
            }
            let truth_series = TimeSeries::new(truth_col[..args.horizon].to_vec())?;
            let fc_series = TimeSeries::new(fc.clone())?;
            let score = evaluate_forecast(&truth_series, &fc_series)?;
            let baseline = persistence_forecast(&histories[col], args.horizon)?;
            let base_score = evaluate_forecast(&truth_series, &baseline)?;
            println!(
                "{:<4} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e}",
                col, score.mse, score.mae, base_score.mse, base_score.mae
            );
        }
    }
    Ok(())
}
