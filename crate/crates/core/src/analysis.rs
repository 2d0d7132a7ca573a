//! Reconstruction metrics, runtime verifiers for the reconstruction-error
//! bounds, and rank-frequency analysis of symbol corpora.

use crate::compression::{reconstruct_chain, CompressionResult};
use crate::error::{Error, Result};
use crate::model::{AbbaModel, SymbolSequence};
use crate::types::{Piece, ScaledTuple, TimeSeries};

/// Relative slack applied to every bound check to absorb floating-point
/// accumulation.
const BOUND_SLACK: f64 = 1e-9;

/// One verified bound: what was measured, what the bound allows, and the
/// setting it was measured in.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub context: BoundContext,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundContext {
    pub n: Option<usize>,
    pub pieces: Option<usize>,
    pub clusters: Option<usize>,
    pub tol: Option<f64>,
    pub alpha: Option<f64>,
}

impl BoundReport {
    fn new(name: &'static str, measured: f64, bound: f64, context: BoundContext) -> Self {
        let satisfied = measured <= bound + BOUND_SLACK * bound.abs();
        BoundReport {
            name,
            measured,
            bound,
            satisfied,
            context,
        }
    }

    /// One plain-text table row: name, measured, bound, verdict.
    pub fn table_row(&self) -> String {
        format!(
            "{:<28} {:>14.6e} {:>14.6e} {}",
            self.name,
            self.measured,
            self.bound,
            if self.satisfied { "ok" } else { "VIOLATED" }
        )
    }

    /// Compact JSON object, mainly for CLI output.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"name\":\"{}\",\"measured\":{:e},\"bound\":{:e},\"satisfied\":{}}}",
            self.name, self.measured, self.bound, self.satisfied
        )
    }
}

/// Reconstruction quality of `reconstructed` against `original`.
///
/// Series are aligned on the overlap of their lengths; a length difference is
/// reported rather than treated as an error. Pearson correlation is undefined
/// when either side is constant over the overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    pub mae: f64,
    pub pearson: Option<f64>,
    pub overlap: usize,
    pub length_gap: usize,
}

pub fn metrics(original: &TimeSeries, reconstructed: &TimeSeries) -> Result<Metrics> {
    if original.is_empty() || reconstructed.is_empty() {
        return Err(Error::EmptyInput);
    }
    let a = original.values();
    let b = reconstructed.values();
    let overlap = a.len().min(b.len());
    let length_gap = a.len().max(b.len()) - overlap;
    let a = &a[..overlap];
    let b = &b[..overlap];

    let n = overlap as f64;
    let mut se = 0.0;
    let mut ae = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        se += d * d;
        ae += d.abs();
    }
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    let pearson = if var_a == 0.0 || var_b == 0.0 {
        None
    } else {
        Some(cov / (var_a.sqrt() * var_b.sqrt()))
    };
    Ok(Metrics {
        mse: se / n,
        mae: ae / n,
        pearson,
        overlap,
        length_gap,
    })
}

/// Verifies that the squared reconstruction error of the compression chain
/// stays within `(n - 1 - N) * tol^2`.
pub fn check_compression_bound(series: &TimeSeries, result: &CompressionResult) -> BoundReport {
    let rec = reconstruct_chain(result);
    let measured: f64 = series
        .values()
        .iter()
        .zip(rec.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let n = series.len();
    let pieces = result.pieces.len();
    let bound = (n - 1 - pieces) as f64 * result.tol * result.tol;
    BoundReport::new(
        "compression_error_sq",
        measured,
        bound,
        BoundContext {
            n: Some(n),
            pieces: Some(pieces),
            tol: Some(result.tol),
            ..Default::default()
        },
    )
}

/// Verifies the three digitization bounds for a clustering of `tuples`:
/// the per-tuple squared deviation against `alpha^2`, the norm of the summed
/// deviations against `1e-9 * N` (centers are means, so deviations cancel),
/// and the sum of squared errors against `alpha^2 * (N - k)`.
pub fn check_digitization_bounds(
    tuples: &[ScaledTuple],
    centers: &[ScaledTuple],
    labels: &[usize],
    alpha: f64,
) -> Vec<BoundReport> {
    let n = tuples.len();
    let k = centers.len();
    let context = BoundContext {
        pieces: Some(n),
        clusters: Some(k),
        alpha: Some(alpha),
        ..Default::default()
    };
    let mut max_dev_sq = 0.0f64;
    let mut sse = 0.0;
    let mut sum_dx = 0.0;
    let mut sum_dy = 0.0;
    for (&label, t) in labels.iter().zip(tuples) {
        let c = centers[label];
        let dx = c.x - t.x;
        let dy = c.y - t.y;
        let dev_sq = dx * dx + dy * dy;
        max_dev_sq = max_dev_sq.max(dev_sq);
        sse += dev_sq;
        sum_dx += dx;
        sum_dy += dy;
    }
    vec![
        BoundReport::new("max_tuple_deviation_sq", max_dev_sq, alpha * alpha, context),
        BoundReport::new(
            "deviation_sum_norm",
            sum_dx.hypot(sum_dy),
            1e-9 * n as f64,
            context,
        ),
        BoundReport::new(
            "sse",
            sse,
            alpha * alpha * (n.saturating_sub(k)) as f64,
            context,
        ),
    ]
}

/// Cumulative deviation between assigned centers and true tuples, tracked
/// per breakpoint in both scaled and denormalized units.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    /// `e_j` in scaled space, one entry per piece (cumulative).
    pub scaled: Vec<(f64, f64)>,
    /// `e_j` mapped back to `(len, second)` units.
    pub denormalized: Vec<(f64, f64)>,
    /// Scaled- and denormalized-space checks of `|e_j| <= j * alpha`; empty
    /// for Lloyd-fitted models, which carry no alpha.
    pub reports: Vec<BoundReport>,
}

/// Accumulates the per-piece center-minus-tuple deviations for a fitted
/// sequence against the pieces it encoded.
pub fn cumulative_error_profile(
    model: &AbbaModel,
    symbols: &SymbolSequence,
    original_pieces: &[Piece],
) -> Result<ErrorProfile> {
    if symbols.len() != original_pieces.len() {
        return Err(Error::LengthMismatch {
            expected: original_pieces.len(),
            actual: symbols.len(),
        });
    }
    let scaling = &model.codebook.scaling;
    let mut scaled = Vec::with_capacity(symbols.len());
    let mut denormalized = Vec::with_capacity(symbols.len());
    let mut ex = 0.0;
    let mut ey = 0.0;
    for (position, (symbol, piece)) in symbols.iter().zip(original_pieces).enumerate() {
        let rank = model
            .center_for_symbol(symbol)
            .ok_or_else(|| Error::UnknownSymbol {
                symbol: symbol.to_string(),
                position,
            })?;
        let center = scaling.clustering_view(model.codebook.centers[rank]);
        let tuple = scaling.to_clustering(piece);
        ex += center.x - tuple.x;
        ey += center.y - tuple.y;
        scaled.push((ex, ey));
        denormalized.push((
            ex * scaling.sigma_len / scaling.scl_eff(),
            ey * scaling.sigma_second,
        ));
    }

    let mut reports = Vec::new();
    if model.alpha > 0.0 {
        let context = BoundContext {
            pieces: Some(symbols.len()),
            clusters: Some(model.k()),
            alpha: Some(model.alpha),
            ..Default::default()
        };
        // Worst ratio |e_j| / j over the profile, one report per coordinate
        // and space.
        let mut worst_len = 0.0f64;
        let mut worst_second = 0.0f64;
        for (j, &(ex, ey)) in scaled.iter().enumerate() {
            let steps = (j + 1) as f64;
            worst_len = worst_len.max(ex.abs() / steps);
            worst_second = worst_second.max(ey.abs() / steps);
        }
        reports.push(BoundReport::new(
            "cumulative_len_shift_rate",
            worst_len,
            model.alpha,
            context,
        ));
        reports.push(BoundReport::new(
            "cumulative_second_shift_rate",
            worst_second,
            model.alpha,
            context,
        ));
        let mut worst_len_d = 0.0f64;
        let mut worst_second_d = 0.0f64;
        for (j, &(ex, ey)) in denormalized.iter().enumerate() {
            let steps = (j + 1) as f64;
            worst_len_d = worst_len_d.max(ex.abs() / steps);
            worst_second_d = worst_second_d.max(ey.abs() / steps);
        }
        reports.push(BoundReport::new(
            "cumulative_len_shift_rate_denorm",
            worst_len_d,
            model.alpha * scaling.sigma_len / scaling.scl_eff(),
            context,
        ));
        reports.push(BoundReport::new(
            "cumulative_second_shift_rate_denorm",
            worst_second_d,
            model.alpha * scaling.sigma_second,
            context,
        ));
    }
    Ok(ErrorProfile {
        scaled,
        denormalized,
        reports,
    })
}

/// One rank of the rank-frequency profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipfEntry {
    /// 1-based rank.
    pub rank: usize,
    pub symbol: String,
    pub frequency: usize,
}

/// Rank-frequency profile of a symbol corpus: frequencies sorted descending,
/// ties ordered by first occurrence.
pub fn zipf_profile<'a, I>(sequences: I) -> Result<Vec<ZipfEntry>>
where
    I: IntoIterator<Item = &'a SymbolSequence>,
{
    let mut counts: Vec<(String, usize)> = Vec::new();
    let mut index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for seq in sequences {
        for symbol in seq.iter() {
            match index.get(symbol) {
                Some(&i) => counts[i].1 += 1,
                None => {
                    index.insert(symbol.to_string(), counts.len());
                    counts.push((symbol.to_string(), 1));
                }
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyInput);
    }
    // Stable sort preserves first-occurrence order among equal frequencies.
    counts.sort_by_key(|&(_, frequency)| std::cmp::Reverse(frequency));
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, (symbol, frequency))| ZipfEntry {
            rank: i + 1,
            symbol,
            frequency,
        })
        .collect())
}

/// CSV rows `(rank, frequency, log_rank, log_frequency)` with base-10 logs,
/// ready for log-log plotting.
pub fn zipf_csv(entries: &[ZipfEntry]) -> String {
    let mut out = String::from("rank,frequency,log_rank,log_frequency\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.rank,
            e.frequency,
            (e.rank as f64).log10(),
            (e.frequency as f64).log10()
        ));
    }
    out
}
