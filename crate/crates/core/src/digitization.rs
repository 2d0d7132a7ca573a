//! Pieces to symbols: normalization, greedy sorting-based aggregation,
//! Lloyd-iteration clustering, codebook construction, consistent multi-series
//! fitting, and out-of-sample transforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::compression::{compress_apca, compress_fapca, CompressionResult};
use crate::error::{Error, Result};
use crate::model::{AbbaModel, Codebook, Digitizer, Scaling, SymbolSequence};
use crate::types::{Piece, ScaledTuple, TimeSeries, Variant};

const LLOYD_MAX_ITERS: usize = 300;

/// Normalizes pieces into scaled tuples.
///
/// The deviations are population standard deviations over all pieces; a zero
/// deviation falls back to 1 so a constant coordinate contributes nothing to
/// distances instead of dividing by zero. With `scl = 0` every tuple's length
/// coordinate is zero and clustering effectively runs on the second
/// coordinate alone.
pub fn scale_tuples(pieces: &[Piece], scl: f64) -> Result<(Vec<ScaledTuple>, Scaling)> {
    if pieces.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scl < 0.0 || !scl.is_finite() {
        return Err(Error::NegativeScale(scl));
    }
    let n = pieces.len() as f64;
    let mean_len = pieces.iter().map(|p| p.len as f64).sum::<f64>() / n;
    let mean_second = pieces.iter().map(|p| p.second).sum::<f64>() / n;
    let var_len = pieces
        .iter()
        .map(|p| {
            let d = p.len as f64 - mean_len;
            d * d
        })
        .sum::<f64>()
        / n;
    let var_second = pieces
        .iter()
        .map(|p| {
            let d = p.second - mean_second;
            d * d
        })
        .sum::<f64>()
        / n;
    let sigma_len = if var_len == 0.0 { 1.0 } else { var_len.sqrt() };
    let sigma_second = if var_second == 0.0 {
        1.0
    } else {
        var_second.sqrt()
    };
    let scaling = Scaling {
        scl,
        sigma_len,
        sigma_second,
    };
    let tuples = pieces.iter().map(|p| scaling.to_clustering(p)).collect();
    Ok((tuples, scaling))
}

/// Cluster assignment produced by a digitizer. Centers are the arithmetic
/// means of their members in scaled space, listed in order of creation.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centers: Vec<ScaledTuple>,
    pub cardinalities: Vec<usize>,
    /// Per-tuple cluster id, in creation order.
    pub labels: Vec<usize>,
}

impl Clustering {
    fn from_labels(tuples: &[ScaledTuple], labels: Vec<usize>, k: usize) -> Self {
        let mut sums = vec![(0.0f64, 0.0f64); k];
        let mut cardinalities = vec![0usize; k];
        for (&label, t) in labels.iter().zip(tuples) {
            sums[label].0 += t.x;
            sums[label].1 += t.y;
            cardinalities[label] += 1;
        }
        let centers = sums
            .iter()
            .zip(&cardinalities)
            .map(|(&(sx, sy), &c)| ScaledTuple::new(sx / c as f64, sy / c as f64))
            .collect();
        Clustering {
            centers,
            cardinalities,
            labels,
        }
    }

    pub fn sse(&self, tuples: &[ScaledTuple]) -> f64 {
        self.labels
            .iter()
            .zip(tuples)
            .map(|(&label, t)| t.dist_sq(self.centers[label]))
            .sum()
    }
}

/// Greedy sorting-based aggregation.
///
/// Tuples are sorted ascending by Euclidean norm. Each unassigned tuple in
/// sorted order becomes a starting point and collects every later unassigned
/// tuple within `alpha` of it. The scan stops early once a tuple's norm
/// exceeds the starting point's by more than `alpha`: by the reverse triangle
/// inequality no later sorted tuple can still be within reach.
pub fn aggregate_greedy(tuples: &[ScaledTuple], alpha: f64) -> Result<Clustering> {
    if tuples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    let n = tuples.len();
    let norms: Vec<f64> = tuples.iter().map(|t| t.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps input order among equal norms, which fixes the
    // cluster creation order deterministically.
    order.sort_by(|&i, &j| norms[i].total_cmp(&norms[j]));

    let alpha_sq = alpha * alpha;
    const UNASSIGNED: usize = usize::MAX;
    let mut labels = vec![UNASSIGNED; n];
    let mut k = 0;
    for (pos, &i) in order.iter().enumerate() {
        if labels[i] != UNASSIGNED {
            continue;
        }
        labels[i] = k;
        let sp = tuples[i];
        for &j in &order[pos + 1..] {
            if norms[j] - norms[i] > alpha {
                break;
            }
            if labels[j] == UNASSIGNED && sp.dist_sq(tuples[j]) <= alpha_sq {
                labels[j] = k;
            }
        }
        k += 1;
    }
    Ok(Clustering::from_labels(tuples, labels, k))
}

fn nearest(tuples: &[ScaledTuple], centers: &[ScaledTuple]) -> Vec<usize> {
    tuples
        .iter()
        .map(|t| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = t.dist_sq(*center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect()
}

fn distinct_count(tuples: &[ScaledTuple]) -> usize {
    let mut seen = std::collections::HashSet::new();
    for t in tuples {
        seen.insert((t.x.to_bits(), t.y.to_bits()));
    }
    seen.len()
}

/// Mean-update iteration from distance-squared weighted seeding.
///
/// Terminates when assignments stabilize or after a capped iteration count.
/// An empty cluster is repaired by reseeding its center at the point farthest
/// from its currently assigned center.
pub fn aggregate_lloyd(tuples: &[ScaledTuple], k: usize, seed: u64) -> Result<Clustering> {
    lloyd_run(tuples, k, seed, None)
}

fn lloyd_run(
    tuples: &[ScaledTuple],
    k: usize,
    seed: u64,
    mut sse_trace: Option<&mut Vec<f64>>,
) -> Result<Clustering> {
    if tuples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::ZeroClusters);
    }
    let distinct = distinct_count(tuples);
    if k > distinct {
        return Err(Error::TooManyClusters { k, distinct });
    }
    let n = tuples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Distance-squared weighted seeding.
    let mut centers = Vec::with_capacity(k);
    centers.push(tuples[rng.gen_range(0..n)]);
    let mut min_d: Vec<f64> = tuples.iter().map(|t| t.dist_sq(centers[0])).collect();
    while centers.len() < k {
        let total: f64 = min_d.iter().sum();
        let mut target = rng.gen::<f64>() * total;
        let mut pick = None;
        for (i, &d) in min_d.iter().enumerate() {
            if d > 0.0 {
                target -= d;
                if target <= 0.0 {
                    pick = Some(i);
                    break;
                }
                pick = Some(i); // fall back to the last positive-weight point
            }
        }
        let pick = pick.expect("k <= distinct guarantees an unchosen tuple remains");
        centers.push(tuples[pick]);
        for (d, t) in min_d.iter_mut().zip(tuples) {
            *d = d.min(t.dist_sq(centers[centers.len() - 1]));
        }
    }

    let mut labels = nearest(tuples, &centers);
    repair_empty(tuples, &mut centers, &mut labels, k);
    if let Some(trace) = sse_trace.as_deref_mut() {
        trace.push(sse_of(tuples, &centers, &labels));
    }
    for _ in 0..LLOYD_MAX_ITERS {
        centers = means(tuples, &labels, k);
        let mut next = nearest(tuples, &centers);
        repair_empty(tuples, &mut centers, &mut next, k);
        if let Some(trace) = sse_trace.as_deref_mut() {
            trace.push(sse_of(tuples, &centers, &next));
        }
        if next == labels {
            break;
        }
        labels = next;
    }
    // Ensure centers are the means of the final assignment even if the
    // iteration cap fired mid-update.
    Ok(Clustering::from_labels(tuples, labels, k))
}

fn sse_of(tuples: &[ScaledTuple], centers: &[ScaledTuple], labels: &[usize]) -> f64 {
    labels
        .iter()
        .zip(tuples)
        .map(|(&l, t)| t.dist_sq(centers[l]))
        .sum()
}

fn means(tuples: &[ScaledTuple], labels: &[usize], k: usize) -> Vec<ScaledTuple> {
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
    for (&label, t) in labels.iter().zip(tuples) {
        sums[label].0 += t.x;
        sums[label].1 += t.y;
        sums[label].2 += 1;
    }
    sums.iter()
        .map(|&(sx, sy, c)| ScaledTuple::new(sx / c as f64, sy / c as f64))
        .collect()
}

fn repair_empty(tuples: &[ScaledTuple], centers: &mut [ScaledTuple], labels: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let farthest = (0..tuples.len())
            .max_by(|&a, &b| {
                let da = tuples[a].dist_sq(centers[labels[a]]);
                let db = tuples[b].dist_sq(centers[labels[b]]);
                da.total_cmp(&db)
            })
            .expect("tuples are non-empty");
        centers[empty] = tuples[farthest];
        labels[farthest] = empty;
    }
}

/// How the codebook is built from scaled tuples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DigitizerParams {
    Greedy { alpha: f64 },
    Lloyd { k: usize, seed: u64 },
}

impl DigitizerParams {
    pub fn tag(&self) -> Digitizer {
        match self {
            DigitizerParams::Greedy { .. } => Digitizer::Greedy,
            DigitizerParams::Lloyd { .. } => Digitizer::Lloyd,
        }
    }
}

/// Compressed series pooled for one consistent fit.
#[derive(Debug, Clone)]
pub struct FitInput {
    pub results: Vec<CompressionResult>,
    pub scl: f64,
    pub digitizer: DigitizerParams,
}

/// A fitted model plus everything the fit observed: one symbol sequence per
/// input series, the pooled clustering-space tuples, and their ranked center
/// labels.
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub model: AbbaModel,
    pub sequences: Vec<SymbolSequence>,
    pub tuples: Vec<ScaledTuple>,
    pub labels: Vec<usize>,
}

/// Fits a codebook over the concatenated pieces of every input series and
/// allocates symbols back to each series.
///
/// Clusters are ranked by descending cardinality (ties by creation order), so
/// frequent clusters take early alphabet entries. Fails if the alphabet has
/// fewer entries than clusters.
pub fn fit(input: &FitInput, alphabet: &Alphabet) -> Result<FitOutput> {
    fit_sized(input, |_| Ok(alphabet.clone()))
}

/// Like [`fit`] but sizes a builtin alphabet to the resulting cluster count.
pub fn fit_default_alphabet(input: &FitInput) -> Result<FitOutput> {
    fit_sized(input, Alphabet::default_sized)
}

/// Like [`fit`] but builds the alphabet only once the cluster count is
/// known, e.g. `fit_sized(input, Alphabet::ascii_extended)`.
pub fn fit_sized(
    input: &FitInput,
    make_alphabet: impl FnOnce(usize) -> Result<Alphabet>,
) -> Result<FitOutput> {
    if input.results.is_empty() {
        return Err(Error::EmptyInput);
    }
    let variant = input.results[0].variant;
    if input.results.iter().any(|r| r.variant != variant) {
        return Err(Error::MixedVariants);
    }
    let pieces: Vec<Piece> = input
        .results
        .iter()
        .flat_map(|r| r.pieces.iter().copied())
        .collect();
    let (tuples, scaling) = scale_tuples(&pieces, input.scl)?;
    let clustering = match input.digitizer {
        DigitizerParams::Greedy { alpha } => aggregate_greedy(&tuples, alpha)?,
        DigitizerParams::Lloyd { k, seed } => aggregate_lloyd(&tuples, k, seed)?,
    };
    let k = clustering.centers.len();

    let alphabet = make_alphabet(k)?;
    if alphabet.len() < k {
        return Err(Error::AlphabetExhausted {
            required: k,
            available: alphabet.len(),
        });
    }

    // Rank clusters: descending cardinality, ties by creation order.
    let mut rank_order: Vec<usize> = (0..k).collect();
    rank_order.sort_by(|&a, &b| {
        clustering.cardinalities[b]
            .cmp(&clustering.cardinalities[a])
            .then(a.cmp(&b))
    });
    let mut rank_of = vec![0usize; k];
    for (rank, &cluster) in rank_order.iter().enumerate() {
        rank_of[cluster] = rank;
    }

    let mut centers: Vec<ScaledTuple> = rank_order
        .iter()
        .map(|&c| clustering.centers[c])
        .collect();
    let cardinalities: Vec<usize> = rank_order
        .iter()
        .map(|&c| clustering.cardinalities[c])
        .collect();
    if input.scl == 0.0 {
        // Clustering saw zeroed length coordinates; store each center's
        // length as the mean of its members' raw lengths so symbols stay
        // invertible.
        let mut len_sums = vec![0.0f64; k];
        for (&label, piece) in clustering.labels.iter().zip(&pieces) {
            len_sums[rank_of[label]] += piece.len as f64;
        }
        for (center, (&sum, &card)) in centers
            .iter_mut()
            .zip(len_sums.iter().zip(&cardinalities))
        {
            center.x = sum / card as f64 / scaling.sigma_len;
        }
    }

    let labels: Vec<usize> = clustering.labels.iter().map(|&l| rank_of[l]).collect();
    let mut sequences = Vec::with_capacity(input.results.len());
    let mut offset = 0;
    for result in &input.results {
        let count = result.pieces.len();
        let symbols = labels[offset..offset + count]
            .iter()
            .map(|&rank| {
                alphabet
                    .get(rank)
                    .expect("alphabet covers every cluster rank")
                    .to_string()
            })
            .collect();
        sequences.push(SymbolSequence::new(symbols));
        offset += count;
    }

    let model = AbbaModel {
        variant,
        tol: input.results[0].tol,
        alpha: match input.digitizer {
            DigitizerParams::Greedy { alpha } => alpha,
            DigitizerParams::Lloyd { .. } => 0.0,
        },
        digitizer: input.digitizer.tag(),
        codebook: Codebook {
            centers,
            cardinalities,
            scaling,
        },
        alphabet,
    };
    Ok(FitOutput {
        model,
        sequences,
        tuples,
        labels,
    })
}

/// Symbolizes an out-of-sample series against a frozen model: compress with
/// the model's variant, scale with the stored deviations, assign each tuple
/// the nearest center's symbol. The model is unchanged.
pub fn transform(model: &AbbaModel, series: &TimeSeries, tol: f64) -> Result<SymbolSequence> {
    let result = match model.variant {
        Variant::Apca => compress_apca(series, tol)?,
        Variant::Fapca => compress_fapca(series, tol)?,
    };
    let scaling = &model.codebook.scaling;
    let symbols = result
        .pieces
        .iter()
        .map(|p| {
            let rank = model.nearest_center(scaling.to_clustering(p));
            model
                .alphabet
                .get(rank)
                .expect("center ranks are alphabet-backed")
                .to_string()
        })
        .collect();
    Ok(SymbolSequence::new(symbols))
}
