//! Symbol-level forecasting: symbolize history, predict future symbols with a
//! backoff n-gram (or any pluggable predictor), inverse-symbolize the
//! predicted suffix anchored at the last observed value, and score the
//! result.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::digitization::transform;
use crate::error::{Error, Result};
use crate::inverse::inverse_symbolize;
use crate::model::{AbbaModel, SymbolSequence};
use crate::types::TimeSeries;

/// The pluggable-predictor contract: given the symbols so far, produce the
/// next `steps` symbols. Returned symbols are validated against the model
/// alphabet by the forecasting pipeline.
pub trait SymbolPredictor {
    fn predict(&self, prefix: &[String], steps: usize) -> Result<Vec<String>>;
}

/// How [`ngram_predict`] chooses among successor symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictMode {
    /// Highest count wins, backing off to shorter contexts; ties break by
    /// alphabet rank.
    Greedy,
    /// Draw from the smoothed distribution of the longest known context.
    Sample { seed: u64 },
}

/// A backoff n-gram over symbol ids: counts for every context length from
/// `order` down to the unigram.
#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    delta: f64,
    /// Seen symbols in alphabet-rank order.
    vocab: Vec<String>,
    vocab_index: HashMap<String, usize>,
    /// `tables[c]` maps a length-`c` context to per-vocab successor counts.
    tables: Vec<HashMap<Vec<usize>, Vec<u64>>>,
}

impl NGramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Successor counts recorded for `context`, if that context was seen.
    pub fn context_counts(&self, context: &[&str]) -> Option<Vec<(String, u64)>> {
        if context.len() > self.order {
            return None;
        }
        let ids: Option<Vec<usize>> = context
            .iter()
            .map(|s| self.vocab_index.get(*s).copied())
            .collect();
        let counts = self.tables[context.len()].get(&ids?)?;
        Some(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (self.vocab[i].clone(), c))
                .collect(),
        )
    }
}

/// Counts `(context, next symbol)` pairs for every context length up to
/// `order`, over all sequences. The alphabet fixes the tie-break ranking of
/// symbols; every training symbol must be an alphabet entry.
pub fn ngram_fit(
    sequences: &[SymbolSequence],
    order: usize,
    delta: f64,
    alphabet: &Alphabet,
) -> Result<NGramModel> {
    if order == 0 {
        return Err(Error::InvalidOrder);
    }
    if delta < 0.0 || !delta.is_finite() {
        return Err(Error::InvalidSmoothing(delta));
    }
    if sequences.iter().map(SymbolSequence::len).sum::<usize>() == 0 {
        return Err(Error::EmptyInput);
    }
    // Vocab keeps alphabet order restricted to symbols that actually occur.
    let mut seen = vec![false; alphabet.len()];
    for seq in sequences {
        for (position, symbol) in seq.iter().enumerate() {
            let rank = alphabet
                .position(symbol)
                .ok_or_else(|| Error::UnknownSymbol {
                    symbol: symbol.to_string(),
                    position,
                })?;
            seen[rank] = true;
        }
    }
    let vocab: Vec<String> = alphabet
        .symbols()
        .iter()
        .zip(&seen)
        .filter(|(_, &s)| s)
        .map(|(sym, _)| sym.clone())
        .collect();
    let vocab_index: HashMap<String, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();

    let mut tables: Vec<HashMap<Vec<usize>, Vec<u64>>> = vec![HashMap::new(); order + 1];
    for seq in sequences {
        let ids: Vec<usize> = seq.iter().map(|s| vocab_index[s]).collect();
        for i in 0..ids.len() {
            for c in 0..=order.min(i) {
                let context = ids[i - c..i].to_vec();
                let counts = tables[c]
                    .entry(context)
                    .or_insert_with(|| vec![0; vocab.len()]);
                counts[ids[i]] += 1;
            }
        }
    }
    Ok(NGramModel {
        order,
        delta,
        vocab,
        vocab_index,
        tables,
    })
}

/// Emits exactly `steps` symbols continuing `prefix`.
///
/// Each step uses the longest known context, backing off one symbol at a time
/// down to the global unigram distribution. Prefix symbols outside the
/// training vocabulary simply never match a context.
pub fn ngram_predict(
    model: &NGramModel,
    prefix: &SymbolSequence,
    steps: usize,
    mode: PredictMode,
) -> Result<SymbolSequence> {
    if model.vocab.is_empty() {
        return Err(Error::EmptyModel);
    }
    let mut rng = match mode {
        PredictMode::Greedy => None,
        PredictMode::Sample { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut ids: Vec<Option<usize>> = prefix
        .iter()
        .map(|s| model.vocab_index.get(s).copied())
        .collect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = next_symbol(model, &ids, rng.as_mut())?;
        out.push(model.vocab[next].clone());
        ids.push(Some(next));
    }
    Ok(SymbolSequence::new(out))
}

fn next_symbol(
    model: &NGramModel,
    ids: &[Option<usize>],
    rng: Option<&mut ChaCha8Rng>,
) -> Result<usize> {
    let max_ctx = model.order.min(ids.len());
    for c in (0..=max_ctx).rev() {
        let window = &ids[ids.len() - c..];
        if window.iter().any(Option::is_none) {
            continue;
        }
        let context: Vec<usize> = window.iter().map(|id| id.unwrap()).collect();
        if let Some(counts) = model.tables[c].get(&context) {
            return Ok(match rng {
                None => greedy_pick(counts),
                Some(rng) => sample_pick(counts, model.delta, rng),
            });
        }
    }
    // The unigram context is always recorded for a fitted model.
    Err(Error::EmptyModel)
}

fn greedy_pick(counts: &[u64]) -> usize {
    let mut best = 0;
    let mut best_count = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > best_count {
            best_count = c;
            best = i;
        }
    }
    best
}

fn sample_pick(counts: &[u64], delta: f64, rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = counts.iter().map(|&c| c as f64 + delta).sum();
    let mut target = rng.gen::<f64>() * total;
    let mut last_positive = 0;
    for (i, &c) in counts.iter().enumerate() {
        let w = c as f64 + delta;
        if w > 0.0 {
            target -= w;
            if target <= 0.0 {
                return i;
            }
            last_positive = i;
        }
    }
    last_positive
}

impl SymbolPredictor for NGramModel {
    fn predict(&self, prefix: &[String], steps: usize) -> Result<Vec<String>> {
        let seq = SymbolSequence::new(prefix.to_vec());
        Ok(ngram_predict(self, &seq, steps, PredictMode::Greedy)?
            .symbols()
            .to_vec())
    }
}

/// An n-gram that draws from the smoothed successor distribution instead of
/// taking the argmax. Each step is seeded from the base seed and the prefix
/// length, so repeated runs are identical.
pub struct SampledNGram<'a> {
    pub model: &'a NGramModel,
    pub seed: u64,
}

impl SymbolPredictor for SampledNGram<'_> {
    fn predict(&self, prefix: &[String], steps: usize) -> Result<Vec<String>> {
        let seq = SymbolSequence::new(prefix.to_vec());
        let mode = PredictMode::Sample {
            seed: self.seed.wrapping_add(prefix.len() as u64),
        };
        Ok(ngram_predict(self.model, &seq, steps, mode)?
            .symbols()
            .to_vec())
    }
}

/// Runs the symbolic forecasting pipeline for exactly `horizon` values.
///
/// The history is symbolized against the model, symbols are predicted one at
/// a time, and after each prediction the predicted suffix is
/// inverse-symbolized anchored at the last observed value until it covers the
/// horizon. For a fixed-point model the first predicted piece interpolates
/// from the last observed value toward the piece's pinned endpoint.
pub fn forecast(
    model: &AbbaModel,
    predictor: &dyn SymbolPredictor,
    history: &TimeSeries,
    horizon: usize,
    tol: f64,
) -> Result<TimeSeries> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon);
    }
    let history_symbols = transform(model, history, tol)?;
    let anchor = *history
        .values()
        .last()
        .expect("transform requires a non-empty series");

    let mut prefix: Vec<String> = history_symbols.symbols().to_vec();
    let mut predicted: Vec<String> = Vec::new();
    loop {
        let step = predictor.predict(&prefix, 1)?;
        let symbol = step.into_iter().next().ok_or(Error::EmptyModel)?;
        if model.center_for_symbol(&symbol).is_none() {
            return Err(Error::UnknownSymbol {
                symbol,
                position: predicted.len(),
            });
        }
        prefix.push(symbol.clone());
        predicted.push(symbol);
        let suffix = inverse_symbolize(model, &SymbolSequence::new(predicted.clone()), anchor)?;
        if suffix.len() > horizon {
            let values = suffix.values()[1..=horizon].to_vec();
            return TimeSeries::new(values);
        }
    }
}

/// Repeats the last observed value; the minimal bar for any predictor.
pub fn persistence_forecast(history: &TimeSeries, horizon: usize) -> Result<TimeSeries> {
    let last = *history.values().last().ok_or(Error::EmptyInput)?;
    TimeSeries::new(vec![last; horizon])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastScore {
    pub mse: f64,
    pub mae: f64,
}

/// Standard MSE/MAE over two equal-length series.
pub fn evaluate_forecast(truth: &TimeSeries, forecast: &TimeSeries) -> Result<ForecastScore> {
    if truth.len() != forecast.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: forecast.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = truth.len() as f64;
    let mut se = 0.0;
    let mut ae = 0.0;
    for (t, f) in truth.values().iter().zip(forecast.values()) {
        let d = t - f;
        se += d * d;
        ae += d.abs();
    }
    Ok(ForecastScore {
        mse: se / n,
        mae: ae / n,
    })
}
