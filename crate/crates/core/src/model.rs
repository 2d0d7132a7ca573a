//! The fitted, persistable model bundle and its JSON wire format.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::types::{Piece, ScaledTuple, Variant};

/// Which clustering routine produced the codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Digitizer {
    Greedy,
    Lloyd,
}

impl Digitizer {
    pub fn as_str(self) -> &'static str {
        match self {
            Digitizer::Greedy => "greedy",
            Digitizer::Lloyd => "lloyd",
        }
    }
}

impl fmt::Display for Digitizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Digitizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Digitizer::Greedy),
            "lloyd" => Ok(Digitizer::Lloyd),
            other => Err(Error::ModelJson(format!("unknown digitizer {other:?}"))),
        }
    }
}

/// The normalization statistics that define the scaled tuple space.
///
/// Clustering happens on `(scl * len / sigma_len, second / sigma_second)`.
/// With `scl = 0` the length coordinate is zeroed for clustering, so centers
/// are stored with an effective length weight of 1 to keep lengths
/// recoverable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    pub scl: f64,
    pub sigma_len: f64,
    pub sigma_second: f64,
}

impl Scaling {
    /// Length weight used for center storage and denormalization.
    pub fn scl_eff(&self) -> f64 {
        if self.scl > 0.0 {
            self.scl
        } else {
            1.0
        }
    }

    /// Maps a piece into the space clustering operates on.
    pub fn to_clustering(&self, piece: &Piece) -> ScaledTuple {
        ScaledTuple::new(
            self.scl * piece.len as f64 / self.sigma_len,
            piece.second / self.sigma_second,
        )
    }

    /// A stored center viewed in clustering space.
    pub fn clustering_view(&self, stored: ScaledTuple) -> ScaledTuple {
        if self.scl > 0.0 {
            stored
        } else {
            ScaledTuple::new(0.0, stored.y)
        }
    }

    /// Recovers the real-valued `(len, second)` a stored center stands for.
    pub fn denormalize(&self, stored: ScaledTuple) -> (f64, f64) {
        (
            stored.x * self.sigma_len / self.scl_eff(),
            stored.y * self.sigma_second,
        )
    }
}

/// Ordered cluster centers plus the statistics that define their space.
/// Centers are ranked by descending cardinality, ties by order of creation
/// during clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub centers: Vec<ScaledTuple>,
    pub cardinalities: Vec<usize>,
    pub scaling: Scaling,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// An ordered sequence of alphabet entries, one per piece.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSequence {
    symbols: Vec<String>,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<String>) -> Self {
        Self { symbols }
    }

    pub fn from_strs<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(symbols.into_iter().map(Into::into).collect())
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&str> {
        self.symbols.get(i).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(String::as_str)
    }

    /// Errors on the first symbol not present in `alphabet`.
    pub fn validate_against(&self, alphabet: &Alphabet) -> Result<()> {
        for (position, symbol) in self.symbols.iter().enumerate() {
            if alphabet.position(symbol).is_none() {
                return Err(Error::UnknownSymbol {
                    symbol: symbol.clone(),
                    position,
                });
            }
        }
        Ok(())
    }
}

/// The fitted bundle: variant, hyperparameters, codebook, and alphabet.
/// Center `i` is named by alphabet entry `i`; the mapping is positional and
/// bijective onto the centers.
#[derive(Debug, Clone, PartialEq)]
pub struct AbbaModel {
    pub variant: Variant,
    pub tol: f64,
    /// Greedy aggregation radius; 0.0 for Lloyd-fitted models, where the
    /// cluster count is carried by the codebook instead.
    pub alpha: f64,
    pub digitizer: Digitizer,
    pub codebook: Codebook,
    pub alphabet: Alphabet,
}

impl AbbaModel {
    /// Number of symbols actually backed by centers.
    pub fn k(&self) -> usize {
        self.codebook.len()
    }

    pub fn symbol_for_center(&self, rank: usize) -> Option<&str> {
        if rank < self.k() {
            self.alphabet.get(rank)
        } else {
            None
        }
    }

    /// Center rank for `symbol`, if the symbol names a center.
    pub fn center_for_symbol(&self, symbol: &str) -> Option<usize> {
        self.alphabet
            .position(symbol)
            .filter(|&rank| rank < self.k())
    }

    /// Index of the nearest center in clustering space; ties break toward
    /// the lower rank, i.e. the more frequent center.
    pub fn nearest_center(&self, tuple: ScaledTuple) -> usize {
        let scaling = &self.codebook.scaling;
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &c) in self.codebook.centers.iter().enumerate() {
            let d = tuple.dist_sq(scaling.clustering_view(c));
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Real-valued `(len, second)` for the center at `rank`.
    pub fn denormalized_center(&self, rank: usize) -> (f64, f64) {
        self.codebook
            .scaling
            .denormalize(self.codebook.centers[rank])
    }

    /// Serializes with a fixed field order and 17 significant digits per
    /// float, so equal models produce byte-identical JSON.
    pub fn to_json(&self) -> String {
        let scaling = &self.codebook.scaling;
        let mut out = String::with_capacity(256 + 64 * self.k());
        out.push_str("{\"version\":1,\"variant\":\"");
        out.push_str(self.variant.as_str());
        out.push_str("\",\"tol\":");
        out.push_str(&fmt_f64(self.tol));
        out.push_str(",\"alpha\":");
        out.push_str(&fmt_f64(self.alpha));
        out.push_str(",\"scl\":");
        out.push_str(&fmt_f64(scaling.scl));
        out.push_str(",\"sigma_len\":");
        out.push_str(&fmt_f64(scaling.sigma_len));
        out.push_str(",\"sigma_second\":");
        out.push_str(&fmt_f64(scaling.sigma_second));
        out.push_str(",\"digitizer\":\"");
        out.push_str(self.digitizer.as_str());
        out.push_str("\",\"centers\":[");
        for (i, c) in self.codebook.centers.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            out.push_str(&fmt_f64(c.x));
            out.push(',');
            out.push_str(&fmt_f64(c.y));
            out.push(']');
        }
        out.push_str("],\"cardinalities\":[");
        for (i, card) in self.codebook.cardinalities.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&card.to_string());
        }
        out.push_str("],\"alphabet\":[");
        for (i, sym) in self.alphabet.symbols().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(sym).expect("string serialization is infallible"));
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ModelJson =
            serde_json::from_str(text).map_err(|e| Error::ModelJson(e.to_string()))?;
        if raw.version != 1 {
            return Err(Error::ModelJson(format!(
                "unsupported version {}",
                raw.version
            )));
        }
        let variant: Variant = raw.variant.parse()?;
        let digitizer: Digitizer = raw.digitizer.parse()?;
        for (name, v) in [
            ("tol", raw.tol),
            ("alpha", raw.alpha),
            ("scl", raw.scl),
            ("sigma_len", raw.sigma_len),
            ("sigma_second", raw.sigma_second),
        ] {
            if !v.is_finite() {
                return Err(Error::ModelJson(format!("non-finite {name}")));
            }
        }
        if raw.sigma_len <= 0.0 || raw.sigma_second <= 0.0 {
            return Err(Error::ModelJson(
                "normalization deviations must be positive".into(),
            ));
        }
        if raw.scl < 0.0 {
            return Err(Error::ModelJson("scl must be non-negative".into()));
        }
        if raw.centers.is_empty() {
            return Err(Error::ModelJson("model has no centers".into()));
        }
        if raw.centers.len() != raw.cardinalities.len() {
            return Err(Error::ModelJson(format!(
                "{} centers but {} cardinalities",
                raw.centers.len(),
                raw.cardinalities.len()
            )));
        }
        for c in &raw.centers {
            if !c[0].is_finite() || !c[1].is_finite() {
                return Err(Error::ModelJson("non-finite center".into()));
            }
        }
        let alphabet = infer_alphabet(raw.alphabet)?;
        if alphabet.len() < raw.centers.len() {
            return Err(Error::AlphabetExhausted {
                required: raw.centers.len(),
                available: alphabet.len(),
            });
        }
        Ok(AbbaModel {
            variant,
            tol: raw.tol,
            alpha: raw.alpha,
            digitizer,
            codebook: Codebook {
                centers: raw
                    .centers
                    .iter()
                    .map(|c| ScaledTuple::new(c[0], c[1]))
                    .collect(),
                cardinalities: raw.cardinalities,
                scaling: Scaling {
                    scl: raw.scl,
                    sigma_len: raw.sigma_len,
                    sigma_second: raw.sigma_second,
                },
            },
            alphabet,
        })
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly on re-parse.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn infer_alphabet(symbols: Vec<String>) -> Result<Alphabet> {
    let loaded = Alphabet::from_tokens(symbols).map_err(|e| Error::ModelJson(e.to_string()))?;
    for builder in [Alphabet::default_sized, Alphabet::ascii_extended] {
        if let Ok(generated) = builder(loaded.len()) {
            if generated.symbols() == loaded.symbols() {
                return Ok(generated);
            }
        }
    }
    Ok(loaded)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    version: u32,
    variant: String,
    tol: f64,
    alpha: f64,
    scl: f64,
    sigma_len: f64,
    sigma_second: f64,
    digitizer: String,
    centers: Vec<[f64; 2]>,
    cardinalities: Vec<usize>,
    alphabet: Vec<String>,
}
