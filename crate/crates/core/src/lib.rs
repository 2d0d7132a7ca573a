//! Symbolic time series approximation.
//!
//! A numerical series is compressed into a polygonal chain of pieces, the
//! pieces are clustered in a normalized tuple space, and each cluster is
//! named with a symbol. Symbol sequences invert back to numerical series, the
//! reconstruction-error bounds are checkable at runtime, and a pluggable
//! symbol predictor turns the whole thing into a forecasting pipeline.
//!
//! ```
//! use abba_core::{
//!     compress_fapca, fit_default_alphabet, forecast, inverse_symbolize, ngram_fit,
//!     DigitizerParams, FitInput, TimeSeries,
//! };
//!
//! let series = TimeSeries::new((0..400).map(|i| (i as f64 * 0.1).sin()).collect())?;
//! let result = compress_fapca(&series, 0.1)?;
//! let out = fit_default_alphabet(&FitInput {
//!     results: vec![result],
//!     scl: 1.0,
//!     digitizer: DigitizerParams::Greedy { alpha: 0.3 },
//! })?;
//!
//! // Symbols back to numbers: the round trip stays within the tolerances.
//! let rebuilt = inverse_symbolize(&out.model, &out.sequences[0], series.values()[0])?;
//! assert_eq!(rebuilt.len(), series.len());
//!
//! // Symbols forward in time: predict 24 future values.
//! let ngram = ngram_fit(&out.sequences, 3, 0.1, &out.model.alphabet)?;
//! let next = forecast(&out.model, &ngram, &series, 24, 0.1)?;
//! assert_eq!(next.len(), 24);
//! # Ok::<(), abba_core::Error>(())
//! ```

pub mod alphabet;
pub mod analysis;
pub mod compression;
pub mod digitization;
pub mod error;
pub mod forecast;
pub mod inverse;
pub mod model;
pub mod types;

pub use alphabet::{Alphabet, AlphabetSource};
pub use analysis::{
    check_compression_bound, check_digitization_bounds, cumulative_error_profile, metrics,
    zipf_csv, zipf_profile, BoundContext, BoundReport, ErrorProfile, Metrics, ZipfEntry,
};
pub use compression::{
    compress_apca, compress_fapca, piece_criterion_holds, reconstruct_chain, CompressionResult,
};
pub use digitization::{
    aggregate_greedy, aggregate_lloyd, fit, fit_default_alphabet, fit_sized, scale_tuples,
    transform, Clustering, DigitizerParams, FitInput, FitOutput,
};
pub use error::{Error, Result};
pub use forecast::{
    evaluate_forecast, forecast, ngram_fit, ngram_predict, persistence_forecast, ForecastScore,
    NGramModel, PredictMode, SampledNGram, SymbolPredictor,
};
pub use inverse::{
    inverse_digitize, inverse_pieces, inverse_symbolize, perturb_and_compare, round_lengths,
    PerturbationReport, ReconstructedPieces,
};
pub use model::{AbbaModel, Codebook, Digitizer, Scaling, SymbolSequence};
pub use types::{Piece, ScaledTuple, TimeSeries, Variant};
