//! Relative information capacity of quantized time series.
//!
//! A price series becomes a symbolic text by quantizing its returns. From the
//! text we count n-gram frequency dictionaries `D(n)`, reconstruct `D(n)` from
//! `D(n - 1)` by the maximum-entropy lift, and measure how much the natural
//! dictionary departs from that reconstruction. The departure, normalized
//! against i.i.d. surrogate texts with the same letter distribution, flags
//! thicknesses and individual n-grams that carry more structure than noise.
//!
//! ```
//! use ngram_infocap::{build_dictionary, capacity_profile, lift1, SymbolText};
//!
//! let text = SymbolText::binary("0110").unwrap();
//! let lifted = lift1(&build_dictionary(&text, 2).unwrap()).unwrap();
//! assert!((lifted.frequency("101") - 1.0 / 3.0).abs() < 1e-12);
//!
//! let profile = capacity_profile(&text, 2, 3).unwrap();
//! assert!((profile[0].1 - (4.0f64 / 3.0).ln()).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod analysis;
pub mod dict;
pub mod error;
pub mod ingest;
pub mod numfmt;
pub mod quantize;
pub mod surrogate;

pub use dict::{build_dictionary, capacity_profile, entropy, info_capacity, lift1, project, FrequencyDictionary};
pub use error::{Error, Result};
pub use ingest::{
    compute_returns, parse_events_csv, parse_price_csv, EventList, PriceSeries, ReturnKind, ReturnSeries,
};
pub use quantize::{
    make_binary_alphabet, make_threshold_map, quantize_series, staircase_alphabets, Alphabet, QuantizationMap,
    SymbolText, TiePolicy,
};
pub use surrogate::{
    estimate_noise_stats, generate_surrogate, letter_distribution, noise_barrier, normalized_capacity, CapacityCurve,
    LetterDistribution, NoiseStats,
};
