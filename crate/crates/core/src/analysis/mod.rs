//! Divergent n-gram detection and localization, return autocorrelation,
//! window stability, and quantization selection.

mod acf;
mod divergence;
mod stability;
mod staircase;

pub use acf::acf;
pub use divergence::{
    divergence_records, divergence_records_for, localize, overlay_events, select_divergent, DivergenceRecord,
    OverlayRow, SelectionMode, SelectionParams,
};
pub use stability::{window_stability, DateRange, StabilityEntry, StabilityReport};
pub use staircase::{
    optimal_quantization_search, staircase_scan, CandidateScore, QuantizationSearch, StaircaseScan, StaircaseStep,
};
