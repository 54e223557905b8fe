//! Time-window stability of divergent n-gram sets.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::divergence::{divergence_records_for, select_divergent, SelectionParams};
use crate::error::{Error, Result};
use crate::quantize::SymbolText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateRange {
    fn of(text: &SymbolText) -> Option<Self> {
        let d = text.dates()?;
        Some(Self { from: *d.first()?, to: *d.last()? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityEntry {
    pub set_a: BTreeSet<String>,
    pub set_b: BTreeSet<String>,
    pub intersection: BTreeSet<String>,
    /// `|A ∩ B| / |A ∪ B|`, 1 when both sets are empty.
    pub jaccard: f64,
}

impl StabilityEntry {
    pub fn new(set_a: BTreeSet<String>, set_b: BTreeSet<String>) -> Self {
        let intersection: BTreeSet<String> = set_a.intersection(&set_b).cloned().collect();
        let union = set_a.union(&set_b).count();
        let jaccard = if union == 0 { 1.0 } else { intersection.len() as f64 / union as f64 };
        Self { set_a, set_b, intersection, jaccard }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub window_a: Option<DateRange>,
    pub window_b: Option<DateRange>,
    pub per_n: BTreeMap<usize, StabilityEntry>,
}

fn divergent_set(text: &SymbolText, n: usize, params: SelectionParams) -> Result<BTreeSet<String>> {
    let records = divergence_records_for(text, n)?;
    match select_divergent(&records, params) {
        Ok(sel) => Ok(sel.into_iter().map(|r| r.ngram).collect()),
        Err(Error::EmptySelection) => Ok(BTreeSet::new()),
        Err(e) => Err(e),
    }
}

/// Compare divergent sets of two texts for each thickness in `n_min..=n_max`.
///
/// A window with nothing selected contributes an empty set.
pub fn window_stability(
    text_a: &SymbolText,
    text_b: &SymbolText,
    n_min: usize,
    n_max: usize,
    params: SelectionParams,
) -> Result<StabilityReport> {
    if text_a.alphabet() != text_b.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    if n_min < 2 || n_min > n_max {
        return Err(Error::InvalidParameter(format!(
            "thickness range {n_min}..={n_max} must satisfy 2 <= n_min <= n_max"
        )));
    }
    params.validate()?;
    let mut per_n = BTreeMap::new();
    for n in n_min..=n_max {
        let a = divergent_set(text_a, n, params)?;
        let b = divergent_set(text_b, n, params)?;
        per_n.insert(n, StabilityEntry::new(a, b));
    }
    Ok(StabilityReport { window_a: DateRange::of(text_a), window_b: DateRange::of(text_b), per_n })
}
