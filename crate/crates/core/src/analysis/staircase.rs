//! Alphabet staircase stopping rule and information-optimal quantization search.

use serde::{Deserialize, Serialize};

use crate::dict::{build_dictionary, capacity_profile};
use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::quantize::{quantize_series, staircase_alphabets, QuantizationMap};
use crate::surrogate::argmax;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseStep {
    pub k: usize,
    pub cardinality: usize,
    /// Entropy (nats) of the renormalized non-unique sub-dictionary; 0 when it is empty.
    pub entropy: f64,
    pub nonunique: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseScan {
    pub n: usize,
    pub steps: Vec<StaircaseStep>,
    /// Step with maximal entropy, smallest `k` on ties.
    pub best_k: usize,
}

/// Entropy of the non-unique n-grams (`C_w >= 2`) of `D(n)`, renormalized.
fn nonunique_entropy(counts: impl Iterator<Item = u64>) -> (f64, usize) {
    let kept: Vec<u64> = counts.filter(|&c| c >= 2).collect();
    let total: u64 = kept.iter().sum();
    if total == 0 {
        return (0.0, 0);
    }
    let s: f64 = kept
        .iter()
        .map(|&c| {
            let f = c as f64 / total as f64;
            -f * f.ln()
        })
        .sum();
    (s.max(0.0), kept.len())
}

/// For `k = 1..=k_max`, quantize with the `2^k` staircase map and measure the
/// entropy of the non-unique part of `D(n)`.
pub fn staircase_scan(returns: &ReturnSeries, n: usize, k_max: usize) -> Result<StaircaseScan> {
    if n == 0 {
        return Err(Error::InvalidParameter("thickness must be positive".into()));
    }
    let maps = staircase_alphabets(k_max, returns)?;
    let mut steps = Vec::with_capacity(maps.len());
    for (i, map) in maps.iter().enumerate() {
        let text = quantize_series(returns, map)?;
        let dict = build_dictionary(&text, n)?;
        let (entropy, nonunique) = nonunique_entropy(dict.iter().filter_map(|(_, e)| e.count));
        steps.push(StaircaseStep { k: i + 1, cardinality: map.alphabet().cardinality(), entropy, nonunique });
    }
    let best_k = argmax(steps.iter().map(|s| (s.k, s.entropy))).expect("k_max >= 1");
    Ok(StaircaseScan { n, steps, best_k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    /// Thickness of peak capacity, smallest on ties.
    pub j_star: usize,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationSearch {
    /// Index of the winner in the family.
    pub best: usize,
    pub best_map: QuantizationMap,
    pub j_star: usize,
    pub peak: f64,
    pub candidates: Vec<CandidateScore>,
}

/// Pick the map whose capacity profile peaks at the largest thickness; ties
/// go to the larger peak capacity, then to the earlier family member.
pub fn optimal_quantization_search(
    returns: &ReturnSeries,
    family: &[QuantizationMap],
    n_min: usize,
    n_max: usize,
) -> Result<QuantizationSearch> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("quantization family is empty".into()));
    }
    let mut candidates = Vec::with_capacity(family.len());
    for map in family {
        let text = quantize_series(returns, map)?;
        let profile = capacity_profile(&text, n_min, n_max)?;
        let j_star = argmax(profile.iter().copied()).expect("non-empty profile");
        let peak = profile.iter().find(|(n, _)| *n == j_star).map(|&(_, s)| s).unwrap_or(0.0);
        candidates.push(CandidateScore { j_star, peak });
    }
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        let b = candidates[best];
        if c.j_star > b.j_star || (c.j_star == b.j_star && c.peak > b.peak) {
            best = i;
        }
    }
    Ok(QuantizationSearch {
        best,
        best_map: family[best].clone(),
        j_star: candidates[best].j_star,
        peak: candidates[best].peak,
        candidates,
    })
}
