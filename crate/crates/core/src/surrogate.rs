//! Monte-Carlo noise baseline for information capacity.
//!
//! Surrogate texts are i.i.d. letter streams with the letter distribution of
//! the input text. Their capacity profiles give the expectation and spread of
//! capacity under pure noise, which normalizes the input's capacity into a
//! sigma distance.
//!
//! # Seeding
//!
//! Randomness comes from ChaCha8 seeded with the 64-bit master seed via
//! `SeedableRng::seed_from_u64`. [`generate_surrogate`] draws from stream 0;
//! replicate `m` (1-based) of [`estimate_noise_stats`] draws from stream `m`.
//! Each letter consumes one `u64`, whose top 53 bits form a uniform
//! `u in [0, 1)` that is inverted through the cumulative distribution in
//! letter order. Replicates are reduced in index order, so results do not
//! depend on thread count.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dict::capacity_profile;
use crate::error::{Error, Result};
use crate::quantize::{Alphabet, SymbolText};

const DIST_TOLERANCE: f64 = 1e-9;

/// Letter probabilities over an alphabet, indexed by letter position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct LetterDistribution {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    #[serde(rename = "N")]
    half: usize,
    probabilities: BTreeMap<char, f64>,
}

impl TryFrom<DistributionRepr> for LetterDistribution {
    type Error = Error;

    fn try_from(r: DistributionRepr) -> Result<Self> {
        LetterDistribution::new(Alphabet::new(r.half)?, r.probabilities)
    }
}

impl From<LetterDistribution> for DistributionRepr {
    fn from(d: LetterDistribution) -> Self {
        let probabilities = d.iter().filter(|&(_, p)| p > 0.0).collect();
        DistributionRepr { half: d.alphabet.half_cardinality(), probabilities }
    }
}

impl LetterDistribution {
    /// Distribution from letter probabilities; letters not listed get zero.
    pub fn new(alphabet: Alphabet, probabilities: impl IntoIterator<Item = (char, f64)>) -> Result<Self> {
        let mut probs = vec![0.0; alphabet.cardinality()];
        for (letter, p) in probabilities {
            let code = alphabet.code_of(letter).ok_or(Error::ForeignLetter(letter))?;
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidDistribution(format!("probability {p} for `{letter}`")));
            }
            probs[code] += p;
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DIST_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self { alphabet, probs })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn probability(&self, letter: char) -> f64 {
        self.alphabet.code_of(letter).map_or(0.0, |c| self.probs[c])
    }

    /// `(letter, probability)` in alphabet order, including zero entries.
    pub fn iter(&self) -> impl Iterator<Item = (char, f64)> + '_ {
        self.alphabet.letters().zip(self.probs.iter().copied())
    }
}

/// Empirical letter frequencies `D(1)` of a text.
pub fn letter_distribution(text: &SymbolText) -> LetterDistribution {
    let alphabet = text.alphabet();
    let mut counts = vec![0u64; alphabet.cardinality()];
    for c in text.as_str().chars() {
        // SymbolText guarantees membership.
        counts[alphabet.code_of(c).expect("letter in alphabet")] += 1;
    }
    let len = text.len() as f64;
    LetterDistribution { alphabet, probs: counts.into_iter().map(|c| c as f64 / len).collect() }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_text(dist: &LetterDistribution, len: usize, rng: &mut ChaCha8Rng) -> SymbolText {
    let mut cumulative = Vec::with_capacity(dist.probs.len());
    let mut acc = 0.0;
    for &p in &dist.probs {
        acc += p;
        cumulative.push(acc);
    }
    let fallback = dist.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let letters: String = (0..len)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let code = cumulative.iter().position(|&c| u < c).unwrap_or(fallback);
            dist.alphabet.letter(code)
        })
        .collect();
    SymbolText::new(letters, dist.alphabet).expect("sampled letters belong to the alphabet")
}

/// i.i.d. text of length `len` drawn from `dist`, deterministic in `seed`.
pub fn generate_surrogate(dist: &LetterDistribution, len: usize, seed: u64) -> Result<SymbolText> {
    if len == 0 {
        return Err(Error::InvalidParameter("surrogate length must be positive".into()));
    }
    Ok(sample_text(dist, len, &mut rng_for(seed, 0)))
}

/// Replicate `m` of a noise ensemble (streams are 1-based).
pub fn replicate_surrogate(dist: &LetterDistribution, len: usize, seed: u64, m: u64) -> Result<SymbolText> {
    if len == 0 {
        return Err(Error::InvalidParameter("surrogate length must be positive".into()));
    }
    Ok(sample_text(dist, len, &mut rng_for(seed, m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMoments {
    pub mean: f64,
    pub sd: f64,
}

/// Noise capacity moments per thickness, with every generating parameter embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseStats {
    pub per_n: BTreeMap<usize, NoiseMoments>,
    pub replicates: usize,
    pub seed: u64,
    pub length: usize,
    pub letter_dist: LetterDistribution,
}

/// Sample mean and standard deviation (denominator `M - 1`) of noise capacities.
pub fn estimate_noise_stats(
    dist: &LetterDistribution,
    len: usize,
    n_min: usize,
    n_max: usize,
    replicates: usize,
    seed: u64,
) -> Result<NoiseStats> {
    if replicates < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 replicates, got {replicates}")));
    }
    let profiles: Vec<Vec<(usize, f64)>> = (1..=replicates as u64)
        .into_par_iter()
        .map(|m| {
            let text = replicate_surrogate(dist, len, seed, m)?;
            capacity_profile(&text, n_min, n_max)
        })
        .collect::<Result<_>>()?;

    let m = replicates as f64;
    let mut per_n = BTreeMap::new();
    for (i, n) in (n_min..=n_max).enumerate() {
        let mean = profiles.iter().map(|p| p[i].1).sum::<f64>() / m;
        let var = profiles.iter().map(|p| (p[i].1 - mean).powi(2)).sum::<f64>() / (m - 1.0);
        per_n.insert(n, NoiseMoments { mean, sd: var.sqrt() });
    }
    Ok(NoiseStats { per_n, replicates, seed, length: len, letter_dist: dist.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub raw: f64,
    pub noise_mean: f64,
    pub noise_sd: f64,
    /// `(raw - mean) / sd`; `None` when the noise has zero spread and `raw` differs from it.
    pub normalized: Option<f64>,
    pub degenerate_noise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCurve {
    pub per_n: BTreeMap<usize, CapacityPoint>,
    pub noise_barrier: f64,
}

impl CapacityCurve {
    /// Thickness with the largest raw capacity (smallest on ties).
    pub fn peak(&self) -> Option<usize> {
        argmax(self.per_n.iter().map(|(&n, p)| (n, p.raw)))
    }
}

pub(crate) fn argmax(values: impl IntoIterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (n, v) in values {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((n, v));
        }
    }
    best.map(|(n, _)| n)
}

/// Absolute tolerance, in nats, for treating a raw capacity as equal to a zero-spread noise mean.
const DEGENERATE_TOLERANCE: f64 = 1e-12;

/// Sigma distance of each raw capacity from its noise expectation.
pub fn normalized_capacity(profile: &[(usize, f64)], stats: &NoiseStats) -> Result<CapacityCurve> {
    let mut per_n = BTreeMap::new();
    for &(n, raw) in profile {
        let moments = stats.per_n.get(&n).ok_or(Error::MissingNoiseStats(n))?;
        let (normalized, degenerate_noise) = if moments.sd > 0.0 {
            (Some((raw - moments.mean) / moments.sd), false)
        } else if (raw - moments.mean).abs() <= DEGENERATE_TOLERANCE {
            (Some(0.0), false)
        } else {
            (None, true)
        };
        per_n.insert(
            n,
            CapacityPoint { raw, noise_mean: moments.mean, noise_sd: moments.sd, normalized, degenerate_noise },
        );
    }
    let noise_barrier = noise_barrier(stats.letter_dist.alphabet().cardinality(), stats.length)?;
    Ok(CapacityCurve { per_n, noise_barrier })
}

/// `log_k L`, the thickness beyond which finite-length noise dominates.
pub fn noise_barrier(cardinality: usize, len: usize) -> Result<f64> {
    if cardinality < 2 || len < 2 {
        return Err(Error::InvalidParameter(format!(
            "noise barrier needs cardinality >= 2 and length >= 2, got {cardinality} and {len}"
        )));
    }
    Ok((len as f64).ln() / (cardinality as f64).ln())
}
