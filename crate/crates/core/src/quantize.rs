//! Output alphabets, threshold quantization and symbolic texts.
//!
//! An alphabet of half-cardinality `N` has `2N` letters indexed by
//! `{-N, ..., -1, 1, ..., N}`; there is no zero index. Letters render as the
//! characters of [`LETTERS`] in index order, so the binary alphabet is `{0, 1}`
//! and lexicographic order of n-gram strings matches index order.
//!
//! A [`QuantizationMap`] partitions the real line with `2N - 1` strictly
//! increasing thresholds. The outermost intervals are unbounded, which clamps
//! extreme returns onto the first and last letters.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;

/// Letter glyphs in index order. ASCII order of these glyphs is increasing.
pub const LETTERS: &[u8; 62] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

pub const MAX_HALF_CARDINALITY: usize = LETTERS.len() / 2;

/// Ordered output alphabet of cardinality `2N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet {
    half: usize,
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;

    fn try_from(half: usize) -> Result<Self> {
        Alphabet::new(half)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.half
    }
}

impl Alphabet {
    pub fn new(half: usize) -> Result<Self> {
        if half == 0 || half > MAX_HALF_CARDINALITY {
            return Err(Error::InvalidAlphabetSize(half));
        }
        Ok(Self { half })
    }

    pub fn binary() -> Self {
        Self { half: 1 }
    }

    /// `N`.
    pub fn half_cardinality(&self) -> usize {
        self.half
    }

    /// `2N`.
    pub fn cardinality(&self) -> usize {
        2 * self.half
    }

    /// Glyph at 0-based position `code` (position `0` is index `-N`).
    pub fn letter(&self, code: usize) -> char {
        assert!(code < self.cardinality(), "letter code {code} out of range");
        LETTERS[code] as char
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        LETTERS[..self.cardinality()].iter().map(|&b| b as char)
    }

    /// 0-based position of a glyph, or `None` if it does not belong to the alphabet.
    pub fn code_of(&self, letter: char) -> Option<usize> {
        let byte = u8::try_from(letter).ok()?;
        LETTERS[..self.cardinality()].iter().position(|&b| b == byte)
    }

    pub fn contains(&self, letter: char) -> bool {
        self.code_of(letter).is_some()
    }

    /// Signed index in `Z_N` of a 0-based position.
    pub fn index_of_code(&self, code: usize) -> i32 {
        let n = self.half as i32;
        let c = code as i32;
        if c < n {
            c - n
        } else {
            c - n + 1
        }
    }

    /// Glyph for a signed index in `Z_N`.
    pub fn letter_for_index(&self, index: i32) -> Option<char> {
        let n = self.half as i32;
        let code = match index {
            i if (-n..0).contains(&i) => i + n,
            i if (1..=n).contains(&i) => i + n - 1,
            _ => return None,
        };
        Some(self.letter(code as usize))
    }
}

/// Which side a value exactly on a threshold falls to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// `p <= t` maps below `t`.
    #[default]
    Lower,
    /// `p >= t` maps above `t`.
    Upper,
}

#[derive(Serialize, Deserialize)]
struct QuantizationMapRepr {
    #[serde(rename = "N")]
    half: usize,
    thresholds: Vec<f64>,
    #[serde(default)]
    tie_policy: TiePolicy,
}

/// Threshold quantizer `R -> alphabet`.
///
/// Serialized as `{"N": .., "thresholds": [..], "tie_policy": "lower"|"upper"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuantizationMapRepr", into = "QuantizationMapRepr")]
pub struct QuantizationMap {
    alphabet: Alphabet,
    thresholds: Vec<f64>,
    tie_policy: TiePolicy,
}

impl TryFrom<QuantizationMapRepr> for QuantizationMap {
    type Error = Error;

    fn try_from(r: QuantizationMapRepr) -> Result<Self> {
        make_threshold_map(r.half, r.thresholds, r.tie_policy)
    }
}

impl From<QuantizationMap> for QuantizationMapRepr {
    fn from(m: QuantizationMap) -> Self {
        QuantizationMapRepr { half: m.alphabet.half, thresholds: m.thresholds, tie_policy: m.tie_policy }
    }
}

impl QuantizationMap {
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    /// 0-based letter position for a value.
    pub fn code(&self, p: f64) -> usize {
        match self.tie_policy {
            TiePolicy::Lower => self.thresholds.partition_point(|&t| t < p),
            TiePolicy::Upper => self.thresholds.partition_point(|&t| t <= p),
        }
    }

    pub fn letter(&self, p: f64) -> char {
        self.alphabet.letter(self.code(p))
    }

    /// Signed `Z_N` index of the letter for a value.
    pub fn index(&self, p: f64) -> i32 {
        self.alphabet.index_of_code(self.code(p))
    }
}

/// Binary up/down map: `'0'` for `p <= 0`, `'1'` for `p > 0`.
pub fn make_binary_alphabet() -> (Alphabet, QuantizationMap) {
    let alphabet = Alphabet::binary();
    let map = QuantizationMap { alphabet, thresholds: vec![0.0], tie_policy: TiePolicy::Lower };
    (alphabet, map)
}

pub fn make_threshold_map(half: usize, thresholds: Vec<f64>, tie_policy: TiePolicy) -> Result<QuantizationMap> {
    let alphabet = Alphabet::new(half)?;
    let expected = 2 * half - 1;
    if thresholds.len() != expected {
        return Err(Error::ThresholdCount { expected, got: thresholds.len() });
    }
    if thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFiniteThreshold);
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneThresholds);
    }
    Ok(QuantizationMap { alphabet, thresholds, tie_policy })
}

/// A quantized text over an alphabet, with optional per-letter dates.
///
/// Letters are stored as their ASCII glyphs, so n-grams are plain substrings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolText {
    letters: String,
    alphabet: Alphabet,
    looped: bool,
    dates: Option<Vec<NaiveDate>>,
}

impl SymbolText {
    pub fn new(letters: impl Into<String>, alphabet: Alphabet) -> Result<Self> {
        let letters = letters.into();
        if letters.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(c) = letters.chars().find(|&c| !alphabet.contains(c)) {
            return Err(Error::ForeignLetter(c));
        }
        Ok(Self { letters, alphabet, looped: false, dates: None })
    }

    /// Binary text from a `0`/`1` string.
    pub fn binary(letters: &str) -> Result<Self> {
        Self::new(letters, Alphabet::binary())
    }

    pub fn with_dates(mut self, dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.len() != self.letters.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dates for a text of length {}",
                dates.len(),
                self.letters.len()
            )));
        }
        self.dates = Some(dates);
        Ok(self)
    }

    pub fn looped(mut self, looped: bool) -> Self {
        self.looped = looped;
        self
    }

    pub fn is_looped(&self) -> bool {
        self.looped
    }

    pub fn as_str(&self) -> &str {
        &self.letters
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.letters.as_bytes()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    /// Text length `L`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Contiguous sub-text `[start, end)`, keeping dates; never looped.
    pub fn slice(&self, start: usize, end: usize) -> Result<SymbolText> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidParameter(format!("bad slice {start}..{end} of length {}", self.len())));
        }
        Ok(SymbolText {
            letters: self.letters[start..end].to_string(),
            alphabet: self.alphabet,
            looped: false,
            dates: self.dates.as_ref().map(|d| d[start..end].to_vec()),
        })
    }
}

impl std::fmt::Display for SymbolText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.letters)
    }
}

/// Map every return to its letter; dates carry through.
pub fn quantize_series(returns: &ReturnSeries, map: &QuantizationMap) -> Result<SymbolText> {
    if returns.is_empty() {
        return Err(Error::EmptySeries);
    }
    let letters: String = returns.values().iter().map(|&p| map.letter(p)).collect();
    Ok(SymbolText { letters, alphabet: map.alphabet, looped: false, dates: returns.dates().map(<[NaiveDate]>::to_vec) })
}

/// Linear-interpolation quantile of a sorted slice at level `num / den`.
///
/// The interpolation position is split with integer arithmetic so that
/// `2j / 2N` and `j / N` give bit-identical thresholds.
fn quantile_sorted(sorted: &[f64], num: usize, den: usize) -> f64 {
    let prod = (sorted.len() - 1) * num;
    let lo = prod / den;
    let rem = prod % den;
    if rem == 0 {
        return sorted[lo];
    }
    let frac = rem as f64 / den as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Maps of cardinality `2^k` for `k = 1..=k_max`.
///
/// The middle threshold is always `0`; the thresholds below it are
/// equal-mass quantiles of the non-positive returns and those above are
/// equal-mass quantiles of the positive returns. Quantile levels nest, so
/// merging adjacent letter pairs of the `2^k` map gives the `2^(k-1)` map.
pub fn staircase_alphabets(k_max: usize, returns: &ReturnSeries) -> Result<Vec<QuantizationMap>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if k_max > 1 && (1usize << (k_max - 1)) > MAX_HALF_CARDINALITY {
        return Err(Error::InvalidAlphabetSize(1 << (k_max - 1)));
    }
    if returns.is_empty() {
        return Err(Error::EmptySeries);
    }
    let values = returns.values();
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateReturns);
    }

    let mut lower: Vec<f64> = values.iter().copied().filter(|&v| v <= 0.0).collect();
    let mut upper: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    lower.sort_by(f64::total_cmp);
    upper.sort_by(f64::total_cmp);

    let mut maps = vec![make_binary_alphabet().1];
    for k in 2..=k_max {
        let half = 1usize << (k - 1);
        if lower.is_empty() || upper.is_empty() {
            return Err(Error::DegenerateReturns);
        }
        let mut thresholds = Vec::with_capacity(2 * half - 1);
        thresholds.extend((1..half).map(|j| quantile_sorted(&lower, j, half)));
        thresholds.push(0.0);
        thresholds.extend((1..half).map(|j| quantile_sorted(&upper, j, half)));
        let map = make_threshold_map(half, thresholds, TiePolicy::Lower).map_err(|e| match e {
            Error::NonMonotoneThresholds => Error::DegenerateReturns,
            other => other,
        })?;
        maps.push(map);
    }
    Ok(maps)
}
