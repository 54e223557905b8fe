//! n-gram frequency dictionaries.
//!
//! A dictionary of thickness `n` maps each n-gram present in a text to its
//! count and frequency. From it we derive:
//!
//! * the projection `P_k`, which drops the last `k` letters and sums
//!   frequencies (a suffix-drop marginal);
//! * the max-entropy 1-lift, the Kirkwood product
//!   `f~(a w b) = f(a w) * f(w b) / g(w)` with `g` the 1-projection of the
//!   dictionary (for thickness 1, `g` is 1 and the lift is the product of
//!   letter frequencies);
//! * the information capacity of a thickness-`j` dictionary, the relative
//!   entropy of the natural `D(j)` against the lift of `D(j-1)`.
//!
//! For a non-looped text the prefix and suffix marginals of `D(n)` differ at
//! the text boundary, so the raw Kirkwood weights can miss a little mass. The
//! lift is renormalized and the missing mass is kept as
//! [`FrequencyDictionary::mass_defect`].

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::round_significant;
use crate::quantize::{Alphabet, SymbolText};

/// How a dictionary was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Counted from a text.
    Natural,
    /// Marginalized from a thicker dictionary.
    Projected,
    /// Reconstructed by the max-entropy lift.
    Lifted,
    /// Built from caller-supplied frequencies.
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DictEntry {
    /// `C_w`; absent for lifted and synthetic dictionaries.
    pub count: Option<u64>,
    /// `f_w`, always positive.
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyDictionary {
    thickness: usize,
    alphabet: Alphabet,
    entries: BTreeMap<String, DictEntry>,
    total: Option<u64>,
    provenance: Provenance,
    mass_defect: f64,
}

const SUM_TOLERANCE: f64 = 1e-9;

impl FrequencyDictionary {
    /// Dictionary from arbitrary positive weights, normalized to sum 1.
    ///
    /// Zero weights are dropped; every key must have length `thickness` and
    /// use only letters of `alphabet`.
    pub fn from_weights<I, S>(alphabet: Alphabet, thickness: usize, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        if thickness == 0 {
            return Err(Error::InvalidParameter("thickness must be positive".into()));
        }
        let mut entries = BTreeMap::new();
        for (key, w) in weights {
            let key = key.into();
            check_key(&key, thickness, alphabet)?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!("weight {w} for `{key}`")));
            }
            if w > 0.0 {
                entries.entry(key).or_insert(DictEntry { count: None, frequency: 0.0 }).frequency += w;
            }
        }
        let sum: f64 = entries.values().map(|e| e.frequency).sum();
        if sum <= 0.0 {
            return Err(Error::InvalidParameter("dictionary has no positive weight".into()));
        }
        for e in entries.values_mut() {
            e.frequency /= sum;
        }
        Ok(Self { thickness, alphabet, entries, total: None, provenance: Provenance::Synthetic, mass_defect: 0.0 })
    }

    /// Natural dictionary from n-gram counts; frequencies are `C_w / C_*`.
    pub fn from_counts<I, S>(alphabet: Alphabet, thickness: usize, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        if thickness == 0 {
            return Err(Error::InvalidParameter("thickness must be positive".into()));
        }
        let mut raw: BTreeMap<String, u64> = BTreeMap::new();
        for (key, c) in counts {
            let key = key.into();
            check_key(&key, thickness, alphabet)?;
            if c > 0 {
                *raw.entry(key).or_default() += c;
            }
        }
        let total: u64 = raw.values().sum();
        if total == 0 {
            return Err(Error::InvalidParameter("dictionary has no occurrences".into()));
        }
        let entries = raw
            .into_iter()
            .map(|(k, c)| (k, DictEntry { count: Some(c), frequency: c as f64 / total as f64 }))
            .collect();
        Ok(Self { thickness, alphabet, entries, total: Some(total), provenance: Provenance::Natural, mass_defect: 0.0 })
    }

    pub fn thickness(&self) -> usize {
        self.thickness
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// `C_*`, the number of windows counted, for natural and projected dictionaries.
    pub fn total(&self) -> Option<u64> {
        self.total
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `1 - sum` of the raw Kirkwood weights before renormalization (lifted only).
    pub fn mass_defect(&self) -> f64 {
        self.mass_defect
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, ngram: &str) -> Option<&DictEntry> {
        self.entries.get(ngram)
    }

    /// `f_w`, or `0` outside the support.
    pub fn frequency(&self, ngram: &str) -> f64 {
        self.entries.get(ngram).map_or(0.0, |e| e.frequency)
    }

    pub fn contains(&self, ngram: &str) -> bool {
        self.entries.contains_key(ngram)
    }

    /// Entries in lexicographic n-gram order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &DictEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Entries whose n-gram starts with `prefix` (of length `thickness - 1`).
    fn extensions<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a DictEntry)> + 'a {
        self.entries
            .range::<str, _>((Bound::Included(prefix), Bound::Unbounded))
            .take_while(move |(k, _)| k.starts_with(prefix))
            .map(|(k, v)| (k.as_str(), v))
    }

    /// Checks the stored invariants.
    pub fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for (k, e) in &self.entries {
            check_key(k, self.thickness, self.alphabet)?;
            if !(e.frequency > 0.0 && e.frequency <= 1.0 + SUM_TOLERANCE) {
                return Err(Error::InvariantViolation(format!("frequency {} for `{k}`", e.frequency)));
            }
            sum += e.frequency;
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvariantViolation(format!("frequencies sum to {sum}")));
        }
        Ok(())
    }

    /// CSV dump with header `ngram,count,frequency`, lexicographically sorted.
    ///
    /// Frequencies are written with 12 significant digits; `count` is empty
    /// when the dictionary carries no counts.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["ngram", "count", "frequency"])?;
        for (k, e) in &self.entries {
            let count = e.count.map(|c| c.to_string()).unwrap_or_default();
            let freq = round_significant(e.frequency, 12).to_string();
            w.write_record([k.as_str(), count.as_str(), freq.as_str()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

fn check_key(key: &str, thickness: usize, alphabet: Alphabet) -> Result<()> {
    if key.len() != thickness || key.chars().count() != thickness {
        return Err(Error::InvalidParameter(format!("n-gram `{key}` does not have length {thickness}")));
    }
    if let Some(c) = key.chars().find(|&c| !alphabet.contains(c)) {
        return Err(Error::ForeignLetter(c));
    }
    Ok(())
}

/// Count all n-grams of a text.
///
/// A non-looped text has `L - n + 1` windows; a looped text has `L`, the
/// last `n - 1` of which wrap around to the start.
pub fn build_dictionary(text: &SymbolText, n: usize) -> Result<FrequencyDictionary> {
    let len = text.len();
    if n == 0 {
        return Err(Error::InvalidParameter("thickness must be positive".into()));
    }
    if n > len {
        return Err(Error::TextTooShort { len, n });
    }
    let wrapped;
    let (buf, windows) = if text.is_looped() {
        wrapped = format!("{}{}", text.as_str(), &text.as_str()[..n - 1]);
        (wrapped.as_str(), len)
    } else {
        (text.as_str(), len - n + 1)
    };

    let mut counts: HashMap<&str, u64> = HashMap::with_capacity(windows.min(1 << 16));
    for i in 0..windows {
        *counts.entry(&buf[i..i + n]).or_default() += 1;
    }
    let total = windows as u64;
    let entries = counts
        .into_iter()
        .map(|(k, c)| (k.to_string(), DictEntry { count: Some(c), frequency: c as f64 / total as f64 }))
        .collect();
    Ok(FrequencyDictionary {
        thickness: n,
        alphabet: text.alphabet(),
        entries,
        total: Some(total),
        provenance: Provenance::Natural,
        mass_defect: 0.0,
    })
}

/// `P_k`: the thickness `n - k` dictionary obtained by summing over the last `k` letters.
pub fn project(dict: &FrequencyDictionary, k: usize) -> Result<FrequencyDictionary> {
    if k == 0 || k >= dict.thickness {
        return Err(Error::InvalidParameter(format!("projection depth {k} must be in 1..{}", dict.thickness)));
    }
    let m = dict.thickness - k;
    let mut entries: BTreeMap<String, DictEntry> = BTreeMap::new();
    let has_counts = dict.entries.values().all(|e| e.count.is_some());
    for (key, e) in &dict.entries {
        let slot =
            entries.entry(key[..m].to_string()).or_insert(DictEntry { count: has_counts.then_some(0), frequency: 0.0 });
        slot.frequency += e.frequency;
        if let (Some(c), Some(add)) = (slot.count.as_mut(), e.count) {
            *c += add;
        }
    }
    Ok(FrequencyDictionary {
        thickness: m,
        alphabet: dict.alphabet,
        entries,
        total: dict.total,
        provenance: Provenance::Projected,
        mass_defect: 0.0,
    })
}

/// Max-entropy 1-lift of a dictionary (Kirkwood reconstruction).
pub fn lift1(dict: &FrequencyDictionary) -> Result<FrequencyDictionary> {
    let q = dict.thickness;
    let marginal = if q > 1 { Some(project(dict, 1)?) } else { None };

    let mut entries: BTreeMap<String, DictEntry> = BTreeMap::new();
    let mut raw_sum = 0.0;
    for (word, e) in &dict.entries {
        let overlap = &word[1..];
        let denom = match &marginal {
            Some(g) => g.frequency(overlap),
            None => 1.0,
        };
        if denom <= 0.0 {
            continue;
        }
        for (next, e2) in dict.extensions(overlap) {
            let f = e.frequency * e2.frequency / denom;
            let mut key = String::with_capacity(q + 1);
            key.push_str(word);
            key.push_str(&next[q - 1..]);
            raw_sum += f;
            entries.insert(key, DictEntry { count: None, frequency: f });
        }
    }
    if entries.is_empty() || raw_sum <= 0.0 {
        return Err(Error::EmptyLift);
    }
    for e in entries.values_mut() {
        e.frequency /= raw_sum;
    }
    Ok(FrequencyDictionary {
        thickness: q + 1,
        alphabet: dict.alphabet,
        entries,
        total: None,
        provenance: Provenance::Lifted,
        mass_defect: 1.0 - raw_sum,
    })
}

/// Shannon entropy `-sum f ln f` in nats.
pub fn entropy(dict: &FrequencyDictionary) -> f64 {
    let s: f64 = dict.entries.values().map(|e| -e.frequency * e.frequency.ln()).sum();
    s.max(0.0)
}

/// Relative entropy `sum f ln(f / f~)` of a natural dictionary against a
/// lifted one of the same thickness, in nats.
///
/// Identical dictionaries give exactly zero; otherwise rounding can leave
/// the sum a few ulps below zero, so the result is floored at zero.
pub fn info_capacity(natural: &FrequencyDictionary, lifted: &FrequencyDictionary) -> Result<f64> {
    if natural.thickness != lifted.thickness {
        return Err(Error::ThicknessMismatch { left: natural.thickness, right: lifted.thickness });
    }
    let mut s = 0.0;
    for (w, e) in &natural.entries {
        let f_lift = lifted.frequency(w);
        if f_lift <= 0.0 {
            return Err(Error::SupportMismatch(w.clone()));
        }
        s += e.frequency * (e.frequency / f_lift).ln();
    }
    Ok(s.max(0.0))
}

/// `S_n` for `n` in `n_min..=n_max`, each against the lift of `D(n - 1)` of the same text.
pub fn capacity_profile(text: &SymbolText, n_min: usize, n_max: usize) -> Result<Vec<(usize, f64)>> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::InvalidParameter(format!(
            "thickness range {n_min}..={n_max} must satisfy 2 <= n_min <= n_max"
        )));
    }
    if n_max > text.len() {
        return Err(Error::TextTooShort { len: text.len(), n: n_max });
    }
    let mut profile = Vec::with_capacity(n_max - n_min + 1);
    let mut prev = build_dictionary(text, n_min - 1)?;
    for n in n_min..=n_max {
        let natural = build_dictionary(text, n)?;
        let lifted = lift1(&prev)?;
        profile.push((n, info_capacity(&natural, &lifted)?));
        prev = natural;
    }
    Ok(profile)
}
