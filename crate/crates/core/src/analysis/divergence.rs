//! Divergent n-grams: per-n-gram contributions to information capacity,
//! threshold selection and time localization.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dict::{build_dictionary, lift1, FrequencyDictionary};
use crate::error::{Error, Result};
use crate::ingest::EventList;
use crate::quantize::SymbolText;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRecord {
    pub ngram: String,
    /// Natural frequency.
    pub f: f64,
    pub f_lifted: f64,
    /// `|ln f - ln f_lifted|`.
    pub divergence: f64,
    pub count: u64,
    /// 0-based start offsets of every occurrence.
    pub positions: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dates: Option<Vec<NaiveDate>>,
}

impl DivergenceRecord {
    /// Signed contribution `f ln(f / f_lifted)` of this n-gram to the capacity.
    pub fn contribution(&self) -> f64 {
        self.f * (self.f / self.f_lifted).ln()
    }
}

/// One record per n-gram of `natural`, sorted by decreasing divergence and
/// then lexicographically.
pub fn divergence_records(
    natural: &FrequencyDictionary,
    lifted: &FrequencyDictionary,
    text: &SymbolText,
) -> Result<Vec<DivergenceRecord>> {
    let n = natural.thickness();
    if lifted.thickness() != n {
        return Err(Error::ThicknessMismatch { left: n, right: lifted.thickness() });
    }
    let len = text.len();
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
    let mut positions: HashMap<&str, Vec<usize>> = HashMap::new();
    for i in 0..windows {
        positions.entry(&buf[i..i + n]).or_default().push(i);
    }

    let mut records = Vec::with_capacity(natural.len());
    for (w, e) in natural.iter() {
        let f_lifted = lifted.frequency(w);
        if f_lifted <= 0.0 {
            return Err(Error::SupportMismatch(w.to_string()));
        }
        let positions = positions.remove(w).unwrap_or_default();
        if positions.is_empty() || e.count.is_some_and(|c| c != positions.len() as u64) {
            return Err(Error::TextMismatch(w.to_string()));
        }
        let dates = text.dates().map(|d| positions.iter().map(|&p| d[p]).collect());
        records.push(DivergenceRecord {
            ngram: w.to_string(),
            f: e.frequency,
            f_lifted,
            divergence: (e.frequency.ln() - f_lifted.ln()).abs(),
            count: positions.len() as u64,
            positions,
            dates,
        });
    }
    records.sort_by(|a, b| b.divergence.total_cmp(&a.divergence).then_with(|| a.ngram.cmp(&b.ngram)));
    Ok(records)
}

/// Records for `D(n)` of a text against the lift of its `D(n - 1)`.
pub fn divergence_records_for(text: &SymbolText, n: usize) -> Result<Vec<DivergenceRecord>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("thickness {n} has no lower dictionary to lift")));
    }
    let natural = build_dictionary(text, n)?;
    let lifted = lift1(&build_dictionary(text, n - 1)?)?;
    divergence_records(&natural, &lifted, text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum SelectionMode {
    /// Keep n-grams with divergence strictly above `|ln alpha|`.
    Alpha(f64),
    /// Keep the most divergent n-grams until their occurrences cover this
    /// fraction of all windows.
    Percentile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub mode: SelectionMode,
    /// Drop n-grams occurring exactly once before selecting.
    pub exclude_unique: bool,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self { mode: SelectionMode::Percentile(0.05), exclude_unique: true }
    }
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            SelectionMode::Alpha(a) if !(a.is_finite() && a > 0.0) => {
                Err(Error::InvalidParameter(format!("alpha must be positive, got {a}")))
            }
            SelectionMode::Percentile(p) if !(p > 0.0 && p <= 1.0) => {
                Err(Error::InvalidParameter(format!("percentile must be in (0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }
}

/// Select divergent n-grams from records sorted as [`divergence_records`] emits them.
///
/// Percentile coverage is measured in occurrences against `C_*`, the summed
/// count of all records. When the eligible records cannot reach the target
/// coverage, all of them are returned.
pub fn select_divergent(records: &[DivergenceRecord], params: SelectionParams) -> Result<Vec<DivergenceRecord>> {
    params.validate()?;
    let eligible = records.iter().filter(|r| !params.exclude_unique || r.count > 1);
    let selected: Vec<DivergenceRecord> = match params.mode {
        SelectionMode::Alpha(alpha) => {
            let threshold = alpha.ln().abs();
            eligible.filter(|r| r.divergence > threshold).cloned().collect()
        }
        SelectionMode::Percentile(p) => {
            let total: u64 = records.iter().map(|r| r.count).sum();
            let target = p * total as f64;
            let mut covered = 0u64;
            let mut out = Vec::new();
            for r in eligible {
                if covered as f64 >= target {
                    break;
                }
                covered += r.count;
                out.push(r.clone());
            }
            out
        }
    };
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(selected)
}

/// One dated occurrence of a selected n-gram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlayRow {
    pub ngram: String,
    pub n: usize,
    pub start_date: NaiveDate,
    /// Date of the occurrence's last letter.
    pub end_date: NaiveDate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_label: Option<String>,
}

/// Occurrence rows for the selected n-grams, in selection then position order.
pub fn localize(selected: &[DivergenceRecord], text: &SymbolText) -> Result<Vec<OverlayRow>> {
    let dates = text.dates().ok_or(Error::NoDates)?;
    let len = text.len();
    let mut rows = Vec::new();
    for r in selected {
        let n = r.ngram.len();
        for &p in &r.positions {
            if p >= len {
                return Err(Error::TextMismatch(r.ngram.clone()));
            }
            rows.push(OverlayRow {
                ngram: r.ngram.clone(),
                n,
                start_date: dates[p],
                end_date: dates[(p + n - 1) % len],
                event_label: None,
            });
        }
    }
    Ok(rows)
}

/// Attach labels of events dated within each row's span; several labels join with `"; "`.
pub fn overlay_events(rows: &mut [OverlayRow], events: &EventList) {
    for row in rows {
        let labels: Vec<&str> = events.between(row.start_date, row.end_date).map(|e| e.label.as_str()).collect();
        row.event_label = (!labels.is_empty()).then(|| labels.join("; "));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dict::info_capacity;
    use crate::ingest::Event;
    use proptest::prelude::*;

    fn bin(s: &str) -> SymbolText {
        SymbolText::binary(s).unwrap()
    }

    fn day(i: u64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(i)
    }

    fn dated(s: &str) -> SymbolText {
        bin(s).with_dates((0..s.len() as u64).map(day).collect()).unwrap()
    }

    fn record(ngram: &str, divergence: f64, count: u64) -> DivergenceRecord {
        DivergenceRecord {
            ngram: ngram.into(),
            f: 0.1,
            f_lifted: 0.1,
            divergence,
            count,
            positions: (0..count as usize).collect(),
            dates: None,
        }
    }

    #[test]
    fn worked_record() {
        let recs = divergence_records_for(&bin("0110"), 2).unwrap();
        let r = recs.iter().find(|r| r.ngram == "01").unwrap();
        assert!((r.f - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.f_lifted - 0.25).abs() < 1e-12);
        assert!((r.divergence - (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(r.count, 1);
        assert_eq!(r.positions, vec![0]);
        // All three divergences tie, so order is lexicographic.
        let order: Vec<&str> = recs.iter().map(|r| r.ngram.as_str()).collect();
        assert_eq!(order, vec!["01", "10", "11"]);
    }

    #[test]
    fn identical_dictionaries_give_zero_divergence() {
        let t = bin("0110100110");
        let d = build_dictionary(&t, 3).unwrap();
        let recs = divergence_records(&d, &d, &t).unwrap();
        assert!(recs.iter().all(|r| r.divergence == 0.0));
    }

    #[test]
    fn looped_positions_include_wraparound() {
        let t = bin("0110").looped(true);
        let natural = build_dictionary(&t, 2).unwrap();
        let lifted = lift1(&build_dictionary(&t, 1).unwrap()).unwrap();
        let recs = divergence_records(&natural, &lifted, &t).unwrap();
        let r = recs.iter().find(|r| r.ngram == "00").unwrap();
        assert_eq!(r.positions, vec![3]);
    }

    #[test]
    fn mismatched_text_is_rejected() {
        let natural = build_dictionary(&bin("0110"), 2).unwrap();
        let lifted = lift1(&build_dictionary(&bin("0110"), 1).unwrap()).unwrap();
        assert!(matches!(divergence_records(&natural, &lifted, &bin("0101")), Err(Error::TextMismatch(_))));
    }

    #[test]
    fn alpha_selection() {
        let recs = divergence_records_for(&bin("0110"), 2).unwrap();
        let params = SelectionParams { mode: SelectionMode::Alpha(1.2), exclude_unique: false };
        let sel = select_divergent(&recs, params).unwrap();
        assert!(sel.iter().any(|r| r.ngram == "01"));
        // 1/1.2 is the same threshold.
        let inv = SelectionParams { mode: SelectionMode::Alpha(1.0 / 1.2), exclude_unique: false };
        assert_eq!(select_divergent(&recs, inv).unwrap(), sel);
        let strict = SelectionParams { mode: SelectionMode::Alpha(1.4), exclude_unique: false };
        assert!(matches!(select_divergent(&recs, strict), Err(Error::EmptySelection)));
    }

    #[test]
    fn alpha_one_keeps_every_mismatch() {
        let recs = vec![record("00", 0.0, 3), record("01", 1e-9, 3)];
        let params = SelectionParams { mode: SelectionMode::Alpha(1.0), exclude_unique: true };
        let sel = select_divergent(&recs, params).unwrap();
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].ngram, "01");
    }

    #[test]
    fn percentile_selection() {
        let recs = divergence_records_for(&bin("0110100110010110"), 3).unwrap();
        let all = SelectionParams { mode: SelectionMode::Percentile(1.0), exclude_unique: false };
        assert_eq!(select_divergent(&recs, all).unwrap(), recs);

        let recs = vec![record("000", 0.9, 1), record("001", 0.8, 2), record("010", 0.5, 3), record("011", 0.1, 4)];
        let p = |p| SelectionParams { mode: SelectionMode::Percentile(p), exclude_unique: true };
        // C_* = 10; 0.2 -> 2 occurrences, met by "001" alone.
        let sel: Vec<String> = select_divergent(&recs, p(0.2)).unwrap().into_iter().map(|r| r.ngram).collect();
        assert_eq!(sel, vec!["001"]);
        let sel: Vec<String> = select_divergent(&recs, p(0.3)).unwrap().into_iter().map(|r| r.ngram).collect();
        assert_eq!(sel, vec!["001", "010"]);

        let unique = vec![record("000", 0.9, 1), record("001", 0.8, 1)];
        assert!(matches!(select_divergent(&unique, p(0.05)), Err(Error::EmptySelection)));
        assert!(select_divergent(&unique, p(0.0)).is_err());
        assert!(select_divergent(&unique, p(1.5)).is_err());
    }

    #[test]
    fn localize_examples() {
        let t = dated("0110100");
        let r = DivergenceRecord { positions: vec![0, 4], ..record("011", 0.5, 2) };
        let rows = localize(&[r], &t).unwrap();
        assert_eq!(rows[0].start_date, day(0));
        assert_eq!(rows[0].end_date, day(2));
        assert_eq!(rows[1].start_date, day(4));
        assert_eq!(rows[1].end_date, day(6));
        assert!(localize(&[], &t).unwrap().is_empty());
        assert!(matches!(localize(&[], &bin("01")), Err(Error::NoDates)));
    }

    #[test]
    fn events_join_on_overlap() {
        let t = dated("0110100");
        let r = DivergenceRecord { positions: vec![0, 4], ..record("011", 0.5, 2) };
        let mut rows = localize(&[r], &t).unwrap();
        let events = EventList {
            entries: vec![
                Event { date: day(1), label: "A".into() },
                Event { date: day(2), label: "B".into() },
                Event { date: day(10), label: "C".into() },
            ],
        };
        overlay_events(&mut rows, &events);
        assert_eq!(rows[0].event_label.as_deref(), Some("A; B"));
        assert_eq!(rows[1].event_label, None);
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::bool::weighted(0.45), 30..400)
            .prop_map(|b| b.into_iter().map(|x| if x { '1' } else { '0' }).collect())
    }

    proptest! {
        #[test]
        fn records_decompose_capacity(s in text_strategy(), n in 2usize..9) {
            let t = bin(&s);
            let natural = build_dictionary(&t, n).unwrap();
            let lifted = lift1(&build_dictionary(&t, n - 1).unwrap()).unwrap();
            let recs = divergence_records(&natural, &lifted, &t).unwrap();
            let sum: f64 = recs.iter().map(DivergenceRecord::contribution).sum();
            let cap = info_capacity(&natural, &lifted).unwrap();
            prop_assert!((sum - cap).abs() <= 1e-9);
            for r in &recs {
                prop_assert!(r.divergence >= 0.0);
                prop_assert_eq!(r.positions.len() as u64, r.count);
                for &p in &r.positions {
                    prop_assert_eq!(&s[p..p + n], r.ngram.as_str());
                }
            }
        }

        #[test]
        fn selection_is_monotone(s in text_strategy(), n in 3usize..8, a in 1.0f64..3.0, b in 1.0f64..3.0, p in 0.01f64..1.0, q in 0.01f64..1.0) {
            let recs = divergence_records_for(&bin(&s), n).unwrap();
            let pick = |mode| -> Vec<String> {
                select_divergent(&recs, SelectionParams { mode, exclude_unique: true })
                    .map(|v| v.into_iter().map(|r| r.ngram).collect())
                    .unwrap_or_default()
            };
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let loose = pick(SelectionMode::Alpha(lo));
            for w in pick(SelectionMode::Alpha(hi)) {
                prop_assert!(loose.contains(&w));
            }
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            let wide = pick(SelectionMode::Percentile(hi));
            for w in pick(SelectionMode::Percentile(lo)) {
                prop_assert!(wide.contains(&w));
            }
        }
    }
}
