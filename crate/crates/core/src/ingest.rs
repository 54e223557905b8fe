//! Price and event CSV ingestion, and return series.
//!
//! Input files are header-bearing RFC-4180 CSV with ISO-8601 dates in a
//! column literally named `Date`. Prices must be already adjusted; blank or
//! non-numeric cells are rejected rather than interpolated.

use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATE_COLUMN: &str = "Date";
pub const DEFAULT_PRICE_COLUMN: &str = "Adj Close";
pub const LABEL_COLUMN: &str = "Label";

const DATE_FORMAT: &str = "%Y-%m-%d";

/// Dated positive prices, strictly increasing in date.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::InvalidParameter(format!("{} dates but {} prices", dates.len(), prices.len())));
        }
        if dates.len() < 2 {
            return Err(Error::TooShort { len: dates.len() });
        }
        // Rows are reported 1-based after the header for consistency with the parser.
        for (i, &p) in prices.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonNumericPrice { row: i + 2, value: p.to_string() });
            }
            if p <= 0.0 {
                return Err(Error::NonPositivePrice { row: i + 2, value: p });
            }
        }
        for (i, pair) in dates.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(Error::DuplicateDate { row: i + 3, date: pair[1] });
            }
        }
        Ok(Self { dates, prices })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    /// Sub-series with dates in `[from, to]`, or `None` when fewer than two rows remain.
    pub fn window(&self, from: NaiveDate, to: NaiveDate) -> Option<PriceSeries> {
        let lo = self.dates.partition_point(|d| *d < from);
        let hi = self.dates.partition_point(|d| *d <= to);
        if hi < lo + 2 {
            return None;
        }
        Some(PriceSeries { dates: self.dates[lo..hi].to_vec(), prices: self.prices[lo..hi].to_vec() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    Log,
    Simple,
}

impl std::str::FromStr for ReturnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(ReturnKind::Log),
            "simple" => Ok(ReturnKind::Simple),
            other => Err(Error::InvalidParameter(format!("unknown return kind `{other}`"))),
        }
    }
}

/// Returns derived from a price series. Each return is dated by the later
/// day of its price pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    values: Vec<f64>,
    kind: ReturnKind,
    dates: Option<Vec<NaiveDate>>,
}

impl ReturnSeries {
    /// Undated returns, for callers that do not start from prices.
    pub fn from_values(values: Vec<f64>, kind: ReturnKind) -> Self {
        Self { values, kind, dates: None }
    }

    pub fn with_dates(values: Vec<f64>, kind: ReturnKind, dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidParameter(format!("{} dates but {} returns", dates.len(), values.len())));
        }
        Ok(Self { values, kind, dates: Some(dates) })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ReturnKind {
        self.kind
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Calendar-dated label, e.g. an earnings release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub date: NaiveDate,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventList {
    pub entries: Vec<Event>,
}

impl EventList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Events dated within `[from, to]`, in date order.
    pub fn between(&self, from: NaiveDate, to: NaiveDate) -> impl Iterator<Item = &Event> {
        self.entries.iter().filter(move |e| e.date >= from && e.date <= to)
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn parse_date(raw: &str, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(raw, DATE_FORMAT).map_err(|_| Error::InvalidDate { row, value: raw.to_string() })
}

fn csv_reader<R: Read>(raw: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(raw)
}

/// Parse a header-bearing price CSV, taking dates from `Date` and prices from `column`.
///
/// The result is sorted ascending by date regardless of the file's row order.
pub fn parse_price_csv<R: Read>(raw: R, column: &str) -> Result<PriceSeries> {
    let mut reader = csv_reader(raw);
    let headers = reader.headers()?.clone();
    let date_idx = column_index(&headers, DATE_COLUMN)?;
    let price_idx = column_index(&headers, column)?;

    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let date = parse_date(record.get(date_idx).unwrap_or(""), row)?;
        let cell = record.get(price_idx).unwrap_or("");
        let price: f64 = cell
            .parse()
            .ok()
            .filter(|p: &f64| p.is_finite())
            .ok_or_else(|| Error::NonNumericPrice { row, value: cell.to_string() })?;
        if price <= 0.0 {
            return Err(Error::NonPositivePrice { row, value: price });
        }
        rows.push((date, price, row));
    }
    if rows.len() < 2 {
        return Err(Error::TooShort { len: rows.len() });
    }

    rows.sort_by_key(|&(d, _, row)| (d, row));
    if let Some(pair) = rows.windows(2).find(|p| p[0].0 == p[1].0) {
        return Err(Error::DuplicateDate { row: pair[1].2, date: pair[1].0 });
    }
    let (dates, prices) = rows.into_iter().map(|(d, p, _)| (d, p)).unzip();
    PriceSeries::new(dates, prices)
}

/// Parse a `Date,Label` event CSV. Several events may share a date.
pub fn parse_events_csv<R: Read>(raw: R) -> Result<EventList> {
    let mut reader = csv_reader(raw);
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Ok(EventList::default());
    }
    let date_idx = column_index(&headers, DATE_COLUMN)?;
    let label_idx = column_index(&headers, LABEL_COLUMN)?;

    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let date = parse_date(record.get(date_idx).unwrap_or(""), row)?;
        let label = record.get(label_idx).unwrap_or("");
        if label.is_empty() {
            return Err(Error::EmptyLabel { row });
        }
        entries.push(Event { date, label: label.to_string() });
    }
    entries.sort_by_key(|e| e.date);
    Ok(EventList { entries })
}

/// `ln(z[i+1]/z[i])` or `z[i+1]/z[i] - 1`, dated by the later day.
pub fn compute_returns(prices: &PriceSeries, kind: ReturnKind) -> ReturnSeries {
    let values = prices
        .prices
        .windows(2)
        .map(|w| match kind {
            ReturnKind::Log => (w[1] / w[0]).ln(),
            ReturnKind::Simple => w[1] / w[0] - 1.0,
        })
        .collect();
    ReturnSeries { values, kind, dates: Some(prices.dates[1..].to_vec()) }
}
