//! Command-line arguments and their resolution into a [`RunConfig`].

use std::path::PathBuf;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ngram_infocap::analysis::{SelectionMode, SelectionParams};
use ngram_infocap::ingest::DEFAULT_PRICE_COLUMN;
use ngram_infocap::ReturnKind;
use serde::{Serialize, Serializer};

use crate::CliError;

pub const DEFAULT_N_MIN: usize = 3;
pub const DEFAULT_N_MAX: usize = 12;
pub const DEFAULT_SURROGATES: usize = 200;
pub const DEFAULT_PERCENTILE: f64 = 0.05;
pub const DEFAULT_MAX_LAG: usize = 20;
pub const THREADS_ENV: &str = "NGRAM_INFOCAP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ngram-infocap", version, about = "n-gram information capacity of quantized price series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raw and noise-normalized information capacity per thickness.
    Capacity(CapacityArgs),
    /// Divergent n-grams and their locations in time.
    Divergent(CommonArgs),
    /// Divergent n-gram sets of two time windows compared per thickness.
    Stability(CommonArgs),
    /// Alphabet staircase entropy scan and optional quantization search.
    Staircase(StaircaseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReturnsArg {
    Log,
    Simple,
}

impl From<ReturnsArg> for ReturnKind {
    fn from(r: ReturnsArg) -> Self {
        match r {
            ReturnsArg::Log => ReturnKind::Log,
            ReturnsArg::Simple => ReturnKind::Simple,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantizeSpec {
    Binary,
    Thresholds(PathBuf),
    Staircase(usize),
}

impl FromStr for QuantizeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "binary" {
            return Ok(QuantizeSpec::Binary);
        }
        if let Some(path) = s.strip_prefix("thresholds=") {
            if path.is_empty() {
                return Err("thresholds= needs a file path".into());
            }
            return Ok(QuantizeSpec::Thresholds(PathBuf::from(path)));
        }
        if let Some(k) = s.strip_prefix("staircase=") {
            let k: usize = k.parse().map_err(|_| format!("bad staircase level `{k}`"))?;
            if k == 0 {
                return Err("staircase level must be at least 1".into());
            }
            return Ok(QuantizeSpec::Staircase(k));
        }
        Err(format!("expected binary, thresholds=FILE or staircase=K, got `{s}`"))
    }
}

impl std::fmt::Display for QuantizeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuantizeSpec::Binary => f.write_str("binary"),
            QuantizeSpec::Thresholds(p) => write!(f, "thresholds={}", p.display()),
            QuantizeSpec::Staircase(k) => write!(f, "staircase={k}"),
        }
    }
}

impl Serialize for QuantizeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Inclusive date window. Accepts `YYYY-MM-DD` or `YYYY-MM` on either side;
/// a month expands to its first day on the left and its last day on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

fn parse_day_or_month(s: &str, end: bool) -> Result<NaiveDate, String> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d);
    }
    let first = NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
        .map_err(|_| format!("bad date `{s}` (expected YYYY-MM-DD or YYYY-MM)"))?;
    if !end {
        return Ok(first);
    }
    let next = if first.month() == 12 {
        NaiveDate::from_ymd_opt(first.year() + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(first.year(), first.month() + 1, 1)
    };
    next.and_then(|d| d.pred_opt()).ok_or_else(|| format!("bad date `{s}`"))
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("window `{s}` must be FROM:TO"))?;
        let from = parse_day_or_month(a.trim(), false)?;
        let to = parse_day_or_month(b.trim(), true)?;
        if to < from {
            return Err(format!("window `{s}` ends before it starts"));
        }
        Ok(Window { from, to })
    }
}

/// `0.05` or `5%`.
fn parse_percentile(s: &str) -> Result<f64, String> {
    let (num, scale) = match s.strip_suffix('%') {
        Some(n) => (n, 0.01),
        None => (s, 1.0),
    };
    let p = num.trim().parse::<f64>().map_err(|_| format!("bad percentile `{s}`"))? * scale;
    if p > 0.0 && p <= 1.0 {
        Ok(p)
    } else {
        Err(format!("percentile `{s}` must lie in (0, 1] or (0%, 100%]"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Price CSV with a `Date` column.
    #[arg(long)]
    pub input: PathBuf,
    /// Price column.
    #[arg(long, default_value = DEFAULT_PRICE_COLUMN)]
    pub column: String,
    #[arg(long, value_enum, default_value = "log")]
    pub returns: ReturnsArg,
    /// binary | thresholds=FILE | staircase=K
    #[arg(long, default_value = "binary")]
    pub quantize: QuantizeSpec,
    #[arg(long, default_value_t = DEFAULT_N_MIN)]
    pub nmin: usize,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub nmax: usize,
    /// Monte-Carlo replicates for the noise baseline.
    #[arg(long, default_value_t = DEFAULT_SURROGATES)]
    pub surrogates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep n-grams with |ln f - ln f~| > |ln A|.
    #[arg(long, conflicts_with = "percentile")]
    pub alpha: Option<f64>,
    /// Keep the most divergent n-grams covering this share of windows, e.g. 0.05 or 5%.
    #[arg(long, value_parser = parse_percentile)]
    pub percentile: Option<f64>,
    /// Keep n-grams that occur only once.
    #[arg(long)]
    pub include_unique: bool,
    /// FROM:TO date window; give it twice for `stability`.
    #[arg(long = "window")]
    pub windows: Vec<Window>,
    /// Event CSV (`Date,Label`) to overlay on divergent n-grams.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest ACF lag reported.
    #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
    pub max_lag: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StaircaseArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Highest staircase level; alphabets of 2^1 .. 2^kmax letters.
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
    /// Dictionary thickness scanned along the staircase.
    #[arg(long, short = 'n', default_value_t = 6)]
    pub thickness: usize,
    /// Also search the staircase maps for the information-optimal quantization.
    #[arg(long)]
    pub search: bool,
    /// JSON array of quantization maps to search instead of the staircase.
    #[arg(long)]
    pub family: Option<PathBuf>,
}

/// Fully resolved settings, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: PathBuf,
    pub column: String,
    pub returns: ReturnKind,
    pub quantize: QuantizeSpec,
    pub n_min: usize,
    pub n_max: usize,
    pub surrogates: usize,
    pub seed: u64,
    pub selection: SelectionParams,
    pub windows: Vec<Window>,
    pub events: Option<PathBuf>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thickness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<PathBuf>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub search: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_common(command: &'static str, a: &CommonArgs) -> Result<Self, CliError> {
        if a.nmin < 2 {
            return Err(CliError::Config(format!("--nmin must be at least 2, got {}", a.nmin)));
        }
        if a.nmax < a.nmin {
            return Err(CliError::Config(format!("--nmax {} is below --nmin {}", a.nmax, a.nmin)));
        }
        if a.surrogates < 2 {
            return Err(CliError::Config(format!("--surrogates must be at least 2, got {}", a.surrogates)));
        }
        let mode = match (a.alpha, a.percentile) {
            (Some(alpha), _) => SelectionMode::Alpha(alpha),
            (None, Some(p)) => SelectionMode::Percentile(p),
            (None, None) => SelectionMode::Percentile(DEFAULT_PERCENTILE),
        };
        let selection = SelectionParams { mode, exclude_unique: !a.include_unique };
        selection.validate()?;
        let expected_windows = if command == "stability" { 2..=2 } else { 0..=1 };
        if !expected_windows.contains(&a.windows.len()) {
            return Err(CliError::Config(format!(
                "`{command}` takes {} --window, got {}",
                if command == "stability" { "exactly two" } else { "at most one" },
                a.windows.len()
            )));
        }
        Ok(RunConfig {
            command,
            input: a.input.clone(),
            column: a.column.clone(),
            returns: a.returns.into(),
            quantize: a.quantize.clone(),
            n_min: a.nmin,
            n_max: a.nmax,
            surrogates: a.surrogates,
            seed: a.seed,
            selection,
            windows: a.windows.clone(),
            events: a.events.clone(),
            format: a.format,
            max_lag: None,
            k_max: None,
            thickness: None,
            family: None,
            search: false,
            out: a.out.clone(),
        })
    }
}

/// Worker cap from `NGRAM_INFOCAP_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}
