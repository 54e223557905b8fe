//! The four subcommands. Each returns its report and the resolved config.

use std::fs::File;
use std::path::Path;

use ngram_infocap::analysis::{
    acf, divergence_records_for, localize, optimal_quantization_search, overlay_events, select_divergent,
    staircase_scan, window_stability, DateRange, DivergenceRecord, OverlayRow, QuantizationSearch, StaircaseStep,
};
use ngram_infocap::{
    capacity_profile, compute_returns, estimate_noise_stats, letter_distribution, make_binary_alphabet,
    normalized_capacity, parse_events_csv, parse_price_csv, quantize_series, staircase_alphabets, Error,
    LetterDistribution, PriceSeries, QuantizationMap, ReturnSeries, SymbolText,
};
use serde::Serialize;

use crate::config::{CapacityArgs, CommonArgs, QuantizeSpec, RunConfig, StaircaseArgs, Window};
use crate::report::{cell, opt_cell, Report, Table};
use crate::CliError;

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|source| CliError::Read { path: path.into(), source })
}

fn input_err(path: &Path) -> impl FnOnce(Error) -> CliError + '_ {
    move |source| CliError::Input { path: path.into(), source }
}

fn load_prices(cfg: &RunConfig) -> Result<PriceSeries, CliError> {
    parse_price_csv(open(&cfg.input)?, &cfg.column).map_err(input_err(&cfg.input))
}

/// The quantization map, always fitted on the full series.
fn resolve_map(cfg: &RunConfig, full: &ReturnSeries) -> Result<QuantizationMap, CliError> {
    match &cfg.quantize {
        QuantizeSpec::Binary => Ok(make_binary_alphabet().1),
        QuantizeSpec::Thresholds(path) => {
            serde_json::from_reader(open(path)?).map_err(|e| CliError::Config(format!("in `{}`: {e}", path.display())))
        }
        QuantizeSpec::Staircase(k) => Ok(staircase_alphabets(*k, full)?.pop().expect("k >= 1 maps")),
    }
}

/// Returns restricted to `window`, with at least `needed` observations.
fn windowed_returns(
    prices: &PriceSeries,
    cfg: &RunConfig,
    window: Window,
    needed: usize,
) -> Result<ReturnSeries, CliError> {
    let len = prices.window(window.from, window.to).map_or(0, |p| p.len() - 1);
    if len < needed {
        return Err(CliError::EmptyWindow { from: window.from, to: window.to, len, needed });
    }
    let sub = prices.window(window.from, window.to).expect("non-empty window");
    Ok(compute_returns(&sub, cfg.returns))
}

struct Prepared {
    map: QuantizationMap,
    returns: ReturnSeries,
    text: SymbolText,
}

/// Load, quantize and apply the optional single window.
fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let prices = load_prices(cfg)?;
    let full = compute_returns(&prices, cfg.returns);
    let map = resolve_map(cfg, &full)?;
    let returns = match cfg.windows.first() {
        Some(&w) => windowed_returns(&prices, cfg, w, cfg.n_max + 1)?,
        None => full,
    };
    let text = quantize_series(&returns, &map)?;
    Ok(Prepared { map, returns, text })
}

#[derive(Serialize)]
struct CapacityRow {
    n: usize,
    raw: f64,
    noise_mean: f64,
    noise_sd: f64,
    normalized: Option<f64>,
    degenerate_noise: bool,
}

#[derive(Serialize)]
struct Summary {
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

#[derive(Serialize)]
struct DivergenceDistribution {
    n: usize,
    ngrams: usize,
    summary: Option<Summary>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct NoiseInfo {
    replicates: usize,
    seed: u64,
    length: usize,
}

#[derive(Serialize)]
struct AcfRow {
    lag: usize,
    rho: f64,
}

#[derive(Serialize)]
struct CapacityBody<'a> {
    config: &'a RunConfig,
    quantization: &'a QuantizationMap,
    text_length: usize,
    letter_distribution: &'a LetterDistribution,
    noise: NoiseInfo,
    noise_barrier: f64,
    peak_n: Option<usize>,
    capacity: Vec<CapacityRow>,
    divergence: Vec<DivergenceDistribution>,
    acf: Option<Vec<AcfRow>>,
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Some(Summary {
        min: s[0],
        q1: quantile_sorted(&s, 0.25),
        median: quantile_sorted(&s, 0.5),
        q3: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}

pub fn capacity(args: &CapacityArgs) -> Result<(Report, RunConfig), CliError> {
    let mut cfg = RunConfig::from_common("capacity", &args.common)?;
    cfg.max_lag = Some(args.max_lag);
    let Prepared { map, returns, text } = prepare(&cfg)?;
    let mut warnings = Vec::new();

    let profile = capacity_profile(&text, cfg.n_min, cfg.n_max)?;
    let dist = letter_distribution(&text);
    let stats = estimate_noise_stats(&dist, text.len(), cfg.n_min, cfg.n_max, cfg.surrogates, cfg.seed)?;
    let curve = normalized_capacity(&profile, &stats)?;

    let mut capacity = Vec::new();
    let mut table = Table::new(["n", "raw", "noise_mean", "noise_sd", "normalized"]);
    for (&n, p) in &curve.per_n {
        if p.degenerate_noise {
            warnings.push(format!("n={n}: noise capacity has zero spread, normalized value undefined"));
        }
        table.push(vec![n.to_string(), cell(p.raw), cell(p.noise_mean), cell(p.noise_sd), opt_cell(p.normalized)]);
        capacity.push(CapacityRow {
            n,
            raw: p.raw,
            noise_mean: p.noise_mean,
            noise_sd: p.noise_sd,
            normalized: p.normalized,
            degenerate_noise: p.degenerate_noise,
        });
    }

    let mut divergence = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        let values: Vec<f64> = divergence_records_for(&text, n)?.iter().map(|r| r.divergence).collect();
        divergence.push(DivergenceDistribution { n, ngrams: values.len(), summary: summarize(&values), values });
    }

    let acf = match acf(&returns, args.max_lag) {
        Ok(rows) => Some(rows.into_iter().map(|(lag, rho)| AcfRow { lag, rho }).collect()),
        Err(Error::ZeroVariance) => {
            warnings.push("returns have zero variance, autocorrelation undefined".into());
            None
        }
        Err(Error::InvalidParameter(msg)) => return Err(CliError::Config(msg)),
        Err(e) => return Err(e.into()),
    };

    let body = CapacityBody {
        config: &cfg,
        quantization: &map,
        text_length: text.len(),
        letter_distribution: &dist,
        noise: NoiseInfo { replicates: stats.replicates, seed: stats.seed, length: stats.length },
        noise_barrier: curve.noise_barrier,
        peak_n: curve.peak(),
        capacity,
        divergence,
        acf,
    };
    Ok((Report::new(&body, table, warnings)?, cfg))
}

#[derive(Serialize)]
struct DivergentGroup {
    n: usize,
    empty_selection: bool,
    selected: Vec<DivergenceRecord>,
}

#[derive(Serialize)]
struct DivergentBody<'a> {
    config: &'a RunConfig,
    quantization: &'a QuantizationMap,
    text_length: usize,
    per_n: Vec<DivergentGroup>,
    occurrences: Vec<OverlayRow>,
}

pub fn divergent(args: &CommonArgs) -> Result<(Report, RunConfig), CliError> {
    let cfg = RunConfig::from_common("divergent", args)?;
    let Prepared { map, text, .. } = prepare(&cfg)?;
    let events = match &cfg.events {
        Some(path) => Some(parse_events_csv(open(path)?).map_err(input_err(path))?),
        None => None,
    };
    let mut warnings = Vec::new();
    let mut per_n = Vec::new();
    let mut occurrences = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        let records = divergence_records_for(&text, n)?;
        let selected = match select_divergent(&records, cfg.selection) {
            Ok(sel) => sel,
            Err(Error::EmptySelection) => {
                warnings.push(format!("n={n}: no n-gram satisfies the selection criterion"));
                Vec::new()
            }
            Err(e) => return Err(e.into()),
        };
        occurrences.extend(localize(&selected, &text)?);
        per_n.push(DivergentGroup {
            n,
            empty_selection: selected.is_empty(),
            selected: selected.into_iter().map(|r| DivergenceRecord { dates: None, ..r }).collect(),
        });
    }
    if let Some(events) = &events {
        overlay_events(&mut occurrences, events);
    }

    let mut table = Table::new(["ngram", "n", "start_date", "end_date", "event_label"]);
    for r in &occurrences {
        table.push(vec![
            r.ngram.clone(),
            r.n.to_string(),
            r.start_date.to_string(),
            r.end_date.to_string(),
            r.event_label.clone().unwrap_or_default(),
        ]);
    }
    let body = DivergentBody { config: &cfg, quantization: &map, text_length: text.len(), per_n, occurrences };
    Ok((Report::new(&body, table, warnings)?, cfg))
}

#[derive(Serialize)]
struct StabilityRow {
    n: usize,
    set_a: Vec<String>,
    set_b: Vec<String>,
    intersection: Vec<String>,
    jaccard: f64,
}

#[derive(Serialize)]
struct StabilityBody<'a> {
    config: &'a RunConfig,
    quantization: &'a QuantizationMap,
    window_a: Option<DateRange>,
    window_b: Option<DateRange>,
    per_n: Vec<StabilityRow>,
}

pub fn stability(args: &CommonArgs) -> Result<(Report, RunConfig), CliError> {
    let cfg = RunConfig::from_common("stability", args)?;
    let prices = load_prices(&cfg)?;
    let full = compute_returns(&prices, cfg.returns);
    let map = resolve_map(&cfg, &full)?;
    let needed = cfg.n_max + 1;
    let text_a = quantize_series(&windowed_returns(&prices, &cfg, cfg.windows[0], needed)?, &map)?;
    let text_b = quantize_series(&windowed_returns(&prices, &cfg, cfg.windows[1], needed)?, &map)?;
    let report = window_stability(&text_a, &text_b, cfg.n_min, cfg.n_max, cfg.selection)?;

    let mut table = Table::new(["n", "jaccard", "size_a", "size_b", "intersection"]);
    let mut per_n = Vec::new();
    for (&n, e) in &report.per_n {
        let intersection: Vec<String> = e.intersection.iter().cloned().collect();
        table.push(vec![
            n.to_string(),
            cell(e.jaccard),
            e.set_a.len().to_string(),
            e.set_b.len().to_string(),
            intersection.join(" "),
        ]);
        per_n.push(StabilityRow {
            n,
            set_a: e.set_a.iter().cloned().collect(),
            set_b: e.set_b.iter().cloned().collect(),
            intersection,
            jaccard: e.jaccard,
        });
    }
    let body =
        StabilityBody { config: &cfg, quantization: &map, window_a: report.window_a, window_b: report.window_b, per_n };
    Ok((Report::new(&body, table, Vec::new())?, cfg))
}

#[derive(Serialize)]
struct StaircaseBody<'a> {
    config: &'a RunConfig,
    n: usize,
    steps: &'a [StaircaseStep],
    best_k: usize,
    search: Option<QuantizationSearch>,
}

pub fn staircase(args: &StaircaseArgs) -> Result<(Report, RunConfig), CliError> {
    let mut cfg = RunConfig::from_common("staircase", &args.common)?;
    cfg.k_max = Some(args.kmax);
    cfg.thickness = Some(args.thickness);
    cfg.search = args.search || args.family.is_some();
    cfg.family = args.family.clone();
    if args.kmax == 0 {
        return Err(CliError::Config("--kmax must be at least 1".into()));
    }

    let prices = load_prices(&cfg)?;
    let returns = match cfg.windows.first() {
        Some(&w) => windowed_returns(&prices, &cfg, w, cfg.n_max.max(args.thickness) + 1)?,
        None => compute_returns(&prices, cfg.returns),
    };
    let scan = staircase_scan(&returns, args.thickness, args.kmax)?;
    let search = if cfg.search {
        let family: Vec<QuantizationMap> = match &cfg.family {
            Some(path) => serde_json::from_reader(open(path)?)
                .map_err(|e| CliError::Config(format!("in `{}`: {e}", path.display())))?,
            None => staircase_alphabets(args.kmax, &returns)?,
        };
        Some(optimal_quantization_search(&returns, &family, cfg.n_min, cfg.n_max)?)
    } else {
        None
    };

    let mut table = Table::new(["k", "cardinality", "entropy", "nonunique"]);
    for s in &scan.steps {
        table.push(vec![s.k.to_string(), s.cardinality.to_string(), cell(s.entropy), s.nonunique.to_string()]);
    }
    let body = StaircaseBody { config: &cfg, n: scan.n, steps: &scan.steps, best_k: scan.best_k, search };
    Ok((Report::new(&body, table, Vec::new())?, cfg))
}
