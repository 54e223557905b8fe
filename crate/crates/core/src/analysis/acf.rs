use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;

/// Sample autocorrelation `rho(tau)` for `tau = 0..=max_lag`, normalized by the lag-0 sum of squares.
pub fn acf(returns: &ReturnSeries, max_lag: usize) -> Result<Vec<(usize, f64)>> {
    let p = returns.values();
    if max_lag >= p.len() {
        return Err(Error::InvalidParameter(format!("max lag {max_lag} must be below the series length {}", p.len())));
    }
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    let centered: Vec<f64> = p.iter().map(|x| x - mean).collect();
    let denom: f64 = centered.iter().map(|x| x * x).sum();
    if denom <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|lag| {
            let num: f64 = centered.iter().zip(&centered[lag..]).map(|(a, b)| a * b).sum();
            (lag, num / denom)
        })
        .collect())
}
