use super::gaussian::quantile;
use super::histogram::{make_histogram, BinSpec, Histogram};
use crate::error::{Error, Result};

pub const MIN_TAIL_BINS: usize = 5;

/// Least-squares power law `p(eta) ~ eta^exponent` over a tail range.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TailFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub bins_used: usize,
    pub range: (f64, f64),
}

/// Fits `ln density` against `ln center` over the bins lying inside `range`.
/// Empty bins are skipped.
pub fn tail_exponent_fit(h: &Histogram, range: (f64, f64)) -> Result<TailFit> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Parameter(format!("tail range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let slack = 1e-12 * hi;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..h.bins() {
        let (a, b) = (h.edges()[i], h.edges()[i + 1]);
        if a < lo - slack || b > hi + slack || h.counts()[i] == 0 {
            continue;
        }
        xs.push(h.log_center(i).ln());
        ys.push(h.density(i).ln());
    }
    let n = xs.len();
    if n < MIN_TAIL_BINS {
        return Err(Error::InsufficientData(format!(
            "tail fit needs {MIN_TAIL_BINS} nonempty bins in range, found {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(TailFit { exponent: slope, stderr, intercept, bins_used: n, range })
}

/// `[5 median(|eta|), q_0.99(eta > 0)]`.
pub fn default_tail_range(etas: &[f64]) -> Result<(f64, f64)> {
    let abs: Vec<f64> = etas.iter().map(|e| e.abs()).collect();
    let positive: Vec<f64> = etas.iter().copied().filter(|&e| e > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::InsufficientData("no positive samples for a tail range".into()));
    }
    let lo = 5.0 * quantile(&abs, 0.5)?;
    let hi = quantile(&positive, 0.99)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InsufficientData(format!("degenerate tail range [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

/// Log-spaced histogram over `range` of all samples, so densities are
/// normalized to the full sample count.
pub fn tail_histogram(etas: &[f64], range: (f64, f64), bins: usize) -> Result<Histogram> {
    make_histogram(etas, &BinSpec::LogSpaced { bins, min: range.0, max: range.1 })
}
