use crate::error::{Error, Result};

use super::gaussian::quantile;

const MAX_AUTO_BINS: usize = 10_000;

/// How to lay out histogram bins.
#[derive(Debug, Clone, PartialEq)]
pub enum BinSpec {
    Edges(Vec<f64>),
    Uniform { bins: usize, min: f64, max: f64 },
    LogSpaced { bins: usize, min: f64, max: f64 },
    /// Width `2 IQR n^(-1/3)` spanning the sample range.
    FreedmanDiaconis,
}

/// Bins are left-closed and right-open except the last, which is closed.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
    total: u64,
}

impl Histogram {
    pub fn empty(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::Parameter("histogram needs at least two edges".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("histogram edge".into()));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("histogram edges must be strictly ascending".into()));
        }
        let n = edges.len() - 1;
        Ok(Self { edges, counts: vec![0; n], underflow: 0, overflow: 0, total: 0 })
    }

    pub fn add(&mut self, x: f64) {
        self.total += 1;
        let last = *self.edges.last().expect("non-empty edges");
        if x < self.edges[0] {
            self.underflow += 1;
        } else if x > last {
            self.overflow += 1;
        } else if x == last {
            *self.counts.last_mut().expect("non-empty counts") += 1;
        } else {
            let i = self.edges.partition_point(|&e| e <= x) - 1;
            self.counts[i] += 1;
        }
    }

    /// Adds another histogram with identical edges.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::Parameter("cannot merge histograms with different edges".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        self.total += other.total;
        Ok(())
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn underflow(&self) -> u64 {
        self.underflow
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Geometric bin center, for positive log-spaced bins.
    pub fn log_center(&self, i: usize) -> f64 {
        (self.edges[i] * self.edges[i + 1]).sqrt()
    }

    /// Probability density estimate, normalized by the total sample count
    /// including under- and overflow.
    pub fn density(&self, i: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts[i] as f64 / (self.total as f64 * self.width(i))
    }
}

fn log_edges(bins: usize, min: f64, max: f64) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min) {
        return Err(Error::Parameter(format!("log-spaced bins need 0 < min < max, got [{min}, {max}]")));
    }
    let (lmin, lmax) = (min.ln(), max.ln());
    let mut edges: Vec<f64> = (0..=bins).map(|i| (lmin + (lmax - lmin) * i as f64 / bins as f64).exp()).collect();
    edges[0] = min;
    edges[bins] = max;
    Ok(edges)
}

fn uniform_edges(bins: usize, min: f64, max: f64) -> Result<Vec<f64>> {
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Parameter(format!("uniform bins need min < max, got [{min}, {max}]")));
    }
    let mut edges: Vec<f64> = (0..=bins).map(|i| min + (max - min) * i as f64 / bins as f64).collect();
    edges[bins] = max;
    Ok(edges)
}

fn freedman_diaconis_edges(samples: &[f64]) -> Result<Vec<f64>> {
    let finite: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::InsufficientData("Freedman-Diaconis binning of an empty sample".into()));
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return uniform_edges(1, min - 0.5, max + 0.5);
    }
    let n = finite.len() as f64;
    let iqr = quantile(&finite, 0.75)? - quantile(&finite, 0.25)?;
    let bins = if iqr > 0.0 {
        let width = 2.0 * iqr / n.cbrt();
        ((max - min) / width).ceil() as usize
    } else {
        n.log2().ceil() as usize + 1
    };
    uniform_edges(bins.clamp(1, MAX_AUTO_BINS), min, max)
}

pub fn make_histogram(samples: &[f64], spec: &BinSpec) -> Result<Histogram> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("NaN sample in histogram".into()));
    }
    let edges = match spec {
        BinSpec::Edges(e) => e.clone(),
        BinSpec::Uniform { bins, min, max } => {
            if *bins == 0 {
                return Err(Error::Parameter("zero bins".into()));
            }
            uniform_edges(*bins, *min, *max)?
        }
        BinSpec::LogSpaced { bins, min, max } => {
            if *bins == 0 {
                return Err(Error::Parameter("zero bins".into()));
            }
            log_edges(*bins, *min, *max)?
        }
        BinSpec::FreedmanDiaconis => freedman_diaconis_edges(samples)?,
    };
    let mut h = Histogram::empty(edges)?;
    for &x in samples {
        h.add(x);
    }
    Ok(h)
}
