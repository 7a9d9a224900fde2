use libm::erfc;

use crate::error::{Error, Result};

/// Sample mean and unbiased standard deviation of a data set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianFit {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    /// Set when every sample is identical, so `std == 0`.
    pub degenerate: bool,
}

impl GaussianFit {
    pub fn cdf(&self, x: f64) -> f64 {
        if self.degenerate {
            return if x < self.mean { 0.0 } else { 1.0 };
        }
        normal_cdf((x - self.mean) / self.std)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let t = (x - self.mean) / self.std;
        (-0.5 * t * t).exp() / (self.std * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        self.std / (self.count as f64).sqrt()
    }
}

pub fn fit_gaussian(samples: &[f64]) -> Result<GaussianFit> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "Gaussian fit needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sample in Gaussian fit".into()));
    }
    let n = samples.len() as f64;
    let m = mean(samples);
    let ss: f64 = samples.iter().map(|x| (x - m) * (x - m)).sum();
    let std = (ss / (n - 1.0)).sqrt();
    let degenerate = samples.iter().all(|&x| x == samples[0]);
    Ok(GaussianFit { mean: m, std: if degenerate { 0.0 } else { std }, count: samples.len(), degenerate })
}

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Linear-interpolation quantile (type 7) of unsorted data.
pub fn quantile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Parameter(format!("quantile level {q} outside [0, 1]")));
    }
    let mut v: Vec<f64> = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData("correlation needs two equal-length samples of size >= 2".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok(sxy / (sxx * syy).sqrt())
}
