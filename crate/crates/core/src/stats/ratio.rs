//! Density of the ratio `eta = W / Q` of two independent Gaussians.
//!
//! With `a^2 = eta^2/s_w^2 + 1/s_q^2`, `b = m_w eta/s_w^2 + m_q/s_q^2`,
//! `c = m_w^2/s_w^2 + m_q^2/s_q^2` and `d = exp((b^2 - c a^2) / (2 a^2))`,
//!
//! `p(eta) = b d / (sqrt(2 pi) s_w s_q a^3) erf(b / (sqrt 2 a)) + exp(-c/2) / (pi s_w s_q a^2)`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use libm::erf;

use super::gaussian::GaussianFit;
use super::quad::{gauss_kronrod, integrate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RatioPdfParams {
    pub mean_w: f64,
    pub std_w: f64,
    pub mean_q: f64,
    pub std_q: f64,
}

impl RatioPdfParams {
    pub fn new(mean_w: f64, std_w: f64, mean_q: f64, std_q: f64) -> Result<Self> {
        if ![mean_w, std_w, mean_q, std_q].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("ratio density parameter".into()));
        }
        if !(std_w > 0.0 && std_q > 0.0) {
            return Err(Error::Parameter(format!(
                "standard deviations must be positive, got {std_w} and {std_q}"
            )));
        }
        Ok(Self { mean_w, std_w, mean_q, std_q })
    }

    pub fn from_fits(w: &GaussianFit, q: &GaussianFit) -> Result<Self> {
        Self::new(w.mean, w.std, q.mean, q.std)
    }
}

/// Which bracket multiplies the first term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioPdfVariant {
    /// `erf(b / (sqrt 2 a))`; the normalized density.
    #[default]
    Hinkley,
    /// `1 + erf(b / (sqrt 2 a))`; kept for comparison, not normalized for
    /// nonzero means.
    OnePlusErf,
}

pub fn ratio_pdf(eta: f64, p: &RatioPdfParams) -> Result<f64> {
    ratio_pdf_variant(eta, p, RatioPdfVariant::Hinkley)
}

pub fn ratio_pdf_variant(eta: f64, p: &RatioPdfParams, variant: RatioPdfVariant) -> Result<f64> {
    if !eta.is_finite() {
        return Err(Error::NonFinite(format!("eta = {eta}")));
    }
    Ok(density(eta, p, variant))
}

fn density(eta: f64, p: &RatioPdfParams, variant: RatioPdfVariant) -> f64 {
    let (vw, vq) = (p.std_w * p.std_w, p.std_q * p.std_q);
    let a2 = eta * eta / vw + 1.0 / vq;
    let a = a2.sqrt();
    let b = p.mean_w * eta / vw + p.mean_q / vq;
    let c = p.mean_w * p.mean_w / vw + p.mean_q * p.mean_q / vq;
    let num = p.mean_w - eta * p.mean_q;
    // (b^2 - c a^2) / (2 a^2) without cancellation.
    let log_d = -num * num / (2.0 * (vq * eta * eta + vw));
    let e = erf(b / (SQRT_2 * a));
    let bracket = match variant {
        RatioPdfVariant::Hinkley => e,
        RatioPdfVariant::OnePlusErf => 1.0 + e,
    };
    let sw_sq = p.std_w * p.std_q;
    let first = b * log_d.exp() / ((2.0 * PI).sqrt() * sw_sq * a2 * a) * bracket;
    let second = (-0.5 * c).exp() / (PI * sw_sq * a2);
    (first + second).max(0.0)
}

/// Integral of the density over the whole real line, computed in the
/// variable `theta = atan(eta)`.
pub fn ratio_pdf_total_mass(p: &RatioPdfParams, variant: RatioPdfVariant, tol: f64) -> f64 {
    integrate(|t| mapped(t, p, variant), -FRAC_PI_2, FRAC_PI_2, tol, 64, 20_000).value
}

fn mapped(theta: f64, p: &RatioPdfParams, variant: RatioPdfVariant) -> f64 {
    let c = theta.cos();
    if c <= 0.0 {
        return 0.0;
    }
    let eta = theta.tan();
    if !eta.is_finite() {
        return 0.0;
    }
    density(eta, p, variant) / (c * c)
}

/// Tabulated cumulative distribution of the ratio density.
#[derive(Debug, Clone)]
pub struct RatioCdf {
    params: RatioPdfParams,
    cells: usize,
    cumulative: Vec<f64>,
}

impl RatioCdf {
    pub const DEFAULT_CELLS: usize = 2048;

    pub fn new(params: RatioPdfParams) -> Self {
        Self::with_cells(params, Self::DEFAULT_CELLS)
    }

    pub fn with_cells(params: RatioPdfParams, cells: usize) -> Self {
        let cells = cells.max(1);
        let h = PI / cells as f64;
        let mut cumulative = Vec::with_capacity(cells + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..cells {
            let lo = -FRAC_PI_2 + h * i as f64;
            let q = integrate(|t| mapped(t, &params, RatioPdfVariant::Hinkley), lo, lo + h, 1e-13, 1, 64);
            acc += q.value;
            cumulative.push(acc);
        }
        Self { params, cells, cumulative }
    }

    pub fn params(&self) -> &RatioPdfParams {
        &self.params
    }

    /// Integral of the density over the real line; 1 up to quadrature error.
    pub fn total_mass(&self) -> f64 {
        self.cumulative[self.cells]
    }

    pub fn cdf(&self, eta: f64) -> f64 {
        if eta.is_nan() {
            return f64::NAN;
        }
        let theta = eta.atan();
        let h = PI / self.cells as f64;
        let pos = (theta + FRAC_PI_2) / h;
        let i = (pos.floor() as usize).min(self.cells - 1);
        let lo = -FRAC_PI_2 + h * i as f64;
        let partial = if theta > lo {
            gauss_kronrod(&|t| mapped(t, &self.params, RatioPdfVariant::Hinkley), lo, theta).0
        } else {
            0.0
        };
        (self.cumulative[i] + partial).clamp(0.0, 1.0)
    }
}
