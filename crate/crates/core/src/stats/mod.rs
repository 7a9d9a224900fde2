//! Histograms, fits and the Gaussian-ratio efficiency density.

mod gaussian;
mod histogram;
mod ks;
pub mod quad;
mod ratio;
mod tail;

pub use gaussian::{fit_gaussian, mean, normal_cdf, pearson_correlation, quantile, GaussianFit};
pub use histogram::{make_histogram, BinSpec, Histogram};
pub use ks::ks_distance;
pub use ratio::{ratio_pdf, ratio_pdf_total_mass, ratio_pdf_variant, RatioCdf, RatioPdfParams, RatioPdfVariant};
pub use tail::{default_tail_range, MIN_TAIL_BINS, tail_exponent_fit, tail_histogram, TailFit};
