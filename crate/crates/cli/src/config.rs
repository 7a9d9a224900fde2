//! Experiment configuration: a TOML file plus command-line overrides.
//!
//! ```toml
//! kind = "otto"        # battery | otto | ratio-pdf
//! seed = 42
//!
//! [run]
//! threads = 4          # 1 = serial, 0 = all cores
//! out = "results"
//!
//! [otto]
//! mu = 8
//! alpha = "pi/10"      # a number or a multiple of pi
//! delta1 = 2.0
//! delta2 = 1.0
//! cycles = 100000
//! discard = 10
//! chains = 1
//! ```
//!
//! `[battery]` takes `mu`, `alpha`, `gap`, `collisions`, `trajectories`;
//! `[ratio_pdf]` takes `mean_w`, `std_w`, `mean_q`, `std_q`, `eta_min`,
//! `eta_max`, `points`, `variant`; `[histogram]` takes `wq_bins`, `eta_bins`,
//! `eta_min`, `eta_max`, `tail_bins`, `tail_min`, `tail_max`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Battery,
    Otto,
    RatioPdf,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Battery => "battery",
            Self::Otto => "otto",
            Self::RatioPdf => "ratio-pdf",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "battery" => Some(Self::Battery),
            "otto" => Some(Self::Otto),
            "ratio-pdf" | "ratio-pdf-table" => Some(Self::RatioPdf),
            _ => None,
        }
    }
}

/// A swap angle given either as a number or as text such as `"pi/10"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Text(String),
}

impl AngleValue {
    pub fn resolve(&self) -> Result<f64, String> {
        match self {
            Self::Number(x) => Ok(*x),
            Self::Text(s) => parse_angle(s),
        }
    }
}

/// Parses `x`, `pi`, `pi/b`, `a*pi`, `a pi/b` or `a*pi/b`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("cannot read angle {text:?}; use a number or a form like \"pi/10\"");
    let s = s.replace('π', "pi");
    let Some(at) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&s[..at], &s[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let factor = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|_| bad())? };
    let divisor = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    let v = factor * PI / divisor;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    pub run: Option<RawRun>,
    pub battery: Option<RawBattery>,
    pub otto: Option<RawOtto>,
    pub ratio_pdf: Option<RawRatioPdf>,
    pub histogram: Option<RawHistogram>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRun {
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBattery {
    pub mu: Option<usize>,
    pub alpha: Option<AngleValue>,
    pub gap: Option<f64>,
    pub collisions: Option<usize>,
    pub trajectories: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOtto {
    pub mu: Option<usize>,
    pub alpha: Option<AngleValue>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub cycles: Option<usize>,
    pub discard: Option<usize>,
    pub chains: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRatioPdf {
    pub mean_w: Option<f64>,
    pub std_w: Option<f64>,
    pub mean_q: Option<f64>,
    pub std_q: Option<f64>,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
    pub points: Option<usize>,
    pub variant: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHistogram {
    pub wq_bins: Option<usize>,
    pub eta_bins: Option<usize>,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
    pub tail_bins: Option<usize>,
    pub tail_min: Option<f64>,
    pub tail_max: Option<f64>,
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub mu: Option<usize>,
    pub alpha: Option<String>,
    pub gap: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub cycles: Option<usize>,
    pub discard: Option<usize>,
    pub chains: Option<usize>,
    pub collisions: Option<usize>,
    pub trajectories: Option<usize>,
    pub mean_w: Option<f64>,
    pub std_w: Option<f64>,
    pub mean_q: Option<f64>,
    pub std_q: Option<f64>,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
    pub points: Option<usize>,
}

macro_rules! set {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src.clone() {
            $dst = Some(v);
        }
    };
}

impl RawConfig {
    pub fn apply(&mut self, kind: ExperimentKind, o: &Overrides) {
        set!(self.seed, o.seed);
        let run = self.run.get_or_insert_with(Default::default);
        set!(run.out, o.out);
        set!(run.threads, o.threads);
        let alpha = o.alpha.clone().map(AngleValue::Text);
        match kind {
            ExperimentKind::Battery => {
                let b = self.battery.get_or_insert_with(Default::default);
                set!(b.mu, o.mu);
                set!(b.alpha, alpha);
                set!(b.gap, o.gap);
                set!(b.collisions, o.collisions);
                set!(b.trajectories, o.trajectories);
            }
            ExperimentKind::Otto => {
                let t = self.otto.get_or_insert_with(Default::default);
                set!(t.mu, o.mu);
                set!(t.alpha, alpha);
                set!(t.delta1, o.delta1);
                set!(t.delta2, o.delta2);
                set!(t.cycles, o.cycles);
                set!(t.discard, o.discard);
                set!(t.chains, o.chains);
            }
            ExperimentKind::RatioPdf => {
                let r = self.ratio_pdf.get_or_insert_with(Default::default);
                set!(r.mean_w, o.mean_w);
                set!(r.std_w, o.std_w);
                set!(r.mean_q, o.mean_q);
                set!(r.std_q, o.std_q);
                set!(r.eta_min, o.eta_min);
                set!(r.eta_max, o.eta_max);
                set!(r.points, o.points);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatterySettings {
    pub mu: usize,
    pub alpha: f64,
    pub gap: f64,
    pub collisions: usize,
    pub trajectories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OttoSettings {
    pub mu: usize,
    pub alpha: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub cycles: usize,
    pub discard: usize,
    pub chains: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PdfVariant {
    Hinkley,
    OnePlusErf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioPdfSettings {
    pub mean_w: f64,
    pub std_w: f64,
    pub mean_q: f64,
    pub std_q: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub points: usize,
    pub variant: PdfVariant,
}

/// Histogram layout. `wq_bins = None` selects Freedman-Diaconis bins;
/// missing tail bounds select the default quantile rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSettings {
    pub wq_bins: Option<usize>,
    pub eta_bins: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub tail_bins: usize,
    pub tail_min: Option<f64>,
    pub tail_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Battery(BatterySettings),
    Otto(OttoSettings),
    RatioPdf(RatioPdfSettings),
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::Battery(_) => ExperimentKind::Battery,
            Self::Otto(_) => ExperimentKind::Otto,
            Self::RatioPdf(_) => ExperimentKind::RatioPdf,
        }
    }
}

/// A fully validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub experiment: Experiment,
    pub histogram: HistogramSettings,
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        self.experiment.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigReport {
    pub issues: Vec<ConfigIssue>,
}

impl ConfigReport {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue { path: path.into(), message: message.into() });
    }

    pub fn mentions(&self, path: &str) -> bool {
        self.issues.iter().any(|i| i.path == path)
    }
}

impl fmt::Display for ConfigReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, i) in self.issues.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", i.path, i.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigReport {}

pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigReport> {
    toml::from_str(text).map_err(|e| {
        let mut r = ConfigReport::default();
        r.push("<file>", e.to_string().trim_end().to_string());
        r
    })
}

/// Parses and validates a configuration file on its own.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigReport> {
    resolve(parse_raw(text)?, None)
}

/// Parses `text` (if any), applies `overrides` and validates.
pub fn load_config(
    text: Option<&str>,
    kind: ExperimentKind,
    overrides: &Overrides,
) -> Result<ExperimentConfig, ConfigReport> {
    let mut raw = match text {
        Some(t) => parse_raw(t)?,
        None => RawConfig::default(),
    };
    raw.apply(kind, overrides);
    resolve(raw, Some(kind))
}

fn positive(r: &mut ConfigReport, path: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        r.push(path, format!("must be a positive number, got {v}"));
    }
}

fn finite(r: &mut ConfigReport, path: &str, v: f64) {
    if !v.is_finite() {
        r.push(path, format!("must be finite, got {v}"));
    }
}

fn at_least(r: &mut ConfigReport, path: &str, v: usize, min: usize) {
    if v < min {
        r.push(path, format!("must be at least {min}, got {v}"));
    }
}

fn swap_angle(r: &mut ConfigReport, path: &str, v: Option<&AngleValue>) -> f64 {
    let Some(v) = v else {
        return PI / 10.0;
    };
    match v.resolve() {
        Ok(a) if (0.0..=FRAC_PI_2).contains(&a) => a,
        Ok(a) => {
            r.push(path, format!("swap angle {a} outside [0, pi/2]"));
            a
        }
        Err(e) => {
            r.push(path, e);
            f64::NAN
        }
    }
}

fn resolve(raw: RawConfig, cli_kind: Option<ExperimentKind>) -> Result<ExperimentConfig, ConfigReport> {
    let mut r = ConfigReport::default();
    let file_kind = match raw.kind.as_deref() {
        None => None,
        Some(k) => match ExperimentKind::parse(k) {
            Some(k) => Some(k),
            None => {
                r.push("kind", format!("unknown experiment kind {k:?}; expected battery, otto or ratio-pdf"));
                None
            }
        },
    };
    let kind = match (file_kind, cli_kind) {
        (Some(f), Some(c)) if f != c => {
            r.push("kind", format!("file is for {:?} but the subcommand is {:?}", f.name(), c.name()));
            c
        }
        (_, Some(c)) => c,
        (Some(f), None) => f,
        (None, None) => {
            if raw.kind.is_none() {
                r.push("kind", "missing; expected battery, otto or ratio-pdf");
            }
            return Err(r);
        }
    };
    let seed = raw.seed.unwrap_or_else(|| {
        r.push("seed", "missing; a master seed is required (no implicit entropy)");
        0
    });
    let run = raw.run.unwrap_or_default();
    let threads = run.threads.unwrap_or(1);
    let out = run.out.unwrap_or_else(|| PathBuf::from("."));

    let experiment = match kind {
        ExperimentKind::Battery => {
            let b = raw.battery.unwrap_or_default();
            let s = BatterySettings {
                mu: b.mu.unwrap_or(2),
                alpha: swap_angle(&mut r, "battery.alpha", b.alpha.as_ref()),
                gap: b.gap.unwrap_or(1.0),
                collisions: b.collisions.unwrap_or(12),
                trajectories: b.trajectories.unwrap_or(10_000),
            };
            at_least(&mut r, "battery.mu", s.mu, 2);
            positive(&mut r, "battery.gap", s.gap);
            at_least(&mut r, "battery.collisions", s.collisions, 1);
            at_least(&mut r, "battery.trajectories", s.trajectories, 1);
            Experiment::Battery(s)
        }
        ExperimentKind::Otto => {
            let o = raw.otto.unwrap_or_default();
            let s = OttoSettings {
                mu: o.mu.unwrap_or(2),
                alpha: swap_angle(&mut r, "otto.alpha", o.alpha.as_ref()),
                delta1: o.delta1.unwrap_or(2.0),
                delta2: o.delta2.unwrap_or(1.0),
                cycles: o.cycles.unwrap_or(100_000),
                discard: o.discard.unwrap_or(qotto_core::engine::DEFAULT_DISCARD),
                chains: o.chains.unwrap_or(1),
            };
            at_least(&mut r, "otto.mu", s.mu, 2);
            positive(&mut r, "otto.delta1", s.delta1);
            positive(&mut r, "otto.delta2", s.delta2);
            if s.delta2 >= s.delta1 {
                r.push(
                    "otto.delta2",
                    format!("gaps must satisfy delta1 > delta2 > 0, got delta1 = {}, delta2 = {}", s.delta1, s.delta2),
                );
            }
            at_least(&mut r, "otto.cycles", s.cycles, 2);
            at_least(&mut r, "otto.chains", s.chains, 1);
            Experiment::Otto(s)
        }
        ExperimentKind::RatioPdf => {
            let p = raw.ratio_pdf.unwrap_or_default();
            let variant = match p.variant.as_deref() {
                None | Some("hinkley") => PdfVariant::Hinkley,
                Some("one-plus-erf") => PdfVariant::OnePlusErf,
                Some(v) => {
                    r.push("ratio_pdf.variant", format!("unknown variant {v:?}; expected hinkley or one-plus-erf"));
                    PdfVariant::Hinkley
                }
            };
            let s = RatioPdfSettings {
                mean_w: p.mean_w.unwrap_or(0.0),
                std_w: p.std_w.unwrap_or(1.0),
                mean_q: p.mean_q.unwrap_or(0.0),
                std_q: p.std_q.unwrap_or(1.0),
                eta_min: p.eta_min.unwrap_or(-10.0),
                eta_max: p.eta_max.unwrap_or(10.0),
                points: p.points.unwrap_or(2001),
                variant,
            };
            finite(&mut r, "ratio_pdf.mean_w", s.mean_w);
            finite(&mut r, "ratio_pdf.mean_q", s.mean_q);
            positive(&mut r, "ratio_pdf.std_w", s.std_w);
            positive(&mut r, "ratio_pdf.std_q", s.std_q);
            finite(&mut r, "ratio_pdf.eta_min", s.eta_min);
            finite(&mut r, "ratio_pdf.eta_max", s.eta_max);
            if s.eta_min.partial_cmp(&s.eta_max) != Some(std::cmp::Ordering::Less) {
                r.push("ratio_pdf.eta_max", format!("must exceed eta_min = {}", s.eta_min));
            }
            at_least(&mut r, "ratio_pdf.points", s.points, 2);
            Experiment::RatioPdf(s)
        }
    };

    let h = raw.histogram.unwrap_or_default();
    let histogram = HistogramSettings {
        wq_bins: h.wq_bins,
        eta_bins: h.eta_bins.unwrap_or(500),
        eta_min: h.eta_min.unwrap_or(-2.0),
        eta_max: h.eta_max.unwrap_or(3.0),
        tail_bins: h.tail_bins.unwrap_or(20),
        tail_min: h.tail_min,
        tail_max: h.tail_max,
    };
    if let Some(b) = histogram.wq_bins {
        at_least(&mut r, "histogram.wq_bins", b, 1);
    }
    at_least(&mut r, "histogram.eta_bins", histogram.eta_bins, 1);
    at_least(&mut r, "histogram.tail_bins", histogram.tail_bins, qotto_core::stats::MIN_TAIL_BINS);
    if !(histogram.eta_min.is_finite() && histogram.eta_max.is_finite() && histogram.eta_min < histogram.eta_max) {
        r.push("histogram.eta_max", "eta range must be finite with eta_min < eta_max");
    }
    if let Some(lo) = histogram.tail_min {
        positive(&mut r, "histogram.tail_min", lo);
    }
    if let (Some(lo), Some(hi)) = (histogram.tail_min, histogram.tail_max) {
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            r.push("histogram.tail_max", format!("must exceed tail_min = {lo}"));
        }
    }

    if r.issues.is_empty() {
        Ok(ExperimentConfig { seed, threads, out, experiment, histogram })
    } else {
        Err(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/10").unwrap(), PI / 10.0);
        assert_eq!(parse_angle(" PI / 2 ").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3*pi/20").unwrap(), 3.0 * PI / 20.0);
        assert_eq!(parse_angle("0.25pi").unwrap(), 0.25 * PI);
        assert_eq!(parse_angle("π/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("0.3").unwrap(), 0.3);
        assert!(parse_angle("pi*2").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn minimal_files() {
        let c = validate_config("kind = \"otto\"\nseed = 3\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.threads, 1);
        let Experiment::Otto(o) = &c.experiment else { panic!() };
        assert_eq!((o.delta1, o.delta2, o.mu, o.discard), (2.0, 1.0, 2, 10));
        assert_eq!(o.alpha, PI / 10.0);
    }

    #[test]
    fn every_issue_is_reported() {
        let text = "kind = \"otto\"\n[otto]\nalpha = 2.0\ndelta1 = 1.0\ndelta2 = 1.5\nmu = 1\n";
        let r = validate_config(text).unwrap_err();
        for path in ["seed", "otto.alpha", "otto.delta2", "otto.mu"] {
            assert!(r.mentions(path), "{path} missing from {r}");
        }
        assert!(r.to_string().contains("[0, pi/2]"));
        assert!(r.to_string().contains("delta1 > delta2 > 0"));
    }

    #[test]
    fn unknown_keys_and_kinds() {
        assert!(validate_config("kind = \"otto\"\nseed = 1\n[otto]\nmuu = 3\n").is_err());
        assert!(validate_config("kind = \"engine\"\nseed = 1\n").unwrap_err().mentions("kind"));
        assert!(validate_config("seed = 1\n").unwrap_err().mentions("kind"));
        assert!(validate_config("kind = \"otto\"\nseed = 1\n[histogram]\ntail_bins = 3\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let text = "kind = \"otto\"\nseed = 1\n[otto]\nmu = 4\nalpha = 0.2\n";
        let o = Overrides { seed: Some(9), mu: Some(8), alpha: Some("pi/4".into()), ..Default::default() };
        let c = load_config(Some(text), ExperimentKind::Otto, &o).unwrap();
        let Experiment::Otto(s) = &c.experiment else { panic!() };
        assert_eq!((c.seed, s.mu, s.alpha), (9, 8, PI / 4.0));
        let err = load_config(Some(text), ExperimentKind::Battery, &o).unwrap_err();
        assert!(err.mentions("kind"));
    }

    #[test]
    fn ratio_pdf_section() {
        let c = validate_config("kind = \"ratio-pdf\"\nseed = 0\n[ratio_pdf]\nvariant = \"one-plus-erf\"\n").unwrap();
        let Experiment::RatioPdf(p) = &c.experiment else { panic!() };
        assert_eq!(p.variant, PdfVariant::OnePlusErf);
        let r = validate_config("kind = \"ratio-pdf\"\nseed = 0\n[ratio_pdf]\nstd_w = 0\neta_min = 1\neta_max = 0\n")
            .unwrap_err();
        assert!(r.mentions("ratio_pdf.std_w") && r.mentions("ratio_pdf.eta_max"));
    }
}
