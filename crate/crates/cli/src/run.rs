use std::path::PathBuf;

use qotto_core::engine::{run_battery, run_otto, BatteryRecords, OttoRun, OttoSummary};
use qotto_core::stats::{
    default_tail_range, ks_distance, make_histogram, ratio_pdf_total_mass, ratio_pdf_variant, tail_exponent_fit,
    tail_histogram, BinSpec, RatioPdfVariant, TailFit,
};
use qotto_core::{BatteryRunConfig, Execution, Histogram, OttoParams, RatioPdfParams};
use serde::Serialize;

use crate::config::{
    BatterySettings, Experiment, ExperimentConfig, HistogramSettings, OttoSettings, PdfVariant, RatioPdfSettings,
};
use crate::output::{num, ArtifactWriter, HistogramInfo};
use crate::CliError;

/// Paths written by a run, manifest last.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

impl RunReport {
    pub fn file(&self, suffix: &str) -> Option<&PathBuf> {
        self.files.iter().find(|p| p.to_string_lossy().ends_with(suffix))
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    program: &'static str,
    version: &'static str,
    timestamp: String,
    seed: u64,
    config: &'a ExperimentConfig,
    files: Vec<String>,
}

/// Runs the experiment on `config.threads` threads and writes its artifacts.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let mut w = ArtifactWriter::new(&config.out, config.kind().name(), config.seed)?;
    match config.threads {
        1 => execute(config, Execution::Serial, &mut w)?,
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Runtime(qotto_core::Error::Parameter(e.to_string())))?;
            pool.install(|| execute(config, Execution::Parallel, &mut w))?
        }
    }
    let manifest = Manifest {
        program: "qotto",
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        seed: config.seed,
        config,
        files: w.file_names(),
    };
    let manifest = w.json("manifest", &manifest)?;
    Ok(RunReport { files: w.written().to_vec(), manifest })
}

fn execute(config: &ExperimentConfig, exec: Execution, w: &mut ArtifactWriter) -> Result<(), CliError> {
    match &config.experiment {
        Experiment::Battery(s) => battery(s, config.seed, &config.histogram, exec, w),
        Experiment::Otto(s) => otto(s, config.seed, &config.histogram, exec, w),
        Experiment::RatioPdf(s) => ratio_table(s, w),
    }
}

fn value_histogram(samples: &[f64], bins: Option<usize>) -> Result<Histogram, CliError> {
    let spec = match bins {
        Some(n) => {
            let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                BinSpec::Uniform { bins: n, min: lo, max: hi }
            } else {
                BinSpec::FreedmanDiaconis
            }
        }
        None => BinSpec::FreedmanDiaconis,
    };
    Ok(make_histogram(samples, &spec)?)
}

fn reservoir(k: usize) -> &'static str {
    if k % 2 == 0 {
        "hot"
    } else {
        "cold"
    }
}

#[derive(Serialize)]
struct BatterySummary {
    collisions: usize,
    trajectories: usize,
    final_hot_mean: Option<f64>,
    final_cold_mean: Option<f64>,
    final_hot_histogram: Option<HistogramInfo>,
    final_cold_histogram: Option<HistogramInfo>,
}

fn battery(
    s: &BatterySettings,
    seed: u64,
    hist: &HistogramSettings,
    exec: Execution,
    w: &mut ArtifactWriter,
) -> Result<(), CliError> {
    let mut cfg = BatteryRunConfig::new(s.mu, s.alpha, s.collisions, s.trajectories, seed)?;
    cfg.gap = s.gap;
    let rec: BatteryRecords = run_battery(&cfg, exec)?;

    let rows = (0..rec.n_trajectories()).flat_map(|i| {
        rec.trajectory(i)
            .iter()
            .enumerate()
            .map(move |(k, e)| vec![i.to_string(), (k + 1).to_string(), reservoir(k).into(), num(*e)])
            .collect::<Vec<_>>()
    });
    w.csv("records", &["trajectory", "collision", "reservoir", "ergotropy"], rows)?;

    let means = rec.mean_per_collision();
    let errs = rec.stderr_per_collision();
    let rows = (0..rec.n_collisions())
        .map(|k| vec![(k + 1).to_string(), reservoir(k).into(), num(means[k]), num(errs[k])]);
    w.csv("mean", &["collision", "reservoir", "mean_ergotropy", "stderr"], rows)?;

    let last = |parity: usize| (0..rec.n_collisions()).rev().find(|k| k % 2 == parity);
    let mut summary = BatterySummary {
        collisions: rec.n_collisions(),
        trajectories: rec.n_trajectories(),
        final_hot_mean: None,
        final_cold_mean: None,
        final_hot_histogram: None,
        final_cold_histogram: None,
    };
    if let Some(k) = last(0) {
        let h = value_histogram(&rec.after_collision(k), hist.wq_bins)?;
        w.histogram("hist_final_hot", &h)?;
        summary.final_hot_mean = Some(means[k]);
        summary.final_hot_histogram = Some((&h).into());
    }
    if let Some(k) = last(1) {
        let h = value_histogram(&rec.after_collision(k), hist.wq_bins)?;
        w.histogram("hist_final_cold", &h)?;
        summary.final_cold_mean = Some(means[k]);
        summary.final_cold_histogram = Some((&h).into());
    }
    w.json("summary", &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct TailReport {
    fit: Option<TailFit>,
    error: Option<String>,
}

#[derive(Serialize)]
struct OttoReport<'a> {
    #[serde(flatten)]
    summary: &'a OttoSummary,
    ideal_efficiency: f64,
    ks_work: f64,
    ks_heat_in: f64,
    ratio_pdf_params: Option<RatioPdfParams>,
    tail: TailReport,
    work_histogram: HistogramInfo,
    heat_in_histogram: HistogramInfo,
    eta_histogram: HistogramInfo,
}

fn tail(etas: &[f64], hist: &HistogramSettings) -> Result<(Histogram, TailFit), String> {
    let default = || default_tail_range(etas).map_err(|e| e.to_string());
    let range = match (hist.tail_min, hist.tail_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        (Some(lo), None) => (lo, default()?.1),
        (None, Some(hi)) => (default()?.0, hi),
        (None, None) => default()?,
    };
    let h = tail_histogram(etas, range, hist.tail_bins).map_err(|e| e.to_string())?;
    let fit = tail_exponent_fit(&h, range).map_err(|e| e.to_string())?;
    Ok((h, fit))
}

fn otto(
    s: &OttoSettings,
    seed: u64,
    hist: &HistogramSettings,
    exec: Execution,
    w: &mut ArtifactWriter,
) -> Result<(), CliError> {
    let params = OttoParams {
        delta1: s.delta1,
        delta2: s.delta2,
        mu: s.mu,
        alpha: s.alpha,
        n_cycles: s.cycles,
        n_discard: s.discard,
        master_seed: seed,
        chains: s.chains,
    };
    let run: OttoRun = run_otto(&params, exec)?;
    let per_chain = s.cycles;
    let rows = run.records.iter().enumerate().map(|(n, r)| {
        vec![
            (n / per_chain).to_string(),
            (n % per_chain + s.discard + 1).to_string(),
            num(r.q_in),
            num(r.w_out),
            num(r.q_out),
            num(r.w_in),
            num(r.w),
            r.eta.map(num).unwrap_or_default(),
            num(r.z),
            num(r.z1),
            num(r.z2),
        ]
    });
    w.csv(
        "records",
        &["chain", "cycle", "q_in", "w_out", "q_out", "w_in", "w", "eta", "z", "z1", "z2"],
        rows,
    )?;

    let work: Vec<f64> = run.records.iter().map(|r| r.w).collect();
    let heat: Vec<f64> = run.records.iter().map(|r| r.q_in).collect();
    let etas = run.etas();
    let hw = value_histogram(&work, hist.wq_bins)?;
    let hq = value_histogram(&heat, hist.wq_bins)?;
    let he = make_histogram(&etas, &BinSpec::Uniform { bins: hist.eta_bins, min: hist.eta_min, max: hist.eta_max })?;
    w.histogram("hist_work", &hw)?;
    w.histogram("hist_heat_in", &hq)?;
    w.histogram("hist_eta", &he)?;

    let sm = &run.summary;
    let ks = |xs: &[f64], f: &qotto_core::GaussianFit| {
        if f.degenerate {
            Ok(1.0)
        } else {
            ks_distance(xs, |x| f.cdf(x))
        }
    };
    let ratio = RatioPdfParams::from_fits(&sm.work, &sm.heat_in).ok();
    if let Some(p) = &ratio {
        let rows = (0..he.bins()).map(|i| {
            let eta = he.center(i);
            let pdf = ratio_pdf_variant(eta, p, RatioPdfVariant::Hinkley).unwrap_or(f64::NAN);
            vec![num(eta), num(he.density(i)), num(pdf)]
        });
        w.csv("eta_pdf", &["eta", "histogram_density", "ratio_pdf"], rows)?;
    }
    let tail = match tail(&etas, hist) {
        Ok((h, fit)) => {
            w.histogram("hist_eta_tail", &h)?;
            TailReport { fit: Some(fit), error: None }
        }
        Err(e) => TailReport { fit: None, error: Some(e) },
    };
    let report = OttoReport {
        summary: sm,
        ideal_efficiency: 1.0 - s.delta2 / s.delta1,
        ks_work: ks(&work, &sm.work)?,
        ks_heat_in: ks(&heat, &sm.heat_in)?,
        ratio_pdf_params: ratio,
        tail,
        work_histogram: (&hw).into(),
        heat_in_histogram: (&hq).into(),
        eta_histogram: (&he).into(),
    };
    w.json("summary", &report)?;
    Ok(())
}

#[derive(Serialize)]
struct RatioSummary {
    params: RatioPdfParams,
    variant: PdfVariant,
    total_mass: f64,
}

fn ratio_table(s: &RatioPdfSettings, w: &mut ArtifactWriter) -> Result<(), CliError> {
    let p = RatioPdfParams::new(s.mean_w, s.std_w, s.mean_q, s.std_q)?;
    let variant = match s.variant {
        PdfVariant::Hinkley => RatioPdfVariant::Hinkley,
        PdfVariant::OnePlusErf => RatioPdfVariant::OnePlusErf,
    };
    let step = (s.eta_max - s.eta_min) / (s.points - 1) as f64;
    let mut rows = Vec::with_capacity(s.points);
    for i in 0..s.points {
        let eta = if i + 1 == s.points { s.eta_max } else { s.eta_min + step * i as f64 };
        rows.push(vec![num(eta), num(ratio_pdf_variant(eta, &p, variant)?)]);
    }
    w.csv("table", &["eta", "pdf"], rows)?;
    let summary = RatioSummary { params: p, variant: s.variant, total_mass: ratio_pdf_total_mass(&p, variant, 1e-10) };
    w.json("summary", &summary)?;
    Ok(())
}
