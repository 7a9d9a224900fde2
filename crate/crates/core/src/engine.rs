//! Battery charge/discharge runs and the four-stroke Otto cycle.
//!
//! Otto cycle, starting from `rho` with Bloch component `z` under
//! `H1 = delta1/2 sigma_z`:
//!
//! * A, hot collision: `rho -> rho'`, `Q_in = delta1/2 (z' - z)`;
//! * B, gap lowered to `delta2` with the state frozen: `W_out = z'/2 (delta1 - delta2)`;
//! * C, cold collision: `rho' -> rho''`, `Q_out = delta2/2 (z'' - z')`;
//! * D, gap raised back to `delta1`: `W_in = z''/2 (delta2 - delta1)`.
//!
//! `W = W_out + W_in` is the work done by the system and `eta = W / Q_in`.

use rayon::prelude::*;

use crate::collision::{cold_collision, hot_collision, ReservoirSpec};
use crate::error::{Error, Result};
use crate::ergotropy::ergotropy_qubit_bloch;
use crate::haar::{HaarSampler, UnitarySampler};
use crate::linalg::{BlochVector, DensityOperator};
use crate::stats::{fit_gaussian, mean, pearson_correlation, GaussianFit};

/// Records with `|Q_in|` below this get no efficiency.
pub const Q_FLOOR: f64 = 1e-12;

pub const DEFAULT_DISCARD: usize = 10;

/// How independent trajectories or chains are scheduled. Both give
/// bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Serial,
    /// On the current rayon thread pool.
    Parallel,
}

fn map_streams<T: Send, F>(n: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    match exec {
        Execution::Serial => (0..n as u64).map(f).collect(),
        Execution::Parallel => (0..n as u64).into_par_iter().map(f).collect(),
    }
}

fn bloch_z(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    m[(0, 0)].re - m[(1, 1)].re
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryRunConfig {
    pub mu: usize,
    pub alpha: f64,
    pub gap: f64,
    pub n_collisions: usize,
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub initial_state: DensityOperator,
}

impl BatteryRunConfig {
    /// Unit gap and the battery starting empty in `|down>`.
    pub fn new(mu: usize, alpha: f64, n_collisions: usize, n_trajectories: usize, master_seed: u64) -> Result<Self> {
        let c = Self {
            mu,
            alpha,
            gap: 1.0,
            n_collisions,
            n_trajectories,
            master_seed,
            initial_state: DensityOperator::down(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        ReservoirSpec::ground(self.mu, self.alpha)?;
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(Error::Parameter(format!("gap must be positive, got {}", self.gap)));
        }
        if self.n_collisions == 0 || self.n_trajectories == 0 {
            return Err(Error::Parameter("n_collisions and n_trajectories must be at least 1".into()));
        }
        if self.initial_state.dim() != 2 {
            return Err(Error::Dimension("battery initial state must be a qubit".into()));
        }
        Ok(())
    }
}

/// Ergotropy after every collision of every trajectory. Collision `k`
/// (0-based) is hot for even `k` and cold for odd `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryRecords {
    n_collisions: usize,
    ergotropy: Vec<f64>,
}

impl BatteryRecords {
    pub fn n_collisions(&self) -> usize {
        self.n_collisions
    }

    pub fn n_trajectories(&self) -> usize {
        self.ergotropy.len() / self.n_collisions
    }

    pub fn trajectory(&self, i: usize) -> &[f64] {
        &self.ergotropy[i * self.n_collisions..(i + 1) * self.n_collisions]
    }

    /// Ergotropies of all trajectories after collision `k`.
    pub fn after_collision(&self, k: usize) -> Vec<f64> {
        (0..self.n_trajectories()).map(|i| self.trajectory(i)[k]).collect()
    }

    pub fn mean_per_collision(&self) -> Vec<f64> {
        (0..self.n_collisions).map(|k| mean(&self.after_collision(k))).collect()
    }

    /// Standard error of the ensemble mean; zero for a single trajectory.
    pub fn stderr_per_collision(&self) -> Vec<f64> {
        (0..self.n_collisions)
            .map(|k| fit_gaussian(&self.after_collision(k)).map(|f| f.standard_error()).unwrap_or(0.0))
            .collect()
    }
}

/// Alternating hot/cold collisions, hot first. Trajectory `i` draws its
/// unitaries from child stream `i` of the master seed.
pub fn run_battery(config: &BatteryRunConfig, exec: Execution) -> Result<BatteryRecords> {
    config.validate()?;
    let spec = ReservoirSpec::ground(config.mu, config.alpha)?;
    let rows = map_streams(config.n_trajectories, exec, |stream| {
        let mut sampler = HaarSampler::from_stream(spec.joint_dim(), config.master_seed, stream)?;
        let mut rho = config.initial_state.clone();
        let mut out = Vec::with_capacity(config.n_collisions);
        for k in 0..config.n_collisions {
            rho = if k % 2 == 0 { hot_collision(&rho, &spec, &mut sampler)? } else { cold_collision(&rho, &spec)? };
            out.push(ergotropy_qubit_bloch(&BlochVector::from_density(&rho)?, config.gap)?);
        }
        Ok(out)
    })?;
    Ok(BatteryRecords { n_collisions: config.n_collisions, ergotropy: rows.concat() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OttoParams {
    pub delta1: f64,
    pub delta2: f64,
    pub mu: usize,
    pub alpha: f64,
    /// Retained cycles per chain.
    pub n_cycles: usize,
    /// Cycles run and dropped at the start of every chain.
    pub n_discard: usize,
    pub master_seed: u64,
    /// Independent chains, each on its own child stream.
    pub chains: usize,
}

impl OttoParams {
    /// One chain with the default discard.
    pub fn new(delta1: f64, delta2: f64, mu: usize, alpha: f64, n_cycles: usize, master_seed: u64) -> Result<Self> {
        let p = Self { delta1, delta2, mu, alpha, n_cycles, n_discard: DEFAULT_DISCARD, master_seed, chains: 1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_gaps(self.delta1, self.delta2)?;
        ReservoirSpec::ground(self.mu, self.alpha)?;
        if self.n_cycles == 0 || self.chains == 0 {
            return Err(Error::Parameter("n_cycles and chains must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_gaps(delta1: f64, delta2: f64) -> Result<()> {
    if !(delta1.is_finite() && delta2.is_finite() && delta1 > delta2 && delta2 > 0.0) {
        return Err(Error::Parameter(format!("gaps must satisfy delta1 > delta2 > 0, got {delta1}, {delta2}")));
    }
    Ok(())
}

/// Hot isochore: returns `(rho', Q_in)`.
pub fn stroke_a<S: UnitarySampler + ?Sized>(
    rho: &DensityOperator,
    delta1: f64,
    spec: &ReservoirSpec,
    sampler: &mut S,
) -> Result<(DensityOperator, f64)> {
    let out = hot_collision(rho, spec, sampler)?;
    let q = 0.5 * delta1 * (bloch_z(&out) - bloch_z(rho));
    Ok((out, q))
}

/// First adiabat: `W_out`.
pub fn stroke_b(rho: &DensityOperator, delta1: f64, delta2: f64) -> f64 {
    0.5 * bloch_z(rho) * (delta1 - delta2)
}

/// Cold isochore: returns `(rho'', Q_out)`.
pub fn stroke_c(rho: &DensityOperator, delta2: f64, spec: &ReservoirSpec) -> Result<(DensityOperator, f64)> {
    let out = cold_collision(rho, spec)?;
    let q = 0.5 * delta2 * (bloch_z(&out) - bloch_z(rho));
    Ok((out, q))
}

/// Second adiabat: `W_in`.
pub fn stroke_d(rho: &DensityOperator, delta1: f64, delta2: f64) -> f64 {
    0.5 * bloch_z(rho) * (delta2 - delta1)
}

/// Heat and work of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CycleRecord {
    pub q_in: f64,
    pub w_out: f64,
    pub q_out: f64,
    pub w_in: f64,
    pub w: f64,
    /// `None` when `|Q_in| < Q_FLOOR`.
    pub eta: Option<f64>,
    pub z: f64,
    pub z1: f64,
    pub z2: f64,
}

impl CycleRecord {
    /// Record for Bloch components `z -> z1` (hot) `-> z2` (cold).
    pub fn from_populations(delta1: f64, delta2: f64, z: f64, z1: f64, z2: f64) -> Self {
        let q_in = 0.5 * delta1 * (z1 - z);
        let w_out = 0.5 * z1 * (delta1 - delta2);
        let q_out = 0.5 * delta2 * (z2 - z1);
        let w_in = 0.5 * z2 * (delta2 - delta1);
        let mut r = Self { q_in, w_out, q_out, w_in, w: w_out + w_in, eta: None, z, z1, z2 };
        r.eta = cycle_efficiency(&r);
        r
    }

    pub fn eta_flagged(&self) -> bool {
        self.eta.is_none()
    }
}

pub fn cycle_efficiency(record: &CycleRecord) -> Option<f64> {
    if record.q_in.abs() < Q_FLOOR {
        None
    } else {
        Some(record.w / record.q_in)
    }
}

/// `sum W / sum Q_in`.
pub fn macroscopic_efficiency(records: &[CycleRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no cycle records".into()));
    }
    let w: f64 = records.iter().map(|r| r.w).sum();
    let q: f64 = records.iter().map(|r| r.q_in).sum();
    if q == 0.0 {
        return Err(Error::InsufficientData("total absorbed heat is zero".into()));
    }
    Ok(w / q)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OttoSummary {
    pub retained_cycles: usize,
    pub macroscopic_efficiency: f64,
    pub work: GaussianFit,
    pub heat_in: GaussianFit,
    pub work_heat_correlation: f64,
    pub flagged_eta: usize,
    pub mean_z: f64,
    pub mean_z2: f64,
    /// `sqrt(var(z)/n + var(z'')/n)`.
    pub stationarity_stderr: f64,
}

impl OttoSummary {
    pub fn from_records(records: &[CycleRecord]) -> Result<Self> {
        let w: Vec<f64> = records.iter().map(|r| r.w).collect();
        let q: Vec<f64> = records.iter().map(|r| r.q_in).collect();
        let z: Vec<f64> = records.iter().map(|r| r.z).collect();
        let z2: Vec<f64> = records.iter().map(|r| r.z2).collect();
        let fz = fit_gaussian(&z)?;
        let fz2 = fit_gaussian(&z2)?;
        let n = records.len() as f64;
        Ok(Self {
            retained_cycles: records.len(),
            macroscopic_efficiency: macroscopic_efficiency(records)?,
            work: fit_gaussian(&w)?,
            heat_in: fit_gaussian(&q)?,
            work_heat_correlation: pearson_correlation(&w, &q)?,
            flagged_eta: records.iter().filter(|r| r.eta_flagged()).count(),
            mean_z: fz.mean,
            mean_z2: fz2.mean,
            stationarity_stderr: ((fz.std * fz.std + fz2.std * fz2.std) / n).sqrt(),
        })
    }

    /// `|<z''> - <z>|`.
    pub fn stationarity_gap(&self) -> f64 {
        (self.mean_z2 - self.mean_z).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OttoRun {
    pub records: Vec<CycleRecord>,
    pub summary: OttoSummary,
}

impl OttoRun {
    /// Efficiencies of the unflagged records.
    pub fn etas(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.eta).collect()
    }
}

/// One chain of cycles starting from `|down>`, on child stream `stream`.
pub fn run_otto_chain(params: &OttoParams, stream: u64) -> Result<Vec<CycleRecord>> {
    params.validate()?;
    let spec = ReservoirSpec::ground(params.mu, params.alpha)?;
    let mut sampler = HaarSampler::from_stream(spec.joint_dim(), params.master_seed, stream)?;
    let mut rho = DensityOperator::down();
    let mut out = Vec::with_capacity(params.n_cycles);
    for n in 0..params.n_discard + params.n_cycles {
        let (rho1, _) = stroke_a(&rho, params.delta1, &spec, &mut sampler)?;
        let (rho2, _) = stroke_c(&rho1, params.delta2, &spec)?;
        if n >= params.n_discard {
            out.push(CycleRecord::from_populations(
                params.delta1,
                params.delta2,
                bloch_z(&rho),
                bloch_z(&rho1),
                bloch_z(&rho2),
            ));
        }
        rho = rho2;
    }
    Ok(out)
}

/// Runs `params.chains` chains (chain `c` on stream `c`) and concatenates
/// their retained records in chain order.
pub fn run_otto(params: &OttoParams, exec: Execution) -> Result<OttoRun> {
    params.validate()?;
    let chains = map_streams(params.chains, exec, |stream| run_otto_chain(params, stream))?;
    let records = chains.concat();
    let summary = OttoSummary::from_records(&records)?;
    Ok(OttoRun { records, summary })
}
