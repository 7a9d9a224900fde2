//! Haar-random unitaries on `U(L)`.
//!
//! The production sampler is the Hurwitz construction: a product of
//! `L(L-1)/2` elementary two-level rotations with a global phase,
//!
//! ```text
//! U = e^{i alpha} E_1 E_2 ... E_{L-1}
//! E_s = E^{(s-1,s)}(phi, psi, 0) E^{(s-2,s)}(phi, psi, 0) ... E^{(0,s)}(phi, psi, chi_s)
//! ```
//!
//! where `E^{(i,j)}` is the identity except on the `(i, j)` block
//!
//! ```text
//! [  cos(phi) e^{ i psi}   sin(phi) e^{ i chi} ]
//! [ -sin(phi) e^{-i chi}   cos(phi) e^{-i psi} ]
//! ```
//!
//! `alpha`, `psi` and `chi` are uniform on `[0, 2 pi)`. The polar angle of the
//! rotation on `(r, s)` is drawn as `cos(phi) = xi^{1 / (2 (r + 1))}` with `xi`
//! uniform on `[0, 1]`; with this block convention the last row of `E_s` is
//! then a uniformly distributed unit vector (the moduli squared follow a
//! flat Dirichlet law by stick breaking).
//!
//! Random numbers are consumed in a fixed order: `alpha`, then for
//! `s = 1..L` and `r = s-1` down to `0` the triple `xi, psi` and (only when
//! `r == 0`) `chi`.
//!
//! [`GinibreSampler`] draws the same law through the QR decomposition of a
//! complex Gaussian matrix and exists as an independent cross-check.
//!
//! Streams are ChaCha20 (`rand_chacha` pinned to 0.9.0) keyed by
//! `seed_from_u64(master_seed)`; the child stream for trajectory `i` is the
//! same key with ChaCha stream id `i`.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Deterministic child stream `stream` of `master_seed`.
pub fn child_rng(master_seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Source of random unitaries of a fixed dimension.
pub trait UnitarySampler {
    fn dim(&self) -> usize;
    fn sample(&mut self) -> ComplexMatrix;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryRotationAngles {
    pub i: usize,
    pub j: usize,
    pub phi: f64,
    pub psi: f64,
    pub chi: f64,
}

impl ElementaryRotationAngles {
    pub fn new(i: usize, j: usize, phi: f64, psi: f64, chi: f64) -> Result<Self> {
        if i >= j {
            return Err(Error::Index(format!("rotation indices must satisfy i < j, got ({i}, {j})")));
        }
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::Parameter(format!("phi = {phi} outside [0, pi/2]")));
        }
        for (name, v) in [("psi", psi), ("chi", chi)] {
            if !(0.0..TAU).contains(&v) {
                return Err(Error::Parameter(format!("{name} = {v} outside [0, 2 pi)")));
            }
        }
        Ok(Self { i, j, phi, psi, chi })
    }

    fn block(&self) -> [C64; 4] {
        let (s, c) = self.phi.sin_cos();
        let e_psi = C64::from_polar(1.0, self.psi);
        let e_chi = C64::from_polar(1.0, self.chi);
        [e_psi * c, e_chi * s, -e_chi.conj() * s, e_psi.conj() * c]
    }
}

/// The `dim x dim` elementary rotation described by `angles`.
pub fn elementary_rotation(dim: usize, angles: &ElementaryRotationAngles) -> Result<ComplexMatrix> {
    if angles.j >= dim {
        return Err(Error::Index(format!(
            "rotation on ({}, {}) in dimension {dim}",
            angles.i, angles.j
        )));
    }
    let [a, b, c, d] = angles.block();
    let mut m = ComplexMatrix::identity(dim);
    m[(angles.i, angles.i)] = a;
    m[(angles.i, angles.j)] = b;
    m[(angles.j, angles.i)] = c;
    m[(angles.j, angles.j)] = d;
    Ok(m)
}

// Columns `i`, `j` of the first `rows` rows.
fn rotate_columns(m: &mut ComplexMatrix, i: usize, j: usize, [a, b, c, d]: [C64; 4], rows: usize) {
    for r in 0..rows {
        let mi = m[(r, i)];
        let mj = m[(r, j)];
        m[(r, i)] = mi * a + mj * c;
        m[(r, j)] = mi * b + mj * d;
    }
}

fn unit_phase(t: f64) -> C64 {
    let (s, c) = t.sin_cos();
    C64::new(c, s)
}

/// Hurwitz-parametrized Haar sampler on `U(dim)`.
#[derive(Debug, Clone)]
pub struct HaarSampler {
    dim: usize,
    rng: ChaCha20Rng,
}

impl HaarSampler {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        Self::from_stream(dim, seed, 0)
    }

    pub fn from_stream(dim: usize, master_seed: u64, stream: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Dimension(format!("Haar sampler dimension {dim} < 2")));
        }
        Ok(Self { dim, rng: child_rng(master_seed, stream) })
    }

    /// Draws the full set of Hurwitz angles in stream order.
    pub fn sample_angles(&mut self) -> (f64, Vec<ElementaryRotationAngles>) {
        let l = self.dim;
        let alpha = self.rng.random::<f64>() * TAU;
        let mut out = Vec::with_capacity(l * (l - 1) / 2);
        for s in 1..l {
            for r in (0..s).rev() {
                let xi: f64 = self.rng.random();
                let phi = xi.powf(0.5 / (r + 1) as f64).acos();
                let psi = self.rng.random::<f64>() * TAU;
                let chi = if r == 0 { self.rng.random::<f64>() * TAU } else { 0.0 };
                out.push(ElementaryRotationAngles { i: r, j: s, phi, psi, chi });
            }
        }
        (alpha, out)
    }
}

impl UnitarySampler for HaarSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&mut self) -> ComplexMatrix {
        // Same draws as `sample_angles`, without the round trip through
        // angles. Before `E_s` is applied only rows `0..=s` of columns
        // `0..=s` are nonzero.
        let l = self.dim;
        let mut m = ComplexMatrix::identity(l).scale(unit_phase(self.rng.random::<f64>() * TAU));
        for s in 1..l {
            for r in (0..s).rev() {
                let xi: f64 = self.rng.random();
                let c = xi.powf(0.5 / (r + 1) as f64);
                let sn = (1.0 - c * c).max(0.0).sqrt();
                let e_psi = unit_phase(self.rng.random::<f64>() * TAU);
                let e_chi = if r == 0 { unit_phase(self.rng.random::<f64>() * TAU) } else { C64::new(1.0, 0.0) };
                let block = [e_psi * c, e_chi * sn, -e_chi.conj() * sn, e_psi.conj() * c];
                rotate_columns(&mut m, r, s, block, s + 1);
            }
        }
        m
    }
}

/// Haar sampler via QR of a complex Ginibre matrix, with the phases of the
/// `R` diagonal moved into `Q`.
#[derive(Debug, Clone)]
pub struct GinibreSampler {
    dim: usize,
    rng: ChaCha20Rng,
}

impl GinibreSampler {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Dimension(format!("Ginibre sampler dimension {dim} < 2")));
        }
        Ok(Self { dim, rng: child_rng(seed, 0) })
    }
}

impl UnitarySampler for GinibreSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&mut self) -> ComplexMatrix {
        let n = self.dim;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = DMatrix::<C64>::from_fn(n, n, |_, _| {
            let re: f64 = self.rng.sample(StandardNormal);
            let im: f64 = self.rng.sample(StandardNormal);
            C64::new(re * h, im * h)
        });
        let qr = g.qr();
        let (q, r) = (qr.q(), qr.r());
        let mut out = ComplexMatrix::zeros(n, n);
        for c in 0..n {
            let d = r[(c, c)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            for row in 0..n {
                out[(row, c)] = q[(row, c)] * phase;
            }
        }
        out
    }
}
