//! Single-qubit quantum battery and quantum Otto engine fuelled by random
//! collisions.
//!
//! The working fluid is one qubit. It alternately collides with a "hot"
//! reservoir of qudits, each interaction a Haar-random unitary on the joint
//! qubit-qudit space, and with a zero-temperature "cold" reservoir of qubits
//! through a partial swap. The crate provides
//!
//! * [`linalg`]: small dense complex matrices, Kronecker products, partial
//!   traces and Hermitian eigensolvers,
//! * [`haar`]: seeded Haar-random unitary sampling (Hurwitz construction plus
//!   a QR-of-Ginibre reference sampler),
//! * [`collision`]: the hot and cold collision channels and their composition,
//! * [`ergotropy`]: passive states and extractable work,
//! * [`engine`]: the battery and four-stroke Otto drivers,
//! * [`stats`]: histograms, Gaussian and power-law fits, and the closed-form
//!   density of the ratio of two independent Gaussians.
//!
//! Basis convention: qubit states are written in the ordered basis
//! `(|up>, |down>)` with `sigma_z |up> = +|up>`, so the ground state of
//! `H = gap/2 * sigma_z` is `|down>`. Joint spaces are ordered
//! system ⊗ hot qudit ⊗ cold qubit.

pub mod collision;
pub mod engine;
pub mod ergotropy;
mod error;
pub mod haar;
pub mod linalg;
pub mod stats;

pub use collision::ReservoirSpec;
pub use engine::{BatteryRunConfig, CycleRecord, Execution, OttoParams};
pub use ergotropy::Hamiltonian;
pub use error::{Error, Result};
pub use haar::{GinibreSampler, HaarSampler, UnitarySampler};
pub use linalg::{BlochVector, ComplexMatrix, DensityOperator};
pub use num_complex::Complex64 as C64;
pub use stats::{GaussianFit, Histogram, RatioPdfParams};
