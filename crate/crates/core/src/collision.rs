//! Hot (random unitary) and cold (partial swap) collision channels.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::haar::UnitarySampler;
use crate::linalg::{ComplexMatrix, DensityOperator, STATE_TOL};

/// Reservoir parameters shared by every collision of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirSpec {
    hot_dim: usize,
    hot_state: DensityOperator,
    hot_vector: Vec<C64>,
    cold_state: DensityOperator,
    swap_angle: f64,
}

impl ReservoirSpec {
    pub fn new(
        hot_dim: usize,
        hot_state: DensityOperator,
        cold_state: DensityOperator,
        swap_angle: f64,
    ) -> Result<Self> {
        if hot_dim < 2 {
            return Err(Error::Parameter(format!("hot qudit dimension {hot_dim} < 2")));
        }
        if hot_state.dim() != hot_dim {
            return Err(Error::Dimension(format!(
                "hot state has dimension {}, expected {hot_dim}",
                hot_state.dim()
            )));
        }
        let purity = hot_state.purity();
        if (purity - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("hot reservoir state is not pure (purity {purity})")));
        }
        if cold_state.dim() != 2 {
            return Err(Error::Dimension(format!("cold state has dimension {}, expected 2", cold_state.dim())));
        }
        check_swap_angle(swap_angle)?;
        let hot_vector = pure_state_vector(&hot_state);
        Ok(Self { hot_dim, hot_state, hot_vector, cold_state, swap_angle })
    }

    /// Hot qudits in `|0>`, cold qubits in the ground state `|down>`.
    pub fn ground(hot_dim: usize, swap_angle: f64) -> Result<Self> {
        let hot = DensityOperator::basis(hot_dim.max(1), 0)
            .map_err(|_| Error::Parameter(format!("hot qudit dimension {hot_dim} < 2")))?;
        Self::new(hot_dim, hot, DensityOperator::down(), swap_angle)
    }

    pub fn hot_dim(&self) -> usize {
        self.hot_dim
    }

    pub fn hot_state(&self) -> &DensityOperator {
        &self.hot_state
    }

    pub fn cold_state(&self) -> &DensityOperator {
        &self.cold_state
    }

    pub fn swap_angle(&self) -> f64 {
        self.swap_angle
    }

    /// Dimension of the joint qubit-qudit space, `2 mu`.
    pub fn joint_dim(&self) -> usize {
        2 * self.hot_dim
    }
}

fn check_swap_angle(alpha: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::SwapAngle(alpha));
    }
    Ok(())
}

// chi = |phi><phi|, read off the column with the largest diagonal weight.
fn pure_state_vector(chi: &DensityOperator) -> Vec<C64> {
    let m = chi.matrix();
    let n = chi.dim();
    let k = (0..n).max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re)).unwrap_or(0);
    let inv = 1.0 / m[(k, k)].re.sqrt();
    (0..n).map(|r| m[(r, k)] * inv).collect()
}

/// `(cos alpha, sin alpha)`, exact at both ends of `[0, pi/2]`.
pub fn swap_cos_sin(alpha: f64) -> (f64, f64) {
    if alpha == FRAC_PI_2 {
        (0.0, 1.0)
    } else if alpha == 0.0 {
        (1.0, 0.0)
    } else {
        let (s, c) = alpha.sin_cos();
        (c, s)
    }
}

/// Two-qubit swap `S |a>|b> = |b>|a>`.
pub fn swap_operator() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            s[(b * 2 + a, a * 2 + b)] = C64::new(1.0, 0.0);
        }
    }
    s
}

/// `P(alpha) = cos(alpha) I + i sin(alpha) S` on two qubits.
pub fn partial_swap_unitary(alpha: f64) -> Result<ComplexMatrix> {
    check_swap_angle(alpha)?;
    let (c, s) = swap_cos_sin(alpha);
    let id = ComplexMatrix::identity(4).scale(C64::new(c, 0.0));
    let sw = swap_operator().scale(C64::new(0.0, s));
    Ok(&id + &sw)
}

fn require_qubit(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(format!("working fluid must be a qubit, got dimension {}", rho.dim())));
    }
    Ok(())
}

/// Collision with one cold-reservoir qubit, traced out:
/// `cos^2 a rho + sin^2 a theta + i sin a cos a [theta, rho]`.
pub fn cold_collision(rho: &DensityOperator, spec: &ReservoirSpec) -> Result<DensityOperator> {
    require_qubit(rho)?;
    let (c, s) = swap_cos_sin(spec.swap_angle);
    if s == 0.0 {
        return Ok(rho.clone());
    }
    let r = rho.matrix();
    let th = spec.cold_state.matrix();
    let comm = th.commutator(r)?;
    let out = &(&(r * (c * c)) + &(th * (s * s))) + &comm.scale(C64::new(0.0, s * c));
    DensityOperator::new_normalized(out)
}

/// Collision with one fresh hot-reservoir qudit through a freshly drawn
/// unitary on the `2 mu` joint space.
pub fn hot_collision<S: UnitarySampler + ?Sized>(
    rho: &DensityOperator,
    spec: &ReservoirSpec,
    sampler: &mut S,
) -> Result<DensityOperator> {
    if sampler.dim() != spec.joint_dim() {
        return Err(Error::Dimension(format!(
            "sampler dimension {} does not match joint dimension {}",
            sampler.dim(),
            spec.joint_dim()
        )));
    }
    let u = sampler.sample();
    apply_hot_unitary(rho, spec, &u)
}

/// `Tr_H[U (rho ⊗ chi) U^dagger]` for a given joint unitary.
///
/// Uses `chi = |phi><phi|`: only the two columns `U (|s> ⊗ |phi>)` enter.
pub fn apply_hot_unitary(rho: &DensityOperator, spec: &ReservoirSpec, u: &ComplexMatrix) -> Result<DensityOperator> {
    require_qubit(rho)?;
    let mu = spec.hot_dim;
    let l = 2 * mu;
    if u.rows() != l || u.cols() != l {
        return Err(Error::Dimension(format!("hot unitary is {}x{}, expected {l}x{l}", u.rows(), u.cols())));
    }
    let phi = &spec.hot_vector;
    let mut cols = [vec![C64::new(0.0, 0.0); l], vec![C64::new(0.0, 0.0); l]];
    for (s, col) in cols.iter_mut().enumerate() {
        for (i, out) in col.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, p) in phi.iter().enumerate() {
                acc += u[(i, s * mu + k)] * p;
            }
            *out = acc;
        }
    }
    let r = rho.matrix();
    let mut out = ComplexMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..2 {
                for sp in 0..2 {
                    let w = r[(s, sp)];
                    let mut inner = C64::new(0.0, 0.0);
                    for k in 0..mu {
                        inner += cols[s][a * mu + k] * cols[sp][b * mu + k].conj();
                    }
                    acc += w * inner;
                }
            }
            out[(a, b)] = acc;
        }
    }
    DensityOperator::new_normalized(out)
}

/// One full hot-then-cold cycle.
pub fn cycle_map<S: UnitarySampler + ?Sized>(
    rho: &DensityOperator,
    spec: &ReservoirSpec,
    sampler: &mut S,
) -> Result<DensityOperator> {
    let hot = hot_collision(rho, spec, sampler)?;
    cold_collision(&hot, spec)
}

/// Dense joint-space constructions of the same channels, used to validate
/// the production paths.
pub mod reference {
    use super::*;
    use crate::linalg::{kron, partial_trace};

    /// `Tr_H[U (rho ⊗ chi) U^dagger]` built explicitly on the `2 mu` space.
    pub fn hot_collision_dense(rho: &DensityOperator, spec: &ReservoirSpec, u: &ComplexMatrix) -> Result<DensityOperator> {
        let joint = kron(rho.matrix(), spec.hot_state().matrix());
        let evolved = joint.conjugate_by(u)?;
        DensityOperator::new_normalized(partial_trace(&evolved, &[2, spec.hot_dim()], 0)?)
    }

    /// `Tr_C[P (rho ⊗ theta) P^dagger]` built explicitly on the 4-dim space.
    pub fn cold_collision_dense(rho: &DensityOperator, spec: &ReservoirSpec) -> Result<DensityOperator> {
        let p = partial_swap_unitary(spec.swap_angle())?;
        let joint = kron(rho.matrix(), spec.cold_state().matrix());
        let evolved = joint.conjugate_by(&p)?;
        DensityOperator::new_normalized(partial_trace(&evolved, &[2, 2], 0)?)
    }

    /// The whole cycle on the `4 mu` space system ⊗ hot ⊗ cold: apply `U`
    /// on system-hot, then `P(alpha)` on system-cold, trace both reservoirs.
    pub fn cycle_map_joint(rho: &DensityOperator, spec: &ReservoirSpec, u: &ComplexMatrix) -> Result<DensityOperator> {
        let mu = spec.hot_dim();
        let n = 4 * mu;
        let state = kron(&kron(rho.matrix(), spec.hot_state().matrix()), spec.cold_state().matrix());
        let r_full = kron(u, &ComplexMatrix::identity(2));
        let p = partial_swap_unitary(spec.swap_angle())?;
        let mut p_full = ComplexMatrix::zeros(n, n);
        let idx = |s: usize, h: usize, c: usize| (s * mu + h) * 2 + c;
        for h in 0..mu {
            for s in 0..2 {
                for c in 0..2 {
                    for sp in 0..2 {
                        for cp in 0..2 {
                            p_full[(idx(s, h, c), idx(sp, h, cp))] = p[(s * 2 + c, sp * 2 + cp)];
                        }
                    }
                }
            }
        }
        let total = p_full.matmul(&r_full)?;
        let evolved = state.conjugate_by(&total)?;
        DensityOperator::new_normalized(partial_trace(&evolved, &[2, mu, 2], 0)?)
    }
}

#[cfg(test)]
mod tests {
    use super::reference::*;
    use super::*;
    use crate::haar::{GinibreSampler, HaarSampler};
    use crate::linalg::{BlochVector, STATE_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_qubit(rng: &mut impl Rng) -> DensityOperator {
        let r: f64 = rng.random::<f64>().cbrt();
        let z: f64 = rng.random_range(-1.0..1.0);
        let ph: f64 = rng.random_range(0.0..2.0 * PI);
        let t = (1.0 - z * z).sqrt();
        BlochVector::new(r * t * ph.cos(), r * t * ph.sin(), r * z).unwrap().to_density().unwrap()
    }

    #[test]
    fn partial_swap_endpoints() {
        assert_eq!(partial_swap_unitary(0.0).unwrap(), ComplexMatrix::identity(4));
        let full = partial_swap_unitary(FRAC_PI_2).unwrap();
        assert_eq!(full, swap_operator().scale(C64::new(0.0, 1.0)));
        assert!(partial_swap_unitary(PI / 10.0).unwrap().unitarity_error() < 1e-12);
        assert!(matches!(partial_swap_unitary(2.0), Err(Error::SwapAngle(_))));
        assert!(matches!(partial_swap_unitary(-0.1), Err(Error::SwapAngle(_))));
    }

    #[test]
    fn swap_exchanges_factors() {
        let up = DensityOperator::up();
        let down = DensityOperator::down();
        let s = swap_operator();
        let swapped = crate::linalg::kron(up.matrix(), down.matrix()).conjugate_by(&s).unwrap();
        assert_eq!(swapped, crate::linalg::kron(down.matrix(), up.matrix()));
    }

    #[test]
    fn cold_collision_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = ReservoirSpec::ground(2, FRAC_PI_2).unwrap();
        let none = ReservoirSpec::ground(2, 0.0).unwrap();
        for _ in 0..100 {
            let rho = random_qubit(&mut rng);
            assert_eq!(cold_collision(&rho, &full).unwrap(), DensityOperator::down());
            assert!(cold_collision(&rho, &none).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn cold_collision_on_excited_state() {
        for k in 0..=10 {
            let alpha = FRAC_PI_2 * k as f64 / 10.0;
            let spec = ReservoirSpec::ground(2, alpha).unwrap();
            let out = cold_collision(&DensityOperator::up(), &spec).unwrap();
            let b = BlochVector::from_density(&out).unwrap();
            assert!((b.z - (2.0 * alpha).cos()).abs() < 1e-14);
            assert_eq!((b.x, b.y), (0.0, 0.0));
        }
    }

    #[test]
    fn cold_closed_form_matches_dense_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..10 {
            let alpha = FRAC_PI_2 * k as f64 / 9.0;
            let spec = ReservoirSpec::ground(2, alpha).unwrap();
            for _ in 0..100 {
                let rho = random_qubit(&mut rng);
                let fast = cold_collision(&rho, &spec).unwrap();
                let dense = cold_collision_dense(&rho, &spec).unwrap();
                assert!(fast.matrix().max_abs_diff(dense.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn cold_closed_form_with_mixed_reservoir_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = random_qubit(&mut rng);
        let spec = ReservoirSpec::new(2, DensityOperator::basis(2, 0).unwrap(), theta, 0.4).unwrap();
        for _ in 0..100 {
            let rho = random_qubit(&mut rng);
            let fast = cold_collision(&rho, &spec).unwrap();
            let dense = cold_collision_dense(&rho, &spec).unwrap();
            assert!(fast.matrix().max_abs_diff(dense.matrix()) < 1e-10);
        }
    }

    #[test]
    fn repeated_cold_collisions_discharge_monotonically() {
        let spec = ReservoirSpec::ground(2, PI / 7.0).unwrap();
        let mut rho = BlochVector::new(0.0, 0.0, 0.9).unwrap().to_density().unwrap();
        let mut z = 0.9;
        for _ in 0..50 {
            rho = cold_collision(&rho, &spec).unwrap();
            let nz = BlochVector::from_density(&rho).unwrap().z;
            assert!(nz < z && nz >= -1.0);
            z = nz;
        }
        assert!(z < -0.99);
    }

    #[test]
    fn hot_fast_path_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &mu in &[2, 3, 4, 8] {
            // An arbitrary pure hot state, not a basis vector.
            let psi: Vec<C64> = (0..mu).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let chi = DensityOperator::pure(&psi).unwrap();
            let spec = ReservoirSpec::new(mu, chi, DensityOperator::down(), 0.3).unwrap();
            let mut s = HaarSampler::new(2 * mu, mu as u64).unwrap();
            for _ in 0..50 {
                let rho = random_qubit(&mut rng);
                let u = s.sample();
                let fast = apply_hot_unitary(&rho, &spec, &u).unwrap();
                let dense = hot_collision_dense(&rho, &spec, &u).unwrap();
                assert!(fast.matrix().max_abs_diff(dense.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn hot_collision_outputs_valid_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = ReservoirSpec::ground(3, 0.5).unwrap();
        let mut s = HaarSampler::new(6, 5).unwrap();
        for _ in 0..1000 {
            let out = hot_collision(&random_qubit(&mut rng), &spec, &mut s).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < STATE_TOL);
            assert!(out.eigen().values[1] >= -STATE_TOL);
        }
    }

    #[test]
    fn hot_collision_is_deterministic() {
        let spec = ReservoirSpec::ground(4, 0.5).unwrap();
        let rho = DensityOperator::up();
        let a = hot_collision(&rho, &spec, &mut HaarSampler::new(8, 77).unwrap()).unwrap();
        let b = hot_collision(&rho, &spec, &mut HaarSampler::new(8, 77).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hot_collision_rejects_wrong_sampler() {
        let spec = ReservoirSpec::ground(4, 0.5).unwrap();
        let mut s = HaarSampler::new(6, 0).unwrap();
        assert!(matches!(hot_collision(&DensityOperator::up(), &spec, &mut s), Err(Error::Dimension(_))));
        assert!(cold_collision(&DensityOperator::maximally_mixed(3), &spec).is_err());
    }

    #[test]
    fn mean_hot_output_mixes_with_qudit_size() {
        let n = 4000;
        let mean_purity = |mu: usize| {
            let spec = ReservoirSpec::ground(mu, 0.5).unwrap();
            let mut s = HaarSampler::new(2 * mu, 8).unwrap();
            let mut acc = ComplexMatrix::zeros(2, 2);
            for _ in 0..n {
                let out = hot_collision(&DensityOperator::up(), &spec, &mut s).unwrap();
                acc = &acc + out.matrix();
            }
            DensityOperator::new_normalized(&acc * (1.0 / n as f64)).unwrap().purity()
        };
        // The ensemble-mean state after one collision is close to I/2 already;
        // what shrinks with mu is the spread of the individual outputs.
        let p2 = mean_purity(2);
        let p16 = mean_purity(16);
        assert!(p16 < p2, "p2 = {p2}, p16 = {p16}");
        assert!((p16 - 0.5).abs() < 1e-3);
    }

    #[test]
    fn individual_outputs_approach_maximally_mixed() {
        let avg_purity = |mu: usize| {
            let spec = ReservoirSpec::ground(mu, 0.5).unwrap();
            let mut s = GinibreSampler::new(2 * mu, 9).unwrap();
            (0..4000)
                .map(|_| hot_collision(&DensityOperator::up(), &spec, &mut s).unwrap().purity())
                .sum::<f64>()
                / 4000.0
        };
        // Reduced state of a Haar-random pure state on C^2 ⊗ C^mu.
        for mu in [2, 8, 32] {
            let expect = (mu as f64 + 2.0) / (2.0 * mu as f64 + 1.0);
            let p = avg_purity(mu);
            assert!((p - expect).abs() < 0.01, "mu = {mu}: {p} vs {expect}");
        }
    }

    #[test]
    fn sequential_cycle_matches_joint_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for &mu in &[2, 4] {
            let spec = ReservoirSpec::ground(mu, rng.random_range(0.0..FRAC_PI_2)).unwrap();
            let mut s = HaarSampler::new(2 * mu, 10 + mu as u64).unwrap();
            for _ in 0..50 {
                let rho = random_qubit(&mut rng);
                let u = s.sample();
                let seq = cold_collision(&apply_hot_unitary(&rho, &spec, &u).unwrap(), &spec).unwrap();
                let joint = cycle_map_joint(&rho, &spec, &u).unwrap();
                assert!(seq.matrix().max_abs_diff(joint.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn complete_swap_cycle_ends_in_cold_state() {
        let spec = ReservoirSpec::ground(3, FRAC_PI_2).unwrap();
        let mut s = HaarSampler::new(6, 12).unwrap();
        let mut rho = DensityOperator::up();
        for _ in 0..20 {
            rho = cycle_map(&rho, &spec, &mut s).unwrap();
            assert_eq!(rho, DensityOperator::down());
        }
        let spec = ReservoirSpec::ground(2, 0.9).unwrap();
        let out = cycle_map(&DensityOperator::down(), &spec, &mut HaarSampler::new(4, 1).unwrap()).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reservoir_validation() {
        assert!(ReservoirSpec::ground(1, 0.1).is_err());
        assert!(matches!(ReservoirSpec::ground(2, 1.6), Err(Error::SwapAngle(_))));
        let mixed = DensityOperator::maximally_mixed(3);
        assert!(ReservoirSpec::new(3, mixed, DensityOperator::down(), 0.1).is_err());
        let chi = DensityOperator::basis(3, 1).unwrap();
        assert!(ReservoirSpec::new(4, chi.clone(), DensityOperator::down(), 0.1).is_err());
        assert!(ReservoirSpec::new(3, chi.clone(), chi, 0.1).is_err());
    }
}
