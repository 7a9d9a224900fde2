//! Passive states and ergotropy.
//!
//! The ergotropy of `rho` is `Tr(rho H) - Tr(pi H)`, where the passive state
//! `pi` carries the eigenvalues of `rho` sorted descending on the energy
//! levels of `H` sorted ascending. For a qubit with `H = gap/2 sigma_z` this
//! reduces to `gap/2 (|r| + z)` in terms of the Bloch vector.

use crate::error::{Error, Result};
use crate::linalg::{BlochVector, ComplexMatrix, DensityOperator, STATE_TOL};

/// Hamiltonian diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    energies: Vec<f64>,
    ascending: Vec<usize>,
}

impl Hamiltonian {
    /// `H = gap/2 sigma_z` in the `(|up>, |down>)` basis.
    pub fn qubit(gap: f64) -> Result<Self> {
        if !(gap.is_finite() && gap > 0.0) {
            return Err(Error::Parameter(format!("qubit gap must be positive, got {gap}")));
        }
        Self::diagonal(vec![0.5 * gap, -0.5 * gap])
    }

    /// Energies listed in basis order; levels are ranked ascending with
    /// equal energies kept in basis order.
    pub fn diagonal(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::Dimension(format!("Hamiltonian needs >= 2 levels, got {}", energies.len())));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("energy level".into()));
        }
        let mut ascending: Vec<usize> = (0..energies.len()).collect();
        ascending.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        Ok(Self { energies, ascending })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Basis indices of the levels, lowest energy first.
    pub fn levels_ascending(&self) -> &[usize] {
        &self.ascending
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.energies)
    }

    fn check(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "state of dimension {} with a {}-level Hamiltonian",
                rho.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `Tr(rho H)`.
    pub fn energy(&self, rho: &DensityOperator) -> Result<f64> {
        self.check(rho)?;
        let m = rho.matrix();
        Ok(self.energies.iter().enumerate().map(|(i, e)| m[(i, i)].re * e).sum())
    }
}

/// The passive state with the spectrum of `rho`.
pub fn passive_state(rho: &DensityOperator, h: &Hamiltonian) -> Result<DensityOperator> {
    h.check(rho)?;
    let populations = rho.eigen().values;
    let mut diag = vec![0.0; h.dim()];
    for (&level, &p) in h.levels_ascending().iter().zip(&populations) {
        diag[level] = p;
    }
    DensityOperator::new(ComplexMatrix::from_real_diagonal(&diag))
}

/// Energy of the passive state, `sum_n r_n e_n`.
pub fn passive_energy(rho: &DensityOperator, h: &Hamiltonian) -> Result<f64> {
    h.check(rho)?;
    let populations = rho.eigen().values;
    Ok(h.levels_ascending()
        .iter()
        .zip(&populations)
        .map(|(&level, p)| p * h.energies()[level])
        .sum())
}

/// Maximum work extractable from `rho` by a unitary.
pub fn ergotropy(rho: &DensityOperator, h: &Hamiltonian) -> Result<f64> {
    let e = h.energy(rho)? - passive_energy(rho, h)?;
    // Rounding can leave -1e-17 for passive states.
    Ok(e.max(0.0))
}

/// `gap/2 (|r| + z)`, the qubit ergotropy from the Bloch vector.
pub fn ergotropy_qubit_bloch(b: &BlochVector, gap: f64) -> Result<f64> {
    if !(gap.is_finite() && gap > 0.0) {
        return Err(Error::Parameter(format!("qubit gap must be positive, got {gap}")));
    }
    let r = b.length();
    if r > 1.0 + STATE_TOL {
        return Err(Error::BlochLength(r));
    }
    Ok((0.5 * gap * (r + b.z)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{HaarSampler, UnitarySampler};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bloch(x: f64, y: f64, z: f64) -> DensityOperator {
        BlochVector::new(x, y, z).unwrap().to_density().unwrap()
    }

    fn random_density(rng: &mut impl Rng, d: usize) -> DensityOperator {
        let data = (0..d * d)
            .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let g = ComplexMatrix::new(d, d, data).unwrap();
        let m = g.matmul(&g.adjoint()).unwrap();
        DensityOperator::new_normalized(m).unwrap()
    }

    #[test]
    fn passive_state_examples() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        assert_eq!(passive_state(&DensityOperator::up(), &h).unwrap(), DensityOperator::down());
        let already = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        assert_eq!(passive_state(&already, &h).unwrap(), already);
        let pi = passive_state(&bloch(0.6, 0.0, 0.0), &h).unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[0.2, 0.8]);
        assert!(pi.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn ergotropy_examples() {
        let h = Hamiltonian::qubit(1.7).unwrap();
        assert_eq!(ergotropy(&DensityOperator::down(), &h).unwrap(), 0.0);
        assert_eq!(ergotropy(&DensityOperator::maximally_mixed(2), &h).unwrap(), 0.0);
        assert!((ergotropy(&DensityOperator::up(), &h).unwrap() - 1.7).abs() < 1e-15);
        assert!((ergotropy(&bloch(1.0, 0.0, 0.0), &h).unwrap() - 0.85).abs() < 1e-15);
    }

    #[test]
    fn bloch_shortcut_examples() {
        let down = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        assert_eq!(ergotropy_qubit_bloch(&down, 2.0).unwrap(), 0.0);
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(ergotropy_qubit_bloch(&up, 2.0).unwrap(), 2.0);
        let pure = BlochVector::new(0.6, 0.0, 0.8).unwrap();
        assert!((ergotropy_qubit_bloch(&pure, 2.0).unwrap() - 1.8).abs() < 1e-15);
        assert!((ergotropy(&pure.to_density().unwrap(), &Hamiltonian::qubit(2.0).unwrap()).unwrap() - 1.8).abs() < 1e-15);
        let bad = BlochVector { x: 1.0, y: 1.0, z: 0.0 };
        assert!(matches!(ergotropy_qubit_bloch(&bad, 1.0), Err(Error::BlochLength(_))));
        assert!(ergotropy_qubit_bloch(&down, 0.0).is_err());
    }

    #[test]
    fn bloch_shortcut_agrees_with_spectral_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10_000 {
            let rho = random_density(&mut rng, 2);
            let gap = rng.random_range(0.1..5.0);
            let a = ergotropy(&rho, &Hamiltonian::qubit(gap).unwrap()).unwrap();
            let b = ergotropy_qubit_bloch(&BlochVector::from_density(&rho).unwrap(), gap).unwrap();
            assert!((a - b).abs() < 1e-12);
            assert!(a >= 0.0);
        }
    }

    #[test]
    fn passive_state_shares_spectrum_and_is_passive() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let h = Hamiltonian::diagonal(vec![0.3, -1.0, 2.0, 0.3]).unwrap();
        assert_eq!(h.levels_ascending(), &[1, 0, 3, 2]);
        for _ in 0..200 {
            let rho = random_density(&mut rng, 4);
            let pi = passive_state(&rho, &h).unwrap();
            let (a, b) = (rho.eigen().values, pi.eigen().values);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!(ergotropy(&pi, &h).unwrap() < 1e-15);
            assert!(ergotropy(&rho, &h).unwrap() >= 0.0);
        }
    }

    #[test]
    fn ergotropy_bounds_energy_of_any_unitary_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let h = Hamiltonian::diagonal(vec![0.0, 0.5, 1.5]).unwrap();
        let mut s = HaarSampler::new(3, 41).unwrap();
        for _ in 0..200 {
            let rho = random_density(&mut rng, 3);
            let floor = passive_energy(&rho, &h).unwrap();
            let u = s.sample();
            let rotated = DensityOperator::new_normalized(rho.matrix().conjugate_by(&u).unwrap()).unwrap();
            assert!(h.energy(&rotated).unwrap() >= floor - 1e-12);
            // Unitary conjugation leaves the passive energy unchanged.
            assert!((passive_energy(&rotated, &h).unwrap() - floor).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        let rho = DensityOperator::maximally_mixed(3);
        assert!(matches!(passive_state(&rho, &h), Err(Error::Dimension(_))));
        assert!(matches!(ergotropy(&rho, &h), Err(Error::Dimension(_))));
        assert!(Hamiltonian::qubit(-1.0).is_err());
        assert!(Hamiltonian::diagonal(vec![1.0]).is_err());
    }
}
