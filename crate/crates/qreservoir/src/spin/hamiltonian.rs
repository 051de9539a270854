//! Transverse-field Ising Hamiltonian and its cached unitary propagator.
//!
//! The model is `H = sum_{i<j} J_ij sx_i sx_j + h sum_i sz_i` with random
//! couplings `J_ij` drawn i.i.d. uniform from a configured range.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::density::{qubit_mask, DensityMatrix};
use crate::error::{QrError, Result};

/// Symmetric coupling matrix plus homogeneous transverse field.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    couplings: Array2<f64>,
    field: f64,
    n_spins: usize,
}

impl SpinHamiltonian {
    /// Draw couplings `J_ij ~ U[low, high]` for `i < j` in row-major order
    /// from a ChaCha8 stream seeded with `seed`. Deterministic per seed.
    pub fn random(n_spins: usize, field: f64, low: f64, high: f64, seed: u64) -> Result<Self> {
        if n_spins < 2 {
            return Err(QrError::Domain("spin network needs at least 2 spins".into()));
        }
        if low > high {
            return Err(QrError::Domain(format!("coupling range [{low}, {high}] is empty")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut couplings = Array2::zeros((n_spins, n_spins));
        for i in 0..n_spins {
            for j in (i + 1)..n_spins {
                let j_ij = if low == high { low } else { rng.gen_range(low..high) };
                couplings[[i, j]] = j_ij;
                couplings[[j, i]] = j_ij;
            }
        }
        Ok(SpinHamiltonian { couplings, field, n_spins })
    }

    pub fn from_couplings(couplings: Array2<f64>, field: f64) -> Result<Self> {
        let n_spins = couplings.nrows();
        if couplings.ncols() != n_spins {
            return Err(QrError::Dimension("coupling matrix must be square".into()));
        }
        for i in 0..n_spins {
            if couplings[[i, i]] != 0.0 {
                return Err(QrError::Domain("coupling matrix diagonal must be zero".into()));
            }
            for j in 0..n_spins {
                if couplings[[i, j]] != couplings[[j, i]] {
                    return Err(QrError::Domain("coupling matrix must be symmetric".into()));
                }
            }
        }
        Ok(SpinHamiltonian { couplings, field, n_spins })
    }

    pub fn couplings(&self) -> &Array2<f64> {
        &self.couplings
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Dense `2^N x 2^N` matrix representation.
    ///
    /// `sz` is diagonal in the computational basis; each `sx_i sx_j` term
    /// couples basis states differing exactly in bits `i` and `j`.
    pub fn dense(&self) -> Array2<C64> {
        let n = self.n_spins;
        let dim = 1 << n;
        let mut h = Array2::zeros((dim, dim));
        for k in 0..dim {
            // field term: sz|0> = +|0>
            let mut diag = 0.0;
            for i in 0..n {
                diag += if k & qubit_mask(n, i) == 0 { self.field } else { -self.field };
            }
            h[[k, k]] = C64::new(diag, 0.0);
            for i in 0..n {
                for j in (i + 1)..n {
                    let j_ij = self.couplings[[i, j]];
                    if j_ij != 0.0 {
                        let flipped = k ^ qubit_mask(n, i) ^ qubit_mask(n, j);
                        h[[flipped, k]] += C64::new(j_ij, 0.0);
                    }
                }
            }
        }
        h
    }
}

/// Cached unitary `U = exp(-i H dt_sub)`, built once per realization via
/// Hermitian eigendecomposition and reused for every step.
#[derive(Debug, Clone)]
pub struct Propagator {
    u: Array2<C64>,
    n_qubits: usize,
}

impl Propagator {
    pub fn build(hamiltonian: &SpinHamiltonian, dt_sub: f64) -> Result<Self> {
        if dt_sub <= 0.0 || !dt_sub.is_finite() {
            return Err(QrError::Domain(format!("evolution time {dt_sub} must be positive")));
        }
        let dense = hamiltonian.dense();
        let (energies, vectors) = dense.eigh(UPLO::Lower)?;
        // U = W exp(-i E dt) W^dagger
        let mut phased = vectors.clone();
        for (mut col, &e) in phased.columns_mut().into_iter().zip(energies.iter()) {
            let phase = C64::new(0.0, -e * dt_sub).exp();
            col.mapv_inplace(|z| z * phase);
        }
        let u = phased.dot(&vectors.t().mapv(|z| z.conj()));
        Ok(Propagator { u, n_qubits: hamiltonian.n_spins() })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Propagator { u: Array2::eye(1 << n_qubits), n_qubits }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.u
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.u.t().mapv(|z| z.conj()).dot(&self.u);
        let dim = gram.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((gram[[i, j]] - expected).norm());
            }
        }
        worst
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> DensityMatrix {
        assert_eq!(rho.n_qubits(), self.n_qubits, "register size mismatch");
        let evolved = self.u.dot(rho.matrix()).dot(&self.u.t().mapv(|z| z.conj()));
        DensityMatrix::from_parts(evolved, self.n_qubits)
    }
}

/// `v` evenly spaced snapshots between two injections: snapshot `j` is
/// `U^j rho U^{-j}` for `j = 1..=v`; the last one is carried forward.
pub fn evolve_multiplexed(rho: &DensityMatrix, u: &Propagator, v: usize) -> Vec<DensityMatrix> {
    assert!(v >= 1, "multiplexing factor must be at least 1");
    let mut snapshots = Vec::with_capacity(v);
    let mut current = u.conjugate(rho);
    for _ in 1..v {
        let next = u.conjugate(&current);
        snapshots.push(current);
        current = next;
    }
    snapshots.push(current);
    snapshots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_range_gives_zero_couplings() {
        let h = SpinHamiltonian::random(3, 1.0, 0.0, 0.0, 7).unwrap();
        assert!(h.couplings().iter().all(|&j| j == 0.0));
    }

    #[test]
    fn coupling_draw_is_deterministic_per_seed() {
        let a = SpinHamiltonian::random(5, 10.0, -0.5, 0.5, 42).unwrap();
        let b = SpinHamiltonian::random(5, 10.0, -0.5, 0.5, 42).unwrap();
        assert_eq!(a.couplings(), b.couplings());
        let c = SpinHamiltonian::random(5, 10.0, -0.5, 0.5, 43).unwrap();
        assert_ne!(a.couplings(), c.couplings());
    }

    #[test]
    fn coupling_sampler_statistics() {
        // N=10 -> 45 independent couplings; the empirical mean of U[-1/2, 1/2]
        // draws should sit within 3 sigma of zero.
        let h = SpinHamiltonian::random(10, 10.0, -0.5, 0.5, 1).unwrap();
        let mut sum = 0.0;
        let mut count: f64 = 0.0;
        for i in 0..10 {
            for j in (i + 1)..10 {
                sum += h.couplings()[[i, j]];
                count += 1.0;
            }
        }
        assert_eq!(count, 45.0);
        let three_sigma = 3.0 * (1.0 / 12.0_f64.sqrt()) / count.sqrt();
        assert!((sum / count).abs() < three_sigma, "mean {} vs 3sigma {}", sum / count, three_sigma);
    }

    #[test]
    fn zero_hamiltonian_gives_identity_propagator() {
        let h = SpinHamiltonian::random(2, 0.0, 0.0, 0.0, 0).unwrap();
        let u = Propagator::build(&h, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.matrix()[[i, j]] - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_spin_analytic_phases() {
        // N=2 with J=0 acts as independent spins: the |00> component picks up
        // phase e^{-i 2h dt}, |01> and |10> no phase, |11> e^{+i 2h dt}.
        let h = SpinHamiltonian::random(2, 10.0, 0.0, 0.0, 0).unwrap();
        let u = Propagator::build(&h, 10.0).unwrap();
        let expect = [
            C64::new(0.0, -200.0).exp(),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 200.0).exp(),
        ];
        for (k, e) in expect.iter().enumerate() {
            assert!((u.matrix()[[k, k]] - e).norm() < 1e-9, "diag {k}");
            for j in 0..4 {
                if j != k {
                    assert!(u.matrix()[[k, j]].norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn propagator_matches_taylor_series_at_small_dt() {
        let h = SpinHamiltonian::random(2, 3.0, -0.5, 0.5, 11).unwrap();
        let dt = 0.01;
        let u = Propagator::build(&h, dt).unwrap();
        // independent oracle: truncated Taylor series of exp(-i H dt)
        let dense = h.dense();
        let mut series = Array2::<C64>::eye(4);
        let mut term = Array2::<C64>::eye(4);
        for k in 1..=12 {
            term = term.dot(&dense).mapv(|z| z * C64::new(0.0, -dt) / k as f64);
            series = series + &term;
        }
        for (a, b) in u.matrix().iter().zip(series.iter()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn propagator_is_unitary() {
        let h = SpinHamiltonian::random(4, 10.0, -0.5, 0.5, 3).unwrap();
        let u = Propagator::build(&h, 10.0).unwrap();
        assert!(u.unitarity_error() <= 1e-10);
    }

    #[test]
    fn multiplexed_snapshots_walk_the_unitary_orbit() {
        let h = SpinHamiltonian::random(2, 2.0, -0.5, 0.5, 9).unwrap();
        let u = Propagator::build(&h, 0.7).unwrap();
        let rho = DensityMatrix::basis_state(2, 1);
        let snaps = evolve_multiplexed(&rho, &u, 3);
        assert_eq!(snaps.len(), 3);
        for (j, s) in snaps.iter().enumerate() {
            assert!((s.trace() - 1.0).abs() < 1e-12, "snapshot {j} trace");
        }
        // snapshot 1 must equal U rho U^dagger
        let direct = u.conjugate(&rho);
        for (a, b) in snaps[0].matrix().iter().zip(direct.matrix().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // generic H separates consecutive snapshots
        let d01 = snaps[0].trace_distance(&snaps[1]);
        let d12 = snaps[1].trace_distance(&snaps[2]);
        assert!(d01 > 1e-6 && d12 > 1e-6);
    }

    #[test]
    fn identity_propagator_freezes_the_state() {
        let u = Propagator::identity(2);
        let rho = DensityMatrix::maximally_mixed(2);
        let snaps = evolve_multiplexed(&rho, &u, 4);
        for s in snaps {
            for (a, b) in s.matrix().iter().zip(rho.matrix().iter()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }
}
