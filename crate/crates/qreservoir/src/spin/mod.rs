//! Transverse-field Ising spin network driven as a quantum reservoir.
//!
//! Each step replaces the input qubit with the encoded scalar, evolves the
//! register unitarily for `dt` (in `V` multiplexed substeps) and reads Pauli
//! expectation values as features.

mod density;
mod hamiltonian;
mod observables;

pub use density::{encode_input, random_density_matrix, DensityMatrix, Encoding};
pub use hamiltonian::{evolve_multiplexed, Propagator, SpinHamiltonian};
pub use observables::{measure_observables, ObservableSet};

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{QrError, Result};
use crate::reservoir::Reservoir;

use density::{insert_bit, qubit_spectral};

/// Largest register kept dense; 2^12 x 2^12 complex is the memory ceiling.
pub const MAX_SPINS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfig {
    pub n_spins: usize,
    pub field_h: f64,
    pub coupling_low: f64,
    pub coupling_high: f64,
    pub dt: f64,
    pub multiplex_v: usize,
    pub encoding: Encoding,
    pub observable_set: ObservableSet,
    /// 0-based index of the injected qubit.
    pub input_qubit: usize,
    pub seed: u64,
}

impl Default for SpinConfig {
    /// Timer-task parameters: N=10, h=10, J in [-1/2, 1/2], dt=10, V=1.
    fn default() -> Self {
        SpinConfig {
            n_spins: 10,
            field_h: 10.0,
            coupling_low: -0.5,
            coupling_high: 0.5,
            dt: 10.0,
            multiplex_v: 1,
            encoding: Encoding::Pure,
            observable_set: ObservableSet::XyzZz,
            input_qubit: 0,
            seed: 0,
        }
    }
}

impl SpinConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 {
            return Err(QrError::Domain("n_spins must be at least 2".into()));
        }
        if self.n_spins > MAX_SPINS {
            return Err(QrError::Domain(format!("n_spins {} exceeds hard cap {MAX_SPINS}", self.n_spins)));
        }
        if !(self.dt > 0.0) {
            return Err(QrError::Domain("dt must be positive".into()));
        }
        if self.multiplex_v < 1 {
            return Err(QrError::Domain("multiplex_v must be at least 1".into()));
        }
        if self.coupling_low > self.coupling_high {
            return Err(QrError::Domain("coupling_low must not exceed coupling_high".into()));
        }
        if self.input_qubit >= self.n_spins {
            return Err(QrError::Domain("input_qubit out of range".into()));
        }
        Ok(())
    }
}

/// Spin reservoir with a cached propagator for one realization of the
/// random couplings.
pub struct SpinReservoir {
    config: SpinConfig,
    hamiltonian: SpinHamiltonian,
    propagator: Propagator,
}

impl SpinReservoir {
    pub fn new(config: SpinConfig) -> Result<Self> {
        config.validate()?;
        let hamiltonian = SpinHamiltonian::random(
            config.n_spins,
            config.field_h,
            config.coupling_low,
            config.coupling_high,
            config.seed,
        )?;
        let dt_sub = config.dt / config.multiplex_v as f64;
        let propagator = Propagator::build(&hamiltonian, dt_sub)?;
        Ok(SpinReservoir { config, hamiltonian, propagator })
    }

    pub fn config(&self) -> &SpinConfig {
        &self.config
    }

    pub fn hamiltonian(&self) -> &SpinHamiltonian {
        &self.hamiltonian
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    /// Injection fused with the first evolution substep.
    ///
    /// After injection the state is `q (x) rest` with `rest` half-dimensional,
    /// so `U rho U^dagger` reduces to at most two conjugations by the
    /// `dim x dim/2` blocks `G_t = U (psi_t (x) I)`, one per spectral term of
    /// the injected qubit. This is the dominant cost of a step and is several
    /// times cheaper than a full-dimension double matmul.
    fn inject_and_evolve(&self, rho: &DensityMatrix, s: f64) -> Result<DensityMatrix> {
        let n = self.config.n_spins;
        let j = self.config.input_qubit;
        let dim = 1 << n;
        let half = dim / 2;
        let qubit = encode_input(s, self.config.encoding)?;
        let rest = rho.partial_trace_qubit(j);
        let u = self.propagator.matrix();

        let mut evolved = Array2::<C64>::zeros((dim, dim));
        for (weight, psi) in qubit_spectral(&qubit) {
            let mut g = Array2::<C64>::zeros((dim, half));
            for r in 0..half {
                let c0 = insert_bit(n, j, r, 0);
                let c1 = insert_bit(n, j, r, 1);
                for row in 0..dim {
                    g[[row, r]] = psi[0] * u[[row, c0]] + psi[1] * u[[row, c1]];
                }
            }
            let tmp = g.dot(&rest);
            let term = tmp.dot(&g.t().mapv(|z| z.conj()));
            evolved.scaled_add(C64::new(weight, 0.0), &term);
        }
        Ok(DensityMatrix::from_parts(evolved, n))
    }
}

impl Reservoir for SpinReservoir {
    type State = DensityMatrix;

    /// All qubits in `|0>`.
    fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::all_zeros(self.config.n_spins)
    }

    fn step(&self, state: &mut DensityMatrix, input: f64) -> Result<Vec<f64>> {
        let v = self.config.multiplex_v;
        let set = self.config.observable_set;
        let mut features = Vec::with_capacity(self.feature_dim());

        let mut current = self.inject_and_evolve(state, input)?;
        features.extend(measure_observables(&current, set));
        for _ in 1..v {
            current = self.propagator.conjugate(&current);
            features.extend(measure_observables(&current, set));
        }
        *state = current;
        Ok(features)
    }

    fn feature_dim(&self) -> usize {
        self.config.multiplex_v * self.config.observable_set.len(self.config.n_spins)
    }

    fn distance(&self, a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        a.trace_distance(b)
    }
}
