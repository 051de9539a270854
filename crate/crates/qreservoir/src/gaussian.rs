//! Harmonic-oscillator network in the covariance-matrix formalism.
//!
//! States are Gaussian: a mean quadrature vector plus a symmetric covariance
//! matrix in the ordering `(x_1..x_N, p_1..p_N)`, with vacuum normalization
//! `V_vac = I/2` (hbar = 1, `[x, p] = i`). Quadratic dynamics act as
//! symplectic matrices on both moments. The network Hamiltonian is
//! `H = sum_i (p_i^2 + w0^2 x_i^2)/2 + sum_{i<j} (g_ij/2)(x_i - x_j)^2`,
//! whose spring form keeps the potential positive definite for any coupling
//! draw, so the flow always decomposes into stable normal modes.

use ndarray::{Array1, Array2, s};
use ndarray_linalg::{Determinant, Eigh, EigValsh, UPLO};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{QrError, Result};
use crate::readout::{classify, train_classifier};
use crate::reservoir::Reservoir;
use crate::tasks::{squeeze_dataset, SqueezeClassifySpec};

/// Squeezing magnitude used when a unit-interval scalar drives the network
/// in reservoir mode: `r = 2 s` covers the full `r <= 2` input range.
const RC_SQUEEZING_SCALE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianConfig {
    pub n_osc: usize,
    pub omega0: f64,
    pub coupling_low: f64,
    pub coupling_high: f64,
    /// Evolution time between injection and readout; 0 freezes the network.
    pub dt: f64,
    /// 0-based index of the input oscillator.
    pub input_osc: usize,
    pub seed: u64,
}

impl Default for GaussianConfig {
    /// Squeezing-classifier parameters: N=4, w0=0.25, g in [0, 0.2].
    fn default() -> Self {
        GaussianConfig {
            n_osc: 4,
            omega0: 0.25,
            coupling_low: 0.0,
            coupling_high: 0.2,
            dt: 10.0,
            input_osc: 0,
            seed: 0,
        }
    }
}

impl GaussianConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_osc < 2 {
            return Err(QrError::Domain("n_osc must be at least 2".into()));
        }
        if !(self.omega0 > 0.0) {
            return Err(QrError::Domain("omega0 must be positive".into()));
        }
        if self.coupling_low < 0.0 || self.coupling_low > self.coupling_high {
            return Err(QrError::Domain("coupling range must satisfy 0 <= low <= high".into()));
        }
        if self.dt < 0.0 || !self.dt.is_finite() {
            return Err(QrError::Domain("dt must be finite and non-negative".into()));
        }
        if self.input_osc >= self.n_osc {
            return Err(QrError::Domain("input_osc out of range".into()));
        }
        Ok(())
    }
}

/// Mean vector and covariance matrix of a Gaussian state on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub mean: Array1<f64>,
    pub cov: Array2<f64>,
}

impl CovarianceState {
    /// Global ground state: zero mean, `V = I/2`.
    pub fn ground(n_modes: usize) -> Self {
        CovarianceState {
            mean: Array1::zeros(2 * n_modes),
            cov: Array2::eye(2 * n_modes).mapv(|v: f64| v * 0.5),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn symmetry_error(&self) -> f64 {
        let n = self.cov.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.cov[[i, j]] - self.cov[[j, i]]).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue of `V + (i/2) Omega`; physical states keep it
    /// above `-1e-9`.
    pub fn uncertainty_margin(&self) -> Result<f64> {
        let n = self.n_modes();
        let omega = symplectic_form(n);
        let dim = 2 * n;
        let mut c = Array2::<C64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                c[[i, j]] = C64::new(self.cov[[i, j]], 0.5 * omega[[i, j]]);
            }
        }
        let vals = c.eigvalsh(UPLO::Lower)?;
        Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    pub fn cov_determinant(&self) -> Result<f64> {
        Ok(self.cov.det()?)
    }

    /// Frobenius distance between covariance matrices.
    pub fn frobenius_distance(&self, other: &CovarianceState) -> f64 {
        (&self.cov - &other.cov).iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    /// Replace the marginal of `mode` with a single-mode state, severing its
    /// correlations with the rest (exact when the rest is uncorrelated with
    /// the replaced mode, as after a reset).
    pub fn inject_mode(&mut self, mode: usize, input: &CovarianceState) -> Result<()> {
        let n = self.n_modes();
        if input.n_modes() != 1 {
            return Err(QrError::Dimension("injected state must be single-mode".into()));
        }
        if mode >= n {
            return Err(QrError::Dimension(format!("mode {mode} out of range for {n} modes")));
        }
        let (xi, pi) = (mode, n + mode);
        for k in 0..2 * n {
            self.cov[[xi, k]] = 0.0;
            self.cov[[k, xi]] = 0.0;
            self.cov[[pi, k]] = 0.0;
            self.cov[[k, pi]] = 0.0;
        }
        self.cov[[xi, xi]] = input.cov[[0, 0]];
        self.cov[[xi, pi]] = input.cov[[0, 1]];
        self.cov[[pi, xi]] = input.cov[[1, 0]];
        self.cov[[pi, pi]] = input.cov[[1, 1]];
        self.mean[xi] = input.mean[0];
        self.mean[pi] = input.mean[1];
        Ok(())
    }
}

/// Standard symplectic form `Omega = [[0, I], [-I, 0]]` on `(x, p)` ordering.
pub fn symplectic_form(n_modes: usize) -> Array2<f64> {
    let mut omega = Array2::zeros((2 * n_modes, 2 * n_modes));
    for i in 0..n_modes {
        omega[[i, n_modes + i]] = 1.0;
        omega[[n_modes + i, i]] = -1.0;
    }
    omega
}

/// Single-mode squeezed vacuum: zero mean and
/// `V = (1/2) R(phi) diag(e^{-2r}, e^{+2r}) R(phi)^T`.
///
/// The rotation convention is `R(phi)` (not `phi/2`); training and inference
/// share it, so classifier results do not depend on the choice.
pub fn squeezed_vacuum(r: f64, phi: f64) -> Result<CovarianceState> {
    if r < 0.0 || !r.is_finite() {
        return Err(QrError::Domain(format!("squeezing magnitude {r} must be non-negative")));
    }
    let (sin, cos) = phi.sin_cos();
    let minus = 0.5 * (-2.0 * r).exp();
    let plus = 0.5 * (2.0 * r).exp();
    let cov = ndarray::array![
        [cos * cos * minus + sin * sin * plus, cos * sin * (minus - plus)],
        [cos * sin * (minus - plus), sin * sin * minus + cos * cos * plus]
    ];
    Ok(CovarianceState { mean: Array1::zeros(2), cov })
}

/// Symplectic flow `S` of the network Hamiltonian for a fixed time.
#[derive(Debug, Clone)]
pub struct SymplecticPropagator {
    s_matrix: Array2<f64>,
    n_osc: usize,
    couplings: Array2<f64>,
}

impl SymplecticPropagator {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.s_matrix
    }

    pub fn n_osc(&self) -> usize {
        self.n_osc
    }

    pub fn couplings(&self) -> &Array2<f64> {
        &self.couplings
    }

    /// `max |(S Omega S^T - Omega)_ij|`.
    pub fn symplecticity_error(&self) -> f64 {
        let omega = symplectic_form(self.n_osc);
        let lhs = self.s_matrix.dot(&omega).dot(&self.s_matrix.t());
        let mut worst: f64 = 0.0;
        for (a, b) in lhs.iter().zip(omega.iter()) {
            worst = worst.max((a - b).abs());
        }
        worst
    }

    pub fn determinant(&self) -> Result<f64> {
        Ok(self.s_matrix.det()?)
    }

    /// `mean -> S mean`, `V -> S V S^T`.
    pub fn apply(&self, state: &CovarianceState) -> Result<CovarianceState> {
        if state.n_modes() != self.n_osc {
            return Err(QrError::Dimension("state and propagator mode counts differ".into()));
        }
        Ok(CovarianceState {
            mean: self.s_matrix.dot(&state.mean),
            cov: self.s_matrix.dot(&state.cov).dot(&self.s_matrix.t()),
        })
    }
}

/// Draw couplings `g_ij ~ U[low, high]` (row-major over `i < j`, ChaCha8
/// stream per seed), assemble the normal modes of the spring network and
/// exponentiate the flow for `config.dt`.
pub fn build_oscillator_network(config: &GaussianConfig) -> Result<SymplecticPropagator> {
    config.validate()?;
    let n = config.n_osc;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut couplings = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let g = if config.coupling_low == config.coupling_high {
                config.coupling_low
            } else {
                rng.gen_range(config.coupling_low..config.coupling_high)
            };
            couplings[[i, j]] = g;
            couplings[[j, i]] = g;
        }
    }
    build_network_from_couplings(&couplings, config.omega0, config.dt)
}

/// Network flow from an explicit coupling matrix; exposed for oracle tests.
pub fn build_network_from_couplings(
    couplings: &Array2<f64>,
    omega0: f64,
    dt: f64,
) -> Result<SymplecticPropagator> {
    let n = couplings.nrows();
    if couplings.ncols() != n {
        return Err(QrError::Dimension("coupling matrix must be square".into()));
    }
    // potential matrix: V_ii = w0^2 + sum_j g_ij, V_ij = -g_ij
    let mut potential = Array2::zeros((n, n));
    for i in 0..n {
        let mut diag = omega0 * omega0;
        for j in 0..n {
            if i != j {
                diag += couplings[[i, j]];
                potential[[i, j]] = -couplings[[i, j]];
            }
        }
        potential[[i, i]] = diag;
    }
    let (freq_sq, modes) = potential.eigh(UPLO::Lower)?;
    if freq_sq.iter().any(|&w2| w2 <= 0.0) {
        return Err(QrError::Domain("network potential is not positive definite".into()));
    }
    // normal-mode rotation: x~ = cos(wt) x~ + sin(wt)/w p~, p~ = -w sin(wt) x~ + cos(wt) p~
    let omegas = freq_sq.mapv(f64::sqrt);
    let cos = Array2::from_diag(&omegas.mapv(|w| (w * dt).cos()));
    let sin_over = Array2::from_diag(&omegas.mapv(|w| (w * dt).sin() / w));
    let omega_sin = Array2::from_diag(&omegas.mapv(|w| w * (w * dt).sin()));
    let q = &modes;
    let qt = modes.t();
    let mut s_matrix = Array2::zeros((2 * n, 2 * n));
    s_matrix.slice_mut(s![0..n, 0..n]).assign(&q.dot(&cos).dot(&qt));
    s_matrix.slice_mut(s![0..n, n..2 * n]).assign(&q.dot(&sin_over).dot(&qt));
    s_matrix.slice_mut(s![n..2 * n, 0..n]).assign(&q.dot(&omega_sin).dot(&qt).mapv(|v| -v));
    s_matrix.slice_mut(s![n..2 * n, n..2 * n]).assign(&q.dot(&cos).dot(&qt));
    // rescale to dimensionless quadratures of the bare w0 oscillator
    // (x -> x sqrt(w0), p -> p / sqrt(w0)): the vacuum V = I/2 is then the
    // local ground state, and the uncoupled flow is a pure phase rotation
    scale_to_dimensionless(&mut s_matrix, omega0, n);
    Ok(SymplecticPropagator { s_matrix, n_osc: n, couplings: couplings.clone() })
}

/// Conjugate a mechanical-quadrature flow by `D = diag(sqrt(w0) I, I/sqrt(w0))`.
fn scale_to_dimensionless(flow: &mut Array2<f64>, omega0: f64, n: usize) {
    for i in 0..n {
        for j in 0..n {
            flow[[i, n + j]] *= omega0;
            flow[[n + i, j]] /= omega0;
        }
    }
}

/// One extreme-learning-machine pass: reset to the global ground state,
/// inject `input_state` into the input oscillator, evolve once, and read the
/// `2(N-1)` diagonal covariance entries of the other oscillators
/// (all x variances in mode order, then all p variances).
pub fn run_qelm_instance(
    network: &SymplecticPropagator,
    input_state: &CovarianceState,
    input_osc: usize,
) -> Result<Vec<f64>> {
    if input_state.n_modes() != 1 {
        return Err(QrError::Dimension("input state must be single-mode".into()));
    }
    let n = network.n_osc();
    let mut state = CovarianceState::ground(n);
    state.inject_mode(input_osc, input_state)?;
    let evolved = network.apply(&state)?;
    Ok(readout_features(&evolved, input_osc))
}

/// Diagonal covariance entries of the non-input oscillators.
pub fn readout_features(state: &CovarianceState, input_osc: usize) -> Vec<f64> {
    let n = state.n_modes();
    let mut feats = Vec::with_capacity(2 * (n - 1));
    for i in (0..n).filter(|&i| i != input_osc) {
        feats.push(state.cov[[i, i]]);
    }
    for i in (0..n).filter(|&i| i != input_osc) {
        feats.push(state.cov[[n + i, n + i]]);
    }
    feats
}

/// Pick the evolution time from `candidates` that maximizes validation
/// accuracy of a small seeded 3-class squeezing classification (ties broken
/// toward the earlier candidate). Deterministic per `config.seed`.
pub fn select_dt(config: &GaussianConfig, candidates: &[f64]) -> Result<f64> {
    if candidates.is_empty() {
        return Err(QrError::Domain("candidate list for dt selection is empty".into()));
    }
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    let spec = SqueezeClassifySpec {
        n_classes: 3,
        random_phase: true,
        n_train: 120,
        n_test: 60,
        ..SqueezeClassifySpec::default()
    };
    let dataset = squeeze_dataset(&spec, config.seed ^ 0x5e1ec7)?;
    let mut best = (candidates[0], -1.0);
    for &dt in candidates {
        let trial = GaussianConfig { dt, ..config.clone() };
        let network = build_oscillator_network(&trial)?;
        let featurize = |samples: &[(f64, f64, f64)]| -> Result<Array2<f64>> {
            let mut rows = Vec::new();
            for &(r, phi, _) in samples {
                rows.extend(run_qelm_instance(&network, &squeezed_vacuum(r, phi)?, trial.input_osc)?);
            }
            Ok(Array2::from_shape_vec((samples.len(), 2 * (trial.n_osc - 1)), rows)
                .expect("feature rows match shape"))
        };
        let x_train = featurize(&dataset.train)?;
        let y_train: Vec<f64> = dataset.train.iter().map(|&(_, _, c)| c).collect();
        let x_val = featurize(&dataset.test)?;
        let y_val: Vec<f64> = dataset.test.iter().map(|&(_, _, c)| c).collect();
        let model = train_classifier(&x_train, &y_train, &dataset.class_values, 0.0)?;
        let predicted = classify(&model, &x_val)?;
        let hits = predicted.iter().zip(&y_val).filter(|(a, b)| a == b).count();
        let accuracy = hits as f64 / y_val.len() as f64;
        if accuracy > best.1 {
            best = (dt, accuracy);
        }
    }
    Ok(best.0)
}

/// The oscillator network as a stateful reservoir: a unit-interval scalar is
/// encoded as squeezing magnitude `r = 2s` at phase 0 and injected every
/// step without resetting the rest of the network.
pub struct GaussianReservoir {
    config: GaussianConfig,
    network: SymplecticPropagator,
}

impl GaussianReservoir {
    pub fn new(config: GaussianConfig) -> Result<Self> {
        let network = build_oscillator_network(&config)?;
        Ok(GaussianReservoir { config, network })
    }

    pub fn network(&self) -> &SymplecticPropagator {
        &self.network
    }

    pub fn config(&self) -> &GaussianConfig {
        &self.config
    }
}

impl Reservoir for GaussianReservoir {
    type State = CovarianceState;

    fn initial_state(&self) -> CovarianceState {
        CovarianceState::ground(self.config.n_osc)
    }

    fn step(&self, state: &mut CovarianceState, input: f64) -> Result<Vec<f64>> {
        let squeezed = squeezed_vacuum(RC_SQUEEZING_SCALE * input, 0.0)?;
        state.inject_mode(self.config.input_osc, &squeezed)?;
        *state = self.network.apply(state)?;
        Ok(readout_features(state, self.config.input_osc))
    }

    fn feature_dim(&self) -> usize {
        2 * (self.config.n_osc - 1)
    }

    fn distance(&self, a: &CovarianceState, b: &CovarianceState) -> f64 {
        a.frobenius_distance(b)
    }
}
