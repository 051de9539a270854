//! Dense density matrices for small qubit registers.
//!
//! Basis convention: qubit 0 is the most significant bit of the
//! computational-basis index, so `|q0 q1 ... q{N-1}>` maps to the integer
//! `q0*2^{N-1} + ... + q{N-1}`. Kronecker products therefore place qubit 0
//! leftmost.

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{QrError, Result};

/// Complex Hermitian unit-trace matrix on `2^n_qubits` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: Array2<C64>,
    n_qubits: usize,
}

/// Bit mask selecting qubit `j` in an `n`-qubit basis index.
#[inline]
pub(crate) fn qubit_mask(n: usize, j: usize) -> usize {
    1 << (n - 1 - j)
}

/// Insert bit `b` for qubit `j` into a reduced index `r` over the remaining
/// `n - 1` qubits, producing a full `n`-qubit basis index.
#[inline]
pub(crate) fn insert_bit(n: usize, j: usize, r: usize, b: usize) -> usize {
    let pos = n - 1 - j; // position counted from the least significant bit
    let low = r & ((1 << pos) - 1);
    let high = r >> pos;
    (high << (pos + 1)) | (b << pos) | low
}

impl DensityMatrix {
    /// `|index><index|` on `n` qubits.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim, "basis index out of range");
        let mut mat = Array2::zeros((dim, dim));
        mat[[index, index]] = C64::new(1.0, 0.0);
        DensityMatrix { mat, n_qubits }
    }

    /// All qubits in `|0>`.
    pub fn all_zeros(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0)
    }

    /// Rank-1 projector onto the (normalized) amplitude vector `psi`.
    pub fn pure(n_qubits: usize, psi: &Array1<C64>) -> Result<Self> {
        let dim = 1 << n_qubits;
        if psi.len() != dim {
            return Err(QrError::Dimension(format!(
                "state vector length {} for {n_qubits} qubits (expected {dim})",
                psi.len()
            )));
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QrError::Domain(format!("state vector norm {norm} is not 1")));
        }
        let mut mat = Array2::zeros((dim, dim));
        for (i, a) in psi.iter().enumerate() {
            for (j, b) in psi.iter().enumerate() {
                mat[[i, j]] = a * b.conj();
            }
        }
        Ok(DensityMatrix { mat, n_qubits })
    }

    /// Identity / 2^n.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mat = Array2::eye(dim).mapv(|z: C64| z / dim as f64);
        DensityMatrix { mat, n_qubits }
    }

    /// Wrap a raw matrix, checking Hermiticity and unit trace.
    pub fn from_matrix(mat: Array2<C64>) -> Result<Self> {
        let dim = mat.nrows();
        if dim != mat.ncols() || !dim.is_power_of_two() {
            return Err(QrError::Dimension(format!("{dim}x{} is not a square qubit register", mat.ncols())));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        let rho = DensityMatrix { mat, n_qubits };
        if rho.hermiticity_error() > 1e-10 {
            return Err(QrError::Domain("matrix is not Hermitian to 1e-10".into()));
        }
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return Err(QrError::Domain("matrix trace is not 1 to 1e-10".into()));
        }
        Ok(rho)
    }

    /// Raw matrix access for evolution and measurement.
    pub(crate) fn from_parts(mat: Array2<C64>, n_qubits: usize) -> Self {
        DensityMatrix { mat, n_qubits }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn trace(&self) -> f64 {
        self.mat.diag().iter().map(|z| z.re).sum()
    }

    /// Max entrywise deviation from `rho = rho^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                worst = worst.max((self.mat[[i, j]] - self.mat[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self.mat.eigvalsh(UPLO::Lower)?;
        Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// Reduced state over the remaining qubits after tracing out qubit `j`.
    pub fn partial_trace_qubit(&self, j: usize) -> Array2<C64> {
        assert!(j < self.n_qubits, "qubit index out of range");
        let half = self.dim() / 2;
        let mut rest = Array2::zeros((half, half));
        for r in 0..half {
            for c in 0..half {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..2 {
                    acc += self.mat[[insert_bit(self.n_qubits, j, r, b), insert_bit(self.n_qubits, j, c, b)]];
                }
                rest[[r, c]] = acc;
            }
        }
        rest
    }

    /// Replace qubit `j` with the single-qubit state `qubit`, keeping the
    /// reduced state of the remaining qubits: `rho -> qubit (x) Tr_j(rho)`.
    pub fn inject(&self, qubit: &DensityMatrix, j: usize) -> Result<DensityMatrix> {
        if qubit.n_qubits != 1 {
            return Err(QrError::Dimension("injected state must be a single qubit".into()));
        }
        if j >= self.n_qubits {
            return Err(QrError::Dimension(format!(
                "qubit index {j} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let rest = self.partial_trace_qubit(j);
        let half = self.dim() / 2;
        let mut mat = Array2::zeros((self.dim(), self.dim()));
        for a in 0..2 {
            for b in 0..2 {
                let q = qubit.mat[[a, b]];
                if q == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..half {
                    for c in 0..half {
                        mat[[insert_bit(self.n_qubits, j, r, a), insert_bit(self.n_qubits, j, c, b)]] =
                            q * rest[[r, c]];
                    }
                }
            }
        }
        Ok(DensityMatrix { mat, n_qubits: self.n_qubits })
    }

    /// Trace distance `0.5 * sum |eig(rho - sigma)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit counts differ");
        let diff = &self.mat - &other.mat;
        let vals = diff.eigvalsh(UPLO::Lower).expect("Hermitian difference must diagonalize");
        0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Full-rank random density matrix `G G^dagger / Tr(G G^dagger)` with
/// uniform complex entries in `G`; deterministic per seed.
pub fn random_density_matrix(n_qubits: usize, seed: u64) -> DensityMatrix {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let dim = 1 << n_qubits;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = Array2::from_shape_fn((dim, dim), |_| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let gram = g.dot(&g.t().mapv(|z| z.conj()));
    let trace: f64 = gram.diag().iter().map(|z| z.re).sum();
    DensityMatrix { mat: gram.mapv(|z| z / trace), n_qubits }
}

/// Single-qubit input encoding of a scalar `s` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    /// `|psi> = sqrt(1-s)|0> + sqrt(s)|1>`, injected as a rank-1 projector.
    Pure,
    /// `rho = (1-s)|0><0| + s|1><1|`.
    Mixed,
}

/// Encode `s` into a single-qubit density matrix under the chosen scheme.
pub fn encode_input(s: f64, scheme: Encoding) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&s) || !s.is_finite() {
        return Err(QrError::Domain(format!("input {s} outside [0, 1]")));
    }
    let mat = match scheme {
        Encoding::Pure => {
            let a = (1.0 - s).sqrt();
            let b = s.sqrt();
            ndarray::array![
                [C64::new(a * a, 0.0), C64::new(a * b, 0.0)],
                [C64::new(a * b, 0.0), C64::new(b * b, 0.0)]
            ]
        }
        Encoding::Mixed => ndarray::array![
            [C64::new(1.0 - s, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(s, 0.0)]
        ],
    };
    Ok(DensityMatrix { mat, n_qubits: 1 })
}

/// Spectral decomposition of a single-qubit state into at most two pure
/// terms `(weight, amplitudes)`; weights below 1e-15 are dropped.
pub(crate) fn qubit_spectral(q: &DensityMatrix) -> Vec<(f64, [C64; 2])> {
    debug_assert_eq!(q.n_qubits, 1);
    let a = q.mat[[0, 0]].re;
    let d = q.mat[[1, 1]].re;
    let b = q.mat[[0, 1]];
    let mut out = Vec::with_capacity(2);
    if b.norm() < 1e-15 {
        if a > 1e-15 {
            out.push((a, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
        }
        if d > 1e-15 {
            out.push((d, [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]));
        }
        return out;
    }
    // eigenvalues of [[a, b], [b*, d]]
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
    for lambda in [mean + rad, mean - rad] {
        if lambda < 1e-15 {
            continue;
        }
        // eigenvector (b, lambda - a), normalized
        let v0 = b;
        let v1 = C64::new(lambda - a, 0.0);
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        out.push((lambda, [v0 / norm, v1 / norm]));
    }
    out
}
