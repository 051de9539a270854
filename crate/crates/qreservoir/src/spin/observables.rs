//! Pauli observable readout from a density matrix.
//!
//! Feature ordering is fixed so trained weights are portable:
//! `Xyz` emits `<sx_1..sx_N>, <sy_1..sy_N>, <sz_1..sz_N>`; `Z` emits only the
//! trailing z block; `XyzZz` appends the two-spin correlators `<sz_i sz_j>`
//! for `i < j` in row-major order.

use super::density::{qubit_mask, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableSet {
    /// `<sz_i>`: N values.
    Z,
    /// `<sx_i>, <sy_i>, <sz_i>`: 3N values.
    Xyz,
    /// `Xyz` plus `<sz_i sz_j>` for `i < j`: 3N + N(N-1)/2 values.
    XyzZz,
}

impl ObservableSet {
    pub fn len(&self, n_qubits: usize) -> usize {
        match self {
            ObservableSet::Z => n_qubits,
            ObservableSet::Xyz => 3 * n_qubits,
            ObservableSet::XyzZz => 3 * n_qubits + n_qubits * (n_qubits - 1) / 2,
        }
    }

    /// Column range of this set inside an `XyzZz` feature row.
    pub fn columns_within_full(&self, n_qubits: usize) -> std::ops::Range<usize> {
        match self {
            ObservableSet::Z => 2 * n_qubits..3 * n_qubits,
            ObservableSet::Xyz => 0..3 * n_qubits,
            ObservableSet::XyzZz => 0..self.len(n_qubits),
        }
    }
}

/// Expectation values of the chosen observable set.
///
/// Uses the permutation structure of Pauli strings: each expectation is an
/// O(2^N) sweep over matrix entries, no operator matrices are built.
pub fn measure_observables(rho: &DensityMatrix, set: ObservableSet) -> Vec<f64> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let mat = rho.matrix();
    let mut out = Vec::with_capacity(set.len(n));

    if matches!(set, ObservableSet::Xyz | ObservableSet::XyzZz) {
        for i in 0..n {
            let mask = qubit_mask(n, i);
            let mut acc = 0.0;
            for k in 0..dim {
                if k & mask == 0 {
                    acc += 2.0 * mat[[k, k | mask]].re;
                }
            }
            out.push(acc);
        }
        for i in 0..n {
            let mask = qubit_mask(n, i);
            let mut acc = 0.0;
            for k in 0..dim {
                if k & mask == 0 {
                    acc += -2.0 * mat[[k, k | mask]].im;
                }
            }
            out.push(acc);
        }
    }
    for i in 0..n {
        let mask = qubit_mask(n, i);
        let mut acc = 0.0;
        for k in 0..dim {
            acc += if k & mask == 0 { mat[[k, k]].re } else { -mat[[k, k]].re };
        }
        out.push(acc);
    }
    if matches!(set, ObservableSet::XyzZz) {
        for i in 0..n {
            for j in (i + 1)..n {
                let mi = qubit_mask(n, i);
                let mj = qubit_mask(n, j);
                let mut acc = 0.0;
                for k in 0..dim {
                    let sign = if ((k & mi == 0) as i32 + (k & mj == 0) as i32) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    acc += sign * mat[[k, k]].re;
                }
                out.push(acc);
            }
        }
    }
    out
}
