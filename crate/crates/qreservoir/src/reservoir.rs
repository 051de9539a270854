//! The abstract reservoir contract and sequence drivers.
//!
//! A reservoir is a fixed input-driven dynamical system `x_k = f(s_k, x_{k-1})`
//! from whose state a vector of real observables is read at every step. Only
//! the linear map on top of those observables is ever trained. Extreme
//! learning machines reuse the same contract with a state reset between
//! input instances.

use ndarray::Array2;

use crate::error::{QrError, Result};

/// Ordered sequence of real scalar inputs.
///
/// Values destined for substrate injection must lie in `[0, 1]`; the raw
/// `[-1, 1]` range is permitted only for capacity targets before the affine
/// rescale `(s + 1) / 2` at the substrate boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSequence {
    values: Vec<f64>,
}

impl InputSequence {
    /// Inputs for substrate injection; every element must be in `[0, 1]`.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v) || !v.is_finite()) {
            return Err(QrError::Domain(format!("input {v} outside [0, 1]")));
        }
        Ok(InputSequence { values })
    }

    /// Raw inputs in `[-1, 1]`, rescaled to `[0, 1]` for injection.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        if let Some(v) = raw.iter().find(|v| !(-1.0..=1.0).contains(*v) || !v.is_finite()) {
            return Err(QrError::Domain(format!("raw input {v} outside [-1, 1]")));
        }
        Ok(InputSequence { values: raw.iter().map(|s| (s + 1.0) / 2.0).collect() })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Concatenation, for state-threading checks.
    pub fn concat(&self, other: &InputSequence) -> InputSequence {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        InputSequence { values }
    }
}

/// One row of observable values per retained timestep or instance.
pub type FeatureMatrix = Array2<f64>;

/// The substrate contract: a deterministic step map plus a fixed-dimension
/// observable readout. `step` advances the state under one input injection
/// and returns the feature vector read during that step (time-multiplexed
/// substrates return all snapshot readings concatenated).
pub trait Reservoir {
    type State: Clone;

    /// Declared initial state; also the reset target in ELM mode.
    fn initial_state(&self) -> Self::State;

    /// Advance `state` under one input `s` in `[0, 1]` and return the
    /// observables read during the step.
    fn step(&self, state: &mut Self::State, input: f64) -> Result<Vec<f64>>;

    /// Length of the vector returned by `step`.
    fn feature_dim(&self) -> usize;

    /// Substrate-specific distance between two states: trace distance for
    /// density matrices, Frobenius distance of covariance matrices for
    /// Gaussian states.
    fn distance(&self, a: &Self::State, b: &Self::State) -> f64;
}

/// Drive `reservoir` over `inputs`, dropping the first `washout` feature rows.
///
/// `state` is threaded through, so running over `A ++ B` equals running over
/// `A` and continuing over `B`. Returns one feature row per post-washout step.
pub fn run_sequence<R: Reservoir>(
    reservoir: &R,
    state: &mut R::State,
    inputs: &InputSequence,
    washout: usize,
) -> Result<FeatureMatrix> {
    if washout >= inputs.len() && !inputs.is_empty() {
        return Err(QrError::Domain(format!(
            "washout {washout} must be smaller than input length {}",
            inputs.len()
        )));
    }
    if inputs.is_empty() && washout > 0 {
        return Err(QrError::Domain("washout exceeds empty input".into()));
    }
    let dim = reservoir.feature_dim();
    let kept = inputs.len() - washout;
    let mut rows = Vec::with_capacity(kept * dim);
    for (k, &s) in inputs.values().iter().enumerate() {
        let feats = reservoir.step(state, s)?;
        debug_assert_eq!(feats.len(), dim);
        if k >= washout {
            if let Some(bad) = feats.iter().position(|v| !v.is_finite()) {
                return Err(QrError::numerical_at(
                    k,
                    format!("non-finite feature value in column {bad}"),
                ));
            }
            rows.extend_from_slice(&feats);
        }
    }
    Ok(Array2::from_shape_vec((kept, dim), rows).expect("row collection matches shape"))
}

/// Run each input instance from the reset (initial) state: ELM mode.
/// Row `l` of the result depends only on `instances[l]`.
pub fn run_instances<R: Reservoir>(reservoir: &R, instances: &InputSequence) -> Result<FeatureMatrix> {
    let dim = reservoir.feature_dim();
    let mut rows = Vec::with_capacity(instances.len() * dim);
    for (l, &s) in instances.values().iter().enumerate() {
        let mut state = reservoir.initial_state();
        let feats = reservoir.step(&mut state, s)?;
        if let Some(bad) = feats.iter().position(|v| !v.is_finite()) {
            return Err(QrError::numerical_at(l, format!("non-finite feature value in column {bad}")));
        }
        rows.extend_from_slice(&feats);
    }
    Ok(Array2::from_shape_vec((instances.len(), dim), rows).expect("row collection matches shape"))
}

/// Echo-state check: drive two states with the same inputs and record their
/// distance before any injection and after each one. Fading memory shows as
/// decay of the returned sequence.
pub fn convergence_test<R: Reservoir>(
    reservoir: &R,
    inputs: &InputSequence,
    mut state_a: R::State,
    mut state_b: R::State,
) -> Result<Vec<f64>> {
    let mut distances = Vec::with_capacity(inputs.len() + 1);
    distances.push(reservoir.distance(&state_a, &state_b));
    for &s in inputs.values() {
        reservoir.step(&mut state_a, s)?;
        reservoir.step(&mut state_b, s)?;
        distances.push(reservoir.distance(&state_a, &state_b));
    }
    Ok(distances)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Leaky shift line: x_k = (s_k, a*x_prev) truncated; enough structure to
    /// exercise the drivers without any quantum machinery.
    pub(crate) struct ShiftLine {
        pub taps: usize,
        pub leak: f64,
    }

    impl Reservoir for ShiftLine {
        type State = Vec<f64>;

        fn initial_state(&self) -> Vec<f64> {
            vec![0.0; self.taps]
        }

        fn step(&self, state: &mut Vec<f64>, input: f64) -> Result<Vec<f64>> {
            state.rotate_right(1);
            state[0] = input + self.leak * state[1 % self.taps];
            Ok(state.clone())
        }

        fn feature_dim(&self) -> usize {
            self.taps
        }

        fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
            a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
        }
    }

    #[test]
    fn empty_inputs_yield_empty_matrix_with_feature_columns() {
        let r = ShiftLine { taps: 3, leak: 0.0 };
        let x = run_sequence(&r, &mut r.initial_state(), &InputSequence::unit(vec![]).unwrap(), 0)
            .unwrap();
        assert_eq!(x.dim(), (0, 3));
    }

    #[test]
    fn washout_must_leave_at_least_zero_rows() {
        let r = ShiftLine { taps: 2, leak: 0.0 };
        let inputs = InputSequence::unit(vec![0.5, 0.5]).unwrap();
        assert!(run_sequence(&r, &mut r.initial_state(), &inputs, 2).is_err());
        let x = run_sequence(&r, &mut r.initial_state(), &inputs, 1).unwrap();
        assert_eq!(x.nrows(), 1);
    }

    #[test]
    fn composition_threads_state() {
        let r = ShiftLine { taps: 4, leak: 0.3 };
        let a = InputSequence::unit(vec![0.1, 0.9, 0.4]).unwrap();
        let b = InputSequence::unit(vec![0.7, 0.2]).unwrap();
        let whole = run_sequence(&r, &mut r.initial_state(), &a.concat(&b), 0).unwrap();

        let mut state = r.initial_state();
        let first = run_sequence(&r, &mut state, &a, 0).unwrap();
        let second = run_sequence(&r, &mut state, &b, 0).unwrap();
        for (i, row) in first.rows().into_iter().chain(second.rows()).enumerate() {
            for (x, y) in row.iter().zip(whole.row(i).iter()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn elm_mode_permutation_equivariance() {
        let r = ShiftLine { taps: 3, leak: 0.5 };
        let inst = InputSequence::unit(vec![0.2, 0.8, 0.5, 0.1]).unwrap();
        let x = run_instances(&r, &inst).unwrap();
        let perm = InputSequence::unit(vec![0.5, 0.1, 0.2, 0.8]).unwrap();
        let y = run_instances(&r, &perm).unwrap();
        // rows follow the instances: permuting inputs permutes rows identically
        assert_eq!(x.row(0), y.row(2));
        assert_eq!(x.row(2), y.row(0));
        assert_eq!(x.row(1), y.row(3));
    }

    #[test]
    fn identical_states_stay_at_zero_distance() {
        let r = ShiftLine { taps: 3, leak: 0.4 };
        let inputs = InputSequence::unit(vec![0.3; 10]).unwrap();
        let d = convergence_test(&r, &inputs, r.initial_state(), r.initial_state()).unwrap();
        assert_eq!(d.len(), 11);
        assert!(d.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn input_range_is_enforced() {
        assert!(InputSequence::unit(vec![1.2]).is_err());
        assert!(InputSequence::unit(vec![-0.1]).is_err());
        assert!(InputSequence::from_raw(&[-1.0, 1.0]).is_ok());
        assert!(InputSequence::from_raw(&[1.5]).is_err());
        let seq = InputSequence::from_raw(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(seq.values(), &[0.0, 0.5, 1.0]);
    }
}
