//! Quantum reservoir computing on simulated spin and oscillator networks.
//!
//! A reservoir is a fixed dynamical system driven by an input sequence; a
//! trained linear map over its observables produces the output. This crate
//! provides two substrates behind a single [`Reservoir`] trait:
//!
//! - [`spin::SpinReservoir`] — a transverse-field Ising register evolved
//!   unitarily, with the input written into one qubit each step and Pauli
//!   expectation values read out as features.
//! - [`gaussian::GaussianReservoir`] — a network of coupled harmonic
//!   oscillators in the Gaussian (covariance-matrix) formalism, driven by
//!   injecting squeezed vacuum into one mode.
//!
//! On top of the substrates sit linear readout training ([`readout`]),
//! benchmark task generators and a capacity estimator ([`tasks`]), and a
//! config-file driven experiment runner ([`runner`]) used by the `qreservoir`
//! command-line tool.
//!
//! # Example: training a readout on a spin reservoir
//!
//! ```
//! use qreservoir::reservoir::{run_sequence, InputSequence, Reservoir};
//! use qreservoir::spin::{SpinConfig, SpinReservoir};
//! use qreservoir::readout::{predict, train_linear, nmse};
//!
//! let config = SpinConfig { n_spins: 3, ..SpinConfig::default() };
//! let reservoir = SpinReservoir::new(config)?;
//!
//! // drive with a short random sequence and train on a delayed copy
//! let values: Vec<f64> = (0..60).map(|k| ((k * 17) % 10) as f64 / 9.0).collect();
//! let inputs = InputSequence::unit(values.clone())?;
//! let features = run_sequence(&reservoir, &mut reservoir.initial_state(), &inputs, 10)?;
//! let target: Vec<f64> = (10..60).map(|k| values[k - 1]).collect();
//!
//! let weights = train_linear(&features, &target, 0.0)?;
//! let fit = predict(&features, &weights)?;
//! assert!(nmse(fit.as_slice().unwrap(), &target)? < 1.0);
//! # Ok::<(), qreservoir::error::QrError>(())
//! ```
//!
//! # Example: classifying squeezed vacuum with an oscillator network
//!
//! ```
//! use qreservoir::gaussian::{
//!     build_oscillator_network, run_qelm_instance, squeezed_vacuum, GaussianConfig,
//! };
//!
//! let config = GaussianConfig::default();
//! let network = build_oscillator_network(&config)?;
//! // features are the quadrature variances of the non-input modes
//! let vacuum = run_qelm_instance(&network, &squeezed_vacuum(0.0, 0.0)?, 0)?;
//! let squeezed = run_qelm_instance(&network, &squeezed_vacuum(2.0, 0.0)?, 0)?;
//! assert_eq!(vacuum.len(), 6);
//! assert!(squeezed.iter().zip(&vacuum).any(|(a, b)| (a - b).abs() > 1e-3));
//! # Ok::<(), qreservoir::error::QrError>(())
//! ```
//!
//! All randomness flows through explicitly seeded ChaCha8 streams, so every
//! run is bit-for-bit reproducible given the same configuration.

// link the BLAS/LAPACK backend used by ndarray-linalg
extern crate blas_src;

pub mod config;
pub mod error;
pub mod gaussian;
pub mod readout;
pub mod reservoir;
pub mod runner;
pub mod spin;
pub mod tasks;

pub use error::{QrError, Result};
pub use reservoir::{
    convergence_test, run_instances, run_sequence, FeatureMatrix, InputSequence, Reservoir,
};
