//! Composite-pulse robust logic gates for NMR quantum computing.
//!
//! The crate builds the BB1, NB1, PB1, B4 and P4 composite rotations as
//! single-qubit gates and as tilted-axis coupling gates, propagates them under
//! systematic control errors, and runs them inside a two-qubit approximate
//! quantum-counting experiment and a five-spin multiplet experiment.
//!
//! ```
//! use robust_gates::pulses::{Family, ErrorModel, sequence_propagator, build_sequence};
//! use robust_gates::qcore::{propagator_fidelity, rotation_unitary};
//! use std::f64::consts::FRAC_PI_2;
//!
//! let seq = build_sequence(Family::Bb1, FRAC_PI_2, 0.0).unwrap();
//! let actual = sequence_propagator(&seq, &ErrorModel::pulse_length(0.1));
//! let fid = propagator_fidelity(&actual, &rotation_unitary(FRAC_PI_2, 0.0)).unwrap();
//! assert!(fid > 1.0 - 1e-5);
//! ```

pub mod counting;
pub mod coupling;
pub mod error;
pub mod harness;
pub mod pulses;
pub mod qcore;

pub use error::{Error, Result};
