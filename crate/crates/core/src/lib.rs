//! Compressed phase-estimation signal processing.
//!
//! A sparse spectrum `z(t) = Σ c_k e^{-i2πω_k t}` is sampled at a few random
//! times, the full signal is reconstructed by an accelerated proximal
//! iteration over a lifted Toeplitz matrix, and the dominant frequencies are
//! read off with MUSIC.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix `f64`.

pub mod error;
pub mod harness;
pub mod lifted;
pub mod music;
pub mod scalar;
pub mod solver;
pub mod spectrum;

pub use error::{Error, Result};

pub type Spectrum = spectrum::SparseSpectrum<f64>;
pub type Grid = spectrum::TimeGrid<f64>;
pub type Samples = spectrum::SampledSignal<f64>;
pub type Complex = scalar::C<f64>;
pub type State = solver::LiftedState<f64>;
pub type Recovery = solver::RecoveryResult<f64>;
pub type Split = music::SubspaceSplit<f64>;
pub type Imaging = music::ImagingResult<f64>;
pub type Trial = harness::TrialSpec<f64>;
pub type TrialOutcome = harness::TrialResult<f64>;
