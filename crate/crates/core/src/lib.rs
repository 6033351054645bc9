//! Fast inverse nonlinear Fourier transform for multi-soliton synthesis.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`synthesis::synthesize_ab`] builds the scattering pair `(a, b)` of a
//!    signal with prescribed eigenvalues and a band-limited radiation part.
//! 2. [`inverse::invert_fast`] recovers the samples by layer peeling,
//!    divide-and-conquer style, in `O(D log^2 D)` operations.
//! 3. [`forward`] computes the discrete spectrum of a signal, to check the
//!    result or to analyze arbitrary pulses.
//!
//! [`asymptotics`] holds closed-form predictions for the radiation and
//! norming constants.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fft;
pub mod forward;
pub mod inverse;
pub mod ode;
pub mod poly;
pub mod roots;
pub mod specfact;
pub mod synthesis;

pub use error::{NftError, Result};
pub use forward::{forward_fast, forward_sequential, NftSpectrum};
pub use inverse::{invert_fast, invert_sequential, Signal};
pub use ode::continuous_oracle;
pub use poly::{CausalPolynomial, LaurentPolynomial};
pub use synthesis::{synthesize_ab, ScatteringPair, SpectrumSpec};
