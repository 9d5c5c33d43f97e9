//! Wavelet-leader multifractal analysis on the unit interval.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`]: b-adic cubes, digit expansions and the dyadic approximation rate.
//! * [`wavelet`]: periodic Daubechies filter banks and L∞-normalised coefficient pyramids.
//! * [`leaders`]: wavelet leaders, local leaders, pointwise exponent estimators and the
//!   finite-difference oscillation oracle.
//! * [`formalism`]: structure functions, scaling functions and Legendre spectra for
//!   functions (through leaders) and for measures (through τ(q)).
//! * [`measures`]: multinomial measures and random multiplicative cascades.
//! * [`generators`]: reference signals and pyramids with known exponents and spectra.
//! * [`verify`]: the end-to-end verification suites driven by the CLI and the acceptance tests.

pub mod dyadic;
pub mod error;
pub mod fit;
pub mod formalism;
pub mod generators;
pub mod leaders;
pub mod measures;
pub mod verify;
pub mod wavelet;

pub use error::{Error, Result};
