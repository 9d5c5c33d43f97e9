use thiserror::Error;

use crate::wavelet::Normalization;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} lies outside [0, 1)")]
    Domain(f64),
    #[error("signal length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("signal of {len} samples is too short, at least {min} are required")]
    TooShort { len: usize, min: usize },
    #[error("expected {expected:?} normalisation, found {found:?}")]
    Normalization {
        expected: Normalization,
        found: Normalization,
    },
    #[error("unsupported wavelet: {0}")]
    Wavelet(String),
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("scale window [{start}, {end}] is empty or too short")]
    EmptyRange { start: usize, end: usize },
    #[error("level {level} has no nonzero entries")]
    DegenerateLevel { level: usize },
    #[error("scale {level} is contaminated by the periodic seam")]
    Contaminated { level: usize },
    #[error("grid step {step} is too coarse for radius {radius}")]
    Resolution { step: f64, radius: f64 },
    #[error("argument {value} lies outside the tabulated range [{lo}, {hi}]")]
    Extrapolation { value: f64, lo: f64, hi: f64 },
    #[error("measure has no cell of positive mass at depth {0}")]
    EmptySupport(usize),
    #[error("requested depth {requested} exceeds the materialised depth {available}")]
    Depth { requested: usize, available: usize },
    #[error("profile values must lie in (0, 1), found {0}")]
    Profile(f64),
    #[error("lower profile exceeds upper profile at t = {0}")]
    Ordering(f64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
