// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("entry {name}[{index}] = {value} is outside [0, 1]")]
    OutOfRange {
        name: &'static str,
        index: usize,
        value: f64,
    },

    #[error("chain is reducible: {name}[{index}] is zero")]
    Reducible { name: &'static str, index: usize },

    #[error("row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("stationary weights exceed the representable range (log-range {log_range:.3e})")]
    Overflow { log_range: f64 },

    #[error("eigenvalue bisection failed to converge for index {index}")]
    ConvergenceFailure { index: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("no closed-form spectrum for {0}")]
    NoClosedForm(String),

    #[error("time must be nonnegative and finite, got {0}")]
    NegativeTime(f64),

    #[error("{phases} phases exceeds the explicit spectral sum cap of {cap}")]
    TooManyPhases { phases: usize, cap: usize },

    #[error("explicit spectral sum lost precision (estimated error {estimate:.3e})")]
    PrecisionLoss { estimate: f64 },

    #[error("u = {u} is outside the MGF radius of convergence {radius}")]
    OutsideRadius { u: f64, radius: f64 },

    #[error("discrete phases do not form a probability law (value {value} at step {step})")]
    SignedHittingLaw { step: u64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("at least {needed} scan points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid family parameters: {0}")]
    InvalidParams(String),

    #[error("metropolis target must be positive and finite (index {index}, value {value})")]
    NonPositiveTarget { index: usize, value: f64 },

    #[error("malformed chain file: {0}")]
    Parse(String),
}
