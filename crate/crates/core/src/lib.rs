//! Digit-run exponents of real numbers relative to a denominator sequence,
//! the Cantor schedules that realize prescribed exponent pairs, and exact
//! evaluation of the associated Hausdorff dimension formulas.

pub mod boxdim;
pub mod construct;
pub mod digits;
pub mod dimfx;
pub mod exponents;
pub mod rational;
pub mod sequences;

pub use boxdim::BoxDimError;
pub use construct::ConstructError;
pub use digits::DigitsError;
pub use dimfx::DomainError;
pub use exponents::ExponentError;
pub use rational::{ParseRationalError, Rational};
pub use sequences::SequenceError;

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Digits(#[from] DigitsError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    BoxDim(#[from] BoxDimError),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
}
