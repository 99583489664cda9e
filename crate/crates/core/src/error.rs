//! Crate error type.

use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes: [`Error::Input`] is a caller mistake
/// (exit 2), [`Error::Unsupported`] means a budget or domain restriction was
/// hit and no answer is reported (also exit 2 for direct commands, a
/// per-record status in sweeps), and the remaining variants signal that an
/// internal exactness certificate failed (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: arity mismatches, malformed weight systems, bad flags.
    #[error("input error: {0}")]
    Input(String),

    /// The input is outside the configured budget or the supported domain.
    /// Distinct from a wrong answer: nothing is reported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A singular exponent matrix where an invertible one is required.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// A per-term rational function in the Hodge formula is not a polynomial.
    #[error("pole in Hodge term: {0}")]
    Pole(String),

    /// An internal consistency identity failed during a family construction.
    /// Names the identity that broke.
    #[error("construction check failed: {0}")]
    Construction(String),

    /// I/O failure while reading batch input.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
