//! Exact invariants of Calabi-Yau hypersurfaces in weighted projective space.
//!
//! The crate computes, in exact arbitrary-precision arithmetic:
//!
//! - orbifold (Chen-Ruan) Hodge diamonds of quasi-smooth Calabi-Yau
//!   weighted hypersurfaces, with their Betti sums and Euler characteristics
//!   ([`hodge`]);
//! - symmetry data of invertible potentials: diagonal automorphism group
//!   orders, charges, transpose (mirror) degrees, and the purely
//!   non-symplectic faithfulness criterion `d * d^T == Gamma` ([`potential`]);
//! - the extremal families built on Sylvester's sequence: the three
//!   hypersurface families `X_1, X_2, X_3`, the klt Calabi-Yau pairs of
//!   large index and small mld, the terminal index values, and the
//!   large-index loop-potential family with its full consistency checks
//!   ([`families`]);
//! - batch verification suites used by the CLI and the acceptance tests
//!   ([`verify`]).
//!
//! Everything is exact: integers are GMP-backed [`arith::Integer`], rationals
//! are always in lowest terms, and no operation silently overflows.

pub mod arith;
pub mod error;
pub mod families;
pub mod hodge;
pub mod potential;
pub mod verify;
pub mod wps;

pub use arith::{sylvester, sylvester_deficit, Integer, Rational};
pub use error::Error;
pub use hodge::{diamond, HodgeDiamond, Orientation};
pub use wps::{DiagonalAction, WeightSystem};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
