//! Exact tools for two-dimensional arithmetic progressions
//! `{x1·q1 + x2·q2 : |x1| ≤ X1, |x2| ≤ X2}` that avoid non-zero perfect
//! squares: witness search and certification, the small-square
//! construction, the exponent calculus behind the upper bound, the lattice
//! reduction for non-coprime steps, and the non-residue lower-bound family.
//!
//! All verdicts are computed in exact integer or rational arithmetic.
//! Floating point appears only in display-only ratio columns.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod lowerbound;
pub mod progression;
pub mod schema;
pub mod sweep;
pub mod zaharescu;

pub use error::{Error, Result};
pub use exec::Exec;

/// Exact signed integer used throughout. Arithmetic that could leave the
/// range is checked and reported as [`Error::Overflow`].
pub type Int = i128;

/// Exact rational with positive reduced denominator.
pub type Rat = num_rational::Ratio<Int>;
