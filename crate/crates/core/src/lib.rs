//! Exact integer machinery for experiments on representations of integers by
//! bivariate quadratic polynomials and on lattice points of conics.
//!
//! The crate is organized around the pipeline
//!
//! * [`arith`]: shared integer utilities (isqrt, divisors, squarefree
//!   decomposition, exact surd comparisons);
//! * [`qform`]: binary quadratic forms, with the square-discriminant
//!   factorization into linear factors and representation enumeration;
//! * [`reduce`]: reduction of a full quadratic polynomial to its form via the
//!   translation/dilation correspondence;
//! * [`dfi`]: discrete fractional integral sums over representation sets;
//! * [`sieve`]: quadratic-residue theory and the large-sieve density bound
//!   for conic strips;
//! * [`arcs`]: lattice points on short arcs, from strip scanners and regime
//!   sets to shift patterns, Pell relations, and diophantine-approximation
//!   statistics.
//!
//! Everything is pure and deterministic; value-level arithmetic is exact
//! (integer or rational), floating point enters only for sums of `|m|^-lambda`
//! terms and for transcendental thresholds, which callers receive together with
//! completeness flags.

pub mod arcs;
pub mod arith;
pub mod dfi;
pub mod error;
pub mod qform;
pub mod reduce;
pub mod sieve;

pub use error::{Error, Result};

/// Exact rationals used for the reduction constant `gamma` and its relatives.
pub use num_rational::Ratio;
