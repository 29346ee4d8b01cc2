//! Tau-quantized pseudo-differential operators on periodic grids.
//!
//! Symbols and amplitudes are real expression pairs, quantizing functions are
//! vectors of expressions in `w1..wn`, and operators are dense complex
//! matrices assembled by quadrature of the oscillatory integral.

pub mod calculus;
pub mod discretize;
pub mod estimates;
pub mod heisenberg;
pub mod error;
pub mod poly;
pub mod quantize;
pub mod rational;
pub mod sampling;
pub mod symbol;
pub mod symexpr;
pub mod tau;
pub mod vars;

pub use error::{Error, Result};
