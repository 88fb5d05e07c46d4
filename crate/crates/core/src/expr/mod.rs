//! User-defined functions `F: ℝ^d → ℝ`: a small expression language, native
//! and table-backed evaluators, and the lazy transforms the decomposition
//! formulas and axiom checks are stated in terms of (`F∘π`, `F∘p_I`,
//! `F(h₁,…,h_d)`, `αF + βF′`).
//!
//! Conventions: `0^0 = 1` (so zero exponents in max-monomials are neutral)
//! and `sign(0) = 0`.

mod ast;
mod coordmap;
mod handle;
mod parse;

use thiserror::Error;

use crate::coords::CoordError;

pub use ast::{power, sign, BinOp, Expr, Expression, Func};
pub use coordmap::{CoordMapError, CoordinateMap};
pub use handle::{linear_combine, FunctionHandle, MaskedTable};
pub use parse::parse;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    /// 0-based byte offset into the source text.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite result {0}")]
    NonFinite(f64),
    #[error("point {0} is not covered by the lookup table")]
    TableMiss(String),
    #[error("dimension mismatch: function takes {expected} arguments, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Coord(#[from] CoordError),
}
