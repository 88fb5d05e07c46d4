//! Additive attribution of a real function of `d` real arguments to its
//! arguments.
//!
//! Given `F: ℝ^d → ℝ` and a point `x`, the principles in [`decomp`] produce
//! contributions `G_1(x), …, G_d(x)` that sum to `F(x)`:
//!
//! * sequential decompositions for a fixed activation order,
//! * the averaged-sequential (AS) decomposition, by enumeration of all
//!   orders or by the equivalent subset sum,
//! * the pointwise Shapley decomposition (Shapley value of `S ↦ F(x ∗ χ(S))`),
//! * δ*, which extends AS to functions with `F(0) ≠ 0` by splitting the
//!   fixed part `F(0)` evenly.
//!
//! [`game`] holds the classical Shapley value on finite games, [`montecarlo`]
//! a seeded permutation-sampling estimator, and [`axioms`] executable checks
//! of the axiom systems that characterize these principles.

pub mod axioms;
pub mod combin;
pub mod coords;
pub mod decomp;
pub mod demos;
pub mod expr;
pub mod game;
pub mod io;
pub mod montecarlo;
pub mod var_model;

pub use coords::{hadamard, permute, prefix_indicator, project, Dimension, Permutation, Point, Subset};
pub use decomp::{
    as_permutation, as_subset, decompose, delta_star, pointwise_shapley, sequential, DecompError,
    DecompositionResult, Method,
};
pub use expr::{linear_combine, parse, CoordinateMap, EvalError, FunctionHandle, MaskedTable, ParseError};
pub use game::{game_from_binary_function, shapley, shapley_permutation_oracle, Allocation, Game, GameError};
pub use montecarlo::{estimate_as, EstimatorReport};
