use std::fmt;

use axdecomp::axioms::AxiomError;
use axdecomp::coords::CoordError;
use axdecomp::io::IoError;
use axdecomp::var_model::VarModelError;
use axdecomp::{DecompError, EvalError, GameError, ParseError};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// Residual above tolerance, or an axiom check failed.
    pub const VERIFICATION: u8 = 1;
    /// Usage, parse, or malformed input.
    pub const USAGE: u8 = 2;
    /// Incomplete masked table or game.
    pub const INCOMPLETE: u8 = 3;
    /// `F(0) ≠ 0` for a method that requires it, or `v(∅) ≠ 0`.
    pub const NORMALIZATION: u8 = 4;
    /// Evaluation or I/O failure.
    pub const RUNTIME: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: exit::USAGE, message: message.into() }
    }

    pub fn io(path: &str, e: std::io::Error) -> Self {
        Self { code: exit::RUNTIME, message: format!("{path}: {e}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn with(code: u8, e: impl fmt::Display) -> CliError {
    CliError { code, message: e.to_string() }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        with(exit::USAGE, e)
    }
}

impl From<CoordError> for CliError {
    fn from(e: CoordError) -> Self {
        with(exit::USAGE, e)
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Coord(c) => c.into(),
            e => with(exit::RUNTIME, e),
        }
    }
}

impl From<DecompError> for CliError {
    fn from(e: DecompError) -> Self {
        match e {
            DecompError::NonZeroOrigin { .. } => with(exit::NORMALIZATION, e),
            DecompError::Coord(c) => c.into(),
            DecompError::Eval(ev) => ev.into(),
            DecompError::TooFewSamples(_) => with(exit::USAGE, e),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        let code = match &e {
            GameError::MissingCoalition(_) | GameError::WrongTableSize { .. } => exit::INCOMPLETE,
            GameError::NonZeroEmpty(_) => exit::NORMALIZATION,
            GameError::Eval(_) => exit::RUNTIME,
            _ => exit::USAGE,
        };
        with(code, e)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Incomplete { .. } => exit::INCOMPLETE,
            _ => exit::USAGE,
        };
        with(code, e)
    }
}

impl From<AxiomError> for CliError {
    fn from(e: AxiomError) -> Self {
        match e {
            AxiomError::Decomp(d) => d.into(),
            AxiomError::Eval(ev) => ev.into(),
            AxiomError::Game(g) => g.into(),
            e => with(exit::USAGE, e),
        }
    }
}

impl From<VarModelError> for CliError {
    fn from(e: VarModelError) -> Self {
        with(exit::USAGE, e)
    }
}
