use std::fmt;

use super::EvalError;
use crate::coords::Dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Max,
    Min,
    Abs,
    Sign,
    Exp,
    Ln,
    Relu,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "max" => Func::Max,
            "min" => Func::Min,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "relu" => Func::Relu,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Max => "max",
            Func::Min => "min",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Relu => "relu",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Max | Func::Min => 2,
            _ => 1,
        }
    }
}

/// Expression tree. Variables are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// `sign(0) = 0`, unlike `f64::signum`.
pub fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Power with `0^0 = 1`. Negative bases need integral exponents.
pub fn power(base: f64, exp: f64) -> Result<f64, EvalError> {
    if exp == 0.0 {
        return Ok(1.0);
    }
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(EvalError::Domain(format!("negative base {base} with fractional exponent {exp}")));
    }
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        return Ok(base.powi(exp as i32));
    }
    Ok(base.powf(exp))
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x)?, b.eval(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::Domain("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b)?,
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(x)?;
                match f {
                    Func::Max => a.max(args[1].eval(x)?),
                    Func::Min => a.min(args[1].eval(x)?),
                    Func::Abs => a.abs(),
                    Func::Sign => sign(a),
                    Func::Exp => a.exp(),
                    Func::Relu => a.max(0.0),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain(format!("ln of non-positive value {a}")));
                        }
                        a.ln()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite(v));
        }
        Ok(v)
    }

    /// Largest variable index used, 0-based.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) => a.max_var(),
            Expr::Bin(_, a, b) => a.max_var().max(b.max_var()),
            Expr::Call(_, args) => args.iter().filter_map(Expr::max_var).max(),
        }
    }

    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Self {
        Expr::Call(f, args)
    }
}

/// Prints a fully parenthesized form that parses back to an equal tree
/// (up to literal sign: negative literals print as negations).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{})", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A parsed expression together with its declared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    pub(crate) d: Dimension,
    pub(crate) root: Expr,
}

impl Expression {
    /// Fails if the tree references a variable beyond `d`.
    pub fn new(root: Expr, d: Dimension) -> Result<Self, super::ParseError> {
        if let Some(i) = root.max_var() {
            if i >= d.get() {
                return Err(super::ParseError {
                    position: 0,
                    message: format!("variable x{} exceeds dimension {d}", i + 1),
                });
            }
        }
        Ok(Self { d, root })
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.d.get() {
            return Err(EvalError::DimensionMismatch { expected: self.d.get(), got: x.len() });
        }
        self.root.eval(x)
    }

    pub fn into_handle(self) -> super::FunctionHandle {
        super::FunctionHandle::from_expression(self)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}
