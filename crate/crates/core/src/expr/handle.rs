use std::fmt;
use std::sync::Arc;

use super::ast::{Expr, Expression};
use super::coordmap::CoordinateMap;
use super::EvalError;
use crate::coords::{self, CoordError, Dimension, Permutation, Point, Subset, SUBSET_CAP};

type NativeFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Values of a function on the `2^d` projected points `p_I(x)` of one base point.
///
/// A lookup at `y` succeeds iff every coordinate of `y` equals either the
/// base coordinate or zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedTable {
    base: Point,
    values: Vec<f64>,
}

impl MaskedTable {
    pub fn new(base: Point, values: Vec<f64>) -> Result<Self, CoordError> {
        let d = base.dim();
        d.ensure_at_most(SUBSET_CAP, "masked tables")?;
        if values.len() != d.subset_count() {
            return Err(CoordError::DimensionMismatch { expected: d.subset_count(), got: values.len() });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CoordError::NonFinite { index, value });
        }
        Ok(Self { base, values })
    }

    /// Tabulates `f` at every `p_I(x)`.
    pub fn tabulate(f: &FunctionHandle, x: &Point) -> Result<Self, EvalError> {
        let d = x.dim();
        d.ensure_at_most(SUBSET_CAP, "masked tables")?;
        let values = Subset::all(d)
            .map(|s| f.eval_raw(&coords::project_raw(x.coords(), s.mask())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(x.clone(), values)?)
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, s: Subset) -> f64 {
        self.values[s.mask() as usize]
    }

    /// Canonical mask of a covered point; `None` if `y` is not some `p_I(base)`.
    pub fn mask_of(&self, y: &[f64]) -> Option<u64> {
        if y.len() != self.base.coords().len() {
            return None;
        }
        let mut mask = 0u64;
        for (i, (&yi, &bi)) in y.iter().zip(self.base.coords()).enumerate() {
            if yi == 0.0 {
                continue;
            }
            if yi != bi {
                return None;
            }
            mask |= 1 << i;
        }
        Some(mask)
    }

    pub fn covers(&self, y: &Point) -> bool {
        self.mask_of(y.coords()).is_some()
    }
}

enum Inner {
    Expr(Expression),
    Native { name: String, f: Arc<NativeFn> },
    Table(MaskedTable),
    Permuted(FunctionHandle, Permutation),
    Projected(FunctionHandle, Subset),
    Scaled(FunctionHandle, Point),
    Reparameterized(FunctionHandle, Vec<CoordinateMap>),
    Linear(Vec<(f64, FunctionHandle)>),
}

/// An immutable, cheaply clonable function `ℝ^d → ℝ`.
///
/// Transforms (`compose_*`, `linear_combine`, `scaled_by`) wrap the handle
/// lazily; nothing is simplified.
#[derive(Clone)]
pub struct FunctionHandle {
    d: Dimension,
    inner: Arc<Inner>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionHandle(d={}, {self})", self.d)
    }
}

impl FunctionHandle {
    fn wrap(d: Dimension, inner: Inner) -> Self {
        Self { d, inner: Arc::new(inner) }
    }

    pub fn from_expression(e: Expression) -> Self {
        Self::wrap(e.dim(), Inner::Expr(e))
    }

    pub fn constant(c: f64, d: Dimension) -> Self {
        Self::from_expression(Expression { d, root: Expr::Num(c) })
    }

    /// A native evaluator. `f` must be deterministic; non-finite outputs
    /// are reported as evaluation errors.
    pub fn native(name: impl Into<String>, d: Dimension, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::wrap(d, Inner::Native { name: name.into(), f: Arc::new(f) })
    }

    pub fn from_table(t: MaskedTable) -> Self {
        Self::wrap(t.base().dim(), Inner::Table(t))
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    /// The underlying expression, if this handle is a bare expression.
    pub fn expression(&self) -> Option<&Expression> {
        match &*self.inner {
            Inner::Expr(e) => Some(e),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Point) -> Result<f64, EvalError> {
        self.eval_raw(x.coords())
    }

    /// Evaluates at a raw coordinate slice; dimension is still checked.
    pub fn eval_raw(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.d.get() {
            return Err(EvalError::DimensionMismatch { expected: self.d.get(), got: x.len() });
        }
        let v = match &*self.inner {
            Inner::Expr(e) => e.root.eval(x)?,
            Inner::Native { f, .. } => f(x),
            Inner::Table(t) => {
                let mask = t.mask_of(x).ok_or_else(|| EvalError::TableMiss(format!("{x:?}")))?;
                t.values[mask as usize]
            }
            Inner::Permuted(f, pi) => f.eval_raw(&coords::permute_raw(x, pi))?,
            Inner::Projected(f, s) => f.eval_raw(&coords::project_raw(x, s.mask()))?,
            Inner::Scaled(f, base) => {
                let y: Vec<f64> = base.coords().iter().zip(x).map(|(a, b)| a * b).collect();
                f.eval_raw(&y)?
            }
            Inner::Reparameterized(f, maps) => {
                let y: Vec<f64> = maps.iter().zip(x).map(|(h, &v)| h.apply(v)).collect();
                f.eval_raw(&y)?
            }
            Inner::Linear(terms) => {
                let mut acc = 0.0;
                for (c, f) in terms {
                    if *c != 0.0 {
                        acc += c * f.eval_raw(x)?;
                    }
                }
                acc
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite(v));
        }
        Ok(v)
    }

    /// `x ↦ F(π(x))`.
    pub fn compose_permutation(&self, pi: &Permutation) -> Result<Self, CoordError> {
        if pi.dim() != self.d {
            return Err(CoordError::DimensionMismatch { expected: self.d.get(), got: pi.dim().get() });
        }
        Ok(Self::wrap(self.d, Inner::Permuted(self.clone(), pi.clone())))
    }

    /// `x ↦ F(p_I(x))`.
    pub fn compose_projection(&self, s: Subset) -> Result<Self, CoordError> {
        if s.dim() != self.d {
            return Err(CoordError::DimensionMismatch { expected: self.d.get(), got: s.dim().get() });
        }
        Ok(Self::wrap(self.d, Inner::Projected(self.clone(), s)))
    }

    /// `x ↦ F(h₁(x₁), …, h_d(x_d))`.
    pub fn compose_coordinate_maps(&self, maps: Vec<CoordinateMap>) -> Result<Self, CoordError> {
        if maps.len() != self.d.get() {
            return Err(CoordError::DimensionMismatch { expected: self.d.get(), got: maps.len() });
        }
        Ok(Self::wrap(self.d, Inner::Reparameterized(self.clone(), maps)))
    }

    /// `y ↦ F(x ∗ y)`; on binary `y` this is the pointwise game of `F` at `x`.
    pub fn scaled_by(&self, x: &Point) -> Result<Self, CoordError> {
        if x.dim() != self.d {
            return Err(CoordError::DimensionMismatch { expected: self.d.get(), got: x.dim().get() });
        }
        Ok(Self::wrap(self.d, Inner::Scaled(self.clone(), x.clone())))
    }

    /// `αF`.
    pub fn scale(&self, alpha: f64) -> Self {
        Self::wrap(self.d, Inner::Linear(vec![(alpha, self.clone())]))
    }
}

/// Pointwise `Σ c_k F_k`. Zero-coefficient terms are never evaluated.
pub fn linear_combine(terms: Vec<(f64, FunctionHandle)>) -> Result<FunctionHandle, CoordError> {
    let Some((_, first)) = terms.first() else {
        return Err(CoordError::BadDimension(0));
    };
    let d = first.d;
    if let Some((_, bad)) = terms.iter().find(|(_, f)| f.d != d) {
        return Err(CoordError::DimensionMismatch { expected: d.get(), got: bad.d.get() });
    }
    Ok(FunctionHandle::wrap(d, Inner::Linear(terms)))
}

impl fmt::Display for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.inner {
            Inner::Expr(e) => write!(f, "{e}"),
            Inner::Native { name, .. } => write!(f, "{name}"),
            Inner::Table(t) => write!(f, "table@{}", t.base),
            Inner::Permuted(g, pi) => write!(f, "({g})∘π{pi}"),
            Inner::Projected(g, s) => write!(f, "({g})∘p{{{}}}", s.to_one_based(",")),
            Inner::Scaled(g, x) => write!(f, "({g})(x∗{x})"),
            Inner::Reparameterized(g, maps) => {
                let hs: Vec<String> = maps.iter().map(|h| h.to_string()).collect();
                write!(f, "({g})∘h[{}]", hs.join("; "))
            }
            Inner::Linear(terms) => {
                let parts: Vec<String> = terms.iter().map(|(c, g)| format!("{c}·({g})")).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}
