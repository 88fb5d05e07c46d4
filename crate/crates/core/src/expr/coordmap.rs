use std::fmt;

use thiserror::Error;

use super::ast::sign;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoordMapError {
    #[error("map does not fix zero: h(0) = {0}")]
    NoFixedPoint(f64),
    #[error("map is not a bijection: {0}")]
    NotBijective(String),
}

/// A homeomorphism of ℝ with `h(0) = 0`, drawn from a finite catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum CoordinateMap {
    Identity,
    /// `t ↦ βt`, `β ≠ 0`.
    Scale(f64),
    /// `t ↦ sign(t)|t|^p`, `p > 0`.
    OddPower(f64),
    /// Strictly increasing piecewise-linear interpolation through knots
    /// containing `(0, 0)`, extended linearly beyond the end knots.
    PiecewiseLinear { t: Vec<f64>, y: Vec<f64> },
}

impl CoordinateMap {
    pub fn scale(beta: f64) -> Result<Self, CoordMapError> {
        Self::affine(beta, 0.0)
    }

    /// `t ↦ βt + shift`; only shift-free maps are admissible.
    pub fn affine(beta: f64, shift: f64) -> Result<Self, CoordMapError> {
        if shift != 0.0 {
            return Err(CoordMapError::NoFixedPoint(shift));
        }
        if beta == 0.0 || !beta.is_finite() {
            return Err(CoordMapError::NotBijective(format!("scale factor {beta}")));
        }
        Ok(CoordinateMap::Scale(beta))
    }

    pub fn odd_power(p: f64) -> Result<Self, CoordMapError> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(CoordMapError::NotBijective(format!("exponent {p} must be positive")));
        }
        Ok(CoordinateMap::OddPower(p))
    }

    /// Knots `(t_k, y_k)` in any order; `t` and `y` must both be strictly
    /// increasing after sorting by `t`, and `(0, 0)` must be a knot.
    pub fn piecewise_linear(knots: &[(f64, f64)]) -> Result<Self, CoordMapError> {
        let mut knots = knots.to_vec();
        if knots.len() < 2 {
            return Err(CoordMapError::NotBijective("need at least two knots".into()));
        }
        if knots.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
            return Err(CoordMapError::NotBijective("non-finite knot".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1) {
            return Err(CoordMapError::NotBijective("knots must be strictly increasing".into()));
        }
        match knots.iter().find(|(t, _)| *t == 0.0) {
            Some(&(_, y0)) if y0 == 0.0 => {}
            Some(&(_, y0)) => return Err(CoordMapError::NoFixedPoint(y0)),
            None => {
                let (t, y): (Vec<f64>, Vec<f64>) = knots.iter().copied().unzip();
                return Err(CoordMapError::NoFixedPoint(interpolate(&t, &y, 0.0)));
            }
        }
        let (t, y) = knots.into_iter().unzip();
        Ok(CoordinateMap::PiecewiseLinear { t, y })
    }

    pub fn apply(&self, v: f64) -> f64 {
        match self {
            CoordinateMap::Identity => v,
            CoordinateMap::Scale(b) => b * v,
            CoordinateMap::OddPower(p) => sign(v) * v.abs().powf(*p),
            CoordinateMap::PiecewiseLinear { t, y } => interpolate(t, y, v),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            CoordinateMap::Identity => CoordinateMap::Identity,
            CoordinateMap::Scale(b) => CoordinateMap::Scale(1.0 / b),
            CoordinateMap::OddPower(p) => CoordinateMap::OddPower(1.0 / p),
            CoordinateMap::PiecewiseLinear { t, y } => CoordinateMap::PiecewiseLinear { t: y.clone(), y: t.clone() },
        }
    }
}

fn interpolate(t: &[f64], y: &[f64], v: f64) -> f64 {
    let n = t.len();
    // segment index k such that t[k] <= v < t[k+1], clamped to the end segments
    let k = match t.partition_point(|&tk| tk <= v) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    if v == t[k] {
        return y[k];
    }
    let slope = (y[k + 1] - y[k]) / (t[k + 1] - t[k]);
    y[k] + slope * (v - t[k])
}

impl fmt::Display for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordinateMap::Identity => write!(f, "t"),
            CoordinateMap::Scale(b) => write!(f, "{b}*t"),
            CoordinateMap::OddPower(p) => write!(f, "sign(t)*|t|^{p}"),
            CoordinateMap::PiecewiseLinear { t, .. } => write!(f, "pwl[{} knots]", t.len()),
        }
    }
}
