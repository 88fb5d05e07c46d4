//! Decomposition principles evaluated pointwise: sequential (for a fixed
//! activation order), averaged-sequential over all orders, its subset-sum
//! form, the δ* extension to functions with `F(0) ≠ 0`, and the pointwise
//! Shapley construction.
//!
//! Every exact method reads `F` only at the projected points `p_I(x)`. Those
//! values are tabulated once per call (indexed by mask `I`), evaluated in
//! parallel and stored in mask order, so results do not depend on the thread
//! count.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coords::{self, CoordError, Dimension, Permutation, Point, Subset, PERMUTATION_CAP, SUBSET_CAP};
use crate::expr::{EvalError, FunctionHandle};
use crate::game::{self, GameError};

/// Absolute tolerance for the `F(0) = 0` precondition.
pub const ORIGIN_TOL: f64 = 1e-12;

/// Minimum table size before mask evaluations are farmed out to rayon.
const PAR_THRESHOLD: usize = 256;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("F(0) = {value} is not zero; this method requires F(0) = 0 (use --method delta-star for functions with a fixed part)")]
    NonZeroOrigin { value: f64 },
    #[error(transparent)]
    Coord(#[from] CoordError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
}

impl From<GameError> for DecompError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::NonZeroEmpty(value) => DecompError::NonZeroOrigin { value },
            GameError::Eval(e) => DecompError::Eval(e),
            GameError::Coord(e) => DecompError::Coord(e),
            other => DecompError::Eval(EvalError::Domain(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Method {
    /// Activation order given by ranks: argument `i` is activated at step `π(i)`.
    Sequential { order: Vec<usize> },
    AsPermutation,
    AsSubset,
    DeltaStar,
    PointwiseShapley,
    MonteCarlo { seed: u64, n: usize },
}

impl Method {
    pub fn sequential(pi: &Permutation) -> Self {
        Method::Sequential { order: pi.to_one_based() }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Sequential { order } => {
                let o: Vec<String> = order.iter().map(|k| k.to_string()).collect();
                write!(f, "sequential({})", o.join(","))
            }
            Method::AsPermutation => write!(f, "as_permutation"),
            Method::AsSubset => write!(f, "as_subset"),
            Method::DeltaStar => write!(f, "delta_star"),
            Method::PointwiseShapley => write!(f, "pointwise_shapley"),
            Method::MonteCarlo { seed, n } => write!(f, "monte_carlo(seed={seed}, n={n})"),
        }
    }
}

/// Contributions `G_1(x), …, G_d(x)` of one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub x: Point,
    pub contributions: Vec<f64>,
    /// `F(x)`.
    pub total: f64,
    pub method: Method,
}

impl DecompositionResult {
    pub fn sum(&self) -> f64 {
        self.contributions.iter().sum()
    }

    /// `|F(x) - Σ G_i(x)|`.
    pub fn residual(&self) -> f64 {
        (self.total - self.sum()).abs()
    }
}

fn check_dim(f: &FunctionHandle, x: &Point) -> Result<Dimension, DecompError> {
    if f.dim() != x.dim() {
        return Err(CoordError::DimensionMismatch { expected: f.dim().get(), got: x.dim().get() }.into());
    }
    Ok(x.dim())
}

/// `F(0)`, rejected unless within [`ORIGIN_TOL`] of zero.
pub fn require_zero_origin(f: &FunctionHandle) -> Result<f64, DecompError> {
    let value = f.eval(&Point::zeros(f.dim()))?;
    if value.abs() > ORIGIN_TOL {
        return Err(DecompError::NonZeroOrigin { value });
    }
    Ok(value)
}

/// `F(p_I(x))` for every mask `I` in `0..2^d`, in mask order.
pub fn masked_values(f: &FunctionHandle, x: &Point) -> Result<Vec<f64>, DecompError> {
    let d = check_dim(f, x)?.ensure_at_most(SUBSET_CAP, "exact subset methods")?;
    let n = d.subset_count();
    let eval = |mask: usize| f.eval_raw(&coords::project_raw(x.coords(), mask as u64));
    let values = if n >= PAR_THRESHOLD {
        (0..n).into_par_iter().map(eval).collect::<Result<Vec<_>, _>>()?
    } else {
        (0..n).map(eval).collect::<Result<Vec<_>, _>>()?
    };
    Ok(values)
}

/// Telescoping decomposition for one activation order.
///
/// `pi` gives activation ranks: argument `i` is switched on at step `π(i)`,
/// so `G_i(x) = F(c ∗ x) − F(c' ∗ x)` with `c` the indicator of
/// `{j : π(j) ≤ π(i)}` and `c'` that of `{j : π(j) < π(i)}`. Uses exactly
/// `d + 1` evaluations of `F`.
pub fn sequential(f: &FunctionHandle, x: &Point, pi: &Permutation) -> Result<DecompositionResult, DecompError> {
    let d = check_dim(f, x)?.get();
    if pi.dim().get() != d {
        return Err(CoordError::DimensionMismatch { expected: d, got: pi.dim().get() }.into());
    }
    let origin = require_zero_origin(f)?;
    let by_rank = pi.inverse();
    let mut prefix = Vec::with_capacity(d + 1);
    prefix.push(origin);
    let mut mask = 0u64;
    for r in 0..d {
        mask |= 1 << by_rank.apply(r);
        prefix.push(f.eval_raw(&coords::project_raw(x.coords(), mask))?);
    }
    let contributions = (0..d).map(|i| prefix[pi.apply(i) + 1] - prefix[pi.apply(i)]).collect();
    Ok(DecompositionResult {
        x: x.clone(),
        contributions,
        total: prefix[d],
        method: Method::sequential(pi),
    })
}

/// Averaged-sequential decomposition by explicit enumeration of all d!
/// activation orders (d ≤ 10).
pub fn as_permutation(f: &FunctionHandle, x: &Point) -> Result<DecompositionResult, DecompError> {
    let d = check_dim(f, x)?.ensure_at_most(PERMUTATION_CAP, "permutation enumeration")?;
    require_zero_origin(f)?;
    let table = masked_values(f, x)?;
    Ok(DecompositionResult {
        x: x.clone(),
        contributions: game::permutation_average(d.get(), &table),
        total: table[table.len() - 1],
        method: Method::AsPermutation,
    })
}

/// Averaged-sequential decomposition by the subset sum
/// `G_i = Σ_{I ∋ i} (|I|-1)!(d-|I|)!/d! · (F(p_I x) − F(p_{I∖{i}} x))` (d ≤ 20).
pub fn as_subset(f: &FunctionHandle, x: &Point) -> Result<DecompositionResult, DecompError> {
    let d = check_dim(f, x)?.ensure_at_most(SUBSET_CAP, "exact subset methods")?;
    require_zero_origin(f)?;
    let table = masked_values(f, x)?;
    Ok(DecompositionResult {
        x: x.clone(),
        contributions: game::subset_shapley(d.get(), &table),
        total: table[table.len() - 1],
        method: Method::AsSubset,
    })
}

/// δ*: the subset sum plus an even split of `F(0)`. No precondition on `F(0)`.
pub fn delta_star(f: &FunctionHandle, x: &Point) -> Result<DecompositionResult, DecompError> {
    let d = check_dim(f, x)?.ensure_at_most(SUBSET_CAP, "exact subset methods")?.get();
    let table = masked_values(f, x)?;
    let fixed = table[0] / d as f64;
    let contributions = game::subset_shapley(d, &table).into_iter().map(|g| fixed + g).collect();
    Ok(DecompositionResult {
        x: x.clone(),
        contributions,
        total: table[table.len() - 1],
        method: Method::DeltaStar,
    })
}

/// Shapley value of the game `S ↦ F(x ∗ χ(S))`.
pub fn pointwise_shapley(f: &FunctionHandle, x: &Point) -> Result<DecompositionResult, DecompError> {
    check_dim(f, x)?;
    require_zero_origin(f)?;
    let fx = f.scaled_by(x)?;
    let v = game::game_from_binary_function(&fx)?;
    Ok(DecompositionResult {
        x: x.clone(),
        total: f.eval(x)?,
        contributions: game::shapley(&v).shares,
        method: Method::PointwiseShapley,
    })
}

/// Dispatches on `method`.
pub fn decompose(f: &FunctionHandle, x: &Point, method: &Method) -> Result<DecompositionResult, DecompError> {
    match method {
        Method::Sequential { order } => sequential(f, x, &Permutation::from_one_based(order)?),
        Method::AsPermutation => as_permutation(f, x),
        Method::AsSubset => as_subset(f, x),
        Method::DeltaStar => delta_star(f, x),
        Method::PointwiseShapley => pointwise_shapley(f, x),
        Method::MonteCarlo { seed, n } => crate::montecarlo::estimate_as(f, x, *n, *seed).map(|r| r.into_result(x)),
    }
}

/// Subset-level helper for callers holding a pre-tabulated masked table.
pub fn delta_star_from_table(d: Dimension, table: &[f64]) -> Result<Vec<f64>, DecompError> {
    d.ensure_at_most(SUBSET_CAP, "exact subset methods")?;
    if table.len() != d.subset_count() {
        return Err(CoordError::DimensionMismatch { expected: d.subset_count(), got: table.len() }.into());
    }
    let fixed = table[0] / d.get() as f64;
    Ok(game::subset_shapley(d.get(), table).into_iter().map(|g| fixed + g).collect())
}

/// The subset `{j : π(j) ≤ r}` activated after `r` steps of order `π`.
pub fn activated_after(pi: &Permutation, r: usize) -> Subset {
    let mask = (0..pi.dim().get()).filter(|&j| pi.apply(j) < r).fold(0u64, |m, j| m | 1 << j);
    Subset::from_mask(mask, pi.dim()).expect("mask within dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::for_each_permutation;
    use crate::expr::parse;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn handle(text: &str, d: usize) -> FunctionHandle {
        parse(text, dim(d)).unwrap().into_handle()
    }

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_based(v).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn sequential_examples() {
        let f = handle("x1*x2 + x1", 2);
        let x = pt(&[2.0, 3.0]);
        assert_eq!(sequential(&f, &x, &perm(&[1, 2])).unwrap().contributions, vec![2.0, 6.0]);
        assert_eq!(sequential(&f, &x, &perm(&[2, 1])).unwrap().contributions, vec![8.0, 0.0]);

        let g = handle("x1^2 - 3*x3 + x1*x3", 3);
        let x = pt(&[1.5, -4.0, 2.0]);
        for_each_permutation(3, |p| {
            let pi = Permutation::new(p.to_vec()).unwrap();
            let r = sequential(&g, &x, &pi).unwrap();
            assert_eq!(r.contributions[1], 0.0);
            assert!(r.residual() <= 1e-12 * (1.0 + r.total.abs()));
        });
    }

    #[test]
    fn sequential_uses_activation_ranks() {
        // d = 3, ranks (2,3,1): x3 first, then x1, then x2.
        let f = handle("x1 + 10*x2 + 100*x3 + x1*x3", 3);
        let x = pt(&[1.0, 1.0, 1.0]);
        let r = sequential(&f, &x, &perm(&[2, 3, 1])).unwrap();
        // x3 alone: 100; then x1 adds 1 + 1 (interaction); then x2 adds 10.
        assert_eq!(r.contributions, vec![2.0, 10.0, 100.0]);
        assert_eq!(activated_after(&perm(&[2, 3, 1]), 2).mask(), 0b101);
    }

    #[test]
    fn sequential_requires_zero_origin() {
        let f = handle("x1 + 1", 1);
        let err = sequential(&f, &pt(&[1.0]), &perm(&[1])).unwrap_err();
        assert!(matches!(err, DecompError::NonZeroOrigin { value } if value == 1.0));
        assert!(err.to_string().contains("delta-star"));
        // within tolerance is accepted
        let g = handle("x1 + 1e-13", 1);
        assert!(sequential(&g, &pt(&[1.0]), &perm(&[1])).is_ok());
    }

    #[test]
    fn as_examples() {
        let f = handle("x1*x2", 2);
        for (a, b) in [(2.0, 3.0), (-1.5, 4.0), (0.0, 7.0)] {
            let x = pt(&[a, b]);
            let want = [a * b / 2.0, a * b / 2.0];
            assert_close(&as_permutation(&f, &x).unwrap().contributions, &want, 1e-15);
            assert_close(&as_subset(&f, &x).unwrap().contributions, &want, 1e-15);
            assert_close(&pointwise_shapley(&f, &x).unwrap().contributions, &want, 1e-15);
        }
        let g = handle("x1", 2);
        assert_eq!(as_permutation(&g, &pt(&[5.0, 7.0])).unwrap().contributions, vec![5.0, 0.0]);
        let h = handle("exp(x1*x2) - 1 + x3^3", 3);
        assert_eq!(as_subset(&h, &Point::zeros(dim(3))).unwrap().contributions, vec![0.0; 3]);
        assert_eq!(as_permutation(&h, &Point::zeros(dim(3))).unwrap().contributions, vec![0.0; 3]);
    }

    #[test]
    fn two_dimensional_expansion() {
        // G1 = ½(F(x1,0) − F(0,0)) + ½(F(x1,x2) − F(0,x2))
        let f = handle("x1^2*x2 + exp(x2) - 1 + 3*x1", 2);
        let x = pt(&[1.25, -0.75]);
        let ev = |a: f64, b: f64| f.eval(&pt(&[a, b])).unwrap();
        let g1 = 0.5 * (ev(1.25, 0.0) - ev(0.0, 0.0)) + 0.5 * (ev(1.25, -0.75) - ev(0.0, -0.75));
        let g2 = 0.5 * (ev(0.0, -0.75) - ev(0.0, 0.0)) + 0.5 * (ev(1.25, -0.75) - ev(1.25, 0.0));
        assert_close(&as_subset(&f, &x).unwrap().contributions, &[g1, g2], 1e-15);
    }

    #[test]
    fn delta_star_examples() {
        for d in 1..=6 {
            for c in [-3.0, 0.0, 7.0] {
                let f = FunctionHandle::constant(c, dim(d));
                let x = Point::new((0..d).map(|i| i as f64 - 1.5).collect()).unwrap();
                let r = delta_star(&f, &x).unwrap();
                assert!(r.contributions.iter().all(|&g| g == c / d as f64));
            }
        }
        // (x1+2)(x2+3) - 6 at (1,1): G1 = 1/2 + 3, G2 = 1/2 + 2
        let f = handle("(x1+2)*(x2+3)-6", 2);
        assert_close(&delta_star(&f, &pt(&[1.0, 1.0])).unwrap().contributions, &[3.5, 2.5], 1e-15);

        let g = handle("10 + 2*(x1+x2+x3)", 3);
        let r = delta_star(&g, &pt(&[1.0, 2.0, 3.0])).unwrap();
        assert_close(&r.contributions, &[10.0 / 3.0 + 2.0, 10.0 / 3.0 + 4.0, 10.0 / 3.0 + 6.0], 1e-15);
        assert!((r.sum() - 22.0).abs() < 1e-13);

        // restriction to F(0) = 0 is the AS decomposition
        let h = handle("x1*x2*x3 - x2^2 + relu(x3 - x1)", 3);
        let x = pt(&[0.3, -1.2, 2.2]);
        assert_close(
            &delta_star(&h, &x).unwrap().contributions,
            &as_subset(&h, &x).unwrap().contributions,
            1e-15,
        );
    }

    #[test]
    fn degenerate_dimension_one() {
        let f = handle("x1^3", 1);
        let x = pt(&[2.0]);
        for r in [
            as_subset(&f, &x).unwrap(),
            as_permutation(&f, &x).unwrap(),
            pointwise_shapley(&f, &x).unwrap(),
            delta_star(&f, &x).unwrap(),
            sequential(&f, &x, &perm(&[1])).unwrap(),
        ] {
            assert_eq!(r.contributions, vec![8.0], "{}", r.method);
        }
        let g = handle("x1 + 4", 1);
        assert_eq!(delta_star(&g, &pt(&[-1.0])).unwrap().contributions, vec![3.0]);
    }

    #[test]
    fn pointwise_at_ones_is_game_shapley() {
        let f = handle("x1*x2 + 2*x3 - x1*x3^2", 3);
        let ones = Point::ones(dim(3));
        let v = game::game_from_binary_function(&f).unwrap();
        assert_close(
            &pointwise_shapley(&f, &ones).unwrap().contributions,
            &game::shapley(&v).shares,
            1e-15,
        );
        let g = handle("x1", 4);
        let x = pt(&[3.0, 1.0, -2.0, 8.0]);
        assert_eq!(pointwise_shapley(&g, &x).unwrap().contributions, vec![3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn caps_and_mismatches() {
        let f = FunctionHandle::constant(0.0, dim(11));
        let x = Point::zeros(dim(11));
        assert!(matches!(as_permutation(&f, &x), Err(DecompError::Coord(CoordError::AboveCap { .. }))));
        assert!(as_subset(&f, &x).is_ok());
        let g = FunctionHandle::constant(0.0, dim(21));
        assert!(as_subset(&g, &Point::zeros(dim(21))).is_err());
        assert!(delta_star(&handle("x1", 2), &pt(&[1.0])).is_err());
        assert!(matches!(
            as_subset(&handle("x1 + 1", 2), &pt(&[1.0, 1.0])),
            Err(DecompError::NonZeroOrigin { .. })
        ));
        assert!(matches!(
            pointwise_shapley(&handle("x1 + 1", 2), &pt(&[1.0, 1.0])),
            Err(DecompError::NonZeroOrigin { .. })
        ));
    }

    #[test]
    fn average_of_sequential_is_as() {
        let f = handle("x1*x2^2 - x3*x4 + max(x1, x4)*x2 + x2", 4);
        let x = pt(&[0.7, -1.1, 2.0, 0.4]);
        let mut mean = vec![0.0; 4];
        let mut count = 0.0;
        for_each_permutation(4, |p| {
            let r = sequential(&f, &x, &Permutation::new(p.to_vec()).unwrap()).unwrap();
            for (m, g) in mean.iter_mut().zip(&r.contributions) {
                *m += g;
            }
            count += 1.0;
        });
        let mean: Vec<f64> = mean.into_iter().map(|m| m / count).collect();
        assert_close(&as_permutation(&f, &x).unwrap().contributions, &mean, 1e-13);
    }

    #[test]
    fn relabeling_invariance() {
        let f = handle("x1^2*x2 + 3*x3 - x1*x3", 3);
        let x = pt(&[1.2, -0.4, 2.5]);
        let pi = perm(&[3, 1, 2]);
        let fp = f.compose_permutation(&pi).unwrap();
        let base = as_subset(&f, &coords::permute(&x, &pi).unwrap()).unwrap().contributions;
        let moved = as_subset(&fp, &x).unwrap().contributions;
        // slot j of F receives x_{π(j)}
        for j in 0..3 {
            assert!((moved[pi.apply(j)] - base[j]).abs() < 1e-13);
        }
    }
}
