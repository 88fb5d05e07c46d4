//! Seeded function families for the axiom suite: max-monomials, monomials
//! and polynomials built from them, step functions, the worked examples and
//! constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AxiomError;
use crate::coords::{Dimension, Point};
use crate::demos::{self, Tariff};
use crate::expr::{linear_combine, BinOp, Expr, Expression, Func, FunctionHandle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `∏ max(s_i x_i, 0)^{q_i}`.
    MaxMonomial { q: Vec<u32>, s: Vec<i32> },
    /// `∏ x_i^{q_i}`, expanded into signed max-monomials.
    Monomial { q: Vec<u32> },
    /// `n_terms` random monomials of total degree `1..=degree` with
    /// coefficients uniform in `coefficient_range`, plus `constant`.
    Polynomial {
        d: usize,
        degree: u32,
        n_terms: usize,
        coefficient_range: [f64; 2],
        #[serde(default)]
        constant: f64,
    },
    /// `Σ_{t ∈ grid} (1 + sign(x_1 + ⋯ + x_d − t)) / 2`.
    StepFunction { d: usize, grid: Vec<f64> },
    /// Foreign-stock P&L `(x_1 + s0)(x_2 + c0) − s0·c0`.
    Example1 { s0: f64, c0: f64 },
    /// Shared bill `f(x_1 + ⋯ + x_d)`; `discount` is `[threshold, rate]`.
    Example2 {
        d: usize,
        fixed: f64,
        rate: f64,
        #[serde(default)]
        discount: Option<[f64; 2]>,
    },
    Constant { d: usize, c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    #[serde(flatten)]
    pub family: Family,
    /// Trailing coordinates the function ignores.
    #[serde(default)]
    pub extra_dims: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSampling {
    pub count: usize,
    pub low: f64,
    pub high: f64,
}

impl Default for PointSampling {
    fn default() -> Self {
        Self { count: 50, low: -2.0, high: 2.0 }
    }
}

fn default_permutations() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub points: PointSampling,
    #[serde(default = "default_permutations")]
    pub permutations: usize,
    pub functions: Vec<CorpusEntry>,
}

/// A generated corpus member with its sample points.
#[derive(Debug, Clone)]
pub struct CorpusFunction {
    pub label: String,
    pub handle: FunctionHandle,
    pub continuous: bool,
    pub points: Vec<Point>,
}

impl Family {
    fn base_dim(&self) -> usize {
        match self {
            Family::MaxMonomial { q, .. } | Family::Monomial { q } => q.len(),
            Family::Polynomial { d, .. } | Family::StepFunction { d, .. } => *d,
            Family::Example2 { d, .. } | Family::Constant { d, .. } => *d,
            Family::Example1 { .. } => 2,
        }
    }

    fn continuous(&self) -> bool {
        !matches!(self, Family::StepFunction { .. })
    }
}

fn entry(index: usize, detail: impl Into<String>) -> AxiomError {
    AxiomError::BadEntry { index, detail: detail.into() }
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn product(factors: Vec<Expr>) -> Expr {
    factors.into_iter().reduce(|a, b| Expr::bin(BinOp::Mul, a, b)).unwrap_or(Expr::num(1.0))
}

fn handle(e: Expr, d: Dimension) -> FunctionHandle {
    Expression::new(e, d).expect("variables within dimension").into_handle()
}

/// `∏_{i: q_i > 0} max(s_i x_i, 0)^{q_i}` in `d ≥ q.len()` dimensions.
/// Factors with `q_i = 0` are 1 and omitted.
pub fn max_monomial(q: &[u32], s: &[i32], d: Dimension) -> Result<FunctionHandle, AxiomError> {
    if q.len() != s.len() || q.len() > d.get() {
        return Err(entry(0, format!("q has {} entries, s {}, dimension {}", q.len(), s.len(), d)));
    }
    if let Some(bad) = s.iter().find(|&&v| v != 1 && v != -1) {
        return Err(entry(0, format!("sign {bad} is not ±1")));
    }
    let factors = q
        .iter()
        .zip(s)
        .enumerate()
        .filter(|(_, (&qi, _))| qi > 0)
        .map(|(i, (&qi, &si))| {
            let arg = if si > 0 { Expr::var(i) } else { Expr::Neg(Box::new(Expr::var(i))) };
            let m = Expr::call(Func::Max, vec![arg, Expr::num(0.0)]);
            if qi == 1 {
                m
            } else {
                Expr::bin(BinOp::Pow, m, Expr::num(qi as f64))
            }
        })
        .collect();
    Ok(handle(product(factors), d))
}

/// `x^q` as `Σ_s ∏_{i ∈ supp q} s_i^{q_i} · max(s_i x_i, 0)^{q_i}`, summing
/// over sign vectors on `supp q` only (`2^|supp q|` terms). Coordinates
/// outside the support contribute `x_i^0 = 1` and need no expansion.
pub fn monomial(q: &[u32], d: Dimension) -> Result<FunctionHandle, AxiomError> {
    if q.len() > d.get() {
        return Err(entry(0, format!("q has {} entries, dimension {}", q.len(), d)));
    }
    let support: Vec<usize> = (0..q.len()).filter(|&i| q[i] > 0).collect();
    if support.is_empty() {
        return Ok(FunctionHandle::constant(1.0, d));
    }
    let mut terms = Vec::with_capacity(1 << support.len());
    for signs in 0u32..(1 << support.len()) {
        let mut s = vec![1; q.len()];
        let mut coef = 1.0;
        for (k, &i) in support.iter().enumerate() {
            if signs >> k & 1 == 1 {
                s[i] = -1;
                if q[i] % 2 == 1 {
                    coef = -coef;
                }
            }
        }
        terms.push((coef, max_monomial(q, &s, d)?));
    }
    Ok(linear_combine(terms)?)
}

/// Random polynomial; returns the handle and a readable description.
pub fn random_polynomial(
    d: Dimension,
    vars: usize,
    degree: u32,
    n_terms: usize,
    range: [f64; 2],
    constant: f64,
    rng: &mut impl Rng,
) -> Result<(FunctionHandle, String), AxiomError> {
    if degree == 0 || n_terms == 0 || vars == 0 || !(range[0] < range[1]) {
        return Err(entry(0, "polynomial needs degree ≥ 1, n_terms ≥ 1, d ≥ 1 and a non-empty range"));
    }
    let mut terms = Vec::new();
    let mut text = Vec::new();
    for _ in 0..n_terms {
        let total = rng.random_range(1..=degree);
        let mut q = vec![0u32; vars];
        for _ in 0..total {
            q[rng.random_range(0..vars)] += 1;
        }
        let c: f64 = rng.random_range(range[0]..range[1]);
        text.push(format!("{c:.4}*x^{q:?}"));
        terms.push((c, monomial(&q, d)?));
    }
    if constant != 0.0 {
        text.push(format!("{constant}"));
        terms.push((constant, FunctionHandle::constant(1.0, d)));
    }
    Ok((linear_combine(terms)?, text.join(" + ")))
}

/// `count` points uniform in `[low, high]^d`; every fifth point has one
/// coordinate set to zero.
pub fn sample_points(d: Dimension, sampling: &PointSampling, seed: u64) -> Vec<Point> {
    sample_with(d, sampling, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn sample_with(d: Dimension, sampling: &PointSampling, rng: &mut ChaCha8Rng) -> Vec<Point> {
    (0..sampling.count)
        .map(|k| {
            let mut c: Vec<f64> = (0..d.get()).map(|_| rng.random_range(sampling.low..=sampling.high)).collect();
            if k % 5 == 4 {
                c[(k / 5) % d.get()] = 0.0;
            }
            Point::new(c).expect("finite sample")
        })
        .collect()
}

fn build(index: usize, e: &CorpusEntry, rng: &mut ChaCha8Rng) -> Result<(FunctionHandle, String), AxiomError> {
    let base = e.family.base_dim();
    let d = Dimension::new(base + e.extra_dims).map_err(|err| entry(index, err.to_string()))?;
    let pad = if e.extra_dims > 0 { format!(" +{} dummy", e.extra_dims) } else { String::new() };
    let at = |r: Result<FunctionHandle, AxiomError>| {
        r.map_err(|err| match err {
            AxiomError::BadEntry { detail, .. } => entry(index, detail),
            other => other,
        })
    };
    let (h, label) = match &e.family {
        Family::MaxMonomial { q, s } => (at(max_monomial(q, s, d))?, format!("max_monomial q={q:?} s={s:?}")),
        Family::Monomial { q } => (at(monomial(q, d))?, format!("monomial q={q:?}")),
        Family::Polynomial { d: vars, degree, n_terms, coefficient_range, constant } => {
            let (h, text) = random_polynomial(d, *vars, *degree, *n_terms, *coefficient_range, *constant, rng)
                .map_err(|err| entry(index, err.to_string()))?;
            (h, format!("polynomial {text}"))
        }
        Family::StepFunction { d: vars, grid } => {
            if grid.is_empty() {
                return Err(entry(index, "step function needs a non-empty grid"));
            }
            let total = (1..*vars).fold(Expr::var(0), |acc, i| Expr::bin(BinOp::Add, acc, Expr::var(i)));
            let steps = grid.iter().map(|&t| {
                let sg = Expr::call(Func::Sign, vec![Expr::bin(BinOp::Sub, total.clone(), Expr::num(t))]);
                Expr::bin(BinOp::Div, Expr::bin(BinOp::Add, Expr::num(1.0), sg), Expr::num(2.0))
            });
            let e = steps.reduce(|a, b| Expr::bin(BinOp::Add, a, b)).expect("non-empty grid");
            (handle(e, d), format!("step_function d={vars} grid={grid:?}"))
        }
        Family::Example1 { s0, c0 } => (demos::stock_fx_pnl_in(*s0, *c0, d), format!("example1 s0={s0} c0={c0}")),
        Family::Example2 { d: users, fixed, rate, discount } => {
            let tariff = Tariff { fixed: *fixed, rate: *rate, discount: discount.map(|[k, r]| (k, r)) };
            (demos::shared_bill_in(tariff, *users, d), format!("example2 d={users} {tariff:?}"))
        }
        Family::Constant { c, .. } => (FunctionHandle::constant(*c, d), format!("constant {c}")),
    };
    Ok((h, format!("{label}{pad}")))
}

/// Builds every entry of `spec` with its sample points. Entry `k` draws
/// from ChaCha8 stream `2k` (function) and `2k + 1` (points) of `spec.seed`.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusFunction>, AxiomError> {
    if spec.functions.is_empty() {
        return Err(AxiomError::EmptyCorpus);
    }
    if !(spec.points.low <= spec.points.high) || !spec.points.low.is_finite() || !spec.points.high.is_finite() {
        return Err(entry(0, "point range must be finite with low ≤ high"));
    }
    spec.functions
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let (handle, label) = build(k, e, &mut seeded(spec.seed, 2 * k as u64))?;
            let points = sample_with(handle.dim(), &spec.points, &mut seeded(spec.seed, 2 * k as u64 + 1));
            Ok(CorpusFunction { label, handle, continuous: e.family.continuous(), points })
        })
        .collect()
}

impl CorpusSpec {
    /// 20 functions spanning every family, 50 points each, 5 permutations.
    pub fn default_suite() -> Self {
        let f = |family: Family| CorpusEntry { family, extra_dims: 0 };
        let padded = |family: Family, extra_dims: usize| CorpusEntry { family, extra_dims };
        let poly = |d, degree, n_terms, constant| Family::Polynomial { d, degree, n_terms, coefficient_range: [-3.0, 3.0], constant };
        Self {
            seed: 2024,
            points: PointSampling::default(),
            permutations: 5,
            functions: vec![
                f(Family::MaxMonomial { q: vec![1, 1], s: vec![1, 1] }),
                f(Family::MaxMonomial { q: vec![2, 0, 1], s: vec![1, -1, -1] }),
                f(Family::MaxMonomial { q: vec![1, 2, 1, 1], s: vec![-1, 1, 1, -1] }),
                f(Family::Monomial { q: vec![2, 1] }),
                padded(Family::Monomial { q: vec![1, 1, 1] }, 1),
                f(Family::Monomial { q: vec![3, 0, 2] }),
                f(Family::Monomial { q: vec![1, 0, 0, 2] }),
                f(poly(2, 3, 4, 0.0)),
                f(poly(3, 4, 5, 0.0)),
                f(poly(4, 3, 6, 1.5)),
                f(poly(5, 2, 6, 0.0)),
                padded(poly(3, 2, 3, 0.0), 1),
                f(Family::StepFunction { d: 2, grid: vec![-1.0, 0.5, 2.0] }),
                padded(Family::StepFunction { d: 3, grid: vec![0.0, 1.0] }, 1),
                f(Family::Example1 { s0: 2.0, c0: 3.0 }),
                padded(Family::Example1 { s0: -1.5, c0: 4.0 }, 1),
                f(Family::Example2 { d: 3, fixed: 10.0, rate: 2.0, discount: None }),
                f(Family::Example2 { d: 4, fixed: 5.0, rate: 2.0, discount: Some([3.0, 1.0]) }),
                f(Family::Constant { d: 3, c: 7.0 }),
                f(Family::Constant { d: 2, c: -3.0 }),
            ],
        }
    }
}
