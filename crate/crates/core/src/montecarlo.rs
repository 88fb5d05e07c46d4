//! Permutation-sampling estimator of the averaged-sequential decomposition,
//! for dimensions where enumerating all d! orders is out of reach.
//!
//! Sample `k` draws its order from a ChaCha8 stream keyed by `(seed, k)`, and
//! samples are grouped into fixed-size chunks whose statistics are merged in
//! chunk order. The report is therefore bitwise identical for a given seed no
//! matter how many threads run the chunks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coords::{self, CoordError, Point};
use crate::decomp::{self, DecompError, DecompositionResult, Method};
use crate::expr::FunctionHandle;

const CHUNK: usize = 256;
/// Tabulate all `2^d` projected points up front when `d` is at most this.
const MEMO_MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub estimate: Vec<f64>,
    pub standard_error: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// `F(x)`.
    pub total: f64,
}

impl EstimatorReport {
    pub fn into_result(self, x: &Point) -> DecompositionResult {
        DecompositionResult {
            x: x.clone(),
            contributions: self.estimate,
            total: self.total,
            method: Method::MonteCarlo { seed: self.seed, n: self.n_samples },
        }
    }
}

/// Running per-coordinate mean and sum of squared deviations.
#[derive(Clone)]
struct Moments {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(d: usize) -> Self {
        Self { n: 0.0, mean: vec![0.0; d], m2: vec![0.0; d] }
    }

    fn push(&mut self, sample: &[f64]) {
        self.n += 1.0;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(sample) {
            let delta = v - *m;
            *m += delta / self.n;
            *s += delta * (v - *m);
        }
    }

    fn merge(&mut self, other: &Self) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * other.n / n;
            self.m2[i] += other.m2[i] + delta * delta * self.n * other.n / n;
        }
        self.n = n;
    }
}

/// The `k`-th sampled activation order (players listed in activation order).
pub fn sampled_order(d: usize, seed: u64, k: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(&mut rng);
    order
}

/// Estimates the averaged-sequential decomposition of `F` at `x` from `n`
/// uniformly drawn activation orders.
pub fn estimate_as(f: &FunctionHandle, x: &Point, n: usize, seed: u64) -> Result<EstimatorReport, DecompError> {
    if n < 2 {
        return Err(DecompError::TooFewSamples(n));
    }
    if f.dim() != x.dim() {
        return Err(CoordError::DimensionMismatch { expected: f.dim().get(), got: x.dim().get() }.into());
    }
    let d = x.dim().get();
    let origin = decomp::require_zero_origin(f)?;
    let total = f.eval(x)?;

    let memo = if d <= MEMO_MAX_DIM && (1usize << d) <= n.saturating_mul(d) {
        Some(decomp::masked_values(f, x)?)
    } else {
        None
    };
    let value_at = |mask: u64| -> Result<f64, DecompError> {
        match &memo {
            Some(table) => Ok(table[mask as usize]),
            None => Ok(f.eval_raw(&coords::project_raw(x.coords(), mask))?),
        }
    };

    let chunks: Vec<Moments> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::new(d);
            let mut sample = vec![0.0; d];
            for k in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let order = sampled_order(d, seed, k as u64);
                let mut mask = 0u64;
                let mut prev = origin;
                for &player in &order {
                    mask |= 1 << player;
                    let v = value_at(mask)?;
                    sample[player] = v - prev;
                    prev = v;
                }
                acc.push(&sample);
            }
            Ok(acc)
        })
        .collect::<Result<_, DecompError>>()?;

    let mut all = Moments::new(d);
    for c in &chunks {
        all.merge(c);
    }
    let standard_error = all
        .m2
        .iter()
        .map(|&m2| (m2 / (all.n - 1.0) / all.n).sqrt())
        .collect();
    Ok(EstimatorReport { estimate: all.mean, standard_error, n_samples: n, seed, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::Dimension;
    use crate::expr::parse;

    fn handle(text: &str, d: usize) -> FunctionHandle {
        parse(text, Dimension::new(d).unwrap()).unwrap().into_handle()
    }

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn product_estimate_within_four_se() {
        let f = handle("x1*x2", 2);
        for seed in [0, 1, 99] {
            let r = estimate_as(&f, &pt(&[2.0, 3.0]), 1000, seed).unwrap();
            for i in 0..2 {
                assert!((r.estimate[i] - 3.0).abs() <= 4.0 * r.standard_error[i], "{r:?}");
            }
            assert!((r.estimate.iter().sum::<f64>() - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn one_dimension_is_exact() {
        let r = estimate_as(&handle("x1^3 - x1", 1), &pt(&[2.0]), 10, 5).unwrap();
        assert_eq!(r.estimate, vec![6.0]);
        assert_eq!(r.standard_error, vec![0.0]);
    }

    #[test]
    fn symmetric_function_symmetric_estimates() {
        let f = handle("x1*x2*x3 + x1*x2 + x2*x3 + x1*x3 + exp(x1 + x2 + x3) - 1", 3);
        let r = estimate_as(&f, &pt(&[0.8, 0.8, 0.8]), 500, 17).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let bound = 4.0 * (r.standard_error[i].powi(2) + r.standard_error[j].powi(2)).sqrt();
                assert!((r.estimate[i] - r.estimate[j]).abs() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn each_sample_telescopes() {
        let f = handle("x1*x2 - x3^2*x4 + relu(x2 - x4)*x1", 4);
        let x = pt(&[1.0, -2.0, 0.5, 3.0]);
        let fx = f.eval(&x).unwrap();
        for k in 0..50 {
            let order = sampled_order(4, 3, k);
            let mut mask = 0u64;
            let mut prev = 0.0;
            let mut sum = 0.0;
            for &p in &order {
                mask |= 1 << p;
                let v = f.eval_raw(&coords::project_raw(x.coords(), mask)).unwrap();
                sum += v - prev;
                prev = v;
            }
            assert!((sum - fx).abs() <= 1e-12 * (1.0 + fx.abs()));
        }
    }

    #[test]
    fn deterministic_and_thread_count_independent() {
        let f = handle("x1*x2*x3 - x4*x5 + x6^2*x1", 6);
        let x = pt(&[1.0, 2.0, -1.0, 0.5, 3.0, -2.0]);
        let a = estimate_as(&f, &x, 3000, 42).unwrap();
        let b = estimate_as(&f, &x, 3000, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| estimate_as(&f, &x, 3000, 42).unwrap());
        assert_eq!(a, c);
        let e = estimate_as(&f, &x, 3000, 43).unwrap();
        assert_ne!(a.estimate, e.estimate);
    }

    #[test]
    fn guards() {
        let f = handle("x1 + x2", 2);
        assert!(matches!(estimate_as(&f, &pt(&[1.0, 1.0]), 1, 0), Err(DecompError::TooFewSamples(1))));
        assert!(matches!(
            estimate_as(&handle("x1 + 1", 2), &pt(&[1.0, 1.0]), 10, 0),
            Err(DecompError::NonZeroOrigin { .. })
        ));
    }

    #[test]
    fn large_dimension_without_memo() {
        // d = 30: beyond every exact method
        let terms: Vec<String> = (1..=30).map(|i| format!("{i}*x{i}")).collect();
        let f = handle(&terms.join(" + "), 30);
        let x = Point::new(vec![1.0; 30]).unwrap();
        let r = estimate_as(&f, &x, 20, 8).unwrap();
        for (i, e) in r.estimate.iter().enumerate() {
            assert!((e - (i + 1) as f64).abs() < 1e-9);
        }
    }
}
