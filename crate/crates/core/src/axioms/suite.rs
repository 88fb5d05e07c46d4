//! Runs every functional axiom check over a corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::corpus::{generate_corpus, random_polynomial, CorpusFunction, CorpusSpec};
use super::functional::*;
use super::{AxiomError, AxiomVerdict, Principle};
use crate::coords::{Dimension, Permutation};
use crate::expr::CoordinateMap;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub principle: Principle,
    pub tol: f64,
    pub alphas: Vec<f64>,
    pub a7_coefficients: Vec<f64>,
    /// Used for continuous functions with `d ≤ bernstein_max_dim`.
    pub bernstein: Vec<BernsteinStep>,
    pub bernstein_max_dim: usize,
    pub a8_points: usize,
    pub a8_deltas: Vec<f64>,
    pub a8_directions: usize,
    pub a9_map_sets: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            principle: Principle::DeltaStar,
            tol: 1e-9,
            alphas: vec![-2.5, 0.0, 3.0],
            a7_coefficients: vec![1.0, 0.1, 0.01, 0.001],
            bernstein: vec![
                BernsteinStep { radius: 2.0, degree: 4 },
                BernsteinStep { radius: 3.0, degree: 16 },
                BernsteinStep { radius: 4.0, degree: 64 },
            ],
            bernstein_max_dim: 2,
            a8_points: 3,
            a8_deltas: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            a8_directions: 4,
            a9_map_sets: 3,
            seed: 7,
        }
    }
}

fn random_permutation(d: Dimension, rng: &mut impl Rng) -> Permutation {
    let mut p: Vec<usize> = (0..d.get()).collect();
    p.shuffle(rng);
    Permutation::new(p).expect("shuffled identity")
}

fn random_map(rng: &mut impl Rng) -> Result<CoordinateMap, AxiomError> {
    Ok(match rng.random_range(0..3) {
        0 => {
            let beta: f64 = rng.random_range(0.5..2.0);
            CoordinateMap::scale(if rng.random_bool(0.5) { beta } else { -beta })?
        }
        1 => CoordinateMap::odd_power([1.0 / 3.0, 0.5, 5.0 / 3.0, 3.0][rng.random_range(0..4)])?,
        _ => {
            let ts = [-2.0, -0.7, 0.0, 0.9, 2.5];
            let mut ys = [0.0; 5];
            for k in (0..2).rev() {
                ys[k] = ys[k + 1] - rng.random_range(0.3..3.0) * (ts[k + 1] - ts[k]);
            }
            for k in 3..5 {
                ys[k] = ys[k - 1] + rng.random_range(0.3..3.0) * (ts[k] - ts[k - 1]);
            }
            let knots: Vec<(f64, f64)> = ts.iter().copied().zip(ys).collect();
            CoordinateMap::piecewise_linear(&knots)?
        }
    })
}

fn check_function(k: usize, c: &CorpusFunction, permutations: usize, cfg: &SuiteConfig) -> Result<Vec<AxiomVerdict>, AxiomError> {
    let p = &cfg.principle;
    let f = &c.handle;
    let d = f.dim();
    let tol = cfg.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(k as u64);
    let mut out = Vec::new();

    out.push(check_a1_additivity(p, f, &c.points, tol)?);
    for _ in 0..permutations {
        let pi = random_permutation(d, &mut rng);
        out.push(check_a2_permutation(p, f, &pi, &c.points, tol)?);
    }
    out.extend(check_a3_a6_dummy(p, f, &c.points, tol)?);

    let (partner, _) = random_polynomial(d, d.get(), 2, 3, [-2.0, 2.0], 0.0, &mut rng)?;
    out.extend(check_a4_a5_linearity(p, f, &partner, &cfg.alphas, &c.points, tol)?);
    out.push(check_a7_sequence(p, f, &partner, &cfg.a7_coefficients, &c.points, tol)?);
    if c.continuous && d.get() <= cfg.bernstein_max_dim {
        out.push(check_a7_bernstein(p, f, &cfg.bernstein, &c.points, tol)?);
    }
    for (j, x) in c.points.iter().take(cfg.a8_points).enumerate() {
        let seed = rng.random::<u64>() ^ j as u64;
        out.push(check_a8_continuity(p, f, x, &cfg.a8_deltas, cfg.a8_directions, seed, tol)?);
    }
    for _ in 0..cfg.a9_map_sets {
        let maps = (0..d.get()).map(|_| random_map(&mut rng)).collect::<Result<Vec<_>, _>>()?;
        out.push(check_a9_reparameterization(p, f, &maps, &c.points, tol)?);
    }
    for v in &mut out {
        v.function = c.label.clone();
    }
    Ok(out)
}

/// All functional axiom verdicts for `cfg.principle` over the corpus, in
/// corpus order. Functions are checked in parallel; the output does not
/// depend on the thread count.
pub fn run_suite(spec: &CorpusSpec, cfg: &SuiteConfig) -> Result<Vec<AxiomVerdict>, AxiomError> {
    let corpus = generate_corpus(spec)?;
    let per_function: Vec<Vec<AxiomVerdict>> = corpus
        .par_iter()
        .enumerate()
        .map(|(k, c)| check_function(k, c, spec.permutations, cfg))
        .collect::<Result<_, _>>()?;
    Ok(per_function.into_iter().flatten().collect())
}
