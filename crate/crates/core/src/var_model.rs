//! Toy claims model for attributing a Value-at-Risk movement to risk-factor
//! changes.
//!
//! Claims in scenario `m` given factor changes `x` are
//! `C_m(x) = Σ_k e_k · exp(Σ_i L_{k,i} x_i) · Z_{m,k}` over a fixed, seeded
//! scenario set of lognormal shocks `Z`. VaR is the lower empirical quantile
//! at 99.5%: the order statistic of rank `⌈0.995·n⌉` (1-based) of the sorted
//! losses. The attributed function is `F(x) = VaR(C(x)) − VaR(C(0))`, so
//! `F(0) = 0` exactly.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use thiserror::Error;

use crate::coords::{CoordError, Dimension};
use crate::expr::FunctionHandle;

pub const MIN_SCENARIOS: usize = 1000;
/// Quantile level as an exact fraction, 995/1000.
const LEVEL_NUM: usize = 995;
const LEVEL_DEN: usize = 1000;

#[derive(Debug, Error)]
pub enum VarModelError {
    #[error("at least {MIN_SCENARIOS} scenarios are required for a stable 99.5% quantile, got {0}")]
    TooFewScenarios(usize),
    #[error("portfolio must hold at least one position")]
    EmptyPortfolio,
    #[error(transparent)]
    Coord(#[from] CoordError),
}

#[derive(Debug, Clone)]
pub struct ClaimsModel {
    d: Dimension,
    exposures: Vec<f64>,
    /// `K × d` factor loadings.
    loadings: Vec<Vec<f64>>,
    /// `n × K` shocks, one row per scenario.
    shocks: Vec<Vec<f64>>,
}

/// 1-based rank of the lower empirical 99.5% quantile among `n` values.
pub fn quantile_rank(n: usize) -> usize {
    (LEVEL_NUM * n).div_ceil(LEVEL_DEN)
}

fn lognormal() -> LogNormal<f64> {
    LogNormal::new(0.0, 0.5).expect("valid parameters")
}

impl ClaimsModel {
    /// Random portfolio of `positions` exposures over `d` factors.
    pub fn generate(d: Dimension, positions: usize, scenarios: usize, seed: u64) -> Result<Self, VarModelError> {
        if scenarios < MIN_SCENARIOS {
            return Err(VarModelError::TooFewScenarios(scenarios));
        }
        if positions == 0 {
            return Err(VarModelError::EmptyPortfolio);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exposures = (0..positions).map(|_| rng.random_range(1.0..2.0)).collect();
        let loadings = (0..positions)
            .map(|_| (0..d.get()).map(|_| rng.random_range(-0.5..0.5)).collect())
            .collect();
        let z = lognormal();
        let shocks = (0..scenarios)
            .map(|_| (0..positions).map(|_| z.sample(&mut rng)).collect())
            .collect();
        Ok(Self { d, exposures, loadings, shocks })
    }

    /// Two factors, `pairs` mirrored position pairs `(a, b)` / `(b, a)` that
    /// share exposure and shock, so `C(x₁, x₂) = C(x₂, x₁)` scenario by scenario.
    pub fn symmetric_two_factor(pairs: usize, scenarios: usize, seed: u64) -> Result<Self, VarModelError> {
        if scenarios < MIN_SCENARIOS {
            return Err(VarModelError::TooFewScenarios(scenarios));
        }
        if pairs == 0 {
            return Err(VarModelError::EmptyPortfolio);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut exposures = Vec::new();
        let mut loadings = Vec::new();
        for _ in 0..pairs {
            let e = rng.random_range(1.0..2.0);
            let a = rng.random_range(-0.5..0.5);
            let b = rng.random_range(-0.5..0.5);
            exposures.extend([e, e]);
            loadings.push(vec![a, b]);
            loadings.push(vec![b, a]);
        }
        let z = lognormal();
        let shocks = (0..scenarios)
            .map(|_| {
                (0..pairs)
                    .flat_map(|_| {
                        let s = z.sample(&mut rng);
                        [s, s]
                    })
                    .collect()
            })
            .collect();
        Ok(Self { d: Dimension::new(2)?, exposures, loadings, shocks })
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn scenarios(&self) -> usize {
        self.shocks.len()
    }

    /// Empirical 99.5% VaR of the claims given factor changes `x`.
    pub fn var(&self, x: &[f64]) -> f64 {
        let growth: Vec<f64> = self
            .loadings
            .iter()
            .zip(&self.exposures)
            .map(|(l, e)| e * l.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().exp())
            .collect();
        let mut losses: Vec<f64> = self
            .shocks
            .iter()
            .map(|z| growth.iter().zip(z).map(|(g, s)| g * s).sum())
            .collect();
        let k = quantile_rank(losses.len()) - 1;
        let (_, v, _) = losses.select_nth_unstable_by(k, f64::total_cmp);
        *v
    }

    /// `x ↦ VaR(C(x)) − VaR(C(0))` as a native function handle.
    pub fn var_change(self) -> FunctionHandle {
        let d = self.d;
        let model = Arc::new(self);
        let base = model.var(&vec![0.0; d.get()]);
        FunctionHandle::native("var_change", d, move |x| model.var(x) - base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::Point;
    use crate::decomp::delta_star;

    #[test]
    fn quantile_rank_is_exact() {
        assert_eq!(quantile_rank(1000), 995);
        assert_eq!(quantile_rank(1001), 996);
        assert_eq!(quantile_rank(2000), 1990);
        assert_eq!(quantile_rank(200), 199);
    }

    #[test]
    fn scenario_floor() {
        let d = Dimension::new(2).unwrap();
        assert!(matches!(ClaimsModel::generate(d, 3, 999, 1), Err(VarModelError::TooFewScenarios(999))));
        assert!(ClaimsModel::generate(d, 0, 1000, 1).is_err());
    }

    #[test]
    fn quantile_matches_sorted_order_statistic() {
        let m = ClaimsModel::generate(Dimension::new(3).unwrap(), 4, 1500, 9).unwrap();
        let x = [0.1, -0.2, 0.3];
        let mut all: Vec<f64> = m
            .shocks
            .iter()
            .map(|z| {
                (0..4)
                    .map(|k| {
                        let lin: f64 = (0..3).map(|i| m.loadings[k][i] * x[i]).sum();
                        m.exposures[k] * lin.exp() * z[k]
                    })
                    .sum()
            })
            .collect();
        all.sort_by(f64::total_cmp);
        assert!((m.var(&x) - all[quantile_rank(1500) - 1]).abs() < 1e-12);
    }

    #[test]
    fn no_movement_no_attribution() {
        let f = ClaimsModel::generate(Dimension::new(3).unwrap(), 5, 1000, 2).unwrap().var_change();
        let r = delta_star(&f, &Point::zeros(Dimension::new(3).unwrap())).unwrap();
        assert_eq!(r.total, 0.0);
        assert_eq!(r.contributions, vec![0.0; 3]);
    }

    #[test]
    fn single_factor_takes_everything() {
        let f = ClaimsModel::generate(Dimension::new(3).unwrap(), 5, 1000, 3).unwrap().var_change();
        let x = Point::new(vec![0.4, 0.0, 0.0]).unwrap();
        let r = delta_star(&f, &x).unwrap();
        assert!((r.contributions[0] - r.total).abs() <= 1e-12 * (1.0 + r.total.abs()));
        assert_eq!(&r.contributions[1..], &[0.0, 0.0]);
    }

    #[test]
    fn symmetric_model_symmetric_split() {
        let f = ClaimsModel::symmetric_two_factor(4, 2000, 5).unwrap().var_change();
        for h in [0.25, -0.3, 1.0] {
            let x = Point::new(vec![h, h]).unwrap();
            let r = delta_star(&f, &x).unwrap();
            assert!((r.contributions[0] - r.contributions[1]).abs() <= 1e-9, "{r:?}");
            let a = f.eval(&Point::new(vec![h, 0.0]).unwrap()).unwrap();
            let b = f.eval(&Point::new(vec![0.0, h]).unwrap()).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
