//! Cooperative games on `d` players and their Shapley value.
//!
//! A [`Game`] is a dense table over all 2^d coalitions, indexed by bitmask.
//! Games are identified with functions on `{0,1}^d` through the indicator
//! encoding χ; see [`game_from_binary_function`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combin::{for_each_permutation, shapley_weights};
use crate::coords::{CoordError, Dimension, Point, Subset, PERMUTATION_CAP, SUBSET_CAP};
use crate::expr::{EvalError, FunctionHandle};

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Coord(#[from] CoordError),
    #[error("value table has {got} entries, expected 2^{d} = {}", 1usize << d)]
    WrongTableSize { d: usize, got: usize },
    #[error("v(∅) must be exactly 0, got {0}")]
    NonZeroEmpty(f64),
    #[error("coalition {{{0}}} is missing from the game")]
    MissingCoalition(String),
    #[error("coalition {{{0}}} listed twice")]
    DuplicateCoalition(String),
    #[error("value of coalition {{{coalition}}} is not finite: {value}")]
    NonFinite { coalition: String, value: f64 },
    #[error("function evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("invalid game JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A set function `v` with `v(∅) = 0`, stored densely by coalition mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    d: Dimension,
    values: Vec<f64>,
}

impl Game {
    pub fn new(d: Dimension, values: Vec<f64>) -> Result<Self, GameError> {
        d.ensure_at_most(SUBSET_CAP, "dense games")?;
        if values.len() != d.subset_count() {
            return Err(GameError::WrongTableSize { d: d.get(), got: values.len() });
        }
        if values[0] != 0.0 {
            return Err(GameError::NonZeroEmpty(values[0]));
        }
        if let Some((mask, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let s = Subset::from_mask(mask as u64, d)?;
            return Err(GameError::NonFinite { coalition: s.to_one_based(","), value });
        }
        Ok(Self { d, values })
    }

    /// Builds a game from a closure over coalitions; the value at ∅ is forced to 0.
    pub fn from_fn(d: Dimension, mut v: impl FnMut(Subset) -> f64) -> Result<Self, GameError> {
        d.ensure_at_most(SUBSET_CAP, "dense games")?;
        let values = Subset::all(d)
            .map(|s| if s.mask() == 0 { 0.0 } else { v(s) })
            .collect();
        Self::new(d, values)
    }

    /// The additive game `v(S) = Σ_{i∈S} w_i`.
    pub fn additive(weights: &[f64]) -> Result<Self, GameError> {
        let d = Dimension::new(weights.len())?;
        Self::from_fn(d, |s| s.iter().map(|i| weights[i]).sum())
    }

    /// The unanimity game on `carrier`: 1 if the coalition contains it, else 0.
    pub fn unanimity(carrier: Subset) -> Result<Self, GameError> {
        let c = carrier.mask();
        Self::from_fn(carrier.dim(), |s| if s.mask() & c == c { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn value(&self, s: Subset) -> f64 {
        self.values[s.mask() as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `v(U)`.
    pub fn grand_value(&self) -> f64 {
        *self.values.last().expect("table is non-empty")
    }

    /// `(v∘π)(S) = v(π(S))`.
    pub fn permuted(&self, pi: &crate::coords::Permutation) -> Result<Self, GameError> {
        if pi.dim() != self.d {
            return Err(CoordError::DimensionMismatch { expected: self.d.get(), got: pi.dim().get() }.into());
        }
        Self::from_fn(self.d, |s| self.value(pi.image(s)))
    }

    /// Pointwise sum `v + v'`.
    pub fn plus(&self, other: &Self) -> Result<Self, GameError> {
        if other.d != self.d {
            return Err(CoordError::DimensionMismatch { expected: self.d.get(), got: other.d.get() }.into());
        }
        Self::new(self.d, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    /// Largest absolute coalition value; used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Whether `N` is a carrier: `v(S) = v(S ∩ N)` for every `S`.
    pub fn is_carrier(&self, n: Subset) -> bool {
        let nm = n.mask() as usize;
        (0..self.values.len()).all(|s| self.values[s] == self.values[s & nm])
    }

    /// Parses the JSON game format:
    /// `{"d": 2, "values": {"1": 1, "2": 2, "1,2": 4}}`.
    ///
    /// Keys are comma-separated 1-based player lists; `""` is ∅ and defaults to 0.
    pub fn from_json(text: &str) -> Result<Self, GameError> {
        let raw: GameJson = serde_json::from_str(text)?;
        let d = Dimension::new(raw.d)?;
        d.ensure_at_most(SUBSET_CAP, "dense games")?;
        let mut values: Vec<Option<f64>> = vec![None; d.subset_count()];
        for (key, value) in &raw.values {
            let s = Subset::parse_one_based(key, ',', d)?;
            let slot = &mut values[s.mask() as usize];
            if slot.is_some() {
                return Err(GameError::DuplicateCoalition(s.to_one_based(",")));
            }
            *slot = Some(*value);
        }
        let empty = values[0].unwrap_or(0.0);
        if empty != 0.0 {
            return Err(GameError::NonZeroEmpty(empty));
        }
        values[0] = Some(0.0);
        let mut dense = Vec::with_capacity(values.len());
        for (mask, v) in values.into_iter().enumerate() {
            match v {
                Some(v) => dense.push(v),
                None => {
                    let s = Subset::from_mask(mask as u64, d)?;
                    return Err(GameError::MissingCoalition(s.to_one_based(",")));
                }
            }
        }
        Self::new(d, dense)
    }

    pub fn to_json(&self) -> String {
        let values = Subset::all(self.d)
            .map(|s| (s.to_one_based(","), self.value(s)))
            .collect();
        serde_json::to_string(&GameJson { d: self.d.get(), values }).expect("game serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct GameJson {
    d: usize,
    values: BTreeMap<String, f64>,
}

/// Per-player shares of a game's payoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub shares: Vec<f64>,
}

impl Allocation {
    pub fn total(&self) -> f64 {
        self.shares.iter().sum()
    }

    /// `|v(U) - Σ φ_i|`.
    pub fn efficiency_residual(&self, v: &Game) -> f64 {
        (v.grand_value() - self.total()).abs()
    }
}

/// The Shapley value via the subset formula: for each player `i`,
/// `φ_i = Σ_{S ∋ i} (|S|-1)!(d-|S|)!/d! · (v(S) - v(S∖{i}))`.
pub fn shapley(v: &Game) -> Allocation {
    Allocation { shares: subset_shapley(v.dim().get(), v.values()) }
}

/// Subset-formula Shapley sum over a mask-indexed table. Table entry 0 may be
/// non-zero; it cancels in every marginal difference.
pub(crate) fn subset_shapley(d: usize, table: &[f64]) -> Vec<f64> {
    let weights = shapley_weights(d);
    (0..d)
        .map(|i| {
            let bit = 1usize << i;
            let mut acc = 0.0;
            for s in 0..table.len() {
                if s & bit != 0 {
                    acc += weights[s.count_ones() as usize] * (table[s] - table[s ^ bit]);
                }
            }
            acc
        })
        .collect()
}

/// Shapley value by averaging marginal contributions over all d! orderings.
///
/// Independent of [`shapley`]; used as its oracle.
pub fn shapley_permutation_oracle(v: &Game) -> Result<Allocation, GameError> {
    let d = v.dim().ensure_at_most(PERMUTATION_CAP, "permutation enumeration")?.get();
    Ok(Allocation { shares: permutation_average(d, v.values()) })
}

pub(crate) fn permutation_average(d: usize, table: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; d];
    let mut count = 0u64;
    for_each_permutation(d, |order| {
        let mut mask = 0usize;
        for &player in order {
            let next = mask | 1 << player;
            sums[player] += table[next] - table[mask];
            mask = next;
        }
        count += 1;
    });
    sums.into_iter().map(|s| s / count as f64).collect()
}

/// The game `v(S) = F(χ(S))` of a function on binary points with `F(0) = 0`.
pub fn game_from_binary_function(f: &FunctionHandle) -> Result<Game, GameError> {
    let d = f.dim();
    d.ensure_at_most(SUBSET_CAP, "dense games")?;
    let origin = f.eval(&Point::zeros(d))?;
    if origin != 0.0 {
        return Err(GameError::NonZeroEmpty(origin));
    }
    let mut values = Vec::with_capacity(d.subset_count());
    for s in Subset::all(d) {
        values.push(f.eval(&Point::indicator(s))?);
    }
    values[0] = 0.0;
    Game::new(d, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::Permutation;
    use crate::expr::parse;
    use proptest::prelude::*;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn two_player() -> Game {
        Game::new(dim(2), vec![0.0, 1.0, 2.0, 4.0]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
    }

    #[test]
    fn two_player_example() {
        let v = two_player();
        assert_eq!(shapley(&v).shares, vec![1.5, 2.5]);
        assert_eq!(shapley_permutation_oracle(&v).unwrap().shares, vec![1.5, 2.5]);
    }

    #[test]
    fn additive_and_symmetric_games() {
        let v = Game::additive(&[1.0, -2.0, 3.5, 0.25]).unwrap();
        assert!(close(&shapley(&v).shares, &[1.0, -2.0, 3.5, 0.25], 1e-14));
        assert!(close(&shapley_permutation_oracle(&v).unwrap().shares, &[1.0, -2.0, 3.5, 0.25], 1e-14));

        let g = [0.0, 1.0, 5.0, 2.0, 9.0];
        let v = Game::from_fn(dim(4), |s| g[s.cardinality()]).unwrap();
        for share in shapley(&v).shares {
            assert!((share - 9.0 / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unanimity_and_zero_games() {
        for d in 1..=6 {
            let v = Game::unanimity(Subset::full(dim(d))).unwrap();
            let oracle = shapley_permutation_oracle(&v).unwrap();
            assert!(close(&oracle.shares, &vec![1.0 / d as f64; d], 1e-14));
            assert!(close(&shapley(&v).shares, &oracle.shares, 1e-14));
        }
        let zero = Game::from_fn(dim(3), |_| 0.0).unwrap();
        assert_eq!(shapley_permutation_oracle(&zero).unwrap().shares, vec![0.0; 3]);
        assert_eq!(shapley(&zero).shares, vec![0.0; 3]);
    }

    #[test]
    fn oracle_cap() {
        let v = Game::from_fn(dim(11), |s| s.cardinality() as f64).unwrap();
        assert!(matches!(shapley_permutation_oracle(&v), Err(GameError::Coord(CoordError::AboveCap { .. }))));
    }

    #[test]
    fn from_binary_function() {
        let f = parse("x1*x2", dim(2)).unwrap().into_handle();
        let v = game_from_binary_function(&f).unwrap();
        assert_eq!(v.values(), &[0.0, 0.0, 0.0, 1.0]);

        let f = parse("x1+x2+x3", dim(3)).unwrap().into_handle();
        assert_eq!(game_from_binary_function(&f).unwrap(), Game::additive(&[1.0, 1.0, 1.0]).unwrap());

        let f = parse("x1 + 0.5", dim(1)).unwrap().into_handle();
        assert!(matches!(game_from_binary_function(&f), Err(GameError::NonZeroEmpty(v)) if v == 0.5));
    }

    #[test]
    fn json_format() {
        let v = Game::from_json(r#"{"d": 2, "values": {"1": 1, "2": 2, "1,2": 4}}"#).unwrap();
        assert_eq!(v, two_player());
        let v2 = Game::from_json(&v.to_json()).unwrap();
        assert_eq!(v, v2);

        let missing = Game::from_json(r#"{"d": 2, "values": {"1": 1, "1,2": 4}}"#);
        assert!(matches!(missing, Err(GameError::MissingCoalition(s)) if s == "2"));
        let nonzero = Game::from_json(r#"{"d": 1, "values": {"": 0.1, "1": 4}}"#);
        assert!(matches!(nonzero, Err(GameError::NonZeroEmpty(_))));
        let dup = Game::from_json(r#"{"d": 2, "values": {"1": 1, "2": 1, "1,2": 4, "2,1": 4}}"#);
        assert!(matches!(dup, Err(GameError::DuplicateCoalition(_))));
        let bad = Game::from_json(r#"{"d": 2, "values": {"1": 1, "2": 1, "1,3": 4}}"#);
        assert!(matches!(bad, Err(GameError::Coord(_))));
    }

    #[test]
    fn carrier_detection() {
        // v(S) depends only on S ∩ {1,2}
        let v = Game::from_fn(dim(3), |s| {
            let a = s.contains(0) as u8 as f64;
            let b = s.contains(1) as u8 as f64;
            2.0 * a + b + 3.0 * a * b
        })
        .unwrap();
        let n = Subset::from_indices(&[0, 1], dim(3)).unwrap();
        assert!(v.is_carrier(n));
        assert!(!v.is_carrier(Subset::from_indices(&[0], dim(3)).unwrap()));
        let phi = shapley_permutation_oracle(&v).unwrap().shares;
        assert!((phi[0] + phi[1] - v.value(n)).abs() < 1e-14);
        assert_eq!(phi[2], 0.0);
    }

    fn game_of(d: usize) -> impl Strategy<Value = Game> {
        prop::collection::vec(-10.0..10.0f64, 1 << d).prop_map(move |mut vals| {
            vals[0] = 0.0;
            Game::new(Dimension::new(d).unwrap(), vals).unwrap()
        })
    }

    fn game_strategy() -> impl Strategy<Value = Game> {
        (1usize..=6).prop_flat_map(game_of)
    }

    fn game_pair() -> impl Strategy<Value = (Game, Game)> {
        (1usize..=6).prop_flat_map(|d| (game_of(d), game_of(d)))
    }

    proptest! {
        #[test]
        fn efficiency(v in game_strategy()) {
            let phi = shapley(&v);
            prop_assert!(phi.efficiency_residual(&v) <= 1e-12 * (1.0 + v.scale()));
        }

        #[test]
        fn symmetry(v in game_strategy(), seed in any::<u64>()) {
            let d = v.dim().get();
            let mut map: Vec<usize> = (0..d).collect();
            // deterministic shuffle from the seed
            let mut s = seed;
            for i in (1..d).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                map.swap(i, (s >> 33) as usize % (i + 1));
            }
            let pi = Permutation::new(map).unwrap();
            let lhs = shapley(&v.permuted(&pi).unwrap()).shares;
            let rhs = shapley(&v).shares;
            for i in 0..d {
                prop_assert!((lhs[i] - rhs[pi.apply(i)]).abs() <= 1e-12 * (1.0 + v.scale()));
            }
        }

        #[test]
        fn null_player_and_additivity((v, w) in game_pair()) {
            let sum = shapley(&v.plus(&w).unwrap()).shares;
            let parts: Vec<f64> = shapley(&v).shares.iter().zip(shapley(&w).shares).map(|(a, b)| a + b).collect();
            prop_assert!(close(&sum, &parts, 1e-12 * (1.0 + v.scale() + w.scale())));

            // player 0 made null
            let d = v.dim();
            let nulled = Game::from_fn(d, |s| v.value(s.remove(0))).unwrap();
            prop_assert!(shapley(&nulled).shares[0].abs() <= 1e-12 * (1.0 + v.scale()));
        }

        #[test]
        fn oracle_agrees(v in game_strategy()) {
            let exact = shapley(&v).shares;
            let oracle = shapley_permutation_oracle(&v).unwrap().shares;
            prop_assert!(close(&exact, &oracle, 1e-12 * (1.0 + v.scale())));
        }
    }
}
