//! Coordinate-level building blocks shared by every other module: points,
//! index subsets, permutations, and the operations that act on points
//! (projection, Hadamard product, permutation action, prefix indicators).
//!
//! Indices are 0-based internally. The 1-based notation used by users and
//! file formats is converted only through [`Subset::parse_one_based`],
//! [`Subset::to_one_based`], [`Permutation::from_one_based`] and
//! [`Permutation::to_one_based`].

use std::fmt;

use thiserror::Error;

/// Largest dimension any type in this crate can represent (subset masks are `u64`).
pub const MAX_DIM: usize = 64;
/// Largest dimension accepted by the exact subset-sum methods (2^20 evaluations).
pub const SUBSET_CAP: usize = 20;
/// Largest dimension accepted by exact enumeration of all d! orderings.
pub const PERMUTATION_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoordError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} out of range 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("dimension {d} exceeds the cap {cap} for {what}")]
    AboveCap { d: usize, cap: usize, what: &'static str },
    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("index {index} out of range for dimension {d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("not a permutation of 1..={d}: {detail}")]
    NotAPermutation { d: usize, detail: String },
    #[error("cannot parse index list {text:?}: {detail}")]
    BadIndexList { text: String, detail: String },
}

/// Number of arguments of a function, or players of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self, CoordError> {
        if d == 0 || d > MAX_DIM {
            return Err(CoordError::BadDimension(d));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Fails when `self` exceeds `cap`; `what` names the method in the error.
    pub fn ensure_at_most(self, cap: usize, what: &'static str) -> Result<Self, CoordError> {
        if self.0 > cap {
            return Err(CoordError::AboveCap { d: self.0, cap, what });
        }
        Ok(self)
    }

    /// Number of subsets, 2^d. Only meaningful below [`SUBSET_CAP`]-sized dims.
    pub fn subset_count(self) -> usize {
        1usize << self.0
    }

    pub fn full_mask(self) -> u64 {
        if self.0 == 64 {
            u64::MAX
        } else {
            (1u64 << self.0) - 1
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vector of finite real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Rejects empty vectors and non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self, CoordError> {
        Dimension::new(coords.len())?;
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CoordError::NonFinite { index, value });
        }
        Ok(Self(coords))
    }

    pub fn zeros(d: Dimension) -> Self {
        Self(vec![0.0; d.get()])
    }

    pub fn ones(d: Dimension) -> Self {
        Self(vec![1.0; d.get()])
    }

    /// Binary indicator vector of a subset (the encoding χ(S)).
    pub fn indicator(s: Subset) -> Self {
        Self((0..s.dim().get()).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect())
    }

    pub fn dim(&self) -> Dimension {
        Dimension(self.0.len())
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    fn check_dim(&self, d: usize) -> Result<(), CoordError> {
        if self.0.len() != d {
            return Err(CoordError::DimensionMismatch { expected: self.0.len(), got: d });
        }
        Ok(())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A subset of `{0, …, d-1}` stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    mask: u64,
    d: Dimension,
}

impl Subset {
    pub fn from_mask(mask: u64, d: Dimension) -> Result<Self, CoordError> {
        if mask & !d.full_mask() != 0 {
            return Err(CoordError::IndexOutOfRange {
                index: 63 - mask.leading_zeros() as usize,
                d: d.get(),
            });
        }
        Ok(Self { mask, d })
    }

    pub fn empty(d: Dimension) -> Self {
        Self { mask: 0, d }
    }

    pub fn full(d: Dimension) -> Self {
        Self { mask: d.full_mask(), d }
    }

    /// Builds a subset from 0-based indices.
    pub fn from_indices(indices: &[usize], d: Dimension) -> Result<Self, CoordError> {
        let mut mask = 0u64;
        for &i in indices {
            if i >= d.get() {
                return Err(CoordError::IndexOutOfRange { index: i, d: d.get() });
            }
            mask |= 1 << i;
        }
        Ok(Self { mask, d })
    }

    /// Parses a list of 1-based indices separated by `sep`; the empty string is ∅.
    /// Duplicates are rejected.
    pub fn parse_one_based(text: &str, sep: char, d: Dimension) -> Result<Self, CoordError> {
        let bad = |detail: String| CoordError::BadIndexList { text: text.to_string(), detail };
        let trimmed = text.trim();
        let mut mask = 0u64;
        if trimmed.is_empty() {
            return Ok(Self { mask, d });
        }
        for part in trimmed.split(sep) {
            let idx: usize = part
                .trim()
                .parse()
                .map_err(|_| bad(format!("{:?} is not a positive integer", part.trim())))?;
            if idx == 0 || idx > d.get() {
                return Err(bad(format!("index {idx} outside 1..={d}")));
            }
            let bit = 1u64 << (idx - 1);
            if mask & bit != 0 {
                return Err(bad(format!("index {idx} repeated")));
            }
            mask |= bit;
        }
        Ok(Self { mask, d })
    }

    /// 1-based indices joined by `sep`; ∅ is the empty string.
    pub fn to_one_based(&self, sep: &str) -> String {
        self.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(sep)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn cardinality(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 64 && self.mask & (1 << i) != 0
    }

    pub fn insert(self, i: usize) -> Self {
        Self { mask: self.mask | (1 << i), ..self }
    }

    pub fn remove(self, i: usize) -> Self {
        Self { mask: self.mask & !(1 << i), ..self }
    }

    pub fn intersect(self, other: Self) -> Self {
        Self { mask: self.mask & other.mask, ..self }
    }

    pub fn complement(self) -> Self {
        Self { mask: !self.mask & self.d.full_mask(), ..self }
    }

    /// Ascending 0-based member indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask;
        (0..self.d.get()).filter(move |&i| mask & (1 << i) != 0)
    }

    /// All 2^d subsets in mask order.
    pub fn all(d: Dimension) -> impl Iterator<Item = Subset> {
        (0..=d.full_mask()).map(move |mask| Subset { mask, d })
    }
}

/// A bijection of `{0, …, d-1}`.
///
/// Acting on a point, `permute(x, π)_i = x_{π(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: Dimension) -> Self {
        Self((0..d.get()).collect())
    }

    /// From a 0-based image list.
    pub fn new(map: Vec<usize>) -> Result<Self, CoordError> {
        let d = map.len();
        Dimension::new(d)?;
        let mut seen = vec![false; d];
        for &m in &map {
            if m >= d {
                return Err(CoordError::NotAPermutation { d, detail: format!("image {} out of range", m + 1) });
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(CoordError::NotAPermutation { d, detail: format!("image {} repeated", m + 1) });
            }
        }
        Ok(Self(map))
    }

    pub fn from_one_based(map: &[usize]) -> Result<Self, CoordError> {
        if map.contains(&0) {
            return Err(CoordError::NotAPermutation { d: map.len(), detail: "index 0 in 1-based list".into() });
        }
        Self::new(map.iter().map(|&m| m - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&m| m + 1).collect()
    }

    pub fn dim(&self) -> Dimension {
        Dimension(self.0.len())
    }

    /// π(i), 0-based.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &m) in self.0.iter().enumerate() {
            inv[m] = i;
        }
        Self(inv)
    }

    /// The permutation whose point action is `self` applied after `other`:
    /// `permute(x, π.compose(σ)) == permute(permute(x, σ), π)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.iter().map(|&m| other.0[m]).collect())
    }

    /// Set action: `π(S) = {π(i) : i ∈ S}`.
    pub fn image(&self, s: Subset) -> Subset {
        let mask = s.iter().fold(0u64, |m, i| m | 1 << self.0[i]);
        Subset { mask, d: s.d }
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &m)| i == m)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_one_based().iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `p_I(x)`: keeps the coordinates in `I`, zeroes the rest.
pub fn project(x: &Point, i: Subset) -> Result<Point, CoordError> {
    x.check_dim(i.dim().get())?;
    Ok(Point(project_raw(x.coords(), i.mask())))
}

/// Mask-level projection without dimension checks. Zeroed coordinates are `+0.0`.
pub(crate) fn project_raw(x: &[f64], mask: u64) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if mask & (1 << i) != 0 { v } else { 0.0 })
        .collect()
}

/// Componentwise product `x ∗ y`.
pub fn hadamard(x: &Point, y: &Point) -> Result<Point, CoordError> {
    x.check_dim(y.0.len())?;
    Ok(Point(x.0.iter().zip(&y.0).map(|(a, b)| a * b).collect()))
}

/// `π(x)_i = x_{π(i)}`.
pub fn permute(x: &Point, pi: &Permutation) -> Result<Point, CoordError> {
    x.check_dim(pi.0.len())?;
    Ok(Point(permute_raw(x.coords(), pi)))
}

pub(crate) fn permute_raw(x: &[f64], pi: &Permutation) -> Vec<f64> {
    pi.0.iter().map(|&m| x[m]).collect()
}

/// `e^i`: ones at the first `i` positions, zeros after (`e^0 = 0`, `e^d = 1`).
pub fn prefix_indicator(i: usize, d: Dimension) -> Result<Point, CoordError> {
    if i > d.get() {
        return Err(CoordError::IndexOutOfRange { index: i, d: d.get() });
    }
    Ok(Point((0..d.get()).map(|k| if k < i { 1.0 } else { 0.0 }).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn project_examples() {
        let x = pt(&[3.0, -2.0, 5.0]);
        let i = Subset::parse_one_based("1,3", ',', dim(3)).unwrap();
        assert_eq!(project(&x, i).unwrap(), pt(&[3.0, 0.0, 5.0]));
        assert_eq!(project(&x, Subset::full(dim(3))).unwrap(), x);
        assert_eq!(project(&x, Subset::empty(dim(3))).unwrap(), Point::zeros(dim(3)));
        assert!(matches!(
            project(&x, Subset::full(dim(2))),
            Err(CoordError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(hadamard(&pt(&[1.0, 2.0]), &pt(&[3.0, 4.0])).unwrap(), pt(&[3.0, 8.0]));
        let x = pt(&[1.5, -2.0, 0.25]);
        assert_eq!(hadamard(&x, &Point::ones(dim(3))).unwrap(), x);
        let s = Subset::from_indices(&[0, 2], dim(3)).unwrap();
        assert_eq!(hadamard(&x, &Point::indicator(s)).unwrap(), project(&x, s).unwrap());
        assert!(hadamard(&x, &pt(&[1.0])).is_err());
    }

    #[test]
    fn permute_examples() {
        let pi = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let x = pt(&[7.0, 8.0, 9.0]);
        assert_eq!(permute(&x, &pi).unwrap(), pt(&[8.0, 9.0, 7.0]));
        assert_eq!(permute(&x, &Permutation::identity(dim(3))).unwrap(), x);
        let back = permute(&permute(&x, &pi).unwrap(), &pi.inverse()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn prefix_indicator_examples() {
        assert_eq!(prefix_indicator(0, dim(3)).unwrap(), pt(&[0.0, 0.0, 0.0]));
        assert_eq!(prefix_indicator(2, dim(3)).unwrap(), pt(&[1.0, 1.0, 0.0]));
        assert_eq!(prefix_indicator(3, dim(3)).unwrap(), Point::ones(dim(3)));
        assert!(prefix_indicator(4, dim(3)).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Point::new(vec![1.0, f64::NAN]), Err(CoordError::NonFinite { index: 1, .. })));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
        assert!(Permutation::from_one_based(&[1, 1, 2]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Subset::from_mask(0b100, dim(2)).is_err());
        assert!(Subset::parse_one_based("1,1", ',', dim(2)).is_err());
        assert!(Subset::parse_one_based("3", ',', dim(2)).is_err());
        assert!(dim(12).ensure_at_most(PERMUTATION_CAP, "enumeration").is_err());
    }

    #[test]
    fn one_based_round_trip() {
        let s = Subset::parse_one_based(" 3+1 ", '+', dim(4)).unwrap();
        assert_eq!(s.mask(), 0b101);
        assert_eq!(s.to_one_based("+"), "1+3");
        assert_eq!(Subset::empty(dim(4)).to_one_based("+"), "");
    }

    fn perm_strategy(d: usize) -> impl Strategy<Value = Permutation> {
        Just((0..d).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    fn case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, u64, u64, Permutation)> {
        (1usize..=8).prop_flat_map(|d| {
            (
                prop::collection::vec(-100.0..100.0f64, d),
                prop::collection::vec(-100.0..100.0f64, d),
                0..(1u64 << d),
                0..(1u64 << d),
                perm_strategy(d),
            )
        })
    }

    proptest! {
        #[test]
        fn projections_compose((x, _y, a, b, _pi) in case()) {
            let x = Point::new(x).unwrap();
            let d = x.dim();
            let i = Subset::from_mask(a, d).unwrap();
            let j = Subset::from_mask(b, d).unwrap();
            let lhs = project(&project(&x, i).unwrap(), j).unwrap();
            prop_assert_eq!(lhs, project(&x, i.intersect(j)).unwrap());
        }

        #[test]
        fn permutation_distributes_over_hadamard((x, y, _a, _b, pi) in case()) {
            let x = Point::new(x).unwrap();
            let y = Point::new(y).unwrap();
            let lhs = permute(&hadamard(&x, &y).unwrap(), &pi).unwrap();
            let rhs = hadamard(&permute(&x, &pi).unwrap(), &permute(&y, &pi).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn activation_vector_contains_own_index((_x, _y, _a, _b, pi) in case()) {
            // π(i) is the activation rank of argument i; the activated set at that
            // step is {j : π(j) ≤ π(i)}, which always contains i.
            let d = pi.dim();
            for i in 0..d.get() {
                let c = permute(&prefix_indicator(pi.apply(i) + 1, d).unwrap(), &pi).unwrap();
                prop_assert_eq!(c.coords()[i], 1.0);
                let before = permute(&prefix_indicator(pi.apply(i), d).unwrap(), &pi).unwrap();
                prop_assert_eq!(before.coords()[i], 0.0);
            }
        }

        #[test]
        fn compose_and_inverse((x, _y, _a, _b, pi) in case(), seed in any::<u64>()) {
            let x = Point::new(x).unwrap();
            let d = x.dim().get();
            let mut sigma: Vec<usize> = (0..d).collect();
            sigma.rotate_left((seed as usize) % d);
            let sigma = Permutation::new(sigma).unwrap();
            prop_assert!(pi.compose(&pi.inverse()).is_identity());
            let lhs = permute(&x, &pi.compose(&sigma)).unwrap();
            let rhs = permute(&permute(&x, &sigma).unwrap(), &pi).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
