//! Exact combinatorial weights and permutation enumeration.

/// `n!` for `n ≤ 20` (the largest factorial that fits in 64 bits).
pub fn factorial(n: usize) -> u64 {
    assert!(n <= 20, "factorial({n}) overflows u64");
    (1..=n as u64).product()
}

/// Binomial coefficient `C(n, k)`, exact. Zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // each partial product C(n-k+i, i) is an integer
    (1..=k as u64).fold(1u64, |acc, i| acc * (n as u64 - k as u64 + i) / i)
}

/// The Shapley weight of a coalition of size `s ≥ 1` among `d` players:
/// `(s-1)!(d-s)!/d! = 1 / (d · C(d-1, s-1))`.
///
/// The denominator is an exact integer (≤ 1.9·10⁶ for d ≤ 20), so the weight
/// is a single correctly rounded division.
pub fn shapley_weight(d: usize, s: usize) -> f64 {
    debug_assert!(s >= 1 && s <= d);
    1.0 / (d as u64 * binomial(d - 1, s - 1)) as f64
}

/// Weights indexed by coalition size `0..=d`; entry 0 is unused and zero.
pub fn shapley_weights(d: usize) -> Vec<f64> {
    std::iter::once(0.0).chain((1..=d).map(|s| shapley_weight(d, s))).collect()
}

/// Calls `visit` once for every permutation of `0..d` (Heap's algorithm).
///
/// The slice passed to `visit` lists players in activation order.
pub fn for_each_permutation(d: usize, mut visit: impl FnMut(&[usize])) {
    let mut order: Vec<usize> = (0..d).collect();
    let mut c = vec![0usize; d];
    visit(&order);
    let mut i = 1;
    while i < d {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
