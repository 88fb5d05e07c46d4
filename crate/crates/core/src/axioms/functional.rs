//! A1–A9 on functional decompositions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fmt_vec, AxiomError, AxiomVerdict, Principle, Status, Tracker, Witness};
use crate::coords::{self, Permutation, Point, Subset};
use crate::expr::{linear_combine, CoordinateMap, FunctionHandle};

/// Relative tolerance for deciding that `F` ignores a coordinate.
const DUMMY_TOL: f64 = 1e-13;
/// Relative tolerance for `F(x^n) → F(x)` at the smallest step in A8.
const CONTINUITY_TOL: f64 = 1e-4;
/// Tensor Bernstein approximants cost `(m+1)^d` per evaluation.
const BERNSTEIN_MAX_DIM: usize = 3;

fn inadmissible(axiom: &str, p: &Principle, f: &FunctionHandle, param: String, tol: f64) -> AxiomVerdict {
    AxiomVerdict::without_evidence(
        axiom,
        f.to_string(),
        param,
        Status::Skipped,
        tol,
        format!("F(0) ≠ 0 is outside the domain of {}", p.name()),
    )
}

/// A1: `F = G_1 + ⋯ + G_d`, pass iff `|F(x) − ΣG_i(x)| ≤ tol·(1 + |F(x)|)`.
pub fn check_a1_additivity(p: &Principle, f: &FunctionHandle, points: &[Point], tol: f64) -> Result<AxiomVerdict, AxiomError> {
    if !p.admits(f)? {
        return Ok(inadmissible("A1", p, f, String::new(), tol));
    }
    let mut t = Tracker::new(tol);
    for x in points {
        let g = p.decompose(f, x)?;
        t.compare(g.iter().sum(), f.eval(x)?, || format!("x={x}"));
    }
    Ok(t.finish("A1", f.to_string(), String::new()))
}

/// A2 for `F' = F∘π`, in the index-consistent form `G'_i = G_{π⁻¹(i)}∘π`:
/// argument `i` of `F'` is the argument `π⁻¹(i)` of `F`. For involutions this
/// is `G'_i = G_{π(i)}∘π`.
pub fn check_a2_permutation(
    p: &Principle,
    f: &FunctionHandle,
    pi: &Permutation,
    points: &[Point],
    tol: f64,
) -> Result<AxiomVerdict, AxiomError> {
    let param = format!("pi={pi}");
    if !p.admits(f)? {
        return Ok(inadmissible("A2", p, f, param, tol));
    }
    let fp = f.compose_permutation(pi)?;
    let inv = pi.inverse();
    let mut t = Tracker::new(tol);
    for x in points {
        let gp = p.decompose(&fp, x)?;
        let g = p.decompose(f, &coords::permute(x, pi)?)?;
        for (i, &lhs) in gp.iter().enumerate() {
            t.compare(lhs, g[inv.apply(i)], || format!("x={x} i={}", i + 1));
        }
    }
    Ok(t.finish("A2", f.to_string(), param))
}

/// Coordinates `i` with `F(x) = F(p_{U∖{i}}(x))` on every sample point.
fn dummy_coordinates(f: &FunctionHandle, points: &[Point]) -> Result<Vec<usize>, AxiomError> {
    let d = f.dim();
    let mut dummies = Vec::new();
    'coords: for i in 0..d.get() {
        let keep = Subset::full(d).remove(i);
        for x in points {
            let fx = f.eval(x)?;
            let fp = f.eval(&coords::project(x, keep)?)?;
            if (fx - fp).abs() > DUMMY_TOL * (1.0 + fx.abs()) {
                continue 'coords;
            }
        }
        dummies.push(i);
    }
    Ok(dummies)
}

/// A3 (`G_i` constant) and A6 (`G = G∘p_{U∖{i}}`) for every coordinate `i`
/// that `F` ignores on the sample. Without such a coordinate both verdicts
/// are `partial`: the precondition never holds, so nothing is tested.
pub fn check_a3_a6_dummy(p: &Principle, f: &FunctionHandle, points: &[Point], tol: f64) -> Result<Vec<AxiomVerdict>, AxiomError> {
    if !p.admits(f)? {
        return Ok(vec![
            inadmissible("A3", p, f, String::new(), tol),
            inadmissible("A6", p, f, String::new(), tol),
        ]);
    }
    let dummies = dummy_coordinates(f, points)?;
    if dummies.is_empty() {
        let note = "no dummy coordinate on the sample; precondition never met".to_string();
        return Ok(vec![
            AxiomVerdict::without_evidence("A3", f.to_string(), String::new(), Status::Partial, tol, note.clone()),
            AxiomVerdict::without_evidence("A6", f.to_string(), String::new(), Status::Partial, tol, note),
        ]);
    }
    let d = f.dim();
    let param = format!("dummies={{{}}}", Subset::from_indices(&dummies, d)?.to_one_based(","));
    let g0 = p.decompose(f, &Point::zeros(d))?;
    let mut a3 = Tracker::new(tol);
    let mut a6 = Tracker::new(tol);
    for x in points {
        let g = p.decompose(f, x)?;
        for &i in &dummies {
            a3.compare(g[i], g0[i], || format!("x={x} i={}", i + 1));
            let gp = p.decompose(f, &coords::project(x, Subset::full(d).remove(i))?)?;
            for j in 0..d.get() {
                a6.compare(g[j], gp[j], || format!("x={x} dummy={} j={}", i + 1, j + 1));
            }
        }
    }
    Ok(vec![
        a3.finish("A3", f.to_string(), param.clone()),
        a6.finish("A6", f.to_string(), param),
    ])
}

/// A4 on `F + F'` and A5 on `αF` for each `α` (α = 0 included: it follows
/// from A1, A2 and A6).
pub fn check_a4_a5_linearity(
    p: &Principle,
    f: &FunctionHandle,
    f2: &FunctionHandle,
    alphas: &[f64],
    points: &[Point],
    tol: f64,
) -> Result<Vec<AxiomVerdict>, AxiomError> {
    let a4_param = format!("F'={f2}");
    if !p.admits(f)? || !p.admits(f2)? {
        let mut out = vec![inadmissible("A4", p, f, a4_param, tol)];
        out.extend(alphas.iter().map(|a| inadmissible("A5", p, f, format!("alpha={a}"), tol)));
        return Ok(out);
    }
    let sum = linear_combine(vec![(1.0, f.clone()), (1.0, f2.clone())])?;
    let scaled: Vec<FunctionHandle> = alphas.iter().map(|&a| f.scale(a)).collect();
    let mut a4 = Tracker::new(tol);
    let mut a5: Vec<Tracker> = alphas.iter().map(|_| Tracker::new(tol)).collect();
    for x in points {
        let g = p.decompose(f, x)?;
        let g2 = p.decompose(f2, x)?;
        let gs = p.decompose(&sum, x)?;
        for i in 0..g.len() {
            a4.compare(gs[i], g[i] + g2[i], || format!("x={x} i={}", i + 1));
        }
        for ((&alpha, fa), tr) in alphas.iter().zip(&scaled).zip(&mut a5) {
            let ga = p.decompose(fa, x)?;
            for i in 0..g.len() {
                tr.compare(ga[i], alpha * g[i], || format!("x={x} i={}", i + 1));
            }
        }
    }
    let mut out = vec![a4.finish("A4", f.to_string(), a4_param)];
    for (&alpha, tr) in alphas.iter().zip(a5) {
        let mut v = tr.finish("A5", f.to_string(), format!("alpha={alpha}"));
        if alpha == 0.0 && v.note.is_none() {
            v.note = Some("alpha = 0 is implied by A1, A2, A6".into());
        }
        out.push(v);
    }
    Ok(out)
}

/// `partial` when the deviations never grow by more than `slack`, else
/// `fail` with the offending step as witness.
fn decay_verdict(axiom: &str, function: String, param: String, steps: Vec<Witness>, slack: f64, tol: f64) -> AxiomVerdict {
    let max = steps.iter().map(|w| w.deviation).fold(0.0, f64::max);
    let growth = steps.windows(2).find(|w| w[1].deviation > w[0].deviation + slack || w[1].deviation.is_nan());
    let devs: Vec<String> = steps.iter().map(|w| format!("{:e}", w.deviation)).collect();
    let (status, note) = match growth {
        None => (Status::Partial, format!("deviations {}; a limit cannot be verified from finitely many terms", devs.join(", "))),
        Some(w) => (Status::Fail, format!("deviation grows from {:e} to {:e} at {}", w[0].deviation, w[1].deviation, w[1].input)),
    };
    AxiomVerdict {
        axiom: axiom.into(),
        function,
        parameterization: param,
        status,
        max_deviation: max,
        tolerance: tol,
        witnesses: steps,
        note: Some(note),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// A7 along `F^n = F + c_n·H`. Requires `|c_n|` non-increasing and shrinking
/// (or identically zero); otherwise the sequence need not converge and the
/// verdict is `skipped`.
pub fn check_a7_sequence(
    p: &Principle,
    f: &FunctionHandle,
    h: &FunctionHandle,
    cs: &[f64],
    points: &[Point],
    tol: f64,
) -> Result<AxiomVerdict, AxiomError> {
    let param = format!("F+c_n*H, H={h}, c_n={}", fmt_vec(cs));
    if !p.admits(f)? || !p.admits(h)? {
        return Ok(inadmissible("A7", p, f, param, tol));
    }
    let abs: Vec<f64> = cs.iter().map(|c| c.abs()).collect();
    let shrinking = abs.windows(2).all(|w| w[1] <= w[0]) && abs.len() >= 2 && (abs[abs.len() - 1] < abs[0] || abs[0] == 0.0);
    if !shrinking {
        return Ok(AxiomVerdict::without_evidence(
            "A7",
            f.to_string(),
            param,
            Status::Skipped,
            tol,
            "c_n does not tend to 0; the sequence need not converge".into(),
        ));
    }
    let base: Vec<Vec<f64>> = points.iter().map(|x| p.decompose(f, x)).collect::<Result<_, _>>()?;
    let scale = base.iter().map(|g| max_abs(g)).fold(0.0, f64::max);
    let mut steps = Vec::new();
    for &c in cs {
        let fc = linear_combine(vec![(1.0, f.clone()), (c, h.clone())])?;
        let mut dev: f64 = 0.0;
        for (x, g) in points.iter().zip(&base) {
            dev = dev.max(max_abs_diff(&p.decompose(&fc, x)?, g));
        }
        steps.push(Witness { input: format!("c_n={c}"), deviation: dev });
    }
    Ok(decay_verdict("A7", f.to_string(), param, steps, tol * (1.0 + scale), tol))
}

/// One approximant in a Bernstein schedule: tensor Bernstein polynomial of
/// `degree` in each coordinate on the box `[−radius, radius]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinStep {
    pub radius: f64,
    pub degree: usize,
}

fn bernstein_basis(m: usize, u: f64) -> Vec<f64> {
    let mut binom = 1.0;
    (0..=m)
        .map(|k| {
            if k > 0 {
                binom = binom * (m + 1 - k) as f64 / k as f64;
            }
            binom * u.powi(k as i32) * (1.0 - u).powi((m - k) as i32)
        })
        .collect()
}

fn bernstein_approximant(f: &FunctionHandle, step: BernsteinStep) -> Result<FunctionHandle, AxiomError> {
    let d = f.dim().get();
    let (r, m) = (step.radius, step.degree);
    let n = (m + 1).pow(d as u32);
    let mut grid = Vec::with_capacity(n);
    let mut t = vec![0.0; d];
    for idx in 0..n {
        let mut rest = idx;
        for ti in t.iter_mut() {
            *ti = -r + 2.0 * r * (rest % (m + 1)) as f64 / m as f64;
            rest /= m + 1;
        }
        grid.push(f.eval_raw(&t)?);
    }
    let eval = move |x: &[f64]| {
        let basis: Vec<Vec<f64>> = x.iter().map(|&xi| bernstein_basis(m, (xi + r) / (2.0 * r))).collect();
        let mut acc = 0.0;
        for (idx, g) in grid.iter().enumerate() {
            let mut rest = idx;
            let mut w = *g;
            for b in &basis {
                w *= b[rest % (m + 1)];
                rest /= m + 1;
            }
            acc += w;
        }
        acc
    };
    let b0 = eval(&vec![0.0; d]);
    let f0 = f.eval_raw(&vec![0.0; d])?;
    let name = format!("bernstein(R={r}, m={m})");
    Ok(FunctionHandle::native(name, f.dim(), move |x| eval(x) - b0 + f0))
}

/// A7 along tensor Bernstein approximants `B_n F − B_n F(0) + F(0)` on
/// growing boxes, compared at the sample points inside the smallest box.
pub fn check_a7_bernstein(
    p: &Principle,
    f: &FunctionHandle,
    schedule: &[BernsteinStep],
    points: &[Point],
    tol: f64,
) -> Result<AxiomVerdict, AxiomError> {
    let steps_txt: Vec<String> = schedule.iter().map(|s| format!("(R={}, m={})", s.radius, s.degree)).collect();
    let param = format!("bernstein {}", steps_txt.join(" "));
    let skip = |note: &str| AxiomVerdict::without_evidence("A7", f.to_string(), param.clone(), Status::Skipped, tol, note.into());
    if !p.admits(f)? {
        return Ok(inadmissible("A7", p, f, param, tol));
    }
    if f.dim().get() > BERNSTEIN_MAX_DIM {
        return Ok(skip("dimension too large for tensor approximants"));
    }
    if schedule.len() < 2 || schedule.iter().any(|s| !(s.radius > 0.0) || s.degree == 0) {
        return Ok(skip("need at least two steps with positive radius and degree"));
    }
    let inner = schedule.iter().map(|s| s.radius).fold(f64::INFINITY, f64::min);
    let inside: Vec<&Point> = points.iter().filter(|x| x.coords().iter().all(|c| c.abs() <= inner)).collect();
    if inside.is_empty() {
        return Ok(skip("no sample point inside the smallest box"));
    }
    let base: Vec<Vec<f64>> = inside.iter().map(|x| p.decompose(f, x)).collect::<Result<_, _>>()?;
    let scale = base.iter().map(|g| max_abs(g)).fold(0.0, f64::max);
    let mut steps = Vec::new();
    for &s in schedule {
        let fb = bernstein_approximant(f, s)?;
        let mut dev: f64 = 0.0;
        for (x, g) in inside.iter().zip(&base) {
            dev = dev.max(max_abs_diff(&p.decompose(&fb, x)?, g));
        }
        steps.push(Witness { input: format!("R={} m={}", s.radius, s.degree), deviation: dev });
    }
    Ok(decay_verdict("A7", f.to_string(), param, steps, tol * (1.0 + scale), tol))
}

/// A8 at `x` along `x + δ_n·u` for `directions` random `u ∈ [−1, 1]^d`.
///
/// Skipped unless `F` looks continuous at every `p_I(x)` along the same
/// directions: the decomposition evaluates `F` there, so a jump at any
/// projection legitimately propagates to `G`.
pub fn check_a8_continuity(
    p: &Principle,
    f: &FunctionHandle,
    x: &Point,
    deltas: &[f64],
    directions: usize,
    seed: u64,
    tol: f64,
) -> Result<AxiomVerdict, AxiomError> {
    let param = format!("x={x} deltas={} directions={directions}", fmt_vec(deltas));
    if !p.admits(f)? {
        return Ok(inadmissible("A8", p, f, param, tol));
    }
    let d = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Vec<f64>> = (0..directions)
        .map(|_| (0..d.get()).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let moved = |delta: f64, u: &[f64]| -> Result<Point, AxiomError> {
        Ok(Point::new(x.coords().iter().zip(u).map(|(a, b)| a + delta * b).collect())?)
    };
    if let Some(&smallest) = deltas.iter().min_by(|a, b| a.abs().total_cmp(&b.abs())) {
        for s in Subset::all(d) {
            let fx = f.eval(&coords::project(x, s)?)?;
            for u in &dirs {
                let fy = f.eval(&coords::project(&moved(smallest, u)?, s)?)?;
                if (fy - fx).abs() > CONTINUITY_TOL * (1.0 + fx.abs()) {
                    return Ok(AxiomVerdict::without_evidence(
                        "A8",
                        f.to_string(),
                        param,
                        Status::Skipped,
                        tol,
                        format!("F appears discontinuous at p_I(x) for I={{{}}}", s.to_one_based(",")),
                    ));
                }
            }
        }
    }
    let g = p.decompose(f, x)?;
    let mut steps = Vec::new();
    for &delta in deltas {
        let mut dev: f64 = 0.0;
        for u in &dirs {
            dev = dev.max(max_abs_diff(&p.decompose(f, &moved(delta, u)?)?, &g));
        }
        steps.push(Witness { input: format!("delta={delta}"), deviation: dev });
    }
    Ok(decay_verdict("A8", f.to_string(), param, steps, tol * (1.0 + max_abs(&g)), tol))
}

/// A9: `δ(F(h_1, …, h_d))(x) = δ(F)(h_1(x_1), …, h_d(x_d))`.
pub fn check_a9_reparameterization(
    p: &Principle,
    f: &FunctionHandle,
    maps: &[CoordinateMap],
    points: &[Point],
    tol: f64,
) -> Result<AxiomVerdict, AxiomError> {
    let hs: Vec<String> = maps.iter().map(|h| h.to_string()).collect();
    let param = format!("h=[{}]", hs.join("; "));
    if !p.admits(f)? {
        return Ok(inadmissible("A9", p, f, param, tol));
    }
    let fh = f.compose_coordinate_maps(maps.to_vec())?;
    let mut t = Tracker::new(tol);
    for x in points {
        let gh = p.decompose(&fh, x)?;
        let hx = Point::new(x.coords().iter().zip(maps).map(|(&c, h)| h.apply(c)).collect())?;
        let g = p.decompose(f, &hx)?;
        for i in 0..g.len() {
            t.compare(gh[i], g[i], || format!("x={x} i={}", i + 1));
        }
    }
    Ok(t.finish("A9", f.to_string(), param))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::Dimension;
    use crate::expr::parse;

    fn handle(text: &str, d: usize) -> FunctionHandle {
        parse(text, Dimension::new(d).unwrap()).unwrap().into_handle()
    }

    fn pts(d: usize, n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap())
            .collect()
    }

    fn perm(one_based: &[usize]) -> Permutation {
        Permutation::from_one_based(one_based).unwrap()
    }

    #[test]
    fn a1_examples() {
        let f = handle("(x1+2)*(x2+3) - 6", 2);
        let v = check_a1_additivity(&Principle::DeltaStar, &f, &pts(2, 100, 1), 1e-9).unwrap();
        assert_eq!(v.status, Status::Pass);

        let c = handle("7", 3);
        let x = Point::new(vec![1.0, -2.0, 5.0]).unwrap();
        assert_eq!(Principle::DeltaStar.decompose(&c, &x).unwrap(), vec![7.0 / 3.0; 3]);
        assert_eq!(check_a1_additivity(&Principle::DeltaStar, &c, &pts(3, 10, 2), 1e-9).unwrap().status, Status::Pass);

        let v = check_a1_additivity(&Principle::DropLast, &handle("x1 + x2", 2), &pts(2, 10, 3), 1e-9).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(!v.witnesses.is_empty());
    }

    #[test]
    fn a2_examples() {
        let p = pts(3, 20, 4);
        let f = handle("x1^2 * x2", 2);
        let v = check_a2_permutation(&Principle::AsSubset, &f, &perm(&[2, 1]), &p[..0], 1e-10).unwrap();
        assert_eq!(v.status, Status::Pass);
        let v = check_a2_permutation(&Principle::AsSubset, &f, &perm(&[2, 1]), &pts(2, 20, 5), 1e-10).unwrap();
        assert_eq!(v.status, Status::Pass);

        let g = handle("x1*x2^2*x3^3 + x1", 3);
        for pi in [[2, 3, 1], [3, 1, 2], [1, 3, 2]] {
            let v = check_a2_permutation(&Principle::DeltaStar, &g, &perm(&pi), &p, 1e-10).unwrap();
            assert_eq!(v.status, Status::Pass, "{v:?}");
        }

        let seq = Principle::Sequential(None);
        let v = check_a2_permutation(&seq, &handle("x1*x2", 2), &perm(&[2, 1]), &pts(2, 10, 6), 1e-9).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(!v.witnesses.is_empty());
        let v = check_a2_permutation(&Principle::FirstTakesAll, &g, &perm(&[2, 3, 1]), &p, 1e-9).unwrap();
        assert_eq!(v.status, Status::Fail);
    }

    #[test]
    fn a2_literal_index_form_fails_for_three_cycles() {
        // guards the choice of π⁻¹(i): the literal π(i) index disagrees with δ*
        let f = handle("x1*x2^2*x3^3 + x1", 3);
        let pi = perm(&[2, 3, 1]);
        let x = Point::new(vec![1.5, -0.5, 2.0]).unwrap();
        let gp = Principle::DeltaStar.decompose(&f.compose_permutation(&pi).unwrap(), &x).unwrap();
        let g = Principle::DeltaStar.decompose(&f, &coords::permute(&x, &pi).unwrap()).unwrap();
        let literal = (0..3).map(|i| (gp[i] - g[pi.apply(i)]).abs()).fold(0.0, f64::max);
        assert!(literal > 1e-3);
    }

    #[test]
    fn a3_a6_examples() {
        let p = pts(2, 20, 7);
        let v = check_a3_a6_dummy(&Principle::DeltaStar, &handle("x1 + 1", 2), &p, 1e-9).unwrap();
        assert!(v.iter().all(|v| v.status == Status::Pass), "{v:?}");
        assert_eq!(v[0].parameterization, "dummies={2}");
        let x = Point::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(Principle::DeltaStar.decompose(&handle("x1 + 1", 2), &x).unwrap()[1], 0.5);

        let v = check_a3_a6_dummy(&Principle::DeltaStar, &handle("5", 2), &p, 1e-9).unwrap();
        assert_eq!(v[0].parameterization, "dummies={1,2}");
        assert!(v.iter().all(|v| v.status == Status::Pass));

        let v = check_a3_a6_dummy(&Principle::DeltaStar, &handle("x1*x2", 2), &p, 1e-9).unwrap();
        assert!(v.iter().all(|v| v.status == Status::Partial && v.note.is_some()));

        let v = check_a3_a6_dummy(&Principle::FirstTakesAll, &handle("x2", 2), &p, 1e-9).unwrap();
        assert_eq!(v[0].status, Status::Fail);
    }

    #[test]
    fn a4_a5_examples() {
        let p = pts(2, 20, 8);
        let f = handle("x1*x2", 2);
        let v = check_a4_a5_linearity(&Principle::DeltaStar, &f, &handle("x1", 2), &[-2.5, 0.0], &p, 1e-10).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|v| v.status == Status::Pass), "{v:?}");
        let zero = Principle::DeltaStar.decompose(&f.scale(0.0), &p[0]).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);
        let cancel = linear_combine(vec![(1.0, f.clone()), (1.0, f.scale(-1.0))]).unwrap();
        assert_eq!(Principle::AsSubset.decompose(&cancel, &p[1]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn a7_examples() {
        let p = pts(2, 10, 9);
        let f = handle("x1*x2", 2);
        let h = handle("x1", 2);
        let cs = [1.0, 0.1, 0.01, 0.001];
        let v = check_a7_sequence(&Principle::DeltaStar, &f, &h, &cs, &p, 1e-9).unwrap();
        assert_eq!(v.status, Status::Partial);
        // deviation = c_n · max|δ(H)| = c_n · max|x1|
        let hmax = p.iter().map(|x| x.coords()[0].abs()).fold(0.0, f64::max);
        for (w, c) in v.witnesses.iter().zip(cs) {
            assert!((w.deviation - c * hmax).abs() < 1e-12);
        }
        let v = check_a7_sequence(&Principle::DeltaStar, &f, &h, &[0.0, 0.0], &p, 1e-9).unwrap();
        assert_eq!(v.status, Status::Partial);
        assert_eq!(v.max_deviation, 0.0);
        let v = check_a7_sequence(&Principle::DeltaStar, &f, &h, &[1.0, 1.0, 1.0], &p, 1e-9).unwrap();
        assert_eq!(v.status, Status::Skipped);
    }

    #[test]
    fn a7_bernstein_decays() {
        let schedule = [
            BernsteinStep { radius: 2.0, degree: 4 },
            BernsteinStep { radius: 3.0, degree: 16 },
            BernsteinStep { radius: 4.0, degree: 64 },
        ];
        let p: Vec<Point> = pts(2, 20, 10).into_iter().map(|x| Point::new(x.coords().iter().map(|c| c / 2.0).collect()).unwrap()).collect();
        let f = handle("x1^2*x2 + max(x1 - x2, 0)", 2);
        let v = check_a7_bernstein(&Principle::DeltaStar, &f, &schedule, &p, 1e-9).unwrap();
        assert_eq!(v.status, Status::Partial, "{v:?}");
        assert!(v.witnesses[2].deviation < v.witnesses[0].deviation);
        // bilinear functions are reproduced exactly
        let v = check_a7_bernstein(&Principle::DeltaStar, &handle("(x1+2)*(x2+3) - 6", 2), &schedule, &p, 1e-9).unwrap();
        assert!(v.max_deviation < 1e-9);
        assert!((bernstein_basis(4, 0.3).iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn a8_examples() {
        let deltas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let x = Point::new(vec![1.0, 1.0]).unwrap();
        let f = handle("(x1+2)*(x2+3) - 6", 2);
        let v = check_a8_continuity(&Principle::DeltaStar, &f, &x, &deltas, 4, 1, 1e-9).unwrap();
        assert_eq!(v.status, Status::Partial, "{v:?}");
        let r = v.witnesses[0].deviation / v.witnesses[1].deviation;
        assert!((r - 10.0).abs() < 1.0, "roughly linear decay, ratio {r}");

        let step = handle("sign(x1 + x2 - 2)", 2);
        let v = check_a8_continuity(&Principle::DeltaStar, &step, &x, &deltas, 4, 1, 1e-9).unwrap();
        assert_eq!(v.status, Status::Skipped);

        let v = check_a8_continuity(&Principle::DeltaStar, &handle("4", 2), &x, &deltas, 4, 1, 1e-9).unwrap();
        assert_eq!(v.status, Status::Partial);
        assert_eq!(v.max_deviation, 0.0);
    }

    #[test]
    fn a9_examples() {
        let p = pts(2, 20, 11);
        let f = handle("x1*x2", 2);
        let maps = [CoordinateMap::odd_power(3.0).unwrap(), CoordinateMap::scale(2.0).unwrap()];
        let v = check_a9_reparameterization(&Principle::AsSubset, &f, &maps, &p, 1e-9).unwrap();
        assert_eq!(v.status, Status::Pass);
        let ids = [CoordinateMap::Identity, CoordinateMap::Identity];
        let v = check_a9_reparameterization(&Principle::DeltaStar, &f, &ids, &p, 1e-9).unwrap();
        assert_eq!(v.max_deviation, 0.0);
        assert!(CoordinateMap::affine(1.0, 1.0).is_err());
    }

    #[test]
    fn inadmissible_is_skipped() {
        let f = handle("x1 + 1", 2);
        let v = check_a1_additivity(&Principle::AsSubset, &f, &pts(2, 3, 12), 1e-9).unwrap();
        assert_eq!(v.status, Status::Skipped);
    }
}
