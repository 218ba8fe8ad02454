//! Shared strategies and definition-level oracles for the integration tests.
//!
//! Nothing here calls the engines' own distance or center code; the oracles use only
//! set membership and lattice enumeration.
#![allow(dead_code)]

use metric_center::line::{Bound, Interval, IntervalSet};
use metric_center::rational::{int, ratio, Rational};
use num_traits::Zero;
use proptest::prelude::*;

/// Denominator of the lattice every generated endpoint lives on.
pub const DEN: i64 = 4;

pub fn q(n: i64) -> Rational {
    ratio(n, DEN)
}

pub fn set(s: &str) -> IntervalSet {
    s.parse().unwrap()
}

/// Raw pieces `(start, length, lo_closed, hi_closed)` in lattice units.
pub fn arb_raw_pieces(
    range: i64,
    max_len: i64,
    max_pieces: usize,
) -> impl Strategy<Value = Vec<(i64, i64, bool, bool)>> {
    prop::collection::vec((-range..range, 0..=max_len, any::<bool>(), any::<bool>()), 1..=max_pieces)
}

pub fn build(pieces: &[(i64, i64, bool, bool)]) -> IntervalSet {
    IntervalSet::normalize(
        pieces
            .iter()
            .map(|&(s, l, lc, hc)| {
                let (lc, hc) = if l == 0 { (true, true) } else { (lc, hc) };
                Interval::new(Bound::Finite(q(s)), lc, Bound::Finite(q(s + l)), hc)
            })
            .collect(),
    )
    .unwrap()
}

/// A bounded set on the `1/DEN` lattice.
pub fn arb_bounded_set() -> impl Strategy<Value = IntervalSet> {
    arb_raw_pieces(40, 16, 4).prop_map(|p| build(&p))
}

/// Any set on the lattice, occasionally with unbounded pieces.
pub fn arb_set() -> impl Strategy<Value = IntervalSet> {
    (arb_bounded_set(), 0u8..6, -40i64..40).prop_map(|(s, kind, at)| match kind {
        0 => s.union(&IntervalSet::from_interval(Interval::new(Bound::Finite(q(at)), true, Bound::PosInf, false)).unwrap()),
        1 => s.union(&IntervalSet::from_interval(Interval::new(Bound::NegInf, false, Bound::Finite(q(at)), false)).unwrap()),
        _ => s,
    })
}

/// An ambient `Y ⊇ A`: the line, the line minus punctures, or `A` plus extra pieces.
pub fn arb_ambient_for(a: IntervalSet) -> impl Strategy<Value = (IntervalSet, IntervalSet)> {
    (0u8..3, arb_bounded_set(), prop::collection::vec(-44i64..44, 0..4)).prop_map(
        move |(kind, extra, punct)| {
            let base = match kind {
                0 => IntervalSet::real_line(),
                1 => a.union(&extra),
                _ => a.union(&extra.closure()),
            };
            let holes = IntervalSet::points(punct.into_iter().map(q)).difference(&a);
            (a.clone(), base.difference(&holes))
        },
    )
}

/// Descriptors computed from the definitions by enumerating a fine lattice.
#[derive(Debug, Clone)]
pub struct LineOracle {
    pub boundary: Vec<Rational>,
    pub semi_radius: Rational,
    /// Empty when the supremum is not attained on `A`.
    pub center: Vec<Rational>,
    pub semi_quasi_radius: Rational,
    pub quasi_center: Vec<Rational>,
}

fn window(a: &IntervalSet, y: &IntervalSet) -> (i64, i64) {
    let ends: Vec<Rational> = a.finite_endpoints().into_iter().chain(y.finite_endpoints()).collect();
    let lo = ends.iter().min().cloned().unwrap_or_else(Rational::zero);
    let hi = ends.iter().max().cloned().unwrap_or_else(Rational::zero);
    let lo = (lo * int(DEN)).floor().to_integer();
    let hi = (hi * int(DEN)).ceil().to_integer();
    let lo: i64 = lo.try_into().unwrap();
    let hi: i64 = hi.try_into().unwrap();
    (lo - DEN, hi + DEN)
}

fn near(s: impl Fn(&Rational) -> bool, x: &Rational, eps: &Rational) -> bool {
    s(x) || s(&(x - eps)) || s(&(x + eps))
}

/// Lattice oracle for a bounded, nonempty `A ⊆ Y` with endpoints on the `1/DEN` lattice.
///
/// The radius fields are meaningless when the boundary (or `Y∖A`) is empty.
pub fn line_oracle(a: &IntervalSet, y: &IntervalSet) -> LineOracle {
    let (lo, hi) = window(a, y);
    let in_a = |x: &Rational| a.contains(x);
    let in_rest = |x: &Rational| y.contains(x) && !a.contains(x);
    let eps = ratio(1, 8 * DEN);
    let fine = 2 * DEN;
    // Boundary points sit on the coarse lattice.
    let boundary: Vec<Rational> = (lo..=hi)
        .map(q)
        .filter(|x| y.contains(x) && near(in_a, x, &eps) && near(in_rest, x, &eps))
        .collect();
    let cl_rest: Vec<Rational> = (lo..=hi).map(q).filter(|x| near(in_rest, x, &eps)).collect();
    let samples: Vec<Rational> = (2 * lo..=2 * hi)
        .map(|n| ratio(n, fine))
        .filter(|x| near(in_a, x, &eps))
        .collect();
    let dist = |x: &Rational, pts: &[Rational]| {
        pts.iter().map(|b| if b > x { b - x } else { x - b }).min()
    };
    let best = |pts: &[Rational]| -> (Rational, Vec<Rational>) {
        if pts.is_empty() {
            return (Rational::zero(), Vec::new());
        }
        let scored: Vec<(Rational, Rational)> =
            samples.iter().map(|x| (x.clone(), dist(x, pts).expect("nonempty target"))).collect();
        let m = scored.iter().map(|(_, d)| d.clone()).max().unwrap();
        let arg = scored.into_iter().filter(|(x, d)| *d == m && a.contains(x)).map(|(x, _)| x).collect();
        (m, arg)
    };
    let (semi_radius, center) = best(&boundary);
    let (semi_quasi_radius, quasi_center) = best(&cl_rest);
    LineOracle { boundary, semi_radius, center, semi_quasi_radius, quasi_center }
}

/// Random set in `[0, 4]` whose components and gaps are at least `1/4` long, so sampling at
/// `h ≤ 1/12` resolves every piece.
pub fn separated_set(rng: &mut impl rand::Rng) -> IntervalSet {
    let mut at = rng.gen_range(0..3i64);
    let mut pieces = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(1..=5i64);
        pieces.push(Interval::new(Bound::Finite(q(at)), rng.gen_bool(0.5), Bound::Finite(q(at + len)), rng.gen_bool(0.5)));
        at += len + rng.gen_range(1..=3i64);
    }
    IntervalSet::normalize(pieces).unwrap()
}

fn dist_to_points(x: &Rational, pts: &[Rational]) -> Option<Rational> {
    pts.iter().map(|b| if b > x { b - x } else { x - b }).min()
}

/// Breakpoints of a set, plus representatives of every atom between them.
fn atom_representatives(mut cuts: Vec<Rational>) -> Vec<Rational> {
    cuts.sort();
    cuts.dedup();
    let mut reps = Vec::new();
    if let (Some(first), Some(last)) = (cuts.first().cloned(), cuts.last().cloned()) {
        reps.push(first - int(1));
        reps.push(last + int(1));
    }
    for w in cuts.windows(2) {
        reps.push((&w[0] + &w[1]) / int(2));
    }
    reps.extend(cuts);
    reps
}

/// Checks a claimed max-metric product center of bounded sets in `ℝ` against the definition:
/// the distance from `x` to `∂(∏A_i)` is `min_i d(x_i, ∂A_i)`, maximized over `∏A_i`.
///
/// Every set involved is constant on the atoms cut by the factor endpoints, the boundary
/// points shifted by the radius, and the claimed center's endpoints, so comparing membership
/// at one representative per atom is exact.
pub fn check_product_by_definition(
    sets: &[IntervalSet],
    center: &[IntervalSet],
    radius: &Rational,
) -> Result<(), String> {
    let line = IntervalSet::real_line();
    let oracles: Vec<LineOracle> = sets.iter().map(|s| line_oracle(s, &line)).collect();
    let m = oracles.iter().map(|o| o.semi_radius.clone()).min().unwrap();
    if &m != radius {
        return Err(format!("radius {radius} but the definition gives {m}"));
    }
    let reps: Vec<Vec<Rational>> = sets
        .iter()
        .zip(center)
        .zip(&oracles)
        .map(|((s, c), o)| {
            let mut cuts = s.finite_endpoints();
            cuts.extend(c.finite_endpoints());
            for k in &o.boundary {
                cuts.push(k - &m);
                cuts.push(k + &m);
                cuts.push(k.clone());
            }
            atom_representatives(cuts)
        })
        .collect();
    let mut idx = vec![0usize; sets.len()];
    loop {
        let x: Vec<&Rational> = idx.iter().zip(&reps).map(|(&i, r)| &r[i]).collect();
        let inside = x.iter().zip(sets).all(|(xi, s)| s.contains(xi));
        let truth = inside
            && x.iter().zip(&oracles).map(|(xi, o)| dist_to_points(xi, &o.boundary).unwrap()).min().unwrap() == m;
        let claimed = x.iter().zip(center).all(|(xi, c)| c.contains(xi));
        if truth != claimed {
            let shown: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            return Err(format!("({}) is {}in the center by definition", shown.join(", "), if truth { "" } else { "not " }));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < reps[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Samples of a bounded set: isolated points, and every piece at `step` including its ends.
pub fn sample_set(s: &IntervalSet, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for c in s.components() {
        let lo = metric_center::rational::rational_to_f64(c.finite_endpoints().first().unwrap());
        let hi = metric_center::rational::rational_to_f64(c.finite_endpoints().last().unwrap());
        let n = ((hi - lo) / step).ceil() as usize;
        out.extend((0..=n).map(|k| (lo + k as f64 * step).min(hi)));
    }
    out
}

/// Max-metric Hausdorff distance between `∏ sets` and a finite point set.
pub fn hausdorff_to_product(sets: &[IntervalSet], points: &[Vec<f64>], step: f64) -> f64 {
    if sets.iter().any(IntervalSet::is_empty) || points.is_empty() {
        return if sets.iter().any(IntervalSet::is_empty) && points.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let to_set = |x: f64, s: &IntervalSet| {
        let q = metric_center::rational::rational_from_f64(x).unwrap();
        metric_center::rational::rational_to_f64(&s.closure().distance_to(&q).unwrap())
    };
    let forward = points
        .iter()
        .map(|p| p.iter().zip(sets).map(|(&x, s)| to_set(x, s)).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let samples: Vec<Vec<f64>> = sets.iter().map(|s| sample_set(s, step)).collect();
    let mut idx = vec![0usize; sets.len()];
    let mut backward: f64 = 0.0;
    'outer: loop {
        let x: Vec<f64> = idx.iter().zip(&samples).map(|(&i, s)| s[i]).collect();
        let near = points
            .iter()
            .map(|p| p.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        backward = backward.max(near);
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < samples[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    forward.max(backward)
}

/// `n` pairwise separated parts on the lattice plus an ambient containing them.
///
/// Pieces are laid out left to right with gaps of at least one lattice step, so pieces of
/// different parts never touch. The end pieces may be unbounded. The ambient is the line,
/// the line minus a few lattice points, or the parts plus extra pieces (possibly leaving gaps,
/// which makes it a non-path metric space).
pub fn arb_separated_parts(n: usize) -> impl Strategy<Value = (Vec<IntervalSet>, IntervalSet)> {
    arb_separated_parts_with(n, true)
}

pub fn arb_separated_parts_with(n: usize, unbounded: bool) -> impl Strategy<Value = (Vec<IntervalSet>, IntervalSet)> {
    let pieces = prop::collection::vec((0..=8i64, 1..=6i64, 0..n, any::<bool>(), any::<bool>()), n..=n + 4);
    (pieces, any::<bool>(), any::<bool>(), 0u8..3, arb_bounded_set(), prop::collection::vec(-30i64..50, 0..4))
        .prop_filter("every part needs a piece", move |(p, ..)| (0..n).all(|k| p.iter().any(|x| x.2 == k)))
        .prop_map(move |(pieces, neg, pos, kind, extra, punct)| {
            let mut parts = vec![Vec::new(); n];
            let mut at = -20i64;
            let last = pieces.len() - 1;
            for (i, &(len, gap, owner, lc, hc)) in pieces.iter().enumerate() {
                let (lc, hc) = if len == 0 { (true, true) } else { (lc, hc) };
                let (neg, pos) = (neg && unbounded, pos && unbounded);
                let lo = if i == 0 && neg { Bound::NegInf } else { Bound::Finite(q(at)) };
                let hi = if i == last && pos { Bound::PosInf } else { Bound::Finite(q(at + len)) };
                let (lc, hc) = (lc && lo != Bound::NegInf, hc && hi != Bound::PosInf);
                parts[owner].push(Interval::new(lo, lc, hi, hc));
                at += len + gap;
            }
            let parts: Vec<IntervalSet> = parts.into_iter().map(|p| IntervalSet::normalize(p).unwrap()).collect();
            let all = parts.iter().fold(IntervalSet::empty(), |acc, p| acc.union(p));
            let ambient = match kind {
                0 => IntervalSet::real_line(),
                1 => IntervalSet::real_line().difference(&IntervalSet::points(punct.into_iter().map(q)).difference(&all)),
                _ => all.union(&extra),
            };
            (parts, ambient)
        })
}

/// Two arcs on a sampled unit sphere with the chordal metric.
pub struct SphereArcs {
    pub space: std::sync::Arc<metric_center::finite::FiniteSpace>,
    /// The great circle `y = 0` minus the open chordal ball of radius 0.1 about `(1,0,0)`.
    pub a: metric_center::Mask,
    /// The great circle `z = 0` minus the same ball about `(-1,0,0)`.
    pub b: metric_center::Mask,
}

/// Sampled sphere carrying the two arcs.
///
/// Each great circle is sampled at `step` and `h = step`. A curve has empty interior in the
/// sphere itself, so the arcs only get their endpoints as boundary if the sample stays
/// farther than `h` from them elsewhere: the bulk Fibonacci points keep out of a band of
/// width `3h` around both circles, and each removed arc is sampled only in a collar of three
/// steps next to its ends.
pub fn sphere_arcs(bulk: usize, per_circle: usize) -> SphereArcs {
    use metric_center::finite::{FiniteSpace, PointMetric};
    assert!(per_circle.is_multiple_of(2), "an even count samples both (1,0,0) and (-1,0,0)");
    let step = 2.0 * std::f64::consts::PI / per_circle as f64;
    let h = step;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..bulk {
        let y = 1.0 - 2.0 * (i as f64 + 0.5) / bulk as f64;
        let r = (1.0 - y * y).sqrt();
        let t = golden * i as f64;
        let p = vec![r * t.cos(), y, r * t.sin()];
        if p[1].abs() > 3.0 * h && p[2].abs() > 3.0 * h {
            rows.push(p);
            a.push(false);
            b.push(false);
        }
    }
    let chord = |p: &[f64], q: [f64; 3]| p.iter().zip(q).map(|(s, t)| (s - t) * (s - t)).sum::<f64>().sqrt();
    for k in 0..per_circle {
        let t = k as f64 * step;
        for (p, removed_about, in_a) in [
            (vec![t.cos(), 0.0, t.sin()], [1.0, 0.0, 0.0], true),
            (vec![t.cos(), t.sin(), 0.0], [-1.0, 0.0, 0.0], false),
        ] {
            let d = chord(&p, removed_about);
            let keep = d >= 0.1 - 3.0 * step;
            if !keep {
                continue;
            }
            let member = d >= 0.1;
            rows.push(p);
            a.push(member && in_a);
            b.push(member && !in_a);
        }
    }
    let space = FiniteSpace::from_points(&rows, PointMetric::Euclidean, h).unwrap();
    SphereArcs { space: std::sync::Arc::new(space), a: metric_center::Mask::from_bits(a), b: metric_center::Mask::from_bits(b) }
}

/// `2 cos(asin(0.05))`: the chord from `(-1,0,0)` to the ends of the arc `A`.
pub fn sphere_arc_radius() -> f64 {
    2.0 * 0.05f64.asin().cos()
}

/// `β₁ = β₀ − χ` for the complex with a vertex per cell, an edge per face-adjacent pair and a
/// square per full 2×2 block. `β₀` comes from a flood fill.
pub fn euler_betti1(rows: usize, cols: usize, s: &metric_center::Mask) -> i64 {
    let at = |r: usize, c: usize| s.get(r * cols + c);
    let (mut v, mut e, mut f) = (0i64, 0i64, 0i64);
    for r in 0..rows {
        for c in 0..cols {
            if !at(r, c) {
                continue;
            }
            v += 1;
            e += i64::from(c + 1 < cols && at(r, c + 1)) + i64::from(r + 1 < rows && at(r + 1, c));
            f += i64::from(r + 1 < rows && c + 1 < cols && at(r, c + 1) && at(r + 1, c) && at(r + 1, c + 1));
        }
    }
    let mut seen = vec![false; rows * cols];
    let mut b0 = 0;
    for start in 0..rows * cols {
        if !s.get(start) || seen[start] {
            continue;
        }
        b0 += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (r, c) = (i / cols, i % cols);
            let mut push = |j: usize| {
                if s.get(j) && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if r > 0 {
                push(i - cols);
            }
            if r + 1 < rows {
                push(i + cols);
            }
            if c > 0 {
                push(i - 1);
            }
            if c + 1 < cols {
                push(i + 1);
            }
        }
    }
    b0 - (v - e + f)
}

/// Random planar mask: independent cells at a random density, or a union of random blobs.
pub fn random_planar_mask(rng: &mut impl rand::Rng, rows: usize, cols: usize) -> metric_center::Mask {
    if rng.gen_bool(0.5) {
        let p = rng.gen_range(0.2..0.8);
        metric_center::Mask::from_bits((0..rows * cols).map(|_| rng.gen_bool(p)).collect())
    } else {
        let blobs: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(1..12))
            .map(|_| {
                let (r, c) = (rng.gen_range(0.0..rows as f64), rng.gen_range(0.0..cols as f64));
                let outer = rng.gen_range(2.0..(rows.min(cols) as f64 / 2.0).max(3.0));
                (r, c, outer, rng.gen_range(0.0..outer))
            })
            .collect();
        metric_center::Mask::from_fn(rows * cols, |i| {
            let (r, c) = ((i / cols) as f64, (i % cols) as f64);
            let mut inside = false;
            for &(br, bc, outer, inner) in &blobs {
                let d = ((r - br).powi(2) + (c - bc).powi(2)).sqrt();
                if d <= outer && d >= inner {
                    inside = !inside;
                }
            }
            inside
        })
    }
}

/// Random planar CSG region: up to three discs or boxes, minus up to two small discs.
pub fn random_region<R: rand::Rng>(rng: &mut R) -> metric_center::grid::Csg {
    use metric_center::grid::Csg;
    let grid = |rng: &mut R, lo: f64, hi: f64| (rng.gen_range(lo..hi) * 20.0).round() / 20.0;
    let mut parts = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        if rng.gen_bool(0.5) {
            let c = vec![grid(rng, -0.6, 0.6), grid(rng, -0.6, 0.6)];
            parts.push(Csg::disc(c, grid(rng, 0.15, 0.6)));
        } else {
            let (x, y) = (grid(rng, -0.8, 0.3), grid(rng, -0.8, 0.3));
            parts.push(Csg::rect(vec![x, y], vec![x + grid(rng, 0.1, 0.8), y + grid(rng, 0.1, 0.8)]));
        }
    }
    let holes = (0..rng.gen_range(0..=2))
        .map(|_| Csg::disc(vec![grid(rng, -0.6, 0.6), grid(rng, -0.6, 0.6)], grid(rng, 0.05, 0.2)))
        .collect::<Vec<_>>();
    if holes.is_empty() {
        Csg::union(parts)
    } else {
        Csg::difference(Csg::union(parts), holes)
    }
}
