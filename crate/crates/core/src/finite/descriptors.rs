use rayon::prelude::*;
use thiserror::Error;

use super::space::{FiniteSpace, REL_EPS};
use crate::ext::ExtReal;
use crate::mask::Mask;
use crate::report::DescriptorReport;

/// Interior, closure and boundary at resolution `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsTopology {
    pub interior: Mask,
    pub closure: Mask,
    pub boundary: Mask,
}

impl EpsTopology {
    pub fn clopen(&self) -> bool {
        self.boundary.none()
    }
}

fn within_h(x: &FiniteSpace) -> f64 {
    x.h() * (1.0 + REL_EPS)
}

/// `{x : d(x,A) ≤ h}` for the points of `a`.
pub fn closure_h(x: &FiniteSpace, a: &Mask) -> Mask {
    let idx = x.index(a);
    let r = within_h(x);
    Mask::from_bits((0..x.len()).into_par_iter().map(|i| a.get(i) || idx.any_within(i, r)).collect())
}

/// closure_h(A) = {x : d(x,A) ≤ h}, interior_h(A) = {a ∈ A : d(a,Aᶜ) > h},
/// boundary_h(A) = closure_h(A) ∖ interior_h(A).
pub fn eps_topology(x: &FiniteSpace, a: &Mask) -> EpsTopology {
    assert_eq!(a.len(), x.len(), "mask size must match the space");
    let closure = closure_h(x, a);
    let rest = x.index(&a.complement());
    let r = within_h(x);
    let interior = Mask::from_bits(
        (0..x.len()).into_par_iter().map(|i| a.get(i) && !rest.any_within(i, r)).collect(),
    );
    let boundary = closure.difference(&interior);
    EpsTopology { interior, closure, boundary }
}

/// `(max, argmax band)` of `a ↦ d(a, targets)` over `a`; `None` if `a` is empty.
fn banded_max(x: &FiniteSpace, a: &Mask, targets: &Mask, band: f64) -> Option<(f64, Mask, Vec<f64>)> {
    if a.none() {
        return None;
    }
    let idx = x.index(targets);
    let field: Vec<f64> = (0..x.len())
        .into_par_iter()
        .map(|i| if a.get(i) { idx.nearest(i) } else { f64::NAN })
        .collect();
    let best = a.ones().map(|i| field[i]).fold(f64::NEG_INFINITY, f64::max);
    let cut = best - band * (1.0 + REL_EPS);
    let center = Mask::from_fn(x.len(), |i| a.get(i) && field[i] >= cut);
    Some((best, center, field))
}

fn farthest_pair(pts: &[Vec<f64>]) -> f64 {
    pts.par_iter()
        .map(|p| {
            pts.iter()
                .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// Monotone-chain hull of distinct, lexicographically sorted planar points.
fn hull_2d(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let cross = |o: &[f64], a: &[f64], b: &[f64]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<&Vec<f64>> = Vec::new();
    for pass in [pts.iter().collect::<Vec<_>>(), pts.iter().rev().collect()] {
        let start = hull.len();
        for p in pass {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.into_iter().cloned().collect()
}

/// Diameter of the points of `a`.
///
/// For point clouds the max-metric diameter is the largest diameter among the projections
/// onto the Euclidean blocks, each found on at most a convex hull.
fn diameter(x: &FiniteSpace, a: &Mask) -> f64 {
    let members: Vec<usize> = a.ones().collect();
    let Some(metric) = x.block_metric() else {
        return members
            .par_iter()
            .map(|&i| members.iter().map(|&j| x.dist(i, j)).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
    };
    let mut at = 0;
    let mut best: f64 = 0.0;
    for &b in metric.block_sizes() {
        let mut proj: Vec<Vec<f64>> =
            members.iter().map(|&i| x.coords(i).expect("point cloud")[at..at + b].to_vec()).collect();
        proj.sort_by(|p, q| p.iter().zip(q).map(|(s, t)| s.total_cmp(t)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        proj.dedup();
        let candidates = match b {
            1 => proj.first().into_iter().chain(proj.last()).cloned().collect(),
            2 => hull_2d(&proj),
            _ => proj,
        };
        best = best.max(farthest_pair(&candidates));
        at += b;
    }
    best
}

fn ext(v: f64) -> ExtReal {
    ExtReal::float(v).expect("distances are nonnegative")
}

/// Per-point distances behind a brute-force report, for CSV output and oracles.
#[derive(Debug, Clone)]
pub struct FiniteFields {
    pub to_boundary: Vec<f64>,
    pub to_complement: Vec<f64>,
}

/// Definition-level descriptors over a finite space at resolution `h`.
///
/// Centers are tolerance bands: all points within `τ = h` of the maximum. Quasi variants
/// measure distance to `closure_h(Aᶜ)`, which contains the `h`-boundary, so `SQrad ≤ rad`
/// holds exactly.
pub fn descriptors_bf(x: &FiniteSpace, a: &Mask) -> DescriptorReport<Mask> {
    descriptors_bf_with_fields(x, a).0
}

pub fn descriptors_bf_with_fields(x: &FiniteSpace, a: &Mask) -> (DescriptorReport<Mask>, FiniteFields) {
    let topo = eps_topology(x, a);
    let h = x.h();
    let n = x.len();
    let mut notes = vec!["finite space: suprema are attained, so semi-radius equals radius".to_string()];

    let (radius, semi_radius, center, to_boundary) = if a.none() {
        (ExtReal::INFINITY, ext(0.0), Mask::empty(n), vec![f64::NAN; n])
    } else if topo.clopen() {
        notes.push(format!("h-clopen at h = {h:?}: center is the whole subset"));
        (ExtReal::INFINITY, ExtReal::INFINITY, a.clone(), vec![f64::INFINITY; n])
    } else {
        let (m, c, f) = banded_max(x, a, &topo.boundary, h).expect("nonempty");
        (ext(m), ext(m), c, f)
    };

    let rest_closure = closure_h(x, &a.complement());
    let (quasi_radius, semi_quasi_radius, quasi_center, to_complement) = if a.none() {
        (ExtReal::INFINITY, ext(0.0), Mask::empty(n), vec![f64::NAN; n])
    } else if rest_closure.none() {
        (ExtReal::INFINITY, ExtReal::INFINITY, a.clone(), vec![f64::INFINITY; n])
    } else {
        let (m, c, f) = banded_max(x, a, &rest_closure, h).expect("nonempty");
        (ext(m), ext(m), c, f)
    };

    let diameter = diameter(x, a);

    let report = DescriptorReport {
        subset: a.clone(),
        interior_nonempty: !topo.interior.none(),
        clopen: topo.clopen(),
        boundary: topo.boundary,
        center,
        radius,
        semi_radius,
        quasi_center,
        quasi_radius,
        semi_quasi_radius,
        diameter: ext(diameter),
        notes,
    };
    (report, FiniteFields { to_boundary, to_complement })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsometryError {
    #[error("map is not a bijection onto the target space")]
    NotBijective,
    #[error("map is not distance preserving: d({i},{j}) = {d_source} but d(f({i}),f({j})) = {d_target}")]
    NotIsometric { i: usize, j: usize, d_source: f64, d_target: f64 },
    #[error("spaces use different resolutions ({0} vs {1})")]
    ScaleMismatch(f64, f64),
    #[error("subset mask has length {got}, expected {expected}")]
    MaskSize { got: usize, expected: usize },
    #[error("center not transported: {0}")]
    CenterMismatch(String),
    #[error("{what} differs: {source_value} vs {target_value}")]
    ValueMismatch { what: &'static str, source_value: String, target_value: String },
}

fn close(a: &ExtReal, b: &ExtReal) -> bool {
    match (a.as_float(), b.as_float()) {
        (Some(x), Some(y)) => (x - y).abs() <= REL_EPS * x.abs().max(y.abs()).max(1.0),
        _ => a == b,
    }
}

/// Checks that a distance-preserving bijection carries centers to centers with equal radii.
pub fn isometry_transport_check(
    x: &FiniteSpace,
    y: &FiniteSpace,
    f: &[usize],
    a: &Mask,
) -> Result<(), IsometryError> {
    let n = x.len();
    if a.len() != n {
        return Err(IsometryError::MaskSize { got: a.len(), expected: n });
    }
    if f.len() != n || y.len() != n {
        return Err(IsometryError::NotBijective);
    }
    let mut seen = vec![false; n];
    for &t in f {
        if t >= n || std::mem::replace(&mut seen[t], true) {
            return Err(IsometryError::NotBijective);
        }
    }
    if x.h() != y.h() {
        return Err(IsometryError::ScaleMismatch(x.h(), y.h()));
    }
    let witness = (0..n).into_par_iter().find_map_first(|i| {
        (i + 1..n).find_map(|j| {
            let (ds, dt) = (x.dist(i, j), y.dist(f[i], f[j]));
            ((ds - dt).abs() > REL_EPS * ds.max(dt).max(1.0)).then_some((i, j, ds, dt))
        })
    });
    if let Some((i, j, d_source, d_target)) = witness {
        return Err(IsometryError::NotIsometric { i, j, d_source, d_target });
    }

    let image = Mask::from_indices(n, a.ones().map(|i| f[i]));
    let rx = descriptors_bf(x, a);
    let ry = descriptors_bf(y, &image);
    for (what, sx, sy) in [("center", &rx.center, &ry.center), ("quasi-center", &rx.quasi_center, &ry.quasi_center)] {
        let moved = Mask::from_indices(n, sx.ones().map(|i| f[i]));
        if &moved != sy {
            return Err(IsometryError::CenterMismatch(format!(
                "{what}: image has {} points, target has {}",
                moved.count(),
                sy.count()
            )));
        }
    }
    for (what, vx, vy) in [
        ("radius", &rx.radius, &ry.radius),
        ("quasi-radius", &rx.quasi_radius, &ry.quasi_radius),
        ("diameter", &rx.diameter, &ry.diameter),
    ] {
        if !close(vx, vy) {
            return Err(IsometryError::ValueMismatch {
                what,
                source_value: vx.to_string(),
                target_value: vy.to_string(),
            });
        }
    }
    Ok(())
}
