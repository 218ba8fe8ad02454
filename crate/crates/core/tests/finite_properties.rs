mod common;

use std::cmp::Ordering;

use common::*;
use metric_center::finite::{
    descriptors_bf, descriptors_bf_with_fields, isometry_transport_check, shortest_path_metric, validate_metric, FiniteSpace, IsometryError,
    MetricError, PointMetric,
};
use metric_center::line::{descriptors_line, IntervalSet};
use metric_center::rational::{ratio, rational_to_f64};
use metric_center::report::report_consistency_check;
use metric_center::{ext_cmp, Mask};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Points of an exact set, which on the line are the components of a bounded center.
fn center_points(s: &IntervalSet) -> Vec<f64> {
    s.components().iter().flat_map(|c| c.finite_endpoints()).map(|q| rational_to_f64(&q)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sampled_line_agrees_with_the_exact_engine(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = separated_set(&mut rng);
        let exact = descriptors_line(&a, &IntervalSet::real_line()).unwrap();
        // Lattice k/40 over a window with room on both sides; endpoints are multiples of 1/4.
        let s = 1.0 / 40.0;
        let ks: Vec<i64> = (-80..=40 * 30).collect();
        let rows: Vec<Vec<f64>> = ks.iter().map(|&k| vec![k as f64 * s]).collect();
        let x = FiniteSpace::from_points(&rows, PointMetric::Euclidean, s).unwrap();
        let mask = Mask::from_bits(ks.iter().map(|&k| a.contains(&ratio(k, 40))).collect());
        let r = descriptors_bf(&x, &mask);
        prop_assert!(report_consistency_check(&r).is_empty());
        let (want, got) = (exact.radius.to_f64(), r.radius.to_f64());
        prop_assert!((want - got).abs() <= 2.0 * s, "A = {}: radius {} vs {}", a, got, want);
        let exact_pts = center_points(&exact.center);
        let sampled: Vec<f64> = r.center.ones().map(|i| rows[i][0]).collect();
        let gap = |p: f64, set: &[f64]| set.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min);
        let hd = sampled.iter().map(|&p| gap(p, &exact_pts)).chain(exact_pts.iter().map(|&p| gap(p, &sampled))).fold(0.0, f64::max);
        prop_assert!(hd <= 2.0 * s + 1e-9, "A = {}: Hausdorff {}", a, hd);
    }

    #[test]
    fn semi_quasi_radius_never_exceeds_radius(seed in any::<u64>(), n in 20usize..300, keep in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let metric = if rng.gen_bool(0.5) { PointMetric::Euclidean } else { PointMetric::Max };
        let x = FiniteSpace::from_points(&random_cloud(&mut rng, n, 2), metric, 0.15).unwrap();
        let a = Mask::from_bits((0..n).map(|_| rng.gen_bool(keep)).collect());
        let r = descriptors_bf(&x, &a);
        prop_assert!(ext_cmp(&r.semi_quasi_radius, &r.radius).unwrap() != Ordering::Greater);
        prop_assert!(report_consistency_check(&r).is_empty());
    }

    #[test]
    fn cycle_symmetries_transport_centers(n in 5usize..40, shift in 0usize..40, flip: bool, bits in prop::collection::vec(any::<bool>(), 40)) {
        let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        let x = shortest_path_metric(n, &edges, false).unwrap();
        let a = Mask::from_fn(n, |i| bits[i]);
        let f: Vec<usize> = (0..n).map(|i| {
            let j = if flip { (n - i) % n } else { i };
            (j + shift) % n
        }).collect();
        prop_assert!(isometry_transport_check(&x, &x, &f, &a).is_ok());
        // Swapping two vertices at distance 2 breaks the cycle's distances.
        let mut g: Vec<usize> = (0..n).collect();
        g.swap(0, 2);
        let broken = matches!(isometry_transport_check(&x, &x, &g, &a), Err(IsometryError::NotIsometric { .. }));
        prop_assert!(broken);
    }

    #[test]
    fn separated_clusters_are_clopen(seed in any::<u64>(), gap in 0.5f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = random_cloud(&mut rng, 60, 2);
        let far: Vec<Vec<f64>> = random_cloud(&mut rng, 40, 2).into_iter().map(|p| vec![p[0] + 2.0 + gap, p[1]]).collect();
        rows.extend(far);
        let x = FiniteSpace::from_points(&rows, PointMetric::Euclidean, 0.4).unwrap();
        let a = Mask::from_fn(rows.len(), |i| i < 60);
        let r = descriptors_bf(&x, &a);
        prop_assert!(r.clopen && r.radius.is_infinite());
        prop_assert_eq!(r.center, a);
    }
}

#[test]
fn metric_validation() {
    let broken = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
    match validate_metric(&broken, 4) {
        Err(MetricError::Triangle(v)) => assert!(v.iter().any(|&(i, j, k)| [i, j, k].contains(&1))),
        other => panic!("expected a triangle violation, got {other:?}"),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = random_cloud(&mut rng, 40, 3);
    let d: Vec<Vec<f64>> = pts.iter().map(|p| pts.iter().map(|q| dist2(p, q)).collect()).collect();
    validate_metric(&d, 4).unwrap();
    // A random connected graph: a spanning path plus chords.
    let n = 30;
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|i| (i - 1, i, rng.gen_range(0.5..3.0))).collect();
    for _ in 0..40 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, rng.gen_range(0.5..3.0)));
        }
    }
    let x = shortest_path_metric(n, &edges, false).unwrap();
    validate_metric(&x.distance_matrix(), 4).unwrap();
}

#[test]
fn simplex_center_is_the_barycenter() {
    // Lattice (i,j,k)/40 on the plane x + y + z = 1, reaching a quarter beyond the simplex.
    let m = 40i64;
    let mut rows = Vec::new();
    let mut inside = Vec::new();
    for i in -10..=m + 20 {
        for j in -10..=m + 20 {
            let k = m - i - j;
            if k < -10 {
                continue;
            }
            rows.push(vec![i as f64 / m as f64, j as f64 / m as f64, k as f64 / m as f64]);
            inside.push(i >= 0 && j >= 0 && k >= 0);
        }
    }
    // Nearest lattice neighbours are √2/40 apart.
    let step = 2f64.sqrt() / m as f64;
    let x = FiniteSpace::from_points(&rows, PointMetric::Euclidean, step).unwrap();
    let (r, fields) = descriptors_bf_with_fields(&x, &Mask::from_bits(inside));
    let bary = [1.0 / 3.0; 3];
    let best = r.center.ones().map(|i| fields.to_boundary[i]).fold(0.0, f64::max);
    let (mut top, mut band) = (0.0f64, 0.0f64);
    for i in r.center.ones() {
        let d = dist2(x.coords(i).unwrap(), &bary);
        band = band.max(d);
        if fields.to_boundary[i] == best {
            top = top.max(d);
        }
    }
    assert!(top <= 2.0 / m as f64, "maximizers reach {top}");
    // Toward a vertex the distance to the nearest edge falls at slope 1/2, so the τ = h band
    // spreads to 2h.
    assert!(band <= 2.0 * step + 1.0 / m as f64, "center band reaches {band}");
    // Inradius of the standard simplex: distance from the barycenter to an edge.
    assert!((r.radius.to_f64() - 1.0 / 6f64.sqrt()).abs() <= 2.0 * step, "radius {}", r.radius);
}

#[test]
fn semicircle_with_tangent_segments() {
    // X = right unit semicircle A plus segments B from (0,1) to (1.5,1) to (1.5,-1) to (0,-1).
    let step = 1e-4;
    let mut rows = Vec::new();
    let mut in_b = Vec::new();
    let arc = (std::f64::consts::PI / step).round() as usize;
    for k in 1..arc {
        let t = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / arc as f64;
        rows.push(vec![t.cos(), t.sin()]);
        in_b.push(false);
    }
    let segs = [([0.0, 1.0], [1.5, 1.0]), ([1.5, 1.0], [1.5, -1.0]), ([1.5, -1.0], [0.0, -1.0])];
    for (s, (p, q)) in segs.iter().enumerate() {
        let n = (dist2(p, q) / step).round() as usize;
        let last = if s == 2 { n } else { n - 1 };
        for k in 0..=last {
            let t = k as f64 / n as f64;
            rows.push(vec![p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            in_b.push(true);
        }
    }
    let x = FiniteSpace::from_points(&rows, PointMetric::Euclidean, step).unwrap();
    let r = descriptors_bf(&x, &Mask::from_bits(in_b));

    // The segments meet the circle tangentially: points (x, ±1) lie within x²/2 of the arc,
    // so the h-boundary runs out to x = √(2h) and the radius is measured from there.
    let reach = (2.0 * step).sqrt();
    let sampled_rad = ((1.5 - reach).powi(2) + 1.0).sqrt();
    assert!((r.radius.to_f64() - sampled_rad).abs() <= 4.0 * step, "radius {}", r.radius);
    assert!((r.radius.to_f64() - 3.25f64.sqrt()).abs() <= 0.02);
    for i in r.center.ones() {
        assert!(dist2(x.coords(i).unwrap(), &[1.5, 0.0]) <= 2.0 * step);
    }
    assert!((r.quasi_radius.to_f64() - (3.25f64.sqrt() - 1.0)).abs() <= 2.0 * step, "quasi radius {}", r.quasi_radius);
    let mut corners = [false; 2];
    for i in r.quasi_center.ones() {
        let c = x.coords(i).unwrap();
        let k = usize::from(c[1] < 0.0);
        assert!(dist2(c, &[1.5, if k == 0 { 1.0 } else { -1.0 }]) <= 2.0 * step, "quasi-center point {c:?}");
        corners[k] = true;
    }
    assert_eq!(corners, [true, true]);
}
