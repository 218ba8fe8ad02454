mod common;

use common::random_region;
use metric_center::grid::{
    descriptors_grid, distance_to_set, largest_inscribed_balls, rasterize, squared_edt, Csg, GridRegion, GridShape,
    UNREACHED,
};
use metric_center::{report_consistency_check_within, Mask};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 0.01;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit_disc() -> Csg {
    Csg::disc(vec![0.0, 0.0], 1.0)
}

fn punctured_disc() -> Csg {
    Csg::difference(unit_disc(), vec![Csg::Point { at: vec![0.0, 0.0] }])
}

fn raster(shape: &Csg, h: f64) -> GridRegion {
    rasterize(shape, None, h).unwrap()
}

/// Hausdorff distance between two cell sets, by brute force.
fn hausdorff(g: &GridRegion, a: &Mask, b: &Mask) -> f64 {
    let pa: Vec<Vec<f64>> = a.ones().map(|i| g.center(i)).collect();
    let pb: Vec<Vec<f64>> = b.ones().map(|i| g.center(i)).collect();
    let one_way = |p: &[Vec<f64>], q: &[Vec<f64>]| {
        p.iter()
            .map(|x| q.iter().map(|y| norm(&[x[0] - y[0], x[1] - y[1]])).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(&pa, &pb).max(one_way(&pb, &pa))
}

#[test]
fn disc_center_and_radius() {
    let g = raster(&unit_disc(), H);
    let (r, _) = descriptors_grid(&g);
    assert!((r.radius.to_f64() - 1.0).abs() <= 2.0 * H, "rad = {}", r.radius);
    for i in r.center.ones() {
        assert!(norm(&g.center(i)) <= 2.0 * H, "center cell {:?}", g.center(i));
    }
    assert!(report_consistency_check_within(&r, H * (1.0 + 1e-9)).is_empty());
}

#[test]
fn punctured_disc_center_is_a_circle() {
    let g = raster(&punctured_disc(), H);
    let (r, _) = descriptors_grid(&g);
    assert!((r.radius.to_f64() - 0.5).abs() <= 2.0 * H, "rad = {}", r.radius);
    assert!(r.center.count() > 100);
    for i in r.center.ones() {
        let c = norm(&g.center(i));
        assert!((c - 0.5).abs() <= 2.0 * H, "center cell at radius {c}");
    }
}

#[test]
fn boundary_and_complement_distances_agree_in_path_metric() {
    for shape in [unit_disc(), Csg::rect(vec![0.0, 0.0], vec![1.0, 1.0])] {
        let g = raster(&shape, H);
        let (r, f) = descriptors_grid(&g);
        let gap = g
            .occupancy()
            .ones()
            .map(|i| (f.to_boundary.value(i) - f.to_complement.value(i)).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 2.0 * H, "gap {gap}");
        assert!((r.radius.to_f64() - r.quasi_radius.to_f64()).abs() <= 4.0 * H);
        let hd = hausdorff(&g, &r.center, &r.quasi_center);
        assert!(hd <= 4.0 * H, "Hausdorff(center, quasi-center) = {hd}");
    }
}

#[test]
fn closed_shape_and_interior_are_concentric() {
    let h = 0.02;
    let shapes = [
        (Csg::disc(vec![0.0, 0.0], 1.0), Csg::Disc { center: vec![0.0, 0.0], radius: 1.0, open: true }),
        (
            Csg::rect(vec![0.0, 0.0], vec![2.0, 1.0]),
            Csg::Box { min: vec![0.0, 0.0], max: vec![2.0, 1.0], open: true },
        ),
    ];
    for (closed, open) in shapes {
        let bbox: (&[f64], &[f64]) = (&[-1.5, -1.5], &[2.5, 2.5]);
        let a = rasterize(&closed, Some(bbox), h).unwrap();
        let b = rasterize(&open, Some(bbox), h).unwrap();
        let (ra, _) = descriptors_grid(&a);
        let (rb, _) = descriptors_grid(&b);
        assert!((ra.radius.to_f64() - rb.radius.to_f64()).abs() <= 2.0 * h);
        assert!(hausdorff(&a, &ra.center, &rb.center) <= 2.0 * h);
    }
}

#[test]
fn distance_transform_matches_brute_force_on_random_masks() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..6 {
        let (w, hgt) = (rng.gen_range(8..=64), rng.gen_range(8..=64));
        let grid = GridShape::new(&[w, hgt]);
        let density = rng.gen_range(0.005..0.5);
        let m = Mask::from_bits((0..grid.len()).map(|_| rng.gen_bool(density)).collect());
        let fast = squared_edt(&grid, &m);
        let pts: Vec<(i64, i64)> = m.ones().map(|i| (i as i64 / hgt as i64, i as i64 % hgt as i64)).collect();
        for (i, &v) in fast.iter().enumerate() {
            let (x, y) = (i as i64 / hgt as i64, i as i64 % hgt as i64);
            let want = pts.iter().map(|&(a, b)| ((a - x).pow(2) + (b - y).pow(2)) as u64).min().unwrap_or(UNREACHED);
            assert_eq!(v, want);
        }
    }
}

#[test]
fn thin_sets_have_tiny_radius_and_full_sets_do_not() {
    let thin = [
        Csg::Sphere { center: vec![0.0, 0.0], radius: 1.0 },
        Csg::Segment { from: vec![-1.0, 0.3], to: vec![0.7, -0.2] },
        Csg::Point { at: vec![0.2, 0.2] },
    ];
    for s in thin {
        let (r, _) = descriptors_grid(&raster(&s, 0.02));
        assert!(!r.interior_nonempty);
        assert!(r.radius.to_f64() <= 0.02);
    }
    let (r, _) = descriptors_grid(&raster(&unit_disc(), 0.02));
    assert!(r.radius.to_f64() >= 0.02);
}

/// Random union of discs and boxes minus a few discs, centered near the origin.
#[test]
fn inscribed_ball_certificates_hold_on_random_regions() {
    let mut rng = ChaCha8Rng::seed_from_u64(319);
    let mut checked = 0;
    for _ in 0..30 {
        let g = raster(&random_region(&mut rng), 0.02);
        if g.is_empty() {
            continue;
        }
        let b = largest_inscribed_balls(&g).unwrap();
        assert!(b.certificate.holds(), "{:?}", b.certificate);
        checked += 1;
    }
    assert!(checked > 20);
}

#[test]
fn l_shape_certificate() {
    let l = Csg::union(vec![Csg::rect(vec![0.0, 0.0], vec![2.0, 1.0]), Csg::rect(vec![0.0, 0.0], vec![1.0, 2.0])]);
    let g = raster(&l, 0.005);
    let b = largest_inscribed_balls(&g).unwrap();
    assert!(b.certificate.holds());
    assert!(b.radius.to_f64() >= 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn region_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a_shape = random_region(&mut rng);
        let h = 0.025;
        let g = raster(&a_shape, h);
        prop_assume!(!g.is_empty());
        let (r, f) = descriptors_grid(&g);
        let v = report_consistency_check_within(&r, h * (1.0 + 1e-9));
        prop_assert!(v.is_empty(), "{:?}", v);
        // Radius at most half the diameter.
        prop_assert!(r.radius.to_f64() <= r.diameter.to_f64() / 2.0 + 2.0 * h);
        // Distances to the boundary and to the complement differ by at most one cell.
        for i in g.occupancy().ones() {
            let d = f.to_complement.value(i) - f.to_boundary.value(i);
            prop_assert!((0.0..=h * (1.0 + 1e-12)).contains(&d));
        }
        // Enlarging the shape never shrinks the quasi-radius.
        let bigger = Csg::union(vec![a_shape.clone(), random_region(&mut rng)]);
        let bbox = (vec![-2.0, -2.0], vec![2.0, 2.0]);
        let ga = rasterize(&a_shape, Some((&bbox.0, &bbox.1)), h).unwrap();
        let gb = rasterize(&bigger, Some((&bbox.0, &bbox.1)), h).unwrap();
        let qa = descriptors_grid(&ga).0.quasi_radius.to_f64();
        let qb = descriptors_grid(&gb).0.quasi_radius.to_f64();
        prop_assert!(qa <= qb + 2.0 * h);
        let b = largest_inscribed_balls(&g).unwrap();
        prop_assert!(b.certificate.holds());
        prop_assert!(distance_to_set(&g, g.occupancy()).squared.iter().zip(g.occupancy().bits()).all(|(&d, &o)| !o || d == 0));
    }
}
