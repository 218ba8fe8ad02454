mod common;

use std::sync::Arc;

use common::*;
use metric_center::filtration::{betti0_cells, betti1_planar, conjecture_scan, Filtration, Verdict};
use metric_center::grid::{rasterize, Csg, GridShape};
use metric_center::line::{descriptors_line, topology_line, IntervalSet};
use metric_center::{AnySet, ExtReal, Mask};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn line_set(s: AnySet) -> IntervalSet {
    s.as_line().expect("line sublevel").clone()
}

fn annulus(inner: f64, outer: f64) -> Csg {
    Csg::difference(Csg::disc(vec![0.0, 0.0], outer), vec![Csg::disc(vec![0.0, 0.0], inner)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn line_sublevels_are_nested_and_end_at_the_subset((a, y) in arb_set().prop_flat_map(arb_ambient_for)) {
        let f = Filtration::line(&a, &y).unwrap();
        let r = descriptors_line(&a, &y).unwrap();
        prop_assume!(!r.clopen);
        let mut alphas: Vec<ExtReal> = f.thresholds().to_vec();
        alphas.extend(f.thresholds().windows(2).map(|w| {
            let (s, t) = (w[0].as_exact().unwrap(), w[1].as_exact().unwrap());
            ExtReal::exact((s + t) / q(2)).unwrap()
        }));
        alphas.sort_by(|s, t| metric_center::ext_cmp(s, t).unwrap());
        let sets: Vec<IntervalSet> = alphas.iter().map(|al| line_set(f.sublevel(al).unwrap())).collect();
        for w in sets.windows(2) {
            prop_assert!(w[0].is_subset_of(&w[1]));
        }
        // p never exceeds Srad, so P at Srad is all of A.
        if r.semi_radius.is_finite() {
            prop_assert_eq!(line_set(f.sublevel(&r.semi_radius).unwrap()), a.clone());
        }
        let topo = topology_line(&a, &y).unwrap();
        prop_assert_eq!(line_set(f.sublevel(&ExtReal::zero_exact()).unwrap()), topo.boundary.intersection(&a));
    }

    #[test]
    fn scan_keeps_the_center_out_and_components_apart((a, y) in arb_set().prop_flat_map(arb_ambient_for)) {
        let f = Filtration::line(&a, &y).unwrap();
        let Ok(report) = conjecture_scan(&f, None) else { return Ok(()) };
        prop_assert!(report.center_excluded);
        let comps = a.components();
        for row in &report.rows {
            let p = line_set(f.sublevel(&row.alpha).unwrap());
            prop_assert_eq!(row.betti0, p.components().len());
            // Each piece of P_α sits inside one component of A.
            if comps.iter().all(|c| !c.is_disjoint_from(&p)) {
                prop_assert!(row.betti0 >= comps.len());
            }
        }
    }
}

#[test]
fn planar_betti_matches_euler_characteristic() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..40 {
        let (rows, cols) = (rng.gen_range(1..=128), rng.gen_range(1..=128));
        let m = random_planar_mask(&mut rng, rows, cols);
        let b1 = betti1_planar(&GridShape::new(&[rows, cols]), &m).unwrap() as i64;
        assert_eq!(b1, euler_betti1(rows, cols, &m), "{rows}x{cols}");
    }
}

#[test]
fn betti_numbers_of_rasterized_shapes() {
    let h = 0.02;
    let disc = rasterize(&Csg::disc(vec![0.0, 0.0], 1.0), None, h).unwrap();
    let ring = rasterize(&annulus(1.0, 2.0), None, h).unwrap();
    let nested = rasterize(&Csg::union(vec![annulus(1.0, 1.5), annulus(2.0, 2.5)]), None, h).unwrap();
    let b = |g: &metric_center::grid::GridRegion| {
        (betti0_cells(&g.grid(), g.occupancy()), betti1_planar(&g.grid(), g.occupancy()).unwrap())
    };
    assert_eq!(b(&disc), (1, 0));
    assert_eq!(b(&ring), (1, 1));
    assert_eq!(b(&nested), (2, 2));
    assert_eq!(betti0_cells(&ring.grid(), &Mask::empty(ring.len())), 0);
}

#[test]
fn two_intervals_desk_check() {
    let f = Filtration::line(&set("[0,1],[2,3]"), &IntervalSet::real_line()).unwrap();
    let r = conjecture_scan(&f, None).unwrap();
    assert_eq!(r.verdict, Verdict::Exists);
    assert_eq!(r.target, 4);
    let star = r.alpha_star.unwrap();
    assert_eq!(f.betti0(&f.sublevel(&star).unwrap()).unwrap(), 4);
    let p = f.sublevel(&ExtReal::exact(metric_center::rational::ratio(3, 10)).unwrap()).unwrap();
    assert_eq!(f.betti0(&p).unwrap(), 4);
    assert!(r.center_excluded);
}

#[test]
fn disc_and_annulus_desk_checks() {
    let h = 0.02;
    for (shape, want) in [(Csg::disc(vec![0.0, 0.0], 1.0), 1), (annulus(1.0, 2.0), 2)] {
        let g = Arc::new(rasterize(&shape, None, h).unwrap());
        let f = Filtration::grid(g);
        let r = conjecture_scan(&f, None).unwrap();
        assert_eq!(r.verdict, Verdict::Exists, "{shape:?}");
        assert_eq!(r.target, want);
        assert!(r.center_excluded);
        let star = r.rows.iter().find(|row| Some(&row.alpha) == r.alpha_star.as_ref()).unwrap();
        assert_eq!(star.betti1, Some(want));
        // Sublevel sets only grow with α.
        let sets: Vec<Mask> = r.rows.iter().map(|row| f.sublevel(&row.alpha).unwrap().as_cells().unwrap().clone()).collect();
        assert!(sets.windows(2).all(|w| w[0].is_subset_of(&w[1])));
        let top = f.thresholds().last().unwrap();
        assert_eq!(f.sublevel(top).unwrap(), f.subset());
    }
}
