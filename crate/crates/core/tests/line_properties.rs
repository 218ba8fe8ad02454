mod common;

use common::{arb_ambient_for, arb_bounded_set, arb_set, line_oracle};
use metric_center::ext::{ext_cmp, ExtReal};
use metric_center::line::{descriptors_line, diameter_line, topology_line, IntervalSet};
use metric_center::rational::ratio;
use metric_center::report_consistency_check;
use proptest::prelude::*;
use std::cmp::Ordering;

fn le(a: &ExtReal, b: &ExtReal) -> bool {
    ext_cmp(a, b).unwrap() != Ordering::Greater
}

fn exact(q: metric_center::Rational) -> ExtReal {
    ExtReal::exact(q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matches_lattice_oracle((a, y) in arb_bounded_set().prop_flat_map(arb_ambient_for)) {
        let r = descriptors_line(&a, &y).unwrap();
        let o = line_oracle(&a, &y);
        prop_assert_eq!(&r.boundary, &IntervalSet::points(o.boundary.clone()));
        prop_assume!(!r.clopen && y != a);
        prop_assert_eq!(&r.semi_radius, &exact(o.semi_radius.clone()));
        prop_assert_eq!(&r.center, &IntervalSet::points(o.center.clone()).union(
            &if o.semi_radius == ratio(0, 1) { a.clone() } else { IntervalSet::empty() }));
        let expected_rad = if o.center.is_empty() { ExtReal::INFINITY } else { exact(o.semi_radius) };
        prop_assert_eq!(&r.radius, &expected_rad);
        prop_assert_eq!(&r.semi_quasi_radius, &exact(o.semi_quasi_radius.clone()));
        if o.semi_quasi_radius != ratio(0, 1) {
            prop_assert_eq!(&r.quasi_center, &IntervalSet::points(o.quasi_center));
        }
    }

    #[test]
    fn reports_are_consistent((a, y) in arb_set().prop_flat_map(arb_ambient_for)) {
        let r = descriptors_line(&a, &y).unwrap();
        prop_assert_eq!(report_consistency_check(&r), vec![]);
        if !r.clopen {
            prop_assert_eq!(r.center.is_empty(), r.radius.is_infinite());
        }
        let topo = topology_line(&a, &y).unwrap();
        prop_assert!(topo.interior.is_subset_of(&a) && a.is_subset_of(&topo.closure));
        prop_assert!(topo.boundary.is_subset_of(&y));
    }

    #[test]
    fn radius_zero_iff_empty_interior(a in arb_set()) {
        prop_assume!(!a.is_empty());
        let r = descriptors_line(&a, &IntervalSet::real_line()).unwrap();
        prop_assert_eq!(r.radius.is_zero(), !r.interior_nonempty);
    }

    #[test]
    fn center_lies_in_interior_and_is_closed_in_subset((a, y) in arb_set().prop_flat_map(arb_ambient_for)) {
        let r = descriptors_line(&a, &y).unwrap();
        let topo = topology_line(&a, &y).unwrap();
        if !topo.interior.is_empty() {
            prop_assert!(r.center.is_subset_of(&topo.interior));
        }
        prop_assert_eq!(r.center.closure().intersection(&a), r.center);
    }

    #[test]
    fn radius_bounded_by_interior_and_closure_radii(a in arb_set()) {
        let line = IntervalSet::real_line();
        let r = descriptors_line(&a, &line).unwrap();
        prop_assume!(!r.center.is_empty());
        let ri = descriptors_line(&a.interior(), &line).unwrap();
        let rc = descriptors_line(&a.closure(), &line).unwrap();
        prop_assert!(le(&r.radius, &ri.radius));
        prop_assert!(le(&r.radius, &rc.radius));
    }

    #[test]
    fn shrinking_the_ambient_never_shrinks_the_radius((a, y) in arb_set().prop_flat_map(arb_ambient_for)) {
        let r_line = descriptors_line(&a, &IntervalSet::real_line()).unwrap();
        prop_assume!(!r_line.center.is_empty());
        let r_sub = descriptors_line(&a, &y).unwrap();
        prop_assert!(le(&r_line.radius, &r_sub.radius));
    }

    #[test]
    fn center_equals_quasi_center_on_the_line(a in arb_set()) {
        prop_assume!(a != IntervalSet::real_line());
        let r = descriptors_line(&a, &IntervalSet::real_line()).unwrap();
        prop_assert_eq!(&r.center, &r.quasi_center);
        prop_assert_eq!(&r.radius, &r.quasi_radius);
        prop_assert_eq!(&r.semi_radius, &r.semi_quasi_radius);
    }

    #[test]
    fn subset_and_interior_are_concentric(a in arb_set()) {
        let line = IntervalSet::real_line();
        let r = descriptors_line(&a, &line).unwrap();
        prop_assume!(r.interior_nonempty && !r.center.is_empty());
        let ri = descriptors_line(&a.interior(), &line).unwrap();
        prop_assert_eq!(r.center, ri.center);
        prop_assert_eq!(r.radius, ri.radius);
    }

    #[test]
    fn radius_at_most_half_the_diameter(a in arb_set()) {
        let r = descriptors_line(&a, &IntervalSet::real_line()).unwrap();
        prop_assume!(!r.clopen && !r.center.is_empty());
        let diam = diameter_line(&a);
        prop_assert!(le(&r.radius, &diam));
        if let (Some(rad), Some(d)) = (r.radius.as_exact(), diam.as_exact()) {
            prop_assert!(rad * ratio(2, 1) <= *d);
        }
    }
}

#[test]
fn interior_fixture_shares_center() {
    let line = IntervalSet::real_line();
    let c: IntervalSet = "[0,1)".parse().unwrap();
    let r = descriptors_line(&c, &line).unwrap();
    let ri = descriptors_line(&c.interior(), &line).unwrap();
    assert_eq!(r.center, IntervalSet::point(ratio(1, 2)));
    assert_eq!(ri.center, r.center);
}
