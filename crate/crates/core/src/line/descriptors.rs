use num_traits::Zero;

use super::interval::{Bound, IntervalError, IntervalSet};
use crate::ext::ExtReal;
use crate::rational::Rational;
use crate::report::DescriptorReport;

/// Relative interior, closure and boundary of a subset of an ambient `Y ⊆ ℝ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineTopology {
    pub interior: IntervalSet,
    pub closure: IntervalSet,
    pub boundary: IntervalSet,
}

pub fn topology_line(a: &IntervalSet, y: &IntervalSet) -> Result<LineTopology, IntervalError> {
    if !a.is_subset_of(y) {
        return Err(IntervalError::NotSubset);
    }
    let closure = a.closure().intersection(y);
    let rest_closure = y.difference(a).closure().intersection(y);
    let interior = y.difference(&rest_closure);
    let boundary = closure.intersection(&rest_closure);
    debug_assert!(boundary.as_points().is_some(), "boundary of a finite interval union is finite");
    Ok(LineTopology { interior, closure, boundary })
}

/// `sup_{a∈A} d(a, K)` for a closed `K`, together with the points of `A` attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupDistance {
    pub sup: ExtReal,
    pub argmax: IntervalSet,
}

fn exact(q: Rational) -> ExtReal {
    ExtReal::exact(q).expect("distances are nonnegative")
}

/// Piecewise-linear maximization of `a ↦ d(a, K)` over `A`.
///
/// The maximum over the closure of a bounded piece is attained at a piece endpoint or at a
/// midpoint between consecutive components of `K`; a candidate counts toward the argmax only
/// if it belongs to `A` itself.
pub fn sup_distance(a: &IntervalSet, k: &IntervalSet) -> SupDistance {
    if a.is_empty() {
        return SupDistance { sup: ExtReal::zero_exact(), argmax: IntervalSet::empty() };
    }
    if k.is_empty() {
        return SupDistance { sup: ExtReal::INFINITY, argmax: a.clone() };
    }
    let k_inf_finite = !matches!(k.inf(), Some(Bound::NegInf));
    let k_sup_finite = !matches!(k.sup(), Some(Bound::PosInf));
    for p in a.pieces() {
        if (p.lo() == &Bound::NegInf && k_inf_finite) || (p.hi() == &Bound::PosInf && k_sup_finite) {
            return SupDistance { sup: ExtReal::INFINITY, argmax: IntervalSet::empty() };
        }
    }

    let kp = k.pieces();
    let midpoints: Vec<Rational> = kp
        .windows(2)
        .filter_map(|w| {
            let (Bound::Finite(x), Bound::Finite(y)) = (w[0].hi(), w[1].lo()) else {
                return None;
            };
            Some((x + y) / Rational::from_integer(2.into()))
        })
        .collect();

    let mut candidates: Vec<Rational> = a.finite_endpoints();
    let hull = a.closure();
    candidates.extend(midpoints.into_iter().filter(|m| hull.contains(m)));
    candidates.sort();
    candidates.dedup();

    let scored: Vec<(Rational, Rational)> = candidates
        .into_iter()
        .map(|c| {
            let d = k.distance_to(&c).expect("K nonempty");
            (c, d)
        })
        .collect();
    let best = scored.iter().map(|(_, d)| d).max().cloned().unwrap_or_else(Rational::zero);
    if best.is_zero() {
        return SupDistance { sup: exact(best), argmax: a.clone() };
    }
    let argmax = IntervalSet::points(
        scored.into_iter().filter(|(c, d)| *d == best && a.contains(c)).map(|(c, _)| c),
    );
    SupDistance { sup: exact(best), argmax }
}

/// Radius convention: the supremum when attained, `+inf` when the argmax is empty.
fn radius_of(s: &SupDistance) -> ExtReal {
    if s.argmax.is_empty() {
        ExtReal::INFINITY
    } else {
        s.sup.clone()
    }
}

pub fn diameter_line(a: &IntervalSet) -> ExtReal {
    match (a.inf(), a.sup()) {
        (None, _) | (_, None) => ExtReal::zero_exact(),
        (Some(Bound::Finite(lo)), Some(Bound::Finite(hi))) => exact(hi - lo),
        _ => ExtReal::INFINITY,
    }
}

/// All six descriptors of `A` in the subspace metric of `Y`.
pub fn descriptors_line(
    a: &IntervalSet,
    y: &IntervalSet,
) -> Result<DescriptorReport<IntervalSet>, IntervalError> {
    let topo = topology_line(a, y)?;
    let center = sup_distance(a, &topo.boundary);
    let quasi = sup_distance(a, &y.difference(a).closure());
    let mut notes = Vec::new();
    if a.is_empty() {
        notes.push("empty subset: center empty, radius inf, semi-radius and diameter 0".into());
    }
    Ok(DescriptorReport {
        subset: a.clone(),
        clopen: topo.boundary.is_empty(),
        interior_nonempty: !topo.interior.is_empty(),
        boundary: topo.boundary,
        radius: radius_of(&center),
        semi_radius: center.sup,
        center: center.argmax,
        quasi_radius: radius_of(&quasi),
        semi_quasi_radius: quasi.sup,
        quasi_center: quasi.argmax,
        diameter: diameter_line(a),
        notes,
    })
}

/// Connected components of the exact center.
pub fn center_components(
    a: &IntervalSet,
    y: &IntervalSet,
) -> Result<(usize, Vec<IntervalSet>), IntervalError> {
    let r = descriptors_line(a, y)?;
    let comps = r.center.components();
    Ok((comps.len(), comps))
}

/// `d(x, ∂_Y A)` as an exact value, `+inf` for an empty boundary.
pub fn boundary_distance(boundary: &IntervalSet, x: &Rational) -> ExtReal {
    boundary.distance_to(x).map(exact).unwrap_or(ExtReal::INFINITY)
}
