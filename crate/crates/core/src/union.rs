//! Centers and radii of finite unions of pairwise separated subsets, computed from the
//! descriptors of the parts and checked against the engine's direct descriptors of the union.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::ext::{ext_cmp, ext_max, ExtReal};
use crate::finite::{descriptors_bf, FiniteSpace, REL_EPS};
use crate::grid::{descriptors_grid, distance_to_set, GridRegion};
use crate::line::{descriptors_line, Bound, IntervalError, IntervalSet};
use crate::mask::Mask;
use crate::rational::{int, Rational};
use crate::report::DescriptorReport;
use crate::set::AnySet;

/// The space the parts live in.
#[derive(Debug, Clone)]
pub enum UnionSpace {
    /// A subspace `Y` of the real line; everything is exact.
    Line(IntervalSet),
    Finite(Arc<FiniteSpace>),
    /// The lattice of this region. Parts are cell masks over it; its own occupancy is unused.
    Grid(Arc<GridRegion>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnionError {
    #[error(transparent)]
    Line(#[from] IntervalError),
    #[error("no parts given")]
    NoParts,
    #[error("part {index} is not a subset of this space: {reason}")]
    WrongSpace { index: usize, reason: String },
    #[error("part {index} is clopen")]
    Clopen { index: usize },
    #[error("parts {first} and {second} are not separated: {witness}")]
    NotSeparated { first: usize, second: usize, witness: Witness },
}

/// Why two parts are not separated.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A point of `cl(A) ∩ B` or of `A ∩ cl(B)`.
    Line(Rational),
    /// A point of each part, no more than `2h` apart.
    Pair { first: usize, second: usize, distance: f64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Line(x) => write!(f, "{} lies in one part and the closure of the other", crate::rational::format_rational(x)),
            Witness::Pair { first, second, distance } => {
                write!(f, "points {first} and {second} are {distance:?} apart")
            }
        }
    }
}

/// Which rule determined the union's center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionCase {
    /// The larger radius wins and part of its center stays clear of the other boundary.
    LargerCenterSurvives,
    /// Equal radii; the surviving centers of both parts form the center.
    EqualCentersSurvive,
    /// The larger finite radius wins but its whole center is too close to the other boundary.
    LargerCenterCovered,
    /// Equal finite radii and no center point survives.
    EqualCentersCovered,
    /// One radius is infinite with `Srad` at most the other radius, whose center survives.
    UnboundedPartnerSurvives,
    /// As above, but the finite part's center does not survive.
    UnboundedPartnerCovered,
    /// No formula applies; only the general bounds are known.
    BoundsOnly,
}

impl UnionCase {
    pub fn as_str(self) -> &'static str {
        match self {
            UnionCase::LargerCenterSurvives => "larger-center-survives",
            UnionCase::EqualCentersSurvive => "equal-centers-survive",
            UnionCase::LargerCenterCovered => "larger-center-covered",
            UnionCase::EqualCentersCovered => "equal-centers-covered",
            UnionCase::UnboundedPartnerSurvives => "unbounded-partner-survives",
            UnionCase::UnboundedPartnerCovered => "unbounded-partner-covered",
            UnionCase::BoundsOnly => "bounds-only",
        }
    }

    /// Whether the case determines the center and radius rather than bounding `Srad`.
    pub fn determined(self) -> bool {
        matches!(
            self,
            UnionCase::LargerCenterSurvives | UnionCase::EqualCentersSurvive | UnionCase::UnboundedPartnerSurvives
        )
    }
}

impl fmt::Display for UnionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An interval known to contain `Srad` of the union.
#[derive(Debug, Clone, PartialEq)]
pub struct SradBounds {
    pub lower: ExtReal,
    pub lower_strict: bool,
    pub upper: ExtReal,
    pub upper_strict: bool,
}

impl SradBounds {
    fn unknown(zero: ExtReal) -> Self {
        SradBounds { lower: zero, lower_strict: false, upper: ExtReal::INFINITY, upper_strict: false }
    }

    fn exactly(v: &ExtReal) -> Self {
        SradBounds { lower: v.clone(), lower_strict: false, upper: v.clone(), upper_strict: false }
    }

    fn at_most(&mut self, v: &ExtReal, strict: bool) {
        match cmp(v, &self.upper) {
            Ordering::Less => (self.upper, self.upper_strict) = (v.clone(), strict),
            Ordering::Equal => self.upper_strict |= strict,
            Ordering::Greater => {}
        }
    }

    fn above(&mut self, v: &ExtReal, strict: bool) {
        match cmp(v, &self.lower) {
            Ordering::Greater => (self.lower, self.lower_strict) = (v.clone(), strict),
            Ordering::Equal => self.lower_strict |= strict,
            Ordering::Less => {}
        }
    }

    /// The single value when both ends coincide and are closed.
    pub fn value(&self) -> Option<&ExtReal> {
        (!self.lower_strict && !self.upper_strict && cmp(&self.lower, &self.upper) == Ordering::Equal)
            .then_some(&self.lower)
    }

    pub fn is_consistent(&self) -> bool {
        match cmp(&self.lower, &self.upper) {
            Ordering::Less => true,
            Ordering::Equal => !self.lower_strict && !self.upper_strict,
            Ordering::Greater => false,
        }
    }

    /// Exact membership; both values must share a regime.
    pub fn contains(&self, x: &ExtReal) -> bool {
        let lo = cmp(&self.lower, x);
        let hi = cmp(x, &self.upper);
        (lo == Ordering::Less || (lo == Ordering::Equal && !self.lower_strict))
            && (hi == Ordering::Less || (hi == Ordering::Equal && !self.upper_strict))
    }

    /// Membership with both ends widened by `slack`, strictness ignored.
    pub fn contains_within(&self, x: &ExtReal, slack: f64) -> bool {
        let x = x.to_f64();
        self.lower.to_f64() - slack <= x && x <= self.upper.to_f64() + slack
    }
}

impl fmt::Display for SradBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.value() {
            return write!(f, "= {v}");
        }
        let open = if self.lower_strict { '(' } else { '[' };
        let close = if self.upper_strict { ')' } else { ']' };
        write!(f, "in {open}{}, {}{close}", self.lower, self.upper)
    }
}

/// One part of a union and the sets derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionPart {
    pub report: DescriptorReport<AnySet>,
    /// Center points closer than the part's radius to some other part's boundary.
    pub tilde: AnySet,
    /// `Cent ∖ tilde`: the center points that stay centers of the union.
    pub survivors: AnySet,
    /// Two-part unions only: points farther than the other part's radius from the union's
    /// boundary. Nonempty means `Srad` of the union exceeds that radius.
    pub double_tilde: Option<AnySet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionReport {
    pub case: UnionCase,
    /// Index of the part with the larger radius; 0 when the radii are equal.
    pub larger: usize,
    pub parts: Vec<UnionPart>,
    /// Set exactly when `case` determines it.
    pub center: Option<AnySet>,
    pub radius: Option<ExtReal>,
    pub semi_radius: SradBounds,
    /// The engine's own descriptors of the union, for comparison.
    pub direct: DescriptorReport<AnySet>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionNReport {
    pub parts: Vec<UnionPart>,
    pub max_radius: ExtReal,
    /// Parts with the maximal radius and a surviving center point.
    pub members: Vec<usize>,
    /// Whether the space is a path metric space, where every tilde set is empty.
    pub path_metric: bool,
    pub center: Option<AnySet>,
    pub radius: Option<ExtReal>,
    pub semi_radius: SradBounds,
    pub direct: DescriptorReport<AnySet>,
    pub warnings: Vec<String>,
}

fn cmp(a: &ExtReal, b: &ExtReal) -> Ordering {
    ext_cmp(a, b).expect("one space never mixes regimes")
}

fn max(a: &ExtReal, b: &ExtReal) -> ExtReal {
    ext_max(a, b).expect("one space never mixes regimes")
}

/// Some point of a nonempty set.
fn any_point(s: &IntervalSet) -> Option<Rational> {
    let p = s.pieces().first()?;
    Some(match (p.lo(), p.hi()) {
        (Bound::Finite(a), _) if p.lo_closed() => a.clone(),
        (_, Bound::Finite(b)) if p.hi_closed() => b.clone(),
        (Bound::Finite(a), Bound::Finite(b)) => (a + b) / int(2),
        (Bound::Finite(a), _) => a + int(1),
        (_, Bound::Finite(b)) => b - int(1),
        _ => Rational::zero(),
    })
}

/// Union of the `r`-neighbourhoods of finitely many points.
fn boundary_points(b: &AnySet) -> Vec<Rational> {
    b.as_line().and_then(IntervalSet::as_points).expect("a line boundary is a finite point set")
}

impl UnionSpace {
    /// Tolerance for distance comparisons: 0 on the line, `h` on sampled spaces.
    pub fn tolerance(&self) -> f64 {
        match self {
            UnionSpace::Line(_) => 0.0,
            UnionSpace::Finite(x) => x.h(),
            UnionSpace::Grid(g) => g.h(),
        }
    }

    /// The line when the ambient is one interval, and grids (cells of Euclidean space).
    pub fn path_metric(&self) -> bool {
        match self {
            UnionSpace::Line(y) => y.components().len() == 1,
            UnionSpace::Finite(_) => false,
            UnionSpace::Grid(_) => true,
        }
    }

    /// Whether `Srad` of a union of these parts is certainly attained. A strict pointwise bound
    /// only carries over to the supremum then. On the line that needs bounded parts whose
    /// closures lie in `Y`: every closure point outside the union is then a boundary point.
    fn supremum_attained(&self, parts: &[AnySet]) -> bool {
        match self {
            UnionSpace::Line(y) => parts
                .iter()
                .filter_map(AnySet::as_line)
                .all(|p| p.is_bounded() && p.closure().is_subset_of(y)),
            UnionSpace::Finite(_) | UnionSpace::Grid(_) => true,
        }
    }

    fn zero(&self) -> ExtReal {
        match self {
            UnionSpace::Line(_) => ExtReal::zero_exact(),
            _ => ExtReal::zero_float(),
        }
    }

    fn check_part(&self, index: usize, part: &AnySet) -> Result<(), UnionError> {
        let wrong = |reason: String| Err(UnionError::WrongSpace { index, reason });
        match (self, part) {
            (UnionSpace::Line(y), AnySet::Line(s)) if !s.is_subset_of(y) => wrong(format!("{s} is not inside {y}")),
            (UnionSpace::Line(_), AnySet::Line(_)) => Ok(()),
            (UnionSpace::Finite(x), AnySet::Cells(m)) if m.len() != x.len() => {
                wrong(format!("mask of {} points for a space of {}", m.len(), x.len()))
            }
            (UnionSpace::Grid(g), AnySet::Cells(m)) if m.len() != g.len() => {
                wrong(format!("mask of {} cells for a grid of {}", m.len(), g.len()))
            }
            (UnionSpace::Finite(_) | UnionSpace::Grid(_), AnySet::Cells(_)) => Ok(()),
            _ => wrong("interval sets need a line space and masks a sampled one".into()),
        }
    }

    fn describe(&self, s: &AnySet) -> Result<DescriptorReport<AnySet>, UnionError> {
        Ok(match (self, s) {
            (UnionSpace::Line(y), AnySet::Line(a)) => descriptors_line(a, y)?.map_sets(AnySet::Line),
            (UnionSpace::Finite(x), AnySet::Cells(m)) => descriptors_bf(x, m).map_sets(AnySet::Cells),
            (UnionSpace::Grid(g), AnySet::Cells(m)) => {
                descriptors_grid(&g.with_occupancy(m.clone())).0.map_sets(AnySet::Cells)
            }
            _ => unreachable!("parts are checked first"),
        })
    }

    /// Distances from the points of `at` to `target`; `+inf` when `target` is empty.
    fn distances(&self, target: &Mask, at: &Mask) -> Vec<(usize, f64)> {
        match self {
            UnionSpace::Finite(x) => {
                let idx = x.index(target);
                at.ones().collect::<Vec<_>>().into_par_iter().map(|i| (i, idx.nearest(i))).collect()
            }
            UnionSpace::Grid(g) => {
                let field = distance_to_set(g, target);
                at.ones().map(|i| (i, field.value(i))).collect()
            }
            UnionSpace::Line(_) => unreachable!("line distances are exact"),
        }
    }

    /// `{x ∈ set : d(x, boundary) < r}`, with `r` lowered by the tolerance on sampled spaces.
    fn closer_than(&self, set: &AnySet, boundary: &AnySet, r: &ExtReal) -> AnySet {
        if boundary.is_empty() {
            return set.emptied();
        }
        if r.is_infinite() {
            return set.clone();
        }
        match set {
            AnySet::Line(s) => {
                let r = r.as_exact().expect("line radii are exact");
                AnySet::Line(s.intersection(&IntervalSet::around(&boundary_points(boundary), r, false)))
            }
            AnySet::Cells(m) => {
                let cut = r.to_f64() - self.tolerance() * (1.0 + REL_EPS);
                let hits = self.distances(boundary.as_cells().expect("same kind"), m);
                AnySet::Cells(Mask::from_indices(m.len(), hits.into_iter().filter(|&(_, d)| d < cut).map(|(i, _)| i)))
            }
        }
    }

    /// `{x ∈ set : d(x, boundary) > r}`, with `r` raised by the tolerance on sampled spaces.
    fn farther_than(&self, set: &AnySet, boundary: &AnySet, r: &ExtReal) -> AnySet {
        if r.is_infinite() {
            return set.emptied();
        }
        if boundary.is_empty() {
            return set.clone();
        }
        match set {
            AnySet::Line(s) => {
                let r = r.as_exact().expect("line radii are exact");
                AnySet::Line(s.difference(&IntervalSet::around(&boundary_points(boundary), r, true)))
            }
            AnySet::Cells(m) => {
                let cut = r.to_f64() + self.tolerance() * (1.0 + REL_EPS);
                let hits = self.distances(boundary.as_cells().expect("same kind"), m);
                AnySet::Cells(Mask::from_indices(m.len(), hits.into_iter().filter(|&(_, d)| d > cut).map(|(i, _)| i)))
            }
        }
    }

    /// `cl(A) ∩ B = ∅ = A ∩ cl(B)` on the line; a gap wider than `2h` on sampled spaces.
    fn separation_witness(&self, a: &AnySet, b: &AnySet) -> Option<Witness> {
        match (self, a, b) {
            (UnionSpace::Line(_), AnySet::Line(a), AnySet::Line(b)) => {
                let touching = a.closure().intersection(b).union(&a.intersection(&b.closure()));
                any_point(&touching).map(Witness::Line)
            }
            (_, AnySet::Cells(a), AnySet::Cells(b)) => {
                let gap = 2.0 * self.tolerance() * (1.0 + REL_EPS);
                let (i, d) = self.distances(b, a).into_iter().min_by(|x, y| x.1.total_cmp(&y.1))?;
                if d > gap {
                    return None;
                }
                let j = b
                    .ones()
                    .min_by(|&p, &q| self.point_distance(i, p).total_cmp(&self.point_distance(i, q)))
                    .expect("a finite distance needs a target");
                Some(Witness::Pair { first: i, second: j, distance: d })
            }
            _ => unreachable!("parts are checked first"),
        }
    }

    fn point_distance(&self, i: usize, j: usize) -> f64 {
        match self {
            UnionSpace::Finite(x) => x.dist(i, j),
            UnionSpace::Grid(g) => {
                let (p, q) = (g.center(i), g.center(j));
                p.iter().zip(&q).map(|(s, t)| (s - t) * (s - t)).sum::<f64>().sqrt()
            }
            UnionSpace::Line(_) => unreachable!("line distances are exact"),
        }
    }

    /// Radii equal within the tolerance compare as equal.
    fn cmp_radii(&self, a: &ExtReal, b: &ExtReal) -> Ordering {
        let tol = self.tolerance();
        if tol > 0.0 && a.is_finite() && b.is_finite() && (a.to_f64() - b.to_f64()).abs() <= tol * (1.0 + REL_EPS) {
            return Ordering::Equal;
        }
        cmp(a, b)
    }
}

/// Checks that two parts are separated: neither meets the closure of the other.
///
/// Exact on the line. On sampled spaces the parts must be more than `2h` apart; narrower gaps
/// cannot be told apart from contact at resolution `h`.
pub fn separated_check(space: &UnionSpace, a: &AnySet, b: &AnySet) -> Result<(), UnionError> {
    space.check_part(0, a)?;
    space.check_part(1, b)?;
    match space.separation_witness(a, b) {
        None => Ok(()),
        Some(witness) => Err(UnionError::NotSeparated { first: 0, second: 1, witness }),
    }
}

fn prepare(space: &UnionSpace, parts: &[AnySet]) -> Result<Vec<DescriptorReport<AnySet>>, UnionError> {
    if parts.is_empty() {
        return Err(UnionError::NoParts);
    }
    for (i, p) in parts.iter().enumerate() {
        space.check_part(i, p)?;
    }
    let pairs: Vec<(usize, usize)> =
        (0..parts.len()).flat_map(|i| (i + 1..parts.len()).map(move |j| (i, j))).collect();
    let bad = pairs
        .par_iter()
        .filter_map(|&(i, j)| space.separation_witness(&parts[i], &parts[j]).map(|w| (i, j, w)))
        .min_by_key(|&(i, j, _)| (i, j));
    if let Some((first, second, witness)) = bad {
        return Err(UnionError::NotSeparated { first, second, witness });
    }
    let reports = parts.par_iter().map(|p| space.describe(p)).collect::<Result<Vec<_>, _>>()?;
    if let Some(index) = reports.iter().position(|r| r.clopen) {
        return Err(UnionError::Clopen { index });
    }
    Ok(reports)
}

fn union_all(parts: &[AnySet]) -> AnySet {
    parts[1..].iter().fold(parts[0].clone(), |acc, p| acc.union(p))
}

fn infinite_radius_warning(reports: &[DescriptorReport<AnySet>]) -> Option<String> {
    let idx: Vec<String> =
        reports.iter().enumerate().filter(|(_, r)| r.radius.is_infinite()).map(|(i, _)| i.to_string()).collect();
    (!idx.is_empty()).then(|| {
        format!(
            "part(s) {} have infinite radius: the surviving-center rule is applied literally, and the bounds may be loose",
            idx.join(", ")
        )
    })
}

/// Center and radius of `A ∪ B` for nonclopen separated `A`, `B`.
///
/// With `rad A > rad B`: if part of `Cent(A)` stays at least `rad A` away from `∂B`, that part
/// is the center and the radius is `rad A`; otherwise, for finite `rad A`, only
/// `Srad(A∪B) < rad A` is known. Equal radii combine both parts the same way. When
/// `rad A = ∞` and `Srad A ≤ rad B`, the roles pass to `B`. The covered cases bound `Srad`
/// strictly only when the union's supremum is certainly attained; a supremum approached at a
/// gap of `Y` can reach the radius. Every case also applies
/// `Srad(A∪B) ≤ max(rad A, rad B)` and compares `Srad` with each radius through the
/// double-tilde sets, and reports the direct descriptors of the union.
pub fn union_descriptors(space: &UnionSpace, a: &AnySet, b: &AnySet) -> Result<UnionReport, UnionError> {
    let sets = [a.clone(), b.clone()];
    let reports = prepare(space, &sets)?;
    let union = a.union(b);
    let direct = space.describe(&union)?;

    let r = [&reports[0].radius, &reports[1].radius];
    let parts: Vec<UnionPart> = (0..2)
        .map(|i| {
            let other = 1 - i;
            let rep = &reports[i];
            let tilde = space.closer_than(&rep.center, &reports[other].boundary, &rep.radius);
            UnionPart {
                survivors: rep.center.difference(&tilde),
                tilde,
                double_tilde: Some(space.farther_than(&sets[i], &direct.boundary, r[other])),
                report: rep.clone(),
            }
        })
        .collect();

    let mut warnings: Vec<String> = infinite_radius_warning(&reports).into_iter().collect();
    let mut bounds = SradBounds::unknown(space.zero());
    bounds.at_most(&max(r[0], r[1]), false);
    for (i, p) in parts.iter().enumerate() {
        let other = r[1 - i];
        if p.double_tilde.as_ref().is_some_and(|d| !d.is_empty()) {
            bounds.above(other, true);
        } else {
            bounds.at_most(other, false);
        }
    }

    let strict = space.supremum_attained(&sets);
    let order = space.cmp_radii(r[0], r[1]);
    let (l, s) = if order == Ordering::Less { (1, 0) } else { (0, 1) };
    let mut center = None;
    let case = if order == Ordering::Equal {
        let both = parts[0].survivors.union(&parts[1].survivors);
        if !both.is_empty() {
            center = Some(both);
            UnionCase::EqualCentersSurvive
        } else if r[0].is_finite() {
            bounds.at_most(r[0], strict);
            UnionCase::EqualCentersCovered
        } else {
            UnionCase::BoundsOnly
        }
    } else if !parts[l].survivors.is_empty() {
        center = Some(parts[l].survivors.clone());
        UnionCase::LargerCenterSurvives
    } else if r[l].is_finite() {
        bounds.at_most(r[l], strict);
        UnionCase::LargerCenterCovered
    } else if space.cmp_radii(r[s], &reports[l].semi_radius) != Ordering::Less {
        if !parts[s].survivors.is_empty() {
            center = Some(parts[s].survivors.clone());
            UnionCase::UnboundedPartnerSurvives
        } else {
            bounds.at_most(r[s], strict);
            UnionCase::UnboundedPartnerCovered
        }
    } else {
        UnionCase::BoundsOnly
    };
    let radius = center.as_ref().map(|_| match case {
        UnionCase::UnboundedPartnerSurvives => r[s].clone(),
        _ => r[l].clone(),
    });
    if let Some(v) = &radius {
        bounds = SradBounds::exactly(v);
    }
    if !bounds.is_consistent() {
        warnings.push(format!("Srad bounds are inconsistent: {bounds}"));
    }
    if space.tolerance() > 0.0 {
        warnings.push(format!("sampled space: radii within h = {:?} are treated as equal", space.tolerance()));
    }
    Ok(UnionReport { case, larger: l, parts, center, radius, semi_radius: bounds, direct, warnings })
}

/// Center and radius of a union of pairwise separated nonclopen parts.
///
/// `M` holds the parts of maximal radius whose center is not entirely within that radius of
/// another part's boundary. When some center point survives, the union's center is the union
/// of the survivors of `M` and its radius the maximal radius; otherwise only
/// `Srad ≤ max rad` is known. In a path metric space the tilde sets are always empty, so `M`
/// is just the maximal-radius parts with a nonempty center.
pub fn union_descriptors_n(space: &UnionSpace, parts: &[AnySet]) -> Result<UnionNReport, UnionError> {
    let reports = prepare(space, parts)?;
    let direct = space.describe(&union_all(parts))?;
    let mut warnings: Vec<String> = infinite_radius_warning(&reports).into_iter().collect();
    let path_metric = space.path_metric();

    let summaries: Vec<UnionPart> = (0..parts.len())
        .into_par_iter()
        .map(|j| {
            let rep = &reports[j];
            let partners = reports
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(rep.boundary.emptied(), |acc, (_, r)| acc.union(&r.boundary));
            let tilde = space.closer_than(&rep.center, &partners, &rep.radius);
            UnionPart { survivors: rep.center.difference(&tilde), tilde, double_tilde: None, report: rep.clone() }
        })
        .collect();

    if path_metric && summaries.iter().any(|p| !p.tilde.is_empty()) {
        warnings.push("a tilde set is nonempty in a path metric space".into());
    }
    let max_radius = reports.iter().fold(space.zero(), |m, r| max(&m, &r.radius));
    let members: Vec<usize> = summaries
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let survivors = if path_metric { &p.report.center } else { &p.survivors };
            space.cmp_radii(&p.report.radius, &max_radius) == Ordering::Equal && !survivors.is_empty()
        })
        .map(|(j, _)| j)
        .collect();

    let center = members
        .iter()
        .map(|&j| if path_metric { &summaries[j].report.center } else { &summaries[j].survivors })
        .fold(None::<AnySet>, |acc, s| Some(acc.map_or_else(|| s.clone(), |a| a.union(s))))
        .filter(|c| !c.is_empty());
    let (center, radius, semi_radius) = if parts.len() == 1 {
        let r = &reports[0];
        (Some(r.center.clone()), Some(r.radius.clone()), SradBounds::exactly(&r.semi_radius))
    } else if center.is_some() {
        (center, Some(max_radius.clone()), SradBounds::exactly(&max_radius))
    } else {
        let mut b = SradBounds::unknown(space.zero());
        b.at_most(&max_radius, false);
        (None, None, b)
    };
    Ok(UnionNReport { parts: summaries, max_radius, members, path_metric, center, radius, semi_radius, direct, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn set(s: &str) -> AnySet {
        AnySet::Line(s.parse().unwrap())
    }

    fn line() -> UnionSpace {
        UnionSpace::Line(IntervalSet::real_line())
    }

    fn exact(n: i64, d: i64) -> ExtReal {
        ExtReal::exact(ratio(n, d)).unwrap()
    }

    #[test]
    fn separation_on_the_line() {
        assert!(separated_check(&line(), &set("[0,1]"), &set("[2,3]")).is_ok());
        for b in ["(1,2]", "[1,2]"] {
            match separated_check(&line(), &set("[0,1]"), &set(b)) {
                Err(UnionError::NotSeparated { witness: Witness::Line(x), .. }) => assert_eq!(x, int(1)),
                other => panic!("{b}: {other:?}"),
            }
        }
        assert!(matches!(
            separated_check(&line(), &set("[0,1]"), &set("[1/2,2]")),
            Err(UnionError::NotSeparated { .. })
        ));
    }

    #[test]
    fn larger_radius_wins() {
        let u = union_descriptors(&line(), &set("[0,1]"), &set("[2,6]")).unwrap();
        assert_eq!(u.case, UnionCase::LargerCenterSurvives);
        assert_eq!(u.larger, 1);
        assert_eq!(u.center, Some(set("{4}")));
        assert_eq!(u.radius, Some(exact(2, 1)));
        assert_eq!(u.direct.center, set("{4}"));
        assert_eq!(u.direct.radius, exact(2, 1));
    }

    #[test]
    fn unbounded_part_gives_only_bounds() {
        let u = union_descriptors(&line(), &set("[2,inf)"), &set("[0,1]")).unwrap();
        assert_eq!(u.case, UnionCase::BoundsOnly);
        assert_eq!(u.direct.semi_radius, ExtReal::INFINITY);
        assert!(u.semi_radius.contains(&u.direct.semi_radius));
        assert!(u.semi_radius.lower_strict && u.semi_radius.lower == exact(1, 2));
        assert!(!u.warnings.is_empty());
    }

    #[test]
    fn unbounded_partner_hands_over_the_center() {
        // In Y = ℝ ∖ {1}, (0,1) has Srad 1 and no center.
        let y = UnionSpace::Line(set("(-inf,1),(1,inf)").as_line().unwrap().clone());
        let u = union_descriptors(&y, &set("(0,1)"), &set("[3,5]")).unwrap();
        assert_eq!(u.case, UnionCase::UnboundedPartnerSurvives);
        assert_eq!(u.center, Some(set("{4}")));
        assert_eq!(u.direct.center, set("{4}"));
        assert_eq!(u.radius, Some(u.direct.radius.clone()));
    }

    #[test]
    fn unattained_supremum_reaches_the_radius() {
        let y = UnionSpace::Line("(-5,-13/4),(-7/4,1),(2,13/4),(7/2,9/2]".parse().unwrap());
        let a = set("(1/4,1),(2,13/4)");
        let b = set("(-5,-13/4),(-7/4,-1/4),(7/2,9/2]");
        let u = union_descriptors(&y, &a, &b).unwrap();
        assert_eq!(u.case, UnionCase::UnboundedPartnerCovered);
        assert_eq!(u.direct.semi_radius, exact(19, 4));
        assert!(!u.semi_radius.upper_strict && u.semi_radius.contains(&u.direct.semi_radius));
    }

    #[test]
    fn three_parts() {
        let parts = [set("[0,1]"), set("[2,6]"), set("[8,12]")];
        let u = union_descriptors_n(&line(), &parts).unwrap();
        assert_eq!(u.center, Some(set("{4},{10}")));
        assert_eq!(u.radius, Some(exact(2, 1)));
        assert_eq!(u.members, vec![1, 2]);
        assert!(u.path_metric && u.parts.iter().all(|p| p.tilde.is_empty()));
        assert_eq!(u.direct.center, set("{4},{10}"));
        let one = union_descriptors_n(&line(), &parts[..1]).unwrap();
        assert_eq!((one.center, one.radius), (Some(set("{1/2}")), Some(exact(1, 2))));
    }

    #[test]
    fn rejects_clopen_and_foreign_parts() {
        let y = UnionSpace::Line("[0,1],[2,3]".parse().unwrap());
        assert_eq!(union_descriptors(&y, &set("[0,1]"), &set("[2,5/2]")), Err(UnionError::Clopen { index: 0 }));
        assert!(matches!(union_descriptors(&y, &set("[0,1]"), &set("[5,6]")), Err(UnionError::WrongSpace { index: 1, .. })));
        assert_eq!(union_descriptors_n(&y, &[]), Err(UnionError::NoParts));
    }

    #[test]
    fn grid_parts_follow_the_largest_disc() {
        use crate::grid::{rasterize, Csg};
        let h = 0.02;
        let shape = Csg::union(vec![Csg::disc(vec![-1.0, 0.0], 0.5), Csg::disc(vec![1.0, 0.0], 0.3)]);
        let g = Arc::new(rasterize(&shape, None, h).unwrap());
        let left = Mask::from_fn(g.len(), |i| g.occupancy().get(i) && g.center(i)[0] < 0.0);
        let right = g.occupancy().difference(&left);
        let space = UnionSpace::Grid(g.clone());
        let u = union_descriptors(&space, &AnySet::Cells(left), &AnySet::Cells(right)).unwrap();
        assert_eq!(u.case, UnionCase::LargerCenterSurvives);
        assert_eq!(u.larger, 0);
        assert_eq!(u.center.as_ref(), Some(&u.direct.center));
        assert!((u.radius.unwrap().to_f64() - 0.5).abs() <= 2.0 * h);
    }
}
