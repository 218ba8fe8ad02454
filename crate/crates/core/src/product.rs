//! Max-metric products: closed-form centers through threshold sets, and a sampled oracle.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::ext::ExtReal;
use crate::finite::{descriptors_bf, BlockMetric, FiniteSpace, MetricError, REL_EPS};
use crate::grid::{cell_cap, descriptors_grid, GridError, GridRegion};
use crate::line::{descriptors_line, Bound, Interval, IntervalError, IntervalSet};
use crate::mask::Mask;
use crate::rational::{rational_from_f64, rational_to_f64, Rational};
use crate::report::DescriptorReport;
use crate::set::AnySet;

#[derive(Debug, Error)]
pub enum ProductError {
    #[error(transparent)]
    Line(#[from] IntervalError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("a product needs at least two factors, got {0}")]
    TooFewFactors(usize),
    #[error("factor {0} is unbounded; the oracle samples bounded factors only")]
    Unbounded(usize),
    #[error("oracle would sample {points} points, above the cap of {cap}")]
    TooManyPoints { points: String, cap: usize },
    #[error("invalid oracle spacing {0}")]
    InvalidSpacing(f64),
}

/// One factor of a product, owned by the engine that describes it.
#[derive(Debug, Clone)]
pub enum Factor {
    /// Exact: a subset of a subspace `ambient` of the real line.
    Line { set: IntervalSet, ambient: IntervalSet },
    Finite { space: Arc<FiniteSpace>, subset: Mask },
    /// Euclidean region; its occupied cells are the subset.
    Grid(Arc<GridRegion>),
}

impl Factor {
    pub fn line(set: IntervalSet, ambient: IntervalSet) -> Factor {
        Factor::Line { set, ambient }
    }

    pub fn summarize(&self) -> Result<FactorSummary, ProductError> {
        Ok(match self {
            Factor::Line { set, ambient } => {
                let r = descriptors_line(set, ambient)?;
                FactorSummary {
                    subset: AnySet::Line(r.subset),
                    center: AnySet::Line(r.center),
                    radius: r.radius,
                    semi_radius: r.semi_radius,
                    clopen: r.clopen,
                    to_boundary: ToBoundary::Line(r.boundary),
                }
            }
            Factor::Finite { space, subset } => {
                let (r, f) = crate::finite::descriptors_bf_with_fields(space, subset);
                FactorSummary {
                    subset: AnySet::Cells(r.subset),
                    center: AnySet::Cells(r.center),
                    radius: r.radius,
                    semi_radius: r.semi_radius,
                    clopen: r.clopen,
                    to_boundary: ToBoundary::Values(f.to_boundary),
                }
            }
            Factor::Grid(g) => {
                let (r, f) = descriptors_grid(g);
                FactorSummary {
                    subset: AnySet::Cells(r.subset),
                    center: AnySet::Cells(r.center),
                    radius: r.radius,
                    semi_radius: r.semi_radius,
                    clopen: r.clopen,
                    to_boundary: ToBoundary::Values(f.to_boundary.values()),
                }
            }
        })
    }
}

#[derive(Debug, Clone)]
enum ToBoundary {
    /// The boundary itself; distances are exact.
    Line(IntervalSet),
    Values(Vec<f64>),
}

/// Descriptors of one factor, plus what is needed to form its threshold sets.
#[derive(Debug, Clone)]
pub struct FactorSummary {
    pub subset: AnySet,
    pub center: AnySet,
    pub radius: ExtReal,
    pub semi_radius: ExtReal,
    pub clopen: bool,
    to_boundary: ToBoundary,
}

impl FactorSummary {
    /// `{b ∈ B : d(b, ∂B) ≥ t}`.
    pub fn hat(&self, t: &ExtReal) -> AnySet {
        match (&self.to_boundary, &self.subset) {
            (ToBoundary::Line(boundary), AnySet::Line(b)) => AnySet::Line(line_hat(b, boundary, t)),
            (ToBoundary::Values(v), AnySet::Cells(b)) => {
                let keep = |d: f64| match t.to_f64() {
                    t if t.is_infinite() => d.is_infinite(),
                    t => d >= t - REL_EPS * t.max(1.0),
                };
                AnySet::Cells(Mask::from_fn(b.len(), |i| b.get(i) && keep(v[i])))
            }
            _ => unreachable!("summary parts come from one engine"),
        }
    }
}

fn line_hat(b: &IntervalSet, boundary: &IntervalSet, t: &ExtReal) -> IntervalSet {
    if t.is_infinite() {
        return if boundary.is_empty() { b.clone() } else { IntervalSet::empty() };
    }
    let t = match t.as_exact() {
        Some(q) => q.clone(),
        None => rational_from_f64(t.to_f64()).expect("finite threshold"),
    };
    if t.is_zero() {
        return b.clone();
    }
    // Points closer than t to the boundary: the open t-neighbourhood of each component.
    let near: Vec<Interval> = boundary
        .components()
        .iter()
        .map(|c| {
            let shift = |bound: Option<&Bound>, by: &Rational| match bound {
                Some(Bound::Finite(q)) => Bound::Finite(q + by),
                Some(other) => other.clone(),
                None => unreachable!("components are nonempty"),
            };
            Interval::new(shift(c.inf(), &-t.clone()), false, shift(c.sup(), &t), false)
        })
        .collect();
    b.difference(&IntervalSet::normalize(near).expect("neighbourhoods are well formed"))
}

/// `{b ∈ B : d(b, ∂B) ≥ t}` for a single factor.
pub fn hat_set(factor: &Factor, t: &ExtReal) -> Result<AnySet, ProductError> {
    Ok(factor.summarize()?.hat(t))
}

/// Which closed form produced a product center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductCase {
    /// Some factor is empty, so the product is.
    EmptyFactor,
    /// Both factors clopen: the center is the whole product.
    BothClopen,
    /// One factor clopen, the other without center: no center.
    ClopenWithoutCenter,
    /// Neither factor has a center: no center.
    NeitherHasCenter,
    /// `rad A ≤ rad B`: `Cent(A) × B̂` with threshold `rad A`.
    HatSecond,
    /// `rad B < rad A`: `Â × Cent(B)` with threshold `rad B`.
    HatFirst,
    /// One radius is infinite and the finite one reaches its semi-radius: no center.
    SemiRadiusReached,
    /// n-ary formula `∏ Â_i` with threshold `min rad A_i`.
    Formula,
}

impl ProductCase {
    pub fn as_str(self) -> &'static str {
        match self {
            ProductCase::EmptyFactor => "empty-factor",
            ProductCase::BothClopen => "both-clopen",
            ProductCase::ClopenWithoutCenter => "clopen-without-center",
            ProductCase::NeitherHasCenter => "neither-has-center",
            ProductCase::HatSecond => "hat-second",
            ProductCase::HatFirst => "hat-first",
            ProductCase::SemiRadiusReached => "semi-radius-reached",
            ProductCase::Formula => "formula",
        }
    }
}

impl fmt::Display for ProductCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Center of a product, always itself a product of factor sets.
#[derive(Debug, Clone)]
pub struct ProductCenter {
    pub center: Vec<AnySet>,
    pub radius: ExtReal,
    pub threshold: ExtReal,
    pub case: ProductCase,
}

impl ProductCenter {
    pub fn is_empty(&self) -> bool {
        self.center.iter().any(AnySet::is_empty)
    }
}

impl fmt::Display for ProductCenter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.center.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Brings values to a common regime: floats win once any value is a float.
fn unify(values: &[&ExtReal]) -> Vec<ExtReal> {
    let float = values.iter().any(|v| v.as_float().is_some());
    values.iter().map(|v| if float { v.to_float_regime() } else { (*v).clone() }).collect()
}

fn le(a: &ExtReal, b: &ExtReal) -> bool {
    a.partial_cmp(b).is_some_and(Ordering::is_le)
}

fn empty_like(s: &AnySet) -> AnySet {
    match s {
        AnySet::Line(_) => AnySet::Line(IntervalSet::empty()),
        AnySet::Cells(m) => AnySet::Cells(Mask::empty(m.len())),
    }
}

fn no_center(a: &FactorSummary, b: &FactorSummary, case: ProductCase) -> ProductCenter {
    ProductCenter {
        center: vec![empty_like(&a.subset), empty_like(&b.subset)],
        radius: ExtReal::INFINITY,
        threshold: ExtReal::INFINITY,
        case,
    }
}

/// Center and radius of `A × B` under the max metric, with the case that applied.
pub fn product_center(a: &Factor, b: &Factor) -> Result<ProductCenter, ProductError> {
    Ok(product_center_of(&a.summarize()?, &b.summarize()?))
}

pub fn product_center_of(a: &FactorSummary, b: &FactorSummary) -> ProductCenter {
    if a.subset.is_empty() || b.subset.is_empty() {
        return no_center(a, b, ProductCase::EmptyFactor);
    }
    let v = unify(&[&a.radius, &b.radius, &a.semi_radius, &b.semi_radius]);
    let (ra, rb, sa, sb) = (&v[0], &v[1], &v[2], &v[3]);
    if ra.is_infinite() && rb.is_infinite() {
        return match (a.clopen, b.clopen) {
            (true, true) => ProductCenter {
                center: vec![a.subset.clone(), b.subset.clone()],
                radius: ExtReal::INFINITY,
                threshold: ExtReal::INFINITY,
                case: ProductCase::BothClopen,
            },
            (true, false) | (false, true) => no_center(a, b, ProductCase::ClopenWithoutCenter),
            (false, false) => no_center(a, b, ProductCase::NeitherHasCenter),
        };
    }
    if le(ra, rb) {
        if rb.is_infinite() && le(sb, ra) {
            return no_center(a, b, ProductCase::SemiRadiusReached);
        }
        ProductCenter {
            center: vec![a.center.clone(), b.hat(ra)],
            radius: ra.clone(),
            threshold: ra.clone(),
            case: ProductCase::HatSecond,
        }
    } else {
        if ra.is_infinite() && le(sa, rb) {
            return no_center(a, b, ProductCase::SemiRadiusReached);
        }
        ProductCenter {
            center: vec![a.hat(rb), b.center.clone()],
            radius: rb.clone(),
            threshold: rb.clone(),
            case: ProductCase::HatFirst,
        }
    }
}

/// `∏ Â_i` with threshold `min rad A_i`. The radius is that threshold when the center is
/// nonempty and `∞` otherwise, which is `min rad A_i` whenever the radii are all finite or
/// all infinite.
pub fn product_center_n(factors: &[Factor]) -> Result<ProductCenter, ProductError> {
    if factors.len() < 2 {
        return Err(ProductError::TooFewFactors(factors.len()));
    }
    let summaries = factors.iter().map(Factor::summarize).collect::<Result<Vec<_>, _>>()?;
    Ok(product_center_n_of(&summaries))
}

pub fn product_center_n_of(summaries: &[FactorSummary]) -> ProductCenter {
    let radii = unify(&summaries.iter().map(|s| &s.radius).collect::<Vec<_>>());
    let t = radii
        .iter()
        .cloned()
        .reduce(|x, y| if le(&x, &y) { x } else { y })
        .unwrap_or(ExtReal::INFINITY);
    let center: Vec<AnySet> = summaries.iter().map(|s| s.hat(&t)).collect();
    let empty = center.iter().any(AnySet::is_empty);
    ProductCenter {
        center,
        radius: if empty { ExtReal::INFINITY } else { t.clone() },
        threshold: t,
        case: if summaries.iter().any(|s| s.subset.is_empty()) { ProductCase::EmptyFactor } else { ProductCase::Formula },
    }
}

/// A sampled product and its brute-force descriptors.
#[derive(Debug, Clone)]
pub struct ProductOracle {
    pub space: FiniteSpace,
    pub report: DescriptorReport<Mask>,
}

/// Samples of a bounded line factor at `k·h` within `3h` of the set, restricted to the ambient.
fn sample_line(set: &IntervalSet, ambient: &IntervalSet, h: &Rational, index: usize) -> Result<(Vec<f64>, Vec<bool>), ProductError> {
    let (Some(Bound::Finite(lo)), Some(Bound::Finite(hi))) = (set.inf(), set.sup()) else {
        return Err(ProductError::Unbounded(index));
    };
    let three = Rational::from_integer(3.into());
    let k_lo = ((lo - &three * h) / h).ceil().to_integer();
    let k_hi = ((hi + &three * h) / h).floor().to_integer();
    let mut coords = Vec::new();
    let mut member = Vec::new();
    let mut k = k_lo;
    while k <= k_hi {
        let x = Rational::from_integer(k.clone()) * h;
        if ambient.contains(&x) {
            coords.push(rational_to_f64(&x));
            member.push(set.contains(&x));
        }
        k += 1;
    }
    Ok((coords, member))
}

/// Rasterizes the product at step `h` under the max metric and describes it by brute force.
///
/// Line factors are sampled at `k·h`; finite factors are used as given; grid factors
/// contribute all their cells.
pub fn product_oracle(factors: &[Factor], h: f64) -> Result<ProductOracle, ProductError> {
    product_oracle_with_cap(factors, h, cell_cap())
}

/// [`product_oracle`] with an explicit bound on the number of sampled points.
pub fn product_oracle_with_cap(factors: &[Factor], h: f64, cap: usize) -> Result<ProductOracle, ProductError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(ProductError::InvalidSpacing(h));
    }
    let hq = rational_from_f64(h).ok_or(ProductError::InvalidSpacing(h))?;
    let mut parts: Vec<(Arc<FiniteSpace>, Mask)> = Vec::new();
    let mut samples = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        match f {
            Factor::Line { set, ambient } => samples.push((i, sample_line(set, ambient, &hq, i)?)),
            Factor::Finite { .. } | Factor::Grid(_) => {}
        }
    }
    let sizes: Vec<usize> = factors
        .iter()
        .enumerate()
        .map(|(i, f)| match f {
            Factor::Line { .. } => samples.iter().find(|s| s.0 == i).map_or(0, |s| s.1 .0.len()),
            Factor::Finite { space, .. } => space.len(),
            Factor::Grid(g) => g.len(),
        })
        .collect();
    let total = sizes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    if total.is_none_or(|t| t > cap) {
        let points = total.map_or_else(|| "more than usize::MAX".to_string(), |t| t.to_string());
        return Err(ProductError::TooManyPoints { points, cap });
    }
    let mut samples = samples.into_iter();
    for f in factors {
        parts.push(match f {
            Factor::Line { .. } => {
                let (_, (coords, member)) = samples.next().expect("one sample per line factor");
                (Arc::new(FiniteSpace::from_coords(coords, BlockMetric::euclidean(1), h)?), Mask::from_bits(member))
            }
            Factor::Finite { space, subset } => (space.clone(), subset.clone()),
            Factor::Grid(g) => {
                let coords: Vec<f64> = (0..g.len()).flat_map(|i| g.center(i)).collect();
                let space = FiniteSpace::from_coords(coords, BlockMetric::euclidean(g.dim()), g.h())?;
                (Arc::new(space), g.occupancy().clone())
            }
        });
    }
    let masks: Vec<Mask> = parts.iter().map(|p| p.1.clone()).collect();
    let space = FiniteSpace::product(parts.into_iter().map(|p| p.0).collect())?;
    let subset = Mask::from_fn(space.len(), |i| {
        let idx = space.product_index(i).expect("product");
        idx.iter().zip(&masks).all(|(&k, m)| m.get(k))
    });
    let report = descriptors_bf(&space, &subset);
    Ok(ProductOracle { space, report })
}
