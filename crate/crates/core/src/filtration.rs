//! Sublevel sets of the distance-to-boundary function `p(a) = d(a, ∂A)` and their Betti
//! numbers, with a scan that looks for `β_{n−1}(P_α) = β_{n−1}(A) + β₀(Cent A)`.

use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ext::{ext_cmp, ExtReal, Regime};
use crate::grid::{boundary_cells, descriptors_grid, distance_to_set, GridRegion, GridShape, CENTER_BAND};
use crate::line::{descriptors_line, topology_line, IntervalError, IntervalSet};
use crate::mask::Mask;
use crate::rational::{int, Rational};
use crate::set::AnySet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiltrationError {
    #[error(transparent)]
    Line(#[from] IntervalError),
    #[error("threshold {0} is in the wrong regime for this domain")]
    Regime(String),
    #[error("Betti-1 is only computed for planar grids, got dimension {0}")]
    NotPlanar(usize),
    #[error("the scan needs n = 1 or 2, got {0}")]
    Dimension(usize),
    #[error("subset has radius 0; the identity is stated for positive radius")]
    ZeroRadius,
    #[error("subset has empty boundary, so p is infinite everywhere")]
    NoBoundary,
    #[error("set does not belong to this domain")]
    WrongSet,
}

#[derive(Debug, Clone)]
enum Domain {
    Line { subset: IntervalSet, ambient: IntervalSet, boundary: Vec<Rational> },
    Grid { region: Arc<GridRegion>, squared: Vec<u64> },
}

/// `p` over a subset, with its sorted distinct critical values.
#[derive(Debug, Clone)]
pub struct Filtration {
    domain: Domain,
    thresholds: Vec<ExtReal>,
}

fn exact(q: Rational) -> ExtReal {
    ExtReal::exact(q).expect("distances are nonnegative")
}

fn float(v: f64) -> ExtReal {
    ExtReal::float(v).expect("distances are nonnegative")
}

fn nearest(boundary: &[Rational], x: &Rational) -> Option<Rational> {
    boundary.iter().map(|b| if b > x { b - x } else { x - b }).min()
}

impl Filtration {
    /// `A ⊆ Y ⊆ ℝ`. Thresholds are the values of `p` where `P_α` can change shape: 0, the
    /// values at piece ends, and the peaks between consecutive boundary points.
    pub fn line(a: &IntervalSet, y: &IntervalSet) -> Result<Self, FiltrationError> {
        let topo = topology_line(a, y)?;
        let boundary = topo.boundary.as_points().expect("a line boundary is a finite point set");
        let mut values = Vec::new();
        if !boundary.is_empty() {
            values.push(int(0));
            values.extend(a.finite_endpoints().iter().filter_map(|e| nearest(&boundary, e)));
            let closure = a.closure();
            for w in boundary.windows(2) {
                let mid = (&w[0] + &w[1]) / int(2);
                if closure.contains(&mid) {
                    values.push((&w[1] - &w[0]) / int(2));
                }
            }
        }
        values.sort();
        values.dedup();
        Ok(Filtration {
            domain: Domain::Line { subset: a.clone(), ambient: y.clone(), boundary },
            thresholds: values.into_iter().map(exact).collect(),
        })
    }

    /// Occupied cells of `region`, with `p` measured to the boundary cells.
    pub fn grid(region: Arc<GridRegion>) -> Self {
        let occ = region.occupancy();
        let squared = distance_to_set(&region, &boundary_cells(&region)).squared;
        let mut values: Vec<u64> = occ.ones().map(|i| squared[i]).filter(|&s| s != crate::grid::UNREACHED).collect();
        values.sort_unstable();
        values.dedup();
        let h = region.h();
        let thresholds = values.iter().map(|&s| float((s as f64).sqrt() * h)).collect();
        Filtration { domain: Domain::Grid { region, squared }, thresholds }
    }

    /// Sorted distinct critical values of `p`.
    pub fn thresholds(&self) -> &[ExtReal] {
        &self.thresholds
    }

    /// 1 on the line, the grid dimension otherwise.
    pub fn dimension(&self) -> usize {
        match &self.domain {
            Domain::Line { .. } => 1,
            Domain::Grid { region, .. } => region.dim(),
        }
    }

    pub fn subset(&self) -> AnySet {
        match &self.domain {
            Domain::Line { subset, .. } => AnySet::Line(subset.clone()),
            Domain::Grid { region, .. } => AnySet::Cells(region.occupancy().clone()),
        }
    }

    /// `P_α = {a ∈ A : p(a) ≤ α}`, exact on the line.
    pub fn sublevel(&self, alpha: &ExtReal) -> Result<AnySet, FiltrationError> {
        match &self.domain {
            Domain::Line { subset, boundary, .. } => {
                if alpha.is_infinite() {
                    return Ok(AnySet::Line(subset.clone()));
                }
                let r = alpha.as_exact().ok_or_else(|| FiltrationError::Regime(alpha.to_string()))?;
                Ok(AnySet::Line(subset.intersection(&IntervalSet::around(boundary, r, true))))
            }
            Domain::Grid { region, squared } => {
                let occ = region.occupancy();
                if alpha.is_infinite() {
                    return Ok(AnySet::Cells(occ.clone()));
                }
                if alpha.regime() != Some(Regime::Float) {
                    return Err(FiltrationError::Regime(alpha.to_string()));
                }
                // Squared integer comparison: s·h² ≤ α² ⇔ s ≤ (α/h)².
                let cut = (alpha.to_f64() / region.h()).powi(2) * (1.0 + 1e-12);
                Ok(AnySet::Cells(Mask::from_fn(occ.len(), |i| occ.get(i) && squared[i] as f64 <= cut)))
            }
        }
    }

    /// Connected components: pieces on the line, face-adjacent cell clusters on grids.
    pub fn betti0(&self, s: &AnySet) -> Result<usize, FiltrationError> {
        match (&self.domain, s) {
            (Domain::Line { .. }, AnySet::Line(s)) => Ok(betti0_line(s)),
            (Domain::Grid { region, .. }, AnySet::Cells(m)) => Ok(betti0_cells(&region.grid(), m)),
            _ => Err(FiltrationError::WrongSet),
        }
    }

    /// Holes of a planar cell set; see [`betti1_planar`].
    pub fn betti1(&self, s: &AnySet) -> Result<usize, FiltrationError> {
        match (&self.domain, s) {
            (Domain::Grid { region, .. }, AnySet::Cells(m)) => betti1_planar(&region.grid(), m),
            (Domain::Line { .. }, AnySet::Line(_)) => Err(FiltrationError::NotPlanar(1)),
            _ => Err(FiltrationError::WrongSet),
        }
    }
}

pub fn betti0_line(s: &IntervalSet) -> usize {
    s.pieces().len()
}

/// Components of `s` under face adjacency.
pub fn betti0_cells(grid: &GridShape, s: &Mask) -> usize {
    let mut uf = UnionFind::<usize>::new(grid.len());
    for i in s.ones() {
        for j in grid.face_neighbors(i) {
            if j > i && s.get(j) {
                uf.union(i, j);
            }
        }
    }
    let mut roots: Vec<usize> = s.ones().map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Components of `s` when cells sharing any corner are adjacent: the components of the union
/// of the closed cells.
pub fn betti0_closed_cells(grid: &GridShape, s: &Mask) -> usize {
    let n = grid.dim();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|k| (0..n).map(|a| (k / 3usize.pow(a as u32) % 3) as i64 - 1).collect::<Vec<i64>>())
        .filter(|o| o.iter().any(|&d| d != 0))
        .collect();
    let mut uf = UnionFind::<usize>::new(grid.len());
    for i in s.ones() {
        let c = grid.unravel(i);
        for o in &offsets {
            let nb: Option<Vec<usize>> = c
                .iter()
                .zip(o)
                .zip(&grid.extent)
                .map(|((&x, &d), &e)| {
                    let y = x as i64 + d;
                    (0..e as i64).contains(&y).then_some(y as usize)
                })
                .collect();
            if let Some(nb) = nb {
                let j = grid.ravel(&nb);
                if j > i && s.get(j) {
                    uf.union(i, j);
                }
            }
        }
    }
    let mut roots: Vec<usize> = s.ones().map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// First Betti number of a planar cell set: bounded components of the complement.
///
/// The set is 4-connected and its complement 8-connected, the pairing under which the count
/// equals rank H₁. Complement cells on the grid edge join the unbounded component.
pub fn betti1_planar(grid: &GridShape, s: &Mask) -> Result<usize, FiltrationError> {
    if grid.dim() != 2 {
        return Err(FiltrationError::NotPlanar(grid.dim()));
    }
    let (rows, cols) = (grid.extent[0], grid.extent[1]);
    let outside = rows * cols;
    let mut uf = UnionFind::<usize>::new(outside + 1);
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if s.get(i) {
                continue;
            }
            if r == 0 || c == 0 || r + 1 == rows || c + 1 == cols {
                uf.union(i, outside);
            }
            // Forward half of the 8-neighbourhood.
            for (dr, dc) in [(0i64, 1i64), (1, -1), (1, 0), (1, 1)] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr < rows as i64 && nc >= 0 && nc < cols as i64 {
                    let j = nr as usize * cols + nc as usize;
                    if !s.get(j) {
                        uf.union(i, j);
                    }
                }
            }
        }
    }
    let out = uf.find(outside);
    let mut roots: Vec<usize> = (0..outside).filter(|&i| !s.get(i)).map(|i| uf.find(i)).filter(|&r| r != out).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// Size of a sublevel set: length on the line, cell count on grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SetSize {
    Length(ExtReal),
    Cells(usize),
}

impl fmt::Display for SetSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSize::Length(v) => write!(f, "{v}"),
            SetSize::Cells(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: ExtReal,
    pub betti0: usize,
    /// Planar grids only.
    pub betti1: Option<usize>,
    pub size: SetSize,
    /// `β_{n−1}(P_α)`.
    pub betti_top: usize,
    pub center_excluded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exists,
    Absent,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Exists => "exists",
            Verdict::Absent => "absent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub dimension: usize,
    pub radius: ExtReal,
    /// `β_{n−1}(A)`.
    pub betti_subset: usize,
    pub betti0_center: usize,
    /// `β_{n−1}(A) + β₀(Cent A)`, the count the scan looks for.
    pub target: usize,
    pub rows: Vec<ScanRow>,
    /// First scanned `α` with `β_{n−1}(P_α)` equal to the target.
    pub alpha_star: Option<ExtReal>,
    pub verdict: Verdict,
    /// `Cent A ∩ P_α = ∅` at every scanned `α`.
    pub center_excluded: bool,
    pub notes: Vec<String>,
}

fn line_measure(s: &IntervalSet) -> ExtReal {
    s.measure().map(exact).unwrap_or(ExtReal::INFINITY)
}

/// Thresholds below `rad`, the midpoints between them, and one value past the last.
fn line_alphas(thresholds: &[ExtReal], radius: &ExtReal) -> Vec<ExtReal> {
    let below: Vec<Rational> = thresholds
        .iter()
        .filter(|t| radius.is_infinite() || ext_cmp(t, radius).expect("same regime").is_lt())
        .map(|t| t.as_exact().expect("line thresholds are exact").clone())
        .collect();
    let mut out = Vec::new();
    for (k, t) in below.iter().enumerate() {
        out.push(t.clone());
        let next = match (below.get(k + 1), radius.as_exact()) {
            (Some(n), _) => n.clone(),
            (None, Some(r)) => r.clone(),
            (None, None) => t + int(2),
        };
        out.push((t + &next) / int(2));
    }
    out.into_iter().map(exact).collect()
}

/// Midpoints between consecutive distinct values, kept while below `rad − τ`. Each one's
/// sublevel set is that of the lower value, and the midpoint keeps ties off the comparison.
fn grid_alphas(thresholds: &[ExtReal], radius: f64, tau: f64) -> Vec<ExtReal> {
    let v: Vec<f64> = thresholds.iter().map(ExtReal::to_f64).collect();
    v.windows(2).map(|w| (w[0] + w[1]) / 2.0).filter(|&a| a < radius - tau).map(float).collect()
}

/// Scans `α` below `rad A` for `β_{n−1}(P_α) = β_{n−1}(A) + β₀(Cent A)` and checks that no
/// sublevel set below the radius meets the center. `alphas` overrides the default scan.
///
/// The result is evidence for one instance, nothing more. Grid counts are those of the
/// digital sets at resolution `h`.
pub fn conjecture_scan(f: &Filtration, alphas: Option<Vec<ExtReal>>) -> Result<ConjectureReport, FiltrationError> {
    let n = f.dimension();
    if n > 2 {
        return Err(FiltrationError::Dimension(n));
    }
    let mut notes = Vec::new();
    let (center, radius, default_alphas) = match &f.domain {
        Domain::Line { subset, ambient, .. } => {
            let r = descriptors_line(subset, ambient)?;
            if r.clopen {
                return Err(FiltrationError::NoBoundary);
            }
            let alphas = line_alphas(&f.thresholds, &r.radius);
            (AnySet::Line(r.center), r.radius, alphas)
        }
        Domain::Grid { region, .. } => {
            let (r, _) = descriptors_grid(region);
            if r.clopen {
                return Err(FiltrationError::NoBoundary);
            }
            let tau = CENTER_BAND * region.h();
            notes.push(format!(
                "grid at h = {:?}: Betti numbers of the digital sets (face-adjacent set, 8-adjacent complement); \
                 scan stops at rad - {tau:?}, the center band",
                region.h()
            ));
            let alphas = grid_alphas(&f.thresholds, r.radius.to_f64(), tau);
            (AnySet::Cells(r.center), r.radius, alphas)
        }
    };
    if radius.is_zero() {
        return Err(FiltrationError::ZeroRadius);
    }
    let top = |s: &AnySet| if n == 2 { f.betti1(s) } else { f.betti0(s) };
    let subset = f.subset();
    let betti_subset = top(&subset)?;
    // A center band sampling a curve is a staircase of cells touching at corners, so its
    // components are counted on the closed cells.
    let betti0_center = match (&f.domain, &center) {
        (Domain::Grid { region, .. }, AnySet::Cells(m)) => {
            let closed = betti0_closed_cells(&region.grid(), m);
            let faces = betti0_cells(&region.grid(), m);
            if faces != closed {
                notes.push(format!("center band: {closed} component(s) as closed cells, {faces} under face adjacency"));
            }
            closed
        }
        _ => f.betti0(&center)?,
    };
    let target = betti_subset + betti0_center;

    let alphas = alphas.unwrap_or(default_alphas);
    let rows = alphas
        .par_iter()
        .map(|alpha| {
            let p = f.sublevel(alpha)?;
            let betti0 = f.betti0(&p)?;
            let betti1 = if n == 2 { Some(f.betti1(&p)?) } else { None };
            let size = match &p {
                AnySet::Line(s) => SetSize::Length(line_measure(s)),
                AnySet::Cells(m) => SetSize::Cells(m.count()),
            };
            let center_excluded = p.intersection(&center).is_empty();
            Ok(ScanRow { alpha: alpha.clone(), betti0, betti1, size, betti_top: betti1.unwrap_or(betti0), center_excluded })
        })
        .collect::<Result<Vec<_>, FiltrationError>>()?;

    if let Some(first) = rows.first() {
        if first.alpha.is_zero() && first.size == SetSize::Length(ExtReal::zero_exact()) && first.betti0 == 0 {
            notes.push("P_0 = ∂A ∩ A is empty: the boundary lies outside A".into());
        }
    }
    let alpha_star = rows.iter().find(|r| r.betti_top == target).map(|r| r.alpha.clone());
    let verdict = if alpha_star.is_some() { Verdict::Exists } else { Verdict::Absent };
    let center_excluded = rows.iter().all(|r| r.center_excluded);
    Ok(ConjectureReport {
        dimension: n,
        radius,
        betti_subset,
        betti0_center,
        target,
        rows,
        alpha_star,
        verdict,
        center_excluded,
        notes,
    })
}
