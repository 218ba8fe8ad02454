use rayon::prelude::*;
use serde::Serialize;

use super::edt::{distance_to_set, DistanceField};
use super::region::{boundary_cells, GridRegion};
use super::GridError;
use crate::ext::ExtReal;
use crate::mask::Mask;
use crate::report::DescriptorReport;

/// Center bands keep every cell within `CENTER_BAND · h` of the maximum.
pub const CENTER_BAND: f64 = 1.0;

/// Distance fields behind a grid report.
#[derive(Debug, Clone)]
pub struct GridFields {
    pub to_boundary: DistanceField,
    pub to_complement: DistanceField,
}

fn ext(v: f64) -> ExtReal {
    ExtReal::float(v).expect("distances are nonnegative")
}

/// Largest squared value over `a` and the cells within the center band of it.
fn banded(a: &Mask, f: &DistanceField) -> (u64, Mask) {
    let best = a.ones().map(|i| f.squared[i]).max().unwrap_or(0);
    let cut = ((best as f64).sqrt() - CENTER_BAND).max(0.0);
    // Compare squared integers against the cut, rounded down so the band never shrinks.
    let cut2 = (cut * cut * (1.0 - 1e-12)).floor() as u64;
    (best, Mask::from_fn(a.len(), |i| a.get(i) && f.squared[i] >= cut2))
}

/// Squared lattice diameter of the occupied cells.
fn diameter_squared(g: &GridRegion) -> u64 {
    let pts: Vec<Vec<i64>> = g.occupancy().ones().map(|i| g.lattice(i)).collect();
    let candidates = match g.dim() {
        1 => {
            let lo = pts.iter().min();
            let hi = pts.iter().max();
            lo.into_iter().chain(hi).cloned().collect()
        }
        2 => convex_hull(pts.iter().map(|p| (p[0], p[1])).collect()).into_iter().map(|(x, y)| vec![x, y]).collect(),
        _ => column_extremes(&pts),
    };
    candidates
        .par_iter()
        .map(|p| {
            candidates
                .iter()
                .map(|q| p.iter().zip(q).map(|(a, b)| (a - b).pow(2) as u64).sum::<u64>())
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Lowest and highest cell of every column along the last axis; the farthest pair of a
/// lattice set is among them.
fn column_extremes(pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut cols: std::collections::BTreeMap<&[i64], (i64, i64)> = Default::default();
    for p in pts {
        let (head, last) = p.split_at(p.len() - 1);
        let e = cols.entry(head).or_insert((last[0], last[0]));
        e.0 = e.0.min(last[0]);
        e.1 = e.1.max(last[0]);
    }
    cols.into_iter()
        .flat_map(|(head, (lo, hi))| {
            let mut a = head.to_vec();
            a.push(lo);
            let mut b = head.to_vec();
            b.push(hi);
            [a, b]
        })
        .collect()
}

/// Monotone-chain hull, counter-clockwise, collinear points dropped.
fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Descriptors of a rasterized region.
///
/// Distances are measured between cell centers: to the boundary cells for the radius and
/// center, to the empty cells for the quasi variants. Centers are bands of width
/// `CENTER_BAND · h` below the maximum. Every cell's distance to the empty cells is at most
/// `h` above its distance to the boundary cells, so `SQrad ≤ rad` holds up to `h`.
pub fn descriptors_grid(g: &GridRegion) -> (DescriptorReport<Mask>, GridFields) {
    let occ = g.occupancy();
    let n = g.len();
    let h = g.h();
    let boundary = boundary_cells(g);
    let to_boundary = distance_to_set(g, &boundary);
    let to_complement = distance_to_set(g, &occ.complement());
    let mut notes = vec![
        "grid: suprema are attained, so semi-radius equals radius".to_string(),
        format!("centers are bands {CENTER_BAND}h = {:?} below the maximum", CENTER_BAND * h),
    ];
    if g.thin() {
        notes.push("thin: shape has lower-dimensional parts, descriptors hold to O(h)".into());
    }

    let interior_nonempty = occ.ones().any(|i| to_complement.squared[i] > 1);
    let report = if occ.none() {
        DescriptorReport {
            subset: occ.clone(),
            boundary,
            interior_nonempty: false,
            clopen: true,
            center: Mask::empty(n),
            radius: ExtReal::INFINITY,
            semi_radius: ext(0.0),
            quasi_center: Mask::empty(n),
            quasi_radius: ExtReal::INFINITY,
            semi_quasi_radius: ext(0.0),
            diameter: ext(0.0),
            notes,
        }
    } else {
        let (rb, center) = banded(occ, &to_boundary);
        let (rc, quasi_center) = banded(occ, &to_complement);
        let radius = ext((rb as f64).sqrt() * h);
        let quasi_radius = ext((rc as f64).sqrt() * h);
        DescriptorReport {
            subset: occ.clone(),
            boundary,
            interior_nonempty,
            clopen: false,
            center,
            radius: radius.clone(),
            semi_radius: radius,
            quasi_center,
            quasi_radius: quasi_radius.clone(),
            semi_quasi_radius: quasi_radius,
            diameter: ext((diameter_squared(g) as f64).sqrt() * h),
            notes,
        }
    };
    (report, GridFields { to_boundary, to_complement })
}

/// Two-sided check of the largest inscribed ball, each clause over all relevant cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// Every cell within `r - h` of a returned center is occupied.
    pub inside: bool,
    /// No occupied cell is farther than `r + h` from the empty cells.
    pub maximal: bool,
    /// First offending cell, if any.
    pub witness: Option<usize>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.inside && self.maximal
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InscribedBalls {
    /// Cells attaining the largest distance to the empty cells.
    pub centers: Mask,
    pub radius: ExtReal,
    pub certificate: Certificate,
}

/// Largest balls inside the region, with a certificate that does not rely on the distance
/// transform.
pub fn largest_inscribed_balls(g: &GridRegion) -> Result<InscribedBalls, GridError> {
    let occ = g.occupancy();
    if occ.none() {
        return Err(GridError::EmptyRegion);
    }
    let empty = occ.complement();
    if empty.none() {
        return Err(GridError::NoLargestBall);
    }
    let field = distance_to_set(g, &empty);
    let best = occ.ones().map(|i| field.squared[i]).max().expect("nonempty");
    let centers = Mask::from_fn(g.len(), |i| occ.get(i) && field.squared[i] == best);

    let grid = g.grid();
    let dim = g.dim();
    let coords: Vec<Vec<i64>> = (0..g.len()).map(|i| grid.unravel(i).iter().map(|&c| c as i64).collect()).collect();
    let sq = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| (x - y).pow(2)).sum::<i64>();
    let m = best as i64;

    // (a) |o| ≤ √m − 1, i.e. |o|² + 2|o| + 1 ≤ m, scanned over the box of offsets.
    let reach = ((best as f64).sqrt().floor() as i64).max(0);
    let offsets: Vec<Vec<i64>> = {
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|o| (-reach..=reach).map(move |d| [o.clone(), vec![d]].concat()))
                .collect();
        }
        out.into_iter()
            .filter(|o| {
                let s: i64 = o.iter().map(|d| d * d).sum();
                let rhs = m - 1 - s;
                rhs >= 0 && 4 * s <= rhs * rhs
            })
            .collect()
    };
    let bad_inside = centers.ones().collect::<Vec<_>>().into_par_iter().find_map_first(|c| {
        offsets.iter().find_map(|o| {
            let k: Vec<i64> = coords[c].iter().zip(o).map(|(a, b)| a + b).collect();
            let inside_grid = k.iter().zip(&grid.extent).all(|(&x, &e)| x >= 0 && (x as usize) < e);
            let cell = inside_grid.then(|| grid.ravel(&k.iter().map(|&x| x as usize).collect::<Vec<_>>()));
            match cell {
                Some(j) if occ.get(j) => None,
                Some(j) => Some(j),
                None => Some(c),
            }
        })
    });

    // (b) Every occupied cell has an empty cell within r + h: (|v| ≤ √m + 1) ⇔ |v|² ≤ m + 2√m + 1.
    // The nearest empty cell always has an occupied face neighbour, so only those are scanned.
    let rim: Vec<usize> = empty.ones().filter(|&j| grid.face_neighbors(j).any(|i| occ.get(i))).collect();
    let within = |s: i64| s <= m + 1 || (s - m - 1) * (s - m - 1) <= 4 * m;
    let bad_maximal = occ.ones().collect::<Vec<_>>().into_par_iter().find_map_first(|i| {
        (!rim.iter().any(|&j| {
            let s = sq(&coords[i], &coords[j]);
            within(s)
        }))
        .then_some(i)
    });

    Ok(InscribedBalls {
        centers,
        radius: ext((best as f64).sqrt() * g.h()),
        certificate: Certificate {
            inside: bad_inside.is_none(),
            maximal: bad_maximal.is_none(),
            witness: bad_inside.or(bad_maximal),
        },
    })
}
