use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::csg::Csg;
use super::GridError;
use crate::mask::Mask;

/// A shape sampled at the cell centers `k·h` inside a bounding box.
///
/// Cells are stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRegion {
    shape: Csg,
    h: f64,
    /// Index `k` of the first cell on each axis.
    lo: Vec<i64>,
    extent: Vec<usize>,
    occupancy: Mask,
}

/// Cell-index arithmetic shared by the grid algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridShape {
    pub extent: Vec<usize>,
    pub strides: Vec<usize>,
}

impl GridShape {
    pub fn new(extent: &[usize]) -> Self {
        let mut strides = vec![1; extent.len()];
        for i in (0..extent.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * extent[i + 1];
        }
        GridShape { extent: extent.to_vec(), strides }
    }

    pub fn len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn unravel(&self, mut i: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let c = i / s;
                i %= s;
                c
            })
            .collect()
    }

    pub fn ravel(&self, c: &[usize]) -> usize {
        c.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    /// Face neighbours of cell `i` inside the grid.
    pub fn face_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let c = self.unravel(i);
        (0..self.dim()).flat_map(move |a| {
            let down = (c[a] > 0).then(|| i - self.strides[a]);
            let up = (c[a] + 1 < self.extent[a]).then(|| i + self.strides[a]);
            down.into_iter().chain(up)
        })
    }

    /// Whether a face neighbour of `i` lies outside the grid.
    pub fn on_edge(&self, i: usize) -> bool {
        self.unravel(i).iter().zip(&self.extent).any(|(&c, &e)| c == 0 || c + 1 == e)
    }
}

fn axis_range(lo: f64, hi: f64, h: f64) -> (i64, usize) {
    let a = (lo / h).ceil() as i64;
    let b = (hi / h).floor() as i64;
    (a, (b - a + 1).max(0) as usize)
}

/// Samples `shape` at every cell center of the bounding box.
///
/// With `bbox = None` the box is the shape's bounds widened by `3h`. A given box must leave a
/// margin of at least `2h` around the shape on every side.
pub fn rasterize(shape: &Csg, bbox: Option<(&[f64], &[f64])>, h: f64) -> Result<GridRegion, GridError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GridError::InvalidSpacing(h));
    }
    let dim = shape.dim()?;
    let bounds = shape.bounds(h / 2.0);
    let (lo, hi): (Vec<f64>, Vec<f64>) = match bbox {
        Some((lo, hi)) => {
            if lo.len() != dim || hi.len() != dim {
                return Err(GridError::Shape(format!("bounding box must have dimension {dim}")));
            }
            for (i, b) in bounds.iter().enumerate() {
                let Some((s, t)) = *b else { return Err(GridError::Unbounded) };
                // Empty shapes have inverted bounds and need no margin.
                let slack = 1e-9 * h;
                if s <= t && (lo[i] > s - 2.0 * h + slack || hi[i] < t + 2.0 * h - slack) {
                    return Err(GridError::BboxTooTight { axis: i, shape: (s, t), bbox: (lo[i], hi[i]) });
                }
            }
            (lo.to_vec(), hi.to_vec())
        }
        None => {
            let mut lo = Vec::with_capacity(dim);
            let mut hi = Vec::with_capacity(dim);
            for b in &bounds {
                let Some((s, t)) = *b else { return Err(GridError::Unbounded) };
                let (s, t) = if s <= t { (s, t) } else { (0.0, 0.0) };
                lo.push(s - 3.0 * h);
                hi.push(t + 3.0 * h);
            }
            (lo, hi)
        }
    };
    let (first, extent): (Vec<i64>, Vec<usize>) = lo.iter().zip(&hi).map(|(&a, &b)| axis_range(a, b, h)).unzip();
    let grid = GridShape::new(&extent);
    let cells = grid.len();
    if cells > super::cell_cap() {
        return Err(GridError::TooManyCells { cells, cap: super::cell_cap() });
    }
    let compiled = shape.compile(h)?;
    let bits: Vec<bool> = (0..cells)
        .into_par_iter()
        .map_init(
            || vec![0i64; dim],
            |k, i| {
                for (a, c) in grid.unravel(i).into_iter().enumerate() {
                    k[a] = first[a] + c as i64;
                }
                compiled.contains(k)
            },
        )
        .collect();
    Ok(GridRegion { shape: shape.clone(), h, lo: first, extent, occupancy: Mask::from_bits(bits) })
}

impl GridRegion {
    pub fn shape(&self) -> &Csg {
        &self.shape
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn grid(&self) -> GridShape {
        GridShape::new(&self.extent)
    }

    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.none()
    }

    pub fn occupancy(&self) -> &Mask {
        &self.occupancy
    }

    /// Whether the shape contains a lower-dimensional primitive.
    pub fn thin(&self) -> bool {
        self.shape.has_thin_part()
    }

    /// Integer lattice index `k` of a cell; its center is `k·h`.
    pub fn lattice(&self, i: usize) -> Vec<i64> {
        self.grid().unravel(i).iter().zip(&self.lo).map(|(&c, &l)| l + c as i64).collect()
    }

    pub fn center(&self, i: usize) -> Vec<f64> {
        self.lattice(i).iter().map(|&k| k as f64 * self.h).collect()
    }

    /// Cell whose center is `k·h`, if inside the grid.
    pub fn cell_at(&self, k: &[i64]) -> Option<usize> {
        let c: Option<Vec<usize>> = k
            .iter()
            .zip(&self.lo)
            .zip(&self.extent)
            .map(|((&k, &l), &e)| usize::try_from(k - l).ok().filter(|&c| c < e))
            .collect();
        c.map(|c| self.grid().ravel(&c))
    }

    /// Nearest cell to a point, if inside the grid.
    pub fn cell_near(&self, x: &[f64]) -> Option<usize> {
        let k: Vec<i64> = x.iter().map(|v| (v / self.h).round() as i64).collect();
        self.cell_at(&k)
    }

    /// Cells of this lattice whose centers lie in `shape`.
    pub fn sample(&self, shape: &Csg) -> Result<Mask, GridError> {
        let dim = shape.dim()?;
        if dim != self.dim() {
            return Err(GridError::Shape(format!("shape has dimension {dim}, the grid {}", self.dim())));
        }
        let compiled = shape.compile(self.h)?;
        Ok(Mask::from_bits((0..self.len()).into_par_iter().map(|i| compiled.contains(&self.lattice(i))).collect()))
    }

    /// Same grid with a different occupancy, for derived sets such as sublevel sets.
    pub fn with_occupancy(&self, occupancy: Mask) -> GridRegion {
        assert_eq!(occupancy.len(), self.len(), "occupancy must match the grid");
        GridRegion { occupancy, ..self.clone() }
    }
}

/// Occupied cells with an empty face neighbour; cells past the grid edge count as empty.
///
/// A single occupied cell is its own boundary. An empty result means the region is
/// grid-clopen.
pub fn boundary_cells(g: &GridRegion) -> Mask {
    let grid = g.grid();
    let occ = g.occupancy();
    Mask::from_bits(
        (0..g.len())
            .into_par_iter()
            .map(|i| occ.get(i) && (grid.on_edge(i) || grid.face_neighbors(i).any(|j| !occ.get(j))))
            .collect(),
    )
}
