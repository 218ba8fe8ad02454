use std::sync::Arc;

use petgraph::algo::floyd_warshall;
use petgraph::graph::UnGraph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::kdtree::KdTree;
use crate::mask::Mask;

/// Relative slack for floating-point metric axioms and `h` comparisons.
pub const REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("nonzero diagonal entry d({i},{i}) = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("asymmetric entries d({i},{j}) != d({j},{i})")]
    Asymmetric { i: usize, j: usize },
    #[error("negative or NaN entry d({i},{j})")]
    Negative { i: usize, j: usize },
    #[error("distinct points {i} and {j} at distance zero")]
    ZeroDistance { i: usize, j: usize },
    #[error("triangle inequality violated for {} triple(s), first ({}, {}, {})", .0.len(), .0[0].0, .0[0].1, .0[0].2)]
    Triangle(Vec<(usize, usize, usize)>),
    #[error("graph is disconnected: no path between {a} and {b}")]
    Disconnected { a: usize, b: usize },
    #[error("edge ({u},{v}) has non-positive weight {w}")]
    BadEdge { u: usize, v: usize, w: f64 },
    #[error("resolution h must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Ambient metric flag for point clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointMetric {
    Euclidean,
    Max,
}

/// Euclidean norm inside each block of coordinates, maximum across blocks.
///
/// One block is the Euclidean metric; one block per coordinate is the max metric; mixed
/// blocks give max-metric products of Euclidean factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMetric {
    blocks: Vec<usize>,
}

impl BlockMetric {
    pub fn euclidean(dim: usize) -> Self {
        BlockMetric { blocks: vec![dim] }
    }

    pub fn max(dim: usize) -> Self {
        BlockMetric { blocks: vec![1; dim] }
    }

    pub fn blocks(sizes: Vec<usize>) -> Self {
        BlockMetric { blocks: sizes }
    }

    pub fn of(metric: PointMetric, dim: usize) -> Self {
        match metric {
            PointMetric::Euclidean => BlockMetric::euclidean(dim),
            PointMetric::Max => BlockMetric::max(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.blocks
    }

    #[inline]
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut at = 0;
        let mut best: f64 = 0.0;
        for &b in &self.blocks {
            let d = if b == 1 {
                (x[at] - y[at]).abs()
            } else {
                x[at..at + b].iter().zip(&y[at..at + b]).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
            };
            best = best.max(d);
            at += b;
        }
        best
    }
}

#[derive(Debug, Clone)]
enum Geometry {
    Matrix(Vec<f64>),
    Points { coords: Vec<f64>, metric: BlockMetric },
    /// Max-metric product; point `i` decomposes in mixed radix with the first factor slowest.
    Product { factors: Vec<Arc<FiniteSpace>> },
}

/// A finite metric space with a resolution scale `h`.
#[derive(Debug, Clone)]
pub struct FiniteSpace {
    n: usize,
    h: f64,
    geometry: Geometry,
    /// Factor sizes when built as a product.
    factor_sizes: Vec<usize>,
}

fn check_h(h: f64) -> Result<(), MetricError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(MetricError::InvalidScale(h))
    }
}

/// Exhaustive check of the metric axioms; reports at most `max_reports` triangle violations.
pub fn validate_metric(dist: &[Vec<f64>], max_reports: usize) -> Result<(), MetricError> {
    let n = dist.len();
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(MetricError::NotSquare { row: i, len: row.len(), n });
        }
    }
    for i in 0..n {
        if dist[i][i] != 0.0 {
            return Err(MetricError::NonzeroDiagonal { i, value: dist[i][i] });
        }
        for j in 0..n {
            let d = dist[i][j];
            if d.is_nan() || d < 0.0 {
                return Err(MetricError::Negative { i, j });
            }
            if d != dist[j][i] {
                return Err(MetricError::Asymmetric { i, j });
            }
            if i != j && d == 0.0 {
                return Err(MetricError::ZeroDistance { i, j });
            }
        }
    }
    let mut violations: Vec<(usize, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut found = Vec::new();
            'outer: for b in 0..n {
                for c in 0..n {
                    let direct = dist[a][c];
                    let detour = dist[a][b] + dist[b][c];
                    if direct > detour + REL_EPS * direct.max(1.0) {
                        found.push((a, b, c));
                        if found.len() >= max_reports {
                            break 'outer;
                        }
                    }
                }
            }
            found
        })
        .collect();
    if violations.is_empty() {
        return Ok(());
    }
    violations.sort();
    violations.truncate(max_reports.max(1));
    Err(MetricError::Triangle(violations))
}

impl FiniteSpace {
    /// A validated explicit distance matrix.
    pub fn from_matrix(dist: Vec<Vec<f64>>, h: f64) -> Result<Self, MetricError> {
        check_h(h)?;
        validate_metric(&dist, 10)?;
        let n = dist.len();
        Ok(FiniteSpace { n, h, geometry: Geometry::Matrix(dist.into_iter().flatten().collect()), factor_sizes: vec![] })
    }

    pub fn from_points(rows: &[Vec<f64>], metric: PointMetric, h: f64) -> Result<Self, MetricError> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (index, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(MetricError::DimensionMismatch { index, got: r.len(), expected: dim });
            }
            coords.extend_from_slice(r);
        }
        FiniteSpace::from_coords(coords, BlockMetric::of(metric, dim), h)
    }

    /// Point cloud from flat row-major coordinates.
    pub fn from_coords(coords: Vec<f64>, metric: BlockMetric, h: f64) -> Result<Self, MetricError> {
        check_h(h)?;
        let dim = metric.dim();
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(MetricError::DimensionMismatch { index: 0, got: coords.len(), expected: dim });
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(MetricError::Negative { i: i / dim, j: i / dim });
        }
        Ok(FiniteSpace { n: coords.len() / dim, h, geometry: Geometry::Points { coords, metric }, factor_sizes: vec![] })
    }

    /// Max-metric product of finite spaces. `h` is the largest factor scale.
    ///
    /// A product of point clouds is again a point cloud, with the factor blocks side by side.
    pub fn product(factors: Vec<Arc<FiniteSpace>>) -> Result<Self, MetricError> {
        let n = factors.iter().map(|f| f.n).product();
        let h = factors.iter().map(|f| f.h).fold(0.0, f64::max);
        check_h(h)?;
        let factor_sizes: Vec<usize> = factors.iter().map(|f| f.n).collect();
        let metrics: Option<Vec<&BlockMetric>> = factors.iter().map(|f| f.block_metric()).collect();
        let Some(metrics) = metrics else {
            return Ok(FiniteSpace { n, h, geometry: Geometry::Product { factors }, factor_sizes });
        };
        let metric = BlockMetric::blocks(metrics.iter().flat_map(|m| m.block_sizes().iter().copied()).collect());
        let dim = metric.dim();
        let mut coords = Vec::with_capacity(n * dim);
        let mut idx = vec![0usize; factors.len()];
        for _ in 0..n {
            for (f, &k) in factors.iter().zip(&idx) {
                coords.extend_from_slice(f.coords(k).expect("point cloud"));
            }
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < factor_sizes[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(FiniteSpace { n, h, geometry: Geometry::Points { coords, metric }, factor_sizes })
    }

    pub fn block_metric(&self) -> Option<&BlockMetric> {
        match &self.geometry {
            Geometry::Points { metric, .. } => Some(metric),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_h(mut self, h: f64) -> Result<Self, MetricError> {
        check_h(h)?;
        self.h = h;
        Ok(self)
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.geometry {
            Geometry::Points { metric, .. } => Some(metric.dim()),
            _ => None,
        }
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Points { coords, metric } => {
                let d = metric.dim();
                Some(&coords[i * d..(i + 1) * d])
            }
            _ => None,
        }
    }

    /// Index of each factor's point for a product point.
    pub fn product_index(&self, mut i: usize) -> Option<Vec<usize>> {
        if self.factor_sizes.is_empty() {
            return None;
        }
        let mut out = vec![0; self.factor_sizes.len()];
        for (k, &n) in self.factor_sizes.iter().enumerate().rev() {
            out[k] = i % n;
            i /= n;
        }
        Some(out)
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.geometry {
            Geometry::Matrix(m) => m[i * self.n + j],
            Geometry::Points { coords, metric } => {
                let d = metric.dim();
                metric.distance(&coords[i * d..(i + 1) * d], &coords[j * d..(j + 1) * d])
            }
            Geometry::Product { factors } => {
                let (mut i, mut j) = (i, j);
                let mut best: f64 = 0.0;
                for f in factors.iter().rev() {
                    best = best.max(f.dist(i % f.n, j % f.n));
                    i /= f.n;
                    j /= f.n;
                }
                best
            }
        }
    }

    /// Full distance matrix, row-major.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).into_par_iter().map(|i| (0..self.n).map(|j| self.dist(i, j)).collect()).collect()
    }

    /// Nearest-neighbour index over the points of `mask`.
    pub(crate) fn index<'a>(&'a self, mask: &Mask) -> TargetIndex<'a> {
        match &self.geometry {
            Geometry::Points { coords, metric } if mask.count() > 64 => {
                TargetIndex::Tree(self, KdTree::build(coords, metric.dim(), metric, mask.ones()))
            }
            _ => TargetIndex::List(self, mask.ones().collect()),
        }
    }
}

pub(crate) enum TargetIndex<'a> {
    Tree(&'a FiniteSpace, KdTree<'a>),
    List(&'a FiniteSpace, Vec<usize>),
}

impl TargetIndex<'_> {
    /// Distance from point `i` to the nearest target, `+inf` with no targets.
    pub(crate) fn nearest(&self, i: usize) -> f64 {
        match self {
            TargetIndex::Tree(x, t) => t.nearest(x.coords(i).expect("point cloud")).map_or(f64::INFINITY, |(d, _)| d),
            TargetIndex::List(x, v) => v.iter().map(|&j| x.dist(i, j)).fold(f64::INFINITY, f64::min),
        }
    }

    pub(crate) fn any_within(&self, i: usize, r: f64) -> bool {
        match self {
            TargetIndex::Tree(x, t) => t.any_within(x.coords(i).expect("point cloud"), r),
            TargetIndex::List(x, v) => v.iter().any(|&j| x.dist(i, j) <= r),
        }
    }
}

/// All-pairs shortest-path metric of a weighted undirected graph on vertices `0..n`.
///
/// `h` defaults to the smallest edge weight. Without `allow_disconnected`, unreachable pairs
/// are an error; with it they are at distance `+inf`, which makes this an extended metric.
pub fn shortest_path_metric(
    n: usize,
    edges: &[(usize, usize, f64)],
    allow_disconnected: bool,
) -> Result<FiniteSpace, MetricError> {
    let mut g: UnGraph<(), f64> = UnGraph::with_capacity(n, edges.len());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for &(u, v, w) in edges {
        if !(w > 0.0 && w.is_finite()) || u >= n || v >= n {
            return Err(MetricError::BadEdge { u, v, w });
        }
        g.add_edge(nodes[u], nodes[v], w);
    }
    let h = edges.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
    let h = if h.is_finite() { h } else { 1.0 };
    let paths = floyd_warshall(&g, |e| *e.weight()).expect("positive weights have no negative cycle");
    let mut dist = vec![vec![0.0; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let d = paths.get(&(nodes[i], nodes[j])).copied().unwrap_or(f64::MAX);
            *slot = if d >= f64::MAX {
                if !allow_disconnected {
                    return Err(MetricError::Disconnected { a: i, b: j });
                }
                f64::INFINITY
            } else {
                d
            };
        }
    }
    if allow_disconnected {
        check_h(h)?;
        return Ok(FiniteSpace { n, h, geometry: Geometry::Matrix(dist.into_iter().flatten().collect()), factor_sizes: vec![] });
    }
    FiniteSpace::from_matrix(dist, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_violation_is_reported() {
        let d = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        match validate_metric(&d, 10) {
            Err(MetricError::Triangle(v)) => assert!(v.contains(&(0, 1, 2))),
            other => panic!("expected a triangle violation, got {other:?}"),
        }
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0], vec![2.0, 0.0]], 1),
            Err(MetricError::Asymmetric { .. })
        ));
        assert!(matches!(validate_metric(&[vec![1.0]], 1), Err(MetricError::NonzeroDiagonal { .. })));
    }

    #[test]
    fn shortest_paths() {
        let path = shortest_path_metric(3, &[(0, 1, 1.0), (1, 2, 1.0)], false).unwrap();
        assert_eq!(path.dist(0, 2), 2.0);
        assert_eq!(path.h(), 1.0);
        let c4 = shortest_path_metric(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)], false).unwrap();
        assert_eq!(c4.dist(0, 2), 2.0);
        validate_metric(&c4.distance_matrix(), 5).unwrap();
        assert!(matches!(
            shortest_path_metric(4, &[(0, 1, 1.0), (2, 3, 1.0)], false),
            Err(MetricError::Disconnected { .. })
        ));
        let split = shortest_path_metric(4, &[(0, 1, 1.0), (2, 3, 1.0)], true).unwrap();
        assert!(split.dist(0, 3).is_infinite());
    }

    #[test]
    fn product_distance_is_the_max() {
        let a = Arc::new(FiniteSpace::from_points(&[vec![0.0], vec![1.0], vec![3.0]], PointMetric::Euclidean, 1.0).unwrap());
        let b = Arc::new(FiniteSpace::from_points(&[vec![0.0], vec![2.0]], PointMetric::Euclidean, 1.0).unwrap());
        let p = FiniteSpace::product(vec![a, b]).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.product_index(5), Some(vec![2, 1]));
        assert_eq!(p.dist(0, 5), 3.0);
        assert_eq!(p.dist(0, 1), 2.0);
        validate_metric(&p.distance_matrix(), 5).unwrap();
        assert_eq!(p.coords(5), Some(&[3.0, 2.0][..]));
        // Matrix factors keep the lazy product form.
        let m = Arc::new(FiniteSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], 1.0).unwrap());
        let q = FiniteSpace::product(vec![m, Arc::new(p)]).unwrap();
        assert_eq!(q.len(), 12);
        assert!(q.coords(0).is_none());
        assert_eq!(q.product_index(11), Some(vec![1, 5]));
        assert_eq!(q.dist(0, 11), 3.0);
    }
}
