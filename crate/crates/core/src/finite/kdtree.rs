//! Static k-d tree for exact nearest-neighbour queries under block-max metrics.
//!
//! Every supported metric dominates `|x_i - y_i|` on each coordinate, so the usual
//! splitting-plane bound stays a valid lower bound.

use super::space::BlockMetric;

const LEAF: usize = 12;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

pub(crate) struct KdTree<'a> {
    coords: &'a [f64],
    dim: usize,
    metric: &'a BlockMetric,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn build(
        coords: &'a [f64],
        dim: usize,
        metric: &'a BlockMetric,
        points: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut tree = KdTree { coords, dim, metric, order: points.into_iter().collect(), nodes: Vec::new() };
        if !tree.order.is_empty() {
            let n = tree.order.len();
            tree.split(0, n);
        }
        tree
    }

    fn coord(&self, p: usize, axis: usize) -> f64 {
        self.coords[p * self.dim + axis]
    }

    fn split(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = (0..self.dim)
            .map(|a| {
                let (lo, hi) = self.order[start..end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                    let c = self.coord(p, a);
                    (lo.min(c), hi.max(c))
                });
                (a, hi - lo)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(a, _)| a)
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let (coords, dim) = (self.coords, self.dim);
        self.order[start..end].select_nth_unstable_by(mid - start, |&p, &q| {
            coords[p * dim + axis].total_cmp(&coords[q * dim + axis])
        });
        let value = self.coord(self.order[mid], axis);
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.split(start, mid);
        let right = self.split(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    fn dist_to(&self, q: &[f64], p: usize) -> f64 {
        self.metric.distance(q, &self.coords[p * self.dim..(p + 1) * self.dim])
    }

    /// Nearest indexed point to `q` and its distance.
    pub(crate) fn nearest(&self, q: &[f64]) -> Option<(f64, usize)> {
        if self.order.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.nearest_in(0, q, &mut best);
        Some(best)
    }

    fn nearest_in(&self, node: usize, q: &[f64], best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &p in &self.order[start..end] {
                    let d = self.dist_to(q, p);
                    if d < best.0 || (d == best.0 && p < best.1) {
                        *best = (d, p);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let delta = q[axis] - value;
                let (near, far) = if delta < 0.0 { (left, right) } else { (right, left) };
                self.nearest_in(near, q, best);
                if delta.abs() <= best.0 {
                    self.nearest_in(far, q, best);
                }
            }
        }
    }

    /// Whether some indexed point lies within distance `r` of `q` (inclusive).
    pub(crate) fn any_within(&self, q: &[f64], r: f64) -> bool {
        !self.order.is_empty() && self.any_within_in(0, q, r)
    }

    fn any_within_in(&self, node: usize, q: &[f64], r: f64) -> bool {
        match self.nodes[node] {
            Node::Leaf { start, end } => self.order[start..end].iter().any(|&p| self.dist_to(q, p) <= r),
            Node::Split { axis, value, left, right } => {
                let delta = q[axis] - value;
                let (near, far) = if delta < 0.0 { (left, right) } else { (right, left) };
                self.any_within_in(near, q, r) || (delta.abs() <= r && self.any_within_in(far, q, r))
            }
        }
    }
}
