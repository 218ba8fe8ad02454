//! Exact Euclidean distance transform on integer squared distances, one axis at a time
//! (lower envelope of parabolas).

use rayon::prelude::*;

use super::region::{GridRegion, GridShape};
use crate::mask::Mask;

/// Marks cells with no target.
pub const UNREACHED: u64 = u64::MAX;

/// Distances from every cell center to the nearest target cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    /// Squared distance in cell units, `UNREACHED` when the target set is empty.
    pub squared: Vec<u64>,
    pub h: f64,
    /// Set when the target set was empty and every value is infinite.
    pub no_target: bool,
}

impl DistanceField {
    pub fn value(&self, i: usize) -> f64 {
        match self.squared[i] {
            UNREACHED => f64::INFINITY,
            s => (s as f64).sqrt() * self.h,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.squared.len()).map(|i| self.value(i)).collect()
    }
}

/// One row: `out[q] = min_p f[p] + (q - p)²` over finite `f[p]`.
fn envelope_1d(f: &[u64], out: &mut [u64], v: &mut Vec<usize>, z: &mut Vec<(i128, i128)>) {
    v.clear();
    z.clear();
    // Intersection of the parabolas rooted at p < q, as a fraction with positive denominator.
    let cross = |p: usize, q: usize| -> (i128, i128) {
        let (p, q) = (p as i128, q as i128);
        let num = (f[q as usize] as i128 + q * q) - (f[p as usize] as i128 + p * p);
        (num, 2 * (q - p))
    };
    let le = |a: (i128, i128), b: (i128, i128)| a.0 * b.1 <= b.0 * a.1;
    for q in 0..f.len() {
        if f[q] == UNREACHED {
            continue;
        }
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    break;
                }
                Some(&p) => {
                    let s = cross(p, q);
                    if z.last().is_some_and(|&zk| le(s, zk)) {
                        v.pop();
                        z.pop();
                    } else {
                        z.push(s);
                        v.push(q);
                        break;
                    }
                }
            }
        }
    }
    if v.is_empty() {
        out.fill(UNREACHED);
        return;
    }
    // z[k] is the boundary between v[k] and v[k+1].
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qi = q as i128;
        while k < z.len() && z[k].0 < qi * z[k].1 {
            k += 1;
        }
        let p = v[k];
        let d = qi - p as i128;
        *o = f[p] + (d * d) as u64;
    }
}

/// Squared distances to `targets` on an arbitrary grid shape.
pub fn squared_edt(grid: &GridShape, targets: &Mask) -> Vec<u64> {
    let mut field: Vec<u64> = targets.bits().iter().map(|&t| if t { 0 } else { UNREACHED }).collect();
    for axis in 0..grid.dim() {
        let len = grid.extent[axis];
        let stride = grid.strides[axis];
        // Rows along `axis` start at cells whose coordinate on `axis` is zero.
        let starts: Vec<usize> = (0..grid.len()).filter(|&i| (i / stride).is_multiple_of(len)).collect();
        let rows: Vec<(usize, Vec<u64>)> = starts
            .par_iter()
            .map_init(
                || (Vec::new(), Vec::new(), Vec::new()),
                |(row, v, z), &s| {
                    row.clear();
                    row.extend((0..len).map(|t| field[s + t * stride]));
                    let mut out = vec![0; len];
                    envelope_1d(row, &mut out, v, z);
                    (s, out)
                },
            )
            .collect();
        for (s, out) in rows {
            for (t, val) in out.into_iter().enumerate() {
                field[s + t * stride] = val;
            }
        }
    }
    field
}

/// Exact distance from every cell center to the nearest center of a cell in `s`.
pub fn distance_to_set(g: &GridRegion, s: &Mask) -> DistanceField {
    assert_eq!(s.len(), g.len(), "mask must match the grid");
    DistanceField { squared: squared_edt(&g.grid(), s), h: g.h(), no_target: s.none() }
}
