//! CSG shapes with exact membership at grid points `k·h`.
//!
//! Parameters are floats in the document, read as the decimal they print as, then every
//! primitive is compiled to integer coefficients so a membership query is pure `i128`
//! arithmetic (with a big-integer fallback on overflow).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::GridError;
use crate::rational::{rational_from_f64, Rational};

/// A constructive-solid-geometry tree.
///
/// `point`, `segment` and `sphere` are thin: a grid point belongs to them when it lies within
/// `h/2` of the set. `product` places its factors in consecutive coordinate blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Csg {
    Union { children: Vec<Csg> },
    Intersection { children: Vec<Csg> },
    Difference { base: Box<Csg>, subtract: Vec<Csg> },
    Product { factors: Vec<Csg> },
    /// Ball in any dimension.
    Disc {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        open: bool,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_false")]
        open: bool,
    },
    /// `{x : normal · x <= offset}`.
    Halfplane {
        normal: Vec<f64>,
        offset: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        open: bool,
    },
    Point { at: Vec<f64> },
    Segment { from: Vec<f64>, to: Vec<f64> },
    /// Thin spherical shell `{x : |x - center| = radius}`.
    Sphere { center: Vec<f64>, radius: f64 },
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Csg {
    pub fn disc(center: Vec<f64>, radius: f64) -> Csg {
        Csg::Disc { center, radius, open: false }
    }

    pub fn rect(min: Vec<f64>, max: Vec<f64>) -> Csg {
        Csg::Box { min, max, open: false }
    }

    pub fn union(children: Vec<Csg>) -> Csg {
        Csg::Union { children }
    }

    pub fn difference(base: Csg, subtract: Vec<Csg>) -> Csg {
        Csg::Difference { base: Box::new(base), subtract }
    }

    /// Ambient dimension, checked for consistency across the tree.
    pub fn dim(&self) -> Result<usize, GridError> {
        let same = |children: &[Csg]| -> Result<usize, GridError> {
            let dims = children.iter().map(Csg::dim).collect::<Result<Vec<_>, _>>()?;
            match dims.split_first() {
                None => Err(GridError::Shape("empty child list".into())),
                Some((d, rest)) if rest.iter().all(|x| x == d) => Ok(*d),
                _ => Err(GridError::Shape(format!("children disagree on dimension: {dims:?}"))),
            }
        };
        let d = match self {
            Csg::Union { children } | Csg::Intersection { children } => same(children)?,
            Csg::Difference { base, subtract } => {
                let d = base.dim()?;
                for s in subtract {
                    if s.dim()? != d {
                        return Err(GridError::Shape("difference operands disagree on dimension".into()));
                    }
                }
                d
            }
            Csg::Product { factors } => {
                if factors.is_empty() {
                    return Err(GridError::Shape("empty product".into()));
                }
                factors.iter().map(Csg::dim).sum::<Result<usize, _>>()?
            }
            Csg::Disc { center, radius, .. } | Csg::Sphere { center, radius } => {
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(GridError::Shape(format!("invalid radius {radius}")));
                }
                center.len()
            }
            Csg::Box { min, max, .. } => {
                if min.len() != max.len() || min.iter().zip(max).any(|(a, b)| a > b) {
                    return Err(GridError::Shape("box needs min <= max per axis".into()));
                }
                min.len()
            }
            Csg::Halfplane { normal, .. } => normal.len(),
            Csg::Point { at } => at.len(),
            Csg::Segment { from, to } => {
                if from.len() != to.len() {
                    return Err(GridError::Shape("segment endpoints disagree on dimension".into()));
                }
                from.len()
            }
        };
        if !(1..=3).contains(&d) {
            return Err(GridError::Shape(format!("dimension {d} unsupported (1 to 3)")));
        }
        Ok(d)
    }

    /// Whether the tree contains a lower-dimensional primitive.
    pub fn has_thin_part(&self) -> bool {
        match self {
            Csg::Union { children } | Csg::Intersection { children } => children.iter().any(Csg::has_thin_part),
            Csg::Difference { base, .. } => base.has_thin_part(),
            Csg::Product { factors } => factors.iter().any(Csg::has_thin_part),
            Csg::Point { .. } | Csg::Segment { .. } | Csg::Sphere { .. } => true,
            _ => false,
        }
    }

    /// Axis-aligned bounds of the closure, `None` on unbounded axes. `pad` widens thin sets.
    pub fn bounds(&self, pad: f64) -> Vec<Option<(f64, f64)>> {
        let d = self.dim().unwrap_or(0);
        match self {
            Csg::Union { children } => {
                let all: Vec<_> = children.iter().map(|c| c.bounds(pad)).collect();
                (0..d)
                    .map(|i| {
                        all.iter().try_fold((f64::INFINITY, f64::NEG_INFINITY), |acc, b| {
                            b[i].map(|(lo, hi)| (acc.0.min(lo), acc.1.max(hi)))
                        })
                    })
                    .collect()
            }
            Csg::Intersection { children } => {
                let all: Vec<_> = children.iter().map(|c| c.bounds(pad)).collect();
                (0..d)
                    .map(|i| {
                        all.iter().fold(None, |acc: Option<(f64, f64)>, b| match (acc, b[i]) {
                            (None, x) => x,
                            (x, None) => x,
                            (Some(a), Some(b)) => Some((a.0.max(b.0), a.1.min(b.1))),
                        })
                    })
                    .collect()
            }
            Csg::Difference { base, .. } => base.bounds(pad),
            Csg::Product { factors } => factors.iter().flat_map(|f| f.bounds(pad)).collect(),
            Csg::Disc { center, radius, .. } => center.iter().map(|c| Some((c - radius, c + radius))).collect(),
            Csg::Sphere { center, radius } => {
                center.iter().map(|c| Some((c - radius - pad, c + radius + pad))).collect()
            }
            Csg::Box { min, max, .. } => min.iter().zip(max).map(|(a, b)| Some((*a, *b))).collect(),
            Csg::Halfplane { .. } => vec![None; d],
            Csg::Point { at } => at.iter().map(|a| Some((a - pad, a + pad))).collect(),
            Csg::Segment { from, to } => {
                from.iter().zip(to).map(|(a, b)| Some((a.min(*b) - pad, a.max(*b) + pad))).collect()
            }
        }
    }

    pub(crate) fn compile(&self, h: f64) -> Result<Compiled, GridError> {
        self.dim()?;
        let hq = rat(h)?;
        self.compile_at(&hq, 0)
    }

    fn compile_at(&self, h: &Rational, offset: usize) -> Result<Compiled, GridError> {
        let sub = |c: &Csg| c.compile_at(h, offset);
        Ok(match self {
            Csg::Union { children } => Compiled::Union(children.iter().map(sub).collect::<Result<_, _>>()?),
            Csg::Intersection { children } => {
                Compiled::Intersection(children.iter().map(sub).collect::<Result<_, _>>()?)
            }
            Csg::Difference { base, subtract } => Compiled::Difference(
                Box::new(sub(base)?),
                subtract.iter().map(sub).collect::<Result<_, _>>()?,
            ),
            Csg::Product { factors } => {
                let mut at = offset;
                let mut parts = Vec::new();
                for f in factors {
                    parts.push(f.compile_at(h, at)?);
                    at += f.dim()?;
                }
                Compiled::Intersection(parts)
            }
            Csg::Disc { center, radius, open } => {
                Compiled::Ball(IntBall::new(h, offset, center, &rat(*radius)?, !*open)?)
            }
            Csg::Point { at } => Compiled::Ball(IntBall::new(h, offset, at, &(h / Rational::from_integer(2.into())), true)?),
            Csg::Sphere { center, radius } => Compiled::Shell(IntShell::new(h, offset, center, &rat(*radius)?)?),
            Csg::Box { min, max, open } => Compiled::Box(IntBox::new(h, offset, min, max, !*open)?),
            Csg::Halfplane { normal, offset: o, open } => {
                Compiled::Half(IntHalf::new(h, offset, normal, &rat(*o)?, !*open)?)
            }
            Csg::Segment { from, to } => Compiled::Segment(IntSegment::new(h, offset, from, to)?),
        })
    }
}

fn rat(x: f64) -> Result<Rational, GridError> {
    rational_from_f64(x).ok_or_else(|| GridError::Shape(format!("non-finite parameter {x}")))
}

fn lcm_of<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

fn scaled(q: &Rational, l: &BigInt) -> Result<i128, GridError> {
    let v = q * Rational::from_integer(l.clone());
    debug_assert!(v.is_integer());
    v.to_integer().to_i128().ok_or_else(|| GridError::Shape("parameter too large for exact grid arithmetic".into()))
}

fn rats(v: &[f64]) -> Result<Vec<Rational>, GridError> {
    v.iter().map(|&x| rat(x)).collect()
}

/// `a ≤ b` (or `<`) evaluated on big integers; used when `i128` would overflow.
fn big_cmp(a: BigInt, b: BigInt, inclusive: bool) -> bool {
    if inclusive {
        a <= b
    } else {
        a < b
    }
}

fn sq_norm_big(k: &[i64], step: i128, c: &[i128]) -> BigInt {
    k.iter()
        .zip(c)
        .map(|(&ki, &ci)| {
            let d = BigInt::from(ki) * BigInt::from(step) - BigInt::from(ci);
            &d * &d
        })
        .sum()
}

/// Squared distance in scaled units, `None` on overflow.
fn sq_norm(k: &[i64], step: i128, c: &[i128]) -> Option<i128> {
    let mut s: i128 = 0;
    for (&ki, &ci) in k.iter().zip(c) {
        let d = (ki as i128).checked_mul(step)?.checked_sub(ci)?;
        s = s.checked_add(d.checked_mul(d)?)?;
    }
    Some(s)
}

#[derive(Debug, Clone)]
pub(crate) struct IntBall {
    offset: usize,
    step: i128,
    center: Vec<i128>,
    r2: i128,
    closed: bool,
}

impl IntBall {
    fn new(h: &Rational, offset: usize, center: &[f64], radius: &Rational, closed: bool) -> Result<Self, GridError> {
        let c = rats(center)?;
        let l = lcm_of(c.iter().chain([h, radius]));
        let r = scaled(radius, &l)?;
        Ok(IntBall {
            offset,
            step: scaled(h, &l)?,
            center: c.iter().map(|q| scaled(q, &l)).collect::<Result<_, _>>()?,
            r2: r.checked_mul(r).ok_or_else(|| GridError::Shape("radius too large".into()))?,
            closed,
        })
    }

    fn contains(&self, k: &[i64]) -> bool {
        let k = &k[self.offset..self.offset + self.center.len()];
        match sq_norm(k, self.step, &self.center) {
            Some(s) => if self.closed { s <= self.r2 } else { s < self.r2 },
            None => big_cmp(sq_norm_big(k, self.step, &self.center), BigInt::from(self.r2), self.closed),
        }
    }
}

/// Points within `h/2` of a sphere: `(2R - H)² ≤ 4|X - C|² ≤ (2R + H)²` in scaled units.
#[derive(Debug, Clone)]
pub(crate) struct IntShell {
    offset: usize,
    step: i128,
    center: Vec<i128>,
    lo: BigInt,
    hi: BigInt,
}

impl IntShell {
    fn new(h: &Rational, offset: usize, center: &[f64], radius: &Rational) -> Result<Self, GridError> {
        let c = rats(center)?;
        let l = lcm_of(c.iter().chain([h, radius]));
        let step = scaled(h, &l)?;
        let r = BigInt::from(scaled(radius, &l)?);
        let inner = BigInt::from(2) * &r - BigInt::from(step);
        let outer = BigInt::from(2) * &r + BigInt::from(step);
        Ok(IntShell {
            offset,
            step,
            center: c.iter().map(|q| scaled(q, &l)).collect::<Result<_, _>>()?,
            lo: if inner.is_negative() { BigInt::zero() } else { &inner * &inner },
            hi: &outer * &outer,
        })
    }

    fn contains(&self, k: &[i64]) -> bool {
        let k = &k[self.offset..self.offset + self.center.len()];
        let s4 = BigInt::from(4) * sq_norm_big(k, self.step, &self.center);
        self.lo <= s4 && s4 <= self.hi
    }
}

#[derive(Debug, Clone)]
pub(crate) struct IntBox {
    offset: usize,
    step: i128,
    min: Vec<i128>,
    max: Vec<i128>,
    closed: bool,
}

impl IntBox {
    fn new(h: &Rational, offset: usize, min: &[f64], max: &[f64], closed: bool) -> Result<Self, GridError> {
        let (a, b) = (rats(min)?, rats(max)?);
        let l = lcm_of(a.iter().chain(b.iter()).chain([h]));
        Ok(IntBox {
            offset,
            step: scaled(h, &l)?,
            min: a.iter().map(|q| scaled(q, &l)).collect::<Result<_, _>>()?,
            max: b.iter().map(|q| scaled(q, &l)).collect::<Result<_, _>>()?,
            closed,
        })
    }

    fn contains(&self, k: &[i64]) -> bool {
        (0..self.min.len()).all(|i| {
            let x = BigInt::from(k[self.offset + i]) * BigInt::from(self.step);
            let (lo, hi) = (BigInt::from(self.min[i]), BigInt::from(self.max[i]));
            if self.closed {
                lo <= x && x <= hi
            } else {
                lo < x && x < hi
            }
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct IntHalf {
    offset: usize,
    coef: Vec<BigInt>,
    bound: BigInt,
    closed: bool,
}

impl IntHalf {
    fn new(h: &Rational, offset: usize, normal: &[f64], o: &Rational, closed: bool) -> Result<Self, GridError> {
        let alpha: Vec<Rational> = rats(normal)?.into_iter().map(|n| n * h).collect();
        let l = lcm_of(alpha.iter().chain([o]));
        let lq = Rational::from_integer(l);
        Ok(IntHalf {
            offset,
            coef: alpha.iter().map(|a| (a * &lq).to_integer()).collect(),
            bound: (o * &lq).to_integer(),
            closed,
        })
    }

    fn contains(&self, k: &[i64]) -> bool {
        let s: BigInt = self.coef.iter().enumerate().map(|(i, c)| c * BigInt::from(k[self.offset + i])).sum();
        big_cmp(s, self.bound.clone(), self.closed)
    }
}

/// Points within `h/2` of a closed segment.
#[derive(Debug, Clone)]
pub(crate) struct IntSegment {
    offset: usize,
    step: BigInt,
    a: Vec<BigInt>,
    b: Vec<BigInt>,
}

impl IntSegment {
    fn new(h: &Rational, offset: usize, from: &[f64], to: &[f64]) -> Result<Self, GridError> {
        let (a, b) = (rats(from)?, rats(to)?);
        let l = lcm_of(a.iter().chain(b.iter()).chain([h]));
        let lq = Rational::from_integer(l);
        let int = |q: &Rational| (q * &lq).to_integer();
        Ok(IntSegment { offset, step: int(h), a: a.iter().map(int).collect(), b: b.iter().map(int).collect() })
    }

    fn contains(&self, k: &[i64]) -> bool {
        let n = self.a.len();
        let x: Vec<BigInt> = (0..n).map(|i| BigInt::from(k[self.offset + i]) * &self.step).collect();
        let d: Vec<BigInt> = (0..n).map(|i| &self.b[i] - &self.a[i]).collect();
        let xa: Vec<BigInt> = (0..n).map(|i| &x[i] - &self.a[i]).collect();
        let dot = |p: &[BigInt], q: &[BigInt]| -> BigInt { p.iter().zip(q).map(|(s, t)| s * t).sum() };
        let h2 = &self.step * &self.step;
        let u = dot(&xa, &d);
        let w = dot(&d, &d);
        if w.is_zero() || u <= BigInt::zero() {
            return BigInt::from(4) * dot(&xa, &xa) <= h2;
        }
        if u >= w {
            let xb: Vec<BigInt> = (0..n).map(|i| &x[i] - &self.b[i]).collect();
            return BigInt::from(4) * dot(&xb, &xb) <= h2;
        }
        // |x - a|² - u²/w ≤ h²/4
        BigInt::from(4) * (dot(&xa, &xa) * &w - &u * &u) <= h2 * w
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Union(Vec<Compiled>),
    Intersection(Vec<Compiled>),
    Difference(Box<Compiled>, Vec<Compiled>),
    Ball(IntBall),
    Shell(IntShell),
    Box(IntBox),
    Half(IntHalf),
    Segment(IntSegment),
}

impl Compiled {
    /// Membership of the grid point `k·h`.
    pub(crate) fn contains(&self, k: &[i64]) -> bool {
        match self {
            Compiled::Union(c) => c.iter().any(|s| s.contains(k)),
            Compiled::Intersection(c) => c.iter().all(|s| s.contains(k)),
            Compiled::Difference(base, sub) => base.contains(k) && !sub.iter().any(|s| s.contains(k)),
            Compiled::Ball(b) => b.contains(k),
            Compiled::Shell(s) => s.contains(k),
            Compiled::Box(b) => b.contains(k),
            Compiled::Half(p) => p.contains(k),
            Compiled::Segment(s) => s.contains(k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_disc_membership_on_the_boundary() {
        // (0.6, 0.8) lies exactly on the unit circle; with h = 0.1 it is k = (6, 8).
        let closed = Csg::disc(vec![0.0, 0.0], 1.0).compile(0.1).unwrap();
        let open = Csg::Disc { center: vec![0.0, 0.0], radius: 1.0, open: true }.compile(0.1).unwrap();
        assert!(closed.contains(&[6, 8]));
        assert!(!open.contains(&[6, 8]));
        assert!(open.contains(&[6, 7]));
        assert!(!closed.contains(&[7, 8]));
    }

    #[test]
    fn thin_primitives() {
        let h = 0.01;
        let seg = Csg::Segment { from: vec![0.0, 0.0], to: vec![1.0, 0.0] }.compile(h).unwrap();
        assert!(seg.contains(&[50, 0]));
        assert!(!seg.contains(&[50, 1]));
        assert!(!seg.contains(&[101, 0]));
        let pt = Csg::Point { at: vec![0.0, 0.0] }.compile(h).unwrap();
        assert!(pt.contains(&[0, 0]) && !pt.contains(&[1, 0]));
        let shell = Csg::Sphere { center: vec![0.0, 0.0], radius: 1.0 }.compile(h).unwrap();
        assert!(shell.contains(&[100, 0]) && !shell.contains(&[99, 0]) && !shell.contains(&[0, 0]));
    }

    #[test]
    fn boxes_halfplanes_and_products() {
        let b = Csg::rect(vec![0.0, 0.0], vec![1.0, 1.0]).compile(0.25).unwrap();
        assert!(b.contains(&[0, 4]) && !b.contains(&[5, 0]));
        let hp = Csg::Halfplane { normal: vec![1.0, 1.0], offset: 1.0, open: true }.compile(0.5).unwrap();
        assert!(hp.contains(&[0, 1]) && !hp.contains(&[1, 1]));
        let cyl = Csg::Product { factors: vec![Csg::disc(vec![0.0, 0.0], 1.0), Csg::rect(vec![0.0], vec![1.0])] };
        assert_eq!(cyl.dim().unwrap(), 3);
        let c = cyl.compile(0.5).unwrap();
        assert!(c.contains(&[0, 2, 2]) && !c.contains(&[0, 2, 3]) && !c.contains(&[2, 2, 0]));
    }

    #[test]
    fn json_shape() {
        let text = r#"{"type":"difference","base":{"type":"disc","center":[0,0],"radius":1},
                       "subtract":[{"type":"point","at":[0,0]}]}"#;
        let s: Csg = serde_json::from_str(text).unwrap();
        // A puncture does not make the region thin.
        assert!(!s.has_thin_part());
        let back: Csg = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Csg>(r#"{"type":"disc","center":[0],"radius":1,"colour":2}"#).is_err());
    }
}
