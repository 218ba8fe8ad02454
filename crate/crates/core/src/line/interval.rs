use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("inverted interval: lower end {lo} exceeds upper end {hi}")]
    Inverted { lo: String, hi: String },
    #[error("subset is not contained in its ambient space")]
    NotSubset,
    #[error("interval syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// An endpoint on the extended line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Finite(q) => f.write_str(&format_rational(q)),
            Bound::PosInf => f.write_str("inf"),
        }
    }
}

/// One piece of an [`IntervalSet`]. Infinite ends are always open.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Bound,
    lo_closed: bool,
    hi: Bound,
    hi_closed: bool,
}

impl Interval {
    /// Unchecked constructor; [`IntervalSet::normalize`] validates.
    pub fn new(lo: Bound, lo_closed: bool, hi: Bound, hi_closed: bool) -> Self {
        let lo_closed = lo_closed && matches!(lo, Bound::Finite(_));
        let hi_closed = hi_closed && matches!(hi, Bound::Finite(_));
        Interval { lo, lo_closed, hi, hi_closed }
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        Interval::new(Bound::Finite(a), true, Bound::Finite(b), true)
    }

    pub fn open(a: Rational, b: Rational) -> Self {
        Interval::new(Bound::Finite(a), false, Bound::Finite(b), false)
    }

    pub fn point(q: Rational) -> Self {
        Interval::closed(q.clone(), q)
    }

    pub fn lo(&self) -> &Bound {
        &self.lo
    }
    pub fn hi(&self) -> &Bound {
        &self.hi
    }
    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }
    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match &self.lo {
            Bound::NegInf => true,
            Bound::Finite(a) => x > a || (self.lo_closed && x == a),
            Bound::PosInf => false,
        };
        let below = match &self.hi {
            Bound::PosInf => true,
            Bound::Finite(b) => x < b || (self.hi_closed && x == b),
            Bound::NegInf => false,
        };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{},{}{close}", self.lo, self.hi)
    }
}

/// A finite union of pairwise disjoint intervals in canonical form.
///
/// Pieces are sorted, non-empty, and no two of them could be merged, so equal sets
/// compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    pieces: Vec<Interval>,
}

/// The atom decomposition of the line induced by a sorted list of cut points:
/// `gaps[0] < cuts[0] < gaps[1] < cuts[1] < ... < cuts[k-1] < gaps[k]`.
struct Atoms {
    cuts: Vec<Rational>,
}

struct AtomMask {
    gaps: Vec<bool>,
    points: Vec<bool>,
}

impl Atoms {
    fn of(sets: &[&IntervalSet]) -> Atoms {
        let mut cuts: Vec<Rational> = sets.iter().flat_map(|s| s.finite_endpoints()).collect();
        cuts.sort();
        cuts.dedup();
        Atoms { cuts }
    }

    /// A point strictly inside gap `i`.
    fn gap_witness(&self, i: usize) -> Rational {
        let k = self.cuts.len();
        if k == 0 {
            Rational::from_integer(0.into())
        } else if i == 0 {
            &self.cuts[0] - Rational::one()
        } else if i == k {
            &self.cuts[k - 1] + Rational::one()
        } else {
            (&self.cuts[i - 1] + &self.cuts[i]) / Rational::from_integer(2.into())
        }
    }

    fn classify(&self, s: &IntervalSet) -> AtomMask {
        self.classify_by(|x| s.contains(x))
    }

    fn classify_by(&self, member: impl Fn(&Rational) -> bool) -> AtomMask {
        AtomMask {
            gaps: (0..=self.cuts.len()).map(|i| member(&self.gap_witness(i))).collect(),
            points: self.cuts.iter().map(&member).collect(),
        }
    }

    fn assemble(&self, m: &AtomMask) -> IntervalSet {
        let k = self.cuts.len();
        let mut pieces = Vec::new();
        // Walk the atom sequence gap0, cut0, gap1, ..., gapk merging maximal runs.
        let mut start: Option<(Bound, bool)> = None;
        let mut last: Option<(Bound, bool)> = None;
        for idx in 0..(2 * k + 1) {
            let (inside, lo_here, hi_here) = if idx % 2 == 0 {
                let g = idx / 2;
                let lo = if g == 0 { Bound::NegInf } else { Bound::Finite(self.cuts[g - 1].clone()) };
                let hi = if g == k { Bound::PosInf } else { Bound::Finite(self.cuts[g].clone()) };
                (m.gaps[g], (lo, false), (hi, false))
            } else {
                let c = Bound::Finite(self.cuts[idx / 2].clone());
                (m.points[idx / 2], (c.clone(), true), (c, true))
            };
            if inside {
                if start.is_none() {
                    start = Some(lo_here);
                }
                last = Some(hi_here);
            } else if let Some((lo, lo_closed)) = start.take() {
                let (hi, hi_closed) = last.take().expect("run has an end");
                pieces.push(Interval::new(lo, lo_closed, hi, hi_closed));
            }
        }
        if let Some((lo, lo_closed)) = start {
            let (hi, hi_closed) = last.expect("run has an end");
            pieces.push(Interval::new(lo, lo_closed, hi, hi_closed));
        }
        IntervalSet { pieces }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn real_line() -> Self {
        IntervalSet { pieces: vec![Interval::new(Bound::NegInf, false, Bound::PosInf, false)] }
    }

    pub fn from_interval(iv: Interval) -> Result<Self, IntervalError> {
        IntervalSet::normalize(vec![iv])
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        IntervalSet::normalize(vec![Interval::closed(a, b)]).expect("closed interval with a <= b")
    }

    pub fn point(q: Rational) -> Self {
        IntervalSet { pieces: vec![Interval::point(q)] }
    }

    pub fn points(qs: impl IntoIterator<Item = Rational>) -> Self {
        IntervalSet::normalize(qs.into_iter().map(Interval::point).collect()).expect("points are valid")
    }

    /// Canonical form of a union of raw intervals.
    ///
    /// Rejects `lo > hi`; drops `lo == hi` unless both ends are closed.
    pub fn normalize(raw: Vec<Interval>) -> Result<Self, IntervalError> {
        let mut kept = Vec::with_capacity(raw.len());
        for iv in raw {
            if iv.lo > iv.hi {
                return Err(IntervalError::Inverted { lo: iv.lo.to_string(), hi: iv.hi.to_string() });
            }
            if iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed) {
                continue;
            }
            kept.push(iv);
        }
        // Raw pieces may overlap and are unsorted, so membership is a linear scan here.
        let raw = IntervalSet { pieces: kept };
        let atoms = Atoms::of(&[&raw]);
        Ok(atoms.assemble(&atoms.classify_by(|x| raw.pieces.iter().any(|p| p.contains(x)))))
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // Pieces are sorted and disjoint; binary search on the lower end.
        let idx = self.pieces.partition_point(|p| match &p.lo {
            Bound::NegInf => true,
            Bound::Finite(a) => a <= x,
            Bound::PosInf => false,
        });
        idx > 0 && self.pieces[idx - 1].contains(x)
    }

    /// Sorted distinct finite endpoints.
    pub fn finite_endpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .pieces
            .iter()
            .flat_map(|p| [&p.lo, &p.hi])
            .filter_map(|b| b.finite().cloned())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn combine(&self, other: &IntervalSet, op: impl Fn(bool, bool) -> bool) -> IntervalSet {
        let atoms = Atoms::of(&[self, other]);
        let a = atoms.classify(self);
        let b = atoms.classify(other);
        let m = AtomMask {
            gaps: a.gaps.iter().zip(&b.gaps).map(|(&x, &y)| op(x, y)).collect(),
            points: a.points.iter().zip(&b.points).map(|(&x, &y)| op(x, y)).collect(),
        };
        atoms.assemble(&m)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> IntervalSet {
        IntervalSet::real_line().difference(self)
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint_from(&self, other: &IntervalSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Closure in ℝ.
    pub fn closure(&self) -> IntervalSet {
        let atoms = Atoms::of(&[self]);
        let mut m = atoms.classify(self);
        for i in 0..m.points.len() {
            m.points[i] |= m.gaps[i] || m.gaps[i + 1];
        }
        atoms.assemble(&m)
    }

    /// Interior in ℝ.
    pub fn interior(&self) -> IntervalSet {
        let atoms = Atoms::of(&[self]);
        let mut m = atoms.classify(self);
        for i in 0..m.points.len() {
            m.points[i] &= m.gaps[i] && m.gaps[i + 1];
        }
        atoms.assemble(&m)
    }

    pub fn inf(&self) -> Option<&Bound> {
        self.pieces.first().map(|p| &p.lo)
    }

    pub fn sup(&self) -> Option<&Bound> {
        self.pieces.last().map(|p| &p.hi)
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.inf(), Some(Bound::NegInf)) && !matches!(self.sup(), Some(Bound::PosInf))
    }

    /// The points, if every piece is degenerate.
    pub fn as_points(&self) -> Option<Vec<Rational>> {
        self.pieces
            .iter()
            .map(|p| if p.is_point() { p.lo.finite().cloned() } else { None })
            .collect()
    }

    /// Points within `r` of some point of `points`: `≤ r` when `closed`, else `< r`.
    pub fn around(points: &[Rational], r: &Rational, closed: bool) -> IntervalSet {
        if !closed && r <= &Rational::from_integer(0.into()) {
            return IntervalSet::empty();
        }
        let pieces = points.iter().map(|k| Interval::new(Bound::Finite(k - r), closed, Bound::Finite(k + r), closed));
        IntervalSet::normalize(pieces.collect()).expect("well-formed neighbourhoods")
    }

    /// Total length, `None` for unbounded sets.
    pub fn measure(&self) -> Option<Rational> {
        let mut total = Rational::from_integer(0.into());
        for p in &self.pieces {
            match (&p.lo, &p.hi) {
                (Bound::Finite(a), Bound::Finite(b)) => total += b - a,
                _ => return None,
            }
        }
        Some(total)
    }

    /// Each piece as its own set.
    pub fn components(&self) -> Vec<IntervalSet> {
        self.pieces.iter().map(|p| IntervalSet { pieces: vec![p.clone()] }).collect()
    }

    /// Distance from `x` to the set, `None` when the set is empty.
    pub fn distance_to(&self, x: &Rational) -> Option<Rational> {
        let zero = Rational::from_integer(0.into());
        self.pieces
            .iter()
            .map(|p| {
                if let Bound::Finite(a) = &p.lo {
                    if x < a {
                        return a - x;
                    }
                }
                if let Bound::Finite(b) = &p.hi {
                    if x > b {
                        return x - b;
                    }
                }
                zero.clone()
            })
            .min()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("{}");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

fn parse_bound(text: &str, pos: usize) -> Result<Bound, IntervalError> {
    match text.trim() {
        "-inf" => Ok(Bound::NegInf),
        "inf" | "+inf" => Ok(Bound::PosInf),
        t => parse_rational(t)
            .map(Bound::Finite)
            .map_err(|e| IntervalError::Syntax { pos, msg: e.to_string() }),
    }
}

impl FromStr for IntervalSet {
    type Err = IntervalError;

    /// Parses `"[0,1],(2,5/2],[3,inf),{7}"`; `""` and `"{}"` are the empty set.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut raw = Vec::new();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        loop {
            skip_ws(&mut i);
            if i >= bytes.len() {
                break;
            }
            let open = bytes[i];
            let close_set: &[u8] = match open {
                b'[' | b'(' => b"])",
                b'{' => b"}",
                _ => {
                    return Err(IntervalError::Syntax {
                        pos: i,
                        msg: format!("expected '[', '(' or '{{', found '{}'", open as char),
                    })
                }
            };
            let start = i + 1;
            let Some(len) = bytes[start..].iter().position(|b| close_set.contains(b)) else {
                return Err(IntervalError::Syntax { pos: i, msg: "unterminated piece".into() });
            };
            let end = start + len;
            let body = &s[start..end];
            if open == b'{' {
                for item in body.split(',').filter(|t| !t.trim().is_empty()) {
                    let b = parse_bound(item, start)?;
                    if !matches!(b, Bound::Finite(_)) {
                        return Err(IntervalError::Syntax { pos: start, msg: "infinite point".into() });
                    }
                    raw.push(Interval::new(b.clone(), true, b, true));
                }
            } else {
                let Some((lo, hi)) = body.split_once(',') else {
                    return Err(IntervalError::Syntax { pos: start, msg: "expected 'lo,hi'".into() });
                };
                let lo_b = parse_bound(lo, start)?;
                let hi_b = parse_bound(hi, start + lo.len() + 1)?;
                if lo_b == Bound::PosInf || hi_b == Bound::NegInf {
                    return Err(IntervalError::Syntax { pos: start, msg: "misplaced infinity".into() });
                }
                raw.push(Interval::new(lo_b, open == b'[', hi_b, bytes[end] == b']'));
            }
            i = end + 1;
            skip_ws(&mut i);
            if i < bytes.len() {
                if bytes[i] != b',' {
                    return Err(IntervalError::Syntax { pos: i, msg: "expected ','".into() });
                }
                i += 1;
            }
        }
        IntervalSet::normalize(raw)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
