use std::fmt;

use crate::line::IntervalSet;
use crate::mask::Mask;
use crate::report::PointSet;

/// A subset handled by one of the engines: exact on the line, a mask otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySet {
    Line(IntervalSet),
    Cells(Mask),
}

impl AnySet {
    pub fn is_empty(&self) -> bool {
        match self {
            AnySet::Line(s) => s.is_empty(),
            AnySet::Cells(m) => m.none(),
        }
    }

    pub fn as_line(&self) -> Option<&IntervalSet> {
        match self {
            AnySet::Line(s) => Some(s),
            AnySet::Cells(_) => None,
        }
    }

    pub fn as_cells(&self) -> Option<&Mask> {
        match self {
            AnySet::Cells(m) => Some(m),
            AnySet::Line(_) => None,
        }
    }
}

impl fmt::Display for AnySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnySet::Line(s) => write!(f, "{s}"),
            AnySet::Cells(m) => write!(f, "<{} points>", m.count()),
        }
    }
}

impl AnySet {
    /// Panics if the two sets come from different engines.
    pub fn union(&self, other: &AnySet) -> AnySet {
        self.zip(other, IntervalSet::union, Mask::union)
    }

    /// Panics if the two sets come from different engines.
    pub fn intersection(&self, other: &AnySet) -> AnySet {
        self.zip(other, IntervalSet::intersection, Mask::intersection)
    }

    /// Panics if the two sets come from different engines.
    pub fn difference(&self, other: &AnySet) -> AnySet {
        self.zip(other, IntervalSet::difference, Mask::difference)
    }

    /// The empty set of the same kind (and mask size).
    pub fn emptied(&self) -> AnySet {
        match self {
            AnySet::Line(_) => AnySet::Line(IntervalSet::empty()),
            AnySet::Cells(m) => AnySet::Cells(Mask::empty(m.len())),
        }
    }

    fn zip(
        &self,
        other: &AnySet,
        line: impl Fn(&IntervalSet, &IntervalSet) -> IntervalSet,
        cells: impl Fn(&Mask, &Mask) -> Mask,
    ) -> AnySet {
        match (self, other) {
            (AnySet::Line(a), AnySet::Line(b)) => AnySet::Line(line(a, b)),
            (AnySet::Cells(a), AnySet::Cells(b)) => AnySet::Cells(cells(a, b)),
            _ => panic!("cannot combine an interval set with a point mask"),
        }
    }
}

impl PointSet for AnySet {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }
    fn is_subset_of_set(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }
}
