//! The descriptor bundle every engine returns, and its internal-consistency check.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ext::{ext_cmp, ExtReal};
use crate::line::IntervalSet;
use crate::mask::Mask;

/// Minimal set interface the consistency check needs.
pub trait PointSet {
    fn is_empty_set(&self) -> bool;
    fn is_subset_of_set(&self, other: &Self) -> bool;
}

impl PointSet for Mask {
    fn is_empty_set(&self) -> bool {
        self.none()
    }
    fn is_subset_of_set(&self, other: &Self) -> bool {
        self.is_subset_of(other)
    }
}

impl PointSet for IntervalSet {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }
    fn is_subset_of_set(&self, other: &Self) -> bool {
        self.is_subset_of(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorReport<S> {
    pub subset: S,
    pub boundary: S,
    pub interior_nonempty: bool,
    pub clopen: bool,
    pub center: S,
    pub radius: ExtReal,
    pub semi_radius: ExtReal,
    pub quasi_center: S,
    pub quasi_radius: ExtReal,
    pub semi_quasi_radius: ExtReal,
    pub diameter: ExtReal,
    pub notes: Vec<String>,
}

impl<S> DescriptorReport<S> {
    /// Same report with every set converted by `f`.
    pub fn map_sets<T>(self, f: impl Fn(S) -> T) -> DescriptorReport<T> {
        DescriptorReport {
            subset: f(self.subset),
            boundary: f(self.boundary),
            interior_nonempty: self.interior_nonempty,
            clopen: self.clopen,
            center: f(self.center),
            radius: self.radius,
            semi_radius: self.semi_radius,
            quasi_center: f(self.quasi_center),
            quasi_radius: self.quasi_radius,
            semi_quasi_radius: self.semi_quasi_radius,
            diameter: self.diameter,
            notes: self.notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A nonclopen subset with a nonempty center must have finite radius, and vice versa.
    CenterRadiusMismatch { center_empty: bool, radius: String },
    SemiRadiusExceedsRadius { semi_radius: String, radius: String },
    SemiQuasiRadiusExceedsQuasiRadius { semi_quasi_radius: String, quasi_radius: String },
    SemiQuasiRadiusExceedsRadius { semi_quasi_radius: String, radius: String },
    CenterOutsideSubset,
    QuasiCenterOutsideSubset,
    RegimeMix { field: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CenterRadiusMismatch { center_empty, radius } => write!(
                f,
                "center nonempty iff radius finite violated (center empty: {center_empty}, radius {radius})"
            ),
            Violation::SemiRadiusExceedsRadius { semi_radius, radius } => {
                write!(f, "Srad <= rad violated ({semi_radius} > {radius})")
            }
            Violation::SemiQuasiRadiusExceedsQuasiRadius { semi_quasi_radius, quasi_radius } => {
                write!(f, "SQrad <= Qrad violated ({semi_quasi_radius} > {quasi_radius})")
            }
            Violation::SemiQuasiRadiusExceedsRadius { semi_quasi_radius, radius } => {
                write!(f, "SQrad <= rad violated ({semi_quasi_radius} > {radius})")
            }
            Violation::CenterOutsideSubset => f.write_str("center is not contained in the subset"),
            Violation::QuasiCenterOutsideSubset => {
                f.write_str("quasi-center is not contained in the subset")
            }
            Violation::RegimeMix { field } => {
                write!(f, "{field} mixes exact and float values")
            }
        }
    }
}

/// Exact check of every report invariant. Empty result means consistent.
pub fn report_consistency_check<S: PointSet>(r: &DescriptorReport<S>) -> Vec<Violation> {
    check(r, |a, b| ext_cmp(a, b).map(|o| o != Ordering::Greater))
}

/// Like [`report_consistency_check`], but `a <= b` is read as `a <= b + slack`.
///
/// Only the float regime is meaningful here; grid engines measure the two radii to
/// different cell sets, so their ordering holds only up to the grid spacing.
pub fn report_consistency_check_within<S: PointSet>(
    r: &DescriptorReport<S>,
    slack: f64,
) -> Vec<Violation> {
    check(r, |a, b| {
        ext_cmp(a, b)?;
        Ok(a.to_f64() <= b.to_f64() + slack)
    })
}

fn check<S: PointSet>(
    r: &DescriptorReport<S>,
    le: impl Fn(&ExtReal, &ExtReal) -> Result<bool, crate::ext::ExtRealError>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if !r.clopen && r.center.is_empty_set() == r.radius.is_finite() {
        out.push(Violation::CenterRadiusMismatch {
            center_empty: r.center.is_empty_set(),
            radius: r.radius.to_string(),
        });
    }
    let pairs: [(&ExtReal, &ExtReal, &'static str, fn(String, String) -> Violation); 3] = [
        (&r.semi_radius, &r.radius, "semi_radius", |a, b| Violation::SemiRadiusExceedsRadius {
            semi_radius: a,
            radius: b,
        }),
        (&r.semi_quasi_radius, &r.quasi_radius, "semi_quasi_radius", |a, b| {
            Violation::SemiQuasiRadiusExceedsQuasiRadius { semi_quasi_radius: a, quasi_radius: b }
        }),
        (&r.semi_quasi_radius, &r.radius, "semi_quasi_radius", |a, b| {
            Violation::SemiQuasiRadiusExceedsRadius { semi_quasi_radius: a, radius: b }
        }),
    ];
    for (a, b, field, make) in pairs {
        match le(a, b) {
            Ok(true) => {}
            Ok(false) => out.push(make(a.to_string(), b.to_string())),
            Err(_) => out.push(Violation::RegimeMix { field }),
        }
    }
    if !r.center.is_subset_of_set(&r.subset) {
        out.push(Violation::CenterOutsideSubset);
    }
    if !r.quasi_center.is_subset_of_set(&r.subset) {
        out.push(Violation::QuasiCenterOutsideSubset);
    }
    out
}
