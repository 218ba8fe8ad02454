//! Centers, radii and related descriptors of subsets of metric spaces.
//!
//! The line engine ([`line`]) is exact over rationals. The finite-space ([`finite`]) and
//! grid ([`grid`]) engines work in floating point at an explicit resolution `h`.

pub mod ext;
pub mod filtration;
pub mod finite;
pub mod grid;
pub mod line;
pub mod mask;
pub mod product;
pub mod rational;
pub mod report;
pub mod set;
pub mod union;

pub use ext::{ext_cmp, ext_max, ext_min, ExtReal, ExtRealError, Regime};
pub use line::IntervalSet;
pub use mask::{CellMask, Mask, SubsetMask};
pub use rational::Rational;
pub use set::AnySet;
pub use report::{report_consistency_check, report_consistency_check_within, DescriptorReport, Violation};
