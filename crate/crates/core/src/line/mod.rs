//! Exact descriptors for finite unions of intervals in a subspace of the real line.

mod descriptors;
mod interval;

pub use descriptors::{
    boundary_distance, center_components, descriptors_line, diameter_line, sup_distance,
    topology_line, LineTopology, SupDistance,
};
pub use interval::{Bound, Interval, IntervalError, IntervalSet};
