//! Finite metric spaces with an explicit resolution `h`, and definition-level descriptors.
//!
//! Every subset of a finite space is clopen, so the topology here is the `h`-scale surrogate
//! of [`eps_topology`]. This engine is the brute-force oracle the others are checked against.

mod descriptors;
mod io;
mod kdtree;
mod space;

pub use descriptors::{
    closure_h, descriptors_bf, descriptors_bf_with_fields, eps_topology, isometry_transport_check, EpsTopology,
    FiniteFields, IsometryError,
};
pub use io::{load_distance_csv, load_edge_list, load_point_cloud_csv, parse_edge_list};
pub use space::{shortest_path_metric, validate_metric, BlockMetric, FiniteSpace, MetricError, PointMetric, REL_EPS};
