//! Rasterized regions of ℝⁿ (n ≤ 3) on origin-anchored grids of spacing `h`.

mod csg;
mod descriptors;
mod edt;
mod region;

use thiserror::Error;

pub use csg::Csg;
pub use descriptors::{
    descriptors_grid, largest_inscribed_balls, Certificate, GridFields, InscribedBalls, CENTER_BAND,
};
pub use edt::{distance_to_set, squared_edt, DistanceField, UNREACHED};
pub use region::{boundary_cells, rasterize, GridRegion, GridShape};

/// Environment variable overriding [`DEFAULT_CELL_CAP`].
pub const CELL_CAP_ENV: &str = "METRIC_CENTER_CELL_CAP";
pub const DEFAULT_CELL_CAP: usize = 10_000_000;

/// Largest grid any engine will allocate.
pub fn cell_cap() -> usize {
    std::env::var(CELL_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CELL_CAP)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("shape is unbounded; intersect it with a box")]
    Unbounded,
    #[error("bounding box {bbox:?} on axis {axis} leaves less than 2h around the shape {shape:?}")]
    BboxTooTight { axis: usize, shape: (f64, f64), bbox: (f64, f64) },
    #[error("grid would have {cells} cells, above the cap of {cap} (set {CELL_CAP_ENV} to raise it)")]
    TooManyCells { cells: usize, cap: usize },
    #[error("region is empty")]
    EmptyRegion,
    #[error("region is grid-clopen: no ball has a largest radius")]
    NoLargestBall,
}
