//! Builds engine objects from a parsed spec, one space at a time and only when needed.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use metric_center::finite::{load_distance_csv, load_edge_list, load_point_cloud_csv, shortest_path_metric, FiniteSpace};
use metric_center::grid::{rasterize, GridRegion};
use metric_center::{AnySet, IntervalSet, Mask};

use crate::spec::{parse_spec, SpaceSpec, SpecDocument};
use crate::CliError;

/// A built ambient space.
#[derive(Debug, Clone)]
pub enum Space {
    Line(IntervalSet),
    Finite(Arc<FiniteSpace>),
    Grid(Arc<GridRegion>),
}

impl Space {
    pub fn engine(&self) -> &'static str {
        match self {
            Space::Line(_) => "line-exact",
            Space::Finite(_) => "finite",
            Space::Grid(_) => "grid",
        }
    }
}

/// A subset together with the space it lives in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub space_name: String,
    pub space: Space,
    pub set: AnySet,
}

impl Resolved {
    /// The grid region whose occupied cells are this subset.
    pub fn region(&self) -> Option<GridRegion> {
        match (&self.space, &self.set) {
            (Space::Grid(g), AnySet::Cells(m)) => Some(g.with_occupancy(m.clone())),
            _ => None,
        }
    }
}

pub struct Workspace {
    pub doc: SpecDocument,
    base: PathBuf,
    cache: HashMap<(String, Option<u64>), Space>,
}

impl Workspace {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let doc = parse_spec(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(Workspace::new(doc, path.parent().map(Path::to_path_buf).unwrap_or_default()))
    }

    pub fn new(doc: SpecDocument, base: PathBuf) -> Self {
        Workspace { doc, base, cache: HashMap::new() }
    }

    fn read(&self, file: &str) -> Result<String, CliError> {
        let p = self.base.join(file);
        fs::read_to_string(&p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))
    }

    /// The named space; `h` overrides the resolution of sampled spaces.
    pub fn space(&mut self, name: &str, h: Option<f64>) -> Result<Space, CliError> {
        let key = (name.to_string(), h.map(f64::to_bits));
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let spec = self.doc.spaces.get(name).ok_or_else(|| CliError::Usage(format!("no space named '{name}'")))?.clone();
        let engine = |e: &dyn std::fmt::Display| CliError::Usage(format!("space '{name}': {e}"));
        let finite = |x: FiniteSpace| -> Result<Space, CliError> {
            let x = match h {
                Some(h) => x.with_h(h).map_err(|e| engine(&e))?,
                None => x,
            };
            Ok(Space::Finite(Arc::new(x)))
        };
        let built = match &spec {
            SpaceSpec::IntervalSet { set } => Space::Line(set.clone()),
            SpaceSpec::DistanceMatrix { h: h0, rows, file } => {
                let x = match (rows, file) {
                    (Some(rows), _) => FiniteSpace::from_matrix(rows.clone(), *h0),
                    (None, Some(f)) => load_distance_csv(self.read(f)?.as_bytes(), *h0),
                    (None, None) => unreachable!("validated"),
                };
                finite(x.map_err(|e| engine(&e))?)?
            }
            SpaceSpec::Graph { vertices, edges, file, h: h0, allow_disconnected } => {
                let x = match (edges, file) {
                    (Some(edges), _) => {
                        let n = vertices.unwrap_or_else(|| edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0));
                        shortest_path_metric(n, edges, *allow_disconnected)
                    }
                    (None, Some(f)) => load_edge_list(&self.read(f)?, *vertices, *allow_disconnected),
                    (None, None) => unreachable!("validated"),
                };
                let x = x.map_err(|e| engine(&e))?;
                let x = match h0 {
                    Some(h0) => x.with_h(*h0).map_err(|e| engine(&e))?,
                    None => x,
                };
                finite(x)?
            }
            SpaceSpec::PointCloud { metric, h: h0, points, file } => {
                let x = match (points, file) {
                    (Some(p), _) => FiniteSpace::from_points(p, *metric, *h0),
                    (None, Some(f)) => load_point_cloud_csv(self.read(f)?.as_bytes(), *metric, *h0),
                    (None, None) => unreachable!("validated"),
                };
                finite(x.map_err(|e| engine(&e))?)?
            }
            SpaceSpec::GridCsg { h: h0, shape, bbox } => {
                let b = bbox.as_ref().map(|b| (b.min.as_slice(), b.max.as_slice()));
                Space::Grid(Arc::new(rasterize(shape, b, h.unwrap_or(*h0)).map_err(|e| engine(&e))?))
            }
        };
        self.cache.insert(key, built.clone());
        Ok(built)
    }

    pub fn subset(&mut self, name: &str, h: Option<f64>) -> Result<Resolved, CliError> {
        let spec = self.doc.subsets.get(name).ok_or_else(|| CliError::Usage(format!("no subset named '{name}'")))?.clone();
        let space = self.space(&spec.space, h)?;
        let set = match &space {
            Space::Line(_) => AnySet::Line(spec.set.clone().expect("validated")),
            Space::Finite(x) => {
                let points = spec.points.as_ref().expect("validated");
                if let Some(&bad) = points.iter().find(|&&i| i >= x.len()) {
                    return Err(CliError::Usage(format!("subset '{name}': point {bad} is outside a space of {} points", x.len())));
                }
                AnySet::Cells(Mask::from_indices(x.len(), points.iter().copied()))
            }
            Space::Grid(g) => match &spec.shape {
                Some(shape) => AnySet::Cells(g.sample(shape).map_err(|e| CliError::Usage(format!("subset '{name}': {e}")))?),
                None => AnySet::Cells(g.occupancy().clone()),
            },
        };
        Ok(Resolved { name: name.to_string(), space_name: spec.space, space, set })
    }
}
