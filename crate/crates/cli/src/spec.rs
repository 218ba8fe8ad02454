//! JSON spec documents: named spaces, subsets bound to them, and optional tasks.
//!
//! Parsing is strict. Unknown keys, duplicate names, dangling references and values written
//! in the wrong numeric regime are all errors with a line and column.

use std::fmt;
use std::marker::PhantomData;

use metric_center::finite::PointMetric;
use metric_center::grid::Csg;
use metric_center::rational::parse_rational;
use metric_center::IntervalSet;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name-keyed entries in document order. Duplicate keys are rejected while parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct Named<T>(pub Vec<(String, T)>);

impl<T> Default for Named<T> {
    fn default() -> Self {
        Named(Vec::new())
    }
}

impl<T> Named<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.0.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Serialize> Serialize for Named<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NamedVisitor<T>(PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for NamedVisitor<T> {
            type Value = Named<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object of named entries")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some(name) = map.next_key::<String>()? {
                    if out.iter().any(|(n, _)| *n == name) {
                        return Err(de::Error::custom(format!("duplicate name '{name}'")));
                    }
                    out.push((name, map.next_value()?));
                }
                Ok(Named(out))
            }
        }

        deserializer.deserialize_map(NamedVisitor(PhantomData))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub spaces: Named<SpaceSpec>,
    #[serde(default)]
    pub subsets: Named<SubsetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<Task>,
}

fn real_line() -> IntervalSet {
    IntervalSet::real_line()
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// An ambient space. Inline data and `file` are alternatives; files are resolved relative to
/// the spec's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// A subspace of the real line, exact.
    IntervalSet {
        #[serde(default = "real_line")]
        set: IntervalSet,
    },
    DistanceMatrix {
        h: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
    },
    /// Shortest-path metric of a weighted graph; `h` defaults to the lightest edge.
    Graph {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<(usize, usize, f64)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
        #[serde(default, skip_serializing_if = "is_false")]
        allow_disconnected: bool,
    },
    PointCloud {
        metric: PointMetric,
        h: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
    },
    /// Cells of a lattice of spacing `h` inside a CSG shape.
    GridCsg {
        h: f64,
        shape: Csg,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bbox: Option<BoundingBox>,
    },
}

impl SpaceSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SpaceSpec::IntervalSet { .. } => "interval_set",
            SpaceSpec::DistanceMatrix { .. } => "distance_matrix",
            SpaceSpec::Graph { .. } => "graph",
            SpaceSpec::PointCloud { .. } => "point_cloud",
            SpaceSpec::GridCsg { .. } => "grid_csg",
        }
    }

    fn finite(&self) -> bool {
        matches!(self, SpaceSpec::DistanceMatrix { .. } | SpaceSpec::Graph { .. } | SpaceSpec::PointCloud { .. })
    }
}

/// A subset of a declared space: `set` on the line, `points` (indices) in finite spaces, and
/// on grids either the space's own shape or a `shape` sampled on the same lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetSpec {
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<IntervalSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Csg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskCommand {
    Analyze,
    Product,
    Union,
    Inscribe,
    Filtrate,
}

impl TaskCommand {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskCommand::Analyze => "analyze",
            TaskCommand::Product => "product",
            TaskCommand::Union => "union",
            TaskCommand::Inscribe => "inscribe",
            TaskCommand::Filtrate => "filtrate",
        }
    }
}

/// A batch directive. `product` and `union` use all listed subsets together; the others run
/// once per subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub command: TaskCommand,
    pub subsets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{at}: {msg}")]
    Syntax { at: Location, msg: String },
    /// An exact value where a float is expected, or the reverse.
    #[error("{at}: {msg}")]
    Regime { at: Location, msg: String },
    #[error("{at}: {owner} refers to undeclared {kind} '{name}'")]
    Dangling { at: Location, owner: String, kind: &'static str, name: String },
    #[error("{at}: {msg}")]
    Invalid { at: Location, msg: String },
}

/// Position of the value reached by following `keys` in order through the text.
///
/// This is a plain text search, good enough to point at entries of a well-formed document.
fn locate(text: &str, keys: &[&str]) -> Location {
    let mut at = 0;
    for key in keys {
        let needle = format!("\"{key}\"");
        let mut from = at;
        loop {
            let Some(k) = text[from..].find(&needle) else { return position(text, at) };
            let after = from + k + needle.len();
            let rest = text[after..].trim_start();
            if let Some(value) = rest.strip_prefix(':') {
                at = text.len() - value.trim_start().len();
                break;
            }
            from = after;
        }
    }
    position(text, at)
}

fn position(text: &str, offset: usize) -> Location {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Location { line, column }
}

/// Position of the `index`-th string `"value"` after the value of `keys`.
fn locate_in_list(text: &str, keys: &[&str], value: &str, index: usize) -> Location {
    let start = locate(text, keys);
    let offset = offset_of(text, start);
    let needle = format!("\"{value}\"");
    let mut from = offset;
    for _ in 0..=index {
        match text[from..].find(&needle) {
            Some(k) => from += k + 1,
            None => return start,
        }
    }
    position(text, from - 1)
}

fn offset_of(text: &str, at: Location) -> usize {
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if i + 1 == at.line {
            return offset + line.char_indices().nth(at.column - 1).map_or(line.len(), |(b, _)| b);
        }
        offset += line.len();
    }
    offset
}

fn from_serde(e: serde_json::Error) -> SpecError {
    let at = Location { line: e.line(), column: e.column() };
    let msg = e.to_string();
    // serde_json appends " at line L column C"; the location is reported separately.
    let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m).to_string();
    if let Some(rest) = msg.strip_prefix("invalid type: string \"") {
        if let Some((literal, expected)) = rest.split_once('"') {
            if expected.contains("f64") && parse_rational(literal).is_ok() {
                let msg = format!("rational literal '{literal}' in a floating-point spec; write it as a decimal");
                return SpecError::Regime { at, msg };
            }
        }
    }
    SpecError::Syntax { at, msg }
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<SpecDocument, SpecError> {
    let doc: SpecDocument = serde_json::from_str(text).map_err(from_serde)?;
    validate(&doc, text)?;
    Ok(doc)
}

/// Pretty JSON that [`parse_spec`] reads back to the same document.
pub fn emit_spec(doc: &SpecDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("spec documents serialize");
    s.push('\n');
    s
}

fn validate(doc: &SpecDocument, text: &str) -> Result<(), SpecError> {
    for (name, _) in doc.subsets.iter() {
        if doc.spaces.get(name).is_some() {
            return Err(SpecError::Invalid {
                at: locate(text, &["subsets", name]),
                msg: format!("'{name}' names both a space and a subset"),
            });
        }
    }
    for (name, space) in doc.spaces.iter() {
        let at = || locate(text, &["spaces", name]);
        let sources = match space {
            SpaceSpec::DistanceMatrix { rows, file, .. } => Some(rows.is_some() as u8 + file.is_some() as u8),
            SpaceSpec::Graph { edges, file, .. } => Some(edges.is_some() as u8 + file.is_some() as u8),
            SpaceSpec::PointCloud { points, file, .. } => Some(points.is_some() as u8 + file.is_some() as u8),
            _ => None,
        };
        if sources.is_some_and(|n| n != 1) {
            let msg = format!("space '{name}' needs exactly one of inline data or 'file'");
            return Err(SpecError::Invalid { at: at(), msg });
        }
    }
    for (name, subset) in doc.subsets.iter() {
        let Some(space) = doc.spaces.get(&subset.space) else {
            return Err(SpecError::Dangling {
                at: locate(text, &["subsets", name, "space"]),
                owner: format!("subset '{name}'"),
                kind: "space",
                name: subset.space.clone(),
            });
        };
        check_subset_fields(name, subset, space).map_err(|(field, msg, regime)| {
            let at = locate(text, &["subsets", name, field]);
            if regime {
                SpecError::Regime { at, msg }
            } else {
                SpecError::Invalid { at, msg }
            }
        })?;
    }
    for (k, task) in doc.tasks.iter().enumerate() {
        if task.subsets.is_empty() {
            return Err(SpecError::Invalid { at: locate(text, &["tasks"]), msg: format!("task {k} lists no subsets") });
        }
        for (i, name) in task.subsets.iter().enumerate() {
            if doc.subsets.get(name).is_none() {
                let earlier = doc.tasks[..k].iter().flat_map(|t| &t.subsets).filter(|s| *s == name).count();
                let before = task.subsets[..i].iter().filter(|s| *s == name).count();
                return Err(SpecError::Dangling {
                    at: locate_in_list(text, &["tasks"], name, earlier + before),
                    owner: format!("task {k} ({})", task.command.as_str()),
                    kind: "subset",
                    name: name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Which fields a subset may carry for its space. Errors name the offending field and
/// whether it mixes the exact and floating-point regimes.
fn check_subset_fields(name: &str, s: &SubsetSpec, space: &SpaceSpec) -> Result<(), (&'static str, String, bool)> {
    let kind = space.kind();
    match space {
        SpaceSpec::IntervalSet { set: ambient } => {
            if s.points.is_some() || s.shape.is_some() {
                let field = if s.points.is_some() { "points" } else { "shape" };
                return Err((field, format!("subset '{name}' of the interval_set space takes 'set' only"), true));
            }
            let Some(set) = &s.set else {
                return Err(("space", format!("subset '{name}' needs a 'set'"), false));
            };
            if !set.is_subset_of(ambient) {
                return Err(("set", format!("subset '{name}' = {set} is not contained in {ambient}"), false));
            }
        }
        _ if space.finite() => {
            if s.set.is_some() || s.shape.is_some() {
                let field = if s.set.is_some() { "set" } else { "shape" };
                return Err((field, format!("subset '{name}' of the {kind} space takes 'points' only"), s.set.is_some()));
            }
            if s.points.is_none() {
                return Err(("space", format!("subset '{name}' needs 'points'"), false));
            }
        }
        _ => {
            if s.set.is_some() || s.points.is_some() {
                let field = if s.set.is_some() { "set" } else { "points" };
                let what = if s.set.is_some() { "an exact interval set" } else { "point indices" };
                let msg = format!("subset '{name}' gives {what} for the grid space; use 'shape'");
                return Err((field, msg, s.set.is_some()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "spaces": { "R": { "kind": "interval_set" } },
  "subsets": { "C": { "space": "R", "set": "[0,1],[5,10]" } }
}"#;

    #[test]
    fn minimal_interval_spec() {
        let doc = parse_spec(MINIMAL).unwrap();
        assert_eq!(doc.spaces.len(), 1);
        assert_eq!(doc.subsets.len(), 1);
        assert_eq!(doc.subsets.get("C").unwrap().set.as_ref().unwrap().to_string(), "[0,1],[5,10]");
        assert_eq!(parse_spec(&emit_spec(&doc)).unwrap(), doc);
    }

    #[test]
    fn dangling_space_reference_is_located() {
        let text = MINIMAL.replace("\"space\": \"R\"", "\"space\": \"Q\"");
        match parse_spec(&text) {
            Err(SpecError::Dangling { at, name, .. }) => {
                assert_eq!(name, "Q");
                assert_eq!(at, Location { line: 3, column: 32 });
            }
            other => panic!("expected a dangling reference, got {other:?}"),
        }
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let text = MINIMAL.replace("[0,1],[5,10]", "[0,5/0]");
        let e = parse_spec(&text).unwrap_err();
        assert!(matches!(e, SpecError::Syntax { at: Location { line: 3, .. }, .. }), "{e}");
        assert!(e.to_string().contains("5/0"), "{e}");
    }

    #[test]
    fn rationals_in_a_grid_spec_are_rejected() {
        let text = r#"{"spaces": {"D": {"kind": "grid_csg", "h": "1/50",
            "shape": {"type": "disc", "center": [0, 0], "radius": 1}}}}"#;
        assert!(matches!(parse_spec(text), Err(SpecError::Regime { .. })));
        let text = r#"{"spaces": {"D": {"kind": "grid_csg", "h": 0.1,
            "shape": {"type": "disc", "center": [0, 0], "radius": 1}}},
            "subsets": {"A": {"space": "D", "set": "[0,1]"}}}"#;
        match parse_spec(text) {
            Err(SpecError::Regime { at, msg }) => {
                assert_eq!(at.line, 3);
                assert!(msg.contains("exact interval set"), "{msg}");
            }
            other => panic!("expected a field error, got {other:?}"),
        }
    }

    #[test]
    fn strict_keys_and_unique_names() {
        let text = MINIMAL.replace("\"kind\"", "\"colour\": 1, \"kind\"");
        assert!(matches!(parse_spec(&text), Err(SpecError::Syntax { .. })));
        let text = r#"{"spaces": {"R": {"kind": "interval_set"}, "R": {"kind": "interval_set"}}}"#;
        let e = parse_spec(text).unwrap_err();
        assert!(e.to_string().contains("duplicate name 'R'"), "{e}");
        let text = r#"{"spaces": {"R": {"kind": "interval_set"}}, "subsets": {"R": {"space": "R", "set": "[0,1]"}}}"#;
        assert!(matches!(parse_spec(text), Err(SpecError::Invalid { .. })));
    }

    #[test]
    fn dangling_task_reference() {
        let text = MINIMAL.replace("\n}", ",\n  \"tasks\": [{\"command\": \"analyze\", \"subsets\": [\"C\", \"D\"]}]\n}");
        match parse_spec(&text) {
            Err(SpecError::Dangling { at, name, kind, .. }) => {
                assert_eq!((name.as_str(), kind, at.line), ("D", "subset", 4));
            }
            other => panic!("expected a dangling reference, got {other:?}"),
        }
    }

    #[test]
    fn subset_outside_its_ambient() {
        let text = MINIMAL.replace("{ \"kind\": \"interval_set\" }", "{ \"kind\": \"interval_set\", \"set\": \"[0,4]\" }");
        assert!(matches!(parse_spec(&text), Err(SpecError::Invalid { .. })));
    }
}
