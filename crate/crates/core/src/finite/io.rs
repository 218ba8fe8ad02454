//! Loaders for distance matrices, edge lists and point clouds.

use std::io::Read;

use super::space::{shortest_path_metric, FiniteSpace, MetricError, PointMetric};

fn csv_rows(reader: impl Read) -> Result<Vec<Vec<f64>>, MetricError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| MetricError::Parse { line: k + 1, msg: e.to_string() })?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            // A non-numeric first row is a header.
            Err(_) if k == 0 => continue,
            Err(e) => return Err(MetricError::Parse { line: k + 1, msg: e.to_string() }),
        }
    }
    Ok(rows)
}

/// Row-major CSV distance matrix, header optional.
pub fn load_distance_csv(reader: impl Read, h: f64) -> Result<FiniteSpace, MetricError> {
    FiniteSpace::from_matrix(csv_rows(reader)?, h)
}

/// CSV of point coordinates, one point per row, header optional.
pub fn load_point_cloud_csv(reader: impl Read, metric: PointMetric, h: f64) -> Result<FiniteSpace, MetricError> {
    FiniteSpace::from_points(&csv_rows(reader)?, metric, h)
}

/// `u v w` lines; blank lines and `#` comments are skipped.
pub fn parse_edge_list(text: &str) -> Result<Vec<(usize, usize, f64)>, MetricError> {
    let mut edges = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| MetricError::Parse { line: k + 1, msg: format!("{msg}: '{line}'") };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, w] = fields[..] else {
            return Err(err("expected 'u v w'"));
        };
        edges.push((
            u.parse().map_err(|_| err("bad vertex"))?,
            v.parse().map_err(|_| err("bad vertex"))?,
            w.parse().map_err(|_| err("bad weight"))?,
        ));
    }
    Ok(edges)
}

/// Shortest-path space of an edge list; vertices are `0..=max index` unless `n` is given.
pub fn load_edge_list(text: &str, n: Option<usize>, allow_disconnected: bool) -> Result<FiniteSpace, MetricError> {
    let edges = parse_edge_list(text)?;
    let n = n.unwrap_or_else(|| edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0));
    shortest_path_metric(n, &edges, allow_disconnected)
}
