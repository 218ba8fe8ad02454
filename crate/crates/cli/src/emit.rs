//! CSV tables with a trailing `# key: value` summary block, and plain-text summaries.

use std::fmt::Write as _;

use metric_center::{AnySet, ExtReal};

/// What one command produced for one target.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Heading naming the target, used when several outcomes share one output.
    pub target: String,
    pub csv: String,
    pub text: String,
    /// Property checks that failed; any entry makes the exit code 1.
    pub violations: Vec<String>,
}

pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Table {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header.iter().map(|s| s.as_ref())).expect("writing to memory");
        Table { writer }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        self.writer.write_record(fields.iter().map(|s| s.as_ref())).expect("writing to memory");
    }

    /// The table followed by the summary block.
    pub fn finish(self, summary: &Summary) -> String {
        let bytes = self.writer.into_inner().expect("writing to memory");
        let mut out = String::from_utf8(bytes).expect("fields are UTF-8");
        out.push_str(&summary.block());
        out
    }
}

/// Ordered key/value pairs shared by the CSV summary block and the text report.
#[derive(Debug, Clone, Default)]
pub struct Summary(pub Vec<(String, String)>);

impl Summary {
    pub fn add(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn block(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            writeln!(out, "# {k}: {}", v.replace('\n', " ")).unwrap();
        }
        out
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            writeln!(out, "{k}: {v}").unwrap();
        }
        out
    }
}

/// Shortest decimal that reads back to the same `f64`; `inf` for infinity.
pub fn float(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Length on the line (`inf` when unbounded), number of points otherwise.
pub fn size(s: &AnySet) -> String {
    match s {
        AnySet::Line(l) => l.measure().map_or_else(|| "inf".to_string(), |m| metric_center::rational::format_rational(&m)),
        AnySet::Cells(m) => m.count().to_string(),
    }
}

/// The set itself on the line, its number of points otherwise.
pub fn compact(s: &AnySet) -> String {
    match s {
        AnySet::Line(l) if l.is_empty() => "{}".to_string(),
        AnySet::Line(l) => l.to_string(),
        AnySet::Cells(m) => m.count().to_string(),
    }
}

pub fn ext(v: &ExtReal) -> String {
    v.to_string()
}

/// Coordinate columns `x0..x{dim-1}`.
pub fn coord_header(dim: usize) -> Vec<String> {
    (0..dim).map(|k| format!("x{k}")).collect()
}

pub fn point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|&x| float(x)).collect();
    format!("({})", parts.join(", "))
}
