//! Report emission: CSV with a `#`-prefixed header block, or JSON with
//! stable key order. Floats are printed with 17 significant digits so a
//! re-parse reproduces them bit-exactly.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub const TOOL_NAME: &str = "cubesense";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// One report cell. Everything renders as an unquoted token.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    UInt(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render_csv(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(v) => v.clone(),
        }
    }
}

/// 17 significant digits: enough for exact f64 round-trips.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    /// Echo of the effective configuration, sorted by key.
    pub config: BTreeMap<String, String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra header-block annotations (aggregates, notes), in insertion
    /// order.
    pub notes: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Report {
        Report {
            command: command.to_string(),
            seed,
            config: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool: {TOOL_NAME} {TOOL_VERSION}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# seed: {}\n", self.seed));
        for (k, v) in &self.config {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonReport<'a> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            seed: u64,
            config: &'a BTreeMap<String, String>,
            notes: BTreeMap<String, String>,
            columns: &'a [&'static str],
            data: &'a [Vec<Cell>],
        }
        let doc = JsonReport {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: &self.command,
            seed: self.seed,
            config: &self.config,
            notes: self.notes.iter().cloned().collect(),
            columns: &self.columns,
            data: &self.rows,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_row_set_gives_header_only_output() {
        let mut r = Report::new("empty", 1);
        r.columns = vec!["x", "y"];
        let text = r.render(Format::Csv);
        assert!(text.ends_with("x,y\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, -0.0, 12345.678] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn header_block_precedes_columns() {
        let mut r = Report::new("demo", 7);
        r.config("m", 3);
        r.note("extra", "x");
        r.columns = vec!["a", "b"];
        r.rows.push(vec![Cell::UInt(1), Cell::Float(0.5)]);
        let text = r.render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# tool: cubesense"));
        assert_eq!(lines[1], "# command: demo");
        assert_eq!(lines[2], "# seed: 7");
        assert_eq!(lines[3], "# m: 3");
        assert_eq!(lines[4], "# extra: x");
        assert_eq!(lines[5], "a,b");
        assert!(lines[6].starts_with("1,"));
    }
}
