//! CSV output with a `#`-prefixed run manifest, and parsing of that
//! manifest for re-runs.
//!
//! ```text
//! # edgeworth 0.1.0
//! # command: compare
//! # spec: alpha=3
//! # spec: form=pareto-sym
//! # grid: -3:3:121
//! # n: 20
//! # option: engine=inversion
//! # oracle: quad_abs_tol=1e-10
//! # wall_clock_s: 0.81
//! x,oracle,...
//! ```

use std::fmt::Write as _;

use crate::config::{parse_spec, Grid, SpecConfig};
use crate::CliError;

/// Everything needed to reproduce a run.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub spec_lines: Vec<String>,
    pub grid: Grid,
    pub n: Vec<u64>,
    /// Command-specific `key=value` options, in order.
    pub options: Vec<(String, String)>,
    pub oracle: Vec<(String, String)>,
    pub wall_clock_s: Option<f64>,
}

impl Manifest {
    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn spec(&self) -> Result<SpecConfig, CliError> {
        parse_spec(&self.spec_lines.join("\n"))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# edgeworth {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# command: {}", self.command);
        for l in &self.spec_lines {
            let _ = writeln!(s, "# spec: {l}");
        }
        let _ = writeln!(s, "# grid: {}", self.grid);
        let ns: Vec<String> = self.n.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "# n: {}", ns.join(","));
        for (k, v) in &self.options {
            let _ = writeln!(s, "# option: {k}={v}");
        }
        for (k, v) in &self.oracle {
            let _ = writeln!(s, "# oracle: {k}={v}");
        }
        if let Some(t) = self.wall_clock_s {
            let _ = writeln!(s, "# wall_clock_s: {t:.3}");
        }
        s
    }

    /// Reads the leading `#` block of a CSV file.
    pub fn parse(text: &str) -> Result<Manifest, CliError> {
        let perr = |m: String| CliError::Parse(format!("manifest: {m}"));
        let mut command = None;
        let mut spec_lines = Vec::new();
        let mut grid = None;
        let mut n = None;
        let mut options = Vec::new();
        let mut oracle = Vec::new();
        let mut wall_clock_s = None;
        for line in text.lines() {
            let Some(body) = line.strip_prefix('#') else { break };
            let body = body.trim();
            let Some((key, value)) = body.split_once(':') else { continue };
            let value = value.trim();
            let kv = || {
                value
                    .split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| perr(format!("expected key=value in {body}")))
            };
            match key.trim() {
                "command" => command = Some(value.to_string()),
                "spec" => spec_lines.push(value.to_string()),
                "grid" => grid = Some(Grid::parse(value)?),
                "n" => n = Some(crate::config::parse_n_list(value)?),
                "option" => options.push(kv()?),
                "oracle" => oracle.push(kv()?),
                "wall_clock_s" => wall_clock_s = value.parse().ok(),
                _ => {}
            }
        }
        Ok(Manifest {
            command: command.ok_or_else(|| perr("no command line".into()))?,
            spec_lines,
            grid: grid.ok_or_else(|| perr("no grid line".into()))?,
            n: n.ok_or_else(|| perr("no n line".into()))?,
            options,
            oracle,
            wall_clock_s,
        })
    }
}

/// A CSV table of numeric and text cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn render(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Parses CSV text, skipping `#` lines. Cells that parse as numbers
    /// become `Num`.
    pub fn parse(text: &str) -> Result<Table, CliError> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| CliError::Parse("csv: no header".into()))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let row: Vec<Cell> = l
                .split(',')
                .map(|c| match c.parse::<f64>() {
                    Ok(v) => Cell::Num(v),
                    Err(_) => Cell::Text(c.to_string()),
                })
                .collect();
            if row.len() != columns.len() {
                return Err(CliError::Parse(format!("csv row {}: {} cells, expected {}", i + 1, row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }
}
