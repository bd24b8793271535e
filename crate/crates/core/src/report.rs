//! CSV artifacts with JSON sidecars.
//!
//! CSV bodies depend only on the computation; wall-clock time and other
//! run metadata live in the sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(x: usize) -> Cell {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Cell {
        Cell::Int(x as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Cell {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Cell {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Cell {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Cell {
        x.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(x) => write!(out, "{x}").unwrap(),
            Cell::Float(x) if x.is_nan() => out.push_str("nan"),
            Cell::Float(x) => write!(out, "{x}").unwrap(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap()
            }
            Cell::Text(s) => out.push_str(s),
            Cell::Empty => {}
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::report::Cell::from($x)),*] };
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a, C: Serialize, S: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub output: &'a str,
    pub created_unix: u64,
    pub run_config: &'a C,
    pub summary: &'a S,
    pub notices: &'a [String],
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `body` to `dir/name` and its sidecar next to it.
pub fn write_artifact<C: Serialize, S: Serialize>(
    dir: &Path,
    name: &str,
    body: &str,
    run_config: &C,
    summary: &S,
    notices: &[String],
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body)?;
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        output: name,
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        run_config,
        summary,
        notices,
    };
    fs::write(sidecar_path(&path), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok(path)
}
