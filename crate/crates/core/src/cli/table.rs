//! CSV result tables with a `#`-prefixed metadata header and a verdict footer.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(verdict_word(v).into())
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // shortest representation that parses back to the same bits
            Cell::Float(v) => write!(f, "{v:e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

pub fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Ordered `key: value` pairs written above the data.
    pub metadata: Vec<(String, String)>,
    /// Summary quantities written below the data, before the verdict.
    pub summary: Vec<(String, String)>,
    pub verdict: Option<bool>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Invariant(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            for line in v.lines() {
                writeln!(out, "# {k}: {line}")?;
            }
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(|c| c.to_string()))?;
            }
            w.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# {k}: {v}")?;
        }
        if let Some(v) = self.verdict {
            writeln!(out, "# verdict: {}", verdict_word(v))?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(file)
    }

    /// Reads a table written by `write_to`. Comment lines before the header
    /// are metadata; those after the data are summary entries. Cells come
    /// back as integers, floats or text by trial parsing.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut head = Vec::new();
        let mut body = String::new();
        let mut tail = Vec::new();
        let mut seen_data = false;
        for line in input.lines() {
            let line = line?;
            match line.strip_prefix("# ") {
                Some(c) if !seen_data => head.push(c.to_string()),
                Some(c) => tail.push(c.to_string()),
                None => {
                    seen_data = true;
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let split = |s: &String| {
            let (k, v) = s.split_once(": ").unwrap_or((s.as_str(), ""));
            (k.to_string(), v.to_string())
        };
        let mut metadata: Vec<(String, String)> = Vec::new();
        for (k, v) in head.iter().map(split) {
            match metadata.last_mut() {
                Some((pk, pv)) if *pk == k => {
                    pv.push('\n');
                    pv.push_str(&v);
                }
                _ => metadata.push((k, v)),
            }
        }
        let mut summary: Vec<(String, String)> = tail.iter().map(split).collect();
        let verdict = match summary.iter().position(|(k, _)| k == "verdict") {
            Some(i) => Some(summary.remove(i).1 == "PASS"),
            None => None,
        };
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let columns = rdr.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec?.iter().map(parse_cell).collect());
        }
        Ok(Self {
            columns,
            rows,
            metadata,
            summary,
            verdict,
        })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn parse_cell(s: &str) -> Cell {
    if let Ok(i) = s.parse::<i64>() {
        Cell::Int(i)
    } else if let Ok(f) = s.parse::<f64>() {
        Cell::Float(f)
    } else {
        Cell::Text(s.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_everything() {
        let mut t = ResultTable::new(["x", "label", "count"]);
        t.meta("experiment", "demo");
        t.meta("config", "a = 1\nb = [1, 2]");
        t.push(vec![0.1.into(), "left, quoted".into(), 3usize.into()]).unwrap();
        t.push(vec![(-2.5e-17).into(), "PASS".into(), 0usize.into()]).unwrap();
        t.note("slope", 1.25);
        t.verdict = Some(true);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let back = ResultTable::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.summary_value("slope"), Some("1.25"));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new(["a", "b"]);
        assert!(t.push(vec![1.0.into()]).is_err());
    }
}
