//! CSV tables with `#key=value` metadata lines ahead of the header row.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable { columns: columns.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column; empty cells are skipped.
    pub fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.column(name).ok_or_else(|| Error::Config(format!("no column '{name}'")))?;
        self.rows
            .iter()
            .filter(|r| !r[c].is_empty())
            .map(|r| r[c].parse().map_err(|_| Error::Config(format!("column '{name}': bad number '{}'", r[c]))))
            .collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("#{k}={v}\n"));
        }
        let mut w = csv::Writer::from_writer(s.into_bytes());
        let rows = std::iter::once(&self.columns).chain(&self.rows);
        for r in rows {
            w.write_record(r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
    }

    /// Writes to `path`, or to stdout when `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => fs::write(p, self.render())?,
            None => std::io::stdout().lock().write_all(self.render().as_bytes())?,
        }
        Ok(())
    }

    /// Leading `#key=value` lines, then a header row and records of equal length.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut t = CsvTable::default();
        let (mut skipped, mut offset) = (0, 0);
        for line in text.split_inclusive('\n') {
            let trimmed = line.trim();
            if let Some(m) = trimmed.strip_prefix('#') {
                let (k, v) = m.split_once('=').unwrap_or((m, ""));
                t.meta.push((k.trim().to_string(), v.trim().to_string()));
            } else if !trimmed.is_empty() {
                break;
            }
            skipped += 1;
            offset += line.len();
        }
        let rest = &text[offset..];
        let bad = |e: csv::Error| {
            let line = e.position().map_or(0, |p| p.line() as usize) + skipped;
            Error::Parse { path: origin.to_path_buf(), line, msg: e.to_string() }
        };
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(rest.as_bytes());
        t.columns = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
        if t.columns.is_empty() {
            return Err(Error::EmptyFile(origin.to_path_buf()));
        }
        for rec in r.records() {
            t.rows.push(rec.map_err(bad)?.iter().map(str::to_string).collect());
        }
        Ok(t)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        let mut t = CsvTable::new(&["n", "err"]);
        t.meta("kernel", "gaussian m=2").meta("rho", "0.4*h^0.5");
        for (n, e) in [(10, 0.1f64), (20, 1.0 / 3.0), (40, 1e-300)] {
            t.push(vec![n.to_string(), fmt_f64(e)]);
        }
        let back = CsvTable::parse(&t.render(), Path::new("t")).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.numbers("err").unwrap()[1], 1.0 / 3.0);
        assert_eq!(back.get_meta("kernel"), Some("gaussian m=2"));
    }

    #[test]
    fn cells_with_commas_are_quoted() {
        let mut t = CsvTable::new(&["source", "n"]);
        t.push(vec!["file:/data/a,b/ss053.01434".into(), "1434".into()]);
        let text = t.render();
        assert!(text.contains("\"file:/data/a,b/ss053.01434\""));
        assert_eq!(CsvTable::parse(&text, Path::new("t")).unwrap(), t);
    }

    #[test]
    fn ragged_rows_are_parse_errors() {
        let e = CsvTable::parse("a,b\n1,2\n3\n", Path::new("x.csv")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(matches!(CsvTable::parse("#only=meta\n", Path::new("x")), Err(Error::EmptyFile(_))));
    }
}
