//! Deterministic CSV assembly: `#`-prefixed header block echoing the
//! resolved configuration, then RFC-4180 rows with fixed float formatting
//! (12 significant digits), so identical inputs give byte-identical files.

use std::io::Write;

/// Fixed-width scientific formatting used for every float field.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct CsvDoc {
    lines: Vec<String>,
}

impl CsvDoc {
    pub fn new(command: &str, echo: &[String]) -> Self {
        let mut lines = vec![format!("# optosqueeze {command}")];
        for entry in echo {
            lines.push(format!("# {entry}"));
        }
        CsvDoc { lines }
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.lines.push(columns.join(","));
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(
            fields
                .iter()
                .map(|f| {
                    if f.contains(',') || f.contains('"') || f.contains('\n') {
                        format!("\"{}\"", f.replace('"', "\"\""))
                    } else {
                        f.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(","),
        );
    }

    pub fn write_to(&self, out: Option<&std::path::Path>) -> std::io::Result<()> {
        let body = self.lines.join("\n") + "\n";
        match out {
            Some(path) => std::fs::write(path, body),
            None => std::io::stdout().write_all(body.as_bytes()),
        }
    }
}

/// Cell helpers: numeric fields are empty when a row failed.
pub fn cell(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    if b { "1".into() } else { "0".into() }
}
