use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rcgap::sampler::format_float;
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Resolved configuration written at the top of every output.
#[derive(Debug, Clone)]
pub struct Header {
    command: &'static str,
    fields: Vec<(&'static str, Value)>,
}

impl Header {
    pub fn new(command: &'static str) -> Self {
        Header {
            command,
            fields: Vec::new(),
        }
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.fields.push((key, value.into()));
        self
    }

    /// `# rcgap version=... command=... key=value ...`
    pub fn comment_line(&self) -> String {
        let mut line = format!("# rcgap version={} command={}", rcgap::VERSION, self.command);
        for (key, value) in &self.fields {
            line.push(' ');
            line.push_str(key);
            line.push('=');
            line.push_str(&match value {
                Value::Number(n) if n.is_f64() => n.as_f64().unwrap_or(f64::NAN).to_string(),
                other => plain(other),
            });
        }
        line
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("version".into(), json!(rcgap::VERSION));
        map.insert("command".into(), json!(self.command));
        for (key, value) in &self.fields {
            map.insert((*key).into(), value.clone());
        }
        Value::Object(map)
    }
}

/// A cell rendered without quotes; floats keep 17 significant digits.
fn plain(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => format_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Float cell; non-finite values become null.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Rows of named columns.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, header: &Header, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(header),
            Format::Text => self.render_text(header),
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.columns
                                .iter()
                                .zip(row)
                                .map(|(c, v)| ((*c).to_string(), v.clone()))
                                .collect(),
                        )
                    })
                    .collect();
                let doc = json!({ "header": header.to_json(), "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }

    fn render_csv(&self, header: &Header) -> String {
        let mut out = header.comment_line();
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(plain).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn render_text(&self, header: &Header) -> String {
        let mut out = header.comment_line();
        out.push('\n');
        if self.rows.len() == 1 {
            let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (c, v) in self.columns.iter().zip(&self.rows[0]) {
                out.push_str(&format!("{c:<width$}  {}\n", plain(v)));
            }
            return out;
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                + "\n"
        };
        out.push_str(&line(self.columns.clone()));
        for row in &cells {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}

/// Standard output, or a buffered file when `path` is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut w = sink(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Header, Table) {
        let header = Header::new("exact-gap").with("graph", "edge").with("p", 0.5);
        let mut table = Table::new(vec!["states", "gap"]);
        table.push(vec![json!(2), float(0.75)]);
        (header, table)
    }

    #[test]
    fn csv_has_comment_header() {
        let (h, t) = sample();
        let text = t.render(&h, Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# rcgap version="));
        assert!(lines[0].ends_with("command=exact-gap graph=edge p=0.5"));
        assert_eq!(lines[1], "states,gap");
        assert_eq!(lines[2], "2,7.5000000000000000e-1");
    }

    #[test]
    fn json_has_header_object() {
        let (h, t) = sample();
        let v: Value = serde_json::from_str(&t.render(&h, Format::Json)).unwrap();
        assert_eq!(v["header"]["command"], "exact-gap");
        assert_eq!(v["rows"][0]["gap"], 0.75);
    }

    #[test]
    fn text_lists_single_row_vertically() {
        let (h, t) = sample();
        let text = t.render(&h, Format::Text);
        assert!(text.lines().nth(2).unwrap().starts_with("gap"));
        assert!(float(f64::NAN).is_null());
    }
}
