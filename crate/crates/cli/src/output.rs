//! JSON-lines and aligned-table rendering.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Severity of one record, ordered so the worst record decides the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Vacuous,
    Violation,
}

/// Records of one subcommand: JSON values plus their table rows.
pub struct Records {
    headers: Vec<&'static str>,
    json: Vec<Value>,
    rows: Vec<Vec<String>>,
    pub status: Status,
}

impl Records {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            json: Vec::new(),
            rows: Vec::new(),
            status: Status::Ok,
        }
    }

    pub fn push(
        &mut self,
        record: &impl Serialize,
        row: Vec<String>,
        status: Status,
    ) -> Result<(), CliError> {
        debug_assert_eq!(row.len(), self.headers.len());
        let value = serde_json::to_value(record).map_err(|e| CliError::Io(e.to_string()))?;
        self.json.push(value);
        self.rows.push(row);
        self.status = self.status.max(status);
        Ok(())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json.iter().fold(String::new(), |mut out, v| {
                out.push_str(&v.to_string());
                out.push('\n');
                out
            }),
            Format::Table => render_table(&self.headers, &self.rows),
        }
    }
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([headers[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut text = String::new();
        for (cell, w) in cells.zip(&widths) {
            let _ = write!(text, "{cell:<w$}  ");
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&mut headers.iter().copied());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut rule.iter().map(String::as_str));
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_columns_align() {
        let mut r = Records::new(&["name", "n"]);
        r.push(&1, vec!["alpha".into(), "1".into()], Status::Ok)
            .unwrap();
        r.push(&2, vec!["b".into(), "10".into()], Status::Vacuous)
            .unwrap();
        let text = r.render(Format::Table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "name   n");
        assert_eq!(lines[1], "-----  --");
        assert_eq!(lines[3], "b      10");
        assert_eq!(r.status, Status::Vacuous);
        assert_eq!(r.render(Format::Json), "1\n2\n");
    }
}
