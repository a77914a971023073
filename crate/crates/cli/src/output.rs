use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{json, Map, Value};

/// Bumped whenever a JSON field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

pub struct Table {
    pub title: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&'static str]) -> Table {
        Table {
            title: title.into(),
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// What a subcommand produces. The first table is the primary one and is the
/// only table emitted in CSV mode.
pub struct Report {
    pub command: &'static str,
    pub json: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn render(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => {
                let mut object = Map::new();
                object.insert("version".into(), json!(SCHEMA_VERSION));
                object.insert("command".into(), json!(self.command));
                object.insert("result".into(), self.json.clone());
                serde_json::to_writer_pretty(&mut *out, &Value::Object(object))?;
                writeln!(out)
            }
            Format::Table => {
                for (i, table) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    write_aligned(table, out)?;
                }
                Ok(())
            }
            Format::Csv => {
                let Some(table) = self.tables.first() else {
                    return Ok(());
                };
                let mut writer = csv::Writer::from_writer(out);
                writer.write_record(&table.headers)?;
                for row in &table.rows {
                    writer.write_record(row)?;
                }
                writer.flush()
            }
        }
    }
}

fn write_aligned(table: &Table, out: &mut dyn Write) -> io::Result<()> {
    if !table.title.is_empty() {
        writeln!(out, "{}", table.title)?;
    }
    let mut widths: Vec<usize> = table.headers.iter().map(|h| h.chars().count()).collect();
    for row in &table.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let padded: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(&mut table.headers.iter().copied()))?;
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    writeln!(out, "{}", rule.join("  "))?;
    for row in &table.rows {
        writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
    }
    Ok(())
}
