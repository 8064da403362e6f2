//! Tabular output in text, CSV and JSON.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    /// Fixed-point number with an optional working-precision rendering.
    Fixed(f64, Option<String>),
    /// A small quantity such as a residual, shown in scientific notation.
    Sci(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn fixed(value: f64) -> Self {
        Cell::Fixed(value, None)
    }

    pub fn maybe(value: Option<f64>) -> Self {
        value.map_or(Cell::Empty, Cell::fixed)
    }
}

pub struct Rows {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Rows {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn fixed_text(value: f64) -> String {
    let magnitude = value.abs();
    if value != 0.0 && !(1e-4..1e9).contains(&magnitude) {
        format!("{value:.6e}")
    } else {
        format!("{value:.6}")
    }
}

fn render(cell: &Cell, full: bool) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Fixed(_, Some(text)) if full => text.clone(),
        Cell::Fixed(v, _) if full => format!("{v:e}"),
        Cell::Fixed(v, _) => fixed_text(*v),
        Cell::Sci(v) if full => format!("{v:e}"),
        Cell::Sci(v) => format!("{v:.3e}"),
        Cell::Text(t) => t.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn number(value: f64) -> Value {
    Number::from_f64(value).map_or(Value::Null, Value::Number)
}

fn json_cell(cell: &Cell, full: bool) -> Value {
    match cell {
        Cell::Int(i) => Value::from(*i),
        Cell::Fixed(_, Some(text)) if full => Value::String(text.clone()),
        Cell::Fixed(v, _) | Cell::Sci(v) if full => number(*v),
        Cell::Fixed(v, _) => number(fixed_text(*v).parse().unwrap_or(*v)),
        Cell::Sci(v) => number(format!("{v:.3e}").parse().unwrap_or(*v)),
        Cell::Text(t) => Value::String(t.clone()),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Empty => Value::Null,
    }
}

pub fn write(out: &mut impl Write, rows: &Rows, format: Format, full: bool) -> io::Result<()> {
    match format {
        Format::Text => write_text(out, rows, full),
        Format::Csv => write_csv(out, rows, full),
        Format::Json => write_json(out, rows, full),
    }
}

fn write_text(out: &mut impl Write, rows: &Rows, full: bool) -> io::Result<()> {
    let rendered: Vec<Vec<String>> = rows
        .rows
        .iter()
        .map(|row| row.iter().map(|c| render(c, full)).collect())
        .collect();
    let widths: Vec<usize> = rows
        .header
        .iter()
        .enumerate()
        .map(|(i, h)| {
            rendered
                .iter()
                .map(|r| r[i].len())
                .fold(h.len(), usize::max)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(rows.header.clone()))?;
    for row in &rendered {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn write_csv(out: &mut impl Write, rows: &Rows, full: bool) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&rows.header)?;
    for row in &rows.rows {
        writer.write_record(row.iter().map(|c| render(c, full)))?;
    }
    writer.flush()
}

fn write_json(out: &mut impl Write, rows: &Rows, full: bool) -> io::Result<()> {
    let array: Vec<Value> = rows
        .rows
        .iter()
        .map(|row| {
            let object: Map<String, Value> = rows
                .header
                .iter()
                .zip(row)
                .map(|(key, cell)| (key.to_string(), json_cell(cell, full)))
                .collect();
            Value::Object(object)
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &array)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Rows {
        let mut rows = Rows::new(vec!["k", "value", "delta", "note"]);
        rows.push(vec![
            Cell::Int(1),
            Cell::Fixed(1.5357912345, Some("1.53579123450000000001".into())),
            Cell::Sci(-2.5e-7),
            Cell::Text("a, b".into()),
        ]);
        rows.push(vec![
            Cell::Int(2),
            Cell::Empty,
            Cell::Sci(0.0),
            Cell::Bool(true),
        ]);
        rows
    }

    fn emit(format: Format, full: bool) -> String {
        let mut buffer = Vec::new();
        write(&mut buffer, &sample(), format, full).unwrap();
        String::from_utf8(buffer).unwrap()
    }

    #[test]
    fn text_uses_six_decimals() {
        let text = emit(Format::Text, false);
        assert!(text.contains("1.535791 "), "{text}");
        assert!(text.contains("-2.500e-7"));
        assert!(emit(Format::Text, true).contains("1.53579123450000000001"));
    }

    #[test]
    fn csv_quotes_commas() {
        let csv = emit(Format::Csv, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,value,delta,note");
        assert_eq!(lines[1], "1,1.535791,-2.500e-7,\"a, b\"");
        assert_eq!(lines[2], "2,,0.000e0,true");
    }

    #[test]
    fn json_rounds_values() {
        let value: Value = serde_json::from_str(&emit(Format::Json, false)).unwrap();
        assert_eq!(value[0]["value"], serde_json::json!(1.535791));
        assert_eq!(value[0]["delta"], serde_json::json!(-2.5e-7));
        assert_eq!(value[1]["value"], Value::Null);
        let full: Value = serde_json::from_str(&emit(Format::Json, true)).unwrap();
        assert_eq!(
            full[0]["value"],
            serde_json::json!("1.53579123450000000001")
        );
    }

    #[test]
    fn large_values_switch_to_exponent() {
        assert_eq!(fixed_text(1.237e24), "1.237000e24");
        assert_eq!(fixed_text(0.0), "0.000000");
    }
}
