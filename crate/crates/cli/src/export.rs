//! CSV / JSON rendering of result tables and gnuplot scripts.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    /// Unit annotation for the CSV header, e.g. `omega_q` or `1/omega_q`.
    pub unit: Option<&'static str>,
}

pub const fn col(name: &'static str, unit: Option<&'static str>) -> Column {
    Column { name, unit }
}

/// What a table holds; decides the plot layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Single,
    Survival,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: TableKind,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(kind: TableKind, columns: Vec<Column>) -> Self {
        Self { kind, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}

/// Run metadata echoed into JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub tolerances: Value,
}

pub fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    let header: Vec<String> = table
        .columns
        .iter()
        .map(|c| match c.unit {
            Some(u) => format!("{} [{u}]", c.name),
            None => c.name.to_string(),
        })
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(table: &Table, meta: &Meta) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (c, cell) in table.columns.iter().zip(row) {
                obj.insert(c.name.to_string(), cell.json());
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "meta": meta, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    text.push('\n');
    text
}

pub fn render(table: &Table, meta: &Meta, format: Format) -> String {
    match format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(table, meta),
    }
}

pub fn export_results(table: &Table, meta: &Meta, format: Format, path: &Path) -> Result<(), CliError> {
    fs::write(path, render(table, meta, format))?;
    Ok(())
}

/// Gnuplot script for a CSV data file. Sweeps are drawn on log-log axes.
pub fn plot_script(table: &Table, data_file: &str) -> Result<String, CliError> {
    let idx = |name: &str| table.column_index(name).map(|i| i + 1);
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    match table.kind {
        TableKind::Single => return Err(CliError::Config("a single-row result has nothing to plot".into())),
        TableKind::Survival => {
            let (t, p) = (idx("t").unwrap(), idx("probability").unwrap());
            s.push_str("set xlabel 't [1/omega_q]'\nset ylabel 'survival probability'\n");
            s.push_str(&format!("plot '{data_file}' using {t}:{p} with linespoints\n"));
        }
        TableKind::Sweep => {
            let x = idx("value").unwrap();
            let a = idx("gamma_e_over_gamma_c_wo").unwrap();
            let b = idx("gamma_c_over_gamma_e").unwrap();
            s.push_str("set logscale xy\nset format y '10^{%L}'\nset xlabel 'sweep value'\n");
            s.push_str(&format!(
                "plot '{data_file}' using {x}:{a} with linespoints title 'Gamma_e / Gamma_c^wo', \\\n     '{data_file}' using {x}:{b} with linespoints title 'Gamma_c / Gamma_e'\n"
            ));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Meta {
        Meta { version: "test", command: "rate".into(), config: json!({}), tolerances: json!({"rel_tol": 1e-8}) }
    }

    fn sweep_table() -> Table {
        Table::new(
            TableKind::Sweep,
            vec![
                col("value", None),
                col("gamma_c_over_gamma_e", None),
                col("gamma_e_over_gamma_c_wo", None),
                col("gamma_e", Some("omega_q")),
            ],
        )
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(
            render_csv(&sweep_table()),
            "value,gamma_c_over_gamma_e,gamma_e_over_gamma_c_wo,gamma_e [omega_q]\n"
        );
    }

    #[test]
    fn csv_keeps_full_precision() {
        let mut t = sweep_table();
        let x = 0.1 + 0.2;
        t.push(vec![Cell::Num(x), Cell::Num(f64::NAN), Cell::Num(1.0 / 3.0), Cell::Text("a,b".into())]);
        let text = render_csv(&t);
        let line = text.lines().nth(1).unwrap();
        let first: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, x);
        assert!(line.contains("NaN"));
        assert!(line.ends_with("\"a,b\""));
    }

    #[test]
    fn json_has_meta_and_rows() {
        let mut t = sweep_table();
        t.push(vec![Cell::Num(1.0), Cell::Num(2.5e5), Cell::Num(4.9e2), Cell::Num(f64::INFINITY)]);
        let doc: Value = serde_json::from_str(&render_json(&t, &meta())).unwrap();
        assert_eq!(doc["meta"]["tolerances"]["rel_tol"], json!(1e-8));
        assert_eq!(doc["rows"][0]["gamma_c_over_gamma_e"], json!(2.5e5));
        assert_eq!(doc["rows"][0]["gamma_e"], Value::Null);
        assert_eq!(render_json(&t, &meta()), render_json(&t, &meta()));
    }

    #[test]
    fn plot_scripts() {
        let s = plot_script(&sweep_table(), "out.csv").unwrap();
        assert!(s.contains("set logscale xy"));
        assert!(s.contains("'out.csv' using 1:3"));
        let single = Table::new(TableKind::Single, vec![col("x", None)]);
        assert!(plot_script(&single, "x.csv").is_err());
    }
}
