use crate::CliError;
use qkl::C64;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Complex(C64),
    Int(u64),
    Bool(bool),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Complex,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: Kind,
}

impl Column {
    pub fn real(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Real }
    }

    pub fn complex(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Complex }
    }

    pub fn other(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Other }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub provenance: Vec<(String, Cell)>,
    pub sections: Vec<Section>,
    pub pass: bool,
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Real(v) => json!(v),
        Cell::Complex(z) => json!({ "re": z.re, "im": z.im }),
        Cell::Int(i) => json!(i),
        Cell::Bool(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

fn cell_csv(c: &Cell, out: &mut Vec<String>) {
    match c {
        Cell::Real(v) => out.push(fmt_f64(*v)),
        Cell::Complex(z) => {
            out.push(fmt_f64(z.re));
            out.push(fmt_f64(z.im));
        }
        Cell::Int(i) => out.push(i.to_string()),
        Cell::Bool(b) => out.push(b.to_string()),
        Cell::Text(s) => out.push(s.clone()),
    }
}

fn cell_plain(c: &Cell) -> String {
    let mut v = Vec::new();
    cell_csv(c, &mut v);
    v.join(",")
}

pub fn to_json(r: &Report) -> String {
    let mut prov = Map::new();
    for (k, v) in &r.provenance {
        prov.insert(k.clone(), cell_json(v));
    }
    let sections: Vec<Value> = r
        .sections
        .iter()
        .map(|s| {
            let rows: Vec<Value> = s
                .rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (col, cell) in s.columns.iter().zip(row) {
                        m.insert(col.name.clone(), cell_json(cell));
                    }
                    Value::Object(m)
                })
                .collect();
            json!({ "name": s.name, "rows": rows })
        })
        .collect();
    let v = json!({
        "command": r.command,
        "pass": r.pass,
        "provenance": Value::Object(prov),
        "sections": sections,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

/// `#` lines carry the provenance and section names; each section has its own header row.
pub fn to_csv(r: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&format!("# command: {}\n", r.command));
    for (k, v) in &r.provenance {
        out.push_str(&format!("# {k}: {}\n", cell_plain(v)));
    }
    out.push_str(&format!("# pass: {}\n", r.pass));
    for s in &r.sections {
        out.push_str(&format!("# section: {}\n", s.name));
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut header = Vec::new();
        for col in &s.columns {
            match col.kind {
                Kind::Complex => {
                    header.push(format!("{}_re", col.name));
                    header.push(format!("{}_im", col.name));
                }
                _ => header.push(col.name.clone()),
            }
        }
        w.write_record(&header).map_err(csv_err)?;
        for row in &s.rows {
            let mut rec = Vec::new();
            for cell in row {
                cell_csv(cell, &mut rec);
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))?);
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
