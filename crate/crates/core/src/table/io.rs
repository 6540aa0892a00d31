//! CSV tables and JSON schema sidecars.
//!
//! The first CSV line names the attributes; every other field is read as an
//! atom. A sidecar may fix the scheme name, the attribute order and the
//! domain of each attribute; attributes without a declared domain get their
//! active domain, sorted.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Attribute, Row, Scheme, Table};
use crate::error::{Error, Result};
use crate::rel::{Carrier, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemaFile {
    pub name: String,
    pub attributes: Vec<AttributeDecl>,
}

impl SchemaFile {
    pub fn from_json(text: &str) -> Result<SchemaFile> {
        Ok(serde_json::from_str(text)?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        msg: e.to_string(),
    }
}

/// Reads a table. `name` is used when no sidecar is given.
pub fn read_csv<R: Read>(reader: R, name: &str, schema: Option<&SchemaFile>) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut seen = BTreeSet::new();
    for h in &header {
        if h.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "empty attribute name".into(),
            });
        }
        if !seen.insert(h.as_str()) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("duplicate attribute `{h}`"),
            });
        }
    }

    let mut raw: Vec<Vec<String>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        raw.push(rec.iter().map(str::to_string).collect());
    }

    // Column order in the scheme: sidecar order if present, else header order.
    let (scheme_name, decls): (String, Vec<AttributeDecl>) = match schema {
        Some(s) => {
            let declared: BTreeSet<&str> = s.attributes.iter().map(|a| a.name.as_str()).collect();
            if declared != seen {
                return Err(Error::InvalidScheme(format!(
                    "CSV header {header:?} does not match the attributes declared for `{}`",
                    s.name
                )));
            }
            (s.name.clone(), s.attributes.clone())
        }
        None => (
            name.to_string(),
            header
                .iter()
                .map(|h| AttributeDecl {
                    name: h.clone(),
                    domain: None,
                })
                .collect(),
        ),
    };
    let column: Vec<usize> = decls
        .iter()
        .map(|d| header.iter().position(|h| *h == d.name).expect("matched above"))
        .collect();

    let mut attributes = Vec::with_capacity(decls.len());
    for (d, &col) in decls.iter().zip(&column) {
        let values: Vec<String> = match &d.domain {
            Some(dom) => dom.clone(),
            None => raw
                .iter()
                .map(|r| r[col].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        attributes.push(Attribute {
            name: d.name.clone(),
            domain: Carrier::atoms(d.name.clone(), &values)?,
        });
    }
    let scheme = Scheme::new(scheme_name, attributes)?;

    let mut rows = Vec::with_capacity(raw.len());
    for (n, r) in raw.iter().enumerate() {
        let row = Row(column.iter().map(|&c| Value::atom(r[c].clone())).collect());
        for (v, a) in row.0.iter().zip(scheme.attributes()) {
            if !a.domain.contains(v) {
                return Err(Error::Parse {
                    line: n + 2,
                    msg: format!("value `{v}` outside the declared domain of `{}`", a.name),
                });
            }
        }
        rows.push(row);
    }
    let total = rows.len();
    let table = Table::new(scheme, rows)?;
    if table.len() < total {
        log::warn!(
            "{}: dropped {} duplicate row(s)",
            table.name(),
            total - table.len()
        );
    }
    Ok(table)
}

/// Loads `path`, with an optional JSON sidecar. Without one the table is
/// named after the file stem.
pub fn load_table(path: &Path, schema: Option<&Path>) -> Result<Table> {
    let schema = match schema {
        Some(p) => Some(SchemaFile::from_json(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("table")
        .to_string();
    read_csv(File::open(path)?, &stem, schema.as_ref())
}

pub fn write_csv<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(table.scheme().attribute_names()).map_err(err)?;
    for row in table.rows() {
        w.write_record(row.values().iter().map(|v| v.to_string()))
            .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
