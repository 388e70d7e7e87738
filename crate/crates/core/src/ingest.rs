//! CSV ingestion and export.
//!
//! Vertex files carry a header `offset,<properties...>` with dense offsets
//! `0..n` in any order. Edge files carry `src_offset,dst_offset`, optional
//! `src_label`/`dst_label` columns (required when the label set has several
//! members) and the edge properties. An empty field is NULL.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::catalog::{Catalog, DataType, EdgeLabelDef, PropertyDef, VertexLabelDef, VertexLabelId};
use crate::data::{EdgeTable, GraphData, VertexTable};
use crate::ids::VertexId;
use crate::storage::StorageError;
use crate::value::{format_date, parse_date, Value};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{source_name}: {message}")]
    Csv { source_name: String, message: String },
    #[error("{source_name}: schema mismatch: {message}")]
    SchemaMismatch { source_name: String, message: String },
    #[error("{source_name}:{line}: column {column}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        column: String,
        message: String,
    },
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Parses one CSV field as `datatype`; the empty string is NULL.
pub fn parse_field(datatype: DataType, field: &str) -> Result<Value, String> {
    if field.is_empty() {
        return Ok(Value::Null);
    }
    match datatype {
        DataType::Int64 => field.trim().parse().map(Value::Int64).map_err(|e| e.to_string()),
        DataType::Double => field.trim().parse().map(Value::Double).map_err(|e| e.to_string()),
        DataType::Boolean => match field.trim().to_ascii_lowercase().as_str() {
            "true" | "1" => Ok(Value::Bool(true)),
            "false" | "0" => Ok(Value::Bool(false)),
            other => Err(format!("invalid boolean {other:?}")),
        },
        DataType::Date => parse_date(field)
            .map(Value::Date)
            .ok_or_else(|| format!("invalid date {field:?}")),
        DataType::String | DataType::Categorical => Ok(Value::String(field.to_owned())),
    }
}

/// Renders a value as a CSV field (inverse of [`parse_field`]).
pub fn format_field(v: &Value) -> String {
    match v {
        Value::Date(d) => format_date(*d),
        other => other.to_string(),
    }
}

fn csv_err(source_name: &str, e: csv::Error) -> IngestError {
    IngestError::Csv {
        source_name: source_name.to_owned(),
        message: e.to_string(),
    }
}

fn mismatch(source_name: &str, message: impl Into<String>) -> IngestError {
    IngestError::SchemaMismatch {
        source_name: source_name.to_owned(),
        message: message.into(),
    }
}

/// Maps each property to its header column; every property must appear once
/// and no unknown column may appear.
fn property_columns(
    source_name: &str,
    header: &csv::StringRecord,
    fixed: &[&str],
    optional: &[&str],
    props: &[PropertyDef],
) -> Result<(HashMap<String, usize>, Vec<usize>), IngestError> {
    let mut index = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        if index.insert(name.trim().to_owned(), i).is_some() {
            return Err(mismatch(source_name, format!("duplicate column {name:?}")));
        }
    }
    for f in fixed {
        if !index.contains_key(*f) {
            return Err(mismatch(source_name, format!("missing column {f:?}")));
        }
    }
    let mut prop_cols = Vec::with_capacity(props.len());
    for p in props {
        match index.get(&p.name) {
            Some(&i) => prop_cols.push(i),
            None => return Err(mismatch(source_name, format!("missing property column {:?}", p.name))),
        }
    }
    for name in index.keys() {
        let known = fixed.contains(&name.as_str())
            || optional.contains(&name.as_str())
            || props.iter().any(|p| &p.name == name);
        if !known {
            return Err(mismatch(source_name, format!("unknown column {name:?}")));
        }
    }
    Ok((index, prop_cols))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(input)
}

fn parse_offset(source_name: &str, line: u64, column: &str, field: &str) -> Result<u64, IngestError> {
    field
        .trim()
        .parse()
        .map_err(|e: std::num::ParseIntError| IngestError::Parse {
            source_name: source_name.to_owned(),
            line,
            column: column.to_owned(),
            message: e.to_string(),
        })
}

fn parse_props(
    source_name: &str,
    line: u64,
    record: &csv::StringRecord,
    props: &[PropertyDef],
    prop_cols: &[usize],
) -> Result<Vec<Value>, IngestError> {
    props
        .iter()
        .zip(prop_cols)
        .map(|(p, &i)| {
            parse_field(p.datatype, record.get(i).unwrap_or("")).map_err(|message| IngestError::Parse {
                source_name: source_name.to_owned(),
                line,
                column: p.name.clone(),
                message,
            })
        })
        .collect()
}

/// Reads a vertex file for `def`.
pub fn read_vertex_csv<R: Read>(def: &VertexLabelDef, input: R, source_name: &str) -> Result<VertexTable, IngestError> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| csv_err(source_name, e))?.clone();
    let (index, prop_cols) = property_columns(source_name, &header, &["offset"], &[], &def.properties)?;
    let offset_col = index["offset"];
    let mut read = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut line = 1u64;
    while rdr.read_record(&mut record).map_err(|e| csv_err(source_name, e))? {
        line += 1;
        let offset = parse_offset(source_name, line, "offset", record.get(offset_col).unwrap_or(""))?;
        read.push((
            offset,
            parse_props(source_name, line, &record, &def.properties, &prop_cols)?,
        ));
    }
    let count = read.len() as u64;
    let mut rows: Vec<Option<Vec<Value>>> = vec![None; read.len()];
    for (offset, values) in read {
        if offset >= count {
            // n rows with an offset >= n leave some offset below n unused
            continue;
        }
        if rows[offset as usize].replace(values).is_some() {
            return Err(StorageError::DuplicateVertexOffset {
                label: def.name.clone(),
                offset,
            }
            .into());
        }
    }
    let mut columns = vec![Vec::with_capacity(rows.len()); def.properties.len()];
    for (offset, row) in rows.into_iter().enumerate() {
        let row = row.ok_or_else(|| StorageError::MissingVertexOffset {
            label: def.name.clone(),
            offset: offset as u64,
        })?;
        for (c, v) in columns.iter_mut().zip(row) {
            c.push(v);
        }
    }
    Ok(VertexTable { count, columns })
}

fn resolve_label(
    catalog: &Catalog,
    source_name: &str,
    line: u64,
    column: &str,
    field: Option<&str>,
    allowed: &[VertexLabelId],
) -> Result<VertexLabelId, IngestError> {
    match field {
        Some(name) if !name.is_empty() => {
            let def = catalog
                .vertex_label_by_name(name.trim())
                .ok_or_else(|| IngestError::Parse {
                    source_name: source_name.to_owned(),
                    line,
                    column: column.to_owned(),
                    message: format!("unknown vertex label {name:?}"),
                })?;
            Ok(def.id)
        }
        _ if allowed.len() == 1 => Ok(allowed[0]),
        _ => Err(IngestError::Parse {
            source_name: source_name.to_owned(),
            line,
            column: column.to_owned(),
            message: "label required for an edge with several endpoint labels".into(),
        }),
    }
}

/// Reads an edge file for `def`. Endpoint existence and cardinality are
/// checked when storage is built.
pub fn read_edge_csv<R: Read>(
    catalog: &Catalog,
    def: &EdgeLabelDef,
    input: R,
    source_name: &str,
) -> Result<EdgeTable, IngestError> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| csv_err(source_name, e))?.clone();
    let (index, prop_cols) = property_columns(
        source_name,
        &header,
        &["src_offset", "dst_offset"],
        &["src_label", "dst_label"],
        &def.properties,
    )?;
    if def.src_labels.len() > 1 && !index.contains_key("src_label") {
        return Err(mismatch(source_name, "src_label column required"));
    }
    if def.dst_labels.len() > 1 && !index.contains_key("dst_label") {
        return Err(mismatch(source_name, "dst_label column required"));
    }
    let (src_col, dst_col) = (index["src_offset"], index["dst_offset"]);
    let src_label_col = index.get("src_label").copied();
    let dst_label_col = index.get("dst_label").copied();
    let mut table = EdgeTable {
        columns: vec![Vec::new(); def.properties.len()],
        ..EdgeTable::default()
    };
    let mut record = csv::StringRecord::new();
    let mut line = 1u64;
    while rdr.read_record(&mut record).map_err(|e| csv_err(source_name, e))? {
        line += 1;
        let src_label = resolve_label(
            catalog,
            source_name,
            line,
            "src_label",
            src_label_col.and_then(|i| record.get(i)),
            &def.src_labels,
        )?;
        let dst_label = resolve_label(
            catalog,
            source_name,
            line,
            "dst_label",
            dst_label_col.and_then(|i| record.get(i)),
            &def.dst_labels,
        )?;
        let src = parse_offset(source_name, line, "src_offset", record.get(src_col).unwrap_or(""))?;
        let dst = parse_offset(source_name, line, "dst_offset", record.get(dst_col).unwrap_or(""))?;
        let values = parse_props(source_name, line, &record, &def.properties, &prop_cols)?;
        table.push(VertexId::new(src_label, src), VertexId::new(dst_label, dst), values);
    }
    Ok(table)
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads labelled vertex and edge files; labels without a file are empty.
pub fn load_graph(
    catalog: &Catalog,
    vertex_files: &[(String, &Path)],
    edge_files: &[(String, &Path)],
) -> Result<GraphData, IngestError> {
    let mut data = GraphData::empty(catalog);
    for (label, path) in vertex_files {
        let def = catalog
            .vertex_label_by_name(label)
            .ok_or_else(|| IngestError::UnknownLabel(label.clone()))?;
        let name = path.display().to_string();
        data.vertices[def.id.index()] = read_vertex_csv(def, open(path)?, &name)?;
    }
    for (label, path) in edge_files {
        let def = catalog
            .edge_label_by_name(label)
            .ok_or_else(|| IngestError::UnknownLabel(label.clone()))?;
        let name = path.display().to_string();
        data.edges[def.id.index()] = read_edge_csv(catalog, def, open(path)?, &name)?;
    }
    Ok(data)
}

pub fn write_vertex_csv<W: Write>(def: &VertexLabelDef, table: &VertexTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["offset".to_owned()];
    header.extend(def.properties.iter().map(|p| p.name.clone()));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for offset in 0..table.count as usize {
        row.clear();
        row.push(offset.to_string());
        row.extend(table.columns.iter().map(|c| format_field(&c[offset])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edge_csv<W: Write>(catalog: &Catalog, def: &EdgeLabelDef, table: &EdgeTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let with_src = def.src_labels.len() > 1;
    let with_dst = def.dst_labels.len() > 1;
    let mut header = vec!["src_offset".to_owned(), "dst_offset".to_owned()];
    if with_src {
        header.push("src_label".into());
    }
    if with_dst {
        header.push("dst_label".into());
    }
    header.extend(def.properties.iter().map(|p| p.name.clone()));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for i in 0..table.len() {
        row.clear();
        row.push(table.src[i].offset.to_string());
        row.push(table.dst[i].offset.to_string());
        if with_src {
            row.push(catalog.vertex_label(table.src[i].label).name.clone());
        }
        if with_dst {
            row.push(catalog.vertex_label(table.dst[i].label).name.clone());
        }
        row.extend(table.columns.iter().map(|c| format_field(&c[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
