//! JSON parsing/serialization of book and graph specifications and the
//! machine-readable output formats (field dumps, sweep tables).
//!
//! Floats are written with Rust's shortest round-trip formatting, so repeated
//! runs with identical inputs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{DofMap, MeshPlan};
use crate::topology::{Book, GraphSpec};

/// Serde adapter for lengths: a positive number or the string "inf".
pub mod extent_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::topology::Extent;

    pub fn serialize<S: Serializer>(value: &Extent, serializer: S) -> Result<S::Ok, S::Error> {
        match value {
            Extent::Finite(v) => serializer.serialize_f64(*v),
            Extent::Infinite => serializer.serialize_str("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Extent, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) if v.is_finite() => Ok(Extent::Finite(v)),
            Raw::Number(v) if v.is_infinite() && v > 0.0 => Ok(Extent::Infinite),
            Raw::Number(v) => Err(D::Error::custom(format!("invalid length {v}"))),
            Raw::Text(s) if s == "inf" => Ok(Extent::Infinite),
            Raw::Text(s) => Err(D::Error::custom(format!("invalid length '{s}' (expected a number or \"inf\")"))),
        }
    }
}

/// A parsed input: either an open book or a metric graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Book(Book),
    Graph(GraphSpec),
}

/// Parses a JSON document holding either a book
/// (`{"pages": .., "bindings": .., "attachments": ..}`) or a graph
/// (`{"vertices": .., "edges": ..}`), and validates the result.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    if object.contains_key("pages") {
        let book: Book = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("book schema: {e}")))?;
        book.validate().into_result()?;
        Ok(Structure::Book(book))
    } else if object.contains_key("edges") || object.contains_key("vertices") {
        let graph: GraphSpec = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("graph schema: {e}")))?;
        graph.validate()?;
        Ok(Structure::Graph(graph))
    } else {
        Err(Error::Parse(
            "expected a book (\"pages\") or a graph (\"vertices\"/\"edges\") object".into(),
        ))
    }
}

pub fn read_structure(path: &Path) -> Result<Structure> {
    let text = std::fs::read_to_string(path)?;
    parse_structure(&text)
}

pub fn book_to_json(book: &Book) -> Result<String> {
    Ok(serde_json::to_string_pretty(book)?)
}

pub fn graph_to_json(graph: &GraphSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(graph)?)
}

/// Renders one page of a field as CSV: a header describing the grid, then the
/// node values in row-major order (one line per x index).
pub fn field_page_csv(book: &Book, plan: &MeshPlan, dofs: &DofMap, page: usize, u: &[f64]) -> String {
    let grid = &plan.pages[page];
    let mut out = String::new();
    out.push_str("page_id,nx,ny,hx,hy\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{}",
        book.pages[page].id, grid.nx, grid.ny, grid.hx, grid.hy
    );
    for ix in 0..grid.nx {
        let mut line = String::new();
        for iy in 0..grid.ny {
            if iy > 0 {
                line.push(',');
            }
            let _ = write!(line, "{}", u[dofs.page_dof(page, grid, ix, iy)]);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Writes one CSV per page next to `stem`, named `<stem>.<page_id>.csv`.
pub fn dump_field(
    book: &Book,
    plan: &MeshPlan,
    dofs: &DofMap,
    u: &[f64],
    stem: &Path,
) -> Result<Vec<std::path::PathBuf>> {
    let mut written = Vec::new();
    for page in 0..book.pages.len() {
        let csv = field_page_csv(book, plan, dofs, page, u);
        let name = format!(
            "{}.{}.csv",
            stem.file_name().and_then(|s| s.to_str()).unwrap_or("field"),
            book.pages[page].id
        );
        let path = stem.with_file_name(name);
        std::fs::write(&path, csv)?;
        written.push(path);
    }
    Ok(written)
}

/// Sweep table with the fixed column set used by the CLI and experiments.
pub fn sweep_csv(records: &[crate::experiments::SweepRecord]) -> String {
    let mut out = String::from("L,level,transverse_fraction,iterations,residual,converged\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.width, r.level, r.transverse_fraction, r.iterations, r.residual, r.converged
        );
    }
    out
}
