//! Text encodings of a [`DesignArray`].
//!
//! JSON layout:
//!
//! ```text
//! {"n":8,"k":1,"side":7,"host":{"type":"complete","n":8},
//!  "cells":[{"row":0,"col":0,"edges":[[0,7]]}, ...]}
//! ```
//!
//! Edges are written `[min, max]` and cells are sorted by `(row, col)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::design::{Block, DesignArray, Edge, HostGraph};
use crate::error::Error;

/// Largest side accepted by [`to_latex`].
pub const LATEX_MAX_SIDE: usize = 15;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellJson {
    row: usize,
    col: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct DesignJson {
    n: usize,
    k: usize,
    side: usize,
    host: HostGraph,
    cells: Vec<CellJson>,
}

impl From<&DesignArray> for DesignJson {
    fn from(a: &DesignArray) -> Self {
        DesignJson {
            n: a.n(),
            k: a.k(),
            side: a.side(),
            host: a.host().clone(),
            cells: a
                .occupied()
                .map(|(row, col, b)| CellJson { row, col, edges: b.edges().to_vec() })
                .collect(),
        }
    }
}

impl TryFrom<DesignJson> for DesignArray {
    type Error = Error;

    fn try_from(j: DesignJson) -> Result<Self, Error> {
        let mut a = DesignArray::new(j.side, j.n, j.k, j.host);
        for c in j.cells {
            a.put_unchecked(c.row, c.col, Block::from_edges_unchecked(c.edges))?;
        }
        Ok(a)
    }
}

impl Serialize for DesignArray {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DesignJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DesignArray {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = DesignJson::deserialize(d)?;
        DesignArray::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub fn to_json(a: &DesignArray) -> String {
    serde_json::to_string(a).expect("design serialization is infallible")
}

pub fn from_json(s: &str) -> serde_json::Result<DesignArray> {
    serde_json::from_str(s)
}

/// One line per row; cells separated by `|`, `.` for empty, `u-v,u-v` for a block.
pub fn to_grid(a: &DesignArray) -> String {
    let mut out = String::new();
    for r in 0..a.side() {
        let row: Vec<String> = (0..a.side())
            .map(|c| a.get(r, c).map_or_else(|| ".".to_string(), Block::to_string))
            .collect();
        out.push_str(&row.join("|"));
        out.push('\n');
    }
    out
}

/// A LaTeX `array` environment with each block written as its edge list.
pub fn to_latex(a: &DesignArray) -> Result<String, String> {
    if a.side() > LATEX_MAX_SIDE {
        return Err(format!(
            "LaTeX export is limited to side <= {LATEX_MAX_SIDE}; this design has side {}",
            a.side()
        ));
    }
    let mut out = String::new();
    let columns = "|c".repeat(a.side()) + "|";
    let _ = writeln!(out, "\\[\n\\begin{{array}}{{{columns}}} \\hline");
    for r in 0..a.side() {
        let row: Vec<String> = (0..a.side())
            .map(|c| match a.get(r, c) {
                None => String::new(),
                Some(b) => b
                    .edges()
                    .iter()
                    .map(|e| format!("{}\\,{}", e.u(), e.v()))
                    .collect::<Vec<_>>()
                    .join(";\\ "),
            })
            .collect();
        let _ = writeln!(out, "{} \\\\ \\hline", row.join(" & "));
    }
    out.push_str("\\end{array}\n\\]\n");
    Ok(out)
}
