//! On-disk formats. Trees travel as JSON parent arrays, flows as two-column
//! CSV. Writers emit shortest round-trip decimal for every value and go
//! through a temp-file rename, so rewriting a file we produced is
//! byte-identical and interrupted writes never leave partial output.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowVector;
use crate::tree::RootedTree;

#[derive(Serialize, Deserialize)]
struct TreeFile {
    parent: Vec<i64>,
}

fn io_err(path: &Path, err: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: err.to_string() }
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), message: message.into() }
}

/// Writes `bytes` to `path` through a sibling temp file and rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io_err(path, "path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Reads a tree from `{"parent": [-1, ...]}` JSON.
pub fn read_tree_json(path: &Path) -> Result<RootedTree> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: TreeFile =
        serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))?;
    RootedTree::from_parents(&file.parent)
}

/// Writes a tree as compact JSON with a trailing newline.
pub fn write_tree_json(path: &Path, tree: &RootedTree) -> Result<()> {
    let file = TreeFile { parent: tree.to_parents() };
    let mut text = serde_json::to_string(&file).expect("parent arrays serialize");
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Reads a flow from `node,value` CSV. Rows must cover nodes 0..n in order
/// and hold finite values.
pub fn read_flow_csv(path: &Path) -> Result<FlowVector> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("node,value") => {}
        Some(other) => {
            return Err(parse_err(path, format!("expected header node,value, got {other:?}")))
        }
        None => return Err(parse_err(path, "file is empty")),
    }
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        let (node, value) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, format!("row {row} has no comma")))?;
        let node: usize = node
            .trim()
            .parse()
            .map_err(|_| parse_err(path, format!("row {row} has bad node index {node:?}")))?;
        if node != row {
            return Err(parse_err(path, format!("row {row} is labeled node {node}")));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_err(path, format!("row {row} has bad value {value:?}")))?;
        if !value.is_finite() {
            return Err(parse_err(path, format!("row {row} is not finite")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(parse_err(path, "no data rows"));
    }
    Ok(FlowVector::new(values))
}

/// Writes a flow as `node,value` CSV, one row per node in index order.
pub fn write_flow_csv(path: &Path, flow: &FlowVector) -> Result<()> {
    let mut text = String::from("node,value\n");
    for (node, v) in flow.values().iter().enumerate() {
        text.push_str(&format!("{node},{v}\n"));
    }
    atomic_write(path, text.as_bytes())
}
