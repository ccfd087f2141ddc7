//! Topology export: built-in shapes or a re-imported edge-list file,
//! rendered as Graphviz DOT or as the plain edge-list format.
//!
//! The edge list is the interchange format: everything this module emits
//! as `edges` re-imports to an equal labeled graph.

use crate::error::{config, Result};
use qlansim_core::{Graph, VertexId, VertexLabel};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Edges,
}

impl ExportFormat {
    pub fn parse(name: &str) -> Result<ExportFormat> {
        match name {
            "dot" => Ok(ExportFormat::Dot),
            "edges" | "edge-list" => Ok(ExportFormat::Edges),
            other => Err(config(format!(
                "key `format`: unknown format {other:?}; expected \"dot\" or \"edges\""
            ))),
        }
    }
}

/// The client bus: clients c1..cN in a line, vertex ids 1..=N. This is
/// the labeled shape a star-shaped resource collapses to.
pub fn client_bus(clients: usize) -> Result<Graph> {
    if clients == 0 {
        return Err(config("a bus needs at least one client"));
    }
    let mut g = Graph::new();
    for i in 1..=clients as u32 {
        g.add_vertex_with_id(VertexId(i), Some(VertexLabel::Client(format!("c{i}"))))
            .expect("fresh ids are distinct");
    }
    for i in 1..clients as u32 {
        g.add_edge(VertexId(i), VertexId(i + 1)).expect("vertices exist");
    }
    Ok(g)
}

/// Builds one of the named built-in topologies:
/// `star:<clients>`, `bus:<clients>`, `path:<n>`, `cycle:<n>`, `empty`.
pub fn builtin_topology(name: &str) -> Result<Graph> {
    if name == "empty" {
        return Ok(Graph::new());
    }
    let (shape, count) = match name.split_once(':') {
        Some((s, c)) => {
            let n: usize = c.parse().map_err(|_| {
                config(format!("key `builtin`: {c:?} is not a vertex count"))
            })?;
            (s, n)
        }
        None => {
            return Err(config(format!(
                "key `builtin`: unknown topology {name:?}; expected \
                 star:<clients>, bus:<clients>, path:<n>, cycle:<n>, or empty"
            )))
        }
    };
    let built = match shape {
        "star" => Graph::star(count),
        "bus" => return client_bus(count),
        "path" => Graph::path(count),
        "cycle" => Graph::cycle(count),
        other => {
            return Err(config(format!(
                "key `builtin`: unknown topology shape {other:?}"
            )))
        }
    };
    built.map_err(|e| config(format!("key `builtin`: {e}")))
}

/// Reads a topology back from an edge-list file.
pub fn load_topology(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config(format!("cannot read topology file {}: {e}", path.display())))?;
    Graph::from_edge_list(&text)
        .map_err(|e| config(format!("topology file {}: {e}", path.display())))
}

pub fn render(g: &Graph, format: ExportFormat, name: &str) -> String {
    match format {
        ExportFormat::Dot => g.to_dot(name),
        ExportFormat::Edges => g.to_edge_list(),
    }
}
