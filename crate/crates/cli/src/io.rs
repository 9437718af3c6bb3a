use std::collections::BTreeSet;
use std::path::Path;

use osx_core::completion::CompletionPoint;
use osx_core::error::{Error, Result};
use osx_core::marked_graph::GraphJson;
use osx_core::marked_graph::{LengthPolicy, MarkedGraph};
use osx_core::metric::StretchFactor;
use serde_json::Value;

use crate::Global;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn check_rank(g: &Global, rank: usize) -> Result<()> {
    match g.rank {
        Some(r) if r as usize != rank => Err(Error::RankMismatch { expected: r as usize, found: rank }),
        _ => Ok(()),
    }
}

pub fn graph_from_json(g: &Global, j: &GraphJson, policy: LengthPolicy) -> Result<MarkedGraph> {
    let x = j.to_marked(policy)?;
    check_rank(g, x.rank())?;
    Ok(x)
}

/// A point of Outer Space: every edge length positive.
pub fn load_graph(g: &Global, path: &Path) -> Result<MarkedGraph> {
    graph_from_json(g, &GraphJson::parse(&read_text(path)?)?, LengthPolicy::Positive)
}

/// A graph whose edges may have length zero, without the minimality check.
pub fn load_blow_up(g: &Global, path: &Path) -> Result<MarkedGraph> {
    graph_from_json(g, &GraphJson::parse(&read_text(path)?)?, LengthPolicy::NonNegative)
}

pub fn load_point(g: &Global, path: &Path) -> Result<CompletionPoint> {
    CompletionPoint::from_blow_up(load_blow_up(g, path)?)
}

/// Points listed in a JSON array, as paths relative to the list or inline graphs.
pub fn load_list(g: &Global, path: &Path) -> Result<Vec<CompletionPoint>> {
    let items: Vec<Value> = serde_json::from_str(&read_text(path)?)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    items
        .into_iter()
        .map(|item| match item {
            Value::String(p) => load_point(g, &dir.join(p)),
            other => {
                let j: GraphJson = serde_json::from_value(other)?;
                CompletionPoint::from_blow_up(graph_from_json(g, &j, LengthPolicy::NonNegative)?)
            }
        })
        .collect()
}

pub fn edge_set(x: &MarkedGraph, list: &str) -> Result<BTreeSet<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|id| x.graph().edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string())))
        .collect()
}

pub fn graph_value(x: &MarkedGraph) -> Value {
    serde_json::to_value(GraphJson::from_marked(x)).expect("plain data serializes")
}

pub fn graph_text(x: &MarkedGraph) -> String {
    GraphJson::from_marked(x).to_json_string()
}

pub fn factor_value(f: &StretchFactor) -> Value {
    Value::String(f.to_string())
}

/// Finite logs as numbers, infinite ones as null.
pub fn log_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
