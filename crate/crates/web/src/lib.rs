//! Browser bindings. Every export takes plain strings or numbers and
//! returns a JSON string; errors come back as a message.

use std::collections::BTreeSet;

use osx_core::completion::{distance_ext, pinch_sequence, CompletionPoint};
use osx_core::error::{Error, Result};
use osx_core::fixtures::{rank2_topologies, rose_q, standard_images};
use osx_core::fs_complex::{axes_vector, strictness_family, Strictness};
use osx_core::marked_graph::{GraphJson, LengthPolicy, MarkedGraph, MarkedParts};
use osx_core::metric::{distance, DistanceResult};
use osx_core::rational::{format_q, parse_q_list, pow2_inv, Q};
use osx_core::words::EndoMap;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn result_value(d: &DistanceResult) -> Value {
    let log = serde_json::Number::from_f64(d.factor.log()).map_or(Value::Null, Value::Number);
    json!({
        "factor": d.factor.to_string(),
        "log": log,
        "witness": d.witness.as_ref().map(|w| w.word.to_string()),
        "kind": d.witness.as_ref().map(|w| w.kind.to_string()),
    })
}

/// A rank-2 point on a named topology. Lengths are rescaled to volume one
/// and may be zero; `twist` lists the images of `a,b`, or is empty.
pub fn rank2_point(topology: &str, lengths: &str, twist: &str) -> Result<CompletionPoint> {
    let top = rank2_topologies()
        .into_iter()
        .find(|t| t.name == topology)
        .ok_or_else(|| Error::Parse(format!("unknown topology {topology:?}")))?;
    let lengths = parse_q_list(lengths)?;
    if lengths.len() != top.edges.len() {
        return Err(Error::Parse(format!("{} needs {} lengths", top.name, top.edges.len())));
    }
    let total: Q = lengths.iter().sum();
    if lengths.iter().any(|l| l < &Q::default()) || total == Q::default() {
        return Err(Error::Precondition("lengths must be nonnegative with positive sum".into()));
    }
    let graph = top.graph(&lengths.iter().map(|l| l / &total).collect::<Vec<_>>());
    let images = standard_images(&graph);
    let mut x = MarkedGraph::with_policy(MarkedParts { rank: 2, graph, base: 0, images, inverse: None }, LengthPolicy::NonNegative)?;
    if !twist.trim().is_empty() {
        x = x.act(&EndoMap::parse(twist, 2)?)?;
    }
    CompletionPoint::from_blow_up(x)
}

/// Distances in both directions between two rank-2 points.
pub fn explore(x: &CompletionPoint, y: &CompletionPoint) -> Result<Value> {
    let (fwd, back) = match (x.to_interior(), y.to_interior()) {
        (Some(a), Some(b)) => (distance(&a, &b)?, distance(&b, &a)?),
        _ => (distance_ext(x, y)?, distance_ext(y, x)?),
    };
    Ok(json!({
        "x": GraphJson::from_marked(x.graph()),
        "y": GraphJson::from_marked(y.graph()),
        "forward": result_value(&fwd),
        "backward": result_value(&back),
    }))
}

/// The rose (1/2, 1/2) with its `b` petal pinched to `2^-i`, for `i = 1..=steps`:
/// distances to the next point in both directions, and to the limit.
pub fn pinch_profile(steps: u32) -> Result<Value> {
    if !(2..=24).contains(&steps) {
        return Err(Error::Precondition("steps must lie in 2..=24".into()));
    }
    let x = rose_q(&[(1, 2), (1, 2)]);
    let schedule: Vec<Q> = (1..=steps).map(pow2_inv).collect();
    let seq: Vec<CompletionPoint> =
        pinch_sequence(&x, &BTreeSet::from([1]), &schedule)?.into_iter().map(CompletionPoint::interior).collect();
    let limit = rank2_point("rose", "1,0", "")?;
    let mut rows = Vec::new();
    for (i, p) in seq.iter().enumerate() {
        let next = seq.get(i + 1);
        let f = |a: &CompletionPoint, b: &CompletionPoint| distance_ext(a, b).map(|d| d.factor);
        rows.push(json!({
            "i": i + 1,
            "eps": format_q(&schedule[i]),
            "forward_next": next.map(|n| f(p, n)).transpose()?.map(|d| d.log()),
            "backward_next": next.map(|n| f(n, p)).transpose()?.map(|d| d.log()),
            "to_limit": f(p, &limit)?.log(),
            "from_limit": f(&limit, p)?.to_string(),
        }));
    }
    Ok(Value::Array(rows))
}

/// One member of the strictness family with its axes and Lipschitz data.
pub fn strictness(i: u32, m: u32) -> Result<Value> {
    let f = strictness_family(i, m)?;
    let probes = Strictness::probes();
    let (ax, ay) = (axes_vector(&f.x, &probes), axes_vector(&f.y, &probes));
    let fmt = |v: &[Q]| v.iter().map(format_q).collect::<Vec<_>>();
    Ok(json!({
        "i": i,
        "m": m,
        "s": format_q(&f.s),
        "t": format_q(&f.t),
        "axes_x": fmt(&ax.values),
        "axes_y": fmt(&ay.values),
        "sup_difference": format_q(&ay.sup_distance(&ax)),
        "factor_y_x": result_value(&distance_ext(&f.y, &f.x)?),
        "factor_x_y": result_value(&distance_ext(&f.x, &f.y)?),
    }))
}

fn js(r: Result<Value>) -> std::result::Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn explore_rank2(
    x_topology: &str,
    x_lengths: &str,
    x_twist: &str,
    y_topology: &str,
    y_lengths: &str,
    y_twist: &str,
) -> std::result::Result<String, JsValue> {
    js((|| explore(&rank2_point(x_topology, x_lengths, x_twist)?, &rank2_point(y_topology, y_lengths, y_twist)?))())
}

#[wasm_bindgen]
pub fn pinch(steps: u32) -> std::result::Result<String, JsValue> {
    js(pinch_profile(steps))
}

#[wasm_bindgen]
pub fn strictness_member(i: u32, m: u32) -> std::result::Result<String, JsValue> {
    js(strictness(i, m))
}
