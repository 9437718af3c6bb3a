//! Embedded subgraph shapes: circles, figure-eights, barbells.

use std::collections::BTreeSet;

use super::{reverse_path, CandidateKind, DirEdge, MetricGraph};

/// Every embedded circle once, as a closed path starting at its least vertex.
pub fn simple_cycles(g: &MetricGraph) -> Vec<Vec<DirEdge>> {
    let out = g.out_edges();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut cycles = Vec::new();
    for s in 0..g.vertices.len() {
        let mut path = Vec::new();
        let mut on_path = vec![false; g.vertices.len()];
        on_path[s] = true;
        cycle_dfs(g, &out, s, s, &mut path, &mut on_path, &mut seen, &mut cycles);
    }
    cycles
}

#[allow(clippy::too_many_arguments)]
fn cycle_dfs(
    g: &MetricGraph,
    out: &[Vec<DirEdge>],
    start: usize,
    v: usize,
    path: &mut Vec<DirEdge>,
    on_path: &mut [bool],
    seen: &mut BTreeSet<BTreeSet<usize>>,
    cycles: &mut Vec<Vec<DirEdge>>,
) {
    for &d in &out[v] {
        if path.iter().any(|p| p.edge == d.edge) {
            continue;
        }
        let t = g.terminus(d);
        if t == start {
            path.push(d);
            let key: BTreeSet<usize> = path.iter().map(|p| p.edge).collect();
            if seen.insert(key) {
                cycles.push(path.clone());
            }
            path.pop();
        } else if t > start && !on_path[t] {
            on_path[t] = true;
            path.push(d);
            cycle_dfs(g, out, start, t, path, on_path, seen, cycles);
            path.pop();
            on_path[t] = false;
        }
    }
}

pub fn cycle_vertices(g: &MetricGraph, c: &[DirEdge]) -> BTreeSet<usize> {
    c.iter().map(|d| g.origin(*d)).collect()
}

/// Rotates a closed path so it starts at `v` (which it must pass through).
pub fn rotate_to(g: &MetricGraph, c: &[DirEdge], v: usize) -> Vec<DirEdge> {
    let k = c.iter().position(|d| g.origin(*d) == v).expect("vertex on cycle");
    let mut r = c[k..].to_vec();
    r.extend_from_slice(&c[..k]);
    r
}

/// Embedded paths from `from` to `to` whose vertices avoid `blocked`, apart
/// from the endpoints themselves.
pub fn simple_paths(g: &MetricGraph, from: usize, to: usize, blocked: &[bool]) -> Vec<Vec<DirEdge>> {
    let out = g.out_edges();
    let mut res = Vec::new();
    let mut visited = vec![false; g.vertices.len()];
    visited[from] = true;
    let mut path = Vec::new();
    path_dfs(g, &out, from, to, blocked, &mut visited, &mut path, &mut res);
    res
}

#[allow(clippy::too_many_arguments)]
fn path_dfs(
    g: &MetricGraph,
    out: &[Vec<DirEdge>],
    v: usize,
    to: usize,
    blocked: &[bool],
    visited: &mut [bool],
    path: &mut Vec<DirEdge>,
    res: &mut Vec<Vec<DirEdge>>,
) {
    for &d in &out[v] {
        let t = g.terminus(d);
        if visited[t] {
            continue;
        }
        if t == to {
            path.push(d);
            res.push(path.clone());
            path.pop();
        } else if !blocked[t] {
            visited[t] = true;
            path.push(d);
            path_dfs(g, out, t, to, blocked, visited, path, res);
            path.pop();
            visited[t] = false;
        }
    }
}

/// Least rotation of a loop or its reverse; identifies an unoriented loop.
pub fn canonical_loop(p: &[DirEdge]) -> Vec<DirEdge> {
    let rotations = |q: &[DirEdge]| -> Vec<Vec<DirEdge>> {
        (0..q.len().max(1))
            .map(|k| {
                let mut r = q[k.min(q.len())..].to_vec();
                r.extend_from_slice(&q[..k.min(q.len())]);
                r
            })
            .collect()
    };
    let mut all = rotations(p);
    all.extend(rotations(&reverse_path(p)));
    all.into_iter().min().unwrap_or_default()
}

/// All candidate loops up to reversal, including both relative orientations
/// of the second circle in two-circle shapes.
pub fn candidate_loops(g: &MetricGraph) -> Vec<(CandidateKind, Vec<DirEdge>)> {
    let cycles = simple_cycles(g);
    let verts: Vec<BTreeSet<usize>> = cycles.iter().map(|c| cycle_vertices(g, c)).collect();
    let edges: Vec<BTreeSet<usize>> = cycles.iter().map(|c| c.iter().map(|d| d.edge).collect()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |kind: CandidateKind, lp: Vec<DirEdge>, out: &mut Vec<(CandidateKind, Vec<DirEdge>)>| {
        if seen.insert(canonical_loop(&lp)) {
            out.push((kind, lp));
        }
    };
    for c in &cycles {
        push(CandidateKind::EmbeddedCircle, c.clone(), &mut out);
    }
    for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            if !edges[i].is_disjoint(&edges[j]) {
                continue;
            }
            let shared: Vec<usize> = verts[i].intersection(&verts[j]).copied().collect();
            if shared.len() == 1 {
                let v = shared[0];
                let a = rotate_to(g, &cycles[i], v);
                let b = rotate_to(g, &cycles[j], v);
                for second in [b.clone(), reverse_path(&b)] {
                    let mut lp = a.clone();
                    lp.extend(second);
                    push(CandidateKind::FigureEight, lp, &mut out);
                }
            } else if shared.is_empty() {
                let mut blocked = vec![false; g.vertices.len()];
                for &v in verts[i].iter().chain(&verts[j]) {
                    blocked[v] = true;
                }
                for &u in &verts[i] {
                    for &w in &verts[j] {
                        for bar in simple_paths(g, u, w, &blocked) {
                            let a = rotate_to(g, &cycles[i], u);
                            let b = rotate_to(g, &cycles[j], w);
                            for second in [b.clone(), reverse_path(&b)] {
                                let mut lp = a.clone();
                                lp.extend_from_slice(&bar);
                                lp.extend(second);
                                lp.extend(reverse_path(&bar));
                                push(CandidateKind::Barbell, lp, &mut out);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
