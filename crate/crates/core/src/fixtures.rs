//! Standard topologies, named points and random points.

use rand::Rng;

use crate::marked_graph::{reverse_path, DirEdge, Edge, LengthPolicy, MarkedGraph, MarkedParts, MetricGraph};
use crate::completion::CompletionPoint;
use crate::rational::{q, qi, Q};
use crate::words::EndoMap;

/// A graph shape: vertex count and edge endpoints.
#[derive(Clone, Debug)]
pub struct Topology {
    pub name: &'static str,
    pub rank: usize,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn graph(&self, lengths: &[Q]) -> MetricGraph {
        assert_eq!(lengths.len(), self.edges.len());
        MetricGraph {
            vertices: (0..self.vertices).map(|i| format!("v{i}")).collect(),
            edges: self
                .edges
                .iter()
                .zip(lengths)
                .enumerate()
                .map(|(i, (&(from, to), l))| Edge { id: format!("e{}", i + 1), from, to, length: l.clone() })
                .collect(),
        }
    }
}

pub fn rank2_topologies() -> Vec<Topology> {
    vec![
        Topology { name: "rose", rank: 2, vertices: 1, edges: vec![(0, 0), (0, 0)] },
        Topology { name: "theta", rank: 2, vertices: 2, edges: vec![(0, 1), (0, 1), (0, 1)] },
        Topology { name: "barbell", rank: 2, vertices: 2, edges: vec![(0, 0), (0, 1), (1, 1)] },
    ]
}

pub fn rank3_topologies() -> Vec<Topology> {
    vec![
        Topology { name: "rose3", rank: 3, vertices: 1, edges: vec![(0, 0), (0, 0), (0, 0)] },
        Topology { name: "rose-barbell", rank: 3, vertices: 2, edges: vec![(0, 0), (0, 0), (0, 1), (1, 1)] },
        Topology { name: "theta-loop", rank: 3, vertices: 2, edges: vec![(0, 1), (0, 1), (0, 1), (0, 0)] },
        Topology { name: "k4", rank: 3, vertices: 4, edges: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] },
        Topology {
            name: "tripod",
            rank: 3,
            vertices: 4,
            edges: vec![(0, 1), (0, 2), (0, 3), (1, 1), (2, 2), (3, 3)],
        },
    ]
}

pub fn topologies(rank: usize) -> Vec<Topology> {
    match rank {
        2 => rank2_topologies(),
        3 => rank3_topologies(),
        _ => vec![Topology {
            name: "rose",
            rank,
            vertices: 1,
            edges: vec![(0, 0); rank],
        }],
    }
}

/// Marking from a BFS tree at vertex 0: generator `k` goes once around the
/// `k`-th edge outside the tree.
pub fn standard_images(g: &MetricGraph) -> Vec<Vec<DirEdge>> {
    let (parent, in_tree) = g.bfs_tree(0, |_| true);
    (0..g.edges.len())
        .filter(|e| !in_tree[*e])
        .map(|e| {
            let d = DirEdge::forward(e);
            let mut p = g.tree_path(&parent, g.origin(d));
            p.push(d);
            p.extend(reverse_path(&g.tree_path(&parent, g.terminus(d))));
            p
        })
        .collect()
}

pub fn build(topology: &Topology, lengths: &[Q], policy: LengthPolicy) -> MarkedGraph {
    let graph = topology.graph(lengths);
    let images = standard_images(&graph);
    MarkedGraph::with_policy(MarkedParts { rank: topology.rank, graph, base: 0, images, inverse: None }, policy)
        .expect("fixture topology is valid")
}

/// Builds a marked graph from edge endpoints and signed edge-id image paths.
pub fn build_marked(
    rank: usize,
    vertices: usize,
    edges: &[(usize, usize, Q)],
    images: &[&str],
    policy: LengthPolicy,
) -> crate::error::Result<MarkedGraph> {
    let graph = MetricGraph {
        vertices: (0..vertices).map(|i| format!("v{i}")).collect(),
        edges: edges
            .iter()
            .enumerate()
            .map(|(i, (f, t, l))| Edge { id: format!("e{}", i + 1), from: *f, to: *t, length: l.clone() })
            .collect(),
    };
    let images = images.iter().map(|s| graph.parse_path(s)).collect::<crate::error::Result<Vec<_>>>()?;
    MarkedGraph::with_policy(MarkedParts { rank, graph, base: 0, images, inverse: None }, policy)
}

/// Rose with the identity marking.
pub fn rose(lengths: &[Q]) -> MarkedGraph {
    build(&topologies(lengths.len()).remove(0), lengths, LengthPolicy::Positive)
}

pub fn rose_q(lengths: &[(i64, i64)]) -> MarkedGraph {
    rose(&lengths.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>())
}

pub fn theta(lengths: [Q; 3]) -> MarkedGraph {
    build(&rank2_topologies()[1], &lengths, LengthPolicy::Positive)
}

pub fn barbell(lengths: [Q; 3]) -> MarkedGraph {
    build(&rank2_topologies()[2], &lengths, LengthPolicy::Positive)
}

/// Positive rationals with small denominators summing to one.
pub fn random_lengths<R: Rng + ?Sized>(n: usize, rng: &mut R, max_weight: i64) -> Vec<Q> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| q(x, total)).collect()
}

/// A random point: random topology of the rank, random lengths, marking
/// twisted by a random automorphism of the given length.
pub fn random_point<R: Rng + ?Sized>(rank: usize, twist: usize, rng: &mut R) -> MarkedGraph {
    let tops = topologies(rank);
    let t = &tops[rng.gen_range(0..tops.len())];
    let lengths = random_lengths(t.edges.len(), rng, 6);
    let x = build(t, &lengths, LengthPolicy::Positive);
    let phi = EndoMap::random_automorphism(rank, twist, rng);
    x.act(&phi).expect("random products are automorphisms")
}

/// A completion point on a standard topology; zero lengths allowed.
pub fn point(topology: &Topology, lengths: &[Q]) -> CompletionPoint {
    CompletionPoint::from_blow_up(build(topology, lengths, LengthPolicy::NonNegative)).expect("fixture point is valid")
}

pub fn rose_point(lengths: &[Q]) -> CompletionPoint {
    point(&topologies(lengths.len())[0], lengths)
}

pub fn theta_point(lengths: [Q; 3]) -> CompletionPoint {
    point(&rank2_topologies()[1], &lengths)
}

pub fn barbell_point(lengths: [Q; 3]) -> CompletionPoint {
    point(&rank2_topologies()[2], &lengths)
}

/// The splitting `<a> * <b>`: both bells of a barbell at length zero.
pub fn free_product_ab() -> CompletionPoint {
    barbell_point([qi(0), qi(1), qi(0)])
}

/// Named interior and completion points of ranks 2 and 3, pairwise distinct
/// within each rank.
pub fn completion_family() -> Vec<CompletionPoint> {
    named_completion_points().into_iter().map(|(_, p)| p).collect()
}

pub fn named_completion_points() -> Vec<(&'static str, CompletionPoint)> {
    let r3 = rank3_topologies();
    vec![
        ("rose", rose_point(&[q(1, 2), q(1, 2)])),
        ("theta", theta_point([q(1, 3), q(1, 3), q(1, 3)])),
        ("rose-a", rose_point(&[qi(1), qi(0)])),
        ("rose-b", rose_point(&[qi(0), qi(1)])),
        ("split-a-b", free_product_ab()),
        ("theta-collapsed", theta_point([qi(0), q(1, 4), q(3, 4)])),
        ("theta-ba", theta_point([qi(1), qi(0), qi(0)])),
        ("barbell-a", barbell_point([qi(0), q(1, 2), q(1, 2)])),
        ("barbell-b", barbell_point([q(1, 2), q(1, 2), qi(0)])),
        ("rose3", rose_point(&[q(1, 3), q(1, 3), q(1, 3)])),
        ("rose3-ab", rose_point(&[q(1, 2), q(1, 2), qi(0)])),
        ("rose3-a", rose_point(&[qi(1), qi(0), qi(0)])),
        ("tripod-abc", point(&r3[4], &[q(1, 3), q(1, 3), q(1, 3), qi(0), qi(0), qi(0)])),
        ("rose-barbell-ab", point(&r3[1], &[qi(0), qi(0), q(1, 2), q(1, 2)])),
    ]
}
