//! Marked metric graphs: points of Outer Space and, with zero lengths
//! allowed, the blow-up graphs that carry completion points.

mod json;
pub mod shapes;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::{format_q, Q};
use crate::words::{CyclicWord, EndoMap, Letter, Word};

pub use json::GraphJson;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: Q,
}

/// One traversal of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl DirEdge {
    pub fn forward(edge: usize) -> Self {
        DirEdge { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        DirEdge { edge, reversed: true }
    }

    pub fn reverse(self) -> Self {
        DirEdge { edge: self.edge, reversed: !self.reversed }
    }
}

pub fn reverse_path(p: &[DirEdge]) -> Vec<DirEdge> {
    p.iter().rev().map(|d| d.reverse()).collect()
}

/// Free reduction of an edge path: cancels `e ē` pairs.
pub fn tighten_path(p: &[DirEdge]) -> Vec<DirEdge> {
    let mut out: Vec<DirEdge> = Vec::with_capacity(p.len());
    for &d in p {
        if out.last() == Some(&d.reverse()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    out
}

/// Tightening of a closed path as a free loop.
pub fn tighten_loop(p: &[DirEdge]) -> Vec<DirEdge> {
    let r = tighten_path(p);
    let (mut lo, mut hi) = (0, r.len());
    while hi - lo >= 2 && r[lo] == r[hi - 1].reverse() {
        lo += 1;
        hi -= 1;
    }
    r[lo..hi].to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl MetricGraph {
    pub fn origin(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.reversed {
            e.to
        } else {
            e.from
        }
    }

    pub fn terminus(&self, d: DirEdge) -> usize {
        self.origin(d.reverse())
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Valence with loops counted twice.
    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.from == v) as usize + (e.to == v) as usize).sum()
    }

    pub fn volume(&self) -> Q {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    pub fn betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertices.len())
    }

    /// Directed edges leaving each vertex, in edge order.
    pub fn out_edges(&self) -> Vec<Vec<DirEdge>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(DirEdge::forward(i));
            out[e.to].push(DirEdge::backward(i));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        self.bfs_tree(0, |_| true).0.iter().all(|p| p.is_some())
    }

    /// Breadth-first tree from `root` over edges accepted by `allow`.
    /// Returns, per vertex, the directed edge used to reach it (root gets
    /// `Some(None)`, unreached vertices `None`) and the tree edge set.
    pub fn bfs_tree(&self, root: usize, allow: impl Fn(usize) -> bool) -> (Vec<Option<Option<DirEdge>>>, Vec<bool>) {
        let out = self.out_edges();
        let mut parent: Vec<Option<Option<DirEdge>>> = vec![None; self.vertices.len()];
        let mut in_tree = vec![false; self.edges.len()];
        parent[root] = Some(None);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &d in &out[v] {
                let t = self.terminus(d);
                if allow(d.edge) && parent[t].is_none() {
                    parent[t] = Some(Some(d));
                    in_tree[d.edge] = true;
                    queue.push_back(t);
                }
            }
        }
        (parent, in_tree)
    }

    /// Path from `root` to `v` along a tree produced by `bfs_tree`.
    pub fn tree_path(&self, parent: &[Option<Option<DirEdge>>], v: usize) -> Vec<DirEdge> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(Some(d)) = parent[cur] {
            path.push(d);
            cur = self.origin(d);
        }
        path.reverse();
        path
    }

    pub fn is_path(&self, p: &[DirEdge]) -> bool {
        p.iter().all(|d| d.edge < self.edges.len()) && p.windows(2).all(|w| self.terminus(w[0]) == self.origin(w[1]))
    }

    pub fn path_length(&self, p: &[DirEdge]) -> Q {
        p.iter().map(|d| self.edges[d.edge].length.clone()).sum()
    }

    /// Parses the signed edge-id syntax `"e1,-e2"`.
    pub fn parse_path(&self, s: &str) -> Result<Vec<DirEdge>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (rev, id) = match t.strip_prefix('-') {
                    Some(rest) => (true, rest.trim()),
                    None => (false, t),
                };
                let edge = self.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string()))?;
                Ok(DirEdge { edge, reversed: rev })
            })
            .collect()
    }

    pub fn format_path(&self, p: &[DirEdge]) -> String {
        p.iter()
            .map(|d| format!("{}{}", if d.reversed { "-" } else { "" }, self.edges[d.edge].id))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Which edge lengths a marked graph may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthPolicy {
    /// Points of Outer Space.
    Positive,
    /// Blow-up graphs of completion points.
    NonNegative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownBaseVertex,
    Disconnected,
    NonPositiveLength { edge: String, length: String },
    NegativeLength { edge: String, length: String },
    UnitVolume { volume: String },
    Valence { vertex: String, valence: usize },
    RankMismatch { rank: usize, betti: usize },
    ImageNotAPath { generator: char },
    ImageNotClosed { generator: char },
    InverseNotSpanningTree,
    InverseNotBasis,
    MarkingNotHomotopyEquivalence,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownBaseVertex => write!(f, "base vertex is not a vertex"),
            Violation::Disconnected => write!(f, "graph is not connected"),
            Violation::NonPositiveLength { edge, length } => write!(f, "edge {edge} has non-positive length {length}"),
            Violation::NegativeLength { edge, length } => write!(f, "edge {edge} has negative length {length}"),
            Violation::UnitVolume { volume } => write!(f, "volume is {volume}, not 1"),
            Violation::Valence { vertex, valence } => write!(f, "vertex {vertex} has valence {valence} < 3"),
            Violation::RankMismatch { rank, betti } => write!(f, "graph has rank {betti}, marking has rank {rank}"),
            Violation::ImageNotAPath { generator } => write!(f, "image of {generator} is not an edge path"),
            Violation::ImageNotClosed { generator } => write!(f, "image of {generator} is not closed at the base vertex"),
            Violation::InverseNotSpanningTree => write!(f, "inverse marking is not keyed by the complement of a spanning tree"),
            Violation::InverseNotBasis => write!(f, "inverse marking words are not a basis"),
            Violation::MarkingNotHomotopyEquivalence => write!(f, "marking is not a homotopy equivalence"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Loop-to-word map: collapse a spanning tree, read each remaining edge as a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseMarking {
    pub in_tree: Vec<bool>,
    pub words: Vec<Word>,
}

impl InverseMarking {
    pub fn path_word(&self, p: &[DirEdge]) -> Word {
        let mut letters: Vec<Letter> = Vec::new();
        for d in p {
            if self.in_tree[d.edge] {
                continue;
            }
            let w = &self.words[d.edge];
            if d.reversed {
                letters.extend(w.letters().iter().rev().map(|l| l.inverse()));
            } else {
                letters.extend_from_slice(w.letters());
            }
        }
        Word::from_letters(letters).reduce()
    }
}

/// A marked graph. Lengths are constrained according to the policy it was
/// built with; the marking is always a validated homotopy equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    rank: usize,
    graph: MetricGraph,
    base: usize,
    images: Vec<Vec<DirEdge>>,
    inverse: InverseMarking,
}

/// Unchecked ingredients of a marked graph.
#[derive(Clone, Debug)]
pub struct MarkedParts {
    pub rank: usize,
    pub graph: MetricGraph,
    pub base: usize,
    pub images: Vec<Vec<DirEdge>>,
    /// Words for the edges outside some spanning tree, keyed by edge index.
    pub inverse: Option<BTreeMap<usize, Word>>,
}

/// Checks every condition and, if the marking is sound, returns its inverse.
pub fn validate_parts(parts: &MarkedParts, policy: LengthPolicy) -> (ValidationReport, Option<InverseMarking>) {
    let g = &parts.graph;
    let mut report = ValidationReport::default();
    let v = &mut report.violations;
    if parts.base >= g.vertices.len() {
        v.push(Violation::UnknownBaseVertex);
        return (report, None);
    }
    let connected = g.is_connected();
    if !connected {
        v.push(Violation::Disconnected);
    }
    for e in &g.edges {
        let bad = match policy {
            LengthPolicy::Positive => !e.length.is_positive(),
            LengthPolicy::NonNegative => e.length.is_negative(),
        };
        if bad {
            let (edge, length) = (e.id.clone(), format_q(&e.length));
            v.push(match policy {
                LengthPolicy::Positive => Violation::NonPositiveLength { edge, length },
                LengthPolicy::NonNegative => Violation::NegativeLength { edge, length },
            });
        }
    }
    let vol = g.volume();
    if !vol.is_one() {
        v.push(Violation::UnitVolume { volume: format_q(&vol) });
    }
    for (i, id) in g.vertices.iter().enumerate() {
        let val = g.valence(i);
        if val < 3 {
            v.push(Violation::Valence { vertex: id.clone(), valence: val });
        }
    }
    if parts.images.len() != parts.rank || g.betti() != parts.rank || !connected {
        v.push(Violation::RankMismatch { rank: parts.rank, betti: g.betti() });
        return (report, None);
    }
    let mut paths_ok = true;
    for (i, p) in parts.images.iter().enumerate() {
        let generator = Letter::new(i, false).to_char();
        if !g.is_path(p) {
            v.push(Violation::ImageNotAPath { generator });
            paths_ok = false;
        } else if p.is_empty() || g.origin(p[0]) != parts.base || g.terminus(p[p.len() - 1]) != parts.base {
            v.push(Violation::ImageNotClosed { generator });
            paths_ok = false;
        }
    }
    if !paths_ok {
        return (report, None);
    }
    let inverse = match &parts.inverse {
        Some(words) => match given_inverse(parts, words) {
            Ok(inv) => inv,
            Err(viol) => {
                v.push(viol);
                return (report, None);
            }
        },
        None => match computed_inverse(parts) {
            Some(inv) => inv,
            None => {
                v.push(Violation::MarkingNotHomotopyEquivalence);
                return (report, None);
            }
        },
    };
    let composite = EndoMap::new(parts.images.iter().map(|p| inverse.path_word(p)).collect());
    if composite.inner_conjugator().is_none() {
        v.push(Violation::MarkingNotHomotopyEquivalence);
        return (report, None);
    }
    (report, Some(inverse))
}

/// Inverse read off a BFS tree: non-tree edge `k` becomes an auxiliary
/// generator, and the marking images become an automorphism to invert.
fn computed_inverse(parts: &MarkedParts) -> Option<InverseMarking> {
    let g = &parts.graph;
    let (_, in_tree) = g.bfs_tree(parts.base, |_| true);
    let mut aux = vec![Word::empty(); g.edges.len()];
    let mut k = 0;
    for (e, t) in in_tree.iter().enumerate() {
        if !*t {
            aux[e] = Word::generator(k);
            k += 1;
        }
    }
    let collapse = InverseMarking { in_tree: in_tree.clone(), words: aux };
    let phi = EndoMap::new(parts.images.iter().map(|p| collapse.path_word(p)).collect());
    let psi = phi.invert().ok()?;
    let words = collapse.words.iter().zip(&in_tree).map(|(w, t)| if *t { Word::empty() } else { psi.apply(w) }).collect();
    Some(InverseMarking { in_tree, words })
}

fn given_inverse(parts: &MarkedParts, words: &BTreeMap<usize, Word>) -> std::result::Result<InverseMarking, Violation> {
    let g = &parts.graph;
    let in_tree: Vec<bool> = (0..g.edges.len()).map(|e| !words.contains_key(&e)).collect();
    let tree_edges = in_tree.iter().filter(|t| **t).count();
    let (parent, _) = g.bfs_tree(parts.base, |e| in_tree[e]);
    if tree_edges + 1 != g.vertices.len() || parent.iter().any(|p| p.is_none()) {
        return Err(Violation::InverseNotSpanningTree);
    }
    let list: Vec<Word> = words.values().cloned().collect();
    if list.iter().any(|w| w.check_rank(parts.rank).is_err()) || !EndoMap::new(list).is_automorphism() {
        return Err(Violation::InverseNotBasis);
    }
    let mut all = vec![Word::empty(); g.edges.len()];
    for (e, w) in words {
        all[*e] = w.reduce();
    }
    Ok(InverseMarking { in_tree, words: all })
}

impl MarkedGraph {
    /// A point of Outer Space.
    pub fn new(parts: MarkedParts) -> Result<Self> {
        Self::with_policy(parts, LengthPolicy::Positive)
    }

    pub fn with_policy(parts: MarkedParts, policy: LengthPolicy) -> Result<Self> {
        let (report, inverse) = validate_parts(&parts, policy);
        match inverse {
            Some(inverse) if report.is_valid() => Ok(MarkedGraph {
                rank: parts.rank,
                graph: parts.graph,
                base: parts.base,
                images: parts.images,
                inverse,
            }),
            _ => Err(Error::Invalid(report)),
        }
    }

    pub fn parts(&self) -> MarkedParts {
        let words = (0..self.graph.edges.len())
            .filter(|e| !self.inverse.in_tree[*e])
            .map(|e| (e, self.inverse.words[e].clone()))
            .collect();
        MarkedParts {
            rank: self.rank,
            graph: self.graph.clone(),
            base: self.base,
            images: self.images.clone(),
            inverse: Some(words),
        }
    }

    /// Re-runs the Outer Space conditions.
    pub fn validate(&self) -> ValidationReport {
        validate_parts(&self.parts(), LengthPolicy::Positive).0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn images(&self) -> &[Vec<DirEdge>] {
        &self.images
    }

    pub fn inverse(&self) -> &InverseMarking {
        &self.inverse
    }

    pub fn length(&self, edge: usize) -> &Q {
        &self.graph.edges[edge].length
    }

    /// Same graph and marking with new lengths (not revalidated).
    pub(crate) fn with_lengths(&self, lengths: &[Q]) -> MarkedGraph {
        let mut out = self.clone();
        for (e, l) in out.graph.edges.iter_mut().zip(lengths) {
            e.length = l.clone();
        }
        out
    }

    pub fn lengths(&self) -> Vec<Q> {
        self.graph.edges.iter().map(|e| e.length.clone()).collect()
    }

    /// The untightened edge path `τ(w)`.
    pub fn image_path(&self, w: &Word) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for &l in w.letters() {
            let p = &self.images[l.generator()];
            if l.is_inverse() {
                out.extend(reverse_path(p));
            } else {
                out.extend_from_slice(p);
            }
        }
        out
    }

    pub fn tighten(&self, p: &[DirEdge], cyclic: bool) -> Vec<DirEdge> {
        if cyclic {
            tighten_loop(p)
        } else {
            tighten_path(p)
        }
    }

    /// The immersed loop freely homotopic to `τ(w)`.
    pub fn loop_of(&self, w: &Word) -> Vec<DirEdge> {
        tighten_loop(&self.image_path(w))
    }

    pub fn translation_length(&self, w: &Word) -> Q {
        self.graph.path_length(&self.loop_of(w))
    }

    /// Element of `F_n` read along a path (exact for loops at the base vertex).
    pub fn path_word(&self, p: &[DirEdge]) -> Word {
        self.inverse.path_word(p)
    }

    pub fn loop_class(&self, p: &[DirEdge]) -> CyclicWord {
        self.path_word(p).to_cyclic()
    }

    /// All candidate loops, sorted by word so the first maximizer is the
    /// canonical witness.
    pub fn candidates(&self) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = shapes::candidate_loops(&self.graph)
            .into_iter()
            .map(|(kind, path)| {
                let word = self.loop_class(&path).unoriented();
                let support = path.iter().map(|d| d.edge).collect();
                Candidate { kind, path, word, support }
            })
            .collect();
        out.sort_by(|a, b| a.word.shortlex_cmp(&b.word).then(a.kind.cmp(&b.kind)).then(a.path.cmp(&b.path)));
        out
    }

    /// Collapses a forest and rescales to unit volume.
    pub fn collapse_forest(&self, forest: &BTreeSet<usize>) -> Result<MarkedGraph> {
        let g = &self.graph;
        if let Some(&bad) = forest.iter().find(|&&e| e >= g.edges.len()) {
            return Err(Error::UnknownEdge(bad.to_string()));
        }
        let mut uf: Vec<usize> = (0..g.vertices.len()).collect();
        fn find(uf: &mut [usize], mut v: usize) -> usize {
            while uf[v] != v {
                uf[v] = uf[uf[v]];
                v = uf[v];
            }
            v
        }
        for &e in forest {
            let (a, b) = (find(&mut uf, g.edges[e].from), find(&mut uf, g.edges[e].to));
            if a == b {
                return Err(Error::NotAForest);
            }
            uf[a.max(b)] = a.min(b);
        }
        if forest.is_empty() {
            return Ok(self.clone());
        }
        let removed: Q = forest.iter().map(|&e| g.edges[e].length.clone()).sum();
        let total = g.volume();
        if removed >= total {
            return Err(Error::Precondition("forest carries the whole volume".into()));
        }
        let scale = &total / (&total - &removed);
        let mut vindex = vec![usize::MAX; g.vertices.len()];
        let mut vertices = Vec::new();
        for v in 0..g.vertices.len() {
            let r = find(&mut uf, v);
            if vindex[r] == usize::MAX {
                vindex[r] = vertices.len();
                vertices.push(g.vertices[r].clone());
            }
            vindex[v] = vindex[r];
        }
        let mut eindex = vec![usize::MAX; g.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in g.edges.iter().enumerate() {
            if forest.contains(&i) {
                continue;
            }
            eindex[i] = edges.len();
            edges.push(Edge { id: e.id.clone(), from: vindex[e.from], to: vindex[e.to], length: &e.length * &scale });
        }
        let map = |p: &[DirEdge]| -> Vec<DirEdge> {
            p.iter().filter(|d| !forest.contains(&d.edge)).map(|d| DirEdge { edge: eindex[d.edge], reversed: d.reversed }).collect()
        };
        let images = self.images.iter().map(|p| tighten_path(&map(p))).collect();
        let parts = MarkedParts { rank: self.rank, graph: MetricGraph { vertices, edges }, base: vindex[self.base], images, inverse: None };
        let policy = if self.graph.edges.iter().all(|e| e.length.is_positive()) { LengthPolicy::Positive } else { LengthPolicy::NonNegative };
        MarkedGraph::with_policy(parts, policy)
    }

    /// `x·φ`: same metric graph, marking precomposed with `φ`.
    pub fn act(&self, phi: &EndoMap) -> Result<MarkedGraph> {
        if phi.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: phi.rank() });
        }
        let psi = phi.invert()?;
        let mut out = self.clone();
        out.images = phi.images().iter().map(|w| tighten_path(&self.image_path(w))).collect();
        out.inverse.words = self.inverse.words.iter().map(|w| psi.apply(w)).collect();
        Ok(out)
    }

    /// For each edge outside the spanning tree `tree`, the element read along
    /// the loop (tree path)·e·(tree path) based at the base vertex.
    pub fn spanning_tree_basis(&self, tree: &BTreeSet<usize>) -> Result<Vec<(usize, Word)>> {
        let g = &self.graph;
        if tree.iter().any(|&e| e >= g.edges.len()) {
            return Err(Error::NotASpanningTree);
        }
        let (parent, _) = g.bfs_tree(self.base, |e| tree.contains(&e));
        if tree.len() + 1 != g.vertices.len() || parent.iter().any(|p| p.is_none()) {
            return Err(Error::NotASpanningTree);
        }
        Ok((0..g.edges.len())
            .filter(|e| !tree.contains(e))
            .map(|e| {
                let d = DirEdge::forward(e);
                let mut lp = g.tree_path(&parent, g.origin(d));
                lp.push(d);
                lp.extend(reverse_path(&g.tree_path(&parent, g.terminus(d))));
                (e, self.path_word(&lp))
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CandidateKind {
    EmbeddedCircle,
    FigureEight,
    Barbell,
    /// Bar between two vertices with nontrivial groups.
    PointBarbell,
    /// Bar from a vertex with nontrivial group to an embedded circle.
    PointCircleBarbell,
    /// Lifted loop whose positive part matches none of the shapes above.
    Composite,
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateKind::EmbeddedCircle => "embedded_circle",
            CandidateKind::FigureEight => "figure_eight",
            CandidateKind::Barbell => "barbell",
            CandidateKind::PointBarbell => "point_barbell",
            CandidateKind::PointCircleBarbell => "point_circle_barbell",
            CandidateKind::Composite => "composite",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub kind: CandidateKind,
    /// Immersed closed path realizing the shape.
    pub path: Vec<DirEdge>,
    /// Unoriented conjugacy class read through the inverse marking.
    pub word: CyclicWord,
    pub support: BTreeSet<usize>,
}
