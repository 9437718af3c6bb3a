//! Simplicial points of the completion, stored as marked graphs whose
//! zero-length subgraph `Z` is collapsed to vertex groups.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::marked_graph::shapes::{cycle_vertices, rotate_to, simple_cycles, simple_paths};
use crate::marked_graph::{
    reverse_path, CandidateKind, DirEdge, Edge, LengthPolicy, MarkedGraph, MarkedParts, MetricGraph, ValidationReport,
    Violation,
};
use crate::metric::{DistanceResult, StretchFactor, Witness};
use crate::rational::Q;
use crate::words::{CyclicWord, Word};

/// A completion point. Interior points are the case `Z = ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionPoint {
    g: MarkedGraph,
}

impl CompletionPoint {
    pub fn new(parts: MarkedParts) -> Result<Self> {
        Self::from_blow_up(MarkedGraph::with_policy(parts, LengthPolicy::NonNegative)?)
    }

    /// Checks quotient minimality on an already validated blow-up graph.
    pub fn from_blow_up(g: MarkedGraph) -> Result<Self> {
        let pt = CompletionPoint { g };
        let view = collapse_zero(&pt);
        let violations: Vec<Violation> = (0..view.quotient.vertices.len())
            .filter_map(|v| {
                let valence = view.quotient.valence(v) + if view.groups[v].is_empty() { 0 } else { 2 };
                (valence < 3).then(|| Violation::Valence { vertex: view.quotient.vertices[v].clone(), valence })
            })
            .collect();
        if violations.is_empty() {
            Ok(pt)
        } else {
            Err(Error::Invalid(ValidationReport { violations }))
        }
    }

    pub fn interior(x: MarkedGraph) -> Self {
        CompletionPoint { g: x }
    }

    pub fn graph(&self) -> &MarkedGraph {
        &self.g
    }

    pub fn rank(&self) -> usize {
        self.g.rank()
    }

    pub fn zero_edges(&self) -> BTreeSet<usize> {
        (0..self.g.graph().edges.len()).filter(|&e| self.g.length(e).is_zero()).collect()
    }

    pub fn is_interior(&self) -> bool {
        self.zero_edges().is_empty()
    }

    /// The Outer Space point, when there is no zero-length edge.
    pub fn to_interior(&self) -> Option<MarkedGraph> {
        self.is_interior().then(|| self.g.clone())
    }
}

pub fn qvol(t: &CompletionPoint) -> Q {
    t.g.graph().edges.iter().map(|e| e.length.clone()).filter(|l| l.is_positive()).sum()
}

/// Graph of groups obtained by collapsing each component of `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoGView {
    /// Quotient graph; its edges are the positive edges, in order.
    pub quotient: MetricGraph,
    /// Vertex group generators, read through the marking.
    pub groups: Vec<Vec<Word>>,
    /// Quotient vertex of each blow-up vertex.
    pub component: Vec<usize>,
    /// Blow-up vertex each quotient vertex is rooted at.
    pub roots: Vec<usize>,
    /// Blow-up edge of each quotient edge.
    pub edge_of: Vec<usize>,
    zparent: Vec<Option<Option<DirEdge>>>,
    basis_loops: Vec<Vec<Vec<DirEdge>>>,
}

impl GoGView {
    pub fn is_trivial(&self, v: usize) -> bool {
        self.groups[v].is_empty()
    }

    fn lift(&self, d: DirEdge) -> DirEdge {
        DirEdge { edge: self.edge_of[d.edge], reversed: d.reversed }
    }

    /// Path inside a `Z` component between two of its vertices.
    fn connect(&self, g: &MetricGraph, from: usize, to: usize) -> Vec<DirEdge> {
        let mut p = reverse_path(&g.tree_path(&self.zparent, from));
        p.extend(g.tree_path(&self.zparent, to));
        p
    }

    /// Loop at the root of `v` representing a word in its group basis.
    fn element_loop(&self, v: usize, u: &Word) -> Vec<DirEdge> {
        let mut p = Vec::new();
        for l in u.letters() {
            let b = &self.basis_loops[v][l.generator()];
            if l.is_inverse() {
                p.extend(reverse_path(b));
            } else {
                p.extend_from_slice(b);
            }
        }
        p
    }
}

impl fmt::Display for GoGView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, name) in self.quotient.vertices.iter().enumerate() {
            let gens: Vec<String> = self.groups[v].iter().map(|w| w.to_string()).collect();
            writeln!(f, "vertex {name} group <{}>", gens.join(","))?;
        }
        for e in &self.quotient.edges {
            writeln!(
                f,
                "edge {} {} -> {} length {}",
                e.id,
                self.quotient.vertices[e.from],
                self.quotient.vertices[e.to],
                crate::rational::format_q(&e.length)
            )?;
        }
        Ok(())
    }
}

pub fn collapse_zero(t: &CompletionPoint) -> GoGView {
    let x = &t.g;
    let g = x.graph();
    let zero = |e: usize| g.edges[e].length.is_zero();
    let nv = g.vertices.len();
    let mut component = vec![usize::MAX; nv];
    let mut zparent: Vec<Option<Option<DirEdge>>> = vec![None; nv];
    let mut roots = Vec::new();
    let mut groups = Vec::new();
    let mut basis_loops = Vec::new();
    let mut in_forest = vec![false; g.edges.len()];
    for r in 0..nv {
        if component[r] != usize::MAX {
            continue;
        }
        let c = roots.len();
        roots.push(r);
        let (parent, in_tree) = g.bfs_tree(r, zero);
        for v in 0..nv {
            if parent[v].is_some() {
                component[v] = c;
                zparent[v] = parent[v];
            }
        }
        for e in 0..g.edges.len() {
            in_forest[e] |= in_tree[e];
        }
        groups.push(Vec::new());
        basis_loops.push(Vec::new());
    }
    for e in 0..g.edges.len() {
        if zero(e) && !in_forest[e] {
            let c = component[g.edges[e].from];
            let d = DirEdge::forward(e);
            let mut lp = g.tree_path(&zparent, g.origin(d));
            lp.push(d);
            lp.extend(reverse_path(&g.tree_path(&zparent, g.terminus(d))));
            groups[c].push(x.path_word(&lp));
            basis_loops[c].push(lp);
        }
    }
    let mut edges = Vec::new();
    let mut edge_of = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if !zero(i) {
            edges.push(Edge { id: e.id.clone(), from: component[e.from], to: component[e.to], length: e.length.clone() });
            edge_of.push(i);
        }
    }
    let vertices = roots.iter().map(|&r| g.vertices[r].clone()).collect();
    GoGView {
        quotient: MetricGraph { vertices, edges },
        groups,
        component,
        roots,
        edge_of,
        zparent,
        basis_loops,
    }
}

/// Length of the positive part of the immersed loop.
pub fn translation_length_ext(t: &CompletionPoint, w: &Word) -> Q {
    t.g.translation_length(w)
}

/// Serre's criterion: generators and their pairwise products all elliptic.
pub fn is_elliptic(t: &CompletionPoint, gens: &[Word]) -> bool {
    let zero = |w: &Word| translation_length_ext(t, w).is_zero();
    gens.iter().all(zero) && (0..gens.len()).all(|i| (i + 1..gens.len()).all(|j| zero(&gens[i].mul(&gens[j]))))
}

/// Bar-and-bell data for the shapes that need vertex-group elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtShape {
    pub kind: CandidateKind,
    /// Quotient vertex carrying the first element.
    pub start: usize,
    /// Quotient path from `start`; empty only for a vertex lying on `circle`.
    pub bar: Vec<DirEdge>,
    /// Quotient circle at the end of the bar; empty for point barbells.
    pub circle: Vec<DirEdge>,
}

impl ExtShape {
    /// Number of vertex-group elements the shape needs.
    pub fn arity(&self) -> usize {
        if self.kind == CandidateKind::PointBarbell {
            2
        } else {
            1
        }
    }

    pub fn end(&self, view: &GoGView) -> usize {
        self.bar.last().map_or(self.start, |d| view.quotient.terminus(*d))
    }

    /// Vertex whose group supplies the `i`-th element.
    pub fn element_vertex(&self, view: &GoGView, i: usize) -> usize {
        if i == 0 {
            self.start
        } else {
            self.end(view)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtCandidate {
    pub kind: CandidateKind,
    /// Closed path in the blow-up graph.
    pub path: Vec<DirEdge>,
    /// Positive part of `path`, as quotient edges.
    pub quotient_path: Vec<DirEdge>,
    pub word: CyclicWord,
}

/// All point-barbell and point-circle-barbell shapes of the quotient.
pub fn ext_shapes(view: &GoGView) -> Vec<ExtShape> {
    let q = &view.quotient;
    let nv = q.vertices.len();
    let nontrivial: Vec<usize> = (0..nv).filter(|&v| !view.is_trivial(v)).collect();
    let mut out = Vec::new();
    let none = vec![false; nv];
    for (i, &u) in nontrivial.iter().enumerate() {
        for (e, edge) in q.edges.iter().enumerate() {
            if edge.from == u && edge.to == u {
                out.push(ExtShape { kind: CandidateKind::PointBarbell, start: u, bar: vec![DirEdge::forward(e)], circle: vec![] });
            }
        }
        for &w in &nontrivial[i + 1..] {
            for bar in simple_paths(q, u, w, &none) {
                out.push(ExtShape { kind: CandidateKind::PointBarbell, start: u, bar, circle: vec![] });
            }
        }
    }
    let cycles = simple_cycles(q);
    for &u in &nontrivial {
        for c in &cycles {
            let verts = cycle_vertices(q, c);
            if verts.contains(&u) {
                for circle in [rotate_to(q, c, u), reverse_path(&rotate_to(q, c, u))] {
                    out.push(ExtShape { kind: CandidateKind::PointCircleBarbell, start: u, bar: vec![], circle });
                }
                continue;
            }
            let mut blocked = vec![false; nv];
            for &v in &verts {
                blocked[v] = true;
            }
            for &w in &verts {
                for bar in simple_paths(q, u, w, &blocked) {
                    let circle = rotate_to(q, c, w);
                    for circle in [circle.clone(), reverse_path(&circle)] {
                        out.push(ExtShape { kind: CandidateKind::PointCircleBarbell, start: u, bar: bar.clone(), circle });
                    }
                }
            }
        }
    }
    out
}

/// Closed blow-up path through quotient edges, joined inside `Z` components.
/// Each piece is a quotient-edge run optionally preceded by an element loop.
fn assemble(x: &MarkedGraph, view: &GoGView, pieces: &[(Option<(usize, Word)>, Vec<DirEdge>)]) -> Vec<DirEdge> {
    let g = x.graph();
    let mut path: Vec<DirEdge> = Vec::new();
    let mut start = None;
    let mut cur = 0;
    let mut step = |path: &mut Vec<DirEdge>, cur: &mut usize, to: usize, seg: Vec<DirEdge>, end: usize| {
        if start.is_none() {
            start = Some(to);
        } else {
            path.extend(view.connect(g, *cur, to));
        }
        path.extend(seg);
        *cur = end;
    };
    for (elem, run) in pieces {
        if let Some((v, u)) = elem {
            let root = view.roots[*v];
            step(&mut path, &mut cur, root, view.element_loop(*v, u), root);
        }
        for &d in run {
            let l = view.lift(d);
            step(&mut path, &mut cur, g.origin(l), vec![l], g.terminus(l));
        }
    }
    if let Some(s) = start {
        path.extend(view.connect(g, cur, s));
    }
    path
}

/// Realizes a shape with explicit group elements, each a word in the
/// basis of the relevant vertex group.
pub fn realize(s: &CompletionPoint, view: &GoGView, shape: &ExtShape, elements: &[Word]) -> ExtCandidate {
    let x = &s.g;
    let end = shape.end(view);
    let pieces = match shape.kind {
        CandidateKind::PointBarbell => vec![
            (Some((shape.start, elements[0].clone())), shape.bar.clone()),
            (Some((end, elements[1].clone())), reverse_path(&shape.bar)),
        ],
        _ => vec![
            (Some((shape.start, elements[0].clone())), shape.bar.clone()),
            (None, shape.circle.clone()),
            (None, reverse_path(&shape.bar)),
        ],
    };
    let path = assemble(x, view, &pieces);
    let quotient_path = pieces.iter().flat_map(|p| p.1.iter().copied()).collect();
    ExtCandidate { kind: shape.kind, word: x.loop_class(&path).unoriented(), path, quotient_path }
}

/// Shape of a loop's positive part, read on the quotient.
fn classify(view: &GoGView, qp: &[DirEdge]) -> CandidateKind {
    let q = &view.quotient;
    let mut mult = vec![0usize; q.edges.len()];
    for d in qp {
        mult[d.edge] += 1;
    }
    if mult.iter().any(|&m| m > 2) {
        return CandidateKind::Composite;
    }
    if mult.iter().all(|&m| m < 2) {
        let mut visits = vec![0usize; q.vertices.len()];
        for d in qp {
            visits[q.terminus(*d)] += 1;
        }
        return match visits.iter().filter(|&&k| k >= 2).count() {
            0 => CandidateKind::EmbeddedCircle,
            1 if visits.iter().all(|&k| k <= 2) => CandidateKind::FigureEight,
            _ => CandidateKind::Composite,
        };
    }
    // edges crossed once form the bells; count their components
    let mut uf: Vec<usize> = (0..q.vertices.len()).collect();
    fn find(uf: &mut [usize], mut v: usize) -> usize {
        while uf[v] != v {
            uf[v] = uf[uf[v]];
            v = uf[v];
        }
        v
    }
    let once: Vec<usize> = (0..q.edges.len()).filter(|&e| mult[e] == 1).collect();
    for &e in &once {
        let (a, b) = (find(&mut uf, q.edges[e].from), find(&mut uf, q.edges[e].to));
        uf[a] = b;
    }
    let bells: BTreeSet<usize> = once.iter().map(|&e| find(&mut uf, q.edges[e].from)).collect();
    match bells.len() {
        0 => CandidateKind::PointBarbell,
        1 => CandidateKind::PointCircleBarbell,
        2 => CandidateKind::Barbell,
        _ => CandidateKind::Composite,
    }
}

/// Candidates of a completion point: the blow-up graph's own candidates of
/// positive length, plus every point-barbell shape instantiated with the
/// first basis element of each vertex group. Sorted by word; one per word.
pub fn candidates_ext(s: &CompletionPoint) -> Vec<ExtCandidate> {
    let view = collapse_zero(s);
    let x = &s.g;
    let qindex: Vec<Option<usize>> = {
        let mut m = vec![None; x.graph().edges.len()];
        for (i, &e) in view.edge_of.iter().enumerate() {
            m[e] = Some(i);
        }
        m
    };
    let mut all = Vec::new();
    let interior = s.is_interior();
    for c in x.candidates() {
        let qp: Vec<DirEdge> =
            c.path.iter().filter_map(|d| qindex[d.edge].map(|e| DirEdge { edge: e, reversed: d.reversed })).collect();
        if qp.is_empty() || x.translation_length(&c.word.to_word()).is_zero() {
            continue;
        }
        let kind = if interior { c.kind } else { classify(&view, &qp) };
        all.push(ExtCandidate { kind, path: c.path, quotient_path: qp, word: c.word });
    }
    let first = Word::generator(0);
    for shape in ext_shapes(&view) {
        let elems = vec![first.clone(); shape.arity()];
        all.push(realize(s, &view, &shape, &elems));
    }
    all.sort_by(|a, b| a.word.shortlex_cmp(&b.word).then(a.kind.cmp(&b.kind)).then(a.path.cmp(&b.path)));
    all.dedup_by(|b, a| a.word == b.word);
    all
}

fn same_rank(s: &CompletionPoint, t: &CompletionPoint) -> Result<()> {
    if s.rank() != t.rank() {
        return Err(Error::RankMismatch { expected: s.rank(), found: t.rank() });
    }
    Ok(())
}

/// Extended distance as a stretch factor. Infinite exactly when some vertex
/// group of `s` acts without a fixed point on `t`.
pub fn distance_ext(s: &CompletionPoint, t: &CompletionPoint) -> Result<DistanceResult> {
    same_rank(s, t)?;
    let view = collapse_zero(s);
    if view.groups.iter().any(|gens| !gens.is_empty() && !is_elliptic(t, gens)) {
        return Ok(DistanceResult { factor: StretchFactor::Infinite, witness: None });
    }
    let mut best: Option<(Q, Witness)> = None;
    for c in candidates_ext(s) {
        let w = c.word.to_word();
        let ls = translation_length_ext(s, &w);
        if ls.is_zero() {
            return Err(Error::Internal(format!("candidate {} has length zero in the source", c.word)));
        }
        let r = translation_length_ext(t, &w) / ls;
        if best.as_ref().is_none_or(|(b, _)| &r > b) {
            best = Some((r, Witness { word: c.word, kind: c.kind }));
        }
    }
    let (factor, witness) = best.ok_or_else(|| Error::Internal("completion point has no candidates".into()))?;
    Ok(DistanceResult { factor: StretchFactor::Finite(factor), witness: Some(witness) })
}

pub fn equals(s: &CompletionPoint, t: &CompletionPoint) -> Result<bool> {
    Ok(distance_ext(s, t)?.factor.is_one() && distance_ext(t, s)?.factor.is_one())
}

fn check_epsilon(eps: &Q) -> Result<()> {
    if !eps.is_positive() || eps >= &Q::one() {
        return Err(Error::Precondition("epsilon must lie strictly between 0 and 1".into()));
    }
    Ok(())
}

/// Scales the positive part by `1 - eps` and shares `eps` equally among the
/// zero-length edges.
pub fn approximate_from_interior(t: &CompletionPoint, eps: &Q) -> Result<MarkedGraph> {
    check_epsilon(eps)?;
    let zero = t.zero_edges();
    if zero.is_empty() {
        return Ok(t.g.clone());
    }
    let share = eps / Q::from_integer((zero.len() as i64).into());
    let keep = Q::one() - eps;
    let lengths: Vec<Q> = t.g.lengths().iter().map(|l| if l.is_zero() { share.clone() } else { l * &keep }).collect();
    MarkedGraph::new(t.g.with_lengths(&lengths).parts())
}

fn check_subgraph(x: &MarkedGraph, z: &BTreeSet<usize>) -> Result<()> {
    let m = x.graph().edges.len();
    if let Some(&e) = z.iter().find(|&&e| e >= m) {
        return Err(Error::UnknownEdge(e.to_string()));
    }
    if z.is_empty() || z.len() == m {
        return Err(Error::InvalidFace("subgraph must be nonempty and proper".into()));
    }
    Ok(())
}

/// `Z` gets total length `s`, the rest `1 - s`, both proportionally.
fn pinched(x: &MarkedGraph, z: &BTreeSet<usize>, s: &Q) -> Vec<Q> {
    let vz: Q = z.iter().map(|&e| x.length(e).clone()).sum();
    let vol = x.graph().volume();
    let rest = &vol - &vz;
    let one_minus = Q::one() - s;
    x.lengths()
        .iter()
        .enumerate()
        .map(|(e, l)| if z.contains(&e) { l * s / &vz } else { l * &one_minus / &rest })
        .collect()
}

/// Shrinks `Z` along the schedule, keeping unit volume.
pub fn pinch_sequence(x: &MarkedGraph, z: &BTreeSet<usize>, schedule: &[Q]) -> Result<Vec<MarkedGraph>> {
    check_subgraph(x, z)?;
    let in_range = schedule.iter().all(|s| s.is_positive() && s < &Q::one());
    if !in_range || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ScheduleNotDecreasing);
    }
    schedule.iter().map(|s| MarkedGraph::new(x.with_lengths(&pinched(x, z, s)).parts())).collect()
}

/// Limit of a pinch: `Z` at length zero, the rest rescaled to volume one.
pub fn pinch_limit(x: &MarkedGraph, z: &BTreeSet<usize>) -> Result<CompletionPoint> {
    check_subgraph(x, z)?;
    CompletionPoint::new(x.with_lengths(&pinched(x, z, &Q::zero())).parts())
}

/// Interior point as a completion point; convenience for mixed comparisons.
impl From<MarkedGraph> for CompletionPoint {
    fn from(x: MarkedGraph) -> Self {
        CompletionPoint::interior(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, rose_q};
    use crate::words::Letter;
    use crate::metric::distance;
    use crate::rational::{pow2_inv, q, qi};
    use crate::verify::is_elliptic_brute;
    use crate::words::stallings_graph;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn split_a_b() -> CompletionPoint {
        fixtures::free_product_ab()
    }

    fn rose_a_only() -> CompletionPoint {
        fixtures::rose_point(&[qi(1), qi(0)])
    }

    #[test]
    fn interior_view_is_trivial() {
        let x = CompletionPoint::interior(rose_q(&[(1, 2), (1, 2)]));
        let v = collapse_zero(&x);
        assert!(v.groups.iter().all(|g| g.is_empty()));
        assert_eq!(v.quotient.edges.len(), 2);
        assert_eq!(qvol(&x), qi(1));
    }

    #[test]
    fn rose_with_zero_petal() {
        let t = rose_a_only();
        let v = collapse_zero(&t);
        assert_eq!(v.quotient.vertices.len(), 1);
        assert_eq!(v.quotient.edges.len(), 1);
        assert_eq!(v.groups, vec![vec![w("b")]]);
        assert_eq!(translation_length_ext(&t, &w("b")), qi(0));
        assert_eq!(translation_length_ext(&t, &w("a")), qi(1));
        assert_eq!(translation_length_ext(&t, &w("ab")), qi(1));
        assert!(is_elliptic(&t, &[w("b")]));
        assert!(!is_elliptic(&t, &[w("a"), w("b")]));
    }

    #[test]
    fn free_product_splitting() {
        let t = split_a_b();
        let v = collapse_zero(&t);
        assert_eq!(v.quotient.vertices.len(), 2);
        let mut groups = v.groups.clone();
        groups.sort();
        assert_eq!(groups, vec![vec![w("a")], vec![w("b")]]);
        assert_eq!(translation_length_ext(&t, &w("a")), qi(0));
        assert_eq!(translation_length_ext(&t, &w("b")), qi(0));
        assert_eq!(translation_length_ext(&t, &w("ab")), qi(2));
        assert_eq!(translation_length_ext(&t, &w("aabb")), qi(2));
        assert_eq!(translation_length_ext(&t, &w("abAB")), qi(4));
        let cands = candidates_ext(&t);
        let pb: Vec<_> = cands.iter().filter(|c| c.kind == CandidateKind::PointBarbell).collect();
        // the shape with elements a, b, plus the lifted barbell with the bell reversed
        let words: Vec<String> = pb.iter().map(|c| c.word.to_string()).collect();
        assert_eq!(words, vec!["ab", "aB"]);
    }

    #[test]
    fn theta_with_zero_edge() {
        let t = fixtures::theta_point([qi(0), q(1, 2), q(1, 2)]);
        let v = collapse_zero(&t);
        assert_eq!(v.quotient.vertices.len(), 1);
        assert_eq!(v.quotient.edges.len(), 2);
        assert!(v.groups.iter().all(|g| g.is_empty()));
        let collapsed = fixtures::theta([q(1, 3), q(1, 3), q(1, 3)])
            .collapse_forest(&BTreeSet::from([0]))
            .unwrap();
        assert!(equals(&t, &CompletionPoint::interior(collapsed)).unwrap());
    }

    #[test]
    fn unnormalized_input_rejected() {
        let g = fixtures::build_marked(2, 1, &[(0, 0, q(1, 2)), (0, 0, qi(0))], &["e1", "e2"], LengthPolicy::NonNegative);
        assert!(matches!(g, Err(Error::Invalid(_))));
        let all_zero = fixtures::build_marked(2, 1, &[(0, 0, qi(0)), (0, 0, qi(0))], &["e1", "e2"], LengthPolicy::NonNegative);
        assert!(all_zero.is_err());
    }

    #[test]
    fn distances_of_pinched_points() {
        let x = CompletionPoint::interior(rose_q(&[(1, 2), (1, 2)]));
        let t = rose_a_only();
        let d = distance_ext(&x, &t).unwrap();
        assert_eq!(d.factor, StretchFactor::Finite(qi(2)));
        assert_eq!(d.witness.unwrap().word.to_string(), "a");
        assert!(distance_ext(&t, &x).unwrap().factor.is_infinite());
        assert_eq!(distance_ext(&t, &split_a_b()).unwrap().factor, StretchFactor::Finite(qi(2)));
        assert_eq!(distance_ext(&t, &t).unwrap().factor, StretchFactor::one());
    }

    #[test]
    fn interior_agrees_with_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let x = fixtures::random_point(2 + rng.gen_range(0..2), 4, &mut rng);
            let y = fixtures::random_point(x.rank(), 4, &mut rng);
            let a = distance(&x, &y).unwrap();
            let b = distance_ext(&x.clone().into(), &y.clone().into()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn approximation_examples() {
        let t = rose_a_only();
        let x = approximate_from_interior(&t, &q(1, 4)).unwrap();
        assert_eq!(x.lengths(), vec![q(3, 4), q(1, 4)]);
        let mut prev = StretchFactor::Infinite;
        for i in 1..12 {
            let xi = approximate_from_interior(&t, &pow2_inv(i)).unwrap();
            let f = distance_ext(&xi.into(), &t).unwrap().factor;
            assert!(f <= StretchFactor::Finite(qi(1) / (qi(1) - pow2_inv(i))));
            assert!(f < prev);
            prev = f;
        }
        let inner = CompletionPoint::interior(rose_q(&[(1, 3), (2, 3)]));
        assert_eq!(approximate_from_interior(&inner, &q(1, 2)).unwrap(), *inner.graph());
        assert!(approximate_from_interior(&t, &qi(1)).is_err());
    }

    #[test]
    fn pinch_examples() {
        let x = rose_q(&[(1, 2), (1, 2)]);
        let z = BTreeSet::from([1]);
        let seq = pinch_sequence(&x, &z, &[q(1, 2), q(1, 4), q(1, 8)]).unwrap();
        assert_eq!(seq[0], x);
        assert_eq!(seq[2].lengths(), vec![q(7, 8), q(1, 8)]);
        // backwards distances blow up along the pinched petal
        let back = distance(&seq[2], &seq[0]).unwrap();
        assert_eq!(back.factor, StretchFactor::Finite(q(4, 1)));
        assert!(matches!(pinch_sequence(&x, &z, &[q(1, 4), q(1, 2)]), Err(Error::ScheduleNotDecreasing)));
        assert!(matches!(pinch_sequence(&x, &z, &[qi(1)]), Err(Error::ScheduleNotDecreasing)));
        assert!(pinch_sequence(&x, &BTreeSet::from([0, 1]), &[q(1, 2)]).is_err());
        assert_eq!(pinch_limit(&x, &z).unwrap(), rose_a_only());
    }

    #[test]
    fn type_five_shapes_once_per_circle_and_vertex() {
        let t = fixtures::barbell_point([qi(0), q(1, 2), q(1, 2)]);
        let v = collapse_zero(&t);
        let shapes = ext_shapes(&v);
        let pairs: BTreeSet<(Vec<usize>, usize)> = shapes
            .iter()
            .filter(|s| s.kind == CandidateKind::PointCircleBarbell)
            .map(|s| {
                let mut es: Vec<usize> = s.circle.iter().map(|d| d.edge).collect();
                es.sort();
                (es, s.start)
            })
            .collect();
        // one circle in the quotient, one nontrivial vertex
        assert_eq!(pairs.len(), 1);
        assert!(shapes.iter().all(|s| s.kind != CandidateKind::PointBarbell));
    }

    #[test]
    fn element_choice_does_not_change_stretch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let family = fixtures::completion_family();
        for s in &family {
            let view = collapse_zero(s);
            for t in family.iter().filter(|t| t.rank() == s.rank()) {
                if distance_ext(s, t).unwrap().factor.is_infinite() {
                    continue;
                }
                for shape in ext_shapes(&view) {
                    let base = realize(s, &view, &shape, &vec![Word::generator(0); shape.arity()]);
                    let st = |c: &ExtCandidate| {
                        let w = c.word.to_word();
                        translation_length_ext(t, &w) / translation_length_ext(s, &w)
                    };
                    for _ in 0..5 {
                        let elems: Vec<Word> = (0..shape.arity())
                            .map(|i| random_group_word(&mut rng, view.groups[shape.element_vertex(&view, i)].len()))
                            .collect();
                        assert_eq!(st(&realize(s, &view, &shape, &elems)), st(&base));
                    }
                }
            }
        }
    }

    fn random_group_word(rng: &mut ChaCha8Rng, n: usize) -> Word {
        loop {
            let letters = (0..rng.gen_range(1..5)).map(|_| Letter::new(rng.gen_range(0..n), rng.gen())).collect();
            let u = Word::from_letters(letters).reduce();
            if !u.is_empty() {
                return u;
            }
        }
    }

    #[test]
    fn family_is_valid_and_separated() {
        let family = fixtures::completion_family();
        assert!(family.len() >= 10);
        for (i, s) in family.iter().enumerate() {
            assert_eq!(qvol(s), qi(1));
            for (j, t) in family.iter().enumerate() {
                if s.rank() == t.rank() {
                    assert_eq!(equals(s, t).unwrap(), i == j, "{i} {j}");
                }
            }
        }
    }

    #[test]
    fn relabeled_point_is_equal() {
        let t = split_a_b();
        let mut parts = t.graph().parts();
        parts.graph.vertices = vec!["left".into(), "right".into()];
        for e in parts.graph.edges.iter_mut() {
            e.id = format!("x{}", e.id);
        }
        let u = CompletionPoint::new(parts).unwrap();
        assert!(equals(&t, &u).unwrap());
        let conj = t.graph().act(&crate::words::EndoMap::inner(2, &w("ab"))).unwrap();
        assert!(equals(&t, &CompletionPoint::from_blow_up(conj).unwrap()).unwrap());
    }

    #[test]
    fn ellipticity_matches_conjugacy_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let family = fixtures::completion_family();
        for t in family.iter().filter(|t| t.rank() == 2) {
            let view = collapse_zero(t);
            let groups: Vec<_> = view.groups.iter().filter(|g| !g.is_empty()).map(|g| stallings_graph(2, g)).collect();
            for _ in 0..20 {
                let n = rng.gen_range(1..3);
                let gens: Vec<Word> = (0..n).map(|_| random_group_word(&mut rng, 2)).collect();
                let fast = is_elliptic(t, &gens);
                assert_eq!(fast, is_elliptic_brute(t, &gens, 6), "{gens:?}");
                if n == 1 {
                    assert_eq!(fast, groups.iter().any(|h| h.conjugate_into(&gens[0])));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn triangle_with_completion_points(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let family: Vec<CompletionPoint> = fixtures::completion_family().into_iter().filter(|p| p.rank() == 2).collect();
            let pick = |rng: &mut ChaCha8Rng| -> CompletionPoint {
                if rng.gen_bool(0.5) {
                    family[rng.gen_range(0..family.len())].clone()
                } else {
                    fixtures::random_point(2, 3, rng).into()
                }
            };
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let xz = distance_ext(&x, &z).unwrap().factor;
            let via = distance_ext(&x, &y).unwrap().factor.mul(&distance_ext(&y, &z).unwrap().factor);
            if !via.is_infinite() {
                prop_assert!(xz <= via);
            }
        }

        #[test]
        fn collapse_keeps_positive_edges_apart(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let family = fixtures::completion_family();
            let t = &family[rng.gen_range(0..family.len())];
            let view = collapse_zero(t);
            let positive = t.graph().graph().edges.iter().filter(|e| e.length.is_positive()).count();
            prop_assert_eq!(view.quotient.edges.len(), positive);
            prop_assert_eq!(qvol(t), qi(1));
            let w = random_group_word(&mut rng, t.rank());
            let lp = t.graph().loop_of(&w);
            for k in 0..lp.len() {
                prop_assert_ne!(lp[k], lp[(k + 1) % lp.len()].reverse());
            }
        }
    }
}
