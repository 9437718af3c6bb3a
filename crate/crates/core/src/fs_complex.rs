//! Simplices of the free splitting complex seen through marked graphs:
//! faces, shared simplices, Euclidean balls and translation-length probes.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::completion::{distance_ext, equals, CompletionPoint};
use crate::error::{Error, Result};
use crate::fixtures::{build_marked, rose_point};
use crate::marked_graph::{LengthPolicy, MarkedGraph};
use crate::metric::StretchFactor;
use crate::rational::{qi, Q};
use crate::words::{CyclicWord, Word};

/// Keeps the edges of `keep`, rescaled to volume one; every other edge
/// joins the zero subgraph.
pub fn face(x: &CompletionPoint, keep: &BTreeSet<usize>) -> Result<CompletionPoint> {
    let g = x.graph();
    let m = g.graph().edges.len();
    if let Some(&e) = keep.iter().find(|&&e| e >= m) {
        return Err(Error::UnknownEdge(e.to_string()));
    }
    if keep.is_empty() || keep.iter().any(|&e| !g.length(e).is_positive()) {
        return Err(Error::InvalidFace("kept edges must be a nonempty set of positive edges".into()));
    }
    let vol: Q = keep.iter().map(|&e| g.length(e).clone()).sum();
    let lengths: Vec<Q> =
        (0..m).map(|e| if keep.contains(&e) { g.length(e) / &vol } else { Q::zero() }).collect();
    CompletionPoint::new(g.with_lengths(&lengths).parts()).map_err(|e| Error::InvalidFace(e.to_string()))
}

/// `1/vol(H)` for the image `H` of a candidate loop, after checking that it
/// equals the extended distance to the face spanned by `H`.
pub fn face_distance(x: &MarkedGraph, h: &BTreeSet<usize>) -> Result<Q> {
    if !x.candidates().iter().any(|c| &c.support == h) {
        return Err(Error::NotACandidateImage);
    }
    let vol: Q = h.iter().map(|&e| x.length(e).clone()).sum();
    let lambda = vol.recip();
    let src = CompletionPoint::interior(x.clone());
    let y = face(&src, h)?;
    let d = distance_ext(&src, &y)?.factor;
    if d != StretchFactor::Finite(lambda.clone()) {
        return Err(Error::Internal(format!("distance to face is {d}, expected {lambda}")));
    }
    Ok(lambda)
}

/// Both points as length assignments on one marked graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexCoords {
    /// Marked graph carrying the simplex (its own lengths are `x`).
    pub carrier: MarkedGraph,
    pub edge_ids: Vec<String>,
    pub x: Vec<Q>,
    pub y: Vec<Q>,
}

impl SimplexCoords {
    pub fn sup_difference(&self) -> Q {
        self.x.iter().zip(&self.y).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Q::zero)
    }
}

/// Exact solve of `A ℓ = b`; free variables are set to zero.
fn solve(mut rows: Vec<(Vec<Q>, Q)>, n: usize) -> Option<Vec<Q>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r].0[c].recip();
        let (row, rhs) = rows[r].clone();
        let row: Vec<Q> = row.iter().map(|v| v * &inv).collect();
        let rhs = rhs * &inv;
        for i in 0..rows.len() {
            if i != r && !rows[i].0[c].is_zero() {
                let f = rows[i].0[c].clone();
                for k in 0..n {
                    let d = &f * &row[k];
                    rows[i].0[k] -= d;
                }
                rows[i].1 -= &f * &rhs;
            }
        }
        rows[r] = (row, rhs);
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
        return None;
    }
    let mut out = vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = rows[i].1.clone();
    }
    Some(out)
}

/// Lengths on the carrier's graph realizing `other`, if any.
fn realize_on(carrier: &CompletionPoint, other: &CompletionPoint) -> Option<Vec<Q>> {
    if carrier.rank() != other.rank() {
        return None;
    }
    let c = carrier.graph();
    let m = c.graph().edges.len();
    let mut words: Vec<CyclicWord> = c.candidates().into_iter().map(|k| k.word).collect();
    words.extend(other.graph().candidates().into_iter().map(|k| k.word));
    let mut rows: Vec<(Vec<Q>, Q)> = words
        .iter()
        .map(|w| {
            let w = w.to_word();
            let mut count = vec![Q::zero(); m];
            for d in c.loop_of(&w) {
                count[d.edge] += Q::one();
            }
            (count, other.graph().translation_length(&w))
        })
        .collect();
    rows.push((vec![Q::one(); m], Q::one()));
    let lengths = solve(rows, m)?;
    if lengths.iter().any(|l| l.is_negative()) {
        return None;
    }
    let z = CompletionPoint::new(c.with_lengths(&lengths).parts()).ok()?;
    equals(&z, other).ok()?.then_some(lengths)
}

/// A simplex containing both points, searched on the two points' own
/// graphs (no further blow-ups).
pub fn common_simplex(x: &CompletionPoint, y: &CompletionPoint) -> Option<SimplexCoords> {
    let coords = |carrier: &CompletionPoint, a: Vec<Q>, b: Vec<Q>| SimplexCoords {
        carrier: carrier.graph().clone(),
        edge_ids: carrier.graph().graph().edges.iter().map(|e| e.id.clone()).collect(),
        x: a,
        y: b,
    };
    if let Some(l) = realize_on(x, y) {
        return Some(coords(x, x.graph().lengths(), l));
    }
    realize_on(y, x).map(|l| coords(y, l, y.graph().lengths()))
}

pub fn euclidean_ball_contains(x: &CompletionPoint, y: &CompletionPoint, eps: &Q) -> bool {
    common_simplex(x, y).is_some_and(|c| &c.sup_difference() < eps)
}

/// Translation lengths on a probe set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthVector {
    pub words: Vec<CyclicWord>,
    pub values: Vec<Q>,
}

impl LengthVector {
    pub fn sup_distance(&self, other: &LengthVector) -> Q {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Q::zero)
    }
}

pub fn axes_vector(t: &CompletionPoint, probes: &[Word]) -> LengthVector {
    LengthVector {
        words: probes.iter().map(|w| w.to_cyclic()).collect(),
        values: probes.iter().map(|w| t.graph().translation_length(w)).collect(),
    }
}

/// The splitting `x` with one edge for `a` and vertex group `<b>`, and a
/// rose `y` whose petals read `a b^i` and `b`.
#[derive(Clone, Debug)]
pub struct Strictness {
    pub i: u32,
    pub m: u32,
    pub x: CompletionPoint,
    pub y: CompletionPoint,
    /// Length of the `a b^i` petal.
    pub s: Q,
    /// Length of the `b` petal; `l(a, y) = s + i t`.
    pub t: Q,
}

impl Strictness {
    pub fn probes() -> Vec<Word> {
        vec![Word::generator(0), Word::generator(1)]
    }
}

/// `t = 1/(m(i-1)+1)` keeps `|l(a,y) - 1| < 1/m` and `t < 1/(m(i-1))`.
pub fn strictness_family(i: u32, m: u32) -> Result<Strictness> {
    if i < 2 || m < 1 {
        return Err(Error::Precondition("strictness family needs i >= 2 and m >= 1".into()));
    }
    let t = Q::new(1.into(), (i64::from(m) * (i64::from(i) - 1) + 1).into());
    let s = Q::one() - &t;
    let back = vec!["-e2"; i as usize].join(",");
    let a_image = format!("e1,{back}");
    let y = build_marked(2, 1, &[(0, 0, s.clone()), (0, 0, t.clone())], &[&a_image, "e2"], LengthPolicy::Positive)?;
    let x = rose_point(&[qi(1), qi(0)]);
    Ok(Strictness { i, m, x, y: CompletionPoint::interior(y), s, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, random_point, rose_q, theta};
    use crate::rational::{ln_q, q};
    use crate::words::EndoMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn face_examples() {
        let x: CompletionPoint = rose_q(&[(1, 2), (1, 2)]).into();
        assert_eq!(face(&x, &BTreeSet::from([0, 1])).unwrap(), x);
        assert_eq!(face(&x, &BTreeSet::from([0])).unwrap(), fixtures::rose_point(&[qi(1), qi(0)]));
        assert!(matches!(face(&x, &BTreeSet::new()), Err(Error::InvalidFace(_))));
        assert!(matches!(face(&x, &BTreeSet::from([4])), Err(Error::UnknownEdge(_))));
        let pinched = fixtures::rose_point(&[qi(1), qi(0)]);
        assert!(matches!(face(&pinched, &BTreeSet::from([1])), Err(Error::InvalidFace(_))));
    }

    #[test]
    fn faces_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let x: CompletionPoint = random_point(3, 3, &mut rng).into();
            let m = x.graph().graph().edges.len();
            let outer: BTreeSet<usize> = (0..m).filter(|_| rng.gen_bool(0.7)).collect();
            let inner: BTreeSet<usize> = outer.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
            let (Ok(f1), Ok(direct)) = (face(&x, &outer), face(&x, &inner)) else { continue };
            assert_eq!(face(&f1, &inner).unwrap(), direct);
        }
    }

    #[test]
    fn faces_commute_with_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = random_point(2, 3, &mut rng);
            let phi = EndoMap::random_automorphism(2, 6, &mut rng);
            let keep = BTreeSet::from([0]);
            let Ok(f) = face(&x.clone().into(), &keep) else { continue };
            let acted = CompletionPoint::from_blow_up(f.graph().act(&phi).unwrap()).unwrap();
            let other = face(&x.act(&phi).unwrap().into(), &keep).unwrap();
            assert_eq!(acted, other);
        }
    }

    #[test]
    fn face_distance_examples() {
        let x = rose_q(&[(1, 2), (1, 2)]);
        assert_eq!(face_distance(&x, &BTreeSet::from([0])).unwrap(), qi(2));
        assert_eq!(face_distance(&x, &BTreeSet::from([0, 1])).unwrap(), qi(1));
        let th = theta([q(1, 2), q(1, 4), q(1, 4)]);
        assert_eq!(face_distance(&th, &BTreeSet::from([1, 2])).unwrap(), qi(2));
        assert_eq!(face_distance(&th, &BTreeSet::from([0, 1])).unwrap(), q(4, 3));
        let bb = fixtures::barbell([q(1, 4), q(1, 2), q(1, 4)]);
        assert!(matches!(face_distance(&bb, &BTreeSet::from([1])), Err(Error::NotACandidateImage)));
        assert_eq!(face_distance(&bb, &BTreeSet::from([0, 1, 2])).unwrap(), qi(1));
        assert_eq!(face_distance(&bb, &BTreeSet::from([2])).unwrap(), qi(4));
    }

    // every candidate image of random points: the formula and the candidate sup agree
    #[test]
    fn face_distance_matches_candidate_sup() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..15 {
            let x = random_point(3, 3, &mut rng);
            let supports: BTreeSet<BTreeSet<usize>> = x.candidates().into_iter().map(|c| c.support).collect();
            for h in supports {
                face_distance(&x, &h).unwrap();
            }
        }
    }

    #[test]
    fn common_simplex_examples() {
        let x: CompletionPoint = rose_q(&[(1, 2), (1, 2)]).into();
        let c = common_simplex(&x, &x).unwrap();
        assert_eq!(c.x, c.y);
        let th: CompletionPoint = theta([q(1, 3), q(1, 3), q(1, 3)]).into();
        let c = common_simplex(&x, &th).unwrap();
        assert_eq!(c.x, vec![qi(0), q(1, 2), q(1, 2)]);
        assert_eq!(c.y, vec![q(1, 3), q(1, 3), q(1, 3)]);
        assert!(euclidean_ball_contains(&x, &th, &q(2, 5)));
        assert!(!euclidean_ball_contains(&x, &th, &q(1, 3)));
        let twisted: CompletionPoint = x.graph().act(&EndoMap::parse("abbb,b", 2).unwrap()).unwrap().into();
        assert!(common_simplex(&x, &twisted).is_none());
        assert!(!euclidean_ball_contains(&x, &twisted, &qi(2)));
        let pinched = fixtures::rose_point(&[qi(1), qi(0)]);
        let c = common_simplex(&x, &pinched).unwrap();
        assert_eq!(c.y, vec![qi(1), qi(0)]);
    }

    #[test]
    fn axes_vectors() {
        let x: CompletionPoint = rose_q(&[(1, 3), (2, 3)]).into();
        let v = axes_vector(&x, &[w("ab"), w("BA")]);
        assert_eq!(v.values[0], v.values[1]);
        assert_eq!(v.values[0], qi(1));
        let s = fixtures::rose_point(&[qi(1), qi(0)]);
        assert_eq!(axes_vector(&s, &Strictness::probes()).values, vec![qi(1), qi(0)]);
    }

    #[test]
    fn strictness_constraints() {
        let m = 10;
        for i in 2..=10 {
            let f = strictness_family(i, m).unwrap();
            let ax = axes_vector(&f.x, &Strictness::probes());
            let ay = axes_vector(&f.y, &Strictness::probes());
            assert!(ay.sup_distance(&ax) < q(1, m as i64));
            assert!(f.t < q(1, (m * (i - 1)) as i64));
            assert_eq!(ay.values[0], &f.s + &f.t * qi(i as i64));
            // y lies in a simplex with x as a face
            let c = common_simplex(&f.y, &f.x).unwrap();
            assert_eq!(c.sup_difference(), f.t);
            // the factor from y to x is 1/s and tends to 1; the reverse is infinite
            let d = distance_ext(&f.y, &f.x).unwrap().factor;
            assert_eq!(d, StretchFactor::Finite(f.s.recip()));
            assert!(distance_ext(&f.x, &f.y).unwrap().factor.is_infinite());
        }
        assert!(strictness_family(1, 3).is_err());
    }

    // a fixed Euclidean radius around x leaves the axes ball for large i
    #[test]
    fn euclidean_ball_not_inside_axes_ball() {
        let eps = q(1, 10);
        let m = 10;
        let x = fixtures::rose_point(&[qi(1), qi(0)]);
        let mut escaped = false;
        for i in 2..=40u32 {
            let t = &eps / qi(2);
            let back = vec!["-e2"; i as usize].join(",");
            let y = build_marked(2, 1, &[(0, 0, qi(1) - &t), (0, 0, t.clone())], &[&format!("e1,{back}"), "e2"], LengthPolicy::Positive)
                .unwrap()
                .into();
            assert!(euclidean_ball_contains(&x, &y, &eps));
            let gap = axes_vector(&y, &Strictness::probes()).sup_distance(&axes_vector(&x, &Strictness::probes()));
            escaped |= gap >= q(1, m);
        }
        assert!(escaped);
    }

    // |log d(y', x) - log d(y, x)| <= log(1/(1 - δ/minlen)) inside one simplex
    #[test]
    fn lipschitz_continuity_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let target = fixtures::rose_point(&[qi(1), qi(0)]);
        for _ in 0..40 {
            let a = rng.gen_range(2..9);
            let b = rng.gen_range(2..9);
            let (s, t) = (q(a, a + b), q(b, a + b));
            let delta = q(1, rng.gen_range(40..200));
            let y: CompletionPoint = fixtures::rose(&[s.clone(), t.clone()]).into();
            let yp: CompletionPoint = fixtures::rose(&[&s + &delta, &t - &delta]).into();
            let min = if s < t { s.clone() } else { t.clone() };
            let f = |p: &CompletionPoint| distance_ext(p, &target).unwrap().factor.finite().cloned().unwrap();
            let lhs = (ln_q(&f(&yp)) - ln_q(&f(&y))).abs();
            let rhs = ln_q(&(qi(1) / (qi(1) - &delta / &min)));
            assert!(lhs <= rhs + 1e-12, "{lhs} {rhs}");
        }
    }
}
