//! Property checks with fixed sizes and seeds, shared by the acceptance
//! tests and `osx verify`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asym::{check_forwards_cauchy, LipschitzSpace};
use crate::completion::{
    approximate_from_interior, collapse_zero, distance_ext, equals, ext_shapes, is_elliptic, pinch_sequence, realize,
    translation_length_ext, CompletionPoint,
};
use crate::fixtures::{completion_family, named_completion_points, random_point, rose_q};
use crate::fs_complex::{axes_vector, face_distance, strictness_family, Strictness};
use crate::marked_graph::MarkedGraph;
use crate::metric::{distance, StretchFactor};
use crate::rational::{format_q, pow2_inv, q, qi, Q};
use crate::verify::{is_elliptic_brute, max_stretch_brute, membership_disagreements};
use crate::words::{stallings_graph, EndoMap, Letter, Word};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Cases that passed out of cases checked.
    pub passes: usize,
    pub cases: usize,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {} ({}/{}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.passes,
            self.cases,
            self.detail
        )
    }
}

/// Sizes of the randomized checks.
#[derive(Clone, Copy, Debug)]
pub struct Sizes {
    pub candidate_pairs_per_rank: usize,
    pub brute_len: usize,
    pub triangle_triples: usize,
    pub isometry_cases: usize,
    pub face_points: usize,
    pub oracle_instances: usize,
    pub oracle_len: usize,
}

impl Sizes {
    pub fn full() -> Self {
        Sizes {
            candidate_pairs_per_rank: 100,
            brute_len: 12,
            triangle_triples: 500,
            isometry_cases: 100,
            face_points: 50,
            oracle_instances: 100,
            oracle_len: 8,
        }
    }

    pub fn quick() -> Self {
        Sizes {
            candidate_pairs_per_rank: 10,
            brute_len: 8,
            triangle_triples: 50,
            isometry_cases: 20,
            face_points: 10,
            oracle_instances: 10,
            oracle_len: 6,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub sizes: Sizes,
    pub threads: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64, sizes: Sizes) -> Self {
        SuiteConfig { seed, sizes, threads: 1 }
    }

    fn rng(&self, id: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (u64::from(id) << 32))
    }
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "candidate sup equals brute-force sup"),
    (2, "asymmetry witness"),
    (3, "multiplicative triangle inequality"),
    (4, "isometric action"),
    (5, "distance to face formula"),
    (6, "zero-distance rigidity"),
    (7, "vertex-group element independence"),
    (8, "pinching is forwards Cauchy, not backwards"),
    (9, "limit attainment from the interior"),
    (10, "axes topology strictly finer"),
    (11, "subgroup oracles agree with enumeration"),
    (12, "infinite distance from the one-edge loop"),
];

fn result(id: u32, passes: usize, cases: usize, passed: bool, detail: String) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    CriterionResult { id, name, passed, passes, cases, detail }
}

pub fn run(id: u32, cfg: &SuiteConfig) -> Option<CriterionResult> {
    Some(match id {
        1 => candidate_sup(cfg),
        2 => asymmetry(),
        3 => triangle(cfg),
        4 => isometry(cfg),
        5 => face_formula(cfg),
        6 => rigidity(),
        7 => element_independence(cfg),
        8 => pinching(),
        9 => limit_attainment(),
        10 => axes_finer(),
        11 => oracles(cfg),
        12 => infinite_distance(),
        _ => return None,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|(id, _)| run(*id, cfg)).collect()
}

/// A random point whose candidates all have words of length at most `max`.
fn short_candidate_point(rank: usize, max: usize, rng: &mut ChaCha8Rng) -> MarkedGraph {
    loop {
        let x = random_point(rank, 3, rng);
        if x.candidates().iter().all(|c| c.word.len() <= max) {
            return x;
        }
    }
}

fn candidate_sup(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = cfg.rng(1);
    let n = cfg.sizes.candidate_pairs_per_rank;
    let len = cfg.sizes.brute_len;
    let pairs: Vec<(MarkedGraph, MarkedGraph)> = [2usize, 3]
        .iter()
        .flat_map(|&rank| (0..n).map(move |_| rank).collect::<Vec<_>>())
        .map(|rank| (short_candidate_point(rank, len, &mut rng), random_point(rank, 4, &mut rng)))
        .collect();
    let check = |(x, y): &(MarkedGraph, MarkedGraph)| -> Option<String> {
        let d = distance(x, y).expect("same rank");
        let b = max_stretch_brute(x, y, len);
        (d.factor != StretchFactor::Finite(b.factor.clone()))
            .then(|| format!("candidates {} vs brute {} ({})", d.factor, format_q(&b.factor), b.word))
    };
    let failures: Vec<String> = parallel_map(&pairs, cfg.threads, check).into_iter().flatten().collect();
    let passes = pairs.len() - failures.len();
    let detail = match failures.first() {
        None => format!("{} pairs, ranks 2 and 3, words up to length {len}, exact", pairs.len()),
        Some(f) => format!("first mismatch: {f}"),
    };
    result(1, passes, pairs.len(), failures.is_empty(), detail)
}

fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.max(1);
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn asymmetry() -> CriterionResult {
    let x = rose_q(&[(1, 2), (1, 2)]);
    let y = rose_q(&[(3, 4), (1, 4)]);
    let fwd = distance(&x, &y).expect("same rank").factor;
    let back = distance(&y, &x).expect("same rank").factor;
    let ok = [fwd == StretchFactor::Finite(q(3, 2)), back == StretchFactor::Finite(qi(2))];
    let passes = ok.iter().filter(|b| **b).count();
    result(2, passes, 2, passes == 2, format!("d(x,y) factor {fwd}, d(y,x) factor {back}; expected 3/2 and 2"))
}

fn triangle(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = cfg.rng(3);
    let n = cfg.sizes.triangle_triples;
    let mut violations = 0;
    for k in 0..n {
        let rank = 2 + k % 2;
        let (x, y, z) = (random_point(rank, 4, &mut rng), random_point(rank, 4, &mut rng), random_point(rank, 4, &mut rng));
        let xz = distance(&x, &z).expect("same rank").factor;
        let via = distance(&x, &y).expect("same rank").factor.mul(&distance(&y, &z).expect("same rank").factor);
        if xz > via {
            violations += 1;
        }
    }
    result(3, n - violations, n, violations == 0, format!("{violations} violations in {n} triples"))
}

fn isometry(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = cfg.rng(4);
    let n = cfg.sizes.isometry_cases;
    let mut passes = 0;
    for k in 0..n {
        let rank = 2 + k % 2;
        let x = random_point(rank, 4, &mut rng);
        let y = random_point(rank, 4, &mut rng);
        let phi = EndoMap::random_automorphism(rank, rng.gen_range(1..=8), &mut rng);
        let before = distance(&x, &y).expect("same rank").factor;
        let after = distance(&x.act(&phi).expect("automorphism"), &y.act(&phi).expect("automorphism")).expect("same rank").factor;
        passes += usize::from(before == after);
    }
    result(4, passes, n, passes == n, format!("{passes}/{n} equal exactly, twists of length up to 8"))
}

fn face_formula(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = cfg.rng(5);
    let mut cases = 0;
    let mut passes = 0;
    let mut first_bad = None;
    for k in 0..cfg.sizes.face_points {
        let x = random_point(2 + k % 2, 4, &mut rng);
        let supports: BTreeSet<BTreeSet<usize>> = x.candidates().into_iter().map(|c| c.support).collect();
        for h in supports {
            cases += 1;
            let vol: Q = h.iter().map(|&e| x.length(e).clone()).sum();
            match face_distance(&x, &h) {
                Ok(v) if v == vol.recip() => passes += 1,
                other => {
                    first_bad.get_or_insert(format!("{other:?}"));
                }
            }
        }
    }
    let detail = first_bad.unwrap_or_else(|| format!("{cases} candidate images over {} points", cfg.sizes.face_points));
    result(5, passes, cases, passes == cases, detail)
}

fn rigidity() -> CriterionResult {
    let named = named_completion_points();
    let mut cases = 0;
    let mut passes = 0;
    let mut bad = Vec::new();
    for (i, (ni, s)) in named.iter().enumerate() {
        for (j, (nj, t)) in named.iter().enumerate() {
            if s.rank() != t.rank() {
                continue;
            }
            cases += 1;
            let eq = equals(s, t).expect("same rank");
            let ok = if i == j {
                eq
            } else {
                let one = StretchFactor::one();
                !eq && distance_ext(s, t).expect("same rank").factor > one && distance_ext(t, s).expect("same rank").factor > one
            };
            if ok {
                passes += 1;
            } else {
                bad.push(format!("{ni}/{nj}"));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{} fixture points, {cases} ordered pairs", named.len())
    } else {
        format!("failing pairs: {}", bad.join(", "))
    };
    result(6, passes, cases, bad.is_empty() && named.len() >= 10, detail)
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

fn element_independence(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = cfg.rng(7);
    let family = completion_family();
    let mut cases = 0;
    let mut passes = 0;
    for s in &family {
        let view = collapse_zero(s);
        let shapes = ext_shapes(&view);
        for t in family.iter().filter(|t| t.rank() == s.rank()) {
            if distance_ext(s, t).expect("same rank").factor.is_infinite() {
                continue;
            }
            let st = |w: &Word| translation_length_ext(t, w) / translation_length_ext(s, w);
            for shape in &shapes {
                cases += 1;
                let base = st(&realize(s, &view, shape, &vec![Word::generator(0); shape.arity()]).word.to_word());
                let same = (0..5).all(|_| {
                    let elems: Vec<Word> = (0..shape.arity())
                        .map(|i| random_group_word(&mut rng, view.groups[shape.element_vertex(&view, i)].len()))
                        .collect();
                    st(&realize(s, &view, shape, &elems).word.to_word()) == base
                });
                passes += usize::from(same);
            }
        }
    }
    result(7, passes, cases, passes == cases && cases > 0, format!("{cases} (shape, target) pairs, 5 element choices each"))
}

fn pinching() -> CriterionResult {
    let x = rose_q(&[(1, 2), (1, 2)]);
    let window = 20u32;
    let schedule: Vec<Q> = (1..=window).map(pow2_inv).collect();
    let seq: Vec<MarkedGraph> = pinch_sequence(&x, &BTreeSet::from([1]), &schedule).expect("valid pinch");
    let pts: Vec<CompletionPoint> = seq.iter().cloned().map(Into::into).collect();
    let eps: Vec<Q> = (0..=8).map(pow2_inv).collect();
    let cert = check_forwards_cauchy(&LipschitzSpace, &pts, &eps).expect("valid schedule");
    let mut cases = 1;
    let mut passes = usize::from(cert.holds());
    for i in 1..=window as usize {
        for j in i + 1..=window as usize {
            cases += 1;
            let back = distance(&seq[j - 1], &seq[i - 1]).expect("same rank").factor;
            let bound = StretchFactor::Finite(Q::from_integer(num_bigint::BigInt::from(2).pow((j - i) as u32)));
            passes += usize::from(back >= bound);
        }
    }
    let n8 = cert.records.last().map_or(0, |r| r.n);
    result(
        8,
        passes,
        cases,
        passes == cases,
        format!("window {window}, forwards Cauchy {} with N(2^-8) = {n8}; backwards d(x_j,x_i) >= 2^(j-i) checked", cert.verdict),
    )
}

fn limit_attainment() -> CriterionResult {
    let targets: Vec<CompletionPoint> = completion_family().into_iter().filter(|t| !t.is_interior()).collect();
    let mut cases = 0;
    let mut passes = 0;
    for t in &targets {
        let mut prev: Option<StretchFactor> = None;
        let mut ok = true;
        for i in 1..=10 {
            let eps = pow2_inv(i);
            let xi: CompletionPoint = approximate_from_interior(t, &eps).expect("valid epsilon").into();
            let f = distance_ext(&xi, t).expect("same rank").factor;
            ok &= f <= StretchFactor::Finite(Q::one() / (Q::one() - &eps));
            ok &= prev.as_ref().is_none_or(|p| &f <= p);
            prev = Some(f);
        }
        cases += 1;
        passes += usize::from(ok);
    }
    result(9, passes, cases, passes == cases, format!("{cases} completion points, eps = 2^-i for i <= 10"))
}

/// Factors from `y_i` to `x` for `i = 2..=10`, `m = 10`. The bound is the
/// factor at `i = 2`; stability asks every later factor to stay above it.
fn axes_finer() -> CriterionResult {
    let m = 10u32;
    let mut axes_ok = 0;
    let mut factors = Vec::new();
    for i in 2..=10 {
        let f = strictness_family(i, m).expect("valid parameters");
        let gap = axes_vector(&f.y, &Strictness::probes()).sup_distance(&axes_vector(&f.x, &Strictness::probes()));
        axes_ok += usize::from(gap < q(1, i64::from(m)));
        factors.push(distance_ext(&f.y, &f.x).expect("same rank").factor);
    }
    let bound = factors[0].clone();
    let stable = factors.iter().filter(|f| **f >= bound && **f > StretchFactor::one()).count();
    let passes = axes_ok.min(stable);
    let list: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
    result(
        10,
        passes,
        factors.len(),
        axes_ok == factors.len() && stable == factors.len(),
        format!("axes within 1/{m}: {axes_ok}/9; factors y_i -> x: {}; bound {bound}", list.join(", ")),
    )
}

fn oracles(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = cfg.rng(11);
    let n = cfg.sizes.oracle_instances;
    let len = cfg.sizes.oracle_len;
    let short = |rng: &mut ChaCha8Rng| -> Word {
        loop {
            let w = Word::from_letters((0..rng.gen_range(1..=3)).map(|_| Letter::new(rng.gen_range(0..2), rng.gen())).collect())
                .reduce();
            if !w.is_empty() {
                return w;
            }
        }
    };
    let mut member_ok = 0;
    for _ in 0..n {
        let gens: Vec<Word> = (0..rng.gen_range(1..=2)).map(|_| short(&mut rng)).collect();
        member_ok += usize::from(membership_disagreements(&stallings_graph(2, &gens), &gens, len).is_empty());
    }
    let points: Vec<CompletionPoint> = completion_family().into_iter().filter(|t| t.rank() == 2 && collapse_zero(t).groups.iter().any(|g| !g.is_empty())).collect();
    let mut serre_ok = 0;
    let mut elliptic = 0;
    for _ in 0..n {
        let t = &points[rng.gen_range(0..points.len())];
        let gens: Vec<Word> = if rng.gen_bool(0.5) {
            // conjugates of elements of one vertex group
            let view = collapse_zero(t);
            let groups: Vec<&Vec<Word>> = view.groups.iter().filter(|g| !g.is_empty()).collect();
            let g = groups[rng.gen_range(0..groups.len())];
            let u = short(&mut rng);
            (0..rng.gen_range(1..=2))
                .map(|_| {
                    let e = random_group_word(&mut rng, g.len());
                    let h = e.letters().iter().fold(Word::empty(), |acc, l| {
                        let b = &g[l.generator()];
                        acc.mul(&if l.is_inverse() { b.inverse() } else { b.clone() })
                    });
                    u.mul(&h).mul(&u.inverse())
                })
                .collect()
        } else {
            (0..rng.gen_range(1..=2)).map(|_| short(&mut rng)).collect()
        };
        let fast = is_elliptic(t, &gens);
        elliptic += usize::from(fast);
        serre_ok += usize::from(fast == is_elliptic_brute(t, &gens, len));
    }
    result(
        11,
        member_ok + serre_ok,
        2 * n,
        member_ok == n && serre_ok == n,
        format!("membership {member_ok}/{n}, ellipticity {serre_ok}/{n} ({elliptic} elliptic), words up to length {len}"),
    )
}

fn infinite_distance() -> CriterionResult {
    let named = named_completion_points();
    let (_, x) = named.iter().find(|(n, _)| *n == "rose-a").expect("fixture present");
    let mut cases = 0;
    let mut passes = 0;
    let mut finite = Vec::new();
    for (name, y) in named.iter().filter(|(n, y)| *n != "rose-a" && y.rank() == x.rank()) {
        cases += 1;
        let d = distance_ext(x, y).expect("same rank").factor;
        if d.is_infinite() {
            passes += 1;
        } else {
            finite.push(format!("{name} ({d})"));
        }
    }
    // interior sources: finite, and equal to the candidate maximum
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        cases += 1;
        let z: CompletionPoint = random_point(2, 3, &mut rng).into();
        let d = distance_ext(&z, x).expect("same rank").factor;
        let by_candidates = z
            .graph()
            .candidates()
            .iter()
            .map(|c| {
                let w = c.word.to_word();
                translation_length_ext(x, &w) / z.graph().translation_length(&w)
            })
            .max()
            .expect("candidates exist");
        passes += usize::from(d == StretchFactor::Finite(by_candidates));
    }
    let detail = if finite.is_empty() {
        "INFINITE to every other fixture; interior sources finite".to_string()
    } else {
        format!("finite to: {}", finite.join(", "))
    };
    result(12, passes, cases, passes == cases, detail)
}
