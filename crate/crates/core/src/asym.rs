//! Admissible and Cauchy sequences in an asymmetric metric space, checked on
//! finite windows. Every verdict is about the window and the `ε` schedule
//! given, never about the infinite tail.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed};

use crate::completion::{distance_ext, CompletionPoint};
use crate::error::{Error, Result};
use crate::metric::StretchFactor;
use crate::rational::{cmp_exp, format_q, ln_q, to_f64, Q};

/// A distance value: a rational, the log of a rational factor, or infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AsymDist {
    Value(Q),
    LogOf(Q),
    Infinite,
}

impl AsymDist {
    /// Exact test `d < eps`.
    pub fn lt(&self, eps: &Q) -> bool {
        match self {
            AsymDist::Value(v) => v < eps,
            AsymDist::LogOf(f) => cmp_exp(f, eps) == Ordering::Less,
            AsymDist::Infinite => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            AsymDist::Value(v) => to_f64(v),
            AsymDist::LogOf(f) => ln_q(f),
            AsymDist::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for AsymDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymDist::Value(v) => f.write_str(&format_q(v)),
            AsymDist::LogOf(q) => write!(f, "log({})", format_q(q)),
            AsymDist::Infinite => f.write_str("INFINITE"),
        }
    }
}

pub trait AsymSpace {
    type Point;
    fn dist(&self, x: &Self::Point, y: &Self::Point) -> AsymDist;
}

/// Rationals with `d(x, y) = max(y - x, 2(x - y))`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ToySpace;

impl AsymSpace for ToySpace {
    type Point = Q;
    fn dist(&self, x: &Q, y: &Q) -> AsymDist {
        let up = y - x;
        let down = (x - y) * Q::from_integer(2.into());
        AsymDist::Value(if up > down { up } else { down })
    }
}

/// Completion points under the extended Lipschitz distance.
#[derive(Clone, Copy, Debug, Default)]
pub struct LipschitzSpace;

impl AsymSpace for LipschitzSpace {
    type Point = CompletionPoint;
    fn dist(&self, x: &CompletionPoint, y: &CompletionPoint) -> AsymDist {
        match distance_ext(x, y).map(|d| d.factor) {
            Ok(StretchFactor::Finite(f)) => AsymDist::LogOf(f),
            _ => AsymDist::Infinite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HoldsOnWindow,
    FailsWithWitness,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsOnWindow => "HOLDS_ON_WINDOW",
            Verdict::FailsWithWitness => "FAILS_WITH_WITNESS",
        })
    }
}

/// Thresholds found for one `ε`. Indices are 1-based; `n` holds for all
/// indices above it. `k` lists `(n, K(n, ε))` for admissibility checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsRecord {
    pub eps: Q,
    pub n: usize,
    pub k: Vec<(usize, usize)>,
}

/// `(ε, i, j)` with `d(x_i, x_j) >= ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub eps: Q,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    /// Last index whose tail is probed; half the window.
    pub horizon: usize,
    /// Indices that must stay past `K(n, ε)`: a quarter of the window.
    pub reserve: usize,
    pub records: Vec<EpsRecord>,
    pub witness: Option<Violation>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnWindow
    }
}

fn check_schedule(eps: &[Q]) -> Result<()> {
    if eps.iter().any(|e| !e.is_positive()) || eps.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Precondition("epsilon schedule must be positive and decreasing".into()));
    }
    Ok(())
}

/// Distance matrix, 0-based.
fn matrix<S: AsymSpace>(space: &S, points: &[S::Point]) -> Vec<Vec<AsymDist>> {
    points.iter().map(|x| points.iter().map(|y| space.dist(x, y)).collect()).collect()
}

fn horizon(len: usize) -> usize {
    len / 2
}

fn reserve(len: usize) -> usize {
    ((len - horizon(len)) / 2).max(1)
}

/// Least `N` with `d(x_i, x_j) < ε` for all in-window `j > i > N`. Holds
/// when `N` is below the horizon for every `ε`.
pub fn check_forwards_cauchy<S: AsymSpace>(space: &S, points: &[S::Point], eps: &[Q]) -> Result<Certificate> {
    check_schedule(eps)?;
    Ok(cauchy_on(&matrix(space, points), eps))
}

fn cauchy_on(d: &[Vec<AsymDist>], eps: &[Q]) -> Certificate {
    let len = d.len();
    let h = horizon(len);
    let mut records = Vec::new();
    let mut witness = None;
    for e in eps {
        let mut n = 0;
        let mut worst = None;
        for i in 1..=len {
            for j in i + 1..=len {
                if !d[i - 1][j - 1].lt(e) && i > n {
                    n = i;
                    worst = Some(Violation { eps: e.clone(), i, j });
                }
            }
        }
        if n >= h && witness.is_none() {
            witness = worst;
        }
        records.push(EpsRecord { eps: e.clone(), n, k: vec![] });
    }
    let verdict = if witness.is_none() { Verdict::HoldsOnWindow } else { Verdict::FailsWithWitness };
    Certificate { verdict, horizon: h, reserve: 0, records, witness }
}

/// `K(n, ε)`: least `K >= n` with `d(x_n, x_k) < ε` for every in-window
/// `k > K`, with the violation that fixes it. `n` is usable when `K` is
/// inside the window.
fn k_of(d: &[Vec<AsymDist>], n: usize, e: &Q) -> (usize, Option<usize>) {
    let last_bad = (n + 1..=d.len()).filter(|&k| !d[n - 1][k - 1].lt(e)).max();
    (last_bad.unwrap_or(n), last_bad)
}

/// Admissibility: for `n` past `N(ε)` up to the horizon, `K(n, ε)` leaves
/// at least the reserve of the window to test.
pub fn check_admissible<S: AsymSpace>(space: &S, points: &[S::Point], eps: &[Q]) -> Result<Certificate> {
    check_schedule(eps)?;
    Ok(admissible_on(&matrix(space, points), eps))
}

fn admissible_on(d: &[Vec<AsymDist>], eps: &[Q]) -> Certificate {
    let len = d.len();
    let h = horizon(len);
    let r = reserve(len);
    let mut records = Vec::new();
    let mut witness = None;
    for e in eps {
        let ks: Vec<(usize, usize, Option<usize>)> = (1..=h).map(|n| {
            let (k, bad) = k_of(d, n, e);
            (n, k, bad)
        }).collect();
        let n_eps = ks.iter().filter(|(_, k, _)| *k + r > len).map(|(n, _, _)| *n).max().unwrap_or(0);
        if n_eps >= h && witness.is_none() {
            let (n, _, bad) = ks[h - 1];
            witness = Some(Violation { eps: e.clone(), i: n, j: bad.unwrap_or(len) });
        }
        let k = ks.iter().filter(|(n, _, _)| *n > n_eps).map(|(n, k, _)| (*n, *k)).collect();
        records.push(EpsRecord { eps: e.clone(), n: n_eps, k });
    }
    let verdict = if witness.is_none() && h > 0 { Verdict::HoldsOnWindow } else { Verdict::FailsWithWitness };
    Certificate { verdict, horizon: h, reserve: r, records, witness }
}

/// Indices (1-based) of a Cauchy subsequence for the `2^-j` schedule:
/// `n_1 = N(1) + 1`, `n_{j+1} = max(N(2^-(j+1)), K(n_j, 2^-j)) + 1`, as far
/// as the window reaches.
pub fn extract_cauchy_subsequence<S: AsymSpace>(space: &S, points: &[S::Point]) -> Result<Vec<usize>> {
    let d = matrix(space, points);
    let len = d.len();
    let eps = |j: u32| crate::rational::pow2_inv(j);
    // N over the whole window, so late indices are usable
    let n_of = |e: &Q| -> usize { (1..len).filter(|&n| k_of(&d, n, e).0 >= len).max().unwrap_or(0) };
    let first = n_of(&eps(0)) + 1;
    if first > len {
        return Err(Error::WindowExhausted);
    }
    let mut out = vec![first];
    let mut j = 0;
    loop {
        let last = *out.last().expect("nonempty");
        let (k, _) = k_of(&d, last, &eps(j));
        let next = n_of(&eps(j + 1)).max(k) + 1;
        if next > len || j > 62 {
            break;
        }
        out.push(next);
        j += 1;
    }
    Ok(out)
}

/// Checks `d(x_{n_k}, x_{n_m}) < 2^-j` for all `j < k < m` (1-based `j`).
pub fn verify_subsequence<S: AsymSpace>(space: &S, points: &[S::Point], idx: &[usize]) -> bool {
    (0..idx.len()).all(|k| {
        (k + 1..idx.len()).all(|m| {
            let d = space.dist(&points[idx[k] - 1], &points[idx[m] - 1]);
            (1..=k as u32).all(|j| d.lt(&crate::rational::pow2_inv(j)))
        })
    })
}

/// `z_{2k-1} = a_k`, `z_{2k} = b_k`; the longer tail is appended.
pub fn interlace<P: Clone>(a: &[P], b: &[P]) -> Vec<P> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    for k in 0..a.len().max(b.len()) {
        if let Some(x) = a.get(k) {
            out.push(x.clone());
        }
        if let Some(y) = b.get(k) {
            out.push(y.clone());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum CLimit {
    /// Some `c_n` past the horizon exceeds the bound or is infinite.
    Diverges { n: usize, value: f64 },
    /// `value` is the last `c_n`; spreads are max minus min over the
    /// second half of the window, inner (over `k`) and outer (over `n`).
    Estimate { value: f64, inner_spread: f64, outer_spread: f64, c: Vec<(usize, f64)> },
}

impl CLimit {
    pub fn value(&self) -> Option<f64> {
        match self {
            CLimit::Estimate { value, .. } => Some(*value),
            CLimit::Diverges { .. } => None,
        }
    }
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if v.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// Estimates `lim_n lim_k d(a_n, b_k)`: the inner limit is read at the end
/// of the window, the outer one over the second half of `n`.
pub fn c_limit<S: AsymSpace>(space: &S, a: &[S::Point], b: &[S::Point], bound: f64) -> CLimit {
    let tail_b = b.len() / 2;
    let start_a = a.len() / 2;
    let mut c = Vec::new();
    let mut inner = 0.0f64;
    for (n, x) in a.iter().enumerate().skip(start_a) {
        let row: Vec<f64> = b[tail_b..].iter().map(|y| space.dist(x, y).to_f64()).collect();
        let cn = *row.last().unwrap_or(&0.0);
        if !cn.is_finite() || cn > bound {
            return CLimit::Diverges { n: n + 1, value: cn };
        }
        inner = inner.max(spread(&row));
        c.push((n + 1, cn));
    }
    let outer = spread(&c.iter().map(|p| p.1).collect::<Vec<_>>());
    let value = c.last().map_or(0.0, |p| p.1);
    CLimit::Estimate { value, inner_spread: inner, outer_spread: outer, c }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub verdict: Verdict,
    /// The smallest `ε` of the schedule, the threshold for "approximately zero".
    pub threshold: Q,
    pub forward: CLimit,
    pub backward: CLimit,
    pub interlace: Certificate,
}

impl Equivalence {
    /// Whether the two criteria agree.
    pub fn consistent(&self) -> bool {
        self.interlace.holds() == (self.verdict == Verdict::HoldsOnWindow)
    }
}

/// Both directional limits below the smallest `ε`, cross-checked by the
/// admissibility of the interlaced sequence.
pub fn equivalent<S: AsymSpace>(space: &S, a: &[S::Point], b: &[S::Point], eps: &[Q]) -> Result<Equivalence>
where
    S::Point: Clone,
{
    check_schedule(eps)?;
    let threshold = eps.last().cloned().ok_or_else(|| Error::Precondition("empty epsilon schedule".into()))?;
    let t = to_f64(&threshold);
    let forward = c_limit(space, a, b, f64::INFINITY);
    let backward = c_limit(space, b, a, f64::INFINITY);
    let small = |c: &CLimit| c.value().is_some_and(|v| v.abs() < t);
    let verdict = if small(&forward) && small(&backward) { Verdict::HoldsOnWindow } else { Verdict::FailsWithWitness };
    let interlace = check_admissible(space, &interlace(a, b), eps)?;
    Ok(Equivalence { verdict, threshold, forward, backward, interlace })
}

/// `true` when `N` and `K` only grow as `ε` shrinks.
pub fn records_monotone(cert: &Certificate) -> bool {
    cert.records.windows(2).all(|w| {
        w[0].n <= w[1].n
            && w[0].k.iter().all(|(n, k)| w[1].k.iter().find(|(m, _)| m == n).is_none_or(|(_, k2)| k <= k2))
    })
}

/// Re-checks every record against raw distances.
pub fn certificate_sound<S: AsymSpace>(space: &S, points: &[S::Point], cert: &Certificate, admissible: bool) -> bool {
    let d = matrix(space, points);
    let len = d.len();
    cert.records.iter().all(|r| {
        if admissible {
            r.k.iter().all(|&(n, k)| (k + 1..=len).all(|m| d[n - 1][m - 1].lt(&r.eps)))
        } else {
            (r.n + 1..=len).all(|i| (i + 1..=len).all(|j| d[i - 1][j - 1].lt(&r.eps)))
        }
    }) && cert.witness.as_ref().is_none_or(|w| !d[w.i - 1][w.j - 1].lt(&w.eps))
}

/// Values `1 - 2^-n` for `n = 1..=len`.
pub fn toy_geometric(len: usize) -> Vec<Q> {
    (1..=len as u32).map(|n| Q::one() - crate::rational::pow2_inv(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::approximate_from_interior;
    use crate::fixtures;
    use crate::rational::{pow2_inv, q, qi};
    use proptest::prelude::*;

    fn schedule(j: u32) -> Vec<Q> {
        (0..=j).map(pow2_inv).collect()
    }

    #[test]
    fn toy_distance() {
        assert_eq!(ToySpace.dist(&qi(0), &qi(1)), AsymDist::Value(qi(1)));
        assert_eq!(ToySpace.dist(&qi(1), &qi(0)), AsymDist::Value(qi(2)));
        assert!(AsymDist::LogOf(q(3, 2)).lt(&q(1, 2)));
        assert!(!AsymDist::LogOf(q(3, 2)).lt(&q(2, 5)));
        assert!(!AsymDist::Infinite.lt(&qi(1000)));
    }

    #[test]
    fn constant_sequence() {
        let pts = vec![q(1, 3); 6];
        let c = check_forwards_cauchy(&ToySpace, &pts, &schedule(4)).unwrap();
        assert!(c.holds());
        assert!(c.records.iter().all(|r| r.n == 0));
        assert!(check_admissible(&ToySpace, &pts, &schedule(4)).unwrap().holds());
        assert_eq!(extract_cauchy_subsequence(&ToySpace, &pts).unwrap(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn geometric_sequence() {
        let pts = toy_geometric(24);
        let eps = schedule(8);
        let c = check_forwards_cauchy(&ToySpace, &pts, &eps).unwrap();
        assert!(c.holds());
        // d(x_i, x_j) = 2^-i - 2^-j < 2^-i, and >= 2^-j... so N(2^-k) = k - 1 or k
        for r in &c.records {
            let k = (0..=8).find(|&k| pow2_inv(k) == r.eps).unwrap() as usize;
            assert!(r.n + 1 >= k && r.n <= k, "{k} {}", r.n);
        }
        assert!(certificate_sound(&ToySpace, &pts, &c, false));
        assert!(records_monotone(&c));
        let a = check_admissible(&ToySpace, &pts, &eps).unwrap();
        assert!(a.holds() && certificate_sound(&ToySpace, &pts, &a, true) && records_monotone(&a));
    }

    #[test]
    fn geometric_subsequence_follows_recurrence() {
        let pts = toy_geometric(20);
        let idx = extract_cauchy_subsequence(&ToySpace, &pts).unwrap();
        // hand recurrence: d(x_n, x_k) < 2^-j for all later k iff n >= j, so
        // N(2^-j) = j - 1 and K(n, 2^-j) = n once n >= j
        let mut expected = vec![1];
        let mut j = 0usize;
        loop {
            let next = j.max(expected[j]) + 1;
            if next > 20 {
                break;
            }
            expected.push(next);
            j += 1;
        }
        assert_eq!(idx, expected);
        assert!(verify_subsequence(&ToySpace, &pts, &idx));
    }

    #[test]
    fn alternating_fails() {
        let pts: Vec<Q> = (0..12).map(|i| qi(i % 2)).collect();
        let c = check_forwards_cauchy(&ToySpace, &pts, &schedule(2)).unwrap();
        assert_eq!(c.verdict, Verdict::FailsWithWitness);
        assert!(certificate_sound(&ToySpace, &pts, &c, false));
        let a = check_admissible(&ToySpace, &pts, &schedule(2)).unwrap();
        assert_eq!(a.verdict, Verdict::FailsWithWitness);
        assert!(certificate_sound(&ToySpace, &pts, &a, true));
    }

    #[test]
    fn interlace_basics() {
        let a = vec![qi(1), qi(2), qi(3)];
        assert_eq!(interlace(&a, &a), vec![qi(1), qi(1), qi(2), qi(2), qi(3), qi(3)]);
        assert_eq!(interlace(&a, &a[..1]).len(), 4);
    }

    #[test]
    fn toy_equivalence() {
        let a = toy_geometric(24);
        let shifted: Vec<Q> = a[1..].to_vec();
        let e = equivalent(&ToySpace, &a, &shifted, &schedule(6)).unwrap();
        assert_eq!(e.verdict, Verdict::HoldsOnWindow);
        assert!(e.consistent());
        let far: Vec<Q> = a.iter().map(|x| x + qi(1)).collect();
        let e = equivalent(&ToySpace, &a, &far, &schedule(6)).unwrap();
        assert_eq!(e.verdict, Verdict::FailsWithWitness);
        assert!(e.consistent());
        assert_eq!(c_limit(&ToySpace, &a, &a, 10.0).value(), Some(0.0));
    }

    fn approximations(t: &CompletionPoint, len: u32) -> Vec<CompletionPoint> {
        (1..=len).map(|i| approximate_from_interior(t, &pow2_inv(i)).unwrap().into()).collect()
    }

    #[test]
    fn pinch_window_is_admissible() {
        let x = fixtures::rose_q(&[(1, 2), (1, 2)]);
        let sched: Vec<Q> = (1..=16).map(pow2_inv).collect();
        let seq: Vec<CompletionPoint> = crate::completion::pinch_sequence(&x, &[1].into(), &sched)
            .unwrap()
            .into_iter()
            .map(Into::into)
            .collect();
        let eps = schedule(6);
        assert!(check_forwards_cauchy(&LipschitzSpace, &seq, &eps).unwrap().holds());
        assert!(check_admissible(&LipschitzSpace, &seq, &eps).unwrap().holds());
        let idx = extract_cauchy_subsequence(&LipschitzSpace, &seq).unwrap();
        assert!(idx.len() >= 3 && verify_subsequence(&LipschitzSpace, &seq, &idx));
        // not backwards Cauchy: reversed window fails
        let rev: Vec<CompletionPoint> = seq.iter().rev().cloned().collect();
        assert!(!check_forwards_cauchy(&LipschitzSpace, &rev, &eps).unwrap().holds());
    }

    #[test]
    fn c_limit_tracks_extended_distance() {
        let s = fixtures::rose_point(&[qi(1), qi(0)]);
        let t = fixtures::free_product_ab();
        let a = approximations(&s, 14);
        let b = approximations(&t, 14);
        let v = c_limit(&LipschitzSpace, &a, &b, 100.0).value().unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-3, "{v}");
        let other = approximations(&fixtures::rose_point(&[qi(0), qi(1)]), 14);
        assert!(matches!(c_limit(&LipschitzSpace, &a, &other, 5.0), CLimit::Diverges { .. }));
        let e = equivalent(&LipschitzSpace, &a, &other, &schedule(4)).unwrap();
        assert_eq!(e.verdict, Verdict::FailsWithWitness);
        let e = equivalent(&LipschitzSpace, &a, &a[1..], &schedule(4)).unwrap();
        assert_eq!(e.verdict, Verdict::HoldsOnWindow);
        assert!(e.consistent());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn toy_certificates_sound(vals in proptest::collection::vec(-8i64..8, 4..14), denom in 1i64..6) {
            let pts: Vec<Q> = vals.iter().map(|&v| q(v, denom)).collect();
            let eps = schedule(4);
            let c = check_forwards_cauchy(&ToySpace, &pts, &eps).unwrap();
            prop_assert!(certificate_sound(&ToySpace, &pts, &c, false));
            prop_assert!(records_monotone(&c));
            let a = check_admissible(&ToySpace, &pts, &eps).unwrap();
            prop_assert!(certificate_sound(&ToySpace, &pts, &a, true));
            prop_assert!(records_monotone(&a));
            if c.holds() {
                prop_assert!(a.holds());
            }
        }

        #[test]
        fn toy_subsequence_guarantee(len in 6usize..30, start in -4i64..4) {
            let pts: Vec<Q> = toy_geometric(len).into_iter().map(|x| x + qi(start)).collect();
            let idx = extract_cauchy_subsequence(&ToySpace, &pts).unwrap();
            prop_assert!(verify_subsequence(&ToySpace, &pts, &idx));
        }
    }
}
