//! Brute-force oracles shared by the test suites and `osx verify`.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::completion::{translation_length_ext, CompletionPoint};
use crate::marked_graph::MarkedGraph;
use crate::rational::Q;
use crate::words::{CyclicWord, Letter, SubgroupGraph, Word};

/// Translation lengths of a growing word, tracked by a stack of directed
/// edges with an undo log. Lengths are integers over a common denominator.
struct Tracker {
    /// Edge-path image per letter index, directed edges coded `2e + reversed`.
    images: Vec<Vec<u32>>,
    len: Vec<i64>,
    stack: Vec<u32>,
    sum: i64,
    log: Vec<Option<u32>>,
}

impl Tracker {
    fn new(x: &MarkedGraph) -> (Self, BigInt) {
        let lengths = x.lengths();
        let den = lengths.iter().fold(BigInt::one(), |acc, l| acc.lcm(l.denom()));
        let len = lengths
            .iter()
            .map(|l| (l.numer() * (&den / l.denom())).to_i64().expect("scaled lengths fit in i64"))
            .collect();
        let code = |d: &crate::marked_graph::DirEdge| (d.edge as u32) << 1 | d.reversed as u32;
        let mut images = Vec::new();
        for i in 0..2 * x.rank() {
            let l = Letter::new(i / 2, i % 2 == 1);
            images.push(x.image_path(&Word::from_letters(vec![l])).iter().map(code).collect());
        }
        (Tracker { images, len, stack: Vec::new(), sum: 0, log: Vec::new() }, den)
    }

    fn push(&mut self, letter: usize) -> usize {
        let mark = self.log.len();
        for k in 0..self.images[letter].len() {
            let c = self.images[letter][k];
            if self.stack.last() == Some(&(c ^ 1)) {
                self.stack.pop();
                self.sum -= self.len[(c >> 1) as usize];
                self.log.push(Some(c ^ 1));
            } else {
                self.stack.push(c);
                self.sum += self.len[(c >> 1) as usize];
                self.log.push(None);
            }
        }
        mark
    }

    fn undo(&mut self, mark: usize) {
        while self.log.len() > mark {
            match self.log.pop().unwrap() {
                None => {
                    let c = self.stack.pop().unwrap();
                    self.sum -= self.len[(c >> 1) as usize];
                }
                Some(c) => {
                    self.stack.push(c);
                    self.sum += self.len[(c >> 1) as usize];
                }
            }
        }
    }

    fn cyclic_length(&self) -> i64 {
        let s = &self.stack;
        let n = s.len();
        let mut total = self.sum;
        let mut i = 0;
        while 2 * i + 1 < n && s[i] == s[n - 1 - i] ^ 1 {
            total -= 2 * self.len[(s[i] >> 1) as usize];
            i += 1;
        }
        total
    }
}

/// Result of an exhaustive search over conjugacy classes.
#[derive(Clone, Debug)]
pub struct BruteMax {
    pub factor: Q,
    pub word: CyclicWord,
    /// Number of primitive classes examined.
    pub classes: u64,
}

struct Search<'a> {
    n_letters: usize,
    max_len: usize,
    word: Vec<usize>,
    tx: Tracker,
    ty: Tracker,
    best: Option<(i64, i64, Vec<usize>)>,
    classes: u64,
    visit: &'a mut dyn FnMut(&[usize]),
}

impl Search<'_> {
    /// FKM generation of prenecklaces restricted to freely reduced words;
    /// a prefix with period equal to its length is a Lyndon word.
    fn extend(&mut self, t: usize, p: usize) {
        if t > 0 && p == t && self.word[0] != self.word[t - 1] ^ 1 {
            self.classes += 1;
            (self.visit)(&self.word);
            let (lx, ly) = (self.tx.cyclic_length(), self.ty.cyclic_length());
            let better = match &self.best {
                None => true,
                Some((bx, by, _)) => (ly as i128) * (*bx as i128) > (*by as i128) * (lx as i128),
            };
            if better {
                self.best = Some((lx, ly, self.word.clone()));
            }
        }
        if t == self.max_len {
            return;
        }
        let lo = if t == 0 { 0 } else { self.word[t - p] };
        for c in lo..self.n_letters {
            if t > 0 && c == self.word[t - 1] ^ 1 {
                continue;
            }
            let np = if t > 0 && c == self.word[t - p] { p } else { t + 1 };
            let (mx, my) = (self.tx.push(c), self.ty.push(c));
            self.word.push(c);
            self.extend(t + 1, np);
            self.word.pop();
            self.tx.undo(mx);
            self.ty.undo(my);
        }
    }
}

/// `max l(w,y)/l(w,x)` over every nontrivial conjugacy class with a
/// cyclically reduced representative of length at most `max_len`.
pub fn max_stretch_brute(x: &MarkedGraph, y: &MarkedGraph, max_len: usize) -> BruteMax {
    max_stretch_brute_visit(x, y, max_len, &mut |_| {})
}

pub fn max_stretch_brute_visit(x: &MarkedGraph, y: &MarkedGraph, max_len: usize, visit: &mut dyn FnMut(&[usize])) -> BruteMax {
    assert_eq!(x.rank(), y.rank());
    let (tx, dx) = Tracker::new(x);
    let (ty, dy) = Tracker::new(y);
    let mut s = Search { n_letters: 2 * x.rank(), max_len, word: Vec::new(), tx, ty, best: None, classes: 0, visit };
    s.extend(0, 1);
    let (lx, ly, w) = s.best.expect("max_len >= 1");
    let factor = Q::new(BigInt::from(ly) * &dx, BigInt::from(lx) * &dy);
    let word = Word::from_letters(w.iter().map(|&i| Letter::new(i / 2, i % 2 == 1)).collect()).to_cyclic().unoriented();
    BruteMax { factor, word, classes: s.classes }
}

/// Reduced words packed six bits per letter, last letter lowest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Packed {
    bits: u128,
    len: usize,
}

const PACK_LIMIT: usize = 21;

impl Packed {
    fn pack(w: &Word) -> Self {
        let bits = w.letters().iter().fold(0u128, |acc, l| acc << 6 | (l.index() as u128 + 1));
        Packed { bits, len: w.len() }
    }

    fn last(self) -> Option<usize> {
        (self.len > 0).then(|| (self.bits & 63) as usize - 1)
    }

    fn mul(mut self, g: &[usize]) -> Self {
        for &i in g {
            if self.last() == Some(i ^ 1) {
                self.bits >>= 6;
                self.len -= 1;
            } else {
                self.bits = self.bits << 6 | (i as u128 + 1);
                self.len += 1;
            }
        }
        self
    }
}

/// Elements reachable from the identity by right multiplication with
/// generators or inverses without leaving the ball of the given radius.
/// `radius` is capped so words fit the packed form.
fn packed_closure(gens: &[Word], radius: usize) -> FxHashSet<u128> {
    let radius = radius.min(PACK_LIMIT);
    let mut pool: Vec<Vec<usize>> = Vec::new();
    for g in gens.iter().map(Word::reduce).filter(|g| !g.is_empty()) {
        pool.push(g.letters().iter().map(|l| l.index()).collect());
        pool.push(g.inverse().letters().iter().map(|l| l.index()).collect());
    }
    let start = Packed { bits: 0, len: 0 };
    let mut seen = FxHashSet::default();
    seen.insert(0u128);
    let mut frontier = vec![start];
    while let Some(x) = frontier.pop() {
        for g in &pool {
            let p = x.mul(g);
            if p.len <= radius && seen.insert(p.bits) {
                frontier.push(p);
            }
        }
    }
    seen
}

pub fn bounded_closure(gens: &[Word], radius: usize) -> BTreeSet<Word> {
    packed_closure(gens, radius)
        .into_iter()
        .map(|mut bits| {
            let mut letters = Vec::new();
            while bits != 0 {
                let i = (bits & 63) as usize - 1;
                letters.push(Letter::new(i / 2, i % 2 == 1));
                bits >>= 6;
            }
            letters.reverse();
            Word::from_letters(letters)
        })
        .collect()
}

/// All freely reduced words of length at most `max_len`.
pub fn all_reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..2 * rank {
                let l = Letter::new(i / 2, i % 2 == 1);
                if w.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.letters().to_vec();
                v.push(l);
                next.push(Word::from_letters(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Disagreements between graph membership and the bounded closure, over
/// words of length at most `max_len`.
pub fn membership_disagreements(h: &SubgroupGraph, gens: &[Word], max_len: usize) -> Vec<Word> {
    let margin = 2 * gens.iter().map(Word::len).max().unwrap_or(0);
    let closure = packed_closure(gens, max_len + margin);
    all_reduced_words(h.rank(), max_len)
        .into_iter()
        .filter(|w| h.contains(w) != closure.contains(&Packed::pack(w).bits))
        .collect()
}

/// Every product of at most `max_len` generators and inverses has length
/// zero in `t`.
pub fn is_elliptic_brute(t: &CompletionPoint, gens: &[Word], max_len: usize) -> bool {
    all_reduced_words(gens.len(), max_len).iter().all(|u| {
        let w = u.letters().iter().fold(Word::empty(), |acc, l| {
            let g = &gens[l.generator()];
            acc.mul(&if l.is_inverse() { g.inverse() } else { g.clone() })
        });
        translation_length_ext(t, &w).is_zero()
    })
}
