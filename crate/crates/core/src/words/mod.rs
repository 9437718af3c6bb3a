//! Words in a free group of fixed rank over the basis `a, b, c, ...`.
//!
//! Lowercase letters are generators and uppercase letters their inverses, so
//! `"abA"` is `a b a^-1`. Letters are ordered `a < A < b < B < ...`, which is
//! the order used for canonical cyclic words and witness tie-breaking.

mod endo;
mod stallings;

use std::cmp::Ordering;
use std::fmt;

pub use endo::{EndoMap, NielsenMove};
pub use stallings::{stallings_graph, SubgroupGraph};

use crate::error::{Error, Result};

/// Largest supported rank (letters `a..z`).
pub const MAX_RANK: usize = 26;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < MAX_RANK);
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Dense index `2*generator + inverse`, handy for tables.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_char(c: char) -> Option<Self> {
        if c.is_ascii_lowercase() {
            Some(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Some(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            None
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A (not necessarily reduced) word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn generator(i: usize) -> Self {
        Word(vec![Letter::new(i, false)])
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '1')
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Parses and checks that every letter lies within `rank`.
    pub fn parse_in_rank(s: &str, rank: usize) -> Result<Self> {
        let w = Word::parse(s)?;
        w.check_rank(rank)?;
        Ok(w)
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.0.iter().find(|l| l.generator() >= rank) {
            Some(l) => Err(Error::RankExceeded { letter: l.to_char(), rank }),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    /// Free reduction with a single stack pass.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).reduce()
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v).reduce()
    }

    /// Cyclic reduction: returns `(c, u)` with `self = u c u^-1` after free
    /// reduction and `c` in canonical rotation.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let r = self.reduce().0;
        let mut lo = 0;
        let mut hi = r.len();
        while hi - lo >= 2 && r[lo] == r[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        let core = &r[lo..hi];
        let k = least_rotation(core);
        // core = p s with |p| = k, canonical = s p, self = (u p)(s p)(u p)^-1
        let mut canon = core[k..].to_vec();
        canon.extend_from_slice(&core[..k]);
        let mut conj = r[..lo].to_vec();
        conj.extend_from_slice(&core[..k]);
        (CyclicWord(canon), Word(conj).reduce())
    }

    pub fn to_cyclic(&self) -> CyclicWord {
        self.cyclic_reduce().0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Index of the lexicographically least rotation (naive; words are short).
fn least_rotation(w: &[Letter]) -> usize {
    let n = w.len();
    let mut best = 0;
    for k in 1..n {
        let cmp = (0..n)
            .map(|i| w[(k + i) % n].cmp(&w[(best + i) % n]))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal);
        if cmp == Ordering::Less {
            best = k;
        }
    }
    best
}

/// A conjugacy class, stored as its cyclically reduced least rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn inverse(&self) -> CyclicWord {
        self.to_word().inverse().to_cyclic()
    }

    /// The lesser of the class and its inverse; identifies an unoriented loop.
    pub fn unoriented(&self) -> CyclicWord {
        let inv = self.inverse();
        if inv.shortlex_cmp(self) == Ordering::Less {
            inv
        } else {
            self.clone()
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Word::parse(s)?.to_cyclic())
    }

    /// Length first, then lexicographic in the letter order.
    pub fn shortlex_cmp(&self, other: &CyclicWord) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclic({self})")
    }
}
