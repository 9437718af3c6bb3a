//! The asymmetric Lipschitz metric, as exact multiplicative stretch factors.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::marked_graph::{CandidateKind, MarkedGraph};
use crate::rational::{display_log, format_q, ln_q, Q};
use crate::words::{CyclicWord, Word};

/// `e^d` for a distance `d`; `Infinite` is larger than every finite value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StretchFactor {
    Finite(Q),
    Infinite,
}

impl StretchFactor {
    pub fn one() -> Self {
        StretchFactor::Finite(Q::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, StretchFactor::Infinite)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            StretchFactor::Finite(q) => Some(q),
            StretchFactor::Infinite => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.finite().is_some_and(|q| q.is_one())
    }

    /// Natural log, rounded to twelve significant digits.
    pub fn log(&self) -> f64 {
        match self {
            StretchFactor::Finite(q) if q.is_zero() => f64::NEG_INFINITY,
            StretchFactor::Finite(q) => display_log(ln_q(q)),
            StretchFactor::Infinite => f64::INFINITY,
        }
    }

    pub fn mul(&self, other: &StretchFactor) -> StretchFactor {
        match (self, other) {
            (StretchFactor::Finite(a), StretchFactor::Finite(b)) => StretchFactor::Finite(a * b),
            _ => StretchFactor::Infinite,
        }
    }
}

impl PartialOrd for StretchFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StretchFactor {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (StretchFactor::Finite(a), StretchFactor::Finite(b)) => a.cmp(b),
            (StretchFactor::Finite(_), StretchFactor::Infinite) => Ordering::Less,
            (StretchFactor::Infinite, StretchFactor::Finite(_)) => Ordering::Greater,
            (StretchFactor::Infinite, StretchFactor::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for StretchFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StretchFactor::Finite(q) => f.write_str(&format_q(q)),
            StretchFactor::Infinite => f.write_str("INFINITE"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub word: CyclicWord,
    pub kind: CandidateKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult {
    pub factor: StretchFactor,
    pub witness: Option<Witness>,
}

pub fn stretch(x: &MarkedGraph, y: &MarkedGraph, w: &Word) -> Result<Q> {
    if w.to_cyclic().is_empty() {
        return Err(Error::IdentityWord);
    }
    Ok(y.translation_length(w) / x.translation_length(w))
}

fn same_rank(x: &MarkedGraph, y: &MarkedGraph) -> Result<()> {
    if x.rank() != y.rank() {
        return Err(Error::RankMismatch { expected: x.rank(), found: y.rank() });
    }
    Ok(())
}

/// Maximal stretch over the candidates of `x`; the first maximizer in
/// canonical word order is the witness.
pub fn distance(x: &MarkedGraph, y: &MarkedGraph) -> Result<DistanceResult> {
    same_rank(x, y)?;
    let mut best: Option<(Q, Witness)> = None;
    for c in x.candidates() {
        let w = c.word.to_word();
        let r = y.translation_length(&w) / x.translation_length(&w);
        if best.as_ref().is_none_or(|(b, _)| &r > b) {
            best = Some((r, Witness { word: c.word, kind: c.kind }));
        }
    }
    let (factor, witness) = best.ok_or_else(|| Error::Internal("graph has no candidate loops".into()))?;
    Ok(DistanceResult { factor: StretchFactor::Finite(factor), witness: Some(witness) })
}

/// Product of the two directed factors.
pub fn sym_distance(x: &MarkedGraph, y: &MarkedGraph) -> Result<StretchFactor> {
    Ok(distance(x, y)?.factor.mul(&distance(y, x)?.factor))
}
