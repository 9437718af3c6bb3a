use std::fmt;

use rand::Rng;

use super::{stallings_graph, Letter, Word};
use crate::error::{Error, Result};

/// An endomorphism of `F_n`, given by the images of the basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EndoMap {
    images: Vec<Word>,
}

/// Elementary Nielsen transformations of the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NielsenMove {
    /// `x_i -> x_i x_j^{±1}`
    RightMul { i: usize, j: usize, inverse: bool },
    /// `x_i -> x_j^{±1} x_i`
    LeftMul { i: usize, j: usize, inverse: bool },
    /// `x_i -> x_i^-1`
    Invert { i: usize },
    /// swap `x_i` and `x_j`
    Swap { i: usize, j: usize },
}

impl EndoMap {
    pub fn new(images: Vec<Word>) -> Self {
        EndoMap { images: images.into_iter().map(|w| w.reduce()).collect() }
    }

    pub fn identity(rank: usize) -> Self {
        EndoMap { images: (0..rank).map(Word::generator).collect() }
    }

    /// Parses `"ab,b"` style image lists (one word per generator).
    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        let images = s
            .split(',')
            .map(|p| Word::parse_in_rank(p.trim(), rank))
            .collect::<Result<Vec<_>>>()?;
        if images.len() != rank {
            return Err(Error::RankMismatch { expected: rank, found: images.len() });
        }
        Ok(EndoMap::new(images))
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.generator()];
            if l.is_inverse() {
                out.extend(img.letters().iter().rev().map(|x| x.inverse()));
            } else {
                out.extend_from_slice(img.letters());
            }
        }
        Word::from_letters(out).reduce()
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &EndoMap) -> EndoMap {
        EndoMap { images: other.images.iter().map(|w| self.apply(w)).collect() }
    }

    pub fn elementary(rank: usize, mv: NielsenMove) -> EndoMap {
        let mut images: Vec<Word> = (0..rank).map(Word::generator).collect();
        match mv {
            NielsenMove::RightMul { i, j, inverse } => {
                images[i] = Word::from_letters(vec![Letter::new(i, false), Letter::new(j, inverse)]);
            }
            NielsenMove::LeftMul { i, j, inverse } => {
                images[i] = Word::from_letters(vec![Letter::new(j, inverse), Letter::new(i, false)]);
            }
            NielsenMove::Invert { i } => images[i] = Word::from_letters(vec![Letter::new(i, true)]),
            NielsenMove::Swap { i, j } => images.swap(i, j),
        }
        EndoMap { images }
    }

    /// Every elementary Nielsen move of the given rank.
    pub fn nielsen_moves(rank: usize) -> Vec<NielsenMove> {
        let mut moves = Vec::new();
        for i in 0..rank {
            moves.push(NielsenMove::Invert { i });
            for j in 0..rank {
                if i == j {
                    continue;
                }
                for inverse in [false, true] {
                    moves.push(NielsenMove::RightMul { i, j, inverse });
                    moves.push(NielsenMove::LeftMul { i, j, inverse });
                }
                if i < j {
                    moves.push(NielsenMove::Swap { i, j });
                }
            }
        }
        moves
    }

    /// Product of `len` uniformly chosen elementary Nielsen moves.
    pub fn random_automorphism<R: Rng + ?Sized>(rank: usize, len: usize, rng: &mut R) -> EndoMap {
        let moves = Self::nielsen_moves(rank);
        let mut phi = EndoMap::identity(rank);
        for _ in 0..len {
            let mv = moves[rng.gen_range(0..moves.len())];
            phi = phi.compose(&EndoMap::elementary(rank, mv));
        }
        phi
    }

    /// Inner automorphism `w -> u w u^-1`.
    pub fn inner(rank: usize, u: &Word) -> EndoMap {
        let ui = u.inverse();
        EndoMap { images: (0..rank).map(|i| u.mul(&Word::generator(i)).mul(&ui)).collect() }
    }

    /// Exact test: the images generate `F_n` iff their folded graph is the
    /// rose with `n` petals, and `n` generators of `F_n` form a basis.
    pub fn is_automorphism(&self) -> bool {
        let g = stallings_graph(self.rank(), &self.images);
        g.vertex_count() == 1 && g.edge_count() == self.rank()
    }

    /// Inverse of an automorphism by Nielsen reduction of the image tuple.
    ///
    /// Moves `t_i <- t_i t_j^±1` and `t_i <- t_j^±1 t_i` are applied to the
    /// tuple `t` and, in parallel, to words `u` with `self(u_i) = t_i`. When no
    /// move shortens the tuple, a breadth-first search over tuples of the same
    /// total length finds one that can be shortened. A basis ends as a
    /// permuted, inverted basis, at which point the `u_i` spell out the inverse.
    pub fn invert(&self) -> Result<EndoMap> {
        if !self.is_automorphism() {
            return Err(Error::NotAnAutomorphism(format!("images {self} do not form a basis")));
        }
        let n = self.rank();
        let mut t: Vec<Word> = self.images.clone();
        let mut u: Vec<Word> = (0..n).map(Word::generator).collect();
        while t.iter().any(|w| w.len() > 1) {
            if let Some(((nt, nu), _)) = best_move(&t, &u) {
                t = nt;
                u = nu;
                continue;
            }
            let (nt, nu) = plateau_search(&t, &u)
                .ok_or_else(|| Error::Internal(format!("Nielsen reduction stalled at {}", tuple_string(&t))))?;
            t = nt;
            u = nu;
        }
        let mut inverse: Vec<Option<Word>> = vec![None; n];
        for (ti, ui) in t.iter().zip(&u) {
            let l = ti.letters()[0];
            inverse[l.generator()] = Some(if l.is_inverse() { ui.inverse() } else { ui.clone() });
        }
        inverse
            .into_iter()
            .map(|w| w.ok_or_else(|| Error::Internal("reduced basis is not a permuted basis".into())))
            .collect::<Result<Vec<_>>>()
            .map(|images| EndoMap { images })
    }
}

type Tuple = (Vec<Word>, Vec<Word>);

fn total(t: &[Word]) -> usize {
    t.iter().map(Word::len).sum()
}

/// All one-step Nielsen products of the tuple, with their total length.
fn neighbours(t: &[Word], u: &[Word]) -> Vec<(Tuple, usize)> {
    let n = t.len();
    let base = total(t);
    let mut out = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            for inv in [false, true] {
                let (tj, uj) = if inv { (t[j].inverse(), u[j].inverse()) } else { (t[j].clone(), u[j].clone()) };
                for left in [false, true] {
                    let (ti, ui) = if left { (tj.mul(&t[i]), uj.mul(&u[i])) } else { (t[i].mul(&tj), u[i].mul(&uj)) };
                    let len = base - t[i].len() + ti.len();
                    let mut nt = t.to_vec();
                    let mut nu = u.to_vec();
                    nt[i] = ti;
                    nu[i] = ui;
                    out.push(((nt, nu), len));
                }
            }
        }
    }
    out
}

/// The strictly shortening move with the largest gain, first found on ties.
fn best_move(t: &[Word], u: &[Word]) -> Option<(Tuple, usize)> {
    let base = total(t);
    let mut best: Option<(Tuple, usize)> = None;
    for (cand, len) in neighbours(t, u) {
        if len < base && best.as_ref().is_none_or(|b| len < b.1) {
            best = Some((cand, len));
        }
    }
    best
}

fn plateau_search(t: &[Word], u: &[Word]) -> Option<Tuple> {
    const LIMIT: usize = 200_000;
    let base = total(t);
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    seen.insert(t.to_vec());
    queue.push_back((t.to_vec(), u.to_vec()));
    while let Some((ct, cu)) = queue.pop_front() {
        for ((nt, nu), len) in neighbours(&ct, &cu) {
            if len < base {
                return Some((nt, nu));
            }
            if len == base && seen.len() < LIMIT && seen.insert(nt.clone()) {
                queue.push_back((nt, nu));
            }
        }
    }
    None
}

fn tuple_string(t: &[Word]) -> String {
    t.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
}

impl EndoMap {
    /// `Some(u)` when `self` is conjugation `w -> u w u^-1`. For rank one the
    /// conjugator is not unique and the empty word is returned.
    pub fn inner_conjugator(&self) -> Option<Word> {
        let n = self.rank();
        if n == 0 {
            return Some(Word::empty());
        }
        let (c, v) = self.images[0].cyclic_reduce();
        if c.to_word() != Word::generator(0) {
            return None;
        }
        // u = v a^k for some k; read k off the conjugated second image
        let vi = v.inverse();
        let mut u = v.clone();
        if n > 1 {
            let z = vi.mul(&self.images[1]).mul(&v);
            let a = Letter::new(0, false);
            let lead = z.letters().iter().take_while(|l| l.generator() == 0).count();
            let k = if lead == 0 {
                0
            } else if z.letters()[0] == a {
                lead as i64
            } else {
                -(lead as i64)
            };
            u = v.mul(&Word::generator(0).pow(k));
        }
        let ui = u.inverse();
        (0..n).all(|i| u.mul(&Word::generator(i)).mul(&ui) == self.images[i]).then_some(u)
    }

    /// Images as a comma separated list, the syntax `parse` accepts.
    pub fn images_string(&self) -> String {
        tuple_string(&self.images)
    }
}

impl fmt::Display for EndoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}↦{}", Letter::new(i, false).to_char(), if w.is_empty() { "1".to_string() } else { w.to_string() })?;
        }
        Ok(())
    }
}

impl fmt::Debug for EndoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EndoMap({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = EndoMap::identity(2);
        assert_eq!(id.apply(&w("abBa")), w("aa"));
        let phi = EndoMap::parse("ab,b", 2).unwrap();
        assert_eq!(phi.apply(&w("aB")), w("a"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(EndoMap::identity(3).invert().unwrap(), EndoMap::identity(3));
        let phi = EndoMap::parse("ab,b", 2).unwrap();
        assert_eq!(phi.invert().unwrap(), EndoMap::parse("aB,b", 2).unwrap());
        let rot = EndoMap::parse("b,A", 2).unwrap();
        let inv = rot.invert().unwrap();
        assert_eq!(inv.compose(&rot), EndoMap::identity(2));
        assert_eq!(rot.compose(&inv), EndoMap::identity(2));
    }

    #[test]
    fn non_automorphisms_rejected() {
        for s in ["aa,b", "ab,ab", "abAB,b", "a,a", "1,b"] {
            let phi = EndoMap::parse(s, 2).unwrap();
            assert!(matches!(phi.invert(), Err(Error::NotAnAutomorphism(_))), "{s}");
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rank = rng.gen_range(2..=3);
            let phi = EndoMap::random_automorphism(rank, 6, &mut rng);
            let psi = EndoMap::random_automorphism(rank, 6, &mut rng);
            let word = Word::from_letters(
                (0..rng.gen_range(0..12)).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen())).collect(),
            );
            assert_eq!(phi.compose(&psi).apply(&word), phi.apply(&psi.apply(&word)));
        }
    }

    #[test]
    fn every_elementary_move_inverts() {
        for rank in 2..=4 {
            for mv in EndoMap::nielsen_moves(rank) {
                let phi = EndoMap::elementary(rank, mv);
                let inv = phi.invert().unwrap();
                assert_eq!(inv.compose(&phi), EndoMap::identity(rank), "{mv:?}");
                assert_eq!(phi.compose(&inv), EndoMap::identity(rank), "{mv:?}");
            }
        }
    }

    #[test]
    fn inner_conjugators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rank = rng.gen_range(2..=3);
            let u = Word::from_letters(
                (0..rng.gen_range(0..8)).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen())).collect(),
            )
            .reduce();
            let got = EndoMap::inner(rank, &u).inner_conjugator().unwrap();
            assert_eq!(EndoMap::inner(rank, &got), EndoMap::inner(rank, &u));
        }
        assert!(EndoMap::parse("ab,b", 2).unwrap().inner_conjugator().is_none());
        assert!(EndoMap::parse("a,aba", 2).unwrap().inner_conjugator().is_none());
    }

    #[test]
    fn random_products_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for len in [3, 10, 25] {
            for _ in 0..200 {
                let rank = rng.gen_range(2..=4);
                let phi = EndoMap::random_automorphism(rank, len, &mut rng);
                let inv = phi.invert().unwrap_or_else(|e| panic!("{phi}: {e}"));
                assert_eq!(inv.compose(&phi), EndoMap::identity(rank));
                assert_eq!(phi.compose(&inv), EndoMap::identity(rank));
            }
        }
    }
}
