//! Stallings graphs of finitely generated subgroups.

use super::{Letter, Word};

/// Folded, labelled graph whose loops at vertex 0 read a subgroup.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    rank: usize,
    /// `adj[v][letter.index()]` is the endpoint of the unique edge reading `letter`.
    adj: Vec<Vec<Option<usize>>>,
}

/// Union-find over vertices; adjacency entries may name stale vertices and
/// are resolved through `find`.
struct Folder {
    rank: usize,
    parent: Vec<usize>,
    adj: Vec<Vec<Option<usize>>>,
}

impl Folder {
    fn new(rank: usize) -> Self {
        Folder { rank, parent: vec![0], adj: vec![vec![None; 2 * rank]] }
    }

    fn add_vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push(vec![None; 2 * self.rank]);
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn set_half(&mut self, u: usize, l: Letter, v: usize, queue: &mut Vec<(usize, usize)>) {
        match self.adj[u][l.index()] {
            Some(existing) => queue.push((existing, v)),
            None => self.adj[u][l.index()] = Some(v),
        }
    }

    fn add_edge(&mut self, u: usize, l: Letter, v: usize) {
        let mut queue = Vec::new();
        let (u, v) = (self.find(u), self.find(v));
        self.set_half(u, l, v, &mut queue);
        self.set_half(v, l.inverse(), u, &mut queue);
        while let Some((a, b)) = queue.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.parent[drop] = keep;
            let moved = std::mem::take(&mut self.adj[drop]);
            for (k, t) in moved.into_iter().enumerate() {
                if let Some(t) = t {
                    self.set_half(keep, Letter(k as u8), t, &mut queue);
                }
            }
        }
    }

    fn add_loop(&mut self, w: &Word) {
        let n = w.len();
        let mut cur = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            let c = self.find(cur);
            let next = if i + 1 == n {
                0
            } else {
                match self.adj[c][l.index()] {
                    Some(t) => t,
                    None => self.add_vertex(),
                }
            };
            self.add_edge(c, l, next);
            cur = next;
        }
    }

    fn finish(mut self) -> SubgroupGraph {
        let n = self.adj.len();
        let roots: Vec<usize> = (0..n).map(|v| self.find(v)).collect();
        let mut index = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            if roots[v] == v {
                index[v] = count;
                count += 1;
            }
        }
        let mut adj = vec![vec![None; 2 * self.rank]; count];
        for v in (0..n).filter(|&v| roots[v] == v) {
            for (k, t) in self.adj[v].iter().enumerate() {
                adj[index[v]][k] = t.map(|t| index[roots[t]]);
            }
        }
        let mut g = SubgroupGraph { rank: self.rank, adj };
        g.prune(true);
        g
    }
}

impl SubgroupGraph {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of unoriented edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.iter().flatten().count()).sum::<usize>() / 2
    }

    /// Rank of the subgroup (first Betti number).
    pub fn subgroup_rank(&self) -> usize {
        (self.edge_count() + 1).saturating_sub(self.vertex_count())
    }

    /// Removes valence-one vertices until none remain, optionally sparing vertex 0.
    fn prune(&mut self, keep_base: bool) {
        let n = self.adj.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if !alive[v] || (keep_base && v == 0) {
                    continue;
                }
                if self.adj[v].iter().flatten().count() <= 1 {
                    for k in 0..self.adj[v].len() {
                        if let Some(t) = self.adj[v][k].take() {
                            self.adj[t][Letter(k as u8).inverse().index()] = None;
                        }
                    }
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut count = 0;
        for v in (0..n).filter(|&v| alive[v]) {
            index[v] = count;
            count += 1;
        }
        let old = std::mem::take(&mut self.adj);
        self.adj = old
            .into_iter()
            .enumerate()
            .filter(|(v, _)| alive[*v])
            .map(|(_, a)| a.into_iter().map(|t| t.map(|t| index[t])).collect())
            .collect();
    }

    fn read_from(&self, start: usize, w: &Word) -> Option<usize> {
        let mut cur = start;
        for l in w.letters() {
            cur = self.adj.get(cur)?[l.index()]?;
        }
        Some(cur)
    }

    /// Membership of `w` in the subgroup.
    pub fn contains(&self, w: &Word) -> bool {
        let w = w.reduce();
        w.is_empty() || self.read_from(0, &w) == Some(0)
    }

    /// Whether some conjugate of `w` lies in the subgroup.
    pub fn conjugate_into(&self, w: &Word) -> bool {
        let c = w.to_cyclic().to_word();
        if c.is_empty() {
            return true;
        }
        let mut core = self.clone();
        core.prune(false);
        (0..core.vertex_count()).any(|v| core.read_from(v, &c) == Some(v))
    }
}

/// Folded Stallings graph of the subgroup generated by `gens`.
pub fn stallings_graph(rank: usize, gens: &[Word]) -> SubgroupGraph {
    let mut f = Folder::new(rank);
    for g in gens {
        let g = g.reduce();
        if !g.is_empty() {
            f.add_loop(&g);
        }
    }
    f.finish()
}
