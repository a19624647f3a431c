use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::quiver::{TranslationQuiver, VertexId};

use super::WalkStep;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dir {
    Out,
    In,
}

type Relator = Vec<(Dir, VertexId)>;

#[derive(Clone, Debug)]
struct Node {
    base: VertexId,
    out: BTreeMap<VertexId, usize>,
    inn: BTreeMap<VertexId, usize>,
    depth: usize,
}

/// Coset table of walk classes. Slots are keyed by the base vertex at the
/// other end of a collapsed arrow.
pub(crate) struct Enumeration<'a> {
    base: &'a TranslationQuiver,
    nodes: Vec<Node>,
    parent: Vec<usize>,
    succ: BTreeMap<VertexId, BTreeSet<VertexId>>,
    pred: BTreeMap<VertexId, BTreeSet<VertexId>>,
    /// mesh squares read from each base vertex
    relators: BTreeMap<VertexId, Vec<Relator>>,
    pending: VecDeque<(usize, usize)>,
}

fn squares(base: &TranslationQuiver) -> BTreeMap<VertexId, Vec<Relator>> {
    let mut rel: BTreeMap<VertexId, Vec<Relator>> = BTreeMap::new();
    for z in base.vertices() {
        let Some(t) = base.tau(z) else { continue };
        let middles: Vec<VertexId> =
            base.predecessors(z).into_iter().filter(|&m| base.successors(t).contains(&m)).collect();
        for &mi in &middles {
            for &mj in &middles {
                if mi == mj {
                    continue;
                }
                // t -> mi -> z <- mj <- t, started at each corner
                let cycle = [(Dir::Out, mi), (Dir::Out, z), (Dir::In, mj), (Dir::In, t)];
                let corners = [t, mi, z, mj];
                for r in 0..4 {
                    let word: Relator = (0..4).map(|k| cycle[(r + k) % 4]).collect();
                    rel.entry(corners[r]).or_default().push(word);
                }
            }
        }
    }
    rel
}

impl<'a> Enumeration<'a> {
    pub(crate) fn new(base: &'a TranslationQuiver, root: VertexId) -> Self {
        let succ = base.vertices().map(|v| (v, base.successors(v))).collect();
        let pred = base.vertices().map(|v| (v, base.predecessors(v))).collect();
        Enumeration {
            base,
            nodes: vec![Node { base: root, out: BTreeMap::new(), inn: BTreeMap::new(), depth: 0 }],
            parent: vec![0],
            succ,
            pred,
            relators: squares(base),
            pending: VecDeque::new(),
        }
    }

    fn find(&mut self, mut n: usize) -> usize {
        while self.parent[n] != n {
            self.parent[n] = self.parent[self.parent[n]];
            n = self.parent[n];
        }
        n
    }

    fn find_ro(&self, mut n: usize) -> usize {
        while self.parent[n] != n {
            n = self.parent[n];
        }
        n
    }

    fn alive(&self, n: usize) -> bool {
        self.parent[n] == n
    }

    fn slot(&mut self, n: usize, d: Dir, y: VertexId) -> Option<usize> {
        let n = self.find(n);
        let t = match d {
            Dir::Out => self.nodes[n].out.get(&y).copied(),
            Dir::In => self.nodes[n].inn.get(&y).copied(),
        }?;
        Some(self.find(t))
    }

    fn link(&mut self, n: usize, d: Dir, m: usize) {
        let (n, m) = (self.find(n), self.find(m));
        let (bn, bm) = (self.nodes[n].base, self.nodes[m].base);
        let (there, back) = match d {
            Dir::Out => (self.nodes[n].out.get(&bm).copied(), self.nodes[m].inn.get(&bn).copied()),
            Dir::In => (self.nodes[n].inn.get(&bm).copied(), self.nodes[m].out.get(&bn).copied()),
        };
        match there {
            Some(old) => self.pending.push_back((old, m)),
            None => {
                match d {
                    Dir::Out => self.nodes[n].out.insert(bm, m),
                    Dir::In => self.nodes[n].inn.insert(bm, m),
                };
            }
        }
        match back {
            Some(old) => self.pending.push_back((old, n)),
            None => {
                match d {
                    Dir::Out => self.nodes[m].inn.insert(bn, n),
                    Dir::In => self.nodes[m].out.insert(bn, n),
                };
            }
        }
    }

    fn define(&mut self, n: usize, d: Dir, y: VertexId) -> usize {
        let n = self.find(n);
        let id = self.nodes.len();
        let depth = self.nodes[n].depth + 1;
        self.nodes.push(Node { base: y, out: BTreeMap::new(), inn: BTreeMap::new(), depth });
        self.parent.push(id);
        self.link(n, d, id);
        id
    }

    fn coincidences(&mut self) {
        while let Some((a, b)) = self.pending.pop_front() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            debug_assert_eq!(self.nodes[keep].base, self.nodes[gone].base);
            self.parent[gone] = keep;
            let depth = self.nodes[gone].depth.min(self.nodes[keep].depth);
            self.nodes[keep].depth = depth;
            let out = std::mem::take(&mut self.nodes[gone].out);
            let inn = std::mem::take(&mut self.nodes[gone].inn);
            for (y, t) in out {
                match self.nodes[keep].out.get(&y) {
                    Some(&u) => self.pending.push_back((u, t)),
                    None => {
                        self.nodes[keep].out.insert(y, t);
                    }
                }
            }
            for (y, t) in inn {
                match self.nodes[keep].inn.get(&y) {
                    Some(&u) => self.pending.push_back((u, t)),
                    None => {
                        self.nodes[keep].inn.insert(y, t);
                    }
                }
            }
        }
    }

    fn inverse(d: Dir) -> Dir {
        match d {
            Dir::Out => Dir::In,
            Dir::In => Dir::Out,
        }
    }

    /// Scans one relator at `n`, filling gaps while depth allows. Returns
    /// whether anything changed.
    fn scan(&mut self, n: usize, rel: &Relator, horizon: usize) -> bool {
        let mut changed = false;
        loop {
            let n = self.find(n);
            let len = rel.len();
            // forward as far as defined
            let mut f = n;
            let mut i = 0;
            while i < len {
                match self.slot(f, rel[i].0, rel[i].1) {
                    Some(t) => {
                        f = t;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == len {
                if self.find(f) != n {
                    self.pending.push_back((f, n));
                    self.coincidences();
                    changed = true;
                }
                return changed;
            }
            // backward from n: the word ends at n, so walk inverses from the end
            let mut b = n;
            let mut j = len;
            while j > i {
                // step j-1 goes from vertex over rel[j-2] (or start) to rel[j-1].1
                let prev = if j >= 2 { rel[j - 2].1 } else { self.nodes[n].base };
                match self.slot(b, Self::inverse(rel[j - 1].0), prev) {
                    Some(t) => {
                        b = t;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i {
                // both scans met at the same position
                if self.find(b) != self.find(f) {
                    self.pending.push_back((b, f));
                    self.coincidences();
                    changed = true;
                }
                return changed;
            }
            if j == i + 1 {
                // deduction: one missing step f -> b
                self.link(f, rel[i].0, b);
                self.coincidences();
                return true;
            }
            let fr = self.find(f);
            if self.nodes[fr].depth >= horizon {
                return changed;
            }
            self.define(f, rel[i].0, rel[i].1);
            changed = true;
        }
    }

    fn neighbours(&self, v: VertexId) -> Vec<(Dir, VertexId)> {
        let mut ns: Vec<(Dir, VertexId)> = self.succ[&v].iter().map(|&y| (Dir::Out, y)).collect();
        ns.extend(self.pred[&v].iter().map(|&y| (Dir::In, y)));
        ns
    }

    fn close(&mut self, n: usize, horizon: usize) -> bool {
        let mut changed = false;
        let n = self.find(n);
        if self.nodes[n].depth < horizon {
            for (d, y) in self.neighbours(self.nodes[n].base) {
                if self.slot(n, d, y).is_none() {
                    self.define(n, d, y);
                    changed = true;
                }
            }
        }
        let rels = self.relators.get(&self.nodes[n].base).cloned().unwrap_or_default();
        for r in &rels {
            changed |= self.scan(n, r, horizon);
            if !self.alive(n) {
                break;
            }
        }
        changed
    }

    fn recompute_depths(&mut self) {
        let root = self.find(0);
        for n in 0..self.nodes.len() {
            self.nodes[n].depth = usize::MAX;
        }
        self.nodes[root].depth = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            let d = self.nodes[n].depth;
            let next: Vec<usize> = self.nodes[n].out.values().chain(self.nodes[n].inn.values()).copied().collect();
            for t in next {
                let t = self.find(t);
                if self.nodes[t].depth == usize::MAX {
                    self.nodes[t].depth = d + 1;
                    queue.push_back(t);
                }
            }
        }
    }

    /// Enumerates until every node nearer than `horizon` has all slots and
    /// closes every mesh square it lies on.
    pub(crate) fn run(&mut self, horizon: usize) {
        let mut i = 0;
        while i < self.nodes.len() {
            if self.alive(i) && self.nodes[i].depth < horizon {
                self.close(i, horizon);
            }
            i += 1;
        }
        loop {
            self.recompute_depths();
            let mut changed = false;
            for n in 0..self.nodes.len() {
                if self.alive(n) && self.nodes[n].depth < horizon {
                    changed |= self.close(n, horizon);
                }
            }
            if !changed {
                break;
            }
        }
        self.recompute_depths();
    }

    pub(crate) fn base_of(&self, n: usize) -> VertexId {
        self.nodes[self.find_ro(n)].base
    }

    pub(crate) fn out_of(&self, n: usize, y: VertexId) -> Option<usize> {
        self.nodes[self.find_ro(n)].out.get(&y).map(|&t| self.find_ro(t))
    }

    pub(crate) fn in_of(&self, n: usize, y: VertexId) -> Option<usize> {
        self.nodes[self.find_ro(n)].inn.get(&y).map(|&t| self.find_ro(t))
    }

    /// Nodes within `radius` of the root in canonical order, with their
    /// distances and canonical walks.
    pub(crate) fn canonical_bfs(&self, radius: usize) -> (Vec<usize>, Vec<usize>, Vec<Vec<WalkStep>>) {
        let root = self.find_ro(0);
        let mut order = vec![root];
        let mut dist = vec![0];
        let mut walks: Vec<Vec<WalkStep>> = vec![Vec::new()];
        let mut seen = BTreeSet::from([root]);
        let mut head = 0;
        while head < order.len() {
            let (n, d) = (order[head], dist[head]);
            let walk = walks[head].clone();
            head += 1;
            if d == radius {
                continue;
            }
            let v = self.nodes[n].base;
            let mut steps: Vec<(bool, u32, usize)> = Vec::new();
            for (&y, &t) in &self.nodes[n].out {
                let a = self.base.out_arrows(v).iter().copied().filter(|&a| self.base.target(a) == y).min();
                if let Some(a) = a {
                    steps.push((false, a, self.find_ro(t)));
                }
            }
            for (&y, &t) in &self.nodes[n].inn {
                let a = self.base.in_arrows(v).iter().copied().filter(|&a| self.base.source(a) == y).min();
                if let Some(a) = a {
                    steps.push((true, a, self.find_ro(t)));
                }
            }
            steps.sort_unstable();
            for (backward, arrow, t) in steps {
                if seen.insert(t) {
                    let mut w = walk.clone();
                    w.push(WalkStep { arrow, forward: !backward });
                    order.push(t);
                    dist.push(d + 1);
                    walks.push(w);
                }
            }
        }
        (order, dist, walks)
    }
}
