use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, TranslationQuiver, VertexId};

/// An ordinary finite quiver, the base of a path algebra. Vertices and
/// arrows keep their external ids but are addressed by dense indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertex_ids: Vec<VertexId>,
    /// (external id, source index, target index), sorted by id
    arrows: Vec<(ArrowId, usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: &[VertexId], arrows: &[(ArrowId, VertexId, VertexId)]) -> Result<Self> {
        let mut vertex_ids = vertices.to_vec();
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        let index: BTreeMap<VertexId, usize> = vertex_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut list = Vec::new();
        for &(id, s, t) in arrows {
            let si = *index.get(&s).ok_or(Error::UnknownVertex(s))?;
            let ti = *index.get(&t).ok_or(Error::UnknownVertex(t))?;
            list.push((id, si, ti));
        }
        list.sort_unstable();
        let q = Quiver { vertex_ids, arrows: list };
        if q.topological_order().is_none() {
            return Err(Error::Cyclic);
        }
        Ok(q)
    }

    /// Forgets marks, tau and sigma.
    pub fn from_translation_quiver(tq: &TranslationQuiver) -> Result<Self> {
        let vs: Vec<VertexId> = tq.vertices().collect();
        let arrows: Vec<_> = tq.arrows().map(|a| (a.id, a.source, a.target)).collect();
        Quiver::new(&vs, &arrows)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_id(&self, i: usize) -> VertexId {
        self.vertex_ids[i]
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertex_ids
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertex_ids.binary_search(&v).ok()
    }

    pub fn arrow_index_of(&self, id: ArrowId) -> Option<usize> {
        self.arrows.iter().position(|a| a.0 == id)
    }

    /// (external id, source index, target index)
    pub fn arrow(&self, k: usize) -> (ArrowId, usize, usize) {
        self.arrows[k]
    }

    pub fn arrows(&self) -> &[(ArrowId, usize, usize)] {
        &self.arrows
    }

    pub fn out_arrows(&self, i: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&k| self.arrows[k].1 == i).collect()
    }

    pub fn in_arrows(&self, i: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&k| self.arrows[k].2 == i).collect()
    }

    pub fn opposite(&self) -> Quiver {
        let mut arrows: Vec<_> = self.arrows.iter().map(|&(id, s, t)| (id, t, s)).collect();
        arrows.sort_unstable();
        Quiver { vertex_ids: self.vertex_ids.clone(), arrows }
    }

    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for &(_, _, t) in &self.arrows {
            indeg[t] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for k in self.out_arrows(i) {
                let t = self.arrows[k].2;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.insert(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for &(_, s, t) in &self.arrows {
                for (a, b) in [(s, t), (t, s)] {
                    if a == i && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Paths starting at `i`, grouped by end vertex; each path is a list of
    /// arrow indices. Within a group, paths are ordered by length, then
    /// lexicographically.
    pub fn paths_from(&self, i: usize) -> Vec<Vec<Vec<usize>>> {
        let mut by_end: Vec<Vec<Vec<usize>>> = vec![Vec::new(); self.vertex_count()];
        let mut frontier: Vec<(usize, Vec<usize>)> = vec![(i, Vec::new())];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (at, p) in frontier {
                by_end[at].push(p.clone());
                for k in self.out_arrows(at) {
                    let mut q = p.clone();
                    q.push(k);
                    next.push((self.arrows[k].2, q));
                }
            }
            frontier = next;
        }
        for g in by_end.iter_mut() {
            g.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        }
        by_end
    }
}
