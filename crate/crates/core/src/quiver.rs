//! Translation quivers: vertices with projective/injective marks, arrows,
//! the translation `tau` and the arrow bijection `sigma`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type ArrowId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: VertexId,
    pub target: VertexId,
}

#[derive(Clone, Debug, Default)]
pub struct QuiverBuilder {
    vertices: Vec<(VertexId, bool, bool)>,
    arrows: Vec<Arrow>,
    tau: Vec<(VertexId, VertexId)>,
    sigma: Vec<(ArrowId, ArrowId)>,
}

impl QuiverBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: VertexId, projective: bool, injective: bool) -> &mut Self {
        self.vertices.push((id, projective, injective));
        self
    }

    pub fn arrow(&mut self, id: ArrowId, source: VertexId, target: VertexId) -> &mut Self {
        self.arrows.push(Arrow { id, source, target });
        self
    }

    pub fn tau(&mut self, x: VertexId, tau_x: VertexId) -> &mut Self {
        self.tau.push((x, tau_x));
        self
    }

    pub fn sigma(&mut self, arrow: ArrowId, image: ArrowId) -> &mut Self {
        self.sigma.push((arrow, image));
        self
    }

    /// Only dangling and duplicate ids are rejected here; everything else
    /// is left for [`TranslationQuiver::validate`].
    pub fn build(&self) -> Result<TranslationQuiver> {
        let mut tq = TranslationQuiver::default();
        for &(v, p, i) in &self.vertices {
            if !tq.vertices.insert(v) {
                return Err(Error::Duplicate { kind: "vertex", id: v });
            }
            if p {
                tq.projective.insert(v);
            }
            if i {
                tq.injective.insert(v);
            }
            tq.out_arrows.insert(v, Vec::new());
            tq.in_arrows.insert(v, Vec::new());
        }
        for a in &self.arrows {
            for end in [a.source, a.target] {
                if !tq.vertices.contains(&end) {
                    return Err(Error::UnknownVertex(end));
                }
            }
            if tq.arrows.insert(a.id, *a).is_some() {
                return Err(Error::Duplicate { kind: "arrow", id: a.id });
            }
        }
        for a in tq.arrows.values() {
            tq.out_arrows.get_mut(&a.source).unwrap().push(a.id);
            tq.in_arrows.get_mut(&a.target).unwrap().push(a.id);
        }
        for &(x, t) in &self.tau {
            for v in [x, t] {
                if !tq.vertices.contains(&v) {
                    return Err(Error::UnknownVertex(v));
                }
            }
            if tq.tau.insert(x, t).is_some() {
                return Err(Error::Duplicate { kind: "tau source", id: x });
            }
            tq.tau_inv.entry(t).or_insert(x);
        }
        for &(a, b) in &self.sigma {
            for id in [a, b] {
                if !tq.arrows.contains_key(&id) {
                    return Err(Error::UnknownArrow(id));
                }
            }
            if tq.sigma.insert(a, b).is_some() {
                return Err(Error::Duplicate { kind: "sigma source", id: a });
            }
        }
        Ok(tq)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranslationQuiver {
    vertices: BTreeSet<VertexId>,
    arrows: BTreeMap<ArrowId, Arrow>,
    projective: BTreeSet<VertexId>,
    injective: BTreeSet<VertexId>,
    tau: BTreeMap<VertexId, VertexId>,
    tau_inv: BTreeMap<VertexId, VertexId>,
    sigma: BTreeMap<ArrowId, ArrowId>,
    out_arrows: BTreeMap<VertexId, Vec<ArrowId>>,
    in_arrows: BTreeMap<VertexId, Vec<ArrowId>>,
}

/// The arrows `tau x -> m -> x` ending at a non-projective `x`, one arm per
/// arrow into `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mesh {
    pub end: VertexId,
    pub start: VertexId,
    pub arms: Vec<MeshArm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeshArm {
    /// `sigma(beta)`: start -> middle
    pub alpha: ArrowId,
    pub middle: VertexId,
    /// beta: middle -> end
    pub beta: ArrowId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathWord {
    pub start: VertexId,
    pub arrows: Vec<ArrowId>,
}

impl PathWord {
    pub fn trivial(start: VertexId) -> Self {
        PathWord { start, arrows: Vec::new() }
    }

    pub fn new(start: VertexId, arrows: Vec<ArrowId>) -> Self {
        PathWord { start, arrows }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn prefix(&self, n: usize) -> PathWord {
        PathWord { start: self.start, arrows: self.arrows[..n].to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: &'static str, detail: String) {
        self.violations.push(Violation { rule, detail });
    }
}

pub type LengthFunction = BTreeMap<VertexId, i64>;

impl TranslationQuiver {
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> + '_ {
        self.arrows.values()
    }

    pub fn arrow(&self, id: ArrowId) -> Option<&Arrow> {
        self.arrows.get(&id)
    }

    fn arrow_ok(&self, id: ArrowId) -> Result<&Arrow> {
        self.arrows.get(&id).ok_or(Error::UnknownArrow(id))
    }

    pub fn is_projective(&self, v: VertexId) -> bool {
        self.projective.contains(&v)
    }

    pub fn is_injective(&self, v: VertexId) -> bool {
        self.injective.contains(&v)
    }

    pub fn projectives(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.projective.iter().copied()
    }

    pub fn injectives(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.injective.iter().copied()
    }

    pub fn tau(&self, v: VertexId) -> Option<VertexId> {
        self.tau.get(&v).copied()
    }

    pub fn tau_inverse(&self, v: VertexId) -> Option<VertexId> {
        self.tau_inv.get(&v).copied()
    }

    pub fn tau_pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.tau.iter().map(|(&a, &b)| (a, b))
    }

    pub fn sigma(&self, a: ArrowId) -> Option<ArrowId> {
        self.sigma.get(&a).copied()
    }

    pub fn sigma_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        self.sigma.iter().map(|(&a, &b)| (a, b))
    }

    /// Arrows leaving `v`, by increasing id.
    pub fn out_arrows(&self, v: VertexId) -> &[ArrowId] {
        self.out_arrows.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Arrows entering `v`, by increasing id.
    pub fn in_arrows(&self, v: VertexId) -> &[ArrowId] {
        self.in_arrows.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn arrows_between(&self, x: VertexId, y: VertexId) -> Vec<ArrowId> {
        self.out_arrows(x).iter().copied().filter(|&a| self.arrows[&a].target == y).collect()
    }

    pub fn successors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.out_arrows(v).iter().map(|a| self.arrows[a].target).collect()
    }

    pub fn predecessors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.in_arrows(v).iter().map(|a| self.arrows[a].source).collect()
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[&a].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[&a].target
    }

    /// The mesh ending at `x`, when `x` has a translate.
    pub fn mesh(&self, x: VertexId) -> Option<Mesh> {
        let start = self.tau(x)?;
        let mut arms = Vec::new();
        for &beta in self.in_arrows(x) {
            let alpha = self.sigma(beta)?;
            arms.push(MeshArm { alpha, middle: self.source(beta), beta });
        }
        Some(Mesh { end: x, start, arms })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for a in self.arrows.values() {
            if a.source == a.target {
                report.push("loops forbidden", format!("arrow {} at vertex {}", a.id, a.source));
            }
        }
        for &v in &self.vertices {
            let p = self.projective.contains(&v);
            match (p, self.tau.get(&v)) {
                (true, Some(t)) => {
                    report.push("tau defined on a projective", format!("vertex {v} is projective but tau({v}) = {t}"))
                }
                (false, None) => report.push("tau undefined on a non-projective", format!("vertex {v}")),
                _ => {}
            }
        }
        let mut seen: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for (&x, &t) in &self.tau {
            if self.injective.contains(&t) {
                report.push("tau onto an injective", format!("tau({x}) = {t} is injective"));
            }
            if let Some(prev) = seen.insert(t, x) {
                report.push("tau not injective", format!("tau({prev}) = tau({x}) = {t}"));
            }
        }
        for (&a, &b) in &self.sigma {
            let (arrow, image) = (self.arrows[&a], self.arrows[&b]);
            match self.tau.get(&arrow.target) {
                None => report.push(
                    "sigma on an arrow into a vertex without translate",
                    format!("sigma({a}) with target {}", arrow.target),
                ),
                Some(&t) => {
                    if image.source != t || image.target != arrow.source {
                        report.push(
                            "sigma shape",
                            format!(
                                "sigma({a}: {}->{}) = {b}: {}->{}, expected {}->{}",
                                arrow.source, arrow.target, image.source, image.target, t, arrow.source
                            ),
                        );
                    }
                }
            }
        }
        let mut images: BTreeMap<ArrowId, ArrowId> = BTreeMap::new();
        for (&a, &b) in &self.sigma {
            if let Some(prev) = images.insert(b, a) {
                report.push("sigma not injective", format!("sigma({prev}) = sigma({a}) = {b}"));
            }
        }
        for (&x, &t) in &self.tau {
            for &beta in self.in_arrows(x) {
                if !self.sigma.contains_key(&beta) {
                    report.push("sigma undefined", format!("arrow {beta} into non-projective {x}"));
                }
            }
            // bijection {y -> x} -> {tau x -> y}, counted per y
            for y in self.predecessors(x).into_iter().chain(self.successors(t)) {
                let into = self.arrows_between(y, x).len();
                let out = self.arrows_between(t, y).len();
                if into != out {
                    report.push("sigma not a bijection", format!("{into} arrows {y}->{x} but {out} arrows {t}->{y}"));
                }
            }
        }
        report.violations.dedup();
        report
    }

    /// Connected components of the underlying graph, each sorted.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &v in &self.vertices {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([v]);
            seen.insert(v);
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for w in self.successors(u).into_iter().chain(self.predecessors(u)) {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// A length function pinned to 0 at the smallest vertex id, if any.
    pub fn length_function(&self) -> Result<Option<LengthFunction>> {
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::Disconnected { components: comps });
        }
        Ok(self.componentwise_length_function())
    }

    /// Like [`Self::length_function`] but pins every component separately.
    pub fn componentwise_length_function(&self) -> Option<LengthFunction> {
        let mut l = LengthFunction::new();
        for root in self.vertices.iter().copied() {
            if !l.contains_key(&root) && !self.extend_length(root, &mut l) {
                return None;
            }
        }
        Some(l)
    }

    fn extend_length(&self, root: VertexId, l: &mut LengthFunction) -> bool {
        l.insert(root, 0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let lu = l[&u];
            let steps = self
                .out_arrows(u)
                .iter()
                .map(|a| (self.target(*a), lu + 1))
                .chain(self.in_arrows(u).iter().map(|a| (self.source(*a), lu - 1)));
            for (w, lw) in steps.collect::<Vec<_>>() {
                match l.get(&w) {
                    Some(&existing) if existing != lw => return false,
                    Some(_) => {}
                    None => {
                        l.insert(w, lw);
                        queue.push_back(w);
                    }
                }
            }
        }
        true
    }

    pub fn check_path(&self, p: &PathWord) -> Result<VertexId> {
        if !self.vertices.contains(&p.start) {
            return Err(Error::UnknownVertex(p.start));
        }
        let mut at = p.start;
        for (i, &a) in p.arrows.iter().enumerate() {
            let arrow = self.arrow_ok(a)?;
            if arrow.source != at {
                return Err(Error::NotComposable { position: i });
            }
            at = arrow.target;
        }
        Ok(at)
    }

    pub fn path_end(&self, p: &PathWord) -> Result<VertexId> {
        self.check_path(p)
    }

    /// Vertices visited by `p`, start included.
    pub fn path_vertices(&self, p: &PathWord) -> Result<Vec<VertexId>> {
        self.check_path(p)?;
        let mut out = vec![p.start];
        out.extend(p.arrows.iter().map(|a| self.target(*a)));
        Ok(out)
    }

    /// Positions `i` such that arrows `i, i+1` form a hook.
    pub fn hooks(&self, p: &PathWord) -> Result<Vec<usize>> {
        let vs = self.path_vertices(p)?;
        Ok((0..p.arrows.len().saturating_sub(1)).filter(|&i| self.is_hook(vs[i], vs[i + 2])).collect())
    }

    /// Whether `x -> . -> z` would be a hook.
    pub fn is_hook(&self, x: VertexId, z: VertexId) -> bool {
        !self.is_projective(z) && self.tau(z) == Some(x)
    }

    pub fn is_sectional(&self, p: &PathWord) -> Result<bool> {
        Ok(self.hooks(p)?.is_empty())
    }

    /// All sectional paths from `x` of exactly `len` arrows, lexicographic
    /// in arrow ids.
    pub fn sectional_paths_from(&self, x: VertexId, len: usize) -> Vec<PathWord> {
        let mut out = Vec::new();
        let mut stack = vec![(PathWord::trivial(x), None::<VertexId>, x)];
        while let Some((p, prev, at)) = stack.pop() {
            if p.len() == len {
                out.push(p);
                continue;
            }
            for &a in self.out_arrows(at).iter().rev() {
                let t = self.target(a);
                if let Some(pv) = prev {
                    if self.is_hook(pv, t) {
                        continue;
                    }
                }
                let mut q = p.clone();
                q.arrows.push(a);
                stack.push((q, Some(at), t));
            }
        }
        out
    }

    /// All paths from `x` to `y`, lexicographic in arrow ids. Only
    /// terminates on acyclic quivers.
    pub fn paths_between(&self, x: VertexId, y: VertexId, max_len: usize) -> Vec<PathWord> {
        let mut out = Vec::new();
        let mut stack = vec![(PathWord::trivial(x), x)];
        while let Some((p, at)) = stack.pop() {
            if at == y {
                out.push(p.clone());
            }
            if p.len() == max_len {
                continue;
            }
            for &a in self.out_arrows(at).iter().rev() {
                let mut q = p.clone();
                q.arrows.push(a);
                stack.push((q, self.target(a)));
            }
        }
        out
    }

    /// Shortest directed distances from `x`.
    pub fn distances_from(&self, x: VertexId) -> BTreeMap<VertexId, usize> {
        let mut d = BTreeMap::from([(x, 0usize)]);
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            let du = d[&u];
            for w in self.successors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = d.entry(w) {
                    e.insert(du + 1);
                    queue.push_back(w);
                }
            }
        }
        d
    }

    /// Diameter of the underlying undirected graph.
    pub fn undirected_diameter(&self) -> usize {
        let mut best = 0;
        for &v in &self.vertices {
            let mut d = BTreeMap::from([(v, 0usize)]);
            let mut queue = VecDeque::from([v]);
            while let Some(u) = queue.pop_front() {
                let du = d[&u];
                for w in self.successors(u).into_iter().chain(self.predecessors(u)) {
                    if let std::collections::btree_map::Entry::Vacant(e) = d.entry(w) {
                        e.insert(du + 1);
                        queue.push_back(w);
                    }
                }
            }
            best = best.max(d.values().copied().max().unwrap_or(0));
        }
        best
    }

    pub fn set_projective(&mut self, v: VertexId, on: bool) {
        if on {
            self.projective.insert(v);
        } else {
            self.projective.remove(&v);
        }
    }

    pub fn set_injective(&mut self, v: VertexId, on: bool) {
        if on {
            self.injective.insert(v);
        } else {
            self.injective.remove(&v);
        }
    }

    /// Graph isomorphism respecting marks, tau and arrow multiplicities.
    /// Backtracking; meant for the small AR quivers of the test suite.
    pub fn isomorphic(&self, other: &TranslationQuiver) -> bool {
        if self.vertices.len() != other.vertices.len() || self.arrows.len() != other.arrows.len() {
            return false;
        }
        let a: Vec<VertexId> = self.vertices.iter().copied().collect();
        let b: Vec<VertexId> = other.vertices.iter().copied().collect();
        let sig = |q: &TranslationQuiver, v: VertexId| {
            (q.out_arrows(v).len(), q.in_arrows(v).len(), q.is_projective(v), q.is_injective(v), q.tau(v).is_some())
        };
        let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut used: BTreeSet<VertexId> = BTreeSet::new();
        fn go(
            i: usize,
            a: &[VertexId],
            b: &[VertexId],
            s: &TranslationQuiver,
            o: &TranslationQuiver,
            sig: &dyn Fn(&TranslationQuiver, VertexId) -> (usize, usize, bool, bool, bool),
            map: &mut BTreeMap<VertexId, VertexId>,
            used: &mut BTreeSet<VertexId>,
        ) -> bool {
            if i == a.len() {
                return true;
            }
            let v = a[i];
            for &w in b {
                if used.contains(&w) || sig(s, v) != sig(o, w) {
                    continue;
                }
                let consistent = map.iter().all(|(&u, &u2)| {
                    s.arrows_between(u, v).len() == o.arrows_between(u2, w).len()
                        && s.arrows_between(v, u).len() == o.arrows_between(w, u2).len()
                        && (s.tau(v) == Some(u)) == (o.tau(w) == Some(u2))
                        && (s.tau(u) == Some(v)) == (o.tau(u2) == Some(w))
                });
                if !consistent {
                    continue;
                }
                map.insert(v, w);
                used.insert(w);
                if go(i + 1, a, b, s, o, sig, map, used) {
                    return true;
                }
                map.remove(&v);
                used.remove(&w);
            }
            false
        }
        go(0, &a, &b, self, other, &sig, &mut map, &mut used)
    }
}
