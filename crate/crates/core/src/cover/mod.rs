//! Truncated generic coverings.
//!
//! Walks from a base point are identified by inverse cancellation, mesh-arm
//! exchange and parallel arrows. Parallel arrows collapse to one edge, so
//! the walk classes are the vertices of the universal cover of the
//! 2-complex whose edges are the collapsed arrows and whose faces are the
//! squares `τz -> m_i -> z <- m_j <- τz` of each mesh. That cover is
//! enumerated like a coset table: every node has one slot per neighbouring
//! base vertex, relators are the mesh squares, and coincidences are merged
//! with a union-find. Arrow multiplicity is restored when the result is
//! written out.

mod assign;
mod enumerate;

pub use assign::{well_behaved_assignment, AssignmentCheck, WellBehavedAssignment};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::Document;
use crate::quiver::{ArrowId, PathWord, QuiverBuilder, TranslationQuiver, VertexId};
use crate::rep::{check_sectional_family, Radicals, SectionalFamily};

use enumerate::Enumeration;

/// One step of an unoriented walk: along a base arrow, forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct WalkStep {
    pub arrow: ArrowId,
    pub forward: bool,
}

/// Canonical representative of a walk class: a shortest walk from the base
/// point, least in the order that prefers forward steps, then smaller
/// arrow ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WalkClass {
    pub steps: Vec<WalkStep>,
}

#[derive(Clone, Debug)]
pub struct GenericCover {
    pub cover: TranslationQuiver,
    pub base: TranslationQuiver,
    pub pi_vertices: BTreeMap<VertexId, VertexId>,
    pub pi_arrows: BTreeMap<ArrowId, ArrowId>,
    pub radius: usize,
    /// (base vertex, its lift)
    pub base_point: (VertexId, VertexId),
    pub boundary: BTreeSet<VertexId>,
    pub walks: Vec<WalkClass>,
}

/// Rules a base quiver must satisfy for the construction: everything but
/// a missing translate, which is how truncations end.
fn check_base(base: &TranslationQuiver) -> Result<()> {
    let bad: Vec<String> = base
        .validate()
        .violations
        .iter()
        .filter(|v| v.rule != "tau undefined on a non-projective")
        .map(|v| v.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(Error::Invalid(format!("base is not a translation quiver: {}", bad.join("; "))));
    }
    let comps = base.components();
    if comps.len() > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    Ok(())
}

/// Builds the ball of the given radius (in walk length) around a lift of
/// `base_vertex`. The enumeration runs to twice the radius plus two so
/// that identifications between walks in the ball are found.
pub fn build_cover(base: &TranslationQuiver, base_vertex: VertexId, radius: usize) -> Result<GenericCover> {
    if !base.has_vertex(base_vertex) {
        return Err(Error::UnknownVertex(base_vertex));
    }
    check_base(base)?;
    let horizon = 2 * radius + 2;
    let mut en = Enumeration::new(base, base_vertex);
    en.run(horizon);
    let (order, dist, steps) = en.canonical_bfs(radius);

    let index: BTreeMap<usize, VertexId> = order.iter().enumerate().map(|(i, &n)| (n, i as VertexId)).collect();
    let mut b = QuiverBuilder::new();
    let mut pi_vertices = BTreeMap::new();
    for (i, &n) in order.iter().enumerate() {
        let v = en.base_of(n);
        b.vertex(i as VertexId, base.is_projective(v), base.is_injective(v));
        pi_vertices.insert(i as VertexId, v);
    }
    // arrows by (source, base arrow)
    let mut pi_arrows = BTreeMap::new();
    let mut arrow_at: BTreeMap<(VertexId, ArrowId), ArrowId> = BTreeMap::new();
    let mut arrow_ends: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, &n) in order.iter().enumerate() {
        let v = en.base_of(n);
        for &a in base.out_arrows(v) {
            let Some(t) = en.out_of(n, base.target(a)) else { continue };
            let Some(&ti) = index.get(&t) else { continue };
            let id = arrow_ends.len() as ArrowId;
            b.arrow(id, i as VertexId, ti);
            pi_arrows.insert(id, a);
            arrow_at.insert((i as VertexId, a), id);
            arrow_ends.push((i as VertexId, ti));
        }
    }
    // translation: through any arm of the mesh
    let mut tau: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (i, &n) in order.iter().enumerate() {
        let z = en.base_of(n);
        let Some(t) = base.tau(z) else { continue };
        let Some(&beta) = base.in_arrows(z).first() else { continue };
        let m = base.source(beta);
        let s = en.in_of(n, m).and_then(|a| en.in_of(a, t));
        if let Some(&si) = s.and_then(|s| index.get(&s)) {
            tau.insert(i as VertexId, si);
            b.tau(i as VertexId, si);
        }
    }
    for (&id, &a) in &pi_arrows {
        let (src, tgt) = arrow_ends[id as usize];
        let Some(&s) = tau.get(&tgt) else { continue };
        let Some(alpha) = base.sigma(a) else { continue };
        if let Some(&sid) = arrow_at.get(&(s, alpha)) {
            if arrow_ends[sid as usize].1 == src {
                b.sigma(id, sid);
            }
        }
    }
    let cover = b.build()?;

    let mut boundary = BTreeSet::new();
    for (i, &n) in order.iter().enumerate() {
        let v = en.base_of(n);
        let iv = i as VertexId;
        let complete_out = base.successors(v).iter().all(|&y| en.out_of(n, y).is_some_and(|t| index.contains_key(&t)));
        let complete_in = base.predecessors(v).iter().all(|&y| en.in_of(n, y).is_some_and(|t| index.contains_key(&t)));
        let tau_ok = base.tau(v).is_none() || cover.tau(iv).is_some();
        let tau_inv_ok = base.tau_inverse(v).is_none() || cover.tau_inverse(iv).is_some();
        if !(complete_out && complete_in && tau_ok && tau_inv_ok) {
            boundary.insert(iv);
        }
    }
    debug_assert!(dist.iter().all(|&d| d <= radius));
    let walks = steps.into_iter().map(|steps| WalkClass { steps }).collect();
    Ok(GenericCover {
        cover,
        base: base.clone(),
        pi_vertices,
        pi_arrows,
        radius,
        base_point: (base_vertex, 0),
        boundary,
        walks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverViolation {
    pub axiom: String,
    pub vertex: VertexId,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CoverReport {
    pub checked_vertices: usize,
    pub interior_vertices: usize,
    pub violations: Vec<CoverViolation>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, axiom: &str, vertex: VertexId, detail: String) {
        self.violations.push(CoverViolation { axiom: axiom.into(), vertex, detail });
    }
}

impl GenericCover {
    pub fn pi(&self, v: VertexId) -> VertexId {
        self.pi_vertices[&v]
    }

    pub fn pi_arrow(&self, a: ArrowId) -> ArrowId {
        self.pi_arrows[&a]
    }

    pub fn root(&self) -> VertexId {
        self.base_point.1
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.cover.has_vertex(v) && !self.boundary.contains(&v)
    }

    pub fn interior(&self) -> Vec<VertexId> {
        self.cover.vertices().filter(|v| !self.boundary.contains(v)).collect()
    }

    pub fn fiber(&self, base: VertexId) -> Vec<VertexId> {
        self.pi_vertices.iter().filter(|&(_, &b)| b == base).map(|(&c, _)| c).collect()
    }

    /// Cover export: the cover in quiver text form plus its covering map.
    pub fn document(&self) -> Document {
        Document {
            quiver: self.cover.clone(),
            pi_vertices: self.pi_vertices.clone(),
            pi_arrows: self.pi_arrows.clone(),
        }
    }

    /// Endpoint of a walk from the root, if it stays inside the truncation.
    pub fn evaluate_walk(&self, steps: &[WalkStep]) -> Option<VertexId> {
        let mut at = self.root();
        for s in steps {
            let arrows = if s.forward { self.cover.out_arrows(at) } else { self.cover.in_arrows(at) };
            let a = arrows.iter().find(|&&a| self.pi_arrows[&a] == s.arrow)?;
            at = if s.forward { self.cover.target(*a) } else { self.cover.source(*a) };
        }
        Some(at)
    }

    /// The unique successor of `x` over the base vertex `y`, if present.
    pub fn successor_over(&self, x: VertexId, y: VertexId) -> Option<VertexId> {
        self.cover.out_arrows(x).iter().map(|&a| self.cover.target(a)).find(|&t| self.pi(t) == y)
    }

    /// Lifts a base path starting at `pi(start)`, arrow by arrow.
    pub fn lift_path(&self, p: &PathWord, start: VertexId) -> Result<PathWord> {
        if !self.cover.has_vertex(start) {
            return Err(Error::UnknownVertex(start));
        }
        if self.pi(start) != p.start {
            return Err(Error::Invalid(format!(
                "cover vertex {start} lies over {}, not over {}",
                self.pi(start),
                p.start
            )));
        }
        self.base.check_path(p)?;
        let mut at = start;
        let mut arrows = Vec::with_capacity(p.len());
        for &a in &p.arrows {
            let lifted = self
                .cover
                .out_arrows(at)
                .iter()
                .copied()
                .find(|&c| self.pi_arrows[&c] == a)
                .ok_or(Error::RadiusExceeded(at))?;
            arrows.push(lifted);
            at = self.cover.target(lifted);
        }
        Ok(PathWord::new(start, arrows))
    }

    /// Lifts a sectional family of the component `rads` is built on (which
    /// must be this cover's base) to paths from `start` with pairwise
    /// distinct arrows.
    pub fn lift_sectional_family(
        &self,
        family: &SectionalFamily,
        rads: &Radicals,
        start: VertexId,
    ) -> Result<Vec<PathWord>> {
        if rads.ar().tq != self.base {
            return Err(Error::Invalid("family lives on a different component".into()));
        }
        check_sectional_family(family, rads)?.into_result()?;
        if self.pi(start) != family.root {
            return Err(Error::Invalid(format!("cover vertex {start} does not lie over the root")));
        }
        // vertices x_{i,j}
        let mut lifted: Vec<Vec<VertexId>> = Vec::new();
        for p in &family.paths {
            let mut at = start;
            let mut vs = vec![start];
            for (j, &y) in p.vertices.iter().enumerate() {
                at = self.successor_over(at, y).ok_or_else(|| {
                    if self.boundary.contains(&at) {
                        Error::RadiusExceeded(at)
                    } else {
                        Error::NotComposable { position: j }
                    }
                })?;
                vs.push(at);
            }
            lifted.push(vs);
        }
        // arrows: an injection from the (i, j) sharing endpoints into the
        // arrows between them; same base arrow preferred
        let mut used: BTreeSet<ArrowId> = BTreeSet::new();
        let mut chosen: Vec<Vec<Option<ArrowId>>> = family.paths.iter().map(|p| vec![None; p.maps.len()]).collect();
        for pass in 0..2 {
            for (i, vs) in lifted.iter().enumerate() {
                for j in 1..vs.len() {
                    if chosen[i][j - 1].is_some() {
                        continue;
                    }
                    let between = self.cover.arrows_between(vs[j - 1], vs[j]);
                    let preferred = (pass == 0).then(|| {
                        // the base arrow with the chosen morphism, when the family uses one
                        let base_arrows = self.base.arrows_between(family.vertex(i, j - 1), family.vertex(i, j));
                        base_arrows.into_iter().find(|&b| rads.ar().map(b) == &family.paths[i].maps[j - 1])
                    });
                    let pick = between.iter().copied().find(|a| {
                        !used.contains(a)
                            && match preferred {
                                Some(Some(b)) => self.pi_arrows[a] == b,
                                Some(None) => false,
                                None => true,
                            }
                    });
                    if let Some(a) = pick {
                        used.insert(a);
                        chosen[i][j - 1] = Some(a);
                    }
                }
            }
        }
        lifted
            .iter()
            .zip(chosen)
            .map(|(vs, arrows)| {
                let arrows = arrows.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| Error::InvalidFamily {
                    condition: 'a',
                    detail: "more morphisms than arrows between lifted vertices".into(),
                })?;
                Ok(PathWord::new(vs[0], arrows))
            })
            .collect()
    }
}

/// Checks the covering axioms on the whole truncation: compatibility of
/// the map with arrows, marks, translation and sigma everywhere, and the
/// local bijections at interior vertices.
pub fn verify_cover(gc: &GenericCover) -> CoverReport {
    let c = &gc.cover;
    let b = &gc.base;
    let mut r = CoverReport::default();
    for x in c.vertices() {
        r.checked_vertices += 1;
        let Some(&px) = gc.pi_vertices.get(&x) else {
            r.push("arrows", x, "vertex has no image".into());
            continue;
        };
        if !b.has_vertex(px) {
            r.push("arrows", x, format!("image {px} is not a base vertex"));
            continue;
        }
        if c.is_projective(x) != b.is_projective(px) || c.is_injective(x) != b.is_injective(px) {
            r.push("marks", x, format!("marks differ from those of base vertex {px}"));
        }
        if let Some(tx) = c.tau(x) {
            if gc.pi_vertices.get(&tx).copied() != b.tau(px) {
                r.push("translation", x, "translation does not commute with the covering map".into());
            }
        }
        let interior = !gc.boundary.contains(&x);
        if interior {
            r.interior_vertices += 1;
            if b.tau(px).is_some() && c.tau(x).is_none() {
                r.push("translation", x, "translate missing at an interior vertex".into());
            }
            for (mine, theirs, what) in
                [(c.out_arrows(x), b.out_arrows(px), "starting"), (c.in_arrows(x), b.in_arrows(px), "ending")]
            {
                let mut imgs: Vec<ArrowId> = mine.iter().filter_map(|a| gc.pi_arrows.get(a).copied()).collect();
                imgs.sort_unstable();
                let mut want = theirs.to_vec();
                want.sort_unstable();
                if imgs != want {
                    r.push(
                        "local bijection",
                        x,
                        format!("arrows {what} here do not map bijectively onto those at {px}"),
                    );
                }
            }
            // parallel classes: arrows x -> y onto arrows px -> py
            for y in c.successors(x) {
                let n = c.arrows_between(x, y).len();
                if let Some(&py) = gc.pi_vertices.get(&y) {
                    if n != b.arrows_between(px, py).len() {
                        r.push("parallel arrows", x, format!("arrow count to {y} differs from the base"));
                    }
                }
            }
        }
        let mut seen: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for y in c.successors(x) {
            if let Some(&py) = gc.pi_vertices.get(&y) {
                if let Some(&other) = seen.get(&py) {
                    r.push("distinct successors", x, format!("successors {other} and {y} both lie over {py}"));
                }
                seen.insert(py, y);
            }
        }
    }
    for a in c.arrows() {
        let Some(&pa) = gc.pi_arrows.get(&a.id) else {
            r.push("arrows", a.source, format!("arrow {} has no image", a.id));
            continue;
        };
        let Some(ba) = b.arrow(pa) else {
            r.push("arrows", a.source, format!("arrow {} maps to unknown base arrow {pa}", a.id));
            continue;
        };
        if gc.pi_vertices.get(&a.source) != Some(&ba.source) || gc.pi_vertices.get(&a.target) != Some(&ba.target) {
            r.push("arrows", a.source, format!("arrow {} is not mapped over its endpoints", a.id));
        }
        if let Some(s) = c.sigma(a.id) {
            if gc.pi_arrows.get(&s).copied() != b.sigma(pa) {
                r.push("translation", a.target, format!("sigma of arrow {} does not commute", a.id));
            }
        }
    }
    r
}
