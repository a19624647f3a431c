use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::quiver::{ArrowId, QuiverBuilder, TranslationQuiver, VertexId};

use super::hom::{find_iso, hom, radical, IsoResult};
use super::module::{cokernel, map_from_path, Morphism, Rep, RepDump};
use super::quiver::Quiver;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    FromProjectives,
    FromInjectives,
}

/// A knitted AR component: translation quiver, a module at every vertex
/// and a chosen irreducible morphism on every arrow. Vertex and arrow ids
/// are dense indices into `modules` and `maps`.
#[derive(Clone, Debug)]
pub struct ArQuiver {
    pub base: Arc<Quiver>,
    pub tq: TranslationQuiver,
    pub modules: Vec<Rep>,
    pub maps: Vec<Morphism>,
    pub direction: Direction,
    pub bound: usize,
    pub truncated: bool,
    /// number of tau steps from the projectives (or injectives)
    pub depth: Vec<usize>,
    pub out_complete: Vec<bool>,
    pub in_complete: Vec<bool>,
}

struct Knit {
    modules: Vec<Rep>,
    maps: Vec<Morphism>,
    arrows: Vec<(usize, usize)>,
    tau: BTreeMap<usize, usize>,
    sigma: BTreeMap<usize, usize>,
    depth: Vec<usize>,
    projective: Vec<bool>,
    injective: Vec<bool>,
    frontier: Vec<bool>,
    truncated: bool,
}

fn knit_from_projectives(quiver: &Arc<Quiver>, bound: usize) -> Result<Knit> {
    let n = quiver.vertex_count();
    let mut k = Knit {
        modules: (0..n).map(|i| Rep::projective(quiver.clone(), i)).collect(),
        maps: Vec::new(),
        arrows: Vec::new(),
        tau: BTreeMap::new(),
        sigma: BTreeMap::new(),
        depth: vec![0; n],
        projective: vec![true; n],
        injective: vec![false; n],
        frontier: vec![false; n],
        truncated: false,
    };
    for (a, &(_, s, t)) in quiver.arrows().iter().enumerate() {
        // P_t is a summand of rad P_s
        k.arrows.push((t, s));
        k.maps.push(map_from_path(quiver, &[a], s)?);
    }
    let mut processed: Vec<bool> = vec![false; n];
    let mut tau_inv: BTreeMap<usize, usize> = BTreeMap::new();
    loop {
        let ready =
            (0..k.modules.len()).find(|&v| !processed[v] && k.arrows.iter().all(|&(s, t)| t != v || processed[s]));
        let Some(v) = ready else { break };
        processed[v] = true;
        let incoming: Vec<usize> = k.arrows.iter().filter(|a| a.1 == v).map(|a| a.0).collect();
        let blocked = incoming.iter().any(|&w| k.frontier[w] || (!k.injective[w] && !tau_inv.contains_key(&w)));
        if blocked {
            k.frontier[v] = true;
            k.truncated = true;
            continue;
        }
        let out: Vec<usize> = (0..k.arrows.len()).filter(|&a| k.arrows[a].0 == v).collect();
        let targets: Vec<&Rep> = out.iter().map(|&a| &k.modules[k.arrows[a].1]).collect();
        let (sum, incl, _) = Rep::direct_sum(quiver.clone(), &targets);
        let parts: Vec<Morphism> = out.iter().map(|&a| k.maps[a].clone()).collect();
        let f = Morphism::column(&parts, &k.modules[v]);
        let (c, p) = cokernel(&f, &sum);
        if c.is_zero() {
            k.injective[v] = true;
            continue;
        }
        if k.depth[v] >= bound {
            k.frontier[v] = true;
            k.truncated = true;
            continue;
        }
        let y = k.modules.len();
        k.modules.push(c);
        k.depth.push(k.depth[v] + 1);
        k.projective.push(false);
        k.injective.push(false);
        k.frontier.push(false);
        processed.push(false);
        for (j, &a) in out.iter().enumerate() {
            let e = k.arrows[a].1;
            let id = k.arrows.len();
            k.arrows.push((e, y));
            k.maps.push(p.after(&incl[j]));
            k.sigma.insert(id, a);
        }
        k.tau.insert(y, v);
        tau_inv.insert(v, y);
    }
    Ok(k)
}

fn assemble(base: Arc<Quiver>, k: Knit, direction: Direction, bound: usize) -> Result<ArQuiver> {
    let mut b = QuiverBuilder::new();
    for v in 0..k.modules.len() {
        b.vertex(v as VertexId, k.projective[v], k.injective[v]);
    }
    for (a, &(s, t)) in k.arrows.iter().enumerate() {
        b.arrow(a as ArrowId, s as VertexId, t as VertexId);
    }
    for (&y, &x) in &k.tau {
        b.tau(y as VertexId, x as VertexId);
    }
    for (&a, &s) in &k.sigma {
        b.sigma(a as ArrowId, s as ArrowId);
    }
    let tq = b.build()?;
    let n = k.modules.len();
    let in_complete = vec![true; n];
    let out_complete: Vec<bool> = k.frontier.iter().map(|f| !f).collect();
    Ok(ArQuiver {
        base,
        tq,
        modules: k.modules,
        maps: k.maps,
        direction,
        bound,
        truncated: k.truncated,
        depth: k.depth,
        out_complete,
        in_complete,
    })
}

/// Knits the preprojective (or preinjective) component, stopping after
/// `bound` applications of the translate. For Dynkin quivers and a large
/// enough bound this is the whole AR quiver.
pub fn knit_ar_component(quiver: &Arc<Quiver>, direction: Direction, bound: usize) -> Result<ArQuiver> {
    if quiver.topological_order().is_none() {
        return Err(Error::Cyclic);
    }
    if !quiver.is_connected() {
        return Err(Error::Invalid("quiver is not connected".into()));
    }
    match direction {
        Direction::FromProjectives => {
            let k = knit_from_projectives(quiver, bound)?;
            assemble(quiver.clone(), k, direction, bound)
        }
        Direction::FromInjectives => {
            let op = Arc::new(quiver.opposite());
            let k = knit_from_projectives(&op, bound)?;
            let dual = Knit {
                modules: k.modules.iter().map(|m| m.dual(quiver.clone())).collect(),
                maps: k.maps.iter().map(Morphism::dual).collect(),
                arrows: k.arrows.iter().map(|&(s, t)| (t, s)).collect(),
                tau: k.tau.iter().map(|(&y, &x)| (x, y)).collect(),
                sigma: k.sigma.iter().map(|(&b, &a)| (a, b)).collect(),
                depth: k.depth,
                projective: k.injective,
                injective: k.projective,
                frontier: k.frontier,
                truncated: k.truncated,
            };
            let mut ar = assemble(quiver.clone(), dual, direction, bound)?;
            std::mem::swap(&mut ar.in_complete, &mut ar.out_complete);
            Ok(ar)
        }
    }
}

impl ArQuiver {
    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn module(&self, v: VertexId) -> &Rep {
        &self.modules[v as usize]
    }

    pub fn map(&self, a: ArrowId) -> &Morphism {
        &self.maps[a as usize]
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.in_complete[v as usize] && self.out_complete[v as usize]
    }

    pub fn interior(&self) -> Vec<VertexId> {
        self.tq.vertices().filter(|&v| self.is_interior(v)).collect()
    }

    /// Vertex carrying a module isomorphic to `m`, if any.
    pub fn find(&self, m: &Rep) -> Result<Option<(VertexId, Morphism)>> {
        if *self.base != **m.quiver() {
            return Err(Error::QuiverMismatch);
        }
        for v in self.tq.vertices() {
            let x = self.module(v);
            if x.dims() != m.dims() {
                continue;
            }
            if let IsoResult::Isomorphic(phi) = find_iso(m, x, 100_000)? {
                return Ok(Some((v, phi)));
            }
        }
        Ok(None)
    }

    /// Like [`ArQuiver::find`] but an error when absent.
    pub fn locate(&self, m: &Rep) -> Result<(VertexId, Morphism)> {
        self.find(m)?.ok_or_else(|| Error::OutsideComponent(format!("module with dimension vector {:?}", m.dims())))
    }

    pub fn projective_vertex(&self, i: usize) -> Result<VertexId> {
        Ok(self.locate(&Rep::projective(self.base.clone(), i))?.0)
    }

    pub fn injective_vertex(&self, i: usize) -> Result<VertexId> {
        Ok(self.locate(&Rep::injective(self.base.clone(), i))?.0)
    }

    pub fn dims_of(&self, v: VertexId) -> Vec<usize> {
        self.module(v).dims().to_vec()
    }

    pub fn dump(&self) -> ArDump {
        ArDump {
            direction: self.direction,
            bound: self.bound,
            truncated: self.truncated,
            modules: self
                .tq
                .vertices()
                .map(|v| ModuleEntry {
                    vertex: v,
                    projective: self.tq.is_projective(v),
                    injective: self.tq.is_injective(v),
                    tau: self.tq.tau(v),
                    module: self.module(v).to_dump(),
                })
                .collect(),
            arrows: self.tq.arrows().map(|a| ArrowEntry { arrow: a.id, source: a.source, target: a.target }).collect(),
        }
    }

    /// Checks the sequence `0 -> τX -> ⊕E -> X -> 0` ending at `x`:
    /// composite zero, vertexwise ranks giving exactness, and every
    /// radical morphism from a module of the component into X factoring
    /// through the right map.
    pub fn verify_almost_split(&self, x: VertexId) -> Result<AlmostSplitCheck> {
        let tx = self.tq.tau(x).ok_or_else(|| Error::Invalid(format!("vertex {x} has no translate")))?;
        let mesh = self.tq.mesh(x).expect("tau defined");
        let mids: Vec<&Rep> = mesh.arms.iter().map(|arm| self.module(arm.middle)).collect();
        let (sum, _, _) = Rep::direct_sum(self.base.clone(), &mids);
        let left = Morphism::column(
            &mesh.arms.iter().map(|arm| self.map(arm.alpha).clone()).collect::<Vec<_>>(),
            self.module(tx),
        );
        let right =
            Morphism::row(&mesh.arms.iter().map(|arm| self.map(arm.beta).clone()).collect::<Vec<_>>(), self.module(x));
        let composite_zero = right.after(&left).is_zero();
        let mut exact = composite_zero && left.is_mono() && right.is_epi();
        for v in 0..sum.dims().len() {
            exact &= sum.dim(v) == self.module(tx).dim(v) + self.module(x).dim(v);
        }
        let mut factorizations = 0;
        let mut right_almost_split = true;
        for u in self.tq.vertices() {
            let m = self.module(u);
            let rad = radical(m, self.module(x), u == x)?;
            if rad.is_zero() {
                continue;
            }
            let through = hom(m, &sum)?;
            let image = Subspace::span(rad.ambient(), through.basis.iter().map(|phi| right.after(phi).to_vec()));
            for h in rad.basis() {
                factorizations += 1;
                right_almost_split &= image.contains(h);
            }
        }
        Ok(AlmostSplitCheck { vertex: x, exact, right_almost_split, factorizations })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlmostSplitCheck {
    pub vertex: VertexId,
    pub exact: bool,
    pub right_almost_split: bool,
    pub factorizations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArDump {
    pub direction: Direction,
    pub bound: usize,
    pub truncated: bool,
    pub modules: Vec<ModuleEntry>,
    pub arrows: Vec<ArrowEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleEntry {
    pub vertex: VertexId,
    pub projective: bool,
    pub injective: bool,
    pub tau: Option<VertexId>,
    pub module: RepDump,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowEntry {
    pub arrow: ArrowId,
    pub source: VertexId,
    pub target: VertexId,
}
