//! The mesh category of a translation quiver with length.
//!
//! For a fixed source `x` the functor `k(x, -)` is built level by level:
//! `k(x, y)` is the cokernel of `k(x, tau y) -> (+)_{a: z -> y} k(x, z)`,
//! whose components are the maps of the arrows `sigma(a)`. Every basis
//! vector of `k(x, y)` is the class of a recorded representative path.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, Matrix, Subspace, Q};
use crate::quiver::{ArrowId, LengthFunction, PathWord, TranslationQuiver, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismVector {
    pub source: VertexId,
    pub target: VertexId,
    pub coords: Vec<Q>,
}

impl MorphismVector {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }

    pub fn add(&self, other: &MorphismVector) -> MorphismVector {
        assert_eq!((self.source, self.target), (other.source, other.target));
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        MorphismVector { source: self.source, target: self.target, coords }
    }

    pub fn scale(&self, s: &Q) -> MorphismVector {
        let coords = self.coords.iter().map(|a| a * s).collect();
        MorphismVector { source: self.source, target: self.target, coords }
    }
}

/// `k(x, -)` for one source `x`.
#[derive(Debug)]
struct Representable {
    dims: BTreeMap<VertexId, usize>,
    /// map of each arrow `z -> y` from `k(x, z)` to `k(x, y)`; only stored
    /// when both spaces are non-zero
    arrow_maps: BTreeMap<ArrowId, Matrix>,
    reps: BTreeMap<VertexId, Vec<PathWord>>,
}

impl Representable {
    fn dim(&self, y: VertexId) -> usize {
        self.dims.get(&y).copied().unwrap_or(0)
    }
}

type Filtration = BTreeMap<VertexId, Subspace>;

pub struct MeshCategory {
    tq: TranslationQuiver,
    length: LengthFunction,
    order: Vec<VertexId>,
    sources: Mutex<HashMap<VertexId, Arc<Representable>>>,
    radicals: Mutex<HashMap<(VertexId, usize), Arc<Filtration>>>,
}

impl std::fmt::Debug for MeshCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MeshCategory({} vertices)", self.tq.vertex_count())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionalReport {
    pub x: VertexId,
    pub y: VertexId,
    pub length: usize,
    pub paths: Vec<PathWord>,
    pub rank: usize,
    pub independent: bool,
    /// coefficients of a combination lying in the next radical power
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DimsEntry {
    pub x: VertexId,
    pub y: VertexId,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DimsTable {
    pub pairs: Vec<DimsEntry>,
}

impl MeshCategory {
    /// Fails with [`Error::UnboundedPathSpaces`] when `tq` has no length
    /// function. Disconnected quivers are handled componentwise.
    pub fn new(tq: TranslationQuiver) -> Result<Self> {
        let length = tq.componentwise_length_function().ok_or(Error::UnboundedPathSpaces)?;
        let mut order: Vec<VertexId> = tq.vertices().collect();
        order.sort_by_key(|v| (length[v], *v));
        Ok(MeshCategory {
            tq,
            length,
            order,
            sources: Mutex::new(HashMap::new()),
            radicals: Mutex::new(HashMap::new()),
        })
    }

    pub fn quiver(&self) -> &TranslationQuiver {
        &self.tq
    }

    pub fn length(&self, v: VertexId) -> i64 {
        self.length[&v]
    }

    /// `l(y) - l(x)`; meaningful only when both lie in one component.
    pub fn distance(&self, x: VertexId, y: VertexId) -> i64 {
        self.length[&y] - self.length[&x]
    }

    fn representable(&self, x: VertexId) -> Arc<Representable> {
        if let Some(r) = self.sources.lock().unwrap().get(&x) {
            return r.clone();
        }
        let r = Arc::new(self.compute_representable(x));
        self.sources.lock().unwrap().entry(x).or_insert(r).clone()
    }

    fn compute_representable(&self, x: VertexId) -> Representable {
        let tq = &self.tq;
        let lx = self.length[&x];
        let mut dims = BTreeMap::from([(x, 1usize)]);
        let mut reps = BTreeMap::from([(x, vec![PathWord::trivial(x)])]);
        let mut arrow_maps: BTreeMap<ArrowId, Matrix> = BTreeMap::new();
        for &y in &self.order {
            if self.length[&y] <= lx {
                continue;
            }
            // summands of W, one per arrow into y with non-zero k(x, source)
            let mut summands: Vec<(ArrowId, VertexId, usize, usize)> = Vec::new();
            let mut total = 0;
            for &a in tq.in_arrows(y) {
                let z = tq.source(a);
                let d = dims.get(&z).copied().unwrap_or(0);
                if d > 0 {
                    summands.push((a, z, total, d));
                    total += d;
                }
            }
            if total == 0 {
                continue;
            }
            let mut relations = Subspace::zero(total);
            if let Some(t) = tq.tau(y) {
                let dt = dims.get(&t).copied().unwrap_or(0);
                for j in 0..dt {
                    let mut w = vec![Q::zero(); total];
                    for &(a, z, off, _) in &summands {
                        let Some(s) = tq.sigma(a) else { continue };
                        if tq.source(s) != t || tq.target(s) != z {
                            continue;
                        }
                        if let Some(m) = arrow_maps.get(&s) {
                            for (i, v) in m.column(j).into_iter().enumerate() {
                                w[off + i] = v;
                            }
                        }
                    }
                    relations.insert(w);
                }
            }
            let free = relations.free_columns();
            if free.is_empty() {
                continue;
            }
            let dy = free.len();
            let mut pos_of = vec![usize::MAX; total];
            for (k, &c) in free.iter().enumerate() {
                pos_of[c] = k;
            }
            let mut yreps = Vec::with_capacity(dy);
            for &c in &free {
                let &(a, z, off, _) = summands.iter().find(|s| s.2 <= c && c < s.2 + s.3).unwrap();
                let mut p = reps[&z][c - off].clone();
                p.arrows.push(a);
                yreps.push(p);
            }
            for &(a, _, off, d) in &summands {
                let mut m = Matrix::zeros(dy, d);
                for j in 0..d {
                    let mut e = vec![Q::zero(); total];
                    e[off + j] = Q::one();
                    let r = relations.reduce(&e);
                    for (k, &c) in free.iter().enumerate() {
                        m[(k, j)] = r[c].clone();
                    }
                }
                arrow_maps.insert(a, m);
            }
            dims.insert(y, dy);
            reps.insert(y, yreps);
        }
        Representable { dims, arrow_maps, reps }
    }

    pub fn dim(&self, x: VertexId, y: VertexId) -> usize {
        self.representable(x).dim(y)
    }

    /// Representative paths of the basis of `k(x, y)`.
    pub fn basis_paths(&self, x: VertexId, y: VertexId) -> Vec<PathWord> {
        self.representable(x).reps.get(&y).cloned().unwrap_or_default()
    }

    pub fn basis(&self, x: VertexId, y: VertexId) -> Vec<MorphismVector> {
        let d = self.dim(x, y);
        (0..d)
            .map(|i| {
                let mut coords = vec![Q::zero(); d];
                coords[i] = Q::one();
                MorphismVector { source: x, target: y, coords }
            })
            .collect()
    }

    pub fn zero(&self, x: VertexId, y: VertexId) -> MorphismVector {
        MorphismVector { source: x, target: y, coords: vec![Q::zero(); self.dim(x, y)] }
    }

    pub fn identity(&self, x: VertexId) -> MorphismVector {
        MorphismVector { source: x, target: x, coords: vec![Q::one()] }
    }

    fn push_along(&self, rep: &Representable, mut v: Vec<Q>, at: VertexId, arrows: &[ArrowId]) -> (VertexId, Vec<Q>) {
        let mut at = at;
        for &a in arrows {
            let t = self.tq.target(a);
            v = match rep.arrow_maps.get(&a) {
                Some(m) if !is_zero_vec(&v) => m.mul_vec(&v),
                _ => vec![Q::zero(); rep.dim(t)],
            };
            at = t;
        }
        (at, v)
    }

    /// Class of a path in the mesh category.
    pub fn path_class(&self, p: &PathWord) -> Result<MorphismVector> {
        let end = self.tq.check_path(p)?;
        let rep = self.representable(p.start);
        let (_, coords) = self.push_along(&rep, vec![Q::one()], p.start, &p.arrows);
        Ok(MorphismVector { source: p.start, target: end, coords })
    }

    /// `g . f` for `f: x -> y` and `g: y -> z`.
    pub fn compose(&self, g: &MorphismVector, f: &MorphismVector) -> MorphismVector {
        assert_eq!(f.target, g.source, "morphisms are not composable");
        let rep = self.representable(f.source);
        let (x, y, z) = (f.source, f.target, g.target);
        let mut out = vec![Q::zero(); rep.dim(z)];
        if !f.is_zero() && !g.is_zero() {
            for (coef, path) in g.coords.iter().zip(self.basis_paths(y, z)) {
                if coef.is_zero() {
                    continue;
                }
                let (_, v) = self.push_along(&rep, f.coords.clone(), y, &path.arrows);
                for (o, a) in out.iter_mut().zip(v) {
                    *o += coef * a;
                }
            }
        }
        MorphismVector { source: x, target: z, coords: out }
    }

    /// `R^n k(x, y)` as a subspace of `k(x, y)`, through
    /// `R^n(x, y) = sum over arrows a: z -> y of a . R^{n-1}(x, z)`.
    pub fn radical_power(&self, x: VertexId, y: VertexId, n: usize) -> Subspace {
        let d = self.dim(x, y);
        if n == 0 {
            return Subspace::full(d);
        }
        self.filtration(x, n).get(&y).cloned().unwrap_or_else(|| Subspace::zero(d))
    }

    fn filtration(&self, x: VertexId, n: usize) -> Arc<Filtration> {
        if let Some(f) = self.radicals.lock().unwrap().get(&(x, n)) {
            return f.clone();
        }
        let rep = self.representable(x);
        let mut out = Filtration::new();
        let prev = if n > 1 { Some(self.filtration(x, n - 1)) } else { None };
        for (&y, &dy) in &rep.dims {
            let mut s = Subspace::zero(dy);
            for &a in self.tq.in_arrows(y) {
                let z = self.tq.source(a);
                let Some(m) = rep.arrow_maps.get(&a) else { continue };
                match &prev {
                    None => {
                        for j in 0..m.cols() {
                            s.insert(m.column(j));
                        }
                    }
                    Some(p) => {
                        if let Some(sub) = p.get(&z) {
                            for v in sub.basis() {
                                s.insert(m.mul_vec(v));
                            }
                        }
                    }
                }
            }
            if !s.is_zero() {
                out.insert(y, s);
            }
        }
        let out = Arc::new(out);
        self.radicals.lock().unwrap().entry((x, n)).or_insert(out).clone()
    }

    /// `R^n(x, y)` spanned literally by `R^1(z, y) . R^{n-1}(x, z)` over
    /// every vertex `z`, with `R^1` the span of positive-length path
    /// classes. Quadratic in the quiver; used to cross-check.
    pub fn radical_power_literal(&self, x: VertexId, y: VertexId, n: usize) -> Subspace {
        let d = self.dim(x, y);
        if n == 0 {
            return Subspace::full(d);
        }
        let r1 = |a: VertexId, b: VertexId| -> Vec<MorphismVector> {
            if a == b {
                Vec::new()
            } else {
                self.basis_paths(a, b).iter().map(|p| self.path_class(p).unwrap()).collect()
            }
        };
        if n == 1 {
            return Subspace::span(d, r1(x, y).into_iter().map(|m| m.coords));
        }
        let mut s = Subspace::zero(d);
        for z in self.tq.vertices() {
            let lower = self.radical_power_literal(x, z, n - 1);
            if lower.is_zero() {
                continue;
            }
            for g in r1(z, y) {
                for v in lower.basis() {
                    let f = MorphismVector { source: x, target: z, coords: v.clone() };
                    s.insert(self.compose(&g, &f).coords);
                }
            }
        }
        s
    }

    /// `[dim k(x,y), dim R^1, ...]` up to and including the first zero.
    pub fn radical_dims(&self, x: VertexId, y: VertexId) -> Vec<usize> {
        let mut dims = vec![self.dim(x, y)];
        let mut n = 1;
        while *dims.last().unwrap() > 0 {
            dims.push(self.radical_power(x, y, n).dim());
            n += 1;
        }
        dims
    }

    pub fn dims_table(&self) -> DimsTable {
        let mut pairs = Vec::new();
        for x in self.tq.vertices() {
            let rep = self.representable(x);
            for &y in rep.dims.keys() {
                pairs.push(DimsEntry { x, y, dims: self.radical_dims(x, y) });
            }
        }
        DimsTable { pairs }
    }

    /// Classes of the sectional paths `x -> y` of common length `n` must be
    /// independent modulo `R^{n+1}`.
    pub fn sectional_independence(&self, x: VertexId, y: VertexId) -> SectionalReport {
        let n = self.distance(x, y);
        let paths: Vec<PathWord> = if n < 0 {
            Vec::new()
        } else {
            self.tq
                .sectional_paths_from(x, n as usize)
                .into_iter()
                .filter(|p| self.tq.path_end(p).ok() == Some(y))
                .collect()
        };
        let n = n.max(0) as usize;
        let next = self.radical_power(x, y, n + 1);
        let reduced: Vec<Vec<Q>> = paths.iter().map(|p| next.reduce(&self.path_class(p).unwrap().coords)).collect();
        let d = self.dim(x, y);
        let rank = Subspace::span(d, reduced.iter().cloned()).dim();
        let witness = if rank < paths.len() {
            crate::linalg::column_relations(d, &reduced).first().map(|v| v.iter().map(crate::linalg::fmt_q).collect())
        } else {
            None
        };
        SectionalReport { x, y, length: n, independent: rank == paths.len(), rank, paths, witness }
    }

    /// Every relation `sum_beta beta . sigma(beta)` at a mesh, as a class.
    pub fn mesh_relation(&self, x: VertexId) -> Option<MorphismVector> {
        let mesh = self.tq.mesh(x)?;
        let mut acc = self.zero(mesh.start, x);
        for arm in mesh.arms {
            let p = PathWord::new(mesh.start, vec![arm.alpha, arm.beta]);
            acc = acc.add(&self.path_class(&p).ok()?);
        }
        Some(acc)
    }
}
