use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, Matrix, Subspace, Q};

use super::quiver::Quiver;

/// A representation of an acyclic quiver: a space per vertex and a matrix
/// `dim(target) x dim(source)` per arrow, acting forwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rep {
    quiver: Arc<Quiver>,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Rep {
    pub fn new(quiver: Arc<Quiver>, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        if dims.len() != quiver.vertex_count() || maps.len() != quiver.arrow_count() {
            return Err(Error::Shape("dimension vector or arrow list has the wrong length".into()));
        }
        for (k, m) in maps.iter().enumerate() {
            let (id, s, t) = quiver.arrow(k);
            if m.shape() != (dims[t], dims[s]) {
                return Err(Error::Shape(format!(
                    "arrow {id}: expected {}x{}, got {}x{}",
                    dims[t],
                    dims[s],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Rep { quiver, dims, maps })
    }

    pub fn zero(quiver: Arc<Quiver>) -> Self {
        let dims = vec![0; quiver.vertex_count()];
        let maps = vec![Matrix::zeros(0, 0); quiver.arrow_count()];
        Rep { quiver, dims, maps }
    }

    pub fn simple(quiver: Arc<Quiver>, i: usize) -> Self {
        let mut dims = vec![0; quiver.vertex_count()];
        dims[i] = 1;
        let maps = quiver.arrows().iter().map(|&(_, s, t)| Matrix::zeros(dims[t], dims[s])).collect();
        Rep { quiver, dims, maps }
    }

    /// Paths out of `i`: the basis at `j` is the list of paths `i ~> j` in
    /// [`Quiver::paths_from`] order.
    pub fn projective(quiver: Arc<Quiver>, i: usize) -> Self {
        let paths = quiver.paths_from(i);
        let dims: Vec<usize> = paths.iter().map(Vec::len).collect();
        let maps = quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, &(_, s, t))| {
                let mut m = Matrix::zeros(dims[t], dims[s]);
                for (c, p) in paths[s].iter().enumerate() {
                    let mut q = p.clone();
                    q.push(k);
                    let r = paths[t].iter().position(|x| *x == q).expect("path extension");
                    m[(r, c)] = Q::one();
                }
                m
            })
            .collect();
        Rep { quiver, dims, maps }
    }

    /// `D` of the projective at `i` over the opposite quiver.
    pub fn injective(quiver: Arc<Quiver>, i: usize) -> Self {
        let op = Arc::new(quiver.opposite());
        Rep::projective(op, i).dual(quiver)
    }

    /// Vector-space dual, a representation over `target` (the opposite
    /// quiver of this one's base, arrows matched by position).
    pub fn dual(&self, target: Arc<Quiver>) -> Rep {
        let maps = self.maps.iter().map(Matrix::transpose).collect();
        Rep { quiver: target, dims: self.dims.clone(), maps }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn map(&self, k: usize) -> &Matrix {
        &self.maps[k]
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn same_base(&self, other: &Rep) -> bool {
        Arc::ptr_eq(&self.quiver, &other.quiver) || *self.quiver == *other.quiver
    }

    /// Direct sum with its canonical inclusions and projections.
    pub fn direct_sum(quiver: Arc<Quiver>, parts: &[&Rep]) -> (Rep, Vec<Morphism>, Vec<Morphism>) {
        let n = quiver.vertex_count();
        let dims: Vec<usize> = (0..n).map(|v| parts.iter().map(|p| p.dims[v]).sum()).collect();
        let maps = quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, &(_, s, t))| {
                let mut m = Matrix::zeros(dims[t], dims[s]);
                let (mut r0, mut c0) = (0, 0);
                for p in parts {
                    let b = &p.maps[k];
                    for r in 0..b.rows() {
                        for c in 0..b.cols() {
                            m[(r0 + r, c0 + c)] = b[(r, c)].clone();
                        }
                    }
                    r0 += p.dims[t];
                    c0 += p.dims[s];
                }
                m
            })
            .collect();
        let sum = Rep { quiver, dims: dims.clone(), maps };
        let mut offset = vec![0usize; n];
        let mut incl = Vec::new();
        let mut proj = Vec::new();
        for p in parts {
            let mut ib = Vec::with_capacity(n);
            let mut pb = Vec::with_capacity(n);
            for v in 0..n {
                let mut i = Matrix::zeros(dims[v], p.dims[v]);
                let mut q = Matrix::zeros(p.dims[v], dims[v]);
                for j in 0..p.dims[v] {
                    i[(offset[v] + j, j)] = Q::one();
                    q[(j, offset[v] + j)] = Q::one();
                }
                ib.push(i);
                pb.push(q);
                offset[v] += p.dims[v];
            }
            incl.push(Morphism { blocks: ib });
            proj.push(Morphism { blocks: pb });
        }
        (sum, incl, proj)
    }

    pub fn to_dump(&self) -> RepDump {
        RepDump {
            dims: self
                .quiver
                .vertex_ids()
                .iter()
                .zip(&self.dims)
                .map(|(&v, &d)| VertexDim { vertex: v, dim: d })
                .collect(),
            arrows: self
                .quiver
                .arrows()
                .iter()
                .zip(&self.maps)
                .map(|(&(id, _, _), m)| ArrowMatrix {
                    arrow: id,
                    rows: m.rows(),
                    cols: m.cols(),
                    entries: (0..m.rows()).map(|r| m.row(r).iter().map(fmt_q).collect()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RepDump {
    pub dims: Vec<VertexDim>,
    pub arrows: Vec<ArrowMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexDim {
    pub vertex: u32,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowMatrix {
    pub arrow: u32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

/// A family of linear maps, one `dim N_v x dim M_v` block per vertex.
/// Source and target are carried by the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub blocks: Vec<Matrix>,
}

impl Morphism {
    pub fn zero(m: &Rep, n: &Rep) -> Self {
        Morphism { blocks: (0..m.dims.len()).map(|v| Matrix::zeros(n.dims[v], m.dims[v])).collect() }
    }

    pub fn identity(m: &Rep) -> Self {
        Morphism { blocks: m.dims.iter().map(|&d| Matrix::identity(d)).collect() }
    }

    /// `self ∘ f`
    pub fn after(&self, f: &Morphism) -> Morphism {
        Morphism { blocks: self.blocks.iter().zip(&f.blocks).map(|(g, f)| g.mul(f)).collect() }
    }

    pub fn add(&self, other: &Morphism) -> Morphism {
        Morphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Morphism) -> Morphism {
        Morphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &Q) -> Morphism {
        Morphism { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn trace(&self) -> Q {
        self.blocks.iter().map(Matrix::trace).sum()
    }

    /// Blocks transposed: the dual morphism `D N -> D M`.
    pub fn dual(&self) -> Morphism {
        Morphism { blocks: self.blocks.iter().map(Matrix::transpose).collect() }
    }

    /// Row-major concatenation of the blocks.
    pub fn to_vec(&self) -> Vec<Q> {
        self.blocks.iter().flat_map(|b| b.data().iter().cloned()).collect()
    }

    pub fn from_vec(m: &Rep, n: &Rep, v: &[Q]) -> Morphism {
        let mut at = 0;
        let blocks = (0..m.dims.len())
            .map(|i| {
                let len = n.dims[i] * m.dims[i];
                let b = Matrix::from_flat(n.dims[i], m.dims[i], v[at..at + len].to_vec());
                at += len;
                b
            })
            .collect();
        Morphism { blocks }
    }

    pub fn flat_len(m: &Rep, n: &Rep) -> usize {
        m.dims.iter().zip(&n.dims).map(|(a, b)| a * b).sum()
    }

    pub fn fits(&self, m: &Rep, n: &Rep) -> bool {
        self.blocks.len() == m.dims.len()
            && self.blocks.iter().enumerate().all(|(v, b)| b.shape() == (n.dims[v], m.dims[v]))
    }

    /// Whether this is a morphism of representations `m -> n`.
    pub fn is_intertwiner(&self, m: &Rep, n: &Rep) -> bool {
        self.fits(m, n)
            && m.quiver
                .arrows()
                .iter()
                .enumerate()
                .all(|(k, &(_, s, t))| self.blocks[t].mul(&m.maps[k]) == n.maps[k].mul(&self.blocks[s]))
    }

    pub fn is_mono(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols())
    }

    pub fn is_epi(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows())
    }

    pub fn is_iso(&self) -> bool {
        self.blocks.iter().all(Matrix::is_invertible)
    }

    /// `[f_1; ...; f_r]: X -> Y_1 ⊕ ... ⊕ Y_r`
    pub fn column(parts: &[Morphism], source: &Rep) -> Morphism {
        let blocks = (0..source.dims.len())
            .map(|v| {
                let bs: Vec<&Matrix> = parts.iter().map(|p| &p.blocks[v]).collect();
                Matrix::vstack(source.dims[v], &bs)
            })
            .collect();
        Morphism { blocks }
    }

    /// `[g_1, ..., g_r]: Y_1 ⊕ ... ⊕ Y_r -> Z`
    pub fn row(parts: &[Morphism], target: &Rep) -> Morphism {
        let blocks = (0..target.dims.len())
            .map(|v| {
                let bs: Vec<&Matrix> = parts.iter().map(|p| &p.blocks[v]).collect();
                Matrix::hstack(target.dims[v], &bs)
            })
            .collect();
        Morphism { blocks }
    }
}

/// `Ker f` with its inclusion into `m`.
pub fn kernel(f: &Morphism, m: &Rep) -> (Rep, Morphism) {
    let q = &m.quiver;
    let mut incl = Vec::with_capacity(m.dims.len());
    let mut left = Vec::with_capacity(m.dims.len());
    for (v, b) in f.blocks.iter().enumerate() {
        let basis = b.nullspace();
        let cols = basis.len();
        let mut e = Matrix::zeros(m.dims[v], cols);
        for (c, vec) in basis.iter().enumerate() {
            for (r, x) in vec.iter().enumerate() {
                e[(r, c)] = x.clone();
            }
        }
        left.push(e.left_inverse().unwrap_or_else(|| Matrix::zeros(0, m.dims[v])));
        incl.push(e);
    }
    let dims: Vec<usize> = incl.iter().map(Matrix::cols).collect();
    let maps = q.arrows().iter().enumerate().map(|(k, &(_, s, t))| left[t].mul(&m.maps[k]).mul(&incl[s])).collect();
    (Rep { quiver: q.clone(), dims, maps }, Morphism { blocks: incl })
}

/// `Coker f` with its projection from `n`. The quotient at each vertex is
/// identified with the free coordinates of the image's echelon form.
pub fn cokernel(f: &Morphism, n: &Rep) -> (Rep, Morphism) {
    let q = &n.quiver;
    let mut proj = Vec::with_capacity(n.dims.len());
    let mut section = Vec::with_capacity(n.dims.len());
    for (v, b) in f.blocks.iter().enumerate() {
        let image = Subspace::span(n.dims[v], (0..b.cols()).map(|c| b.column(c)));
        let free = image.free_columns();
        let mut p = Matrix::zeros(free.len(), n.dims[v]);
        for j in 0..n.dims[v] {
            let mut e = vec![Q::zero(); n.dims[v]];
            e[j] = Q::one();
            let r = image.reduce(&e);
            for (i, &c) in free.iter().enumerate() {
                p[(i, j)] = r[c].clone();
            }
        }
        let mut s = Matrix::zeros(n.dims[v], free.len());
        for (i, &c) in free.iter().enumerate() {
            s[(c, i)] = Q::one();
        }
        proj.push(p);
        section.push(s);
    }
    let dims: Vec<usize> = proj.iter().map(Matrix::rows).collect();
    let maps = q.arrows().iter().enumerate().map(|(k, &(_, s, t))| proj[t].mul(&n.maps[k]).mul(&section[s])).collect();
    (Rep { quiver: q.clone(), dims, maps }, Morphism { blocks: proj })
}

/// The morphism `P_j -> P_i` given by left multiplication with a path
/// `i ~> j` (arrow indices): a path `q` out of `j` goes to `p q`.
pub fn map_from_path(quiver: &Arc<Quiver>, path: &[usize], i: usize) -> Result<Morphism> {
    let mut at = i;
    for (pos, &k) in path.iter().enumerate() {
        let (_, s, t) = quiver.arrow(k);
        if s != at {
            return Err(Error::NotComposable { position: pos });
        }
        at = t;
    }
    let j = at;
    let from = quiver.paths_from(j);
    let to = quiver.paths_from(i);
    let blocks = (0..quiver.vertex_count())
        .map(|v| {
            let mut m = Matrix::zeros(to[v].len(), from[v].len());
            for (c, q) in from[v].iter().enumerate() {
                let mut pq = path.to_vec();
                pq.extend_from_slice(q);
                let r = to[v].iter().position(|x| *x == pq).expect("composite path");
                m[(r, c)] = Q::one();
            }
            m
        })
        .collect();
    Ok(Morphism { blocks })
}
