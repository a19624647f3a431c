use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{q, Matrix, Subspace, Q};

use super::module::{Morphism, Rep};

/// All intertwiners `source -> target`, as an echelonized subspace of the
/// flattened block space.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub space: Subspace,
    pub basis: Vec<Morphism>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn hom(m: &Rep, n: &Rep) -> Result<HomSpace> {
    if !m.same_base(n) {
        return Err(Error::QuiverMismatch);
    }
    let quiver = m.quiver();
    let nv = quiver.vertex_count();
    let mut offset = vec![0usize; nv + 1];
    for v in 0..nv {
        offset[v + 1] = offset[v] + n.dim(v) * m.dim(v);
    }
    let unknowns = offset[nv];
    // g_t M_a - N_a g_s = 0, one row per entry of a dim(N_t) x dim(M_s) matrix
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (k, &(_, s, t)) in quiver.arrows().iter().enumerate() {
        let (ma, na) = (m.map(k), n.map(k));
        for r in 0..n.dim(t) {
            for c in 0..m.dim(s) {
                let mut row = vec![Q::zero(); unknowns];
                for j in 0..m.dim(t) {
                    if !ma[(j, c)].is_zero() {
                        row[offset[t] + r * m.dim(t) + j] += &ma[(j, c)];
                    }
                }
                for j in 0..n.dim(s) {
                    if !na[(r, j)].is_zero() {
                        row[offset[s] + j * m.dim(s) + c] -= &na[(r, j)];
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let null = if rows.is_empty() {
        (0..unknowns)
            .map(|i| {
                let mut e = vec![Q::zero(); unknowns];
                e[i] = Q::one();
                e
            })
            .collect()
    } else {
        Matrix::from_rows(rows.len(), unknowns, rows).nullspace()
    };
    let space = Subspace::span(unknowns, null);
    let basis = space.basis().iter().map(|v| Morphism::from_vec(m, n, v)).collect();
    Ok(HomSpace { space, basis })
}

/// `rad(X, Y)` for indecomposable `X`, `Y`: all of Hom when they are not
/// isomorphic, the non-invertible endomorphisms when `same` says `X = Y`.
/// Non-invertible endomorphisms of an indecomposable are its trace-zero ones.
pub fn radical(m: &Rep, n: &Rep, same: bool) -> Result<Subspace> {
    let h = hom(m, n)?;
    if !same {
        return Ok(h.space);
    }
    Ok(trace_zero_part(&h))
}

fn trace_zero_part(h: &HomSpace) -> Subspace {
    let traces: Vec<Q> = h.basis.iter().map(Morphism::trace).collect();
    let Some(p) = traces.iter().position(|t| !t.is_zero()) else {
        return h.space.clone();
    };
    let vecs = h.basis.iter().enumerate().filter(|&(i, _)| i != p).map(|(i, b)| {
        let c = &traces[i] / &traces[p];
        b.sub(&h.basis[p].scale(&c)).to_vec()
    });
    Subspace::span(h.space.ambient(), vecs)
}

#[derive(Clone, Debug)]
pub struct EndReport {
    pub dim: usize,
    pub indecomposable: bool,
}

/// Absolute indecomposability: End(M) = Q·id ⊕ J with J the trace-zero
/// part closed under composition. In characteristic zero such a J has
/// only nilpotent elements, so End(M) is local with residue field Q.
/// A nontrivial idempotent e would give e - (rk e / dim M)·id in J, which
/// is not nilpotent, so decomposable modules always fail.
pub fn endomorphisms(m: &Rep) -> Result<EndReport> {
    let h = hom(m, m)?;
    if m.is_zero() {
        return Ok(EndReport { dim: 0, indecomposable: false });
    }
    let j = trace_zero_part(&h);
    let jb: Vec<Morphism> = j.basis().iter().map(|v| Morphism::from_vec(m, m, v)).collect();
    let closed = jb.iter().all(|a| jb.iter().all(|b| a.after(b).trace().is_zero()));
    Ok(EndReport { dim: h.dim(), indecomposable: closed && j.dim() + 1 == h.dim() })
}

pub fn is_indecomposable(m: &Rep) -> Result<bool> {
    Ok(endomorphisms(m)?.indecomposable)
}

#[derive(Clone, Debug)]
pub enum IsoResult {
    Isomorphic(Morphism),
    NotIsomorphic(String),
    Unknown,
}

impl IsoResult {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoResult::Isomorphic(_))
    }
}

/// Isomorphism search. `det(Σ c_i h_i)` is a polynomial of degree at most
/// `d = dim M` in each `c_i`, so it vanishes on the whole grid
/// `{0..d}^k` only if it is identically zero; an exhaustive grid search
/// therefore certifies non-isomorphism. Grids above `budget` points
/// return `Unknown` when no isomorphism was met.
pub fn find_iso(m: &Rep, n: &Rep, budget: usize) -> Result<IsoResult> {
    if m.dims() != n.dims() {
        return Ok(IsoResult::NotIsomorphic("dimension vectors differ".into()));
    }
    let h = hom(m, n)?;
    if h.dim() == 0 {
        return Ok(IsoResult::NotIsomorphic("no morphisms".into()));
    }
    for b in &h.basis {
        if b.is_iso() {
            return Ok(IsoResult::Isomorphic(b.clone()));
        }
    }
    let side = m.total_dim() + 1;
    let k = h.dim();
    let grid = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(side)).filter(|&g| g <= budget);
    let points = grid.unwrap_or(budget);
    let mut idx = vec![0usize; k];
    for _ in 0..points {
        let mut acc = Morphism::zero(m, n);
        for (c, b) in idx.iter().zip(&h.basis) {
            if *c != 0 {
                acc = acc.add(&b.scale(&q(*c as i64)));
            }
        }
        if acc.is_iso() {
            return Ok(IsoResult::Isomorphic(acc));
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < side {
                break;
            }
            *d = 0;
        }
    }
    Ok(match grid {
        Some(_) => IsoResult::NotIsomorphic("no invertible combination on the certifying grid".into()),
        None => IsoResult::Unknown,
    })
}
