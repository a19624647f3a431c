//! Well-behaved assignments: a morphism for every cover arrow such that
//! interior meshes go to almost split sequences.
//!
//! Pins are pushed towards smaller length first: at a vertex with a pinned
//! arrow the in-tuple is completed and the arrows leaving its translate are
//! read off the kernel. Everything else is then filled in by increasing
//! length, through cokernels where a whole mesh is available.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lin_comb, Matrix, Q};
use crate::quiver::{ArrowId, VertexId};
use crate::rep::{cokernel, hom, kernel, tuple_irreducible, ArQuiver, Morphism, Radicals, Rep};

use super::GenericCover;

#[derive(Clone, Debug, Default, Serialize)]
pub struct AssignmentCheck {
    pub interior_vertices: usize,
    pub meshes_checked: usize,
    pub failures: Vec<String>,
}

impl AssignmentCheck {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct WellBehavedAssignment {
    /// cover arrow -> morphism between the modules at its ends
    pub maps: BTreeMap<ArrowId, Morphism>,
    pub check: AssignmentCheck,
}

impl WellBehavedAssignment {
    pub fn map(&self, a: ArrowId) -> &Morphism {
        &self.maps[&a]
    }
}

/// One arm of a cover mesh: `alpha: x -> m`, `beta: m -> z`.
struct Arm {
    alpha: ArrowId,
    beta: ArrowId,
    middle: VertexId,
}

struct Builder<'a> {
    gc: &'a GenericCover,
    ar: &'a ArQuiver,
    rads: Radicals<'a>,
    maps: BTreeMap<ArrowId, Morphism>,
}

/// Small deterministic integer sequence for the invertibility search.
fn coefficients(seed: &mut u64, n: usize) -> Vec<Q> {
    (0..n)
        .map(|_| {
            *seed ^= *seed << 13;
            *seed ^= *seed >> 7;
            *seed ^= *seed << 17;
            Q::from_integer(((*seed % 7) as i64 - 3).into())
        })
        .collect()
}

/// An isomorphism `a -> b` meeting linear constraints `L_i(ψ) = target_i`.
fn constrained_iso(
    a: &Rep,
    b: &Rep,
    constraints: &[(&dyn Fn(&Morphism) -> Morphism, &Morphism)],
) -> Result<Option<Morphism>> {
    if a.dims() != b.dims() {
        return Ok(None);
    }
    let h = hom(a, b)?;
    let n = h.basis.len();
    let images: Vec<Vec<Q>> =
        h.basis.iter().map(|g| constraints.iter().flat_map(|(l, _)| l(g).to_vec()).collect()).collect();
    let rhs: Vec<Q> = constraints.iter().flat_map(|(_, t)| t.to_vec()).collect();
    let (c0, null) = if rhs.is_empty() {
        (vec![Q::from_integer(0.into()); n], (0..n).map(|i| unit(n, i)).collect())
    } else {
        let m = Matrix::from_rows(
            rhs.len(),
            n,
            (0..rhs.len()).map(|r| images.iter().map(|c| c[r].clone()).collect()).collect(),
        );
        match m.solve(&rhs) {
            Some(c) => (c, m.nullspace()),
            None => return Ok(None),
        }
    };
    let build = |c: &[Q]| {
        let v = lin_comb(c, &h.basis.iter().map(|g| g.to_vec()).collect::<Vec<_>>());
        Morphism::from_vec(a, b, &v)
    };
    let mut tries: Vec<Vec<Q>> = vec![c0.clone()];
    for v in &null {
        tries.push(c0.iter().zip(v).map(|(x, y)| x + y).collect());
    }
    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..400 {
        let s = coefficients(&mut seed, null.len());
        let mut c = c0.clone();
        for (k, v) in null.iter().enumerate() {
            for (x, y) in c.iter_mut().zip(v) {
                *x += &s[k] * y;
            }
        }
        tries.push(c);
    }
    Ok(tries.iter().map(|c| build(c)).find(|f| f.is_iso()))
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    (0..n).map(|k| Q::from_integer(i64::from(k == i).into())).collect()
}

impl<'a> Builder<'a> {
    fn module(&self, v: VertexId) -> &'a Rep {
        self.ar.module(self.gc.pi(v))
    }

    fn blocked(v: VertexId, reason: impl Into<String>) -> Error {
        Error::Blocked { vertex: v, reason: reason.into() }
    }

    /// Arms of the mesh ending at `z` when it lies wholly in the cover.
    fn arms(&self, z: VertexId) -> Option<(VertexId, Vec<Arm>)> {
        let c = &self.gc.cover;
        let b = &self.gc.base;
        let x = c.tau(z)?;
        if c.in_arrows(z).len() != b.in_arrows(self.gc.pi(z)).len()
            || c.out_arrows(x).len() != b.out_arrows(self.gc.pi(x)).len()
        {
            return None;
        }
        let mut arms = Vec::new();
        for &beta in c.in_arrows(z) {
            let alpha = c.sigma(beta)?;
            if c.source(alpha) != x {
                return None;
            }
            arms.push(Arm { alpha, beta, middle: c.source(beta) });
        }
        (arms.len() == c.out_arrows(x).len()).then_some((x, arms))
    }

    /// Assigns every unassigned arrow into `z`, keeping the arrows from each
    /// source independent modulo rad².
    fn complete_in(&mut self, z: VertexId) -> Result<()> {
        let c = &self.gc.cover;
        let pz = self.gc.pi(z);
        let mut by_source: BTreeMap<VertexId, Vec<ArrowId>> = BTreeMap::new();
        for &a in c.in_arrows(z) {
            by_source.entry(c.source(a)).or_default().push(a);
        }
        for (m, arrows) in by_source {
            let pm = self.gc.pi(m);
            let rad2 = self.rads.rad(pm, pz, 2)?;
            let rad1 = self.rads.rad(pm, pz, 1)?;
            let mut span = rad2.clone();
            for a in &arrows {
                if let Some(f) = self.maps.get(a) {
                    if !span.insert(f.to_vec()) {
                        return Err(Self::blocked(z, format!("assigned arrows from {m} are dependent modulo rad²")));
                    }
                }
            }
            let mut candidates: Vec<Vec<Q>> =
                self.gc.base.arrows_between(pm, pz).into_iter().map(|b| self.ar.map(b).to_vec()).collect();
            candidates.extend(rad1.basis().iter().cloned());
            for &a in &arrows {
                if self.maps.contains_key(&a) {
                    continue;
                }
                let pick = candidates
                    .iter()
                    .find(|v| !span.contains(v))
                    .cloned()
                    .ok_or_else(|| Self::blocked(z, format!("no irreducible morphism left from {m}")))?;
                span.insert(pick.clone());
                self.maps.insert(a, Morphism::from_vec(self.module(m), self.module(z), &pick));
            }
        }
        Ok(())
    }

    fn middles_sum(&self, arms: &[Arm]) -> (Rep, Vec<Morphism>, Vec<Morphism>) {
        let parts: Vec<&Rep> = arms.iter().map(|arm| self.module(arm.middle)).collect();
        Rep::direct_sum(self.ar.base.clone(), &parts)
    }

    /// Arrows out of `x = τz` from the kernel of the complete in-tuple at
    /// `z`, matching those already assigned.
    fn kernel_rule(&mut self, z: VertexId, x: VertexId, arms: &[Arm]) -> Result<Vec<VertexId>> {
        let (sum, _, proj) = self.middles_sum(arms);
        let betas: Vec<Morphism> = arms.iter().map(|arm| self.maps[&arm.beta].clone()).collect();
        let row = Morphism::row(&betas, self.module(z));
        let (ker, incl) = kernel(&row, &sum);
        let fixed: Vec<(usize, Morphism)> =
            arms.iter().enumerate().filter_map(|(i, arm)| self.maps.get(&arm.alpha).map(|f| (i, f.clone()))).collect();
        let lifts: Vec<Box<dyn Fn(&Morphism) -> Morphism>> = fixed
            .iter()
            .map(|(i, _)| {
                let p = proj[*i].after(&incl);
                Box::new(move |psi: &Morphism| p.after(psi)) as Box<dyn Fn(&Morphism) -> Morphism>
            })
            .collect();
        let constraints: Vec<(&dyn Fn(&Morphism) -> Morphism, &Morphism)> =
            lifts.iter().zip(&fixed).map(|(l, (_, f))| (l.as_ref(), f)).collect();
        let psi = constrained_iso(self.module(x), &ker, &constraints)?
            .ok_or_else(|| Self::blocked(z, "kernel of the in-tuple does not fit the translate"))?;
        let inj = incl.after(&psi);
        let mut touched = Vec::new();
        for (i, arm) in arms.iter().enumerate() {
            if !self.maps.contains_key(&arm.alpha) {
                self.maps.insert(arm.alpha, proj[i].after(&inj));
                touched.push(arm.middle);
            }
        }
        Ok(touched)
    }

    /// Arrows into `z` from the cokernel of the out-tuple at `τz`.
    fn cokernel_rule(&mut self, z: VertexId, x: VertexId, arms: &[Arm]) -> Result<()> {
        let (sum, inc, _) = self.middles_sum(arms);
        let alphas: Vec<Morphism> = arms.iter().map(|arm| self.maps[&arm.alpha].clone()).collect();
        let col = Morphism::column(&alphas, self.module(x));
        let (cok, p) = cokernel(&col, &sum);
        let fixed: Vec<(usize, Morphism)> =
            arms.iter().enumerate().filter_map(|(i, arm)| self.maps.get(&arm.beta).map(|f| (i, f.clone()))).collect();
        let pulls: Vec<Box<dyn Fn(&Morphism) -> Morphism>> = fixed
            .iter()
            .map(|(i, _)| {
                let q = p.after(&inc[*i]);
                Box::new(move |psi: &Morphism| psi.after(&q)) as Box<dyn Fn(&Morphism) -> Morphism>
            })
            .collect();
        let constraints: Vec<(&dyn Fn(&Morphism) -> Morphism, &Morphism)> =
            pulls.iter().zip(&fixed).map(|(l, (_, f))| (l.as_ref(), f)).collect();
        let psi = constrained_iso(&cok, self.module(z), &constraints)?
            .ok_or_else(|| Self::blocked(z, "cokernel of the out-tuple at the translate is not the module here"))?;
        let out = psi.after(&p);
        for (i, arm) in arms.iter().enumerate() {
            self.maps.entry(arm.beta).or_insert_with(|| out.after(&inc[i]));
        }
        Ok(())
    }

    fn validate_pins(&self, pinned: &BTreeMap<ArrowId, Morphism>) -> Result<()> {
        let c = &self.gc.cover;
        let mut outs: BTreeMap<VertexId, Vec<(VertexId, Morphism)>> = BTreeMap::new();
        let mut ins: BTreeMap<VertexId, Vec<(VertexId, Morphism)>> = BTreeMap::new();
        for (&a, f) in pinned {
            let arrow = c.arrow(a).ok_or(Error::UnknownArrow(a))?;
            let (s, t) = (arrow.source, arrow.target);
            let (ps, pt) = (self.gc.pi(s), self.gc.pi(t));
            if !f.is_intertwiner(self.module(s), self.module(t)) {
                return Err(Error::Shape(format!("pin on arrow {a} is not a morphism between its end modules")));
            }
            if !crate::rep::is_irreducible(&self.rads, ps, pt, f)? {
                return Err(Error::NotIrreducible(format!("pin on arrow {a}")));
            }
            outs.entry(s).or_default().push((pt, f.clone()));
            ins.entry(t).or_default().push((ps, f.clone()));
        }
        for (v, parts) in outs {
            if !tuple_irreducible(&self.rads, self.gc.pi(v), &parts, false)? {
                return Err(Error::NotIrreducible(format!("pins leaving cover vertex {v} are jointly reducible")));
            }
        }
        for (v, parts) in ins {
            if !tuple_irreducible(&self.rads, self.gc.pi(v), &parts, true)? {
                return Err(Error::NotIrreducible(format!("pins entering cover vertex {v} are jointly reducible")));
            }
        }
        Ok(())
    }

    fn verify(&self) -> Result<AssignmentCheck> {
        let c = &self.gc.cover;
        let mut chk = AssignmentCheck::default();
        for z in self.gc.interior() {
            chk.interior_vertices += 1;
            let pz = self.gc.pi(z);
            let outs: Vec<(VertexId, Morphism)> =
                c.out_arrows(z).iter().map(|&a| (self.gc.pi(c.target(a)), self.maps[&a].clone())).collect();
            let ins: Vec<(VertexId, Morphism)> =
                c.in_arrows(z).iter().map(|&a| (self.gc.pi(c.source(a)), self.maps[&a].clone())).collect();
            if !outs.is_empty() && !tuple_irreducible(&self.rads, pz, &outs, false)? {
                chk.failures.push(format!("out-tuple at {z} is not irreducible"));
            }
            if !ins.is_empty() && !tuple_irreducible(&self.rads, pz, &ins, true)? {
                chk.failures.push(format!("in-tuple at {z} is not irreducible"));
            }
            let Some((x, arms)) = self.arms(z) else { continue };
            chk.meshes_checked += 1;
            let (sum, _, _) = self.middles_sum(&arms);
            let alphas: Vec<Morphism> = arms.iter().map(|a| self.maps[&a.alpha].clone()).collect();
            let betas: Vec<Morphism> = arms.iter().map(|a| self.maps[&a.beta].clone()).collect();
            let col = Morphism::column(&alphas, self.module(x));
            let row = Morphism::row(&betas, self.module(z));
            let exact = row.after(&col).is_zero()
                && col.is_mono()
                && row.is_epi()
                && sum.total_dim() == self.module(x).total_dim() + self.module(z).total_dim();
            if !exact {
                chk.failures.push(format!("mesh ending at {z} is not sent to an exact sequence"));
            }
        }
        Ok(chk)
    }
}

/// Extends `pinned` to every arrow of the cover. `ar` must be the knitted
/// component the cover was built over.
pub fn well_behaved_assignment(
    gc: &GenericCover,
    ar: &ArQuiver,
    pinned: &BTreeMap<ArrowId, Morphism>,
) -> Result<WellBehavedAssignment> {
    if ar.tq != gc.base {
        return Err(Error::Invalid("cover was not built over this component".into()));
    }
    let length = gc
        .cover
        .componentwise_length_function()
        .ok_or_else(|| Error::Invalid("cover has no length function".into()))?;
    let mut b = Builder { gc, ar, rads: Radicals::new(ar), maps: BTreeMap::new() };
    b.validate_pins(pinned)?;
    b.maps = pinned.clone();

    // pins travel down to smaller length
    let mut done: BTreeSet<VertexId> = BTreeSet::new();
    let mut heap: BinaryHeap<(i64, VertexId)> =
        pinned.keys().map(|&a| gc.cover.target(a)).map(|t| (length[&t], t)).collect();
    while let Some((_, z)) = heap.pop() {
        if !done.insert(z) {
            continue;
        }
        b.complete_in(z)?;
        if let Some((x, arms)) = b.arms(z) {
            for m in b.kernel_rule(z, x, &arms)? {
                heap.push((length[&m], m));
            }
        }
    }

    let mut order: Vec<VertexId> = gc.cover.vertices().collect();
    order.sort_by_key(|v| (length[v], *v));
    for z in order {
        if done.contains(&z) {
            continue;
        }
        match b.arms(z) {
            Some((x, arms)) if arms.iter().all(|a| b.maps.contains_key(&a.alpha)) => b.cokernel_rule(z, x, &arms)?,
            _ => b.complete_in(z)?,
        }
    }
    let check = b.verify()?;
    Ok(WellBehavedAssignment { maps: b.maps, check })
}
