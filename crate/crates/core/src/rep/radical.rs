use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::Result;
use crate::linalg::Subspace;
use crate::quiver::VertexId;

use super::hom::{find_iso, hom, radical, IsoResult};
use super::knit::{ArQuiver, Direction};
use super::module::{Morphism, Rep};

/// How `rad^n` is unfolded over the component.
///
/// `Left` fixes the target and pushes through the out-arrows of the source
/// (exact when every source reached has all its out-arrows). `Right` fixes
/// the source and pulls back along in-arrows of the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Left,
    Right,
}

type Levels = Arc<Vec<Subspace>>;

/// Radical powers between modules of a knitted component, memoized per
/// fixed endpoint and power.
pub struct Radicals<'a> {
    ar: &'a ArQuiver,
    route: Route,
    memo: Mutex<HashMap<(VertexId, usize), Levels>>,
}

impl<'a> Radicals<'a> {
    /// Picks the exact route: preinjective truncations have complete
    /// out-arrows, preprojective ones complete in-arrows.
    pub fn new(ar: &'a ArQuiver) -> Self {
        let route = match ar.direction {
            Direction::FromInjectives => Route::Left,
            Direction::FromProjectives if ar.truncated => Route::Right,
            Direction::FromProjectives => Route::Left,
        };
        Radicals::with_route(ar, route)
    }

    pub fn with_route(ar: &'a ArQuiver, route: Route) -> Self {
        Radicals { ar, route, memo: Mutex::new(HashMap::new()) }
    }

    pub fn ar(&self) -> &ArQuiver {
        self.ar
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// `rad^n(s, t)` as a subspace of the flattened Hom space.
    pub fn rad(&self, s: VertexId, t: VertexId, n: usize) -> Result<Subspace> {
        Ok(match self.route {
            Route::Left => self.levels(t, n)?[s as usize].clone(),
            Route::Right => self.levels(s, n)?[t as usize].clone(),
        })
    }

    pub fn contains(&self, s: VertexId, t: VertexId, n: usize, f: &Morphism) -> Result<bool> {
        Ok(self.rad(s, t, n)?.contains(&f.to_vec()))
    }

    /// Largest `n <= cap` with `f ∈ rad^n(s, t)`; `None` when `f` lies in
    /// `rad^cap`.
    pub fn depth_of(&self, s: VertexId, t: VertexId, f: &Morphism, cap: usize) -> Result<Option<usize>> {
        let v = f.to_vec();
        for n in 1..=cap {
            if !self.rad(s, t, n)?.contains(&v) {
                return Ok(Some(n - 1));
            }
        }
        Ok(None)
    }

    fn levels(&self, fixed: VertexId, n: usize) -> Result<Levels> {
        if let Some(l) = self.memo.lock().expect("memo").get(&(fixed, n)) {
            return Ok(l.clone());
        }
        let computed = if n == 0 {
            self.level_zero(fixed)?
        } else {
            let prev = self.levels(fixed, n - 1)?;
            self.next_level(fixed, &prev)
        };
        let l = Arc::new(computed);
        Ok(self.memo.lock().expect("memo").entry((fixed, n)).or_insert(l).clone())
    }

    fn level_zero(&self, fixed: VertexId) -> Result<Vec<Subspace>> {
        let f = self.ar.module(fixed);
        self.ar
            .tq
            .vertices()
            .map(|v| {
                let m = self.ar.module(v);
                Ok(match self.route {
                    Route::Left => hom(m, f)?.space,
                    Route::Right => hom(f, m)?.space,
                })
            })
            .collect()
    }

    fn next_level(&self, fixed: VertexId, prev: &[Subspace]) -> Vec<Subspace> {
        let ar = self.ar;
        let f = ar.module(fixed);
        ar.tq
            .vertices()
            .map(|z| {
                let mz = ar.module(z);
                match self.route {
                    Route::Left => {
                        let mut acc = Subspace::zero(Morphism::flat_len(mz, f));
                        for &a in ar.tq.out_arrows(z) {
                            let e = ar.tq.target(a);
                            let me = ar.module(e);
                            for h in prev[e as usize].basis() {
                                let h = Morphism::from_vec(me, f, h);
                                acc.insert(h.after(ar.map(a)).to_vec());
                            }
                        }
                        acc
                    }
                    Route::Right => {
                        let mut acc = Subspace::zero(Morphism::flat_len(f, mz));
                        for &b in ar.tq.in_arrows(z) {
                            let e = ar.tq.source(b);
                            let me = ar.module(e);
                            for h in prev[e as usize].basis() {
                                let h = Morphism::from_vec(f, me, h);
                                acc.insert(ar.map(b).after(&h).to_vec());
                            }
                        }
                        acc
                    }
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct RadPower {
    pub space: Subspace,
    /// the universe was a truncation, so the space may be too small
    pub lower_bound: bool,
}

/// Non-invertible morphisms between indecomposables. Between isomorphic
/// ones this is `φ ∘ rad(a, a)` for any isomorphism `φ`.
fn rad1(a: &Rep, b: &Rep) -> Result<Subspace> {
    if a == b {
        return radical(a, b, true);
    }
    match find_iso(a, b, 100_000)? {
        IsoResult::Isomorphic(phi) => {
            let own = radical(a, a, true)?;
            Ok(Subspace::span(
                Morphism::flat_len(a, b),
                own.basis().iter().map(|g| phi.after(&Morphism::from_vec(a, a, g)).to_vec()),
            ))
        }
        _ => Ok(hom(a, b)?.space),
    }
}

/// `rad^n(m, target)` for indecomposable `m` and `target`, spanned by
/// compositions through the modules of `universe`. Independent of any
/// AR structure; used as a cross-check.
pub fn rad_power(m: &Rep, target: &Rep, n: usize, universe: &[Rep], truncated: bool) -> Result<RadPower> {
    if n == 0 {
        return Ok(RadPower { space: hom(m, target)?.space, lower_bound: false });
    }
    // rad(U, U') for all pairs in the universe, plus rad(m, U)
    let mut level: Vec<Subspace> = universe.iter().map(|u| rad1(u, target)).collect::<Result<_>>()?;
    let mut step: Vec<Vec<Subspace>> = Vec::new();
    if n > 1 {
        for u in universe {
            let mut row = Vec::new();
            for w in universe {
                row.push(rad1(u, w)?);
            }
            step.push(row);
        }
    }
    for _ in 2..n {
        let next = universe
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let mut acc = Subspace::zero(Morphism::flat_len(u, target));
                for (j, w) in universe.iter().enumerate() {
                    for g in level[j].basis() {
                        let g = Morphism::from_vec(w, target, g);
                        for h in step[i][j].basis() {
                            acc.insert(g.after(&Morphism::from_vec(u, w, h)).to_vec());
                        }
                    }
                }
                acc
            })
            .collect();
        level = next;
    }
    let space = if n == 1 {
        rad1(m, target)?
    } else {
        let mut acc = Subspace::zero(Morphism::flat_len(m, target));
        for (j, w) in universe.iter().enumerate() {
            let first = rad1(m, w)?;
            for g in level[j].basis() {
                let g = Morphism::from_vec(w, target, g);
                for h in first.basis() {
                    acc.insert(g.after(&Morphism::from_vec(m, w, h)).to_vec());
                }
            }
        }
        acc
    };
    Ok(RadPower { space, lower_bound: truncated })
}
