use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::quiver::{ArrowId, VertexId};

use super::module::Morphism;
use super::radical::Radicals;

fn check_vertex(rads: &Radicals, v: VertexId) -> Result<()> {
    if rads.ar().tq.has_vertex(v) {
        Ok(())
    } else {
        Err(Error::OutsideComponent(format!("vertex {v}")))
    }
}

fn check_morphism(rads: &Radicals, x: VertexId, y: VertexId, f: &Morphism) -> Result<()> {
    check_vertex(rads, x)?;
    check_vertex(rads, y)?;
    let ar = rads.ar();
    if !f.is_intertwiner(ar.module(x), ar.module(y)) {
        return Err(Error::Shape(format!("not a morphism from {x} to {y}")));
    }
    Ok(())
}

/// `f ∈ rad(x, y) \ rad²(x, y)`
pub fn is_irreducible(rads: &Radicals, x: VertexId, y: VertexId, f: &Morphism) -> Result<bool> {
    check_morphism(rads, x, y, f)?;
    let v = f.to_vec();
    Ok(rads.rad(x, y, 1)?.contains(&v) && !rads.rad(x, y, 2)?.contains(&v))
}

/// Morphisms `x -> y` independent modulo `rad²(x, y)`, all radical.
fn independent_mod_rad2(rads: &Radicals, x: VertexId, y: VertexId, fs: &[&Morphism]) -> Result<bool> {
    let rad1 = rads.rad(x, y, 1)?;
    let mut span: Subspace = rads.rad(x, y, 2)?;
    for f in fs {
        let v = f.to_vec();
        if !rad1.contains(&v) || !span.insert(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Irreducibility of `[f_1; ...; f_r]: x -> ⊕ y_i` (or, with `incoming`,
/// of `[f_1, ..., f_r]: ⊕ y_i -> x`): components grouped by the other
/// endpoint must be independent modulo rad².
pub fn tuple_irreducible(rads: &Radicals, x: VertexId, parts: &[(VertexId, Morphism)], incoming: bool) -> Result<bool> {
    if parts.is_empty() {
        return Ok(false);
    }
    let mut groups: BTreeMap<VertexId, Vec<&Morphism>> = BTreeMap::new();
    for (y, f) in parts {
        let (s, t) = if incoming { (*y, x) } else { (x, *y) };
        check_morphism(rads, s, t, f)?;
        groups.entry(*y).or_default().push(f);
    }
    for (y, fs) in groups {
        let (s, t) = if incoming { (y, x) } else { (x, y) };
        if !independent_mod_rad2(rads, s, t, &fs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One path of a family: the modules after the root and the morphisms
/// between consecutive ones.
#[derive(Clone, Debug)]
pub struct FamilyPath {
    pub vertices: Vec<VertexId>,
    pub maps: Vec<Morphism>,
}

#[derive(Clone, Debug)]
pub struct SectionalFamily {
    pub root: VertexId,
    pub paths: Vec<FamilyPath>,
}

impl SectionalFamily {
    /// A family along arrows of the component, using its chosen morphisms.
    pub fn from_arrows(rads: &Radicals, root: VertexId, paths: &[Vec<ArrowId>]) -> Result<Self> {
        let tq = &rads.ar().tq;
        let mut out = Vec::new();
        for p in paths {
            let mut at = root;
            let mut vertices = Vec::new();
            let mut maps = Vec::new();
            for (pos, &a) in p.iter().enumerate() {
                let arrow = tq.arrow(a).ok_or(Error::UnknownArrow(a))?;
                if arrow.source != at {
                    return Err(Error::NotComposable { position: pos });
                }
                at = arrow.target;
                vertices.push(at);
                maps.push(rads.ar().map(a).clone());
            }
            out.push(FamilyPath { vertices, maps });
        }
        Ok(SectionalFamily { root, paths: out })
    }

    pub fn vertex(&self, i: usize, j: usize) -> VertexId {
        if j == 0 {
            self.root
        } else {
            self.paths[i].vertices[j - 1]
        }
    }

    pub fn len(&self, i: usize) -> usize {
        self.paths[i].maps.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyCheck {
    pub valid: bool,
    /// `a`/`b` for the independence conditions, `c` for a hook
    pub condition: Option<char>,
    pub detail: Option<String>,
}

impl FamilyCheck {
    fn fail(condition: char, detail: String) -> Self {
        FamilyCheck { valid: false, condition: Some(condition), detail: Some(detail) }
    }

    pub fn into_result(self) -> Result<()> {
        match self.condition {
            None => Ok(()),
            Some(c) => Err(Error::InvalidFamily { condition: c, detail: self.detail.unwrap_or_default() }),
        }
    }
}

/// Conditions (a) and (b) through the grouped criterion: at each level,
/// the morphisms with the same domain and codomain are independent modulo
/// rad². Then (c): no hook between consecutive members of any two paths.
pub fn check_sectional_family(family: &SectionalFamily, rads: &Radicals) -> Result<FamilyCheck> {
    check_vertex(rads, family.root)?;
    if family.paths.is_empty() {
        return Err(Error::Invalid("empty family".into()));
    }
    let mut levels: BTreeMap<(usize, VertexId, VertexId), Vec<&Morphism>> = BTreeMap::new();
    for (i, p) in family.paths.iter().enumerate() {
        if p.vertices.len() != p.maps.len() || p.maps.is_empty() {
            return Err(Error::Shape(format!("path {} has mismatched vertices and maps", i + 1)));
        }
        for j in 1..=p.maps.len() {
            let (s, t) = (family.vertex(i, j - 1), family.vertex(i, j));
            check_morphism(rads, s, t, &p.maps[j - 1])?;
            if !is_irreducible(rads, s, t, &p.maps[j - 1])? {
                return Ok(FamilyCheck::fail('a', format!("f[{},{}] is not irreducible", i + 1, j)));
            }
            levels.entry((j, s, t)).or_default().push(&p.maps[j - 1]);
        }
    }
    for ((l, m, n), fs) in &levels {
        if !independent_mod_rad2(rads, *m, *n, fs)? {
            return Ok(FamilyCheck::fail('a', format!("level {l}: morphisms {m} -> {n} dependent modulo rad²")));
        }
    }
    let tq = &rads.ar().tq;
    for i in 0..family.paths.len() {
        for j in 1..=family.len(i) {
            for i2 in 0..family.paths.len() {
                if j + 1 > family.len(i2) || family.vertex(i2, j) != family.vertex(i, j) {
                    continue;
                }
                let (a, c) = (family.vertex(i, j - 1), family.vertex(i2, j + 1));
                if tq.is_hook(a, c) {
                    return Ok(FamilyCheck::fail(
                        'c',
                        format!("hook f[{},{}] then f[{},{}] through {}", i + 1, j, i2 + 1, j + 1, family.vertex(i, j)),
                    ));
                }
            }
        }
    }
    Ok(FamilyCheck { valid: true, condition: None, detail: None })
}
