use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_relations, fmt_q, lin_comb, Subspace, Q};
use crate::quiver::{ArrowId, VertexId};
use crate::rep::{rad_power, tuple_irreducible, ArQuiver, Morphism, Radicals, Rep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A morphism between direct sums of modules of a component, by
/// components. Missing entries are zero.
#[derive(Clone, Debug)]
pub struct SumMap {
    pub domain: Vec<VertexId>,
    pub codomain: Vec<VertexId>,
    /// (domain index, codomain index, component)
    pub entries: Vec<(usize, usize, Morphism)>,
}

impl SumMap {
    /// `[f_1; ...; f_r]: x -> ⊕ y_j`
    pub fn out_tuple(x: VertexId, parts: Vec<(VertexId, Morphism)>) -> Self {
        let codomain = parts.iter().map(|(y, _)| *y).collect();
        let entries = parts.into_iter().enumerate().map(|(j, (_, f))| (0, j, f)).collect();
        SumMap { domain: vec![x], codomain, entries }
    }

    /// `[f_1, ..., f_r]: ⊕ x_i -> y`
    pub fn in_tuple(y: VertexId, parts: Vec<(VertexId, Morphism)>) -> Self {
        let domain = parts.iter().map(|(x, _)| *x).collect();
        let entries = parts.into_iter().enumerate().map(|(i, (_, f))| (i, 0, f)).collect();
        SumMap { domain, codomain: vec![y], entries }
    }

    /// The chosen morphisms of arrows with a common source (an out-tuple)
    /// or, failing that, a common target.
    pub fn from_arrows(ar: &ArQuiver, arrows: &[ArrowId]) -> Result<Self> {
        let mut ends = Vec::new();
        for &a in arrows {
            let arrow = ar.tq.arrow(a).ok_or(Error::UnknownArrow(a))?;
            ends.push((arrow.source, arrow.target));
        }
        let Some(&(s0, t0)) = ends.first() else {
            return Err(Error::Invalid("no arrows given".into()));
        };
        if ends.iter().all(|&(s, _)| s == s0) {
            Ok(SumMap::out_tuple(s0, arrows.iter().map(|&a| (ar.tq.target(a), ar.map(a).clone())).collect()))
        } else if ends.iter().all(|&(_, t)| t == t0) {
            Ok(SumMap::in_tuple(t0, arrows.iter().map(|&a| (ar.tq.source(a), ar.map(a).clone())).collect()))
        } else {
            Err(Error::Shape("arrows share neither source nor target".into()))
        }
    }

    /// Sum of the components `i -> j`.
    fn component(&self, ar: &ArQuiver, i: usize, j: usize) -> Morphism {
        let (x, y) = (ar.module(self.domain[i]), ar.module(self.codomain[j]));
        self.entries
            .iter()
            .filter(|(a, b, _)| *a == i && *b == j)
            .fold(Morphism::zero(x, y), |acc, (_, _, f)| acc.add(f))
    }

    /// The map as a single morphism between the direct sums.
    pub fn assemble(&self, ar: &ArQuiver) -> (Rep, Rep, Morphism) {
        let q = ar.base.clone();
        let dom: Vec<&Rep> = self.domain.iter().map(|&v| ar.module(v)).collect();
        let cod: Vec<&Rep> = self.codomain.iter().map(|&v| ar.module(v)).collect();
        let (ds, _, dproj) = Rep::direct_sum(q.clone(), &dom);
        let (cs, cinc, _) = Rep::direct_sum(q, &cod);
        let mut f = Morphism::zero(&ds, &cs);
        for (i, j, g) in &self.entries {
            f = f.add(&cinc[*j].after(&g.after(&dproj[*i])));
        }
        (ds, cs, f)
    }

    /// Shapes, and irreducibility seen from the indecomposable end. The
    /// empty map (out of or into the zero module) is allowed.
    pub fn validate(&self, rads: &Radicals) -> Result<()> {
        let ar = rads.ar();
        for v in self.domain.iter().chain(&self.codomain) {
            if !ar.tq.has_vertex(*v) {
                return Err(Error::OutsideComponent(format!("vertex {v}")));
            }
        }
        for (i, j, f) in &self.entries {
            if *i >= self.domain.len() || *j >= self.codomain.len() {
                return Err(Error::Shape("entry index out of range".into()));
            }
            if !f.is_intertwiner(ar.module(self.domain[*i]), ar.module(self.codomain[*j])) {
                return Err(Error::Shape(format!("component {i} -> {j} is not a morphism")));
            }
        }
        if self.domain.is_empty() || self.codomain.is_empty() {
            return Ok(());
        }
        let ok = if self.domain.len() == 1 {
            let parts: Vec<(VertexId, Morphism)> =
                (0..self.codomain.len()).map(|j| (self.codomain[j], self.component(ar, 0, j))).collect();
            tuple_irreducible(rads, self.domain[0], &parts, false)?
        } else if self.codomain.len() == 1 {
            let parts: Vec<(VertexId, Morphism)> =
                (0..self.domain.len()).map(|i| (self.domain[i], self.component(ar, i, 0))).collect();
            tuple_irreducible(rads, self.codomain[0], &parts, true)?
        } else {
            return Err(Error::Shape("the map needs an indecomposable domain or codomain".into()));
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NotIrreducible("map is not irreducible in the component".into()))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// the module `Z`
    pub vertex: VertexId,
    pub level: usize,
    /// `h_i: Z -> X_i` (left) or `h_j: Y_j -> Z` (right)
    #[serde(skip)]
    pub components: Vec<Morphism>,
    pub entries: Vec<Vec<String>>,
    /// whether the composite with the map is zero, not just deep
    pub zero_composite: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Finite { degree: usize, witness: Witness },
    NotFoundWithin { bound: usize },
}

impl Outcome {
    pub fn degree(&self) -> Option<usize> {
        match self {
            Outcome::Finite { degree, .. } => Some(*degree),
            Outcome::NotFoundWithin { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Finite { witness, .. } => Some(witness),
            Outcome::NotFoundWithin { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub side: Side,
    pub domain: Vec<VertexId>,
    pub codomain: Vec<VertexId>,
    pub outcome: Outcome,
    /// witness with zero composite and the same `Z`, when one exists
    pub zero_witness: Option<Witness>,
    /// a single path of chosen irreducible morphisms giving a zero-composite
    /// witness; `None` when not attempted
    pub path_witness: Option<bool>,
    pub truncated: bool,
    pub universe: usize,
}

impl DegreeReport {
    pub fn degree(&self) -> Option<usize> {
        self.outcome.degree()
    }
}

/// Modules searched for witnesses: the interior of a truncation, or all.
pub fn universe(ar: &ArQuiver) -> Vec<VertexId> {
    if ar.truncated {
        ar.interior()
    } else {
        ar.tq.vertices().collect()
    }
}

pub fn left_degree(rads: &Radicals, f: &SumMap, bound: usize) -> Result<DegreeReport> {
    degree(rads, f, Side::Left, bound)
}

pub fn right_degree(rads: &Radicals, f: &SumMap, bound: usize) -> Result<DegreeReport> {
    degree(rads, f, Side::Right, bound)
}

pub fn degree(rads: &Radicals, f: &SumMap, side: Side, bound: usize) -> Result<DegreeReport> {
    f.validate(rads)?;
    search(rads, f, side, bound, &universe(rads.ar()))
}

fn strings(f: &Morphism) -> Vec<String> {
    f.to_vec().iter().map(fmt_q).collect()
}

/// Candidate spaces at one `(n, Z)`: the unknown blocks of `h` with their
/// `rad^n` bases and `rad^{n+1}` spaces.
struct Blocks {
    ends: Vec<VertexId>,
    bases: Vec<Vec<Vec<Q>>>,
    next: Vec<Subspace>,
}

pub(crate) fn search(
    rads: &Radicals,
    f: &SumMap,
    side: Side,
    bound: usize,
    universe: &[VertexId],
) -> Result<DegreeReport> {
    let ar = rads.ar();
    let comps: Vec<Vec<Morphism>> =
        (0..f.domain.len()).map(|i| (0..f.codomain.len()).map(|j| f.component(ar, i, j)).collect()).collect();
    let mut report = DegreeReport {
        side,
        domain: f.domain.clone(),
        codomain: f.codomain.clone(),
        outcome: Outcome::NotFoundWithin { bound },
        zero_witness: None,
        path_witness: None,
        truncated: ar.truncated,
        universe: universe.len(),
    };
    for n in 1..=bound {
        for &z in universe {
            let mz = ar.module(z);
            // h lives on the side opposite to where f is composed
            let ends = match side {
                Side::Left => f.domain.clone(),
                Side::Right => f.codomain.clone(),
            };
            let mut blocks = Blocks { ends: ends.clone(), bases: Vec::new(), next: Vec::new() };
            let mut grows = false;
            for &e in &ends {
                let (a, b) = match side {
                    Side::Left => (rads.rad(z, e, n)?, rads.rad(z, e, n + 1)?),
                    Side::Right => (rads.rad(e, z, n)?, rads.rad(e, z, n + 1)?),
                };
                grows |= a.dim() > b.dim();
                blocks.bases.push(a.basis().to_vec());
                blocks.next.push(b);
            }
            if !grows {
                continue;
            }
            // composites of each unknown with f, on the far side
            let far = match side {
                Side::Left => f.codomain.clone(),
                Side::Right => f.domain.clone(),
            };
            let deep: Vec<Subspace> = far
                .iter()
                .map(|&e| match side {
                    Side::Left => rads.rad(z, e, n + 2),
                    Side::Right => rads.rad(e, z, n + 2),
                })
                .collect::<Result<_>>()?;
            let mut reduced: Vec<Vec<Q>> = Vec::new();
            let mut raw: Vec<Vec<Q>> = Vec::new();
            for (k, &e) in blocks.ends.iter().enumerate() {
                for v in &blocks.bases[k] {
                    let mut col_r = Vec::new();
                    let mut col_z = Vec::new();
                    for m in 0..far.len() {
                        let comp = match side {
                            Side::Left => comps[k][m].after(&Morphism::from_vec(mz, ar.module(e), v)),
                            Side::Right => Morphism::from_vec(ar.module(e), mz, v).after(&comps[m][k]),
                        };
                        let flat = comp.to_vec();
                        col_r.extend(deep[m].reduce(&flat));
                        col_z.extend(flat);
                    }
                    reduced.push(col_r);
                    raw.push(col_z);
                }
            }
            let unknowns = reduced.len();
            let pick = |cols: &[Vec<Q>]| -> Option<Vec<Morphism>> {
                let len = cols.first().map_or(0, Vec::len);
                let rels = column_relations(len, cols);
                let space = Subspace::span(unknowns, rels);
                space.basis().iter().find_map(|r| {
                    let hs = split(&blocks, r, ar, mz, side);
                    let shallow = hs.iter().zip(&blocks.next).any(|(h, next)| !next.contains(&h.to_vec()));
                    shallow.then_some(hs)
                })
            };
            let Some(hs) = pick(&reduced) else { continue };
            let zero = composite_is_zero(&comps, side, &hs);
            let witness = Witness {
                vertex: z,
                level: n,
                entries: hs.iter().map(strings).collect(),
                components: hs,
                zero_composite: zero,
            };
            report.zero_witness = pick(&raw).map(|hs| Witness {
                vertex: z,
                level: n,
                entries: hs.iter().map(strings).collect(),
                components: hs,
                zero_composite: true,
            });
            report.path_witness = path_witness(rads, f, &comps, side, z, n);
            report.outcome = Outcome::Finite { degree: n, witness };
            return Ok(report);
        }
    }
    Ok(report)
}

fn split(blocks: &Blocks, r: &[Q], ar: &ArQuiver, mz: &Rep, side: Side) -> Vec<Morphism> {
    let mut at = 0;
    blocks
        .ends
        .iter()
        .zip(&blocks.bases)
        .map(|(&e, basis)| {
            let coeffs = &r[at..at + basis.len()];
            at += basis.len();
            let v = if basis.is_empty() {
                match side {
                    Side::Left => vec![Q::from_integer(0.into()); Morphism::flat_len(mz, ar.module(e))],
                    Side::Right => vec![Q::from_integer(0.into()); Morphism::flat_len(ar.module(e), mz)],
                }
            } else {
                lin_comb(coeffs, basis)
            };
            match side {
                Side::Left => Morphism::from_vec(mz, ar.module(e), &v),
                Side::Right => Morphism::from_vec(ar.module(e), mz, &v),
            }
        })
        .collect()
}

/// Whether `f ∘ h` (left) or `h ∘ f` (right) vanishes.
fn composite_is_zero(comps: &[Vec<Morphism>], side: Side, hs: &[Morphism]) -> bool {
    match side {
        Side::Left => (0..comps.first().map_or(0, Vec::len)).all(|j| {
            let mut acc: Option<Morphism> = None;
            for (i, h) in hs.iter().enumerate() {
                let c = comps[i][j].after(h);
                acc = Some(match acc {
                    None => c,
                    Some(a) => a.add(&c),
                });
            }
            acc.is_none_or(|a| a.is_zero())
        }),
        Side::Right => comps.iter().all(|row| {
            let mut acc: Option<Morphism> = None;
            for (j, h) in hs.iter().enumerate() {
                let c = h.after(&row[j]);
                acc = Some(match acc {
                    None => c,
                    Some(a) => a.add(&c),
                });
            }
            acc.is_none_or(|a| a.is_zero())
        }),
    }
}

/// Looks for a single path `Z ~> X` (left) or `Y ~> Z` (right) of length
/// `n` whose composite of chosen morphisms is a zero-composite witness.
fn path_witness(
    rads: &Radicals,
    f: &SumMap,
    comps: &[Vec<Morphism>],
    side: Side,
    z: VertexId,
    n: usize,
) -> Option<bool> {
    const CAP: usize = 512;
    let ar = rads.ar();
    let (from, to) = match side {
        Side::Left if f.domain.len() == 1 => (z, f.domain[0]),
        Side::Right if f.codomain.len() == 1 => (f.codomain[0], z),
        _ => return None,
    };
    let paths = ar.tq.paths_between(from, to, n);
    let paths: Vec<_> = paths.into_iter().filter(|p| p.len() == n).collect();
    if paths.len() > CAP {
        return None;
    }
    for p in paths {
        let mut h = Morphism::identity(ar.module(from));
        for &a in &p.arrows {
            h = ar.map(a).after(&h);
        }
        let deep = rads.contains(from, to, n + 1, &h).ok()?;
        if deep {
            continue;
        }
        let zero = match side {
            Side::Left => comps[0].iter().all(|c| c.after(&h).is_zero()),
            Side::Right => comps.iter().all(|row| h.after(&row[0]).is_zero()),
        };
        if zero {
            return Some(true);
        }
    }
    Some(false)
}

/// Rechecks a finite outcome with the universe formula for radical powers
/// instead of the component's arrow routes.
pub fn verify_witness(ar: &ArQuiver, f: &SumMap, report: &DegreeReport) -> Result<bool> {
    let Outcome::Finite { degree: n, witness } = &report.outcome else {
        return Ok(true);
    };
    let z = ar.module(witness.vertex);
    let universe = &ar.modules;
    let member = |s: &Rep, t: &Rep, k: usize, g: &Morphism| -> Result<bool> {
        Ok(rad_power(s, t, k, universe, ar.truncated)?.space.contains(&g.to_vec()))
    };
    let side = report.side;
    let ends = match side {
        Side::Left => &f.domain,
        Side::Right => &f.codomain,
    };
    let mut some_shallow = false;
    for (h, &e) in witness.components.iter().zip(ends) {
        let (s, t) = match side {
            Side::Left => (z, ar.module(e)),
            Side::Right => (ar.module(e), z),
        };
        if !member(s, t, *n, h)? {
            return Ok(false);
        }
        some_shallow |= !member(s, t, n + 1, h)?;
    }
    if !some_shallow {
        return Ok(false);
    }
    let far = match side {
        Side::Left => &f.codomain,
        Side::Right => &f.domain,
    };
    for (m, &e) in far.iter().enumerate() {
        let mut acc: Option<Morphism> = None;
        for (k, h) in witness.components.iter().enumerate() {
            let c = match side {
                Side::Left => f.component(ar, k, m).after(h),
                Side::Right => h.after(&f.component(ar, m, k)),
            };
            acc = Some(match acc {
                None => c,
                Some(a) => a.add(&c),
            });
        }
        let (s, t) = match side {
            Side::Left => (z, ar.module(e)),
            Side::Right => (ar.module(e), z),
        };
        if let Some(c) = acc {
            if !member(s, t, n + 2, &c)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
