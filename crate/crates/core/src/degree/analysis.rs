use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::cover::{GenericCover, WellBehavedAssignment};
use crate::error::{Error, Result};
use crate::linalg::{fmt_q, Matrix, Subspace, Q};
use crate::mesh::MeshCategory;
use crate::quiver::{ArrowId, VertexId};
use crate::rep::{check_sectional_family, hom, is_irreducible, kernel, ArQuiver, Morphism, Radicals, SectionalFamily};

use super::search::{left_degree, right_degree, SumMap};

fn invert(f: &Morphism) -> Option<Morphism> {
    let blocks = f.blocks.iter().map(|b| b.solve_matrix(&Matrix::identity(b.rows()))).collect::<Option<Vec<_>>>()?;
    Some(Morphism { blocks })
}

/// `psi` with `incl ∘ psi = h`, for a monomorphism `incl`.
fn factor_through(incl: &Morphism, h: &Morphism) -> Option<Morphism> {
    let mut blocks = Vec::new();
    for (e, b) in incl.blocks.iter().zip(&h.blocks) {
        let p = if e.cols() == 0 { Matrix::zeros(0, b.cols()) } else { e.left_inverse()?.mul(b) };
        if e.mul(&p) != *b {
            return None;
        }
        blocks.push(p);
    }
    Some(Morphism { blocks })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub degree: Option<usize>,
    pub bound: usize,
    pub mono: bool,
    pub epi: bool,
    pub kernel_dims: Vec<usize>,
    /// vertex of the component carrying `Ker f`
    pub kernel_vertex: Option<VertexId>,
    /// `n` with `ker f ∈ rad^n \ rad^{n+1}`; `None` if deeper than the cap
    pub kernel_depth: Option<usize>,
    pub a_iff_b: bool,
    pub b_implies_c: bool,
    /// all three conditions agree; only evaluated on complete components
    pub three_way: Option<bool>,
    /// the zero-composite witness is `ker f` up to an isomorphism
    pub zero_witness_is_kernel: Option<bool>,
    pub partial: bool,
}

impl KernelReport {
    pub fn consistent(&self) -> bool {
        self.a_iff_b && self.b_implies_c && self.three_way != Some(false) && self.zero_witness_is_kernel != Some(false)
    }
}

/// Compares the left degree of `f` with the radical depth of its kernel
/// inclusion.
pub fn kernel_characterization(rads: &Radicals, f: &SumMap, bound: usize) -> Result<KernelReport> {
    let ar = rads.ar();
    if f.domain.len() != 1 {
        return Err(Error::Shape("kernel characterization needs an indecomposable domain".into()));
    }
    let report = left_degree(rads, f, bound)?;
    let x = f.domain[0];
    let (dom, _, m) = f.assemble(ar);
    let (k, incl) = kernel(&m, &dom);
    let mono = k.is_zero();
    let mut kernel_vertex = None;
    let mut kernel_depth = None;
    let mut ker_map = None;
    if !mono {
        if let Some((v, phi)) = ar.find(&k)? {
            let psi = invert(&phi).ok_or_else(|| Error::Invalid("isomorphism is not invertible".into()))?;
            let h = incl.after(&psi);
            kernel_vertex = Some(v);
            kernel_depth = rads.depth_of(v, x, &h, bound + 2)?;
            ker_map = Some(h);
        }
    }
    let degree = report.degree();
    // level at which (b) holds, when it does within reach
    let b_level = kernel_depth.filter(|&n| n >= 1);
    let a_iff_b = match degree {
        Some(n) => b_level == Some(n),
        None => b_level.is_none_or(|n| n > bound),
    };
    let b_implies_c = b_level.is_none() || kernel_vertex.is_some();
    let three_way = (!ar.truncated).then(|| {
        let c = !mono && kernel_vertex.is_some();
        c == degree.is_some() && a_iff_b
    });
    let zero_witness_is_kernel = match (&report.zero_witness, kernel_vertex, &ker_map) {
        (Some(w), Some(v), Some(_)) => {
            let h = &w.components[0];
            let iso = w.vertex == v && factor_through(&incl, h).is_some_and(|psi| psi.is_iso());
            Some(iso)
        }
        (Some(_), _, _) => Some(false),
        _ => None,
    };
    Ok(KernelReport {
        degree,
        bound,
        mono,
        epi: m.is_epi(),
        kernel_dims: k.dims().to_vec(),
        kernel_vertex,
        kernel_depth,
        a_iff_b,
        b_implies_c,
        three_way,
        zero_witness_is_kernel,
        partial: degree.is_none(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftReport {
    pub arrow: ArrowId,
    pub mesh_end: VertexId,
    /// arrows out of the translate paired with the other middle terms
    pub paired: Vec<ArrowId>,
    pub f_degree: Option<usize>,
    pub g_degree: Option<usize>,
    pub bound: usize,
    pub holds: bool,
}

/// For the arrow `beta: X -> Y` of a mesh with other middle terms `X'`,
/// compares `d_l(f)` with `d_l(g)` where `g: τY -> X'` collects the other
/// arms.
pub fn degree_shift(rads: &Radicals, beta: ArrowId, bound: usize) -> Result<ShiftReport> {
    let ar = rads.ar();
    let tq = &ar.tq;
    let arrow = tq.arrow(beta).ok_or(Error::UnknownArrow(beta))?;
    let (x, y) = (arrow.source, arrow.target);
    let mesh = tq.mesh(y).ok_or_else(|| Error::Invalid(format!("vertex {y} is projective")))?;
    let others: Vec<_> = mesh.arms.iter().filter(|arm| arm.beta != beta).collect();
    if others.is_empty() {
        return Err(Error::EmptyComplement);
    }
    let f = SumMap::out_tuple(x, vec![(y, ar.map(beta).clone())]);
    let g = SumMap::out_tuple(mesh.start, others.iter().map(|arm| (arm.middle, ar.map(arm.alpha).clone())).collect());
    let df = left_degree(rads, &f, bound)?.degree();
    let dg = left_degree(rads, &g, bound)?.degree();
    let holds = match (df, dg) {
        (Some(n), Some(m)) => n == m + 1,
        (Some(_), None) => false,
        (None, Some(m)) => m + 1 > bound,
        (None, None) => true,
    };
    Ok(ShiftReport {
        arrow: beta,
        mesh_end: y,
        paired: others.iter().map(|arm| arm.alpha).collect(),
        f_degree: df,
        g_degree: dg,
        bound,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeTwoReport {
    pub arrows: Vec<ArrowId>,
    pub minimal_right_almost_split: bool,
    /// configuration for `d_r = 2`
    pub right_configuration: bool,
    /// first or second mesh configuration for `d_l = 2`
    pub left_configuration: Option<u8>,
    pub right_degree: Option<usize>,
    pub left_degree: Option<usize>,
    pub right_agrees: bool,
    pub left_agrees: bool,
}

/// Structural predicates for degree two, read off the meshes, next to the
/// degrees found by search. `arrows` leave a common vertex.
pub fn classify_degree_two(rads: &Radicals, arrows: &[ArrowId], bound: usize) -> Result<DegreeTwoReport> {
    let ar = rads.ar();
    let tq = &ar.tq;
    let f = SumMap::from_arrows(ar, arrows)?;
    if f.domain.len() != 1 {
        return Err(Error::Shape("arrows must leave a common vertex".into()));
    }
    let x = f.domain[0];
    let chosen: BTreeSet<ArrowId> = arrows.iter().copied().collect();
    let targets: BTreeSet<VertexId> = f.codomain.iter().copied().collect();

    let mras = targets.len() == 1 && {
        let y = f.codomain[0];
        tq.in_arrows(y).iter().copied().collect::<BTreeSet<_>>() == chosen
    };

    let right = (|| {
        let ix = tq.tau_inverse(x)?;
        let mesh = tq.mesh(ix)?;
        let rest: Vec<_> = mesh.arms.iter().filter(|arm| !chosen.contains(&arm.alpha)).collect();
        if rest.len() != 1 || rest.len() + chosen.len() != mesh.arms.len() {
            return Some(false);
        }
        let y2 = rest[0].middle;
        let next = tq.mesh(tq.tau_inverse(y2)?)?;
        Some(next.arms.len() == 1 && next.arms[0].middle == ix)
    })()
    .unwrap_or(false);

    let single_arm_from =
        |v: VertexId, from: VertexId| tq.mesh(v).is_some_and(|m| m.arms.len() == 1 && m.arms[0].middle == from);
    let left = if mras {
        None
    } else if arrows.len() == 1 {
        let y = f.codomain[0];
        tq.mesh(y).filter(|m| m.arms.len() == 2).and_then(|m| {
            let other = m.arms.iter().find(|arm| arm.beta != arrows[0])?;
            single_arm_from(other.middle, m.start).then_some(1)
        })
    } else if arrows.len() == 2 {
        let (y1, y2) = (f.codomain[0], f.codomain[1]);
        tq.mesh(x).filter(|m| m.arms.len() == 2).and_then(|m| {
            let mut middles: Vec<VertexId> = m.arms.iter().map(|arm| arm.middle).collect();
            let mut taus = vec![tq.tau(y1)?, tq.tau(y2)?];
            middles.sort_unstable();
            taus.sort_unstable();
            (middles == taus && single_arm_from(y1, x) && single_arm_from(y2, x)).then_some(2)
        })
    } else {
        None
    };

    let dr = right_degree(rads, &f, bound)?.degree();
    let dl = left_degree(rads, &f, bound)?.degree();
    Ok(DegreeTwoReport {
        arrows: arrows.to_vec(),
        minimal_right_almost_split: mras,
        right_configuration: right,
        left_configuration: left,
        right_degree: dr,
        left_degree: dl,
        right_agrees: right == (dr == Some(2)),
        left_agrees: left.is_some() == (dl == Some(2)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    /// `h_i = λ_i f_i + h_i'` with `h_i' ∈ rad²`
    pub lambdas: Vec<String>,
    /// positions `i` with `ε_i = h_i'`; elsewhere `ε_i = f_i`
    pub perturbed: Vec<usize>,
    pub f_composite_zero: bool,
    pub epsilon_composite_nonzero: bool,
    #[serde(skip)]
    pub fs: Vec<Morphism>,
    #[serde(skip)]
    pub epsilons: Vec<Morphism>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositeReport {
    pub length: usize,
    pub composite_zero: bool,
    pub in_rad_n: bool,
    pub in_next_power: bool,
    /// composite in `rad^{n+1} \ 0`
    pub deep_nonzero: bool,
    pub trivial_valuation: bool,
    pub decomposition: Option<Decomposition>,
}

fn compose(maps: &[Morphism]) -> Morphism {
    let mut it = maps.iter();
    let first = it.next().expect("non-empty path").clone();
    it.fold(first, |acc, h| h.after(&acc))
}

/// Decides whether `h_n ⋯ h_1` lies in `rad^{n+1} \ 0`, and if so and the
/// arrows have trivial valuation, splits it into irreducibles `f_i` with
/// zero composite and `ε_i` with non-zero composite.
pub fn composite_analysis(rads: &Radicals, vertices: &[VertexId], maps: &[Morphism]) -> Result<CompositeReport> {
    let ar = rads.ar();
    let tq = &ar.tq;
    let n = maps.len();
    if n == 0 || vertices.len() != n + 1 {
        return Err(Error::Shape("need n maps between n + 1 vertices".into()));
    }
    for &v in vertices {
        if !tq.has_vertex(v) {
            return Err(Error::OutsideComponent(format!("vertex {v}")));
        }
    }
    for (i, h) in maps.iter().enumerate() {
        if !h.is_intertwiner(ar.module(vertices[i]), ar.module(vertices[i + 1])) {
            return Err(Error::NotComposable { position: i });
        }
        if !is_irreducible(rads, vertices[i], vertices[i + 1], h)? {
            return Err(Error::NotIrreducible(format!("morphism at position {i}")));
        }
    }
    let (x0, xn) = (vertices[0], vertices[n]);
    let c = compose(maps);
    let composite_zero = c.is_zero();
    let in_rad_n = rads.contains(x0, xn, n, &c)?;
    let in_next_power = rads.contains(x0, xn, n + 1, &c)?;
    let deep_nonzero = in_next_power && !composite_zero;

    let mut arrows = Vec::new();
    let mut trivial_valuation = true;
    for i in 0..n {
        let between: Vec<ArrowId> =
            tq.out_arrows(vertices[i]).iter().copied().filter(|&a| tq.target(a) == vertices[i + 1]).collect();
        let r1 = rads.rad(vertices[i], vertices[i + 1], 1)?.dim();
        let r2 = rads.rad(vertices[i], vertices[i + 1], 2)?.dim();
        trivial_valuation &= between.len() == 1 && r1 - r2 == 1;
        arrows.push(between.first().copied());
    }

    let mut decomposition = None;
    if deep_nonzero && trivial_valuation {
        let fs: Vec<Morphism> = arrows.iter().map(|a| ar.map(a.expect("one arrow")).clone()).collect();
        let mut lambdas = Vec::new();
        let mut primes = Vec::new();
        for i in 0..n {
            let rad2 = rads.rad(vertices[i], vertices[i + 1], 2)?;
            let (rh, rf) = (rad2.reduce(&maps[i].to_vec()), rad2.reduce(&fs[i].to_vec()));
            let p = rf.iter().position(|v| !v.is_zero()).expect("irreducible");
            let lambda: Q = &rh[p] / &rf[p];
            primes.push(maps[i].sub(&fs[i].scale(&lambda)));
            lambdas.push(lambda);
        }
        let f_composite_zero = compose(&fs).is_zero();
        // smallest set of positions, then lexicographic
        let mut subsets: Vec<Vec<usize>> =
            (1u64..(1 << n)).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let found = subsets.into_iter().find_map(|s| {
            let eps: Vec<Morphism> =
                (0..n).map(|i| if s.contains(&i) { primes[i].clone() } else { fs[i].clone() }).collect();
            (!compose(&eps).is_zero()).then_some((s, eps))
        });
        if let Some((perturbed, epsilons)) = found {
            decomposition = Some(Decomposition {
                lambdas: lambdas.iter().map(fmt_q).collect(),
                perturbed,
                f_composite_zero,
                epsilon_composite_nonzero: true,
                fs,
                epsilons,
            });
        }
    }
    Ok(CompositeReport {
        length: n,
        composite_zero,
        in_rad_n,
        in_next_power,
        deep_nonzero,
        trivial_valuation,
        decomposition,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionalSumReport {
    pub paths: usize,
    pub end: VertexId,
    pub min_length: usize,
    pub in_rad_n: bool,
    pub in_next_power: bool,
    pub holds: bool,
}

/// Sum of the composites of a sectional family ending at one vertex.
pub fn sectional_family_sum(rads: &Radicals, family: &SectionalFamily) -> Result<SectionalSumReport> {
    check_sectional_family(family, rads)?.into_result()?;
    let ar = rads.ar();
    let ends: BTreeSet<VertexId> = family.paths.iter().map(|p| *p.vertices.last().expect("non-empty")).collect();
    if ends.len() != 1 {
        return Err(Error::Invalid("paths end at different vertices".into()));
    }
    let y = *ends.iter().next().expect("one end");
    let x = family.root;
    let sum = family
        .paths
        .iter()
        .map(|p| compose(&p.maps))
        .fold(Morphism::zero(ar.module(x), ar.module(y)), |acc, c| acc.add(&c));
    let n = family.paths.iter().map(|p| p.maps.len()).min().expect("non-empty");
    let in_rad_n = rads.contains(x, y, n, &sum)?;
    let in_next_power = rads.contains(x, y, n + 1, &sum)?;
    Ok(SectionalSumReport {
        paths: family.paths.len(),
        end: y,
        min_length: n,
        in_rad_n,
        in_next_power,
        holds: in_rad_n && !in_next_power,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    Equal,
    Strict,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbePair {
    /// cover vertex
    pub x: VertexId,
    /// vertex of the component
    pub y: VertexId,
    pub hom_dim: usize,
    pub cover_dim: usize,
    /// rank of the map induced on Hom by the assignment
    pub image_rank: usize,
    /// `dim rad^n/rad^{n+1}(Fx, Fy)` for `n = 0..=max_level`
    pub component_levels: Vec<usize>,
    /// `Σ_z dim R^n/R^{n+1}(x, z)` over the fiber of `y`
    pub cover_levels: Vec<usize>,
    pub status: PairStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub pairs: Vec<ProbePair>,
    pub checked: usize,
    pub skipped: usize,
    pub strict: usize,
    pub levels_agree: bool,
}

impl ProbeReport {
    pub fn consistent(&self) -> bool {
        self.strict == 0 && self.levels_agree
    }
}

fn quotient_levels(dims: &[usize], max_level: usize) -> Vec<usize> {
    (0..=max_level)
        .map(|n| {
            let a = dims.get(n).copied().unwrap_or(0);
            let b = dims.get(n + 1).copied().unwrap_or(0);
            a - b
        })
        .collect()
}

/// Compares Hom spaces of the component with the mesh category of the
/// cover through an assignment. Pairs whose cover paths may leave the
/// window are skipped.
pub fn generalized_standard_probe(
    ar: &ArQuiver,
    gc: &GenericCover,
    assignment: &WellBehavedAssignment,
    max_level: usize,
) -> Result<ProbeReport> {
    if ar.tq != gc.base {
        return Err(Error::Invalid("cover is not over this component".into()));
    }
    let mc = MeshCategory::new(gc.cover.clone())?;
    let rads = Radicals::new(ar);
    let mut pairs = Vec::new();
    let mut levels_agree = true;
    for x in gc.interior() {
        let reach = gc.cover.distances_from(x);
        let leaves = reach.keys().any(|v| !gc.is_interior(*v));
        let bx = gc.pi(x);
        for y in ar.tq.vertices() {
            let fiber = gc.fiber(y);
            let hom_dim = hom(ar.module(bx), ar.module(y))?.dim();
            if leaves {
                pairs.push(ProbePair {
                    x,
                    y,
                    hom_dim,
                    cover_dim: 0,
                    image_rank: 0,
                    component_levels: Vec::new(),
                    cover_levels: Vec::new(),
                    status: PairStatus::Skipped,
                });
                continue;
            }
            let mut cover_dim = 0;
            let mut cover_levels = vec![0; max_level + 1];
            let mut image = Subspace::zero(Morphism::flat_len(ar.module(bx), ar.module(y)));
            for &z in &fiber {
                cover_dim += mc.dim(x, z);
                for (n, d) in quotient_levels(&mc.radical_dims(x, z), max_level).into_iter().enumerate() {
                    cover_levels[n] += d;
                }
                for p in mc.basis_paths(x, z) {
                    let mut h = Morphism::identity(ar.module(bx));
                    for &a in &p.arrows {
                        h = assignment.map(a).after(&h);
                    }
                    image.insert(h.to_vec());
                }
            }
            let mut dims = Vec::new();
            for n in 0..=max_level + 1 {
                dims.push(rads.rad(bx, y, n)?.dim());
            }
            let component_levels = quotient_levels(&dims, max_level);
            levels_agree &= component_levels == cover_levels;
            let status =
                if hom_dim == cover_dim && image.dim() == hom_dim { PairStatus::Equal } else { PairStatus::Strict };
            pairs.push(ProbePair {
                x,
                y,
                hom_dim,
                cover_dim,
                image_rank: image.dim(),
                component_levels,
                cover_levels,
                status,
            });
        }
    }
    let count = |s| pairs.iter().filter(|p| p.status == s).count();
    let skipped = count(PairStatus::Skipped);
    let strict = count(PairStatus::Strict);
    Ok(ProbeReport { checked: pairs.len() - skipped, skipped, strict, levels_agree, pairs })
}
