use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::quiver::{TranslationQuiver, VertexId};
use crate::rep::{cokernel, knit_ar_component, ArQuiver, Direction, Quiver, Radicals, Rep};

use super::search::{left_degree, right_degree, DegreeReport, SumMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    FiniteType,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct EndDegree {
    /// quiver vertex of the projective or injective
    pub vertex: VertexId,
    /// its vertex in the knitted component
    pub module: VertexId,
    pub report: DegreeReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathBound {
    pub vertex: VertexId,
    pub left_degree: usize,
    /// directed distance from the simple to its injective hull
    pub distance: Option<usize>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteTypeReport {
    pub bound: usize,
    pub verdict: Verdict,
    /// right degree of `rad P -> P`
    pub projectives: Vec<EndDegree>,
    /// left degree of `I -> I/soc I`
    pub injectives: Vec<EndDegree>,
    /// number of indecomposables, when the component closed up
    pub indecomposables: Option<usize>,
    /// undirected diameter of the knitted component
    pub diameter: usize,
    pub path_bounds: Vec<PathBound>,
}

impl FiniteTypeReport {
    pub fn max_degree(&self) -> Option<usize> {
        self.projectives.iter().chain(&self.injectives).filter_map(|e| e.report.degree()).max()
    }
}

fn in_tuple(ar: &ArQuiver, v: VertexId) -> SumMap {
    let parts = ar.tq.in_arrows(v).iter().map(|&a| (ar.tq.source(a), ar.map(a).clone())).collect();
    SumMap::in_tuple(v, parts)
}

fn out_tuple(ar: &ArQuiver, v: VertexId) -> SumMap {
    let parts = ar.tq.out_arrows(v).iter().map(|&a| (ar.tq.target(a), ar.map(a).clone())).collect();
    SumMap::out_tuple(v, parts)
}

/// Knitting depth used for a degree bound: degrees up to `bound` only see
/// modules about `bound / 2` translates away.
pub fn knit_depth(bound: usize) -> usize {
    bound / 2 + 2
}

/// Decides finite representation type from the degrees of `rad P -> P`
/// and `I -> I/soc I`, searched up to `bound`.
pub fn finite_type_check(quiver: &TranslationQuiver, bound: usize) -> Result<FiniteTypeReport> {
    let q = Arc::new(Quiver::from_translation_quiver(quiver)?);
    let depth = knit_depth(bound);
    let pre = knit_ar_component(&q, Direction::FromProjectives, depth)?;
    // a truncated knit cannot see the injectives; take them from the other end
    let post = if pre.truncated { Some(knit_ar_component(&q, Direction::FromInjectives, depth)?) } else { None };
    let inj_ar = post.as_ref().unwrap_or(&pre);
    let pre_rads = Radicals::new(&pre);
    let inj_rads = Radicals::new(inj_ar);

    let mut projectives = Vec::new();
    for i in 0..q.vertex_count() {
        let v = pre.projective_vertex(i)?;
        let report = right_degree(&pre_rads, &in_tuple(&pre, v), bound)?;
        projectives.push(EndDegree { vertex: q.vertex_id(i), module: v, report });
    }
    let mut injectives = Vec::new();
    for i in 0..q.vertex_count() {
        let v = inj_ar.injective_vertex(i)?;
        let report = left_degree(&inj_rads, &out_tuple(inj_ar, v), bound)?;
        injectives.push(EndDegree { vertex: q.vertex_id(i), module: v, report });
    }
    let finite = bound > 0 && projectives.iter().chain(&injectives).all(|e| e.report.degree().is_some());
    let mut path_bounds = Vec::new();
    if finite {
        for (i, e) in injectives.iter().enumerate() {
            let n = e.report.degree().expect("finite");
            let s = inj_ar.find(&Rep::simple(q.clone(), i))?;
            let distance = s.and_then(|(s, _)| inj_ar.tq.distances_from(s).get(&e.module).copied());
            path_bounds.push(PathBound {
                vertex: e.vertex,
                left_degree: n,
                distance,
                holds: distance.is_some_and(|d| d <= n),
            });
        }
    }
    Ok(FiniteTypeReport {
        bound,
        verdict: if finite { Verdict::FiniteType } else { Verdict::Inconclusive },
        projectives,
        injectives,
        indecomposables: (!pre.truncated).then(|| pre.len()),
        diameter: pre.tq.undirected_diameter(),
        path_bounds,
    })
}

/// Whether the in-tuple at a projective is its radical inclusion: a
/// monomorphism whose cokernel is the simple top.
pub fn is_radical_inclusion(ar: &ArQuiver, i: usize) -> Result<bool> {
    let v = ar.projective_vertex(i)?;
    let (_, _, f) = in_tuple(ar, v).assemble(ar);
    let p = ar.module(v);
    let (c, _) = cokernel(&f, p);
    let simple = Rep::simple(ar.base.clone(), i);
    Ok(f.is_mono() && c.dims() == simple.dims())
}
