use std::sync::Arc;

use arq::cover::{build_cover, well_behaved_assignment};
use arq::degree::*;
use arq::linalg::{column_relations, q};
use arq::quiver::QuiverBuilder;
use arq::rep::*;
use arq::{ArrowId, Error, TranslationQuiver, VertexId};
use proptest::prelude::*;

fn quiver(n: u32, arrows: &[(u32, u32, u32)]) -> Arc<Quiver> {
    let vs: Vec<u32> = (1..=n).collect();
    Arc::new(Quiver::new(&vs, arrows).unwrap())
}

fn linear(n: u32) -> Arc<Quiver> {
    let arrows: Vec<_> = (1..n).map(|i| (i, i, i + 1)).collect();
    quiver(n, &arrows)
}

fn d4() -> Arc<Quiver> {
    quiver(4, &[(0, 1, 4), (1, 2, 4), (2, 3, 4)])
}

fn atilde2() -> Arc<Quiver> {
    quiver(3, &[(0, 1, 2), (1, 2, 3), (2, 1, 3)])
}

fn full(qv: &Arc<Quiver>) -> ArQuiver {
    let ar = knit_ar_component(qv, Direction::FromProjectives, 25).unwrap();
    assert!(!ar.truncated);
    ar
}

fn ordinary(n: u32, arrows: &[(u32, u32, u32)]) -> TranslationQuiver {
    let mut b = QuiverBuilder::new();
    for v in 1..=n {
        b.vertex(v, false, false);
    }
    for &(id, s, t) in arrows {
        b.arrow(id, s, t);
    }
    b.build().unwrap()
}

fn arrows(ar: &ArQuiver) -> Vec<ArrowId> {
    ar.tq.arrows().map(|a| a.id).collect()
}

fn single(ar: &ArQuiver, a: ArrowId) -> SumMap {
    SumMap::from_arrows(ar, &[a]).unwrap()
}

/// Degree of a single morphism by brute force over every module, with
/// radical powers from the universe formula.
fn oracle_degree(ar: &ArQuiver, x: VertexId, y: VertexId, f: &Morphism, side: Side, bound: usize) -> Option<usize> {
    let rp = |s: &Rep, t: &Rep, n: usize| rad_power(s, t, n, &ar.modules, false).unwrap().space;
    for n in 1..=bound {
        for z in ar.tq.vertices() {
            let mz = ar.module(z);
            let (mx, my) = (ar.module(x), ar.module(y));
            let (a, b, c) = match side {
                Side::Left => (rp(mz, mx, n), rp(mz, mx, n + 1), rp(mz, my, n + 2)),
                Side::Right => (rp(my, mz, n), rp(my, mz, n + 1), rp(mx, mz, n + 2)),
            };
            let cols: Vec<_> = a
                .basis()
                .iter()
                .map(|v| match side {
                    Side::Left => c.reduce(&f.after(&Morphism::from_vec(mz, mx, v)).to_vec()),
                    Side::Right => c.reduce(&Morphism::from_vec(my, mz, v).after(f).to_vec()),
                })
                .collect();
            let len = cols.first().map_or(0, Vec::len);
            let rels = column_relations(len, &cols);
            let hit = rels.iter().any(|r| {
                let h: Vec<_> =
                    (0..a.ambient()).map(|k| r.iter().zip(a.basis()).map(|(c, v)| c * &v[k]).sum()).collect();
                !b.contains(&h)
            });
            if hit {
                return Some(n);
            }
        }
    }
    None
}

#[test]
fn a2_degrees_with_witnesses() {
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    let p1 = ar.projective_vertex(0).unwrap();
    let s2 = ar.projective_vertex(1).unwrap();
    let s1 = ar.injective_vertex(0).unwrap();
    let epi = ar.tq.arrows_between(p1, s1)[0];
    let mono = ar.tq.arrows_between(s2, p1)[0];

    let l = left_degree(&rads, &single(&ar, epi), 3).unwrap();
    assert_eq!(l.degree(), Some(1));
    let w = l.outcome.witness().unwrap();
    assert_eq!(w.vertex, s2);
    assert!(w.zero_composite);
    assert!(w.components[0].is_mono());

    let r = right_degree(&rads, &single(&ar, mono), 3).unwrap();
    assert_eq!(r.degree(), Some(1));
    let w = r.outcome.witness().unwrap();
    assert_eq!(w.vertex, s1);
    assert!(w.components[0].is_epi());

    // the other sides are never reached
    assert_eq!(left_degree(&rads, &single(&ar, mono), 3).unwrap().degree(), None);
    assert_eq!(right_degree(&rads, &single(&ar, epi), 3).unwrap().degree(), None);
}

#[test]
fn degrees_match_the_brute_force_oracle() {
    for qv in [linear(2), linear(3), quiver(3, &[(0, 2, 1), (1, 2, 3)]), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        for a in arrows(&ar) {
            let (x, y) = (ar.tq.source(a), ar.tq.target(a));
            for side in [Side::Left, Side::Right] {
                let got = degree(&rads, &single(&ar, a), side, 6).unwrap().degree();
                assert_eq!(got, oracle_degree(&ar, x, y, ar.map(a), side, 6), "arrow {a} {side:?}");
            }
        }
    }
}

#[test]
fn witnesses_are_sound() {
    for qv in [linear(3), linear(4), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        for a in arrows(&ar) {
            let f = single(&ar, a);
            for side in [Side::Left, Side::Right] {
                let r = degree(&rads, &f, side, 10).unwrap();
                assert!(verify_witness(&ar, &f, &r).unwrap(), "arrow {a} {side:?}");
            }
        }
    }
}

#[test]
fn zero_witness_keeps_the_domain() {
    for qv in [linear(4), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        for a in arrows(&ar) {
            let r = left_degree(&rads, &single(&ar, a), 10).unwrap();
            if let Some(w) = r.outcome.witness() {
                let z = r.zero_witness.as_ref().expect("zero-composite witness");
                assert_eq!(z.vertex, w.vertex);
                assert_eq!(z.level, w.level);
                let f = ar.map(a);
                assert!(z.components.iter().all(|h| f.after(h).is_zero()));
            }
        }
    }
}

#[test]
fn almost_split_maps_have_no_degree() {
    for qv in [linear(3), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        for v in ar.tq.vertices() {
            // out of an injective the map is I -> I/soc I, an epi of finite degree
            let outs: Vec<_> = ar.tq.out_arrows(v).to_vec();
            if ar.tq.tau_inverse(v).is_some() {
                let f = SumMap::from_arrows(&ar, &outs).unwrap();
                assert_eq!(left_degree(&rads, &f, 12).unwrap().degree(), None, "out of {v}");
            }
            let ins: Vec<_> = ar.tq.in_arrows(v).to_vec();
            if ar.tq.tau(v).is_some() {
                let f = SumMap::from_arrows(&ar, &ins).unwrap();
                assert_eq!(right_degree(&rads, &f, 12).unwrap().degree(), None, "into {v}");
            }
        }
    }
}

#[test]
fn epi_mono_trichotomy() {
    for qv in [linear(3), linear(4), quiver(4, &[(0, 2, 1), (1, 2, 3), (2, 4, 3)]), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        let b = ar.tq.undirected_diameter() + 2;
        for a in arrows(&ar) {
            let f = ar.map(a);
            let dl = left_degree(&rads, &single(&ar, a), b).unwrap().degree();
            let dr = right_degree(&rads, &single(&ar, a), b).unwrap().degree();
            let first = f.is_epi() && dl.is_some() && dr.is_none();
            let second = f.is_mono() && dr.is_some() && dl.is_none();
            assert!(first != second, "arrow {a}: dl {dl:?} dr {dr:?}");
        }
    }
}

#[test]
fn non_irreducible_maps_are_rejected() {
    let ar = full(&linear(3));
    let rads = Radicals::new(&ar);
    let a = arrows(&ar)[0];
    let (x, y) = (ar.tq.source(a), ar.tq.target(a));
    let zero = SumMap::out_tuple(x, vec![(y, Morphism::zero(ar.module(x), ar.module(y)))]);
    assert!(matches!(left_degree(&rads, &zero, 3), Err(Error::NotIrreducible(_))));
    let twice = SumMap::out_tuple(x, vec![(y, ar.map(a).clone()), (y, ar.map(a).scale(&q(2)))]);
    assert!(matches!(left_degree(&rads, &twice, 3), Err(Error::NotIrreducible(_))));
}

#[test]
fn radical_inclusions_at_projectives() {
    for qv in [linear(4), d4(), atilde2()] {
        let ar = knit_ar_component(&qv, Direction::FromProjectives, 4).unwrap();
        for i in 0..qv.vertex_count() {
            assert!(is_radical_inclusion(&ar, i).unwrap(), "vertex {i}");
        }
    }
}

#[test]
fn kernel_characterization_on_dynkin() {
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    let p1 = ar.projective_vertex(0).unwrap();
    let s1 = ar.injective_vertex(0).unwrap();
    let s2 = ar.projective_vertex(1).unwrap();
    let r = kernel_characterization(&rads, &single(&ar, ar.tq.arrows_between(p1, s1)[0]), 5).unwrap();
    assert_eq!((r.degree, r.kernel_depth, r.kernel_vertex), (Some(1), Some(1), Some(s2)));
    assert!(r.consistent() && !r.partial);
    let r = kernel_characterization(&rads, &single(&ar, ar.tq.arrows_between(s2, p1)[0]), 5).unwrap();
    assert!(r.mono && r.degree.is_none() && r.kernel_vertex.is_none());
    assert!(r.consistent() && r.partial);

    for qv in [linear(4), linear(5), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        for a in arrows(&ar) {
            let r = kernel_characterization(&rads, &single(&ar, a), 12).unwrap();
            assert!(r.consistent(), "arrow {a}: {r:?}");
            assert_eq!(r.three_way, Some(true));
        }
    }
}

#[test]
fn degree_shift_across_meshes() {
    for qv in [linear(3), linear(4), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        let mut eligible = 0;
        for a in arrows(&ar) {
            match degree_shift(&rads, a, 12) {
                Ok(r) => {
                    eligible += 1;
                    assert!(r.holds, "{r:?}");
                }
                Err(Error::EmptyComplement) => {
                    assert_eq!(ar.tq.mesh(ar.tq.target(a)).unwrap().arms.len(), 1);
                }
                Err(Error::Invalid(_)) => assert!(ar.tq.tau(ar.tq.target(a)).is_none()),
                Err(e) => panic!("{e}"),
            }
        }
        assert!(eligible > 0);
    }
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    let p1 = ar.projective_vertex(0).unwrap();
    let s1 = ar.injective_vertex(0).unwrap();
    let e = degree_shift(&rads, ar.tq.arrows_between(p1, s1)[0], 5).unwrap_err();
    assert_eq!(e.to_string(), "hypothesis X'≠0 violated");
}

#[test]
fn degree_two_configurations() {
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    for a in arrows(&ar) {
        let r = classify_degree_two(&rads, &[a], 6).unwrap();
        assert_eq!(r.left_configuration, None);
        assert_ne!(r.left_degree, Some(2));
    }

    let ar = full(&linear(3));
    let rads = Radicals::new(&ar);
    let mut right_twos = 0;
    for a in arrows(&ar) {
        let r = classify_degree_two(&rads, &[a], 8).unwrap();
        assert!(r.right_agrees && r.left_agrees, "{r:?}");
        if r.right_degree == Some(2) {
            assert!(r.right_configuration);
            right_twos += 1;
        }
        if r.minimal_right_almost_split {
            assert_eq!(r.left_configuration, None);
        }
    }
    assert!(right_twos > 0);

    for qv in [linear(4), quiver(4, &[(0, 2, 1), (1, 2, 3), (2, 4, 3)]), d4()] {
        let ar = full(&qv);
        let rads = Radicals::new(&ar);
        for v in ar.tq.vertices() {
            let outs = ar.tq.out_arrows(v).to_vec();
            let mut choices: Vec<Vec<ArrowId>> = outs.iter().map(|&a| vec![a]).collect();
            for i in 0..outs.len() {
                for j in i + 1..outs.len() {
                    choices.push(vec![outs[i], outs[j]]);
                }
            }
            for c in choices {
                let r = classify_degree_two(&rads, &c, 10).unwrap();
                assert!(r.right_agrees && r.left_agrees, "{r:?}");
            }
        }
    }
}

#[test]
fn composites_of_irreducibles() {
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    let p1 = ar.projective_vertex(0).unwrap();
    let s1 = ar.injective_vertex(0).unwrap();
    let s2 = ar.projective_vertex(1).unwrap();
    let (a, b) = (ar.tq.arrows_between(s2, p1)[0], ar.tq.arrows_between(p1, s1)[0]);
    let r = composite_analysis(&rads, &[s2, p1, s1], &[ar.map(a).clone(), ar.map(b).clone()]).unwrap();
    assert!(r.composite_zero && !r.deep_nonzero && r.decomposition.is_none());

    let e = composite_analysis(&rads, &[p1, s1, p1], &[ar.map(b).clone(), ar.map(a).clone()]).unwrap_err();
    assert!(matches!(e, Error::NotComposable { position: 1 }));

    // sectional paths stay out of the next power
    let ar = full(&linear(5));
    let rads = Radicals::new(&ar);
    let p = (0..5).map(|i| ar.projective_vertex(i).unwrap()).collect::<Vec<_>>();
    let mut vs = vec![p[4]];
    let mut maps = Vec::new();
    for i in (0..4).rev() {
        let a = ar.tq.arrows_between(p[i + 1], p[i])[0];
        vs.push(p[i]);
        maps.push(ar.map(a).clone());
    }
    let r = composite_analysis(&rads, &vs, &maps).unwrap();
    assert!(r.in_rad_n && !r.in_next_power && !r.composite_zero && r.trivial_valuation);
}

#[test]
fn no_deep_composites_without_zero_paths() {
    // every arrow path in this cover is non-zero, so no composite of
    // irreducibles can fall into the next radical power without vanishing
    let ar = knit_ar_component(&atilde2(), Direction::FromProjectives, 4).unwrap();
    let rads = Radicals::new(&ar);
    for a1 in arrows(&ar) {
        let y = ar.tq.target(a1);
        if !ar.is_interior(y) {
            continue;
        }
        for &a2 in ar.tq.out_arrows(y) {
            let (x, z) = (ar.tq.source(a1), ar.tq.target(a2));
            assert!(!ar.map(a2).after(ar.map(a1)).is_zero());
            let mut h1s = vec![ar.map(a1).clone()];
            for e in rads.rad(x, y, 2).unwrap().basis() {
                h1s.push(ar.map(a1).add(&Morphism::from_vec(ar.module(x), ar.module(y), e)));
            }
            for h1 in h1s {
                let r = composite_analysis(&rads, &[x, y, z], &[h1, ar.map(a2).clone()]).unwrap();
                assert!(!r.deep_nonzero);
            }
        }
    }
}

#[test]
fn sectional_family_sums() {
    let ar = full(&linear(5));
    let rads = Radicals::new(&ar);
    let p5 = ar.projective_vertex(4).unwrap();
    for v in ar.tq.vertices() {
        for path in ar.tq.sectional_paths_from(p5, 4) {
            if path.arrows.is_empty() || ar.tq.path_vertices(&path).unwrap().last() != Some(&v) {
                continue;
            }
            let fam = SectionalFamily::from_arrows(&rads, p5, std::slice::from_ref(&path.arrows)).unwrap();
            let r = sectional_family_sum(&rads, &fam).unwrap();
            assert!(r.holds && r.min_length == path.arrows.len(), "{r:?}");
        }
    }

    // parallel arrows of the Kronecker quiver
    let kr = quiver(2, &[(0, 1, 2), (1, 1, 2)]);
    let ar = knit_ar_component(&kr, Direction::FromProjectives, 3).unwrap();
    let rads = Radicals::new(&ar);
    let (p2, p1) = (ar.projective_vertex(1).unwrap(), ar.projective_vertex(0).unwrap());
    let both = ar.tq.arrows_between(p2, p1);
    assert_eq!(both.len(), 2);
    let fam = SectionalFamily::from_arrows(&rads, p2, &[vec![both[0]], vec![both[1]]]).unwrap();
    let r = sectional_family_sum(&rads, &fam).unwrap();
    assert!(r.holds && r.min_length == 1);

    // a hook is not a sectional family
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    let s2 = ar.projective_vertex(1).unwrap();
    let out = ar.tq.out_arrows(s2)[0];
    let next = ar.tq.out_arrows(ar.tq.target(out))[0];
    let fam = SectionalFamily::from_arrows(&rads, s2, &[vec![out, next]]).unwrap();
    assert!(matches!(sectional_family_sum(&rads, &fam), Err(Error::InvalidFamily { condition: 'c', .. })));
}

#[test]
fn covering_probe_on_a3() {
    let ar = full(&linear(3));
    let root = ar.projective_vertex(2).unwrap();
    let gc = build_cover(&ar.tq, root, 12).unwrap();
    let f = well_behaved_assignment(&gc, &ar, &Default::default()).unwrap();
    let r = generalized_standard_probe(&ar, &gc, &f, 6).unwrap();
    assert!(r.consistent());
    assert_eq!(r.skipped, 0);
    assert_eq!(r.checked, 36);
    assert!(r.pairs.iter().any(|p| p.hom_dim == 0 && p.cover_dim == 0));
}

#[test]
fn finite_type_on_dynkin_quivers() {
    let cases = [
        ordinary(2, &[(0, 1, 2)]),
        ordinary(3, &[(0, 1, 2), (1, 2, 3)]),
        ordinary(4, &[(0, 2, 1), (1, 2, 3), (2, 4, 3)]),
        ordinary(4, &[(0, 1, 4), (1, 2, 4), (2, 3, 4)]),
    ];
    for tq in cases {
        let r = finite_type_check(&tq, 12).unwrap();
        assert_eq!(r.verdict, Verdict::FiniteType);
        assert!(r.max_degree().unwrap() <= r.diameter);
        assert!(r.path_bounds.iter().all(|p| p.holds));
        assert_eq!(r.path_bounds.len(), tq.vertex_count());
    }
    let r = finite_type_check(&ordinary(3, &[(0, 1, 2), (1, 2, 3)]), 0).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    let r = finite_type_check(&ordinary(3, &[(0, 1, 2), (1, 2, 3), (2, 1, 3)]), 8).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.injectives.iter().any(|e| e.report.degree().is_none()));
}

#[test]
fn reports_serialize() {
    let ar = full(&linear(2));
    let rads = Radicals::new(&ar);
    let r = left_degree(&rads, &single(&ar, arrows(&ar)[1]), 3).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["side"], "left");
    assert_eq!(v["outcome"]["kind"], "finite");
    assert_eq!(v["outcome"]["degree"], 1);
    let none = right_degree(&rads, &single(&ar, arrows(&ar)[1]), 3).unwrap();
    assert_eq!(serde_json::to_value(&none).unwrap()["outcome"]["kind"], "not-found-within");
}

fn perturbation() -> impl Strategy<Value = (usize, Vec<i64>)> {
    (0usize..64, prop::collection::vec(-3i64..=3, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parallel_irreducibles_share_degree_and_kernel((pick, coeffs) in perturbation()) {
        let ar = full(&linear(4));
        let rads = Radicals::new(&ar);
        let all = arrows(&ar);
        let a = all[pick % all.len()];
        let (x, y) = (ar.tq.source(a), ar.tq.target(a));
        let rad2 = rads.rad(x, y, 2).unwrap();
        let eps: Vec<_> = (0..rad2.ambient())
            .map(|k| rad2.basis().iter().zip(&coeffs).map(|(v, &c)| &v[k] * q(c)).sum())
            .collect();
        let g = ar.map(a).add(&Morphism::from_vec(ar.module(x), ar.module(y), &eps));
        let f2 = SumMap::out_tuple(x, vec![(y, g.clone())]);
        let d1 = left_degree(&rads, &single(&ar, a), 8).unwrap().degree();
        let d2 = left_degree(&rads, &f2, 8).unwrap().degree();
        prop_assert_eq!(d1, d2);
        let k1 = kernel(ar.map(a), ar.module(x)).0;
        let k2 = kernel(&g, ar.module(x)).0;
        if k1.is_zero() {
            prop_assert!(k2.is_zero());
        } else {
            prop_assert!(find_iso(&k1, &k2, 10_000).unwrap().is_iso());
        }
    }
}
