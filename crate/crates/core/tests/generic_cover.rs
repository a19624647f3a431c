use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use arq::cover::*;
use arq::format::parse;
use arq::linalg::q;
use arq::rep::*;
use arq::{Error, PathWord, TranslationQuiver, VertexId};
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

fn knit(qv: &Arc<Quiver>, dir: Direction, bound: usize) -> ArQuiver {
    knit_ar_component(qv, dir, bound).unwrap()
}

/// Base vertices within undirected distance `r` of `v`.
fn base_ball(tq: &TranslationQuiver, v: VertexId, r: usize) -> usize {
    let mut dist = BTreeMap::from([(v, 0usize)]);
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == r {
            continue;
        }
        for y in tq.successors(x).into_iter().chain(tq.predecessors(x)) {
            if !dist.contains_key(&y) {
                dist.insert(y, d + 1);
                queue.push_back(y);
            }
        }
    }
    dist.len()
}

fn is_bijection(gc: &GenericCover) -> bool {
    let vs: BTreeSet<_> = gc.pi_vertices.values().copied().collect();
    let arrows: BTreeSet<_> = gc.pi_arrows.values().copied().collect();
    vs.len() == gc.pi_vertices.len()
        && vs.len() == gc.base.vertex_count()
        && arrows.len() == gc.pi_arrows.len()
        && arrows.len() == gc.base.arrow_count()
}

#[test]
fn a2_component_is_its_own_cover() {
    let ar = knit(&linear(2), Direction::FromProjectives, 25);
    for radius in [2, 3, 6] {
        for v in ar.tq.vertices() {
            let gc = build_cover(&ar.tq, v, radius).unwrap();
            assert!(is_bijection(&gc), "radius {radius} from {v}");
            assert!(verify_cover(&gc).is_valid());
            assert!(gc.cover.isomorphic(&ar.tq));
        }
    }
}

#[test]
fn dynkin_covers_are_trivial_and_valid() {
    for qv in [linear(4), d4()] {
        let ar = knit(&qv, Direction::FromProjectives, 25);
        let gc = build_cover(&ar.tq, 0, 12).unwrap();
        assert!(is_bijection(&gc));
        assert!(gc.boundary.is_empty());
        let report = verify_cover(&gc);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(gc.cover.componentwise_length_function().is_some());
    }
}

#[test]
fn radius_zero_is_a_single_vertex() {
    let ar = knit(&linear(3), Direction::FromProjectives, 25);
    let gc = build_cover(&ar.tq, 2, 0).unwrap();
    assert_eq!(gc.cover.vertex_count(), 1);
    assert_eq!(gc.pi(0), 2);
    assert!(gc.boundary.contains(&0));
}

#[test]
fn parallel_arrows_keep_their_multiplicity() {
    let tq = parse("v 0 P\nv 1 P\na 0 0 1\na 1 0 1\n").unwrap();
    let gc = build_cover(&tq, 0, 4).unwrap();
    assert_eq!(gc.cover.vertex_count(), 2);
    assert_eq!(gc.cover.arrows_between(0, 1).len(), 2);
    assert!(is_bijection(&gc));
    assert!(verify_cover(&gc).is_valid());

    // the Kronecker preprojectives: a strip, covered by itself
    let kr = quiver(2, &[(0, 1, 2), (1, 1, 2)]);
    let ar = knit(&kr, Direction::FromProjectives, 4);
    let gc = build_cover(&ar.tq, 0, 20).unwrap();
    assert!(is_bijection(&gc));
    assert!(verify_cover(&gc).is_valid());
}

#[test]
fn cycle_in_the_base_unrolls() {
    let ar = knit(&atilde2(), Direction::FromInjectives, 4);
    let v = ar.injective_vertex(0).unwrap();
    for radius in [4, 6, 8] {
        let gc = build_cover(&ar.tq, v, radius).unwrap();
        let ball = base_ball(&ar.tq, v, radius);
        assert!(gc.cover.vertex_count() > ball, "radius {radius}: {} vs {ball}", gc.cover.vertex_count());
        let report = verify_cover(&gc);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(gc.cover.componentwise_length_function().is_some());
    }
}

#[test]
fn simply_connected_base_matches_ball_counts() {
    // oracle in the other direction: a simply connected base gives equal counts
    let ar = knit(&linear(5), Direction::FromProjectives, 25);
    for r in 0..6 {
        let gc = build_cover(&ar.tq, 3, r).unwrap();
        assert_eq!(gc.cover.vertex_count(), base_ball(&ar.tq, 3, r));
    }
}

#[test]
fn construction_is_deterministic() {
    let ar = knit(&atilde2(), Direction::FromInjectives, 4);
    let a = build_cover(&ar.tq, 1, 6).unwrap();
    let b = build_cover(&ar.tq, 1, 6).unwrap();
    assert_eq!(a.cover, b.cover);
    assert_eq!(a.pi_vertices, b.pi_vertices);
    assert_eq!(a.pi_arrows, b.pi_arrows);
    assert_eq!(a.walks, b.walks);
}

#[test]
fn canonical_walks_reach_their_vertex() {
    let ar = knit(&atilde2(), Direction::FromInjectives, 4);
    let gc = build_cover(&ar.tq, 0, 6).unwrap();
    let dist = gc.cover.distances_from(0);
    for (v, w) in gc.walks.iter().enumerate() {
        assert_eq!(gc.evaluate_walk(&w.steps), Some(v as VertexId));
        assert!(w.steps.len() <= 6);
        if let Some(&d) = dist.get(&(v as VertexId)) {
            assert!(w.steps.len() <= d);
        }
    }
}

#[test]
fn injected_faults_are_reported() {
    let ar = knit(&d4(), Direction::FromProjectives, 25);
    let gc = build_cover(&ar.tq, 0, 10).unwrap();

    let mut bad = gc.clone();
    let (&a, &pa) = bad.pi_arrows.iter().next().unwrap();
    let other = ar.tq.arrows().map(|x| x.id).find(|&x| x != pa).unwrap();
    bad.pi_arrows.insert(a, other);
    let report = verify_cover(&bad);
    assert!(!report.is_valid());
    let src = gc.cover.source(a);
    assert!(report.violations.iter().any(|v| v.vertex == src), "{:?}", report.violations);

    let mut bad = gc.clone();
    let p = bad.cover.projectives().next().unwrap();
    bad.cover.set_projective(p, false);
    let report = verify_cover(&bad);
    assert!(report.violations.iter().any(|v| v.axiom == "marks" && v.vertex == p));
}

fn a2_parts(ar: &ArQuiver) -> (VertexId, VertexId, VertexId) {
    let s2 = ar.projective_vertex(1).unwrap();
    let p1 = ar.projective_vertex(0).unwrap();
    let s1 = ar.injective_vertex(0).unwrap();
    (s2, p1, s1)
}

#[test]
fn path_lifts() {
    let ar = knit(&linear(2), Direction::FromProjectives, 25);
    let (s2, p1, s1) = a2_parts(&ar);
    let gc = build_cover(&ar.tq, s2, 3).unwrap();
    let x = gc.root();
    assert_eq!(gc.lift_path(&PathWord::trivial(s2), x).unwrap(), PathWord::trivial(x));

    let a = ar.tq.arrows_between(s2, p1)[0];
    let b = ar.tq.arrows_between(p1, s1)[0];
    let hook = PathWord::new(s2, vec![a, b]);
    let lifted = gc.lift_path(&hook, x).unwrap();
    let vs = gc.cover.path_vertices(&lifted).unwrap();
    assert_eq!(vs.iter().map(|&v| gc.pi(v)).collect::<Vec<_>>(), vec![s2, p1, s1]);
    assert_eq!(gc.cover.tau(vs[2]), Some(vs[0]));
    assert!(gc.cover.is_hook(vs[0], vs[2]));

    // sectional paths lift to sectional paths
    let ar = knit(&linear(5), Direction::FromProjectives, 25);
    let gc = build_cover(&ar.tq, 0, 10).unwrap();
    for p in ar.tq.sectional_paths_from(0, 4) {
        let l = gc.lift_path(&p, gc.root()).unwrap();
        assert!(gc.cover.is_sectional(&l).unwrap());
    }
}

#[test]
fn lifting_past_the_truncation_fails() {
    let ar = knit(&linear(4), Direction::FromProjectives, 25);
    let gc = build_cover(&ar.tq, 0, 1).unwrap();
    let long = ar.tq.sectional_paths_from(0, 3).into_iter().find(|p| p.len() == 3).unwrap();
    assert!(matches!(gc.lift_path(&long, gc.root()), Err(Error::RadiusExceeded(_))));
}

#[test]
fn sectional_family_lifts() {
    let ar = knit(&d4(), Direction::FromProjectives, 25);
    let rads = Radicals::new(&ar);
    let p4 = ar.projective_vertex(3).unwrap();
    let gc = build_cover(&ar.tq, p4, 8).unwrap();
    let outs = ar.tq.out_arrows(p4).to_vec();
    assert_eq!(outs.len(), 3);

    let single = SectionalFamily::from_arrows(&rads, p4, &[vec![outs[0]]]).unwrap();
    let lifted = gc.lift_sectional_family(&single, &rads, gc.root()).unwrap();
    assert_eq!(lifted.len(), 1);
    assert_eq!(gc.pi_arrow(lifted[0].arrows[0]), outs[0]);

    let pair = SectionalFamily::from_arrows(&rads, p4, &[vec![outs[0]], vec![outs[1]]]).unwrap();
    let lifted = gc.lift_sectional_family(&pair, &rads, gc.root()).unwrap();
    assert_ne!(lifted[0].arrows[0], lifted[1].arrows[0]);
    assert_eq!(lifted[0].start, lifted[1].start);

    let ar2 = knit(&linear(2), Direction::FromProjectives, 25);
    let rads2 = Radicals::new(&ar2);
    let (s2, p1, s1) = a2_parts(&ar2);
    let gc2 = build_cover(&ar2.tq, s2, 4).unwrap();
    let hook = vec![ar2.tq.arrows_between(s2, p1)[0], ar2.tq.arrows_between(p1, s1)[0]];
    let fam = SectionalFamily::from_arrows(&rads2, s2, &[hook]).unwrap();
    match gc2.lift_sectional_family(&fam, &rads2, gc2.root()) {
        Err(Error::InvalidFamily { condition, .. }) => assert_eq!(condition, 'c'),
        other => panic!("expected a hook rejection, got {other:?}"),
    }
}

#[test]
fn well_behaved_assignment_with_a_pin() {
    let ar = knit(&linear(2), Direction::FromProjectives, 25);
    let (s2, p1, s1) = a2_parts(&ar);
    let gc = build_cover(&ar.tq, s2, 4).unwrap();
    let x = gc.root();
    let y = gc.successor_over(x, p1).unwrap();
    let z = gc.successor_over(y, s1).unwrap();
    let pin_arrow = gc.cover.arrows_between(y, z)[0];
    let f = ar.map(ar.tq.arrows_between(p1, s1)[0]).scale(&q(3));
    let pins = BTreeMap::from([(pin_arrow, f.clone())]);
    let wb = well_behaved_assignment(&gc, &ar, &pins).unwrap();
    assert!(wb.check.is_valid(), "{:?}", wb.check.failures);
    assert_eq!(wb.map(pin_arrow), &f);
    let g = wb.map(gc.cover.arrows_between(x, y)[0]);
    assert!(f.after(g).is_zero());
    assert!(g.is_mono() && f.is_epi());

    let zero = Morphism::zero(ar.module(p1), ar.module(s1));
    let pins = BTreeMap::from([(pin_arrow, zero)]);
    assert!(matches!(well_behaved_assignment(&gc, &ar, &pins), Err(Error::NotIrreducible(_))));
}

#[test]
fn well_behaved_assignment_without_pins() {
    for (qv, dir, bound) in [
        (d4(), Direction::FromProjectives, 25),
        (linear(4), Direction::FromProjectives, 25),
        (atilde2(), Direction::FromInjectives, 4),
    ] {
        let ar = knit(&qv, dir, bound);
        let gc = build_cover(&ar.tq, 0, 8).unwrap();
        let wb = well_behaved_assignment(&gc, &ar, &BTreeMap::new()).unwrap();
        assert!(wb.check.is_valid(), "{:?}", wb.check.failures);
        assert!(wb.check.meshes_checked > 0);
        assert_eq!(wb.maps.len(), gc.cover.arrow_count());
    }
}

#[test]
fn pins_at_a_vertex_with_several_arrows() {
    let ar = knit(&d4(), Direction::FromProjectives, 25);
    let gc = build_cover(&ar.tq, 0, 10).unwrap();
    // pin the three arrows out of the lift of P4 to rescaled and mixed maps
    let p4 = ar.projective_vertex(3).unwrap();
    let x = gc.fiber(p4)[0];
    let outs = gc.cover.out_arrows(x).to_vec();
    let pins: BTreeMap<_, _> =
        outs.iter().enumerate().map(|(k, &a)| (a, ar.map(gc.pi_arrow(a)).scale(&q(k as i64 + 2)))).collect();
    let wb = well_behaved_assignment(&gc, &ar, &pins).unwrap();
    assert!(wb.check.is_valid(), "{:?}", wb.check.failures);
    for (a, f) in &pins {
        assert_eq!(wb.map(*a), f);
    }
}

fn walk_strategy() -> impl Strategy<Value = (Vec<u8>, u8, u8)> {
    (prop::collection::vec(any::<u8>(), 0..5), any::<u8>(), any::<u8>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Inserting a backtrack or a mesh square anywhere in a walk does not
    /// move its endpoint.
    #[test]
    fn walk_rules_do_not_change_the_class((choices, at, pick) in walk_strategy()) {
        let ar = knit(&atilde2(), Direction::FromInjectives, 4);
        let gc = build_cover(&ar.tq, 0, 12).unwrap();
        let base = &gc.base;
        let mut walk: Vec<WalkStep> = Vec::new();
        let mut here = gc.pi(gc.root());
        for c in &choices {
            let mut moves: Vec<WalkStep> = base.out_arrows(here).iter().map(|&a| WalkStep { arrow: a, forward: true }).collect();
            moves.extend(base.in_arrows(here).iter().map(|&a| WalkStep { arrow: a, forward: false }));
            if moves.is_empty() { break; }
            let m = moves[*c as usize % moves.len()];
            here = if m.forward { base.target(m.arrow) } else { base.source(m.arrow) };
            walk.push(m);
        }
        let end = gc.evaluate_walk(&walk).unwrap();
        let cut = at as usize % (walk.len() + 1);
        let mut at_v = gc.pi(gc.root());
        for s in &walk[..cut] {
            at_v = if s.forward { base.target(s.arrow) } else { base.source(s.arrow) };
        }
        // backtrack
        let mut options: Vec<Vec<WalkStep>> = Vec::new();
        for &a in base.out_arrows(at_v) {
            options.push(vec![WalkStep { arrow: a, forward: true }, WalkStep { arrow: a, forward: false }]);
        }
        // mesh squares starting at a translate
        if let Some(z) = base.tau_inverse(at_v) {
            let mesh = base.mesh(z).unwrap();
            for i in &mesh.arms {
                for j in &mesh.arms {
                    if i.middle != j.middle {
                        options.push(vec![
                            WalkStep { arrow: i.alpha, forward: true },
                            WalkStep { arrow: i.beta, forward: true },
                            WalkStep { arrow: j.beta, forward: false },
                            WalkStep { arrow: j.alpha, forward: false },
                        ]);
                    }
                }
            }
        }
        prop_assume!(!options.is_empty());
        let insert = &options[pick as usize % options.len()];
        let mut longer = walk[..cut].to_vec();
        longer.extend_from_slice(insert);
        longer.extend_from_slice(&walk[cut..]);
        prop_assert_eq!(gc.evaluate_walk(&longer), Some(end));
    }
}
