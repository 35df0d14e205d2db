mod support;

use orbigroupoid::fingrp::{are_isomorphic, centralizer, conjugacy_classes, find_isomorphism, FiniteGroup};
use orbigroupoid::gmor::{are_morita_equivalent, is_weak_equivalence, morita_signature, GeneralizedMap};
use orbigroupoid::gpd::{induced_groupoid, orbits_and_isotropy};
use orbigroupoid::inertia::{inertia_decomposition, inertia_orbit_count, inertia_orbit_map};
use orbigroupoid::orbmodel::{wps_effective, wps_isotropy, wps_strata, WeightVector};
use orbigroupoid::vbun::{
    ch_deloc, ch_deloc_rank_check, k_rank, pullback, tensor, whitney_sum, InertiaSectors, Tolerances, VectorBundle,
};
use proptest::prelude::*;
use rand::Rng;
use support::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn group_index() -> impl Strategy<Value = usize> {
    0..suite_groups().len()
}

fn case_from(gi: usize, seed: u64) -> Case {
    let (name, g) = suite_groups().swap_remove(gi);
    let mut r = rng(seed);
    let action = random_action(&g, &mut r, None);
    Case { name, action }
}

#[test]
fn suite_mixes_orbit_kinds() {
    let cases = suite(SUITE_SEED);
    assert!(cases.len() >= 50);
    let (mut free, mut trivial, mut coset) = (0, 0, 0);
    for c in &cases {
        let a = &c.action;
        assert!(a.num_points() <= MAX_POINTS);
        let od = orbits_and_isotropy(&c.groupoid());
        for iso in &od.isotropy {
            match iso.order() {
                1 if a.group().order() > 1 => free += 1,
                n if n == a.group().order() => trivial += 1,
                _ => coset += 1,
            }
        }
    }
    assert!(free > 10 && trivial > 10 && coset > 10, "{free} {trivial} {coset}");
}

#[test]
fn random_bundles_are_not_degenerate() {
    let mut r = rng(1);
    let mut ranks = Vec::new();
    for c in suite(SUITE_SEED).iter().take(20) {
        let e = random_bundle(&c.groupoid(), 4, &mut r);
        assert!(e.validate(TOL).is_ok());
        ranks.extend_from_slice(e.dims());
    }
    assert!(ranks.iter().filter(|&&d| d > 1).count() > ranks.len() / 4);
    assert!(ranks.iter().all(|&d| d <= 4));
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn class_sizes_sum_to_order(gi in group_index()) {
        let (_, g) = suite_groups().swap_remove(gi);
        let cd = conjugacy_classes(&g);
        prop_assert_eq!(cd.len(), brute_class_count(&g));
        prop_assert_eq!(cd.classes.iter().map(Vec::len).sum::<usize>(), g.order());
        for (class, &x) in cd.classes.iter().zip(&cd.representatives) {
            prop_assert_eq!(class.len() * centralizer(&g, x).unwrap().order(), g.order());
        }
    }

    #[test]
    fn orbit_stabilizer(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let a = &c.action;
        let od = orbits_and_isotropy(&c.groupoid());
        prop_assert_eq!(od.orbits.len(), orbit_count(a));
        for (orbit, iso) in od.orbits.iter().zip(&od.isotropy) {
            prop_assert_eq!(orbit.len() * iso.order(), a.group().order());
            prop_assert_eq!(iso.order(), stabilizer(a, orbit[0]).len());
        }
    }

    #[test]
    fn isomorphism_survives_relabeling(gi in group_index(), seed in any::<u64>()) {
        let (_, g) = suite_groups().swap_remove(gi);
        let p = relabeling(g.order(), &mut rng(seed));
        let mut inv = vec![0; p.len()];
        p.iter().enumerate().for_each(|(i, &j)| inv[j] = i);
        let table: Vec<Vec<usize>> =
            (0..g.order()).map(|a| (0..g.order()).map(|b| p[g.mul(inv[a], inv[b])]).collect()).collect();
        let h = FiniteGroup::from_table(&table, None).unwrap();
        prop_assert!(are_isomorphic(&g, &h).unwrap());
        prop_assert!(are_isomorphic(&h, &g).unwrap());
        let map = find_isomorphism(&g, &h).unwrap().unwrap();
        for a in g.elements() {
            for b in g.elements() {
                prop_assert_eq!(map[g.mul(a, b)], h.mul(map[a], map[b]));
            }
        }
    }

    #[test]
    fn torsor(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let g = localise(&c.groupoid(), &random_cover(c.action.num_points(), &mut rng(seed))).dom;
        let od = orbits_and_isotropy(&g);
        for (orbit, iso) in od.orbits.iter().zip(&od.isotropy) {
            for &x in orbit {
                for &y in orbit {
                    prop_assert_eq!(g.arrows_between(x, y).count(), iso.order());
                }
            }
        }
    }

    #[test]
    fn localisation_projection_is_weak(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let g = c.groupoid();
        let p = localise(&g, &random_cover(g.num_objects(), &mut rng(seed)));
        prop_assert!(is_weak_equivalence(&p).is_weak());
        for m in p.dom.objects() {
            prop_assert_eq!(p.dom.isotropy(m).order(), g.isotropy(p.obj_map[m]).order());
        }
    }

    #[test]
    fn induced_isotropy(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let g = c.groupoid();
        let mut r = rng(seed);
        let f: Vec<usize> = (0..r.gen_range(1..8)).map(|_| r.gen_range(0..g.num_objects())).collect();
        let ind = induced_groupoid(&g, &f).unwrap();
        for (m, &x) in f.iter().enumerate() {
            prop_assert_eq!(ind.isotropy(m).order(), g.isotropy(x).order());
            for (m2, &x2) in f.iter().enumerate() {
                prop_assert_eq!(ind.arrows_between(m, m2).count(), g.arrows_between(x, x2).count());
            }
        }
    }

    #[test]
    fn morita_invariance(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let g = c.groupoid();
        let p = localise(&g, &random_cover(g.num_objects(), &mut rng(seed)));
        prop_assert!(morita_signature(&g).unwrap().same_as(&morita_signature(&p.dom).unwrap()).unwrap());
        let verdict = are_morita_equivalent(&g, &p.dom).unwrap();
        prop_assert!(verdict.equivalent);
        prop_assert_eq!(k_rank(&p.dom), k_rank(&g));
        prop_assert_eq!(inertia_orbit_count(&p.dom), inertia_orbit_count(&g));
        // a generalized map from the span stays valid
        let span = verdict.span.unwrap();
        prop_assert!(GeneralizedMap::new(span.left, span.right).is_ok());
    }

    #[test]
    fn weak_equivalences_compose(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let mut r = rng(seed);
        let d = inertia_decomposition(&c.action).unwrap();
        let q = localise(&d.decomposition, &random_cover(d.decomposition.num_objects(), &mut r));
        let q2 = localise(&q.dom, &random_cover(q.dom.num_objects(), &mut r));
        let f = q2.then(&q).unwrap().then(&d.comparison).unwrap();
        prop_assert!(f.validate().is_ok());
        prop_assert!(is_weak_equivalence(&f).is_weak());
    }

    #[test]
    fn ch_deloc_is_a_ring_map(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let g = c.groupoid();
        let mut r = rng(seed);
        let (e, f) = (random_bundle(&g, 3, &mut r), random_bundle(&g, 3, &mut r));
        let s = InertiaSectors::new(&g);
        let (ce, cf) = (ch_deloc(&e, &s, TOL).unwrap(), ch_deloc(&f, &s, TOL).unwrap());
        let sum = ch_deloc(&whitney_sum(&e, &f).unwrap(), &s, TOL).unwrap();
        let prod = ch_deloc(&tensor(&e, &f).unwrap(), &s, TOL).unwrap();
        prop_assert!(sum.max_abs_diff(&ce.add(&cf)) <= TOL);
        prop_assert!(prod.max_abs_diff(&ce.mul(&cf)) <= TOL);
    }

    #[test]
    fn section_dimension_is_averaged_trace(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let e = random_bundle(&c.groupoid(), 4, &mut rng(seed));
        let sections = e.invariant_sections(TOL);
        let avg = e.averaged_trace();
        prop_assert!((avg - sections.dimension as f64).abs() < 1e-9, "{} vs {}", avg, sections.dimension);
        prop_assert_eq!(sections.basis.len(), sections.dimension);
        for s in &sections.basis {
            prop_assert!(e.section_defect(s) < 1e-8);
        }
    }

    #[test]
    fn pullback_along_weak_equivalence(gi in group_index(), seed in any::<u64>()) {
        let c = case_from(gi, seed);
        let mut r = rng(seed);
        let d = inertia_decomposition(&c.action).unwrap();
        let base = d.inertia.groupoid.clone();
        let e = random_bundle(&base, 3, &mut r);
        let q = localise(&base, &random_cover(base.num_objects(), &mut r));
        let map = inertia_orbit_map(&q);
        let ce = ch_deloc(&e, &InertiaSectors::new(&base), TOL).unwrap();
        let cq = ch_deloc(&pullback(&q, &e).unwrap(), &InertiaSectors::new(&q.dom), TOL).unwrap();
        prop_assert_eq!(cq.values.len(), ce.values.len());
        for (i, v) in cq.values.iter().enumerate() {
            prop_assert!((v - ce.values[map[i]]).norm() <= TOL);
        }
    }

    #[test]
    fn wps_isotropy_matches_brute_force(w in prop::collection::vec(1u64..13, 1..5), mask in any::<u16>()) {
        let wv = WeightVector::new(w.clone()).unwrap();
        let support: Vec<usize> = (0..w.len()).filter(|i| mask >> i & 1 == 1).collect();
        let support = if support.is_empty() { vec![0] } else { support };
        let iso = wps_isotropy(&wv, &support).unwrap();
        prop_assert_eq!(iso, brute_wps_isotropy(&w, &support));
        // enlarging the support can only shrink the group
        let full: Vec<usize> = (0..w.len()).collect();
        prop_assert_eq!(iso % wps_isotropy(&wv, &full).unwrap(), 0);
        prop_assert_eq!(wps_effective(&wv), wps_isotropy(&wv, &full).unwrap() == 1);
        for s in wps_strata(&wv) {
            prop_assert!(s.order > 1);
            prop_assert_eq!(s.order, brute_wps_isotropy(&w, &s.support));
        }
    }
}

#[test]
fn f32_kernels_agree_with_f64() {
    let mut r = rng(32);
    let tol32 = Tolerances::<f32> { structural: 1e-4, rank: 1e-3, eigen: 1e-3 };
    for c in suite(SUITE_SEED).iter().step_by(5) {
        let g = c.groupoid();
        let e = random_bundle(&g, 3, &mut r);
        let e32: VectorBundle<f32> = e.cast();
        assert!(e32.validate(tol32.structural).is_ok(), "{}", c.name);
        let s = InertiaSectors::new(&g);
        let (c64, c32) = (ch_deloc(&e, &s, TOL).unwrap(), ch_deloc(&e32, &s, tol32.structural).unwrap());
        for (a, b) in c64.values.iter().zip(&c32.values) {
            assert!((a.re - b.re as f64).abs() < 1e-4 && (a.im - b.im as f64).abs() < 1e-4, "{}", c.name);
        }
        assert_eq!(e32.invariant_sections(tol32.rank).dimension, e.invariant_sections(TOL).dimension, "{}", c.name);
        let rc = ch_deloc_rank_check(&g, &tol32).unwrap();
        assert!(rc.pass, "{}", c.name);
    }
}
