//! Shared fixtures for the integration tests: a seeded suite of finite
//! actions, brute-force counting oracles that only read the raw group and
//! action tables, and random bundles.
#![allow(dead_code)]

use std::sync::Arc;

use num_complex::Complex64;
use orbigroupoid::fingrp::FiniteGroup;
use orbigroupoid::gpd::{action_groupoid, localisation_parts, orbits_and_isotropy, GroupAction, Groupoid};
use orbigroupoid::vbun::{Representation, VectorBundle};
use orbigroupoid::{CMatrix64, GroupoidHom};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_SEED: u64 = 0x5eed_0b1f;
pub const MAX_POINTS: usize = 12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `C1..C8`, `S3`, `S4` and `Z2×Z2`.
pub fn suite_groups() -> Vec<(String, FiniteGroup)> {
    let mut out: Vec<(String, FiniteGroup)> =
        (1..=8).map(|n| (format!("C{n}"), FiniteGroup::cyclic(n).unwrap())).collect();
    out.push(("S3".into(), FiniteGroup::symmetric(3).unwrap()));
    out.push(("S4".into(), FiniteGroup::symmetric(4).unwrap()));
    let c2 = FiniteGroup::cyclic(2).unwrap();
    out.push(("V4".into(), c2.direct_product(&c2)));
    out
}

#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub action: GroupAction,
}

impl Case {
    pub fn groupoid(&self) -> Arc<Groupoid> {
        Arc::new(action_groupoid(&self.action))
    }
}

/// A subgroup generated by up to two random elements.
pub fn random_subgroup(g: &FiniteGroup, rng: &mut impl Rng) -> Vec<usize> {
    let k = rng.gen_range(0..=2);
    let gens: Vec<usize> = (0..k).map(|_| rng.gen_range(0..g.order())).collect();
    g.generated(&gens)
}

/// Random G-set with at most `MAX_POINTS` points built from free, trivial
/// and coset orbits. The first three cases per group force one piece of
/// each kind where it fits.
pub fn random_action(g: &FiniteGroup, rng: &mut impl Rng, forced: Option<usize>) -> GroupAction {
    let mut pieces = Vec::new();
    let mut used = 0;
    let want = rng.gen_range(1..=4);
    let mut attempts = 0;
    while pieces.len() < want && attempts < 40 {
        attempts += 1;
        let kind = match (pieces.len(), forced) {
            (0, Some(k)) => k,
            _ => rng.gen_range(0..3),
        };
        let room = MAX_POINTS - used;
        let piece = match kind {
            0 if g.order() <= room => GroupAction::regular(g.clone()),
            1 if room >= 1 => GroupAction::trivial(g.clone(), 1),
            2 => {
                let h = random_subgroup(g, rng);
                if g.order() / h.len() > room {
                    continue;
                }
                GroupAction::on_cosets(g.clone(), &h).unwrap()
            }
            _ => continue,
        };
        used += piece.num_points();
        pieces.push(piece);
    }
    if pieces.is_empty() {
        pieces.push(GroupAction::trivial(g.clone(), 1));
    }
    GroupAction::sum(&pieces).unwrap()
}

/// Five actions per suite group, 55 in all.
pub fn suite(seed: u64) -> Vec<Case> {
    let mut rng = rng(seed);
    let mut cases = Vec::new();
    for (name, g) in suite_groups() {
        for i in 0..5 {
            let forced = (i < 3).then_some(i);
            let action = random_action(&g, &mut rng, forced);
            cases.push(Case { name: format!("{name}#{i}({} pts)", action.num_points()), action });
        }
    }
    cases
}

// ---- oracles -------------------------------------------------------------

fn commute(g: &FiniteGroup, a: usize, b: usize) -> bool {
    g.mul(a, b) == g.mul(b, a)
}

/// Conjugacy classes by closing each element under conjugation.
pub fn brute_class_count(g: &FiniteGroup) -> usize {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut count = 0;
    for x in 0..n {
        if seen[x] {
            continue;
        }
        count += 1;
        for h in 0..n {
            seen[g.mul(g.mul(h, x), g.inv(h))] = true;
        }
    }
    count
}

/// Conjugacy classes of the subgroup `sub` (a list of elements of `g`).
pub fn brute_class_count_in(g: &FiniteGroup, sub: &[usize]) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    let mut count = 0;
    for &x in sub {
        if seen.contains(&x) {
            continue;
        }
        count += 1;
        for &h in sub {
            seen.insert(g.mul(g.mul(h, x), g.inv(h)));
        }
    }
    count
}

pub fn stabilizer(a: &GroupAction, x: usize) -> Vec<usize> {
    a.group().elements().filter(|&g| a.act(g, x) == x).collect()
}

pub fn hom_count(a: &GroupAction, x: usize, y: usize) -> usize {
    a.group().elements().filter(|&g| a.act(g, x) == y).count()
}

/// Orbit labels of the points of `pts` under the elements `by`.
fn orbit_count_under(a: &GroupAction, pts: &[usize], by: &[usize]) -> usize {
    let mut label = vec![usize::MAX; a.num_points()];
    let mut count = 0;
    for &x in pts {
        if label[x] != usize::MAX {
            continue;
        }
        for &h in by {
            label[a.act(h, x)] = count;
        }
        count += 1;
    }
    count
}

pub fn orbit_count(a: &GroupAction) -> usize {
    let all: Vec<usize> = (0..a.num_points()).collect();
    let elems: Vec<usize> = a.group().elements().collect();
    orbit_count_under(a, &all, &elems)
}

/// Burnside count of inertia orbits: `(1/|G|) Σ_{gh=hg} |Fix g ∩ Fix h|`.
pub fn burnside_inertia_count(a: &GroupAction) -> usize {
    let g = a.group();
    let mut total = 0;
    for x in g.elements() {
        for y in g.elements().filter(|&y| commute(g, x, y)) {
            total += (0..a.num_points()).filter(|&p| a.act(x, p) == p && a.act(y, p) == p).count();
        }
    }
    assert_eq!(total % g.order(), 0);
    total / g.order()
}

/// `Σ_{g∈R} |Mᵍ / Z(g)|` with `R` the least element of each class.
pub fn sector_count(a: &GroupAction) -> usize {
    let g = a.group();
    let n = g.order();
    let mut seen = vec![false; n];
    let mut total = 0;
    for x in 0..n {
        if seen[x] {
            continue;
        }
        for h in 0..n {
            seen[g.mul(g.mul(h, x), g.inv(h))] = true;
        }
        let z: Vec<usize> = (0..n).filter(|&h| commute(g, h, x)).collect();
        let fixed: Vec<usize> = (0..a.num_points()).filter(|&p| a.act(x, p) == p).collect();
        total += orbit_count_under(a, &fixed, &z);
    }
    total
}

/// Sum over orbits of the class count of the stabilizer at one point.
pub fn brute_k_rank(a: &GroupAction) -> usize {
    let elems: Vec<usize> = a.group().elements().collect();
    let mut label = vec![false; a.num_points()];
    let mut total = 0;
    for x in 0..a.num_points() {
        if label[x] {
            continue;
        }
        for &h in &elems {
            label[a.act(h, x)] = true;
        }
        total += brute_class_count_in(a.group(), &stabilizer(a, x));
    }
    total
}

/// Isotropy order of a WPS point supported on `support`: the number of
/// `k` mod `m` with `m | k·wᵢ` for all `i`, `m` the smallest weight there.
pub fn brute_wps_isotropy(w: &[u64], support: &[usize]) -> u64 {
    let m = support.iter().map(|&i| w[i]).min().unwrap();
    (0..m).filter(|k| support.iter().all(|&i| (k * w[i]).is_multiple_of(m))).count() as u64
}

// ---- covers --------------------------------------------------------------

/// Up to three pieces; every object lands in at least one.
pub fn random_cover(n: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let k = rng.gen_range(1..=3);
    let mut pieces = vec![Vec::new(); k];
    for x in 0..n {
        let first = rng.gen_range(0..k);
        pieces[first].push(x);
        for (j, p) in pieces.iter_mut().enumerate() {
            if j != first && rng.gen_bool(0.3) {
                p.push(x);
            }
        }
    }
    for p in &mut pieces {
        p.sort_unstable();
    }
    pieces.retain(|p| !p.is_empty());
    pieces
}

/// The localisation over `cover` with its projection.
pub fn localise(g: &Arc<Groupoid>, cover: &[Vec<usize>]) -> GroupoidHom {
    let loc = localisation_parts(g, cover).unwrap();
    GroupoidHom::new(Arc::new(loc.groupoid), g.clone(), loc.obj_map, loc.arr_map).unwrap()
}

// ---- bundles -------------------------------------------------------------

pub const TOL: f64 = 1e-9;

/// Random representation of dimension at most `budget`, assembled from
/// trivial, coset and induced pieces. `None` when nothing was picked.
pub fn random_rep(h: &FiniteGroup, budget: usize, rng: &mut impl Rng) -> Option<Representation<f64>> {
    let mut rep: Option<Representation<f64>> = None;
    let mut room = budget;
    for _ in 0..6 {
        if room == 0 || rng.gen_bool(0.25) {
            break;
        }
        let piece = match rng.gen_range(0..3) {
            0 => Representation::trivial(h.clone(), 1),
            1 => {
                let k = random_subgroup(h, rng);
                if h.order() / k.len() > room {
                    continue;
                }
                Representation::on_cosets(h, &k).unwrap()
            }
            _ => {
                let c = rng.gen_range(0..h.order());
                let n = h.element_order(c);
                if h.order() / n > room {
                    continue;
                }
                Representation::induced_from_cyclic(h, c, rng.gen_range(0..n), TOL).unwrap()
            }
        };
        room -= piece.dim();
        rep = Some(match rep {
            None => piece,
            Some(r) => r.direct_sum(&piece).unwrap(),
        });
    }
    rep
}

fn random_entry(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Gauge `S_x = I + 0.3·R` with `R` random.
pub fn random_gauge(dims: &[usize], rng: &mut impl Rng) -> Vec<CMatrix64> {
    dims.iter()
        .map(|&d| {
            let r = CMatrix64::from_fn(d, d, |_, _| random_entry(rng) * 0.3);
            &CMatrix64::identity(d) + &r
        })
        .collect()
}

/// Random bundle of rank at most `max_rank` on every orbit, gauged so the
/// loop matrices are not permutation-like.
pub fn random_bundle(g: &Arc<Groupoid>, max_rank: usize, rng: &mut impl Rng) -> VectorBundle<f64> {
    let od = orbits_and_isotropy(g);
    let reps: Vec<_> = od.isotropy.iter().map(|iso| random_rep(&iso.group, max_rank, rng)).collect();
    let e = VectorBundle::from_orbit_representations(g.clone(), &reps).unwrap();
    let s = random_gauge(e.dims(), rng);
    e.gauge_transformed(&s, TOL).unwrap()
}

/// A random permutation of `0..n` fixing 0.
pub fn relabeling(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut rest: Vec<usize> = (1..n).collect();
    rest.shuffle(rng);
    std::iter::once(0).chain(rest).collect()
}
