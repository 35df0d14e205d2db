//! Loop spaces, inertia groupoids and the centralizer decomposition of the
//! inertia of an action groupoid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fingrp::{centralizer, conjugacy_classes, ElemId, Subgroup};
use crate::gmor::{is_weak_equivalence, GroupoidHom, WeakEquivalence};
use crate::gpd::{
    action_groupoid, disjoint_union, orbit_space, translation_groupoid, ArrowId, GroupAction, Groupoid, ObjId,
};

/// Arrows whose source and target agree, in arrow-id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpace {
    pub loops: Vec<ArrowId>,
    pub base: Vec<ObjId>,
    /// Loop index of each arrow, `usize::MAX` for non-loops.
    index: Vec<usize>,
}

impl LoopSpace {
    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// Loop index of an arrow, if it is a loop.
    pub fn index_of(&self, arrow: ArrowId) -> Option<usize> {
        self.index.get(arrow).copied().filter(|&i| i != usize::MAX)
    }
}

pub fn loop_space(g: &Groupoid) -> LoopSpace {
    let mut index = vec![usize::MAX; g.num_arrows()];
    let mut loops = Vec::new();
    for a in g.arrows().filter(|&a| g.is_loop(a)) {
        index[a] = loops.len();
        loops.push(a);
    }
    let base = loops.iter().map(|&a| g.src(a)).collect();
    LoopSpace { loops, base, index }
}

/// The inertia groupoid `G ⋉ S_G` with its basepoint homomorphism.
#[derive(Clone, Debug)]
pub struct Inertia {
    pub ambient: Arc<Groupoid>,
    pub loops: LoopSpace,
    /// Objects are loop indices; arrow `(δ, ℓ)` runs `ℓ → δℓδ⁻¹`.
    pub groupoid: Arc<Groupoid>,
    /// Sends a loop to its base object and `(δ, ℓ)` to `δ`.
    pub basepoint: GroupoidHom,
}

impl Inertia {
    /// Inertia arrow `(δ, ℓ)` for `δ` leaving the base of loop `ℓ`.
    pub fn arrow(&self, delta: ArrowId, loop_index: usize) -> ArrowId {
        let x = self.loops.base[loop_index];
        let k = self.ambient.out_arrows(x).binary_search(&delta).expect("δ leaves the base of ℓ");
        self.groupoid.out_arrows(loop_index)[k]
    }
}

/// Action of `g` on its loops by conjugation: `δ: x → y` sends a loop `γ`
/// at `x` to `δγδ⁻¹` at `y`.
pub fn inertia_groupoid(g: &Arc<Groupoid>) -> Inertia {
    let loops = loop_space(g);
    let (gpd, parts) =
        translation_groupoid(g, &loops.base, |delta, s| loops.index[g.conjugate_loop(delta, loops.loops[s])]);
    let groupoid = Arc::new(gpd);
    let basepoint = GroupoidHom {
        dom: groupoid.clone(),
        cod: g.clone(),
        obj_map: loops.base.clone(),
        arr_map: parts.iter().map(|p| p.0).collect(),
    };
    Inertia { ambient: g.clone(), loops, groupoid, basepoint }
}

/// Number of orbits of the inertia groupoid (twisted sectors).
pub fn inertia_orbit_count(g: &Arc<Groupoid>) -> usize {
    orbit_space(&inertia_groupoid(g).groupoid).count
}

/// Induced map on inertia orbits of a homomorphism `f: G → H`, sending the
/// orbit of a loop `ℓ` to the orbit of `f(ℓ)`.
pub fn inertia_orbit_map(f: &GroupoidHom) -> Vec<usize> {
    let (id, ic) = (inertia_groupoid(&f.dom), inertia_groupoid(&f.cod));
    let (sd, sc) = (orbit_space(&id.groupoid), orbit_space(&ic.groupoid));
    let mut m = vec![usize::MAX; sd.count];
    for (s, &l) in id.loops.loops.iter().enumerate() {
        let t = ic.loops.index_of(f.arr_map[l]).expect("homomorphisms send loops to loops");
        m[sd.quotient[s]] = sc.quotient[t];
    }
    m
}

/// A loop whose inertia isotropy differs from its centralizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralizerMismatch {
    pub loop_arrow: ArrowId,
    pub inertia_isotropy: Vec<ArrowId>,
    pub centralizer: Vec<ArrowId>,
}

/// Checks, for every loop `ℓ`, that the isotropy of the inertia groupoid at
/// `ℓ` is the centralizer of `ℓ` in the isotropy group at its base.
pub fn centralizer_isotropy_check(g: &Arc<Groupoid>) -> std::result::Result<(), CentralizerMismatch> {
    let inertia = inertia_groupoid(g);
    let ig = &inertia.groupoid;
    for (s, &ell) in inertia.loops.loops.iter().enumerate() {
        let mut got: Vec<ArrowId> = ig.loops_at(s).map(|a| inertia.basepoint.arr_map[a]).collect();
        got.sort_unstable();
        let want: Vec<ArrowId> =
            g.loops_at(inertia.loops.base[s]).filter(|&d| g.then(d, ell) == g.then(ell, d)).collect();
        if got != want {
            return Err(CentralizerMismatch { loop_arrow: ell, inertia_isotropy: got, centralizer: want });
        }
    }
    Ok(())
}

/// One summand `Z(g) ⋉ M^g` of the decomposition.
#[derive(Clone, Debug)]
pub struct SectorComponent {
    /// Conjugacy-class representative `g`.
    pub representative: ElemId,
    pub centralizer: Subgroup,
    /// `M^g`, sorted; point `i` of the component is `fixed_points[i]`.
    pub fixed_points: Vec<usize>,
    pub action: GroupAction,
    /// Object and arrow offsets inside the disjoint union.
    pub offsets: (usize, usize),
}

/// Inertia of `G ⋉ M` together with `⊔_{g∈R} Z(g) ⋉ M^g` and the comparison
/// homomorphism into the inertia groupoid.
#[derive(Clone, Debug)]
pub struct InertiaDecomposition {
    pub ambient: Arc<Groupoid>,
    pub inertia: Inertia,
    pub components: Vec<SectorComponent>,
    pub decomposition: Arc<Groupoid>,
    pub comparison: GroupoidHom,
    pub certificate: WeakEquivalence,
}

impl InertiaDecomposition {
    /// `Σ_g |M^g / Z(g)|`, counted on the components.
    pub fn sector_count(&self) -> usize {
        orbit_space(&self.decomposition).count
    }
}

/// Builds the decomposition for least-id conjugacy-class representatives
/// and verifies that the comparison map is a weak equivalence.
///
/// `φ_g` sends `(γ, x)` in `Z(g) ⋉ M^g` to the inertia arrow `((γ, x), (g, x))`.
pub fn inertia_decomposition(a: &GroupAction) -> Result<InertiaDecomposition> {
    let grp = a.group();
    let ambient = Arc::new(action_groupoid(a));
    let inertia = inertia_groupoid(&ambient);
    let classes = conjugacy_classes(grp);
    let mut components = Vec::with_capacity(classes.len());
    let (mut ob, mut ar) = (0, 0);
    for &g in &classes.representatives {
        let z = centralizer(grp, g)?;
        let fixed = a.fixed_points(g);
        let mut local = vec![usize::MAX; a.num_points()];
        for (i, &x) in fixed.iter().enumerate() {
            local[x] = i;
        }
        let table: Vec<Vec<usize>> =
            z.embedding.iter().map(|&h| fixed.iter().map(|&x| local[a.act(h, x)]).collect()).collect();
        let action = GroupAction::new(z.group.clone(), fixed.len(), &table)?;
        let n_arrows = z.order() * fixed.len();
        components.push(SectorComponent {
            representative: g,
            centralizer: z,
            fixed_points: fixed,
            action,
            offsets: (ob, ar),
        });
        ob += components.last().map_or(0, |c| c.fixed_points.len());
        ar += n_arrows;
    }
    let pieces: Vec<Groupoid> = components.iter().map(|c| action_groupoid(&c.action)).collect();
    let decomposition = Arc::new(disjoint_union(&pieces.iter().collect::<Vec<_>>()));
    let mut obj_map = Vec::with_capacity(decomposition.num_objects());
    let mut arr_map = Vec::with_capacity(decomposition.num_arrows());
    for (c, piece) in components.iter().zip(&pieces) {
        let loop_at =
            |x: usize| inertia.loops.index_of(a.arrow_id(c.representative, x)).expect("g fixes x, so (g, x) is a loop");
        for &x in &c.fixed_points {
            obj_map.push(loop_at(x));
        }
        for arrow in piece.arrows() {
            let (zi, i) = c.action.arrow_parts(arrow);
            let x = c.fixed_points[i];
            let delta = a.arrow_id(c.centralizer.to_parent(zi), x);
            arr_map.push(inertia.arrow(delta, loop_at(x)));
        }
    }
    let comparison = GroupoidHom { dom: decomposition.clone(), cod: inertia.groupoid.clone(), obj_map, arr_map };
    if let Err(v) = comparison.validate() {
        return Err(Error::Invariant(format!("comparison map is not a homomorphism: {v}")));
    }
    let certificate = is_weak_equivalence(&comparison);
    if !certificate.is_weak() {
        return Err(Error::Invariant(format!("comparison map is not a weak equivalence: {certificate:?}")));
    }
    Ok(InertiaDecomposition { ambient, inertia, components, decomposition, comparison, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingrp::FiniteGroup;
    use crate::gpd::orbits_and_isotropy;

    fn z(n: usize) -> FiniteGroup {
        FiniteGroup::cyclic(n).unwrap()
    }

    fn swap_fix_action() -> GroupAction {
        GroupAction::new(z(2), 3, &[vec![0, 1, 2], vec![1, 0, 2]]).unwrap()
    }

    #[test]
    fn loop_space_examples() {
        let free = action_groupoid(&GroupAction::regular(z(2)));
        assert_eq!(loop_space(&free).len(), 2);
        let s3 = Groupoid::point_quotient(&FiniteGroup::symmetric(3).unwrap());
        assert_eq!(loop_space(&s3).len(), 6);
        assert_eq!(loop_space(&action_groupoid(&swap_fix_action())).len(), 4);
    }

    #[test]
    fn inertia_examples() {
        let pt2 = Arc::new(Groupoid::point_quotient(&z(2)));
        let i = inertia_groupoid(&pt2);
        assert_eq!(i.basepoint.validate(), Ok(()));
        let od = orbits_and_isotropy(&i.groupoid);
        assert_eq!(od.isotropy_orders(), vec![2, 2]);

        let s3 = Arc::new(Groupoid::point_quotient(&FiniteGroup::symmetric(3).unwrap()));
        let i = inertia_groupoid(&s3);
        assert_eq!(i.groupoid.num_objects(), 6);
        let mut orders = orbits_and_isotropy(&i.groupoid).isotropy_orders();
        orders.sort();
        assert_eq!(orders, vec![2, 3, 6]);

        let sf = Arc::new(action_groupoid(&swap_fix_action()));
        let i = inertia_groupoid(&sf);
        let od = orbits_and_isotropy(&i.groupoid);
        assert_eq!(od.orbits.len(), 3);
        assert_eq!(od.orbits[0], vec![0, 1]);
    }

    #[test]
    fn decomposition_examples() {
        let d = inertia_decomposition(&GroupAction::trivial(FiniteGroup::trivial(), 4)).unwrap();
        assert_eq!(*d.decomposition, *d.ambient);
        assert_eq!(inertia_orbit_count(&d.ambient), 4);

        let s3 = FiniteGroup::symmetric(3).unwrap();
        let d = inertia_decomposition(&GroupAction::trivial(s3, 1)).unwrap();
        let orders: Vec<usize> = d.components.iter().map(|c| c.centralizer.order()).collect();
        assert_eq!(orders, vec![6, 2, 3]);
        assert!(d.certificate.is_weak());

        let d = inertia_decomposition(&swap_fix_action()).unwrap();
        assert_eq!(d.components.len(), 2);
        assert_eq!(d.components[0].fixed_points, vec![0, 1, 2]);
        assert_eq!(d.components[1].fixed_points, vec![2]);
        assert_eq!(d.sector_count(), 3);
        assert_eq!(inertia_orbit_count(&d.ambient), 3);
    }

    #[test]
    fn orbit_counts() {
        let s3 = Arc::new(Groupoid::point_quotient(&FiniteGroup::symmetric(3).unwrap()));
        assert_eq!(inertia_orbit_count(&s3), 3);
        let free = Arc::new(action_groupoid(
            &GroupAction::sum(&[GroupAction::regular(z(3)), GroupAction::regular(z(3))]).unwrap(),
        ));
        assert_eq!(inertia_orbit_count(&free), 2);
    }

    #[test]
    fn centralizer_check() {
        let s3 = Arc::new(Groupoid::point_quotient(&FiniteGroup::symmetric(3).unwrap()));
        assert_eq!(centralizer_isotropy_check(&s3), Ok(()));
        let i = inertia_groupoid(&s3);
        let t = s3.loops_at(0).find(|&l| s3.loop_order(l) == 2).unwrap();
        let s = i.loops.index_of(t).unwrap();
        assert_eq!(i.groupoid.loops_at(s).count(), 2);
        // unit loop: full isotropy
        assert_eq!(i.groupoid.loops_at(i.loops.index_of(s3.unit(0)).unwrap()).count(), 6);
        let ab = Arc::new(action_groupoid(
            &GroupAction::natural(FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0]]).unwrap()).unwrap(),
        ));
        assert_eq!(centralizer_isotropy_check(&ab), Ok(()));
    }
}
