//! Homomorphisms between finite groupoids and the equivalence notions built
//! on them: natural isomorphisms, weak and strong equivalences, weak fibred
//! products, generalised maps and Morita equivalence.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{input_err, Error, Result};
use crate::fingrp::{find_isomorphism, FiniteGroup};
use crate::gpd::{disjoint_union, orbit_space, orbits_and_isotropy, ArrowId, Groupoid, ObjId};

/// Default object bound for [`is_strong_equivalence`] and
/// [`generalized_maps_equivalent`].
pub const DEFAULT_SEARCH_BOUND: usize = 8;

/// Node budget for the strong-equivalence backtracking.
const STRONG_SEARCH_NODES: usize = 1_000_000;

/// A functor between finite groupoids.
#[derive(Clone, Debug)]
pub struct GroupoidHom {
    pub dom: Arc<Groupoid>,
    pub cod: Arc<Groupoid>,
    pub obj_map: Vec<ObjId>,
    pub arr_map: Vec<ArrowId>,
}

/// First functor-law violation found by [`GroupoidHom::validate`].
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum HomViolation {
    #[error("map sizes do not match the domain: {0}")]
    Shape(String),
    #[error("object {object} is sent outside the codomain")]
    ObjectOutOfRange { object: ObjId },
    #[error("arrow {arrow} is sent outside the codomain")]
    ArrowOutOfRange { arrow: ArrowId },
    #[error("image of arrow {arrow} has the wrong source or target")]
    Endpoints { arrow: ArrowId },
    #[error("unit of object {object} is not sent to a unit")]
    Unit { object: ObjId },
    #[error("inverse of arrow {arrow} is not preserved")]
    Inverse { arrow: ArrowId },
    #[error("composite of ({first}, {second}) is not preserved")]
    Composition { first: ArrowId, second: ArrowId },
}

impl GroupoidHom {
    /// Packs maps into a homomorphism, checking sizes and ranges only.
    pub fn new(dom: Arc<Groupoid>, cod: Arc<Groupoid>, obj_map: Vec<ObjId>, arr_map: Vec<ArrowId>) -> Result<Self> {
        let f = Self { dom, cod, obj_map, arr_map };
        match f.validate() {
            Err(HomViolation::Shape(s)) => Err(input_err!("{s}")),
            Err(e @ (HomViolation::ObjectOutOfRange { .. } | HomViolation::ArrowOutOfRange { .. })) => {
                Err(input_err!("{e}"))
            }
            _ => Ok(f),
        }
    }

    pub fn identity(g: Arc<Groupoid>) -> Self {
        let obj_map = g.objects().collect();
        let arr_map = g.arrows().collect();
        Self { dom: g.clone(), cod: g, obj_map, arr_map }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GroupoidHom) -> Result<GroupoidHom> {
        if !same_groupoid(&self.cod, &next.dom) {
            return Err(input_err!("cannot compose: codomain differs from the next domain"));
        }
        Ok(GroupoidHom {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            obj_map: self.obj_map.iter().map(|&x| next.obj_map[x]).collect(),
            arr_map: self.arr_map.iter().map(|&a| next.arr_map[a]).collect(),
        })
    }

    /// Exhaustive check of the functor laws.
    pub fn validate(&self) -> std::result::Result<(), HomViolation> {
        let (g, h) = (&*self.dom, &*self.cod);
        if self.obj_map.len() != g.num_objects() || self.arr_map.len() != g.num_arrows() {
            return Err(HomViolation::Shape(format!(
                "{} object images for {} objects, {} arrow images for {} arrows",
                self.obj_map.len(),
                g.num_objects(),
                self.arr_map.len(),
                g.num_arrows()
            )));
        }
        if let Some(x) = self.obj_map.iter().position(|&y| y >= h.num_objects()) {
            return Err(HomViolation::ObjectOutOfRange { object: x });
        }
        if let Some(a) = self.arr_map.iter().position(|&b| b >= h.num_arrows()) {
            return Err(HomViolation::ArrowOutOfRange { arrow: a });
        }
        for a in g.arrows() {
            let b = self.arr_map[a];
            if h.src(b) != self.obj_map[g.src(a)] || h.tgt(b) != self.obj_map[g.tgt(a)] {
                return Err(HomViolation::Endpoints { arrow: a });
            }
        }
        for x in g.objects() {
            if self.arr_map[g.unit(x)] != h.unit(self.obj_map[x]) {
                return Err(HomViolation::Unit { object: x });
            }
        }
        for a in g.arrows() {
            if self.arr_map[g.inverse(a)] != h.inverse(self.arr_map[a]) {
                return Err(HomViolation::Inverse { arrow: a });
            }
        }
        for a in g.arrows() {
            for &b in g.out_arrows(g.tgt(a)) {
                if self.arr_map[g.then(a, b)] != h.then(self.arr_map[a], self.arr_map[b]) {
                    return Err(HomViolation::Composition { first: a, second: b });
                }
            }
        }
        Ok(())
    }

    /// Induced map of orbit spaces.
    pub fn orbit_map(&self) -> Vec<usize> {
        let (sd, sc) = (orbit_space(&self.dom), orbit_space(&self.cod));
        let mut m = vec![usize::MAX; sd.count];
        for x in self.dom.objects() {
            m[sd.quotient[x]] = sc.quotient[self.obj_map[x]];
        }
        m
    }
}

/// Pointer equality first, then structural equality.
pub fn same_groupoid(a: &Arc<Groupoid>, b: &Arc<Groupoid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A natural transformation between two homomorphisms with common ends.
#[derive(Clone, Debug)]
pub struct NaturalIso {
    pub from: GroupoidHom,
    pub to: GroupoidHom,
    /// `component[x]: from(x) → to(x)`.
    pub component: Vec<ArrowId>,
}

/// Whether every component is correctly typed and every naturality square
/// commutes.
pub fn natural_iso_check(tau: &NaturalIso) -> Result<bool> {
    let (f, g) = (&tau.from, &tau.to);
    if !same_groupoid(&f.dom, &g.dom) || !same_groupoid(&f.cod, &g.cod) {
        return Err(input_err!("natural transformation between homomorphisms with different ends"));
    }
    let (dom, cod) = (&*f.dom, &*f.cod);
    if tau.component.len() != dom.num_objects() {
        return Err(input_err!("{} components for {} objects", tau.component.len(), dom.num_objects()));
    }
    for x in dom.objects() {
        let c = tau.component[x];
        if c >= cod.num_arrows() || cod.src(c) != f.obj_map[x] || cod.tgt(c) != g.obj_map[x] {
            return Ok(false);
        }
    }
    Ok(dom.arrows().all(|a| {
        cod.then(f.arr_map[a], tau.component[dom.tgt(a)]) == cod.then(tau.component[dom.src(a)], g.arr_map[a])
    }))
}

/// Searches for a natural isomorphism `f ⇒ g`.
///
/// On each orbit of the domain a root component is tried in arrow-id order;
/// naturality then forces the components along a spanning tree, and every
/// square of the orbit is checked. The search is exhaustive.
pub fn find_natural_iso(f: &GroupoidHom, g: &GroupoidHom) -> Result<Option<NaturalIso>> {
    if !same_groupoid(&f.dom, &g.dom) || !same_groupoid(&f.cod, &g.cod) {
        return Err(input_err!("homomorphisms have different ends"));
    }
    let (dom, cod) = (&*f.dom, &*f.cod);
    let od = orbits_and_isotropy(dom);
    let mut component = vec![usize::MAX; dom.num_objects()];
    for orbit in &od.orbits {
        let root = orbit[0];
        let mut tree: Vec<(ObjId, ArrowId)> = Vec::with_capacity(orbit.len());
        let mut seen: HashMap<ObjId, ()> = HashMap::from([(root, ())]);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &a in dom.out_arrows(x) {
                let y = dom.tgt(a);
                if seen.insert(y, ()).is_none() {
                    tree.push((y, a));
                    queue.push_back(y);
                }
            }
        }
        let found = cod.arrows_between(f.obj_map[root], g.obj_map[root]).any(|c| {
            component[root] = c;
            for &(y, a) in &tree {
                let x = dom.src(a);
                component[y] = cod.then(cod.inverse(f.arr_map[a]), cod.then(component[x], g.arr_map[a]));
            }
            orbit.iter().all(|&x| {
                dom.out_arrows(x)
                    .iter()
                    .all(|&a| cod.then(f.arr_map[a], component[dom.tgt(a)]) == cod.then(component[x], g.arr_map[a]))
            })
        });
        if !found {
            return Ok(None);
        }
    }
    Ok(Some(NaturalIso { from: f.clone(), to: g.clone(), component }))
}

/// Outcome of the weak-equivalence test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakEquivalence {
    /// Both conditions hold; `witnesses[y] = (x, α)` with `α: f(x) → y`.
    Verified { witnesses: Vec<(ObjId, ArrowId)> },
    /// No arrow from the image reaches this codomain object.
    NotEssentiallySurjective { object: ObjId },
    /// Arrows `x → x'` do not biject onto `f(x) → f(x')`.
    NotFullyFaithful { pair: (ObjId, ObjId), dom_arrows: usize, cod_arrows: usize },
}

impl WeakEquivalence {
    pub fn is_weak(&self) -> bool {
        matches!(self, Self::Verified { .. })
    }
}

/// Finite test for a weak equivalence: (i) every codomain object is reached
/// by an arrow out of the image, and (ii) the arrow map is a bijection on
/// every hom-set. Failures are reported at the first object or pair in id
/// order.
pub fn is_weak_equivalence(f: &GroupoidHom) -> WeakEquivalence {
    let (g, h) = (&*f.dom, &*f.cod);
    let mut witnesses = vec![(usize::MAX, usize::MAX); h.num_objects()];
    let mut reached = vec![false; h.num_objects()];
    for x in g.objects() {
        for &a in h.out_arrows(f.obj_map[x]) {
            let y = h.tgt(a);
            if !std::mem::replace(&mut reached[y], true) {
                witnesses[y] = (x, a);
            }
        }
    }
    if let Some(y) = reached.iter().position(|&r| !r) {
        return WeakEquivalence::NotEssentiallySurjective { object: y };
    }
    let mut cod_counts: HashMap<ObjId, HashMap<ObjId, usize>> = HashMap::new();
    for x in g.objects() {
        let fx = f.obj_map[x];
        cod_counts.entry(fx).or_insert_with(|| {
            let mut c = HashMap::new();
            for &a in h.out_arrows(fx) {
                *c.entry(h.tgt(a)).or_insert(0) += 1;
            }
            c
        });
    }
    for x in g.objects() {
        let counts = &cod_counts[&f.obj_map[x]];
        let mut by_target: HashMap<ObjId, Vec<ArrowId>> = HashMap::new();
        for &a in g.out_arrows(x) {
            by_target.entry(g.tgt(a)).or_default().push(f.arr_map[a]);
        }
        for x2 in g.objects() {
            let images = by_target.get_mut(&x2).map(std::mem::take).unwrap_or_default();
            let expected = counts.get(&f.obj_map[x2]).copied().unwrap_or(0);
            let n = images.len();
            let mut distinct = images;
            distinct.sort_unstable();
            distinct.dedup();
            if n != expected || distinct.len() != n {
                return WeakEquivalence::NotFullyFaithful { pair: (x, x2), dom_arrows: n, cod_arrows: expected };
            }
        }
    }
    WeakEquivalence::Verified { witnesses }
}

/// A weak inverse found by [`is_strong_equivalence`].
#[derive(Clone, Debug)]
pub struct StrongInverse {
    pub inverse: GroupoidHom,
    /// `η∘f ⇒ id` on the domain.
    pub unit: NaturalIso,
    /// `f∘η ⇒ id` on the codomain.
    pub counit: NaturalIso,
}

/// Searches for `η: cod → dom` with natural isomorphisms `η∘f ≅ id` and
/// `f∘η ≅ id`.
///
/// Backtracks over object images `y ↦ (x, α: f(x) → y)` in id order; arrow
/// images are then forced through preimages under `f`. Returns `Ok(None)`
/// when no inverse exists and a capability error when the codomain has more
/// than `bound` objects or the node budget runs out.
pub fn is_strong_equivalence(f: &GroupoidHom, bound: usize) -> Result<Option<StrongInverse>> {
    let (g, h) = (&*f.dom, &*f.cod);
    if h.num_objects() > bound {
        return Err(Error::Capability(format!(
            "strong-equivalence search bounded at {bound} codomain objects, got {}",
            h.num_objects()
        )));
    }
    let mut preimage: HashMap<ArrowId, Vec<ArrowId>> = HashMap::new();
    for a in g.arrows() {
        preimage.entry(f.arr_map[a]).or_default().push(a);
    }
    let mut search = StrongSearch { f, preimage, choice: Vec::new(), nodes: 0 };
    search.run()
}

struct StrongSearch<'a> {
    f: &'a GroupoidHom,
    preimage: HashMap<ArrowId, Vec<ArrowId>>,
    /// `(x, α)` per assigned codomain object.
    choice: Vec<(ObjId, ArrowId)>,
    nodes: usize,
}

impl StrongSearch<'_> {
    fn run(&mut self) -> Result<Option<StrongInverse>> {
        let (g, h) = (&*self.f.dom, &*self.f.cod);
        let y = self.choice.len();
        if y == h.num_objects() {
            return Ok(self.finish());
        }
        for x in g.objects() {
            let cands: Vec<ArrowId> = h.arrows_between(self.f.obj_map[x], y).collect();
            for alpha in cands {
                self.nodes += 1;
                if self.nodes > STRONG_SEARCH_NODES {
                    return Err(Error::Capability("strong-equivalence search exhausted its node budget".into()));
                }
                self.choice.push((x, alpha));
                if self.consistent() {
                    if let Some(found) = self.run()? {
                        return Ok(Some(found));
                    }
                }
                self.choice.pop();
            }
        }
        Ok(None)
    }

    /// Forced image of `β: y → y'` with both ends assigned.
    fn arrow_image(&self, beta: ArrowId) -> Option<ArrowId> {
        let h = &*self.f.cod;
        let g = &*self.f.dom;
        let (y, y2) = (h.src(beta), h.tgt(beta));
        let (x, ay) = self.choice[y];
        let (x2, ay2) = self.choice[y2];
        let want = h.then(h.then(ay, beta), h.inverse(ay2));
        self.preimage.get(&want)?.iter().copied().find(|&a| g.src(a) == x && g.tgt(a) == x2)
    }

    fn consistent(&self) -> bool {
        let h = &*self.f.cod;
        let y = self.choice.len() - 1;
        (0..=y).all(|z| h.arrows_between(y, z).chain(h.arrows_between(z, y)).all(|b| self.arrow_image(b).is_some()))
    }

    fn finish(&self) -> Option<StrongInverse> {
        let (g, h) = (self.f.dom.clone(), self.f.cod.clone());
        let arr_map: Vec<ArrowId> = h.arrows().map(|b| self.arrow_image(b)).collect::<Option<_>>()?;
        let eta =
            GroupoidHom { dom: h.clone(), cod: g.clone(), obj_map: self.choice.iter().map(|c| c.0).collect(), arr_map };
        if eta.validate().is_err() {
            return None;
        }
        let f_eta = eta.then(self.f).ok()?;
        let counit = NaturalIso {
            from: f_eta,
            to: GroupoidHom::identity(h.clone()),
            component: self.choice.iter().map(|c| c.1).collect(),
        };
        let eta_f = self.f.then(&eta).ok()?;
        // κ_x: ηf(x) → x is the preimage of the counit component at f(x).
        let kappa: Vec<ArrowId> = g
            .objects()
            .map(|x| {
                let want = self.choice[self.f.obj_map[x]].1;
                self.preimage.get(&want)?.iter().copied().find(|&a| g.src(a) == eta_f.obj_map[x] && g.tgt(a) == x)
            })
            .collect::<Option<_>>()?;
        let unit = NaturalIso { from: eta_f, to: GroupoidHom::identity(g), component: kappa };
        (natural_iso_check(&counit).ok()? && natural_iso_check(&unit).ok()?).then_some(StrongInverse {
            inverse: eta,
            unit,
            counit,
        })
    }
}

/// Weak fibred product `K ×_G L` of `φ: K → G` and `ψ: L → G`.
#[derive(Clone, Debug)]
pub struct WeakPullback {
    pub groupoid: Arc<Groupoid>,
    /// Object triples `(k, g, l)` with `g: φ(k) → ψ(l)`.
    pub objects: Vec<(ObjId, ArrowId, ObjId)>,
    pub proj1: GroupoidHom,
    pub proj2: GroupoidHom,
}

/// Objects are triples `(k, g, l)` with `g: φ(k) → ψ(l)`; an arrow is a pair
/// `(κ, λ)` out of `(k, l)`, landing at `(k', ψ(λ)∘g∘φ(κ)⁻¹, l')`.
pub fn weak_pullback(phi: &GroupoidHom, psi: &GroupoidHom) -> Result<WeakPullback> {
    if !same_groupoid(&phi.cod, &psi.cod) {
        return Err(input_err!("weak pullback needs a common codomain"));
    }
    let (k, l, g) = (&*phi.dom, &*psi.dom, &*phi.cod);
    let mut fibre: Vec<Vec<ObjId>> = vec![Vec::new(); g.num_objects()];
    for y in l.objects() {
        fibre[psi.obj_map[y]].push(y);
    }
    let mut objects = Vec::new();
    let mut index: HashMap<(ObjId, ArrowId, ObjId), usize> = HashMap::new();
    for x in k.objects() {
        for &a in g.out_arrows(phi.obj_map[x]) {
            for &y in &fibre[g.tgt(a)] {
                index.insert((x, a, y), objects.len());
                objects.push((x, a, y));
            }
        }
    }
    let mut base = Vec::with_capacity(objects.len());
    let mut parts: Vec<(usize, ArrowId, ArrowId)> = Vec::new();
    for (o, &(x, _, y)) in objects.iter().enumerate() {
        base.push(parts.len());
        for &kappa in k.out_arrows(x) {
            for &lambda in l.out_arrows(y) {
                parts.push((o, kappa, lambda));
            }
        }
    }
    let pos = |o: usize, kappa: ArrowId, lambda: ArrowId| {
        let (x, _, y) = objects[o];
        let pk = k.out_arrows(x).iter().position(|&a| a == kappa).expect("arrow leaves x");
        let pl = l.out_arrows(y).iter().position(|&a| a == lambda).expect("arrow leaves y");
        base[o] + pk * l.out_arrows(y).len() + pl
    };
    let target = |o: usize, kappa: ArrowId, lambda: ArrowId| {
        let (_, a, _) = objects[o];
        let a2 = g.then(g.then(g.inverse(phi.arr_map[kappa]), a), psi.arr_map[lambda]);
        index[&(k.tgt(kappa), a2, l.tgt(lambda))]
    };
    let src = parts.iter().map(|p| p.0).collect();
    let tgt: Vec<usize> = parts.iter().map(|&(o, a, b)| target(o, a, b)).collect();
    let unit = objects.iter().enumerate().map(|(o, &(x, _, y))| pos(o, k.unit(x), l.unit(y))).collect();
    let inverse = parts.iter().zip(&tgt).map(|(&(_, a, b), &t)| pos(t, k.inverse(a), l.inverse(b))).collect();
    let gpd = Groupoid::from_fn(objects.len(), src, tgt, unit, inverse, |p, q| {
        let (o, a, b) = parts[p];
        let (_, a2, b2) = parts[q];
        pos(o, k.then(a, a2), l.then(b, b2))
    });
    let groupoid = Arc::new(gpd);
    let proj1 = GroupoidHom {
        dom: groupoid.clone(),
        cod: phi.dom.clone(),
        obj_map: objects.iter().map(|o| o.0).collect(),
        arr_map: parts.iter().map(|p| p.1).collect(),
    };
    let proj2 = GroupoidHom {
        dom: groupoid.clone(),
        cod: psi.dom.clone(),
        obj_map: objects.iter().map(|o| o.2).collect(),
        arr_map: parts.iter().map(|p| p.2).collect(),
    };
    Ok(WeakPullback { groupoid, objects, proj1, proj2 })
}

impl WeakPullback {
    /// The canonical natural isomorphism `φ∘proj1 ⇒ ψ∘proj2`.
    pub fn square(&self, phi: &GroupoidHom, psi: &GroupoidHom) -> Result<NaturalIso> {
        Ok(NaturalIso {
            from: self.proj1.then(phi)?,
            to: self.proj2.then(psi)?,
            component: self.objects.iter().map(|o| o.1).collect(),
        })
    }
}

/// A span `G ← K → H` whose left leg is a weak equivalence.
#[derive(Clone, Debug)]
pub struct GeneralizedMap {
    pub left: GroupoidHom,
    pub right: GroupoidHom,
}

impl GeneralizedMap {
    /// Checks the common domain and that `left` is a weak equivalence.
    pub fn new(left: GroupoidHom, right: GroupoidHom) -> Result<Self> {
        if !same_groupoid(&left.dom, &right.dom) {
            return Err(input_err!("span legs have different domains"));
        }
        match is_weak_equivalence(&left) {
            WeakEquivalence::Verified { .. } => Ok(Self { left, right }),
            other => Err(input_err!("left leg is not a weak equivalence: {other:?}")),
        }
    }

    /// `G ← G → G` with identity legs.
    pub fn identity(g: Arc<Groupoid>) -> Self {
        let id = GroupoidHom::identity(g);
        Self { left: id.clone(), right: id }
    }

    /// The span `(id, f)` of an ordinary homomorphism.
    pub fn from_hom(f: GroupoidHom) -> Self {
        Self { left: GroupoidHom::identity(f.dom.clone()), right: f }
    }

    pub fn source(&self) -> &Arc<Groupoid> {
        &self.left.cod
    }

    pub fn target(&self) -> &Arc<Groupoid> {
        &self.right.cod
    }
}

/// Composite `G ⇐ P → M` of `G ⇐ K → H` and `H ⇐ L → M` through the weak
/// pullback of the two legs over `H`.
pub fn compose_generalized(m1: &GeneralizedMap, m2: &GeneralizedMap) -> Result<GeneralizedMap> {
    if !same_groupoid(m1.target(), m2.source()) {
        return Err(input_err!("generalised maps do not meet in a common groupoid"));
    }
    let pb = weak_pullback(&m1.right, &m2.left)?;
    let left = pb.proj1.then(&m1.left)?;
    let right = pb.proj2.then(&m2.right)?;
    match is_weak_equivalence(&left) {
        WeakEquivalence::Verified { .. } => Ok(GeneralizedMap { left, right }),
        other => Err(Error::Invariant(format!("composite left leg is not a weak equivalence: {other:?}"))),
    }
}

/// Three-valued answer of [`generalized_maps_equivalent`].
#[derive(Clone, Debug)]
pub enum SpanEquivalence {
    /// A mediating groupoid with both legs and both natural isomorphisms.
    Yes(Box<Mediator>),
    No,
    Unknown,
}

impl SpanEquivalence {
    pub fn is_yes(&self) -> bool {
        matches!(self, Self::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Self::No)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Yes(_) => "yes",
            Self::No => "no",
            Self::Unknown => "unknown",
        }
    }
}

/// Witness of an equivalence of spans.
#[derive(Clone, Debug)]
pub struct Mediator {
    pub groupoid: Arc<Groupoid>,
    pub alpha: GroupoidHom,
    pub beta: GroupoidHom,
    /// `ε∘α ⇒ η∘β` over the source.
    pub source_iso: NaturalIso,
    /// `φ∘α ⇒ ψ∘β` over the target.
    pub target_iso: NaturalIso,
}

/// Decides whether two spans `G ⇐ K → H` and `G ⇐ L → H` are equivalent.
///
/// The mediator is the weak pullback of the two left legs, which is a
/// weak equivalence over `G` and receives a natural isomorphism from any
/// other mediator's legs; the question then reduces to an exhaustive search
/// for a natural isomorphism over `H`. The answer is `Unknown` when that
/// mediator has more than `bound` objects.
pub fn generalized_maps_equivalent(m1: &GeneralizedMap, m2: &GeneralizedMap, bound: usize) -> Result<SpanEquivalence> {
    if !same_groupoid(m1.source(), m2.source()) || !same_groupoid(m1.target(), m2.target()) {
        return Ok(SpanEquivalence::No);
    }
    let pb = weak_pullback(&m1.left, &m2.left)?;
    if pb.groupoid.num_objects() > bound {
        return Ok(SpanEquivalence::Unknown);
    }
    let source_iso = pb.square(&m1.left, &m2.left)?;
    if !natural_iso_check(&source_iso)? || !is_weak_equivalence(&source_iso.from).is_weak() {
        return Err(Error::Invariant("weak pullback square failed its own checks".into()));
    }
    let fa = pb.proj1.then(&m1.right)?;
    let gb = pb.proj2.then(&m2.right)?;
    Ok(match find_natural_iso(&fa, &gb)? {
        Some(target_iso) => SpanEquivalence::Yes(Box::new(Mediator {
            groupoid: pb.groupoid.clone(),
            alpha: pb.proj1,
            beta: pb.proj2,
            source_iso,
            target_iso,
        })),
        None => SpanEquivalence::No,
    })
}

/// One isomorphism class of isotropy groups with its multiplicity.
#[derive(Clone, Debug)]
pub struct SignatureEntry {
    pub label: String,
    pub order: usize,
    pub multiplicity: usize,
    pub representative: FiniteGroup,
}

/// Multiset of isotropy isomorphism classes, one per orbit.
#[derive(Clone, Debug)]
pub struct MoritaSignature {
    /// Sorted by order, then label.
    pub entries: Vec<SignatureEntry>,
}

impl MoritaSignature {
    pub fn num_orbits(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Labels repeated by multiplicity.
    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.label.clone(), e.multiplicity)).collect()
    }

    /// Multiset equality up to group isomorphism.
    pub fn same_as(&self, other: &MoritaSignature) -> Result<bool> {
        if self.entries.len() != other.entries.len() {
            return Ok(false);
        }
        let mut used = vec![false; other.entries.len()];
        for e in &self.entries {
            let mut matched = false;
            for (i, o) in other.entries.iter().enumerate() {
                if !used[i]
                    && o.order == e.order
                    && o.multiplicity == e.multiplicity
                    && find_isomorphism(&e.representative, &o.representative)?.is_some()
                {
                    used[i] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Readable name of a small group: `trivial`, `Zn`, `S3`, `S4`, else
/// `G<order>` followed by its element-order profile.
pub fn group_label(g: &FiniteGroup) -> String {
    let n = g.order();
    if n == 1 {
        return "trivial".into();
    }
    if g.elements().any(|x| g.element_order(x) == n) {
        return format!("Z{n}");
    }
    for k in [3, 4] {
        if n == (1..=k).product::<usize>() {
            if let Ok(sk) = FiniteGroup::symmetric(k) {
                if matches!(find_isomorphism(g, &sk), Ok(Some(_))) {
                    return format!("S{k}");
                }
            }
        }
    }
    let profile: Vec<String> = g.order_profile().iter().map(|(o, c)| format!("{o}^{c}")).collect();
    format!("G{n}[{}]", profile.join(","))
}

pub fn morita_signature(g: &Groupoid) -> Result<MoritaSignature> {
    let od = orbits_and_isotropy(g);
    let mut entries: Vec<SignatureEntry> = Vec::new();
    for iso in od.isotropy {
        let mut placed = false;
        for e in entries.iter_mut() {
            if e.order == iso.order() && find_isomorphism(&iso.group, &e.representative)?.is_some() {
                e.multiplicity += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            entries.push(SignatureEntry {
                label: group_label(&iso.group),
                order: iso.order(),
                multiplicity: 1,
                representative: iso.group,
            });
        }
    }
    entries.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.label.cmp(&b.label)));
    Ok(MoritaSignature { entries })
}

/// Explicit Morita span `G ← K → H` through the skeleton `K` of `G`.
#[derive(Clone, Debug)]
pub struct MoritaSpan {
    pub skeleton: Arc<Groupoid>,
    pub left: GroupoidHom,
    pub right: GroupoidHom,
}

/// Verdict of [`are_morita_equivalent`].
#[derive(Clone, Debug)]
pub struct MoritaVerdict {
    pub equivalent: bool,
    pub left_signature: MoritaSignature,
    pub right_signature: MoritaSignature,
    pub span: Option<MoritaSpan>,
}

/// Compares signatures; when they agree, builds the span through the
/// skeleton of `g` and checks both legs are weak equivalences.
pub fn are_morita_equivalent(g: &Arc<Groupoid>, h: &Arc<Groupoid>) -> Result<MoritaVerdict> {
    let left_signature = morita_signature(g)?;
    let right_signature = morita_signature(h)?;
    let mut verdict = MoritaVerdict { equivalent: false, left_signature, right_signature, span: None };
    if !verdict.left_signature.same_as(&verdict.right_signature)? {
        return Ok(verdict);
    }
    let (og, oh) = (orbits_and_isotropy(g), orbits_and_isotropy(h));
    let mut used = vec![false; oh.orbits.len()];
    let mut matching = Vec::with_capacity(og.orbits.len());
    for iso in &og.isotropy {
        let mut found = None;
        for (j, other) in oh.isotropy.iter().enumerate() {
            if used[j] || other.order() != iso.order() {
                continue;
            }
            if let Some(map) = find_isomorphism(&iso.group, &other.group)? {
                found = Some((j, map));
                break;
            }
        }
        let (j, map) = found.ok_or_else(|| Error::Invariant("equal signatures but no orbit matching".into()))?;
        used[j] = true;
        matching.push((j, map));
    }
    let pieces: Vec<Groupoid> = og.isotropy.iter().map(|i| Groupoid::point_quotient(&i.group)).collect();
    let skeleton = Arc::new(disjoint_union(&pieces.iter().collect::<Vec<_>>()));
    let mut left = GroupoidHom {
        dom: skeleton.clone(),
        cod: g.clone(),
        obj_map: og.isotropy.iter().map(|i| i.base).collect(),
        arr_map: Vec::with_capacity(skeleton.num_arrows()),
    };
    let mut right = GroupoidHom {
        dom: skeleton.clone(),
        cod: h.clone(),
        obj_map: matching.iter().map(|(j, _)| oh.isotropy[*j].base).collect(),
        arr_map: Vec::with_capacity(skeleton.num_arrows()),
    };
    for (i, iso) in og.isotropy.iter().enumerate() {
        let (j, map) = &matching[i];
        for e in iso.group.elements() {
            left.arr_map.push(iso.arrows[e]);
            right.arr_map.push(oh.isotropy[*j].arrows[map[e]]);
        }
    }
    for leg in [&left, &right] {
        if leg.validate().is_err() || !is_weak_equivalence(leg).is_weak() {
            return Err(Error::Invariant("skeleton leg is not a weak equivalence".into()));
        }
    }
    verdict.equivalent = true;
    verdict.span = Some(MoritaSpan { skeleton, left, right });
    Ok(verdict)
}
