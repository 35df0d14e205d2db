//! Finite groupoids and the standard ways of building them.
//!
//! Composition is written in diagrammatic order: `compose(γ, δ)` is defined
//! when `tgt(γ) = src(δ)` and runs from `src(γ)` to `tgt(δ)` ("γ, then δ").
//! All arrows are materialised; ids are assigned in construction order so
//! that every constructor is deterministic.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{input_err, Result};
use crate::fingrp::{ElemId, FiniteGroup};

pub type ObjId = usize;
pub type ArrowId = usize;

/// A finite groupoid with dense composition tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    n_objects: usize,
    src: Vec<ObjId>,
    tgt: Vec<ObjId>,
    unit: Vec<ArrowId>,
    inverse: Vec<ArrowId>,
    /// Arrows leaving each object, in id order.
    out: Vec<Vec<ArrowId>>,
    /// Position of each arrow inside `out[src]`.
    out_pos: Vec<usize>,
    /// `comp[γ][out_pos[δ]]` is `compose(γ, δ)` for `δ ∈ out[tgt γ]`.
    comp: Vec<Vec<ArrowId>>,
}

impl Groupoid {
    /// Builds the dense tables from structure maps and a composition rule.
    ///
    /// `compose` is only called on composable pairs. Nothing is checked
    /// here; see [`Groupoid::validate`].
    pub fn from_fn(
        n_objects: usize,
        src: Vec<ObjId>,
        tgt: Vec<ObjId>,
        unit: Vec<ArrowId>,
        inverse: Vec<ArrowId>,
        mut compose: impl FnMut(ArrowId, ArrowId) -> ArrowId,
    ) -> Self {
        let (out, out_pos) = out_lists(n_objects, &src);
        let comp = (0..src.len()).map(|g| out[tgt[g]].iter().map(|&d| compose(g, d)).collect()).collect();
        Self { n_objects, src, tgt, unit, inverse, out, out_pos, comp }
    }

    pub fn empty() -> Self {
        Self::unit_groupoid(0)
    }

    /// Only identity arrows; arrow `i` is the unit at object `i`.
    pub fn unit_groupoid(n: usize) -> Self {
        let ids: Vec<usize> = (0..n).collect();
        Self::from_fn(n, ids.clone(), ids.clone(), ids.clone(), ids, |g, _| g)
    }

    /// Exactly one arrow between every ordered pair; arrow `(i, j)` has id `i·n + j`.
    pub fn pair_groupoid(n: usize) -> Self {
        let src = (0..n * n).map(|a| a / n).collect();
        let tgt = (0..n * n).map(|a| a % n).collect();
        let unit = (0..n).map(|i| i * n + i).collect();
        let inverse = (0..n * n).map(|a| (a % n) * n + a / n).collect();
        Self::from_fn(n, src, tgt, unit, inverse, |g, d| (g / n) * n + d % n)
    }

    /// `G ⋉ pt`: one object whose arrows are the group elements.
    pub fn point_quotient(group: &FiniteGroup) -> Self {
        action_groupoid(&GroupAction::trivial(group.clone(), 1))
    }

    pub fn num_objects(&self) -> usize {
        self.n_objects
    }

    pub fn num_arrows(&self) -> usize {
        self.src.len()
    }

    pub fn objects(&self) -> std::ops::Range<ObjId> {
        0..self.n_objects
    }

    pub fn arrows(&self) -> std::ops::Range<ArrowId> {
        0..self.src.len()
    }

    #[inline]
    pub fn src(&self, a: ArrowId) -> ObjId {
        self.src[a]
    }

    #[inline]
    pub fn tgt(&self, a: ArrowId) -> ObjId {
        self.tgt[a]
    }

    #[inline]
    pub fn unit(&self, x: ObjId) -> ArrowId {
        self.unit[x]
    }

    #[inline]
    pub fn inverse(&self, a: ArrowId) -> ArrowId {
        self.inverse[a]
    }

    /// `γ` then `δ`, if composable.
    pub fn compose(&self, first: ArrowId, second: ArrowId) -> Option<ArrowId> {
        (self.tgt[first] == self.src[second]).then(|| self.comp[first][self.out_pos[second]])
    }

    /// `γ` then `δ`; panics if the pair is not composable.
    #[inline]
    pub fn then(&self, first: ArrowId, second: ArrowId) -> ArrowId {
        assert_eq!(self.tgt[first], self.src[second], "arrows {first} and {second} are not composable");
        self.comp[first][self.out_pos[second]]
    }

    /// Conjugate of the loop `ℓ` at `src(δ)` by `δ`: the loop `δ ℓ δ⁻¹` at `tgt(δ)`.
    pub fn conjugate_loop(&self, delta: ArrowId, ell: ArrowId) -> ArrowId {
        self.then(self.then(self.inverse[delta], ell), delta)
    }

    /// Arrows leaving `x`, in id order.
    pub fn out_arrows(&self, x: ObjId) -> &[ArrowId] {
        &self.out[x]
    }

    pub fn arrows_between(&self, x: ObjId, y: ObjId) -> impl Iterator<Item = ArrowId> + '_ {
        self.out[x].iter().copied().filter(move |&a| self.tgt[a] == y)
    }

    pub fn is_loop(&self, a: ArrowId) -> bool {
        self.src[a] == self.tgt[a]
    }

    pub fn loops_at(&self, x: ObjId) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrows_between(x, x)
    }

    /// Least-id arrow `x → y`.
    pub fn connecting_arrow(&self, x: ObjId, y: ObjId) -> Option<ArrowId> {
        self.arrows_between(x, y).next()
    }

    /// Order of a loop as an element of its isotropy group.
    pub fn loop_order(&self, ell: ArrowId) -> usize {
        let u = self.unit[self.src[ell]];
        let (mut p, mut k) = (ell, 1);
        while p != u {
            p = self.then(p, ell);
            k += 1;
        }
        k
    }

    /// The isotropy group at `x`. Group element `0` is the unit; the rest
    /// follow in arrow-id order. The product `a·b` is "a after b".
    pub fn isotropy(&self, x: ObjId) -> Isotropy {
        let u = self.unit[x];
        let mut arrows = vec![u];
        arrows.extend(self.loops_at(x).filter(|&a| a != u));
        let index: HashMap<ArrowId, usize> = arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let table: Vec<Vec<ElemId>> =
            arrows.iter().map(|&a| arrows.iter().map(|&b| index[&self.then(b, a)]).collect()).collect();
        let group = FiniteGroup::from_table(&table, None).expect("loops at an object form a group");
        Isotropy { base: x, group, arrows }
    }

    /// Exhaustive check of the groupoid axioms.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        validate(&self.to_data())
    }

    pub fn to_data(&self) -> GroupoidData {
        let comp = self
            .arrows()
            .flat_map(|g| self.out[self.tgt[g]].iter().map(move |&d| [g, d, self.comp[g][self.out_pos[d]]]))
            .collect();
        GroupoidData {
            objects: self.n_objects,
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            comp,
            units: self.unit.clone(),
            inv: self.inverse.clone(),
        }
    }

    /// Validates raw tables and converts them to a groupoid.
    pub fn from_data(data: &GroupoidData) -> std::result::Result<Self, Violation> {
        validate(data)?;
        let table: HashMap<(ArrowId, ArrowId), ArrowId> = data.comp.iter().map(|&[g, d, r]| ((g, d), r)).collect();
        Ok(Self::from_fn(
            data.objects,
            data.src.clone(),
            data.tgt.clone(),
            data.units.clone(),
            data.inv.clone(),
            |g, d| table[&(g, d)],
        ))
    }

    /// Always true: finite discrete groupoids are étale.
    pub fn is_etale(&self) -> bool {
        true
    }

    /// Always true: `(s, t)` is a map of finite discrete sets.
    pub fn is_proper(&self) -> bool {
        true
    }

    /// Always true for finite data.
    pub fn is_compact(&self) -> bool {
        true
    }

    pub fn is_connected(&self) -> bool {
        orbit_space(self).count == 1
    }
}

fn out_lists(n_objects: usize, src: &[ObjId]) -> (Vec<Vec<ArrowId>>, Vec<usize>) {
    let mut out = vec![Vec::new(); n_objects];
    let mut pos = vec![0; src.len()];
    for (a, &s) in src.iter().enumerate() {
        pos[a] = out[s].len();
        out[s].push(a);
    }
    (out, pos)
}

/// Isotropy group at an object, with the arrow realising each element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isotropy {
    pub base: ObjId,
    pub group: FiniteGroup,
    pub arrows: Vec<ArrowId>,
}

impl Isotropy {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn element_of(&self, arrow: ArrowId) -> Option<ElemId> {
        self.arrows.iter().position(|&a| a == arrow)
    }
}

/// Raw groupoid tables, as read from a document. May violate the axioms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupoidData {
    pub objects: usize,
    pub src: Vec<ObjId>,
    pub tgt: Vec<ObjId>,
    /// Triples `[γ, δ, compose(γ, δ)]`.
    pub comp: Vec<[ArrowId; 3]>,
    pub units: Vec<ArrowId>,
    pub inv: Vec<ArrowId>,
}

/// First axiom violation found by [`validate`].
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("table sizes disagree: {0}")]
    Shape(String),
    #[error("arrow {arrow} has an endpoint outside the object set")]
    EndpointOutOfRange { arrow: ArrowId },
    #[error("reference to unknown arrow {arrow}")]
    ArrowOutOfRange { arrow: ArrowId },
    #[error("composite given for non-composable pair ({first}, {second})")]
    NotComposable { first: ArrowId, second: ArrowId },
    #[error("composite of ({first}, {second}) given twice")]
    DuplicateComposite { first: ArrowId, second: ArrowId },
    #[error("composite of ({first}, {second}) is missing")]
    MissingComposite { first: ArrowId, second: ArrowId },
    #[error("composite {result} of ({first}, {second}) has wrong endpoints")]
    CompositeEndpoints { first: ArrowId, second: ArrowId, result: ArrowId },
    #[error("associativity fails on ({a}, {b}, {c})")]
    NotAssociative { a: ArrowId, b: ArrowId, c: ArrowId },
    #[error("unit {arrow} of object {object} is not a loop there")]
    UnitEndpoints { object: ObjId, arrow: ArrowId },
    #[error("unit of object {object} does not act as identity on arrow {arrow}")]
    UnitNotIdentity { object: ObjId, arrow: ArrowId },
    #[error("inverse of arrow {arrow} has wrong endpoints")]
    InverseEndpoints { arrow: ArrowId },
    #[error("inverse of arrow {arrow} does not compose to a unit")]
    InverseFails { arrow: ArrowId },
}

/// Exhaustive check of every groupoid axiom on raw tables; reports the
/// first violation in arrow-id order.
pub fn validate(d: &GroupoidData) -> std::result::Result<(), Violation> {
    let n = d.src.len();
    if d.tgt.len() != n || d.inv.len() != n {
        return Err(Violation::Shape(format!("{} sources, {} targets, {} inverses", n, d.tgt.len(), d.inv.len())));
    }
    if d.units.len() != d.objects {
        return Err(Violation::Shape(format!("{} units for {} objects", d.units.len(), d.objects)));
    }
    for a in 0..n {
        if d.src[a] >= d.objects || d.tgt[a] >= d.objects {
            return Err(Violation::EndpointOutOfRange { arrow: a });
        }
    }
    let arrow_ok = |a: ArrowId| {
        if a < n {
            Ok(())
        } else {
            Err(Violation::ArrowOutOfRange { arrow: a })
        }
    };
    let mut table: HashMap<(ArrowId, ArrowId), ArrowId> = HashMap::with_capacity(d.comp.len());
    for &[g, e, r] in &d.comp {
        arrow_ok(g)?;
        arrow_ok(e)?;
        arrow_ok(r)?;
        if d.tgt[g] != d.src[e] {
            return Err(Violation::NotComposable { first: g, second: e });
        }
        if table.insert((g, e), r).is_some() {
            return Err(Violation::DuplicateComposite { first: g, second: e });
        }
        if d.src[r] != d.src[g] || d.tgt[r] != d.tgt[e] {
            return Err(Violation::CompositeEndpoints { first: g, second: e, result: r });
        }
    }
    let (out, _) = out_lists(d.objects, &d.src);
    for g in 0..n {
        for &e in &out[d.tgt[g]] {
            if !table.contains_key(&(g, e)) {
                return Err(Violation::MissingComposite { first: g, second: e });
            }
        }
    }
    for (x, &u) in d.units.iter().enumerate() {
        arrow_ok(u)?;
        if d.src[u] != x || d.tgt[u] != x {
            return Err(Violation::UnitEndpoints { object: x, arrow: u });
        }
    }
    for a in 0..n {
        if table[&(d.units[d.src[a]], a)] != a || table[&(a, d.units[d.tgt[a]])] != a {
            return Err(Violation::UnitNotIdentity { object: d.src[a], arrow: a });
        }
    }
    for a in 0..n {
        let b = d.inv[a];
        arrow_ok(b)?;
        if d.src[b] != d.tgt[a] || d.tgt[b] != d.src[a] {
            return Err(Violation::InverseEndpoints { arrow: a });
        }
        if table[&(a, b)] != d.units[d.src[a]] || table[&(b, a)] != d.units[d.tgt[a]] {
            return Err(Violation::InverseFails { arrow: a });
        }
    }
    for a in 0..n {
        for &b in &out[d.tgt[a]] {
            let ab = table[&(a, b)];
            for &c in &out[d.tgt[b]] {
                if table[&(ab, c)] != table[&(a, table[&(b, c)])] {
                    return Err(Violation::NotAssociative { a, b, c });
                }
            }
        }
    }
    Ok(())
}

/// A left action of a finite group on the points `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    group: FiniteGroup,
    n_points: usize,
    /// `act[g·n + x] = g·x`.
    act: Vec<usize>,
}

impl GroupAction {
    /// Action from a table `act[g][x]`; the action laws are checked.
    pub fn new(group: FiniteGroup, n_points: usize, act: &[Vec<usize>]) -> Result<Self> {
        if act.len() != group.order() {
            return Err(input_err!("action table has {} rows for a group of order {}", act.len(), group.order()));
        }
        let mut flat = Vec::with_capacity(group.order() * n_points);
        for (g, row) in act.iter().enumerate() {
            if row.len() != n_points {
                return Err(input_err!("action row {g} has length {} (expected {n_points})", row.len()));
            }
            if let Some(&bad) = row.iter().find(|&&y| y >= n_points) {
                return Err(input_err!("action row {g} sends a point to {bad}"));
            }
            flat.extend_from_slice(row);
        }
        let a = Self { group, n_points, act: flat };
        for x in 0..n_points {
            if a.act(0, x) != x {
                return Err(input_err!("identity moves point {x}"));
            }
            for g in a.group.elements() {
                for h in a.group.elements() {
                    if a.act(g, a.act(h, x)) != a.act(a.group.mul(g, h), x) {
                        return Err(input_err!("action law fails for ({g}, {h}) at point {x}"));
                    }
                }
            }
        }
        Ok(a)
    }

    /// The defining action of a permutation group on its points.
    pub fn natural(group: FiniteGroup) -> Result<Self> {
        let degree = group.degree().ok_or_else(|| input_err!("natural action needs a permutation group"))?;
        let act: Vec<usize> =
            group.elements().flat_map(|g| group.permutation(g).expect("permutation group").to_vec()).collect();
        Ok(Self { group, n_points: degree, act })
    }

    /// Every element fixes every point.
    pub fn trivial(group: FiniteGroup, n_points: usize) -> Self {
        let act = group.elements().flat_map(|_| 0..n_points).collect();
        Self { group, n_points, act }
    }

    /// Left multiplication on the left cosets `gH`, ordered by least member.
    pub fn on_cosets(group: FiniteGroup, subgroup: &[ElemId]) -> Result<Self> {
        let sub = crate::fingrp::Subgroup::from_elements(&group, subgroup.to_vec())?;
        let mut coset_of = vec![usize::MAX; group.order()];
        let mut n_points = 0;
        for g in group.elements() {
            if coset_of[g] == usize::MAX {
                for &h in &sub.embedding {
                    coset_of[group.mul(g, h)] = n_points;
                }
                n_points += 1;
            }
        }
        let mut leaders = vec![usize::MAX; n_points];
        for g in group.elements().rev() {
            leaders[coset_of[g]] = g;
        }
        let act = group
            .elements()
            .flat_map(|g| leaders.iter().map(|&c| coset_of[group.mul(g, c)]).collect::<Vec<_>>())
            .collect();
        Ok(Self { group, n_points, act })
    }

    /// Left multiplication on the group itself.
    pub fn regular(group: FiniteGroup) -> Self {
        Self::on_cosets(group, &[0]).expect("trivial subgroup")
    }

    /// Disjoint union of actions of the same group; points are concatenated.
    pub fn sum(actions: &[GroupAction]) -> Result<Self> {
        let first = actions.first().ok_or_else(|| input_err!("empty list of actions"))?;
        let group = first.group.clone();
        if actions.iter().any(|a| a.group != group) {
            return Err(input_err!("actions of different groups cannot be summed"));
        }
        let n_points = actions.iter().map(|a| a.n_points).sum();
        let mut act = Vec::with_capacity(group.order() * n_points);
        for g in group.elements() {
            let mut offset = 0;
            for a in actions {
                act.extend((0..a.n_points).map(|x| a.act(g, x) + offset));
                offset += a.n_points;
            }
        }
        Ok(Self { group, n_points, act })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn num_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn act(&self, g: ElemId, x: usize) -> usize {
        self.act[g * self.n_points + x]
    }

    /// `M^g`, sorted.
    pub fn fixed_points(&self, g: ElemId) -> Vec<usize> {
        (0..self.n_points).filter(|&x| self.act(g, x) == x).collect()
    }

    pub fn is_free(&self) -> bool {
        self.group.elements().skip(1).all(|g| self.fixed_points(g).is_empty())
    }

    /// Id of the arrow `(g, x): x → g·x` in [`action_groupoid`].
    pub fn arrow_id(&self, g: ElemId, x: usize) -> ArrowId {
        x * self.group.order() + g
    }

    /// Inverse of [`GroupAction::arrow_id`]: `(g, x)`.
    pub fn arrow_parts(&self, a: ArrowId) -> (ElemId, usize) {
        (a % self.group.order(), a / self.group.order())
    }

    pub fn action_table(&self) -> Vec<Vec<usize>> {
        self.act.chunks(self.n_points.max(1)).take(self.group.order()).map(<[_]>::to_vec).collect()
    }
}

/// `G ⋉ M`: objects are points, arrow `(g, x)` runs `x → g·x` and has id
/// `x·|G| + g`. Composition `(g, x)` then `(h, g·x)` is `(hg, x)`.
pub fn action_groupoid(a: &GroupAction) -> Groupoid {
    let grp = &a.group;
    let n = grp.order();
    let m = a.n_points;
    let src = (0..n * m).map(|id| id / n).collect();
    let tgt = (0..n * m).map(|id| a.act(id % n, id / n)).collect();
    let unit = (0..m).map(|x| x * n).collect();
    let inverse = (0..n * m).map(|id| a.act(id % n, id / n) * n + grp.inv(id % n)).collect();
    Groupoid::from_fn(m, src, tgt, unit, inverse, |g, d| (g / n) * n + grp.mul(d % n, g % n))
}

/// Groupoid of a groupoid action on a set: objects are the elements `s`
/// with anchor `anchor[s]`, arrows are pairs `(γ, s)` with `src γ = anchor[s]`.
///
/// Returns the groupoid and, per arrow, its pair `(γ, s)`. Arrows are
/// enumerated by `s` then by `γ` in `out_arrows(anchor[s])` order.
pub fn translation_groupoid(
    g: &Groupoid,
    anchor: &[ObjId],
    act: impl Fn(ArrowId, usize) -> usize,
) -> (Groupoid, Vec<(ArrowId, usize)>) {
    let n = anchor.len();
    let mut base = Vec::with_capacity(n);
    let mut parts = Vec::new();
    for (s, &x) in anchor.iter().enumerate() {
        base.push(parts.len());
        parts.extend(g.out_arrows(x).iter().map(|&gamma| (gamma, s)));
    }
    let id = |gamma: ArrowId, s: usize| base[s] + g.out_pos[gamma];
    let src: Vec<usize> = parts.iter().map(|&(_, s)| s).collect();
    let tgt: Vec<usize> = parts.iter().map(|&(gamma, s)| act(gamma, s)).collect();
    let unit = (0..n).map(|s| id(g.unit(anchor[s]), s)).collect();
    let inverse = parts.iter().zip(&tgt).map(|(&(gamma, _), &t)| id(g.inverse(gamma), t)).collect();
    let gpd = Groupoid::from_fn(n, src, tgt, unit, inverse, |a, b| {
        let (gamma, s) = parts[a];
        let (delta, _) = parts[b];
        id(g.then(gamma, delta), s)
    });
    (gpd, parts)
}

/// Arrow `(m, γ, m')` of an induced groupoid.
pub type InducedArrow = (usize, ArrowId, usize);

/// Induced groupoid along `f: M → G₀`, with each arrow's triple `(m, γ, m')`.
///
/// Arrows are enumerated by `m`, then `γ ∈ out_arrows(f m)`, then `m'` in
/// the fibre over `tgt γ`.
pub fn induced_groupoid_with_parts(g: &Groupoid, f: &[ObjId]) -> Result<(Groupoid, Vec<InducedArrow>)> {
    if let Some(&bad) = f.iter().find(|&&x| x >= g.num_objects()) {
        return Err(input_err!("map sends a point to unknown object {bad}"));
    }
    let mut fibres: Vec<Vec<usize>> = vec![Vec::new(); g.num_objects()];
    let mut fibre_pos = vec![0; f.len()];
    for (m, &x) in f.iter().enumerate() {
        fibre_pos[m] = fibres[x].len();
        fibres[x].push(m);
    }
    // prefix[γ] = number of induced arrows from (m, ·) that precede γ's block.
    let mut prefix = vec![0; g.num_arrows()];
    let mut block = vec![0; g.num_objects()];
    for x in g.objects() {
        let mut acc = 0;
        for &gamma in g.out_arrows(x) {
            prefix[gamma] = acc;
            acc += fibres[g.tgt(gamma)].len();
        }
        block[x] = acc;
    }
    let mut base = Vec::with_capacity(f.len());
    let mut parts = Vec::new();
    for (m, &x) in f.iter().enumerate() {
        base.push(parts.len());
        for &gamma in g.out_arrows(x) {
            parts.extend(fibres[g.tgt(gamma)].iter().map(|&m2| (m, gamma, m2)));
        }
        debug_assert_eq!(parts.len() - base[m], block[x]);
    }
    let id = |m: usize, gamma: ArrowId, m2: usize| base[m] + prefix[gamma] + fibre_pos[m2];
    let src = parts.iter().map(|p| p.0).collect();
    let tgt = parts.iter().map(|p| p.2).collect();
    let unit = (0..f.len()).map(|m| id(m, g.unit(f[m]), m)).collect();
    let inverse = parts.iter().map(|&(m, gamma, m2)| id(m2, g.inverse(gamma), m)).collect();
    let gpd = Groupoid::from_fn(f.len(), src, tgt, unit, inverse, |a, b| {
        let (m, gamma, _) = parts[a];
        let (_, delta, m3) = parts[b];
        id(m, g.then(gamma, delta), m3)
    });
    Ok((gpd, parts))
}

/// Induced groupoid `f*G` along `f: M → G₀`.
pub fn induced_groupoid(g: &Groupoid, f: &[ObjId]) -> Result<Groupoid> {
    Ok(induced_groupoid_with_parts(g, f)?.0)
}

/// Full subgroupoid on `subset` (objects renumbered in the given order).
pub fn restriction(g: &Groupoid, subset: &[ObjId]) -> Result<Groupoid> {
    let mut seen = vec![false; g.num_objects()];
    for &x in subset {
        if x >= g.num_objects() {
            return Err(input_err!("object {x} is not in the groupoid"));
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(input_err!("object {x} listed twice"));
        }
    }
    induced_groupoid(g, subset)
}

/// Localisation over a cover: objects are pairs `(j, x)` with `x ∈ U_j`,
/// listed piece by piece. Returns the groupoid, the object pairs, and the
/// projection data `(obj_map, arr_map)` back to `g`.
pub fn localisation_parts(g: &Groupoid, cover: &[Vec<ObjId>]) -> Result<Localised> {
    let mut covered = vec![false; g.num_objects()];
    let mut pairs = Vec::new();
    for (j, piece) in cover.iter().enumerate() {
        for &x in piece {
            if x >= g.num_objects() {
                return Err(input_err!("cover piece {j} contains unknown object {x}"));
            }
            covered[x] = true;
            pairs.push((j, x));
        }
    }
    if let Some(x) = covered.iter().position(|&c| !c) {
        return Err(input_err!("cover misses object {x}"));
    }
    let f: Vec<ObjId> = pairs.iter().map(|p| p.1).collect();
    let (groupoid, parts) = induced_groupoid_with_parts(g, &f)?;
    let arr_map = parts.iter().map(|p| p.1).collect();
    Ok(Localised { groupoid, pairs, obj_map: f, arr_map })
}

/// Output of [`localisation_parts`].
#[derive(Clone, Debug)]
pub struct Localised {
    pub groupoid: Groupoid,
    pub pairs: Vec<(usize, ObjId)>,
    pub obj_map: Vec<ObjId>,
    pub arr_map: Vec<ArrowId>,
}

/// Coproduct; objects and arrows of the `k`-th summand are shifted by the
/// totals of the earlier summands.
pub fn disjoint_union(gs: &[&Groupoid]) -> Groupoid {
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut unit = Vec::new();
    let mut inverse = Vec::new();
    let mut offsets = Vec::with_capacity(gs.len());
    let (mut ob, mut ar) = (0, 0);
    for g in gs {
        offsets.push((ob, ar));
        src.extend(g.src.iter().map(|x| x + ob));
        tgt.extend(g.tgt.iter().map(|x| x + ob));
        unit.extend(g.unit.iter().map(|a| a + ar));
        inverse.extend(g.inverse.iter().map(|a| a + ar));
        ob += g.num_objects();
        ar += g.num_arrows();
    }
    let owner: Vec<usize> = gs.iter().enumerate().flat_map(|(k, g)| std::iter::repeat_n(k, g.num_arrows())).collect();
    Groupoid::from_fn(ob, src, tgt, unit, inverse, |a, b| {
        let k = owner[a];
        let off = offsets[k].1;
        gs[k].then(a - off, b - off) + off
    })
}

/// Orbits, with the isotropy group at the least object of each orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    /// Orbits ordered by least member; members sorted.
    pub orbits: Vec<Vec<ObjId>>,
    pub orbit_of: Vec<usize>,
    pub isotropy: Vec<Isotropy>,
}

impl OrbitData {
    pub fn isotropy_orders(&self) -> Vec<usize> {
        self.isotropy.iter().map(Isotropy::order).collect()
    }
}

pub fn orbits_and_isotropy(g: &Groupoid) -> OrbitData {
    let space = orbit_space(g);
    let mut orbits = vec![Vec::new(); space.count];
    for x in g.objects() {
        orbits[space.quotient[x]].push(x);
    }
    let isotropy = orbits.iter().map(|o| g.isotropy(o[0])).collect();
    OrbitData { orbits, orbit_of: space.quotient, isotropy }
}

/// The orbit space `|G|` as an indexed set with its quotient map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSpace {
    pub count: usize,
    /// Orbit id of each object; ids are ordered by least member.
    pub quotient: Vec<usize>,
}

pub fn orbit_space(g: &Groupoid) -> OrbitSpace {
    let mut quotient = vec![usize::MAX; g.num_objects()];
    let mut count = 0;
    for x in g.objects() {
        if quotient[x] != usize::MAX {
            continue;
        }
        quotient[x] = count;
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for &a in g.out_arrows(y) {
                let z = g.tgt(a);
                if quotient[z] == usize::MAX {
                    quotient[z] = count;
                    queue.push_back(z);
                }
            }
        }
        count += 1;
    }
    OrbitSpace { count, quotient }
}

impl fmt::Display for Groupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "groupoid({} objects, {} arrows)", self.n_objects, self.num_arrows())
    }
}
