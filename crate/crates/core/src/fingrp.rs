//! Finite groups stored as dense multiplication tables.
//!
//! Elements are the ids `0..n` and the identity is always `0`. Groups built
//! from permutations keep the permutation of every element so that they can
//! act on points directly.

use std::collections::{HashMap, VecDeque};

use crate::error::{input_err, Error, Result};

/// Index of a group element.
pub type ElemId = usize;

/// Largest order accepted by [`find_isomorphism`].
pub const ISO_ORDER_BOUND: usize = 64;

/// A finite group given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<ElemId>,
    inv: Vec<ElemId>,
    names: Option<Vec<String>>,
    perms: Option<Vec<Vec<usize>>>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table `mul[a][b] = a·b`.
    ///
    /// The table is checked exhaustively: element `0` must be a two-sided
    /// identity, every row and column must be a permutation, and the law
    /// must be associative.
    pub fn from_table(mul: &[Vec<ElemId>], names: Option<Vec<String>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(input_err!("multiplication table is empty"));
        }
        if let Some(names) = &names {
            if names.len() != n {
                return Err(input_err!("{} names given for a group of order {n}", names.len()));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in mul.iter().enumerate() {
            if row.len() != n {
                return Err(input_err!("row {a} has length {} (expected {n})", row.len()));
            }
            let mut seen = vec![false; n];
            for &c in row {
                if c >= n {
                    return Err(input_err!("entry {c} in row {a} is out of range"));
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(input_err!("row {a} repeats element {c}"));
                }
            }
            flat.extend_from_slice(row);
        }
        for b in 0..n {
            let mut seen = vec![false; n];
            for a in 0..n {
                if std::mem::replace(&mut seen[flat[a * n + b]], true) {
                    return Err(input_err!("column {b} repeats element {}", flat[a * n + b]));
                }
            }
        }
        for a in 0..n {
            if flat[a] != a || flat[a * n] != a {
                return Err(input_err!("element 0 is not a two-sided identity (fails at {a})"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = flat[a * n + b];
                for c in 0..n {
                    if flat[ab * n + c] != flat[a * n + flat[b * n + c]] {
                        return Err(input_err!("associativity fails on ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(Self::from_flat_unchecked(n, flat, names, None))
    }

    fn from_flat_unchecked(
        n: usize,
        mul: Vec<ElemId>,
        names: Option<Vec<String>>,
        perms: Option<Vec<Vec<usize>>>,
    ) -> Self {
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mul[a * n + b] == 0).expect("latin square has an inverse");
        }
        Self { order: n, mul, inv, names, perms }
    }

    /// Closure of a list of permutations of `{0..degree-1}` under composition.
    ///
    /// Products compose right to left: `(p·q)(i) = p(q(i))`. An empty
    /// generator list yields the trivial group.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>]) -> Result<Self> {
        if degree == 0 {
            return Err(input_err!("permutation degree must be positive"));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.len() != degree {
                return Err(input_err!("generator {k} has length {} (degree {degree})", g.len()));
            }
            let mut seen = vec![false; degree];
            for &i in g {
                if i >= degree || std::mem::replace(&mut seen[i], true) {
                    return Err(input_err!("generator {k} is not a bijection on 0..{degree}"));
                }
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut perms = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, ElemId> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0]);
        while let Some(e) = queue.pop_front() {
            for g in generators {
                let p = compose(g, &perms[e]);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), perms.len());
                    queue.push_back(perms.len());
                    perms.push(p);
                }
            }
        }
        let n = perms.len();
        let mut mul = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul.push(index[&compose(&perms[a], &perms[b])]);
            }
        }
        Ok(Self::from_flat_unchecked(n, mul, None, Some(perms)))
    }

    /// The cyclic group `Z_n` with `a·b = (a + b) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(input_err!("cyclic group order must be positive"));
        }
        let mul = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
        Ok(Self::from_flat_unchecked(n, mul, None, None))
    }

    /// The symmetric group on `n` letters, generated by `(0 1)` and `(0 1 … n-1)`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(input_err!("symmetric group degree must be positive"));
        }
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gens.push(swap);
            gens.push((0..n).map(|i| (i + 1) % n).collect());
        }
        Self::from_permutations(n, &gens)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1).expect("order 1 is valid")
    }

    /// Direct product with element `(a, b)` stored at id `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order, other.order);
        let mut mul = Vec::with_capacity(n * m * n * m);
        for x in 0..n * m {
            for y in 0..n * m {
                let a = self.mul(x / m, y / m);
                let b = other.mul(x % m, y % m);
                mul.push(a * m + b);
            }
        }
        Self::from_flat_unchecked(n * m, mul, None, None)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn elements(&self) -> std::ops::Range<ElemId> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inv[a]
    }

    /// `g·x·g⁻¹`.
    pub fn conjugate(&self, g: ElemId, x: ElemId) -> ElemId {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn contains(&self, x: ElemId) -> bool {
        x < self.order
    }

    fn check(&self, x: ElemId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(input_err!("element id {x} out of range for a group of order {}", self.order))
        }
    }

    /// Smallest `k ≥ 1` with `x^k = 1`.
    pub fn element_order(&self, x: ElemId) -> usize {
        let mut k = 1;
        let mut p = x;
        while p != 0 {
            p = self.mul(p, x);
            k += 1;
        }
        k
    }

    /// `x^k` for any integer `k`.
    pub fn pow(&self, x: ElemId, k: i64) -> ElemId {
        let n = self.element_order(x) as i64;
        let mut r = 0;
        for _ in 0..k.rem_euclid(n) {
            r = self.mul(r, x);
        }
        r
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Permutation realising element `x`, for groups built from permutations.
    pub fn permutation(&self, x: ElemId) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[x].as_slice())
    }

    /// Number of points permuted, for groups built from permutations.
    pub fn degree(&self) -> Option<usize> {
        self.perms.as_ref().map(|p| p[0].len())
    }

    /// Multiplication table as nested rows.
    pub fn table(&self) -> Vec<Vec<ElemId>> {
        self.mul.chunks(self.order).map(<[_]>::to_vec).collect()
    }

    /// Elements of the subgroup generated by `gens`, sorted by id.
    pub fn generated(&self, gens: &[ElemId]) -> Vec<ElemId> {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(e) = queue.pop_front() {
            for &g in gens {
                let p = self.mul(e, g);
                if !std::mem::replace(&mut inside[p], true) {
                    queue.push_back(p);
                }
            }
        }
        (0..self.order).filter(|&x| inside[x]).collect()
    }

    /// Sorted histogram of element orders.
    pub fn order_profile(&self) -> Vec<(usize, usize)> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for x in self.elements() {
            *counts.entry(self.element_order(x)).or_default() += 1;
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort_unstable();
        v
    }
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

/// A subgroup with its own table and an embedding into the parent group.
///
/// Sub-element `i` is parent element `embedding[i]`; embeddings are sorted,
/// so the identity stays at id `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub group: FiniteGroup,
    pub embedding: Vec<ElemId>,
}

impl Subgroup {
    /// Subgroup on a set of parent elements closed under the parent law.
    pub fn from_elements(parent: &FiniteGroup, mut elements: Vec<ElemId>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() != Some(&0) {
            return Err(input_err!("subgroup must contain the identity"));
        }
        let mut local = vec![usize::MAX; parent.order()];
        for (i, &e) in elements.iter().enumerate() {
            parent.check(e)?;
            local[e] = i;
        }
        let n = elements.len();
        let mut mul = Vec::with_capacity(n * n);
        for &a in &elements {
            for &b in &elements {
                let c = local[parent.mul(a, b)];
                if c == usize::MAX {
                    return Err(input_err!("element set is not closed under multiplication"));
                }
                mul.push(c);
            }
        }
        let perms = parent.perms.as_ref().map(|p| elements.iter().map(|&e| p[e].clone()).collect());
        let names = parent.names.as_ref().map(|nm| elements.iter().map(|&e| nm[e].clone()).collect());
        let group = FiniteGroup::from_flat_unchecked(n, mul, names, perms);
        Ok(Self { group, embedding: elements })
    }

    pub fn whole(parent: &FiniteGroup) -> Self {
        Self { group: parent.clone(), embedding: parent.elements().collect() }
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Parent id of a subgroup element.
    pub fn to_parent(&self, x: ElemId) -> ElemId {
        self.embedding[x]
    }

    /// Subgroup id of a parent element, if it lies in the subgroup.
    pub fn from_parent(&self, x: ElemId) -> Option<ElemId> {
        self.embedding.binary_search(&x).ok()
    }
}

/// Partition of a group into conjugacy classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyData {
    /// Classes ordered by their least element; members sorted.
    pub classes: Vec<Vec<ElemId>>,
    /// Least element of each class.
    pub representatives: Vec<ElemId>,
    /// Class index of every element.
    pub class_of: Vec<usize>,
}

impl ConjugacyData {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyData {
    let n = g.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for x in g.elements() {
        if class_of[x] != usize::MAX {
            continue;
        }
        let k = classes.len();
        let mut members: Vec<ElemId> = g.elements().map(|h| g.conjugate(h, x)).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class_of[m] = k;
        }
        classes.push(members);
    }
    let representatives = classes.iter().map(|c| c[0]).collect();
    ConjugacyData { classes, representatives, class_of }
}

/// `Z(x) = {h : hx = xh}` with its embedding into `g`.
pub fn centralizer(g: &FiniteGroup, x: ElemId) -> Result<Subgroup> {
    g.check(x)?;
    let elems = g.elements().filter(|&h| g.mul(h, x) == g.mul(x, h)).collect();
    Subgroup::from_elements(g, elems)
}

/// One subgroup `⟨x⟩` per distinct cyclic subgroup, sorted by order and
/// then by element list.
pub fn cyclic_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut sets: Vec<Vec<ElemId>> = g.elements().map(|x| g.generated(&[x])).collect();
    sets.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    sets.into_iter().map(|s| Subgroup::from_elements(g, s).expect("cyclic subgroup is closed")).collect()
}

/// Whether a multiplication-preserving bijection `g → h` exists.
pub fn are_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> Result<bool> {
    Ok(find_isomorphism(g, h)?.is_some())
}

/// Searches for an isomorphism `g → h`, returned as the image of each
/// element of `g`.
///
/// Backtracks over images of a greedy generating set of `g`. Candidate
/// images must match the generator's order, class size and centralizer
/// order; each partial assignment is checked for being an injective
/// homomorphism on the subgroup generated so far.
pub fn find_isomorphism(g: &FiniteGroup, h: &FiniteGroup) -> Result<Option<Vec<ElemId>>> {
    for grp in [g, h] {
        if grp.order() > ISO_ORDER_BOUND {
            return Err(Error::Capability(format!(
                "isomorphism test limited to order {ISO_ORDER_BOUND}, got {}",
                grp.order()
            )));
        }
    }
    if g.order() != h.order() || g.order_profile() != h.order_profile() {
        return Ok(None);
    }
    let (gi, hi) = (ElementInvariants::new(g), ElementInvariants::new(h));
    let gens = greedy_generators(g);
    let mut images = Vec::with_capacity(gens.len());
    let mut search = IsoSearch { g, h, gi: &gi, hi: &hi, gens: &gens };
    Ok(search.extend(&mut images))
}

struct ElementInvariants {
    key: Vec<(usize, usize, usize)>,
}

impl ElementInvariants {
    fn new(g: &FiniteGroup) -> Self {
        let conj = conjugacy_classes(g);
        let key = g
            .elements()
            .map(|x| {
                let class_size = conj.classes[conj.class_of[x]].len();
                (g.element_order(x), class_size, g.order() / class_size)
            })
            .collect();
        Self { key }
    }
}

fn greedy_generators(g: &FiniteGroup) -> Vec<ElemId> {
    let mut by_order: Vec<ElemId> = g.elements().skip(1).collect();
    by_order.sort_by_key(|&x| (std::cmp::Reverse(g.element_order(x)), x));
    let mut gens = Vec::new();
    let mut span = vec![0];
    for x in by_order {
        if span.len() == g.order() {
            break;
        }
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = g.generated(&gens);
        }
    }
    gens
}

struct IsoSearch<'a> {
    g: &'a FiniteGroup,
    h: &'a FiniteGroup,
    gi: &'a ElementInvariants,
    hi: &'a ElementInvariants,
    gens: &'a [ElemId],
}

impl IsoSearch<'_> {
    fn extend(&mut self, images: &mut Vec<ElemId>) -> Option<Vec<ElemId>> {
        let j = images.len();
        if j == self.gens.len() {
            return self.partial_map(images).filter(|m| m.iter().all(|&y| y != usize::MAX));
        }
        let target = self.gi.key[self.gens[j]];
        for cand in self.h.elements() {
            if self.hi.key[cand] != target {
                continue;
            }
            images.push(cand);
            if self.partial_map(images).is_some() {
                if let Some(found) = self.extend(images) {
                    return Some(found);
                }
            }
            images.pop();
        }
        None
    }

    /// Map on `⟨gens[..images.len()]⟩`, or `None` if it is not an injective
    /// homomorphism. Unreached elements hold `usize::MAX`.
    fn partial_map(&self, images: &[ElemId]) -> Option<Vec<ElemId>> {
        let (g, h) = (self.g, self.h);
        let gens = &self.gens[..images.len()];
        let mut map = vec![usize::MAX; g.order()];
        let mut used = vec![false; h.order()];
        map[0] = 0;
        used[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(e) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(images) {
                let p = g.mul(e, s);
                let q = h.mul(map[e], t);
                if map[p] == usize::MAX {
                    if std::mem::replace(&mut used[q], true) {
                        return None;
                    }
                    map[p] = q;
                    queue.push_back(p);
                } else if map[p] != q {
                    return None;
                }
            }
        }
        Some(map)
    }
}
