//! Complex vector bundles over finite groupoids.
//!
//! A bundle assigns a fiber `ℂ^{d(x)}` to each object and a matrix
//! `dims[tgt] × dims[src]` to each arrow, with
//! `action(then(γ, δ)) = action(δ) · action(γ)`.

mod chern;
mod rep;

use std::sync::Arc;

use num_complex::Complex;

pub use chern::{
    canonical_automorphism, ch_deloc, ch_deloc_of_class, ch_deloc_rank_check, eigenbundle_decomposition, k_rank,
    spanning_family, CanonicalAutomorphism, ChDelocValue, EigenComponent, EigenDecomposition, InertiaSectors,
    RankCheck,
};
pub use rep::{fourier_projector, Representation};

use crate::error::{input_err, Error, Result};
use crate::gmor::{same_groupoid, GroupoidHom, NaturalIso};
use crate::gpd::{orbits_and_isotropy, ArrowId, Groupoid, ObjId};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Cutoffs for the numerical checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Entrywise tolerance for group laws and projector identities.
    pub structural: T,
    /// Singular-value cutoff for numerical rank.
    pub rank: T,
    /// Distance within which an eigenvalue counts as a root of unity.
    pub eigen: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self { structural: T::lit(1e-9), rank: T::lit(1e-6), eigen: T::lit(1e-6) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorBundle<T> {
    base: Arc<Groupoid>,
    dims: Vec<usize>,
    action: Vec<CMatrix<T>>,
}

/// First failure found by [`VectorBundle::validate`].
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BundleViolation {
    #[error("unit at object {object} does not act as the identity")]
    Unit { object: ObjId },
    #[error("arrow {arrow} and its inverse do not act by inverse matrices")]
    NotInvertible { arrow: ArrowId },
    #[error("action of {first} then {second} is not the product of their actions")]
    Composition { first: ArrowId, second: ArrowId },
    #[error("loop {arrow} of order {order} does not act with finite order dividing it")]
    LoopOrder { arrow: ArrowId, order: usize },
}

/// A loop acting nontrivially, which makes a bundle bad.
#[derive(Clone, Debug, PartialEq)]
pub struct BadWitness<T> {
    pub arrow: ArrowId,
    pub matrix: CMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Goodness<T> {
    pub good: bool,
    pub witnesses: Vec<BadWitness<T>>,
}

/// A basis of invariant sections; each section is a vector per object.
#[derive(Clone, Debug, PartialEq)]
pub struct Sections<T> {
    pub dimension: usize,
    pub basis: Vec<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> VectorBundle<T> {
    /// Checks shapes; the group laws are checked by [`VectorBundle::validate`].
    pub fn new(base: Arc<Groupoid>, dims: Vec<usize>, action: Vec<CMatrix<T>>) -> Result<Self> {
        if dims.len() != base.num_objects() {
            return Err(input_err!("{} fiber dimensions for {} objects", dims.len(), base.num_objects()));
        }
        if action.len() != base.num_arrows() {
            return Err(input_err!("{} matrices for {} arrows", action.len(), base.num_arrows()));
        }
        for (a, m) in action.iter().enumerate() {
            let want = (dims[base.tgt(a)], dims[base.src(a)]);
            if m.shape() != want {
                return Err(input_err!(
                    "arrow {a} has a {}x{} matrix, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                ));
            }
        }
        Ok(Self { base, dims, action })
    }

    /// Rank `rank` with every arrow acting as the identity.
    pub fn trivial(base: Arc<Groupoid>, rank: usize) -> Self {
        let action = vec![CMatrix::identity(rank); base.num_arrows()];
        let dims = vec![rank; base.num_objects()];
        Self { base, dims, action }
    }

    pub fn zero(base: Arc<Groupoid>) -> Self {
        Self::trivial(base, 0)
    }

    /// Builds a bundle from one representation of the isotropy group per
    /// orbit (`None` for the zero bundle there). The fiber at `y` is
    /// identified with the fiber at the orbit's least object `x₀` through the
    /// least-id arrow `x₀ → y`.
    pub fn from_orbit_representations(base: Arc<Groupoid>, reps: &[Option<Representation<T>>]) -> Result<Self> {
        let od = orbits_and_isotropy(&base);
        if reps.len() != od.orbits.len() {
            return Err(input_err!("{} representations for {} orbits", reps.len(), od.orbits.len()));
        }
        let mut transport = vec![0; base.num_objects()];
        let mut dims = vec![0; base.num_objects()];
        for (o, members) in od.orbits.iter().enumerate() {
            let x0 = members[0];
            let d = match &reps[o] {
                Some(r) if r.group().order() != od.isotropy[o].order() => {
                    return Err(input_err!(
                        "orbit {o}: representation of a group of order {} for isotropy of order {}",
                        r.group().order(),
                        od.isotropy[o].order()
                    ));
                }
                Some(r) => r.dim(),
                None => 0,
            };
            for &y in members {
                transport[y] = if y == x0 { base.unit(x0) } else { base.connecting_arrow(x0, y).expect("same orbit") };
                dims[y] = d;
            }
        }
        let action = base
            .arrows()
            .map(|a| {
                let (y, z) = (base.src(a), base.tgt(a));
                let o = od.orbit_of[y];
                match &reps[o] {
                    None => CMatrix::zeros(0, 0),
                    Some(r) => {
                        let h = base.then(base.then(transport[y], a), base.inverse(transport[z]));
                        let g = od.isotropy[o].element_of(h).expect("loop at the orbit base");
                        r.matrix(g).clone()
                    }
                }
            })
            .collect();
        Ok(Self { base, dims, action })
    }

    /// The bundle carried by one orbit, zero elsewhere.
    pub fn on_orbit(base: Arc<Groupoid>, orbit: usize, rep: Representation<T>) -> Result<Self> {
        let n = orbits_and_isotropy(&base).orbits.len();
        if orbit >= n {
            return Err(input_err!("orbit {orbit} out of range ({n} orbits)"));
        }
        let mut reps = vec![None; n];
        reps[orbit] = Some(rep);
        Self::from_orbit_representations(base, &reps)
    }

    pub fn base(&self) -> &Arc<Groupoid> {
        &self.base
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn fiber_dim(&self, x: ObjId) -> usize {
        self.dims[x]
    }

    pub fn matrix(&self, a: ArrowId) -> &CMatrix<T> {
        &self.action[a]
    }

    pub fn matrices(&self) -> &[CMatrix<T>] {
        &self.action
    }

    /// Unit law, functoriality on every composable pair, invertibility and
    /// finite loop order, all to `tol`.
    pub fn validate(&self, tol: T) -> std::result::Result<(), BundleViolation> {
        let g = &*self.base;
        for x in g.objects() {
            if !self.action[g.unit(x)].is_identity(tol) {
                return Err(BundleViolation::Unit { object: x });
            }
        }
        for a in g.arrows() {
            for &b in g.out_arrows(g.tgt(a)) {
                let lhs = &self.action[g.then(a, b)];
                if lhs.max_abs_diff(&(&self.action[b] * &self.action[a])) > tol {
                    return Err(BundleViolation::Composition { first: a, second: b });
                }
            }
        }
        for a in g.arrows() {
            let inv = &self.action[g.inverse(a)];
            if !(inv * &self.action[a]).is_identity(tol) || !(&self.action[a] * inv).is_identity(tol) {
                return Err(BundleViolation::NotInvertible { arrow: a });
            }
        }
        for a in g.arrows().filter(|&a| g.is_loop(a)) {
            let order = g.loop_order(a);
            if !self.action[a].pow(order).is_identity(tol) {
                return Err(BundleViolation::LoopOrder { arrow: a, order });
            }
        }
        Ok(())
    }

    /// Good iff every loop acts as the identity; the nontrivial loops are
    /// returned as witnesses.
    pub fn is_good(&self, tol: T) -> Goodness<T> {
        let g = &*self.base;
        let witnesses: Vec<_> = g
            .arrows()
            .filter(|&a| g.is_loop(a) && !self.action[a].is_identity(tol))
            .map(|a| BadWitness { arrow: a, matrix: self.action[a].clone() })
            .collect();
        Goodness { good: witnesses.is_empty(), witnesses }
    }

    /// Per orbit: image of the averaging projector over the loops at the
    /// least object, carried to the other objects along connecting arrows.
    pub fn invariant_sections(&self, tol: T) -> Sections<T> {
        let g = &*self.base;
        let od = orbits_and_isotropy(g);
        let mut basis = Vec::new();
        for (o, members) in od.orbits.iter().enumerate() {
            let x0 = members[0];
            let d = self.dims[x0];
            let iso = &od.isotropy[o];
            let weight = Complex::new(T::one() / T::lit(iso.order() as f64), T::zero());
            let avg = iso.arrows.iter().fold(CMatrix::zeros(d, d), |acc, &l| &acc + &self.action[l]).scale(weight);
            let image = avg.column_space_basis(tol);
            for j in 0..image.cols() {
                let v = image.column(j);
                let mut section: Vec<Vec<Complex<T>>> =
                    self.dims.iter().map(|&d| vec![Complex::new(T::zero(), T::zero()); d]).collect();
                for &y in members {
                    section[y] = if y == x0 {
                        v.clone()
                    } else {
                        self.action[g.connecting_arrow(x0, y).expect("same orbit")].apply(&v)
                    };
                }
                basis.push(section);
            }
        }
        Sections { dimension: basis.len(), basis }
    }

    /// Largest defect of `σ(tgt γ) = action(γ) σ(src γ)` over all arrows.
    pub fn section_defect(&self, section: &[Vec<Complex<T>>]) -> T {
        let g = &*self.base;
        g.arrows()
            .map(|a| {
                let moved = self.action[a].apply(&section[g.src(a)]);
                moved.iter().zip(&section[g.tgt(a)]).map(|(p, q)| (p - q).norm()).fold(T::zero(), T::max)
            })
            .fold(T::zero(), T::max)
    }

    /// `(1/|G_x|) Σ trace(action(ℓ))` summed over orbits: the expected
    /// dimension of the invariant sections.
    pub fn averaged_trace(&self) -> T {
        let od = orbits_and_isotropy(&self.base);
        od.isotropy
            .iter()
            .map(|iso| {
                let s =
                    iso.arrows.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &l| acc + self.action[l].trace());
                s.re / T::lit(iso.order() as f64)
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// The isomorphic bundle `S_{tgt γ} · action(γ) · S_{src γ}⁻¹` for
    /// invertible `S_x: E_x → E_x`.
    pub fn gauge_transformed(&self, s: &[CMatrix<T>], tol: T) -> Result<Self> {
        if s.len() != self.dims.len() {
            return Err(input_err!("{} gauge matrices for {} objects", s.len(), self.dims.len()));
        }
        let mut inv = Vec::with_capacity(s.len());
        for (x, m) in s.iter().enumerate() {
            if m.shape() != (self.dims[x], self.dims[x]) {
                return Err(input_err!("gauge matrix at object {x} has the wrong shape"));
            }
            inv.push(m.inverse(tol).ok_or_else(|| numerical(format!("gauge matrix at object {x} is singular")))?);
        }
        let g = &*self.base;
        let action = g.arrows().map(|a| &(&s[g.tgt(a)] * &self.action[a]) * &inv[g.src(a)]).collect();
        Ok(Self { base: self.base.clone(), dims: self.dims.clone(), action })
    }

    pub fn cast<U: Real>(&self) -> VectorBundle<U> {
        VectorBundle {
            base: self.base.clone(),
            dims: self.dims.clone(),
            action: self.action.iter().map(CMatrix::cast).collect(),
        }
    }
}

fn check_same_base<T>(e: &VectorBundle<T>, f: &VectorBundle<T>) -> Result<()> {
    if !same_groupoid(&e.base, &f.base) {
        return Err(input_err!("bundles live over different groupoids"));
    }
    Ok(())
}

pub fn whitney_sum<T: Real>(e: &VectorBundle<T>, f: &VectorBundle<T>) -> Result<VectorBundle<T>> {
    check_same_base(e, f)?;
    Ok(VectorBundle {
        base: e.base.clone(),
        dims: e.dims.iter().zip(&f.dims).map(|(a, b)| a + b).collect(),
        action: e.action.iter().zip(&f.action).map(|(a, b)| a.block_diag(b)).collect(),
    })
}

pub fn tensor<T: Real>(e: &VectorBundle<T>, f: &VectorBundle<T>) -> Result<VectorBundle<T>> {
    check_same_base(e, f)?;
    Ok(VectorBundle {
        base: e.base.clone(),
        dims: e.dims.iter().zip(&f.dims).map(|(a, b)| a * b).collect(),
        action: e.action.iter().zip(&f.action).map(|(a, b)| a.kron(b)).collect(),
    })
}

/// `f*E`: the fiber at `x` is `E_{f(x)}` and `δ` acts by `action(f(δ))`.
pub fn pullback<T: Real>(f: &GroupoidHom, e: &VectorBundle<T>) -> Result<VectorBundle<T>> {
    if !same_groupoid(&f.cod, &e.base) {
        return Err(input_err!("homomorphism codomain is not the bundle base"));
    }
    Ok(VectorBundle {
        base: f.dom.clone(),
        dims: f.obj_map.iter().map(|&y| e.dims[y]).collect(),
        action: f.arr_map.iter().map(|&b| e.action[b].clone()).collect(),
    })
}

/// Bundle isomorphism `f*E → g*E` induced by a natural isomorphism
/// `τ: f ⇒ g`, one matrix per object of the common domain.
pub fn pullback_isomorphism<T: Real>(tau: &NaturalIso, e: &VectorBundle<T>) -> Result<Vec<CMatrix<T>>> {
    if !same_groupoid(&tau.from.cod, &e.base) {
        return Err(input_err!("natural transformation does not land in the bundle base"));
    }
    Ok(tau.component.iter().map(|&c| e.action[c].clone()).collect())
}

/// Largest defect of `φ_{tgt δ} · action_E(δ) = action_F(δ) · φ_{src δ}`,
/// or `None` if some component is not invertible.
pub fn bundle_map_defect<T: Real>(e: &VectorBundle<T>, f: &VectorBundle<T>, phi: &[CMatrix<T>], tol: T) -> Option<T> {
    let g = &*e.base;
    if phi.len() != g.num_objects() || phi.iter().any(|m| m.inverse(tol).is_none()) {
        return None;
    }
    Some(
        g.arrows()
            .map(|a| (&phi[g.tgt(a)] * &e.action[a]).max_abs_diff(&(&f.action[a] * &phi[g.src(a)])))
            .fold(T::zero(), T::max),
    )
}

/// Formal difference `[positive] − [negative]` in K⁰.
#[derive(Clone, Debug, PartialEq)]
pub struct KClass<T> {
    pub positive: VectorBundle<T>,
    pub negative: VectorBundle<T>,
}

impl<T: Real> KClass<T> {
    pub fn new(positive: VectorBundle<T>, negative: VectorBundle<T>) -> Result<Self> {
        check_same_base(&positive, &negative)?;
        Ok(Self { positive, negative })
    }

    pub fn of(e: VectorBundle<T>) -> Self {
        let negative = VectorBundle::zero(e.base.clone());
        Self { positive: e, negative }
    }
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
