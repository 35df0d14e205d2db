//! Canonical automorphism over the inertia groupoid, eigenbundles, and the
//! delocalised Chern character.

use std::sync::Arc;

use num_complex::Complex;

use super::{fourier_projector, numerical, KClass, Representation, Tolerances, VectorBundle};
use crate::error::Result;
use crate::fingrp::{conjugacy_classes, cyclic_subgroups, FiniteGroup};
use crate::gmor::same_groupoid;
use crate::gpd::{orbit_space, orbits_and_isotropy, Groupoid, OrbitSpace};
use crate::inertia::{inertia_groupoid, Inertia};
use crate::linalg::CMatrix;
use crate::scalar::{root_of_unity, Real};

/// Inertia groupoid of a base together with its orbits, computed once and
/// shared between bundles over the same base.
#[derive(Clone, Debug)]
pub struct InertiaSectors {
    pub inertia: Inertia,
    pub space: OrbitSpace,
    /// Least loop index in each inertia orbit.
    pub representatives: Vec<usize>,
}

impl InertiaSectors {
    pub fn new(g: &Arc<Groupoid>) -> Self {
        let inertia = inertia_groupoid(g);
        let space = orbit_space(&inertia.groupoid);
        let mut representatives = vec![usize::MAX; space.count];
        for (s, &o) in space.quotient.iter().enumerate() {
            if representatives[o] == usize::MAX {
                representatives[o] = s;
            }
        }
        Self { inertia, space, representatives }
    }

    pub fn count(&self) -> usize {
        self.space.count
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalAutomorphism<T> {
    /// Pullback of the bundle along the basepoint homomorphism.
    pub bundle: VectorBundle<T>,
    /// `Φ(ℓ)` per loop index.
    pub phi: Vec<CMatrix<T>>,
}

/// Pulls `e` back to the inertia groupoid and reads off `Φ(ℓ) = action(ℓ)`.
/// Fails if `Φ` does not commute with the inertia action.
pub fn canonical_automorphism<T: Real>(
    e: &VectorBundle<T>,
    sectors: &InertiaSectors,
    tol: T,
) -> Result<CanonicalAutomorphism<T>> {
    check_sectors(e, sectors)?;
    let inertia = &sectors.inertia;
    let bundle = super::pullback(&inertia.basepoint, e)?;
    let phi: Vec<_> = inertia.loops.loops.iter().map(|&l| e.matrix(l).clone()).collect();
    let ig = &inertia.groupoid;
    for a in ig.arrows() {
        let (s, t) = (ig.src(a), ig.tgt(a));
        let m = bundle.matrix(a);
        if (m * &phi[s]).max_abs_diff(&(&phi[t] * m)) > tol {
            return Err(numerical(format!("canonical automorphism does not commute with inertia arrow {a}")));
        }
    }
    Ok(CanonicalAutomorphism { bundle, phi })
}

fn check_sectors<T: Real>(e: &VectorBundle<T>, sectors: &InertiaSectors) -> Result<()> {
    if !same_groupoid(&sectors.inertia.ambient, e.base()) {
        return Err(crate::error::input_err!("inertia data belongs to a different groupoid"));
    }
    Ok(())
}

/// Eigenprojector for `θ = exp(2πik/n)` at one loop.
#[derive(Clone, Debug)]
pub struct EigenComponent<T> {
    pub k: usize,
    pub order: usize,
    pub theta: Complex<T>,
    pub projector: CMatrix<T>,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    /// Nonzero eigenprojectors per loop index, by increasing `k`.
    pub per_loop: Vec<Vec<EigenComponent<T>>>,
    /// Largest residual among completeness, orthogonality, idempotence and
    /// the eigen-equation.
    pub max_defect: T,
}

impl<T: Real> EigenDecomposition<T> {
    /// `Σ_θ θ · rank(P_θ(ℓ))`.
    pub fn weighted_rank(&self, loop_index: usize) -> Complex<T> {
        self.per_loop[loop_index]
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc + c.theta * T::lit(c.rank as f64))
    }

    /// Eigenvalues of `Φ(ℓ)` with multiplicity.
    pub fn eigenvalues(&self, loop_index: usize) -> Vec<Complex<T>> {
        self.per_loop[loop_index].iter().flat_map(|c| std::iter::repeat_n(c.theta, c.rank)).collect()
    }
}

/// Fourier projectors of `Φ(ℓ)` for every `n`-th root of unity, `n` the
/// order of `ℓ`, with their identities and rank constancy along the
/// inertia orbits verified.
pub fn eigenbundle_decomposition<T: Real>(
    e: &VectorBundle<T>,
    sectors: &InertiaSectors,
    tol: &Tolerances<T>,
) -> Result<EigenDecomposition<T>> {
    let phi = canonical_automorphism(e, sectors, tol.structural)?.phi;
    let inertia = &sectors.inertia;
    let g = &*inertia.ambient;
    let mut per_loop = Vec::with_capacity(phi.len());
    let mut all_ranks = Vec::with_capacity(phi.len());
    let mut max_defect = T::zero();
    for (s, &ell) in inertia.loops.loops.iter().enumerate() {
        let n = g.loop_order(ell);
        let d = phi[s].rows();
        let projectors: Vec<CMatrix<T>> = (0..n).map(|k| fourier_projector(&phi[s], n, k)).collect();
        let total = projectors.iter().fold(CMatrix::zeros(d, d), |acc, p| &acc + p);
        max_defect = max_defect.max(total.max_abs_diff(&CMatrix::identity(d)));
        for (j, p) in projectors.iter().enumerate() {
            max_defect = max_defect.max((p * p).max_abs_diff(p));
            let theta = root_of_unity::<T>(n, j as i64);
            max_defect = max_defect.max((&phi[s] * p).max_abs_diff(&p.scale(theta)));
            for q in &projectors[j + 1..] {
                max_defect = max_defect.max((p * q).max_abs());
            }
        }
        if max_defect > tol.structural {
            return Err(numerical(format!("eigenprojectors at loop {ell} fail their identities by {max_defect}")));
        }
        let ranks: Vec<usize> = projectors.iter().map(|p| p.rank(tol.rank)).collect();
        if ranks.iter().sum::<usize>() != d {
            return Err(numerical(format!("eigenprojector ranks at loop {ell} do not add up to {d}")));
        }
        per_loop.push(
            projectors
                .into_iter()
                .enumerate()
                .filter(|&(k, _)| ranks[k] > 0)
                .map(|(k, projector)| EigenComponent {
                    k,
                    order: n,
                    theta: root_of_unity(n, k as i64),
                    projector,
                    rank: ranks[k],
                })
                .collect(),
        );
        all_ranks.push(ranks);
    }
    let ig = &inertia.groupoid;
    for a in ig.arrows() {
        if all_ranks[ig.src(a)] != all_ranks[ig.tgt(a)] {
            return Err(numerical(format!("eigenbundle ranks jump along inertia arrow {a}")));
        }
    }
    Ok(EigenDecomposition { per_loop, max_defect })
}

/// A function on inertia orbits.
#[derive(Clone, Debug, PartialEq)]
pub struct ChDelocValue<T> {
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ChDelocValue<T> {
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }
}

/// `trace Φ(ℓ)` on each inertia orbit, checked constant along the orbit.
pub fn ch_deloc<T: Real>(e: &VectorBundle<T>, sectors: &InertiaSectors, tol: T) -> Result<ChDelocValue<T>> {
    check_sectors(e, sectors)?;
    let loops = &sectors.inertia.loops.loops;
    let traces: Vec<Complex<T>> = loops.iter().map(|&l| e.matrix(l).trace()).collect();
    let values: Vec<_> = sectors.representatives.iter().map(|&s| traces[s]).collect();
    for (s, &o) in sectors.space.quotient.iter().enumerate() {
        if (traces[s] - values[o]).norm() > tol {
            return Err(numerical(format!("trace is not constant on inertia orbit {o}")));
        }
    }
    Ok(ChDelocValue { values })
}

pub fn ch_deloc_of_class<T: Real>(k: &KClass<T>, sectors: &InertiaSectors, tol: T) -> Result<ChDelocValue<T>> {
    Ok(ch_deloc(&k.positive, sectors, tol)?.sub(&ch_deloc(&k.negative, sectors, tol)?))
}

/// Sum over orbits of the number of conjugacy classes of the isotropy group.
pub fn k_rank(g: &Groupoid) -> usize {
    orbits_and_isotropy(g).isotropy.iter().map(|iso| conjugacy_classes(&iso.group).len()).sum()
}

/// Representations of `h` whose characters span the class functions: the
/// coset permutation representations `ℂ[H/C]` for cyclic `C`, followed, if
/// those fall short, by the eigen-summands of the regular representation
/// under right multiplication by a generator of each nontrivial `C`.
fn spanning_representations<T: Real>(h: &FiniteGroup, tol: T) -> Result<Vec<Representation<T>>> {
    let classes = conjugacy_classes(h);
    let cyclic = cyclic_subgroups(h);
    let mut reps = cyclic.iter().map(|c| Representation::on_cosets(h, &c.embedding)).collect::<Result<Vec<_>>>()?;
    if character_rank(&reps, &classes.representatives, tol) < classes.len() {
        for c in cyclic.iter().filter(|c| c.order() > 1) {
            let gen = c.embedding.iter().copied().find(|&x| h.element_order(x) == c.order()).expect("cyclic");
            for k in 1..c.order() {
                reps.push(Representation::induced_from_cyclic(h, gen, k, tol)?);
            }
        }
    }
    Ok(reps)
}

fn character_rank<T: Real>(reps: &[Representation<T>], at: &[usize], tol: T) -> usize {
    let m = CMatrix::from_fn(reps.len(), at.len(), |i, j| reps[i].matrix(at[j]).trace());
    m.rank(tol)
}

/// Bundles whose delocalised Chern characters span the functions on
/// inertia orbits: per orbit, in orbit order, the representations from
/// [`spanning_representations`] carried along the orbit.
pub fn spanning_family<T: Real>(g: &Arc<Groupoid>, tol: T) -> Result<Vec<VectorBundle<T>>> {
    let od = orbits_and_isotropy(g);
    let mut family = Vec::new();
    for (o, iso) in od.isotropy.iter().enumerate() {
        for rep in spanning_representations(&iso.group, tol)? {
            family.push(VectorBundle::on_orbit(g.clone(), o, rep)?);
        }
    }
    Ok(family)
}

#[derive(Clone, Debug)]
pub struct RankCheck<T> {
    pub rank: usize,
    pub inertia_orbits: usize,
    pub k_rank: usize,
    pub pass: bool,
    /// Rows are family members, columns inertia orbits.
    pub matrix: CMatrix<T>,
}

/// Numerical rank of the Chern-character matrix of [`spanning_family`],
/// compared with the inertia orbit count and [`k_rank`].
pub fn ch_deloc_rank_check<T: Real>(g: &Arc<Groupoid>, tol: &Tolerances<T>) -> Result<RankCheck<T>> {
    let sectors = InertiaSectors::new(g);
    let family = spanning_family(g, tol.rank)?;
    let rows = family.iter().map(|e| ch_deloc(e, &sectors, tol.structural)).collect::<Result<Vec<_>>>()?;
    let matrix = CMatrix::from_fn(rows.len(), sectors.count(), |i, j| rows[i].values[j]);
    let rank = matrix.rank(tol.rank);
    let k = k_rank(g);
    Ok(RankCheck {
        rank,
        inertia_orbits: sectors.count(),
        k_rank: k,
        pass: rank == sectors.count() && rank == k,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpd::{action_groupoid, GroupAction};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn point(g: &FiniteGroup) -> Arc<Groupoid> {
        Arc::new(Groupoid::point_quotient(g))
    }

    fn sign() -> VectorBundle<f64> {
        let b = point(&FiniteGroup::cyclic(2).unwrap());
        VectorBundle::new(b, vec![1], vec![CMatrix::scalar(c(1.0)), CMatrix::scalar(c(-1.0))]).unwrap()
    }

    fn regular_z3() -> VectorBundle<f64> {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        VectorBundle::from_orbit_representations(point(&z3), &[Some(Representation::regular(&z3))]).unwrap()
    }

    #[test]
    fn sign_bundle_invariants() {
        let e = sign();
        let sectors = InertiaSectors::new(e.base());
        let phi = canonical_automorphism(&e, &sectors, 1e-9).unwrap().phi;
        assert_eq!(phi, vec![CMatrix::scalar(c(1.0)), CMatrix::scalar(c(-1.0))]);
        assert_eq!(ch_deloc(&e, &sectors, 1e-9).unwrap().values, vec![c(1.0), c(-1.0)]);
        let dec = eigenbundle_decomposition(&e, &sectors, &Tolerances::default()).unwrap();
        assert_eq!(dec.per_loop[1].len(), 1);
        assert_eq!(dec.per_loop[1][0].theta, c(-1.0));
        assert!(dec.per_loop[1][0].projector.max_abs_diff(&CMatrix::identity(1)) < 1e-12);
        let triv = VectorBundle::trivial(e.base().clone(), 1);
        let k = KClass::new(triv, e.clone()).unwrap();
        assert_eq!(ch_deloc_of_class(&k, &sectors, 1e-9).unwrap().values, vec![c(0.0), c(2.0)]);
        let zero = ch_deloc_of_class(&KClass::new(e.clone(), e).unwrap(), &sectors, 1e-9).unwrap();
        assert!(zero.values.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn regular_z3_bundle() {
        let e = regular_z3();
        let sectors = InertiaSectors::new(e.base());
        let ch = ch_deloc(&e, &sectors, 1e-9).unwrap();
        assert!(ch.max_abs_diff(&ChDelocValue { values: vec![c(3.0), c(0.0), c(0.0)] }) < 1e-12);
        let dec = eigenbundle_decomposition(&e, &sectors, &Tolerances::default()).unwrap();
        let at_g = &dec.per_loop[1];
        assert_eq!(at_g.iter().map(|c| (c.k, c.rank)).collect::<Vec<_>>(), vec![(0, 1), (1, 1), (2, 1)]);
        // each eigenvalue is a root of det(Φ − θ) computed directly
        let phi = e.matrix(1);
        for theta in dec.eigenvalues(1) {
            let m = phi - &CMatrix::scalar(theta).kron(&CMatrix::identity(3));
            assert!(m.singular_values().iter().cloned().fold(f64::MAX, f64::min) < 1e-9);
        }
        assert_eq!(dec.per_loop[0].len(), 1);
        assert_eq!(dec.per_loop[0][0].rank, 3);
    }

    #[test]
    fn trivial_bundle_has_trivial_character() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let e = VectorBundle::<f64>::trivial(point(&s3), 2);
        let sectors = InertiaSectors::new(e.base());
        assert!(canonical_automorphism(&e, &sectors, 1e-9).unwrap().phi.iter().all(|m| m.is_identity(0.0)));
        assert_eq!(ch_deloc(&e, &sectors, 1e-9).unwrap().values, vec![c(2.0); 3]);
        let dec = eigenbundle_decomposition(&e, &sectors, &Tolerances::default()).unwrap();
        assert!(dec.per_loop.iter().all(|p| p.len() == 1 && p[0].k == 0 && p[0].projector.is_identity(1e-12)));
    }

    #[test]
    fn k_rank_examples() {
        assert_eq!(k_rank(&Groupoid::point_quotient(&FiniteGroup::symmetric(3).unwrap())), 3);
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let swap_fix = GroupAction::new(z2.clone(), 3, &[vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        assert_eq!(k_rank(&action_groupoid(&swap_fix)), 3);
        let free = GroupAction::sum(&[GroupAction::regular(z2.clone()), GroupAction::regular(z2)]).unwrap();
        assert_eq!(k_rank(&action_groupoid(&free)), 2);
    }

    #[test]
    fn rank_check_examples() {
        let z2 = point(&FiniteGroup::cyclic(2).unwrap());
        let fam = spanning_family::<f64>(&z2, 1e-6).unwrap();
        assert_eq!(fam.iter().map(|e| e.fiber_dim(0)).collect::<Vec<_>>(), vec![2, 1]);
        let rc = ch_deloc_rank_check::<f64>(&z2, &Tolerances::default()).unwrap();
        assert!(rc.pass);
        assert_eq!(rc.rank, 2);
        assert_eq!(rc.matrix, CMatrix::from_vec(2, 2, vec![c(2.0), c(0.0), c(1.0), c(1.0)]).unwrap());

        let z3 = point(&FiniteGroup::cyclic(3).unwrap());
        let fam = spanning_family::<f64>(&z3, 1e-6).unwrap();
        assert_eq!(fam.iter().map(|e| e.fiber_dim(0)).collect::<Vec<_>>(), vec![3, 1, 1, 1]);
        assert_eq!(ch_deloc_rank_check::<f64>(&z3, &Tolerances::default()).unwrap().rank, 3);

        let s3 = point(&FiniteGroup::symmetric(3).unwrap());
        let rc = ch_deloc_rank_check::<f64>(&s3, &Tolerances::default()).unwrap();
        assert!(rc.pass && rc.rank == 3);

        let trivial = Arc::new(Groupoid::pair_groupoid(3));
        let fam = spanning_family::<f64>(&trivial, 1e-6).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0], VectorBundle::trivial(trivial.clone(), 1));
    }
}
