//! Matrix representations of finite groups, used to populate bundles one
//! orbit at a time.

use num_complex::Complex;

use crate::error::{input_err, Error, Result};
use crate::fingrp::{ElemId, FiniteGroup};
use crate::gpd::GroupAction;
use crate::linalg::CMatrix;
use crate::scalar::{root_of_unity, Real};

/// A homomorphism from a finite group into `GL(dim, ℂ)`, stored per element.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<T> {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<CMatrix<T>>,
}

impl<T: Real> Representation<T> {
    /// Checks shapes only; see [`Representation::is_homomorphism`].
    pub fn new(group: FiniteGroup, dim: usize, matrices: Vec<CMatrix<T>>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(input_err!("{} matrices for a group of order {}", matrices.len(), group.order()));
        }
        if let Some(g) = matrices.iter().position(|m| m.shape() != (dim, dim)) {
            return Err(input_err!("matrix of element {g} is not {dim}x{dim}"));
        }
        Ok(Self { group, dim, matrices })
    }

    pub fn trivial(group: FiniteGroup, dim: usize) -> Self {
        let matrices = vec![CMatrix::identity(dim); group.order()];
        Self { group, dim, matrices }
    }

    /// Permutation representation of a group action on points.
    pub fn from_action(action: &GroupAction) -> Self {
        let n = action.num_points();
        let matrices = action
            .group()
            .elements()
            .map(|g| CMatrix::permutation(&(0..n).map(|x| action.act(g, x)).collect::<Vec<_>>()))
            .collect();
        Self { group: action.group().clone(), dim: n, matrices }
    }

    /// `ℂ[G/C]` with `G` permuting the left cosets of `subgroup`.
    pub fn on_cosets(group: &FiniteGroup, subgroup: &[ElemId]) -> Result<Self> {
        Ok(Self::from_action(&GroupAction::on_cosets(group.clone(), subgroup)?))
    }

    /// Left regular representation, basis `e_h` with `g·e_h = e_{gh}`.
    pub fn regular(group: &FiniteGroup) -> Self {
        Self::from_action(&GroupAction::regular(group.clone()))
    }

    /// Right multiplication `e_h ↦ e_{hc}` on the regular basis; commutes
    /// with the left regular action.
    pub fn right_multiplication(group: &FiniteGroup, c: ElemId) -> CMatrix<T> {
        CMatrix::permutation(&group.elements().map(|h| group.mul(h, c)).collect::<Vec<_>>())
    }

    /// `Ind_C^G χ` for `C = ⟨c⟩` and `χ(c) = exp(2πik/|C|)`, realised as
    /// the `χ`-eigen-summand of right multiplication by `c` on the regular
    /// representation.
    pub fn induced_from_cyclic(group: &FiniteGroup, c: ElemId, k: usize, tol: T) -> Result<Self> {
        let n = group.element_order(c);
        let op = Self::right_multiplication(group, c);
        Self::regular(group).eigen_summand(&op, n, k, tol)
    }

    /// Restriction to the image of the Fourier projector of an operator of
    /// order dividing `n` that commutes with the representation.
    pub fn eigen_summand(&self, op: &CMatrix<T>, n: usize, k: usize, tol: T) -> Result<Self> {
        for (g, m) in self.matrices.iter().enumerate() {
            if (m * op).max_abs_diff(&(op * m)) > tol {
                return Err(input_err!("operator does not commute with element {g}"));
            }
        }
        let p = fourier_projector(op, n, k);
        let basis = p.column_space_basis(tol);
        let dual = basis.adjoint();
        let matrices = self.matrices.iter().map(|m| &(&dual * m) * &basis).collect();
        Ok(Self { group: self.group.clone(), dim: basis.cols(), matrices })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(input_err!("direct sum of representations of different groups"));
        }
        let matrices = self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.block_diag(b)).collect();
        Ok(Self { group: self.group.clone(), dim: self.dim + other.dim, matrices })
    }

    /// `S ρ(g) S⁻¹`.
    pub fn conjugated(&self, s: &CMatrix<T>, tol: T) -> Result<Self> {
        let inv = s.inverse(tol).ok_or_else(|| Error::Numerical("conjugating matrix is singular".into()))?;
        let matrices = self.matrices.iter().map(|m| &(s * m) * &inv).collect();
        Ok(Self { group: self.group.clone(), dim: self.dim, matrices })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: ElemId) -> &CMatrix<T> {
        &self.matrices[g]
    }

    pub fn character(&self) -> Vec<Complex<T>> {
        self.matrices.iter().map(CMatrix::trace).collect()
    }

    /// `ρ(a)ρ(b) = ρ(ab)` for all pairs, to `tol`.
    pub fn is_homomorphism(&self, tol: T) -> bool {
        let g = &self.group;
        g.elements().all(|a| {
            g.elements()
                .all(|b| (&self.matrices[a] * &self.matrices[b]).max_abs_diff(&self.matrices[g.mul(a, b)]) <= tol)
        })
    }
}

/// `P = (1/n) Σ_{j<n} θ^{-j} M^j` with `θ = exp(2πik/n)`: the projector
/// onto the `θ`-eigenspace of an operator with `M^n = 1`.
pub fn fourier_projector<T: Real>(op: &CMatrix<T>, n: usize, k: usize) -> CMatrix<T> {
    let d = op.rows();
    let mut acc = CMatrix::zeros(d, d);
    let mut power = CMatrix::identity(d);
    for j in 0..n {
        acc = &acc + &power.scale(root_of_unity(n, -((j * k) as i64)));
        power = &power * op;
    }
    acc.scale(Complex::new(T::one() / T::lit(n as f64), T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingrp::cyclic_subgroups;

    #[test]
    fn regular_and_coset_reps_are_homomorphisms() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert!(Representation::<f64>::regular(&s3).is_homomorphism(0.0));
        for c in cyclic_subgroups(&s3) {
            let r = Representation::<f64>::on_cosets(&s3, &c.embedding).unwrap();
            assert_eq!(r.dim(), 6 / c.order());
            assert!(r.is_homomorphism(0.0));
        }
    }

    #[test]
    fn induced_characters_of_z3() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        for k in 0..3 {
            let r = Representation::<f64>::induced_from_cyclic(&z3, 1, k, 1e-9).unwrap();
            assert_eq!(r.dim(), 1);
            assert!(r.is_homomorphism(1e-12));
            let w: Complex<f64> = root_of_unity(3, k as i64);
            assert!((r.matrix(1)[(0, 0)] - w).norm() < 1e-12);
        }
    }

    #[test]
    fn induced_from_order_two_subgroup_of_s3() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let t = s3.elements().find(|&x| s3.element_order(x) == 2).unwrap();
        let sign_ind = Representation::<f64>::induced_from_cyclic(&s3, t, 1, 1e-9).unwrap();
        assert_eq!(sign_ind.dim(), 3);
        assert!(sign_ind.is_homomorphism(1e-12));
        // induced sign character: 3 at e, -1 at transpositions, 0 at 3-cycles
        for g in s3.elements() {
            let want = match s3.element_order(g) {
                1 => 3.0,
                2 => -1.0,
                _ => 0.0,
            };
            assert!((sign_ind.character()[g] - Complex::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_projectors_sum_to_identity() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let op = Representation::<f64>::right_multiplication(&z4, 1);
        let total = (0..4).fold(CMatrix::zeros(4, 4), |acc, k| &acc + &fourier_projector(&op, 4, k));
        assert!(total.is_identity(1e-12));
    }
}
