//! Small dense complex matrices.
//!
//! Sizes here are fibre dimensions of bundles over finite groupoids (a few
//! dozen at most), so everything is a plain row-major `Vec`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Jacobi sweeps before giving up on convergence.
const MAX_SWEEPS: usize = 60;

#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols.max(1), k % cols.max(1))).collect();
        Self { rows, cols, data }
    }

    /// Row-major entries; `data.len()` must be `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn scalar(z: Complex<T>) -> Self {
        Self { rows: 1, cols: 1, data: vec![z] }
    }

    pub fn diagonal(d: &[Complex<T>]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { Complex::zero() })
    }

    /// `e_i ↦ e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m[(j, i)] = Complex::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Complex<T>>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * z).collect() }
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows).map(|i| (0..self.cols).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j])).collect()
    }

    /// `self^k` for `k ≥ 0`.
    pub fn pow(&self, k: usize) -> Self {
        let mut r = Self::identity(self.rows);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (other.rows, other.cols);
        Self::from_fn(self.rows * r, self.cols * c, |i, j| self[(i / r, j / c)] * other[(i % r, j % c)])
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let (r, c) = (self.rows, self.cols);
        Self::from_fn(r + other.rows, c + other.cols, |i, j| match (i < r, j < c) {
            (true, true) => self[(i, j)],
            (false, false) => other[(i - r, j - c)],
            _ => Complex::zero(),
        })
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.shape() != other.shape() {
            return T::infinity();
        }
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(a.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |s, a| s + a.norm_sqr()).sqrt()
    }

    pub fn is_identity(&self, tol: T) -> bool {
        self.is_square() && self.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Gauss-Jordan inverse with partial pivoting; `None` if a pivot falls
    /// below `tol`.
    pub fn inverse(&self, tol: T) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).expect("finite"))?;
            if a[(piv, col)].norm() <= tol {
                return None;
            }
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * p;
                inv[(col, j)] = inv[(col, j)] * p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (aj, ij) = (a[(col, j)], inv[(col, j)]);
                    a[(i, j)] = a[(i, j)] - f * aj;
                    inv[(i, j)] = inv[(i, j)] - f * ij;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Singular values in decreasing order (one-sided Jacobi).
    pub fn singular_values(&self) -> Vec<T> {
        // work on the side with fewer columns
        let mut u = if self.cols <= self.rows { self.clone() } else { self.adjoint() };
        let (m, n) = (u.rows, u.cols);
        let eps = T::epsilon();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), Complex::<T>::zero());
                    for i in 0..m {
                        let (a, b) = (u[(i, p)], u[(i, q)]);
                        alpha = alpha + a.norm_sqr();
                        beta = beta + b.norm_sqr();
                        gamma = gamma + a.conj() * b;
                    }
                    let g = gamma.norm();
                    if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma.unscale(g);
                    let zeta = (beta - alpha) / (T::lit(2.0) * g);
                    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                    let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let a = u[(i, p)];
                        let b = u[(i, q)] * phase.conj();
                        u[(i, p)] = a.scale(c) - b.scale(s);
                        u[(i, q)] = a.scale(s) + b.scale(c);
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<T> = (0..n).map(|j| (0..m).fold(T::zero(), |s, i| s + u[(i, j)].norm_sqr()).sqrt()).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
        sv
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.singular_values().into_iter().filter(|&s| s > tol).count()
    }

    /// Orthonormal basis of the column space, as the columns of the result.
    ///
    /// Modified Gram-Schmidt with one re-orthogonalisation pass; columns whose
    /// residual norm falls below `tol` are dropped.
    pub fn column_space_basis(&self, tol: T) -> Self {
        let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
        for j in 0..self.cols {
            let mut v = self.column(j);
            for _ in 0..2 {
                for b in &basis {
                    let dot = b.iter().zip(&v).fold(Complex::zero(), |s, (x, y)| s + x.conj() * y);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi = *vi - *bi * dot;
                    }
                }
            }
            let norm = v.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt();
            if norm > tol {
                basis.push(v.into_iter().map(|x| x.unscale(norm)).collect());
            }
        }
        Self::from_columns(self.rows, &basis)
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::from(z.re).expect("castable"), U::from(z.im).expect("castable")))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.data[i * self.cols + j])).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn products_and_kron() {
        let a = M::from_vec(2, 2, vec![c(1., 0.), c(2., 0.), c(0., 1.), c(1., 0.)]).unwrap();
        let i2 = M::identity(2);
        assert_eq!(&a * &i2, a);
        let k = a.kron(&i2);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k.trace(), a.trace() * c(2., 0.));
        let b = a.block_diag(&M::scalar(c(5., 0.)));
        assert_eq!(b.trace(), a.trace() + c(5., 0.));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = M::from_vec(
            3,
            3,
            vec![c(2., 1.), c(0., 0.), c(1., 0.), c(0., 0.), c(1., -1.), c(0., 2.), c(1., 0.), c(3., 0.), c(0., 0.)],
        )
        .unwrap();
        let inv = a.inverse(1e-12).unwrap();
        assert!((&a * &inv).is_identity(1e-12));
        let singular = M::from_vec(2, 2, vec![c(1., 0.), c(2., 0.), c(2., 0.), c(4., 0.)]).unwrap();
        assert!(singular.inverse(1e-12).is_none());
    }

    #[test]
    fn singular_values_of_known_matrices() {
        let d = M::diagonal(&[c(3., 0.), c(0., -2.), c(0., 0.)]);
        let sv = d.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-12 && (sv[1] - 2.0).abs() < 1e-12 && sv[2].abs() < 1e-12);
        assert_eq!(d.rank(1e-6), 2);
        // rank-one outer product u v^* with |u| = sqrt(2), |v| = sqrt(5)
        let u = [c(1., 0.), c(0., 1.)];
        let v = [c(1., 0.), c(2., 0.), c(0., 0.)];
        let r1 = M::from_fn(2, 3, |i, j| u[i] * v[j].conj());
        let sv = r1.singular_values();
        assert!((sv[0] - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(r1.rank(1e-6), 1);
        // [[1,1],[2,0]] has determinant -2, singular values multiply to 2
        let m = M::from_vec(2, 2, vec![c(1., 0.), c(1., 0.), c(2., 0.), c(0., 0.)]).unwrap();
        let sv = m.singular_values();
        assert!((sv[0] * sv[1] - 2.0).abs() < 1e-12);
        // repeated columns drive an off-diagonal term to the underflow range
        let rows = [[3., 0., 0.], [1., 1., 1.], [0., 0., 0.], [0., 0., 0.]];
        let m = M::from_fn(4, 3, |i, j| c(rows[i][j], 0.));
        let sv = m.singular_values();
        assert!(sv.iter().all(|s| s.is_finite()));
        assert_eq!(m.rank(1e-6), 2);
        assert!((sv.iter().map(|s| s * s).sum::<f64>() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn column_basis_is_orthonormal() {
        let p = M::from_vec(
            3,
            3,
            vec![c(0.5, 0.), c(0.5, 0.), c(0., 0.), c(0.5, 0.), c(0.5, 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
        )
        .unwrap();
        let b = p.column_space_basis(1e-9);
        assert_eq!(b.cols(), 2);
        assert!((&b.adjoint() * &b).is_identity(1e-12));
    }

    #[test]
    fn permutation_matrix_action() {
        let p = M::permutation(&[1, 2, 0]);
        let e0 = vec![c(1., 0.), c(0., 0.), c(0., 0.)];
        assert_eq!(p.apply(&e0), vec![c(0., 0.), c(1., 0.), c(0., 0.)]);
        assert!(p.pow(3).is_identity(0.0));
        assert_eq!(p.trace(), c(0., 0.));
    }
}
