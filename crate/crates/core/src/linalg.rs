//! Small dense complex matrices shared by the oracle and the optical side.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix expected to be unitary.
///
/// Construction does not enforce unitarity; use [`Unitary::unitarity_error`]
/// or [`Unitary::checked`] where the invariant matters.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary(DMatrix<Complex64>);

impl Unitary {
    pub fn zeros(dim: usize) -> Self {
        Unitary(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Unitary(DMatrix::identity(dim, dim))
    }

    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Unitary(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Unitary(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(d),
        ))
    }

    /// Wrap `m`, rejecting it if `U·U†` deviates from identity by more than `tol`.
    pub fn checked(m: DMatrix<Complex64>, tol: f64) -> crate::Result<Self> {
        if !m.is_square() {
            return Err(crate::Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let u = Unitary(m);
        let err = u.unitarity_error();
        if err > tol {
            return Err(crate::Error::NotUnitary(err));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.0[(row, col)] = v;
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// `self · rhs`
    pub fn mul(&self, rhs: &Unitary) -> Unitary {
        Unitary(&self.0 * &rhs.0)
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Unitary {
        Unitary(self.0.map(|z| z * s))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|k| self.0[(r, k)] * v[k]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-abs deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = Unitary(&self.0 * self.0.adjoint());
        p.max_abs_diff(&Unitary::identity(self.dim()))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn from_columns(cols: &[Vec<Complex64>]) -> Unitary {
        let n = cols.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Unitary(m)
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `<u|v>`
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn checked_rejects_non_unitary() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            Unitary::checked(m, 1e-10),
            Err(crate::Error::NotUnitary(_))
        ));
        assert!(Unitary::checked(DMatrix::identity(3, 3), 1e-12).is_ok());
    }
}
