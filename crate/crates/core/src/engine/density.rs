use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::scalar::Real;

/// Hermitian, unit-trace density matrix.
///
/// `vector_form` stacks columns: entry `M = n(j-1) + i` (1-based) is
/// `ρ(i, j)`. The generator acts on the row-major stacking instead, see
/// [`DensityState::row_stacked`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityState<T> {
    /// Validates Hermiticity, unit trace and real diagonal within `1e-12`.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::tol(1e-12))
    }

    pub fn with_tolerance(matrix: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension {
                expected: "square density matrix".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::Argument(
                "density matrix has non-finite entries".into(),
            ));
        }
        let state = DensityState { matrix };
        let herm = state.hermiticity_defect();
        if herm > tol {
            return Err(Error::Argument(format!(
                "density matrix is not Hermitian (defect {herm})"
            )));
        }
        let trace = state.trace();
        if (trace.re - T::one()).abs() > tol || trace.im.abs() > tol {
            return Err(Error::Argument(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        Ok(state)
    }

    /// `|ψ><ψ|` for an already normalized amplitude vector.
    pub fn from_pure(psi: &[Complex<T>]) -> Result<Self> {
        let n = psi.len();
        Self::new(Matrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj()))
    }

    /// Inverse of [`DensityState::vector_form`].
    pub fn from_vector(v: &[Complex<T>]) -> Result<Self> {
        let n = (v.len() as f64).sqrt().round() as usize;
        if n * n != v.len() {
            return Err(Error::Dimension {
                expected: "square number of entries".into(),
                found: format!("{}", v.len()),
            });
        }
        Self::new(Matrix::from_fn(n, n, |r, c| v[c * n + r]))
    }

    pub(crate) fn from_row_stacked_unchecked(v: &[Complex<T>]) -> Self {
        let n = (v.len() as f64).sqrt().round() as usize;
        DensityState {
            matrix: Matrix::from_fn(n, n, |r, c| v[r * n + c]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix_form(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// Column-stacked vector.
    pub fn vector_form(&self) -> Vec<Complex<T>> {
        let n = self.dim();
        (0..n * n).map(|k| self.matrix[(k % n, k / n)]).collect()
    }

    /// Row-stacked vector, the ordering the vectorized generator acts on.
    /// Equals the column stacking of `ρᵀ = ρ*`.
    pub fn row_stacked(&self) -> Vec<Complex<T>> {
        self.matrix.as_slice().to_vec()
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// `max |ρ(i,j) - conj(ρ(j,i))|`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Real parts of the diagonal (basis-state probabilities).
    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).collect()
    }
}
