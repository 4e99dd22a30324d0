use num_complex::Complex;

use super::DIM;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::scalar::Scalar;

pub(crate) fn check_label(name: &str, v: usize) -> Result<()> {
    if (1..=DIM).contains(&v) {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "{name} = {v} is outside the basis labels 1..={DIM}"
        )))
    }
}

pub(crate) fn re<T: Scalar>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

/// `|m><n|` for 1-based basis labels.
pub fn jump_operator<T: Scalar>(m: usize, n: usize) -> Result<ComplexMatrix<T>> {
    check_label("m", m)?;
    check_label("n", n)?;
    let mut out = Matrix::zeros(DIM, DIM);
    out[(m - 1, n - 1)] = re(T::one());
    Ok(out)
}

/// Hamiltonian of the driver model: ones wherever the choice transition
/// matrix can be nonzero, i.e. four 2x2 all-ones blocks on the diagonal.
pub fn hamiltonian<T: Scalar>() -> ComplexMatrix<T> {
    Matrix::from_fn(DIM, DIM, |r, c| {
        if r / 2 == c / 2 {
            re(T::one())
        } else {
            re(T::zero())
        }
    })
}
