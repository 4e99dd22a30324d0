//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound under which the unscaled degree-13 approximant is accurate
/// to double precision.
const THETA_13: f64 = 5.371920351148152;

fn lin<T: Real>(terms: &[(f64, &ComplexMatrix<T>)]) -> ComplexMatrix<T> {
    let (first, rest) = terms.split_first().expect("at least one term");
    let mut acc = first.1.scale(&Complex::new(T::lit(first.0), T::zero()));
    for (w, m) in rest {
        acc = &acc + &m.scale(&Complex::new(T::lit(*w), T::zero()));
    }
    acc
}

/// `exp(a)` for a square complex matrix.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    if !a.is_finite() {
        return Err(Error::Argument(
            "matrix exponential of non-finite matrix".into(),
        ));
    }
    let n = a.rows();
    let id = ComplexMatrix::<T>::identity(n);
    if a.is_zero_matrix() {
        return Ok(id);
    }

    let norm = a.norm_one().to_f64().unwrap_or(f64::INFINITY);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale(&Complex::new(T::lit(0.5f64.powi(squarings)), T::zero()));

    let b = &PADE_13;
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_tail = lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)]);
    let u = &scaled * &(&(&a6 * &u_inner) + &u_tail);
    let v_inner = lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_tail = lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)]);
    let v = &(&a6 * &v_inner) + &v_tail;

    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::NumericalInstability(
            "matrix exponential overflowed".into(),
        ));
    }
    Ok(r)
}
