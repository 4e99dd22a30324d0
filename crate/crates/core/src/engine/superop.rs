//! Vectorized superoperators.
//!
//! The Kronecker forms used here, `H ⊗ I - I ⊗ Hᵀ` and `L ⊗ L*`, act on the
//! row-major stacking of the density matrix: `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.
//! Index `M` (1-based) therefore addresses `ρ(n, l)` with
//! `n = ⌊(M-1)/8⌋ + 1` and `l = (M-1) mod 8 + 1`.

use num_complex::Complex;
use num_traits::Zero;

use super::operators::{check_label, jump_operator, re};
use super::{hamiltonian, DIM, VEC_DIM};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::scalar::Scalar;

/// Brute-force vectorized commutator `H ⊗ I - I ⊗ Hᵀ`.
pub fn vectorize_hamiltonian<T: Scalar>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if h.rows() != DIM || h.cols() != DIM {
        return Err(Error::Dimension {
            expected: format!("{DIM}x{DIM}"),
            found: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    let id = ComplexMatrix::<T>::identity(DIM);
    Ok(&h.kron(&id) - &id.kron(&h.transpose()))
}

/// `J ⊕ J ⊕ J ⊕ J` with `J = [[X⊕X⊕X⊕X, I₈], [I₈, X⊕X⊕X⊕X]]` and
/// `X = [[0, -1], [-1, 0]]`: the vectorized form of [`hamiltonian`].
pub fn vectorized_hamiltonian_closed_form<T: Scalar>() -> ComplexMatrix<T> {
    let x = Matrix::from_fn(
        2,
        2,
        |r, c| {
            if r == c {
                re(T::zero())
            } else {
                re(-T::one())
            }
        },
    );
    let xs = Matrix::direct_sum(&[x.clone(), x.clone(), x.clone(), x]);
    let mut j = ComplexMatrix::zeros(2 * DIM, 2 * DIM);
    j.set_block(0, 0, &xs);
    j.set_block(DIM, DIM, &xs);
    j.set_block(0, DIM, &ComplexMatrix::identity(DIM));
    j.set_block(DIM, 0, &ComplexMatrix::identity(DIM));
    Matrix::direct_sum(&[j.clone(), j.clone(), j.clone(), j])
}

/// `Φ = ½ (L†L ⊗ I + I ⊗ (L†L)*)` for `L = |m><n|`, by Kronecker assembly.
pub fn build_phi<T: Scalar>(m: usize, n: usize) -> Result<ComplexMatrix<T>> {
    let l = jump_operator::<T>(m, n)?;
    let ldl = l.adjoint().matmul(&l)?;
    let id = ComplexMatrix::<T>::identity(DIM);
    let sum = &ldl.kron(&id) + &id.kron(&ldl.conj());
    Ok(sum.scale(&re(T::half())))
}

/// Diagonal description of `Φ_{m,n}`: ½ on the `8(n-1)+k` and `8(k-1)+n`
/// diagonals for `k ≠ n`, and 1 at `9n-8`. Independent of `m`.
pub fn phi_closed_form<T: Scalar>(n: usize) -> Result<ComplexMatrix<T>> {
    check_label("n", n)?;
    let mut out = ComplexMatrix::zeros(VEC_DIM, VEC_DIM);
    for k in (1..=DIM).filter(|&k| k != n) {
        for idx in [8 * (n - 1) + k, 8 * (k - 1) + n] {
            out[(idx - 1, idx - 1)] = re(T::half());
        }
    }
    out[(9 * n - 9, 9 * n - 9)] = re(T::one());
    Ok(out)
}

/// `Λ_{m,n} = L ⊗ L* - Φ_{m,n}`, by Kronecker assembly.
pub fn build_lambda<T: Scalar>(m: usize, n: usize) -> Result<ComplexMatrix<T>> {
    let l = jump_operator::<T>(m, n)?;
    Ok(&l.kron(&l.conj()) - &build_phi(m, n)?)
}

/// Entry table of `Λ_{m,n}`: -½ on the 14 off-centre diagonals tied to `n`;
/// when `m ≠ n` also -1 at `(9n-8, 9n-8)` and +1 at `(9m-8, 9n-8)`.
pub fn lambda_closed_form<T: Scalar>(m: usize, n: usize) -> Result<ComplexMatrix<T>> {
    check_label("m", m)?;
    check_label("n", n)?;
    let mut out = ComplexMatrix::zeros(VEC_DIM, VEC_DIM);
    for k in (1..=DIM).filter(|&k| k != n) {
        for idx in [8 * (n - 1) + k, 8 * (k - 1) + n] {
            out[(idx - 1, idx - 1)] = re(-T::half());
        }
    }
    if m != n {
        out[(9 * n - 9, 9 * n - 9)] = re(-T::one());
        out[(9 * m - 9, 9 * n - 9)] = re(T::one());
    }
    Ok(out)
}

/// The other member of state `k`'s continue/stop pair (1-based): `k+1` for
/// odd `k`, `k-1` for even `k`.
pub fn partner_state(k: usize) -> usize {
    if k % 2 == 1 {
        k + 1
    } else {
        k - 1
    }
}

/// True when `c` is 8x8 and nonzero only inside the four diagonal 2x2 blocks.
pub fn follows_block_pattern<T: Scalar>(c: &Matrix<T>) -> bool {
    c.rows() == DIM
        && c.cols() == DIM
        && c.indexed()
            .all(|((r, col), v)| r / 2 == col / 2 || v.is_zero())
}

fn check_rates<T>(c: &Matrix<T>) -> Result<()> {
    if c.rows() != DIM || c.cols() != DIM {
        return Err(Error::Dimension {
            expected: format!("{DIM}x{DIM} cognition matrix"),
            found: format!("{}x{}", c.rows(), c.cols()),
        });
    }
    Ok(())
}

/// `Σ_{m,n} C_{m,n} Λ_{m,n}` summed term by term. Valid for any 8x8 `c`.
pub fn vec_l_brute_force<T: Scalar>(c: &Matrix<T>) -> Result<ComplexMatrix<T>> {
    check_rates(c)?;
    let mut out = ComplexMatrix::<T>::zeros(VEC_DIM, VEC_DIM);
    for m in 1..=DIM {
        for n in 1..=DIM {
            let gamma = &c[(m - 1, n - 1)];
            if gamma.is_zero() {
                continue;
            }
            let lambda = build_lambda::<T>(m, n)?;
            for (pos, v) in lambda.indexed() {
                if !v.is_zero() {
                    out[pos] = out[pos].clone() + v.clone() * re(gamma.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Structured `vec L` for a block-pattern cognition matrix.
///
/// With `s(k)` the column sum of `C` at `k` and `w(k) = C_{partner(k),k}`:
/// diagonal entries are `-½(s(n) + s(l))` for `n ≠ l` and `-w(n)` for
/// `n = l`; the only off-diagonal entries are `C_{partner(n),n}` at
/// `(9·partner(n) - 8, 9n - 8)`.
pub fn vec_l_closed_form<T: Scalar>(c: &Matrix<T>) -> Result<ComplexMatrix<T>> {
    check_rates(c)?;
    if !follows_block_pattern(c) {
        return Err(Error::Argument(
            "cognition matrix has entries outside the 2x2 block pattern".into(),
        ));
    }
    let entry = |m: usize, n: usize| c[(m - 1, n - 1)].clone();
    let column_sum = |k: usize| entry(k, k) + entry(partner_state(k), k);
    let leave_rate = |k: usize| entry(partner_state(k), k);

    let mut out = ComplexMatrix::<T>::zeros(VEC_DIM, VEC_DIM);
    for big_m in 1..=VEC_DIM {
        let n = (big_m - 1) / DIM + 1;
        let l = (big_m - 1) % DIM + 1;
        let d = if n == l {
            -leave_rate(n)
        } else {
            -(column_sum(n) + column_sum(l)) * T::half()
        };
        out[(big_m - 1, big_m - 1)] = re(d);
    }
    for n in 1..=DIM {
        let m = partner_state(n);
        out[(9 * m - 9, 9 * n - 9)] = re(entry(m, n));
    }
    Ok(out)
}

/// `vec L` together with a flag telling whether the structured path applied.
#[derive(Clone, Debug, PartialEq)]
pub struct VecL<T> {
    pub matrix: ComplexMatrix<T>,
    /// `c` had entries outside the block pattern; `matrix` came from the
    /// brute-force sum.
    pub off_pattern: bool,
}

/// Structured `vec L` when `c` follows the block pattern, otherwise the
/// brute-force sum with `off_pattern` raised.
pub fn build_vec_l<T: Scalar>(c: &Matrix<T>) -> Result<VecL<T>> {
    if follows_block_pattern(c) {
        Ok(VecL {
            matrix: vec_l_closed_form(c)?,
            off_pattern: false,
        })
    } else {
        Ok(VecL {
            matrix: vec_l_brute_force(c)?,
            off_pattern: true,
        })
    }
}

/// `−i(1−α)` as a complex scalar.
pub(crate) fn coherent_weight<T: Scalar>(alpha: &T) -> Complex<T> {
    Complex::new(T::zero(), -(T::one() - alpha.clone()))
}

/// Vectorized commutator of the model Hamiltonian, brute force.
pub(crate) fn model_vec_h<T: Scalar>() -> ComplexMatrix<T> {
    vectorize_hamiltonian(&hamiltonian::<T>()).expect("8x8 hamiltonian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn block_pattern(rates: [Q; 4]) -> Matrix<Q> {
        let blocks: Vec<Matrix<Q>> = rates
            .iter()
            .map(|a| {
                Matrix::from_fn(2, 2, |r, _| {
                    if r == 0 {
                        a.clone()
                    } else {
                        Q::from_ratio(1, 1) - a.clone()
                    }
                })
            })
            .collect();
        Matrix::direct_sum(&blocks)
    }

    #[test]
    fn vec_h_structure() {
        let brute = vectorize_hamiltonian(&hamiltonian::<Q>()).unwrap();
        assert_eq!(brute, vectorized_hamiltonian_closed_form::<Q>());
        // off-diagonal 8x8 sub-blocks of J are identities
        let j = brute.block(0, 0, 16, 16);
        assert_eq!(j.block(0, 8, 8, 8), ComplexMatrix::identity(8));
        assert_eq!(j.block(8, 0, 8, 8), ComplexMatrix::identity(8));
    }

    #[test]
    fn vec_h_of_zero_and_identity_vanish() {
        assert!(vectorize_hamiltonian(&ComplexMatrix::<Q>::zeros(8, 8))
            .unwrap()
            .is_zero_matrix());
        assert!(vectorize_hamiltonian(&ComplexMatrix::<Q>::identity(8))
            .unwrap()
            .is_zero_matrix());
        assert!(vectorize_hamiltonian(&ComplexMatrix::<Q>::identity(4)).is_err());
    }

    #[test]
    fn phi_entries_for_one_two() {
        let phi = build_phi::<Q>(1, 2).unwrap();
        assert_eq!(phi[(9, 9)], re(q(1, 1)));
        assert_eq!(phi[(8, 8)], re(q(1, 2)));
        assert_eq!(phi[(1, 1)], re(q(1, 2)));
        assert_eq!(phi.count_nonzero(), 15);
        let halves = phi.as_slice().iter().filter(|v| **v == re(q(1, 2))).count();
        assert_eq!(halves, 14);
    }

    #[test]
    fn phi_depends_only_on_source_label() {
        assert_eq!(build_phi::<Q>(1, 2).unwrap(), build_phi::<Q>(5, 2).unwrap());
        for m in 1..=8 {
            for n in 1..=8 {
                assert_eq!(
                    build_phi::<Q>(m, n).unwrap(),
                    phi_closed_form::<Q>(n).unwrap()
                );
            }
        }
    }

    #[test]
    fn lambda_entries() {
        let l12 = build_lambda::<Q>(1, 2).unwrap();
        assert_eq!(l12[(0, 9)], re(q(1, 1)));
        assert_eq!(l12[(9, 9)], re(q(-1, 1)));
        let l22 = build_lambda::<Q>(2, 2).unwrap();
        assert_eq!(l22[(9, 9)], re(q(0, 1)));
        assert_eq!(l22[(8, 8)], re(q(-1, 2)));
        assert_eq!(l22[(1, 1)], re(q(-1, 2)));
        assert_eq!(l22.count_nonzero(), 14);
    }

    #[test]
    fn lambda_closed_form_matches_kronecker_for_all_pairs() {
        for m in 1..=8 {
            for n in 1..=8 {
                assert_eq!(
                    build_lambda::<Q>(m, n).unwrap(),
                    lambda_closed_form::<Q>(m, n).unwrap(),
                    "pair ({m},{n})"
                );
            }
        }
    }

    #[test]
    fn vec_l_off_diagonal_entry_for_uniform_rates() {
        let c = block_pattern([q(1, 2), q(1, 2), q(1, 2), q(1, 2)]);
        let v = build_vec_l(&c).unwrap();
        assert!(!v.off_pattern);
        assert_eq!(v.matrix[(9, 0)], re(q(1, 2)));
    }

    #[test]
    fn vec_l_closed_form_matches_brute_force() {
        let c = block_pattern([q(17, 27), q(17, 27), q(5, 17), q(5, 22)]);
        assert_eq!(
            vec_l_closed_form(&c).unwrap(),
            vec_l_brute_force(&c).unwrap()
        );
        // non-stochastic columns exercise the column-sum terms
        let mut c = c;
        c[(0, 0)] = q(3, 7);
        c[(7, 7)] = q(2, 1);
        assert_eq!(
            vec_l_closed_form(&c).unwrap(),
            vec_l_brute_force(&c).unwrap()
        );
    }

    #[test]
    fn vec_l_of_zero_rates_is_zero() {
        let c = Matrix::<Q>::zeros(8, 8);
        assert!(build_vec_l(&c).unwrap().matrix.is_zero_matrix());
    }

    #[test]
    fn off_pattern_rates_fall_back_to_brute_force() {
        let mut c = block_pattern([q(1, 2), q(1, 2), q(1, 2), q(1, 2)]);
        c[(0, 4)] = q(1, 3);
        let v = build_vec_l(&c).unwrap();
        assert!(v.off_pattern);
        assert_eq!(v.matrix, vec_l_brute_force(&c).unwrap());
        assert!(vec_l_closed_form(&c).is_err());
    }
}
