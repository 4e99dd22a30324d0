use num_complex::Complex;
use num_traits::Zero;

use super::operators::re;
use super::superop::{coherent_weight, model_vec_h, partner_state, vec_l_brute_force};
use super::{follows_block_pattern, DIM, VEC_DIM};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::scalar::Scalar;

/// Vectorized Lindblad generator `−i(1−α) vecH + α vecL` (64x64).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix<T> {
    entries: ComplexMatrix<T>,
    alpha: T,
}

impl<T: Scalar> GeneratorMatrix<T> {
    pub fn entries(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    pub fn into_entries(self) -> ComplexMatrix<T> {
        self.entries
    }

    /// Diagonal 16x16 block `A_i`, `i` in 1..=4.
    pub fn block(&self, i: usize) -> Result<ComplexMatrix<T>> {
        if !(1..=4).contains(&i) {
            return Err(Error::Argument(format!("block index {i} outside 1..=4")));
        }
        let base = 16 * (i - 1);
        Ok(self.entries.block(base, base, 16, 16))
    }

    /// True when every entry outside the four 16x16 diagonal blocks is zero.
    pub fn is_block_diagonal(&self) -> bool {
        self.entries
            .indexed()
            .all(|((r, c), v)| r / 16 == c / 16 || v.is_zero())
    }

    /// Copy with `delta` added to one entry (0-based). Used to check that the
    /// structure comparisons locate corrupted entries.
    pub fn perturbed(&self, row: usize, col: usize, delta: Complex<T>) -> Self {
        let mut entries = self.entries.clone();
        entries[(row, col)] = entries[(row, col)].clone() + delta;
        GeneratorMatrix {
            entries,
            alpha: self.alpha.clone(),
        }
    }
}

fn check_inputs<T: Scalar>(alpha: &T, c: &Matrix<T>) -> Result<()> {
    if !alpha.is_finite_value() || *alpha < T::zero() || *alpha > T::one() {
        return Err(Error::Argument(format!("alpha = {alpha:?} outside [0, 1]")));
    }
    if c.rows() != DIM || c.cols() != DIM {
        return Err(Error::Dimension {
            expected: format!("{DIM}x{DIM} cognition matrix"),
            found: format!("{}x{}", c.rows(), c.cols()),
        });
    }
    Ok(())
}

/// Brute force: `−i(1−α)(H⊗I − I⊗Hᵀ) + α Σ C_{m,n} Λ_{m,n}`. Valid for any
/// 8x8 rate matrix.
pub fn generator_brute_force<T: Scalar>(alpha: T, c: &Matrix<T>) -> Result<GeneratorMatrix<T>> {
    check_inputs(&alpha, c)?;
    let vec_h = model_vec_h::<T>().scale(&coherent_weight(&alpha));
    let vec_l = vec_l_brute_force(c)?.scale(&re(alpha.clone()));
    Ok(GeneratorMatrix {
        entries: &vec_h + &vec_l,
        alpha,
    })
}

/// Block assembly `A₁ ⊕ A₂ ⊕ A₃ ⊕ A₄` for a cognition matrix with the
/// 2x2 block pattern.
///
/// Each 16x16 block is
/// `A_i = [[B_i1⊕…⊕B_i4, −i(1−α)I₈ + αE_i], [−i(1−α)I₈ + αD_i, B_i5⊕…⊕B_i8]]`
/// where `D_i` carries `C_{2i,2i−1}` at `(2i, 2i−1)`, `E_i` carries
/// `C_{2i−1,2i}` at `(2i−1, 2i)`, and the 2x2 `B_ij` hold the decay rates.
pub fn build_generator<T: Scalar>(alpha: T, c: &Matrix<T>) -> Result<GeneratorMatrix<T>> {
    check_inputs(&alpha, c)?;
    if !follows_block_pattern(c) {
        return Err(Error::Argument(
            "cognition matrix has entries outside the 2x2 block pattern; \
             use generator_brute_force"
                .into(),
        ));
    }
    let entry = |m: usize, n: usize| c[(m - 1, n - 1)].clone();
    // column sums and leave rates of the rate matrix, 1-based state labels
    let s = |k: usize| entry(k, k) + entry(partner_state(k), k);
    let half_alpha = alpha.clone() * T::half();
    let coherent = coherent_weight(&alpha);
    // +i(1−α) on the off-diagonal of every B block
    let swap = Complex::new(T::zero(), T::one() - alpha.clone());

    let two_by_two = |d0: T, d1: T| {
        let mut b = ComplexMatrix::<T>::zeros(2, 2);
        b[(0, 0)] = re(-(half_alpha.clone() * d0));
        b[(1, 1)] = re(-(half_alpha.clone() * d1));
        b[(0, 1)] = swap.clone();
        b[(1, 0)] = swap.clone();
        b
    };

    let mut out = ComplexMatrix::<T>::zeros(VEC_DIM, VEC_DIM);
    for i in 1..=4 {
        let base = 16 * (i - 1);
        let odd = 2 * i - 1;
        let even = 2 * i;
        for j in 1..=4 {
            let (jo, je) = (2 * j - 1, 2 * j);
            // F_i contributes s(2i-1) to both diagonal entries, G_i contributes s(2i)
            let (top, bottom) = if i == j {
                (
                    two_by_two(
                        s(odd) + entry(even, odd) - entry(odd, odd),
                        s(odd) + s(even),
                    ),
                    two_by_two(
                        s(even) + s(odd),
                        s(even) + entry(odd, even) - entry(even, even),
                    ),
                )
            } else {
                (
                    two_by_two(s(odd) + s(jo), s(odd) + s(je)),
                    two_by_two(s(even) + s(jo), s(even) + s(je)),
                )
            };
            out.set_block(base + 2 * (j - 1), base + 2 * (j - 1), &top);
            out.set_block(base + DIM + 2 * (j - 1), base + DIM + 2 * (j - 1), &bottom);
        }
        for k in 0..DIM {
            out[(base + k, base + DIM + k)] = coherent.clone();
            out[(base + DIM + k, base + k)] = coherent.clone();
        }
        // E_i(2i-1, 2i) and D_i(2i, 2i-1)
        out[(base + odd - 1, base + DIM + even - 1)] = re(alpha.clone() * entry(odd, even));
        out[(base + DIM + even - 1, base + odd - 1)] = re(alpha.clone() * entry(even, odd));
    }
    Ok(GeneratorMatrix {
        entries: out,
        alpha,
    })
}
