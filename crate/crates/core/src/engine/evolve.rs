use num_complex::Complex;

use super::density::DensityState;
use super::expm::expm;
use super::generator::GeneratorMatrix;
use super::operators::jump_operator;
use super::{hamiltonian, DIM};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::scalar::Real;

/// `exp(G t)` for a fixed generator and time, reusable across initial states.
#[derive(Clone, Debug)]
pub struct Propagator<T> {
    map: ComplexMatrix<T>,
    t: T,
}

impl<T: Real> Propagator<T> {
    pub fn new(g: &GeneratorMatrix<T>, t: T) -> Result<Self> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::Argument(format!(
                "evolution time must be finite and non-negative, got {t}"
            )));
        }
        let n = g.entries().rows();
        let map = if t == T::zero() {
            ComplexMatrix::identity(n)
        } else {
            expm(&g.entries().scale(&Complex::new(t, T::zero())))?
        };
        Ok(Propagator { map, t })
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn apply(&self, rho0: &DensityState<T>) -> Result<DensityState<T>> {
        if rho0.dim() * rho0.dim() != self.map.cols() {
            return Err(Error::Dimension {
                expected: format!("state with {} vector entries", self.map.cols()),
                found: format!("{}", rho0.dim() * rho0.dim()),
            });
        }
        if self.t == T::zero() {
            return Ok(rho0.clone());
        }
        let out = self.map.matvec(&rho0.row_stacked())?;
        let state = DensityState::from_row_stacked_unchecked(&out);
        check_trace(&state)?;
        Ok(state)
    }
}

fn check_trace<T: Real>(state: &DensityState<T>) -> Result<()> {
    let trace = state.trace();
    let loss = (trace.re - T::one()).abs().max(trace.im.abs());
    if !(loss <= T::tol(1e-8)) {
        return Err(Error::NumericalInstability(format!(
            "trace drifted to {trace} during evolution"
        )));
    }
    Ok(())
}

/// `ρ(t) = exp(G t) ρ₀`.
pub fn evolve<T: Real>(
    g: &GeneratorMatrix<T>,
    rho0: &DensityState<T>,
    t: T,
) -> Result<DensityState<T>> {
    Propagator::new(g, t)?.apply(rho0)
}

fn step_count<T: Real>(span: T, step: T) -> usize {
    (span / step).ceil().to_usize().unwrap_or(1).max(1)
}

/// Classical RK4 on `dv/dt = G v` with the given maximum step.
pub fn integrate_vectorized_rk4<T: Real>(
    g: &GeneratorMatrix<T>,
    rho0: &DensityState<T>,
    t: T,
    step: T,
) -> Result<DensityState<T>> {
    if !t.is_finite() || t < T::zero() || !(step > T::zero()) {
        return Err(Error::Argument("invalid integration span or step".into()));
    }
    if t == T::zero() {
        return Ok(rho0.clone());
    }
    let n = step_count(t, step);
    let h = t / T::from_usize(n).expect("step count");
    let half = Complex::new(h * T::half(), T::zero());
    let full = Complex::new(h, T::zero());
    let sixth = Complex::new(h / T::lit(6.0), T::zero());
    let two = Complex::new(T::lit(2.0), T::zero());
    let a = g.entries();
    let mut v = rho0.row_stacked();
    let axpy = |x: &[Complex<T>], k: &[Complex<T>], w: Complex<T>| -> Vec<Complex<T>> {
        x.iter().zip(k).map(|(a, b)| *a + *b * w).collect()
    };
    for _ in 0..n {
        let k1 = a.matvec(&v)?;
        let k2 = a.matvec(&axpy(&v, &k1, half))?;
        let k3 = a.matvec(&axpy(&v, &k2, half))?;
        let k4 = a.matvec(&axpy(&v, &k3, full))?;
        for i in 0..v.len() {
            v[i] = v[i] + (k1[i] + two * k2[i] + two * k3[i] + k4[i]) * sixth;
        }
    }
    let state = DensityState::from_row_stacked_unchecked(&v);
    check_trace(&state)?;
    Ok(state)
}

/// Unvectorized master equation
/// `dρ/dt = −i(1−α)[H, ρ] + α Σ γ_{m,n} (L ρ L† − ½{L†L, ρ})`
/// with `L_{m,n} = |m><n|` and `γ_{m,n}` read from a rate matrix.
#[derive(Clone, Debug)]
pub struct MasterEquation<T> {
    hamiltonian: ComplexMatrix<T>,
    rates: Matrix<T>,
    alpha: T,
}

impl<T: Real> MasterEquation<T> {
    /// Model Hamiltonian with the given rates.
    pub fn new(alpha: T, rates: &Matrix<T>) -> Result<Self> {
        Self::with_hamiltonian(alpha, rates, hamiltonian())
    }

    pub fn with_hamiltonian(alpha: T, rates: &Matrix<T>, h: ComplexMatrix<T>) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(Error::Argument(format!("alpha = {alpha} outside [0, 1]")));
        }
        if rates.rows() != DIM || rates.cols() != DIM || h.rows() != DIM || h.cols() != DIM {
            return Err(Error::Dimension {
                expected: format!("{DIM}x{DIM} operators"),
                found: format!("{}x{} rates", rates.rows(), rates.cols()),
            });
        }
        Ok(MasterEquation {
            hamiltonian: h,
            rates: rates.clone(),
            alpha,
        })
    }

    /// Right-hand side using `L ρ L† = ρ(n,n)|m><m|` and
    /// `{|n><n|, ρ}` = row `n` plus column `n` of `ρ`.
    pub fn rhs(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = self.coherent_part(rho);
        let a = self.alpha;
        for ((m, n), gamma) in self.rates.indexed() {
            if *gamma == T::zero() {
                continue;
            }
            let w = Complex::new(a * *gamma, T::zero());
            let hw = w * T::half();
            out[(m, m)] = out[(m, m)] + w * rho[(n, n)];
            for k in 0..DIM {
                out[(n, k)] = out[(n, k)] - hw * rho[(n, k)];
                out[(k, n)] = out[(k, n)] - hw * rho[(k, n)];
            }
        }
        out
    }

    /// Same right-hand side by literal operator products.
    pub fn rhs_dense(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let mut out = self.coherent_part(rho);
        let half = Complex::new(T::half(), T::zero());
        for ((m, n), gamma) in self.rates.indexed() {
            if *gamma == T::zero() {
                continue;
            }
            let l = jump_operator::<T>(m + 1, n + 1)?;
            let ldag = l.adjoint();
            let ldl = ldag.matmul(&l)?;
            let sandwich = l.matmul(rho)?.matmul(&ldag)?;
            let anti = &ldl.matmul(rho)? + &rho.matmul(&ldl)?;
            let term = &sandwich - &anti.scale(&half);
            out = &out + &term.scale(&Complex::new(self.alpha * *gamma, T::zero()));
        }
        Ok(out)
    }

    fn coherent_part(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let comm = &(&self.hamiltonian * rho) - &(rho * &self.hamiltonian);
        comm.scale(&Complex::new(T::zero(), -(T::one() - self.alpha)))
    }

    /// RK4 from `t = 0`, returning the state at each requested time
    /// (non-decreasing, non-negative).
    pub fn integrate_checkpoints(
        &self,
        rho0: &DensityState<T>,
        times: &[T],
        step: T,
    ) -> Result<Vec<DensityState<T>>> {
        if !(step > T::zero()) {
            return Err(Error::Argument("integration step must be positive".into()));
        }
        if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !(*t >= T::zero())) {
            return Err(Error::Argument(
                "checkpoint times must be non-negative and sorted".into(),
            ));
        }
        let mut rho = rho0.matrix_form().clone();
        let mut now = T::zero();
        let mut out = Vec::with_capacity(times.len());
        let lit = |x: f64| Complex::new(T::lit(x), T::zero());
        for &target in times {
            let span = target - now;
            if span > T::zero() {
                let n = step_count(span, step);
                let h = span / T::from_usize(n).expect("step count");
                let hc = Complex::new(h, T::zero());
                for _ in 0..n {
                    let k1 = self.rhs(&rho);
                    let k2 = self.rhs(&(&rho + &k1.scale(&(hc * lit(0.5)))));
                    let k3 = self.rhs(&(&rho + &k2.scale(&(hc * lit(0.5)))));
                    let k4 = self.rhs(&(&rho + &k3.scale(&hc)));
                    let incr = &(&k1 + &k2.scale(&lit(2.0))) + &(&k3.scale(&lit(2.0)) + &k4);
                    rho = &rho + &incr.scale(&(hc / lit(6.0)));
                }
                now = target;
            }
            let state = DensityState::from_row_stacked_unchecked(rho.as_slice());
            check_trace(&state)?;
            out.push(state);
        }
        Ok(out)
    }

    pub fn integrate(&self, rho0: &DensityState<T>, t: T, step: T) -> Result<DensityState<T>> {
        Ok(self
            .integrate_checkpoints(rho0, &[t], step)?
            .pop()
            .expect("one checkpoint"))
    }
}
