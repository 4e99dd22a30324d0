//! Driver cognition: Luce choice rates, the cognition matrix, initial
//! states, continue probabilities and the driver's final responses.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::engine::DensityState;
use crate::error::{Error, Result};
use crate::game::{check_unit, CarAction, DriverAction, DriverUtilities};
use crate::matrix::Matrix;
use crate::scalar::{Real, Scalar};

/// Ties `|Pr(C) − ½| ≤ TIE_TOL` are flagged as degenerate.
pub const TIE_TOL: f64 = 1e-9;

/// Attention `alpha` in [0, 1] and discrimination `lambda ≥ 0`. The belief
/// weight `phi` is fixed at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CognitionParams<T> {
    alpha: T,
    lambda: T,
}

impl<T: Scalar + Copy> CognitionParams<T> {
    pub fn new(alpha: T, lambda: T) -> Result<Self> {
        check_unit("alpha", &alpha)?;
        if !lambda.is_finite_value() || lambda < T::zero() {
            return Err(Error::validation(
                "lambda",
                format!("{lambda:?} must be finite and non-negative"),
            ));
        }
        Ok(CognitionParams { alpha, lambda })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn phi(&self) -> T {
        T::zero()
    }
}

/// Continue probabilities in each world: `mu` (safe, N), `nu` (safe, A),
/// `xi` (dangerous, N), `o` (dangerous, A).
#[derive(Clone, Debug, PartialEq)]
pub struct LuceRates<T> {
    pub mu: T,
    pub nu: T,
    pub xi: T,
    pub o: T,
}

impl<T: Scalar> LuceRates<T> {
    pub fn new(mu: T, nu: T, xi: T, o: T) -> Result<Self> {
        for (name, v) in [("mu", &mu), ("nu", &nu), ("xi", &xi), ("o", &o)] {
            check_unit(name, v)?;
        }
        Ok(LuceRates { mu, nu, xi, o })
    }

    pub fn uniform() -> Self {
        LuceRates {
            mu: T::half(),
            nu: T::half(),
            xi: T::half(),
            o: T::half(),
        }
    }

    fn as_array(&self) -> [&T; 4] {
        [&self.mu, &self.nu, &self.xi, &self.o]
    }
}

/// Driver's prior that the road is safe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriverBelief<T> {
    p: T,
}

impl<T: Scalar + Copy> DriverBelief<T> {
    pub fn new(p: T) -> Result<Self> {
        check_unit("p", &p)?;
        Ok(DriverBelief { p })
    }

    pub fn p(&self) -> T {
        self.p
    }
}

fn check_luce_args<T: Real>(u_win: T, u_lose: T, lambda: T) -> Result<()> {
    for (name, u) in [("u_win", u_win), ("u_lose", u_lose)] {
        if !u.is_finite() || u <= T::zero() {
            return Err(Error::validation(
                name,
                format!("utility must be finite and strictly positive, got {u}"),
            ));
        }
    }
    if !lambda.is_finite() || lambda < T::zero() {
        return Err(Error::Argument(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// `u_win^λ / (u_win^λ + u_lose^λ)`, evaluated as a logistic function of
/// `λ (ln u_lose − ln u_win)` so that large `λ` cannot overflow.
pub fn luce_probability<T: Real>(u_win: T, u_lose: T, lambda: T) -> Result<T> {
    check_luce_args(u_win, u_lose, lambda)?;
    if lambda == T::zero() {
        return Ok(T::half());
    }
    let d = lambda * (u_lose.ln() - u_win.ln());
    Ok(if d > T::zero() {
        let e = (-d).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + d.exp())
    })
}

/// Exact rational Luce probability for an integer exponent.
pub fn luce_probability_exact(
    u_win: &BigRational,
    u_lose: &BigRational,
    lambda: u32,
) -> Result<BigRational> {
    for (name, u) in [("u_win", u_win), ("u_lose", u_lose)] {
        if *u <= BigRational::zero() {
            return Err(Error::validation(
                name,
                format!("utility must be strictly positive, got {u}"),
            ));
        }
    }
    let pow = |u: &BigRational| -> BigRational {
        BigRational::new(
            num_traits::pow(u.numer().clone(), lambda as usize),
            num_traits::pow(u.denom().clone(), lambda as usize),
        )
    };
    let w = pow(u_win);
    let total = w.clone() + pow(u_lose);
    Ok(w / total)
}

fn named<T: Scalar>(r: Result<T>, win: &str, lose: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Validation { field, reason } => Error::Validation {
            field: if field == "u_win" {
                win.into()
            } else {
                lose.into()
            },
            reason,
        },
        other => other,
    })
}

/// `μ = L(a2s, b2s)`, `ν = L(c2s, d2s)`, `ξ = L(a2d, b2d)`, `o = L(c2d, d2d)`.
pub fn build_luce_rates<T: Real>(u: &DriverUtilities<T>, lambda: T) -> Result<LuceRates<T>> {
    Ok(LuceRates {
        mu: named(luce_probability(u.a2s, u.b2s, lambda), "a2s", "b2s")?,
        nu: named(luce_probability(u.c2s, u.d2s, lambda), "c2s", "d2s")?,
        xi: named(luce_probability(u.a2d, u.b2d, lambda), "a2d", "b2d")?,
        o: named(luce_probability(u.c2d, u.d2d, lambda), "c2d", "d2d")?,
    })
}

/// Exact rates for an integer `lambda`.
pub fn build_luce_rates_exact(
    u: &DriverUtilities<BigRational>,
    lambda: u32,
) -> Result<LuceRates<BigRational>> {
    Ok(LuceRates {
        mu: named(luce_probability_exact(&u.a2s, &u.b2s, lambda), "a2s", "b2s")?,
        nu: named(luce_probability_exact(&u.c2s, &u.d2s, lambda), "c2s", "d2s")?,
        xi: named(luce_probability_exact(&u.a2d, &u.b2d, lambda), "a2d", "b2d")?,
        o: named(luce_probability_exact(&u.c2d, &u.d2d, lambda), "c2d", "d2d")?,
    })
}

/// 8x8 rate matrix `M(μ) ⊕ M(ν) ⊕ M(ξ) ⊕ M(o)` with
/// `M(a) = [[a, a], [1−a, 1−a]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CognitionMatrix<T> {
    matrix: Matrix<T>,
}

impl<T: Scalar> CognitionMatrix<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    /// 1-based entry `C_{m,n}`.
    pub fn entry(&self, m: usize, n: usize) -> &T {
        &self.matrix[(m - 1, n - 1)]
    }
}

pub fn build_cognition_matrix<T: Scalar>(rates: &LuceRates<T>) -> CognitionMatrix<T> {
    let blocks: Vec<Matrix<T>> = rates
        .as_array()
        .iter()
        .map(|a| {
            Matrix::from_fn(2, 2, |r, _| {
                if r == 0 {
                    (*a).clone()
                } else {
                    T::one() - (*a).clone()
                }
            })
        })
        .collect();
    CognitionMatrix {
        matrix: Matrix::direct_sum(&blocks),
    }
}

fn pure_amplitudes<T: Real>(weights: [T; 4]) -> Vec<Complex<T>> {
    let mut psi = Vec::with_capacity(8);
    for w in weights {
        let a = Complex::new((w * T::half()).sqrt(), T::zero());
        psi.push(a);
        psi.push(a);
    }
    psi
}

/// `|Ψ₀><Ψ₀|` with `|Ψ₀> = √(p/2)(|e₁>+|e₂>) + √((1−p)/2)(|e₅>+|e₆>)` for `N`
/// and the `e₃, e₄, e₇, e₈` analogue for `A`.
pub fn initial_state_pure<T: Real>(
    belief: DriverBelief<T>,
    action: CarAction,
) -> Result<DensityState<T>> {
    let p = belief.p();
    let zero = T::zero();
    let weights = match action {
        CarAction::NoAlert => [p, zero, T::one() - p, zero],
        CarAction::Alert => [zero, p, zero, T::one() - p],
    };
    DensityState::from_pure(&pure_amplitudes(weights))
}

/// Initial state when the car alerts with probability `p_a`.
pub fn initial_state_mixed<T: Real>(belief: DriverBelief<T>, p_a: T) -> Result<DensityState<T>> {
    check_unit("p_a", &p_a)?;
    let p = belief.p();
    let one = T::one();
    DensityState::from_pure(&pure_amplitudes([
        p * (one - p_a),
        p * p_a,
        (one - p) * (one - p_a),
        (one - p) * p_a,
    ]))
}

/// Continue probability `ρ₁₁ + ρ₃₃ + ρ₅₅ + ρ₇₇`, clamped to [0, 1].
pub fn pr_continue_from_state<T: Real>(rho: &DensityState<T>) -> Result<T> {
    if rho.dim() != crate::engine::DIM {
        return Err(Error::Dimension {
            expected: "8x8 density matrix".into(),
            found: format!("{0}x{0}", rho.dim()),
        });
    }
    let m = rho.matrix_form();
    let sum = m[(0, 0)] + m[(2, 2)] + m[(4, 4)] + m[(6, 6)];
    if sum.im.abs() > T::tol(1e-8) {
        return Err(Error::NumericalInstability(format!(
            "continue probability has imaginary part {}",
            sum.im
        )));
    }
    let slack = T::tol(1e-9);
    if sum.re < -slack || sum.re > T::one() + slack {
        return Err(Error::NumericalInstability(format!(
            "continue probability {} outside [0, 1]",
            sum.re
        )));
    }
    Ok(sum.re.max(T::zero()).min(T::one()))
}

/// `r = p(1−p_A)μ + p p_A ν + (1−p)(1−p_A)ξ + (1−p) p_A o`.
pub fn weighted_rate<T: Scalar>(rates: &LuceRates<T>, p: &T, p_a: &T) -> T {
    let one = T::one();
    let q = one.clone() - p.clone();
    let n = one - p_a.clone();
    p.clone() * n.clone() * rates.mu.clone()
        + p.clone() * p_a.clone() * rates.nu.clone()
        + q.clone() * n * rates.xi.clone()
        + q * p_a.clone() * rates.o.clone()
}

fn decay_constant<T: Scalar>(alpha: &T) -> T {
    let beta = T::one() - alpha.clone();
    alpha.clone() * alpha.clone() + T::from_ratio(4, 1) * beta.clone() * beta
}

/// Closed-form continue probability at time `t` for the mixed initial state.
pub fn pr_continue_closed_form<T: Real>(
    params: &CognitionParams<T>,
    rates: &LuceRates<T>,
    p: T,
    p_a: T,
    t: T,
) -> Result<T> {
    check_unit("p", &p)?;
    check_unit("p_a", &p_a)?;
    if !t.is_finite() || t < T::zero() {
        return Err(Error::Argument(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    let a = params.alpha();
    let beta = T::one() - a;
    let c = decay_constant(&a);
    let r = weighted_rate(rates, &p, &p_a);
    let two = T::lit(2.0);
    let decay = (-a * t).exp();
    let (sin, cos) = (two * beta * t).sin_cos();
    let h = a / c * decay * (two * beta * sin - a * cos);
    let steady = two * beta * beta / c + a * a / c * r;
    Ok(
        steady + r * h + (T::half() - two * beta * beta / c) * decay * cos
            - a * beta / c * decay * sin,
    )
}

/// `t → ∞` limit `(2(1−α)² + α² r) / c`.
pub fn steady_state_pr_continue<T: Scalar + Copy>(
    params: &CognitionParams<T>,
    rates: &LuceRates<T>,
    p: T,
    p_a: T,
) -> Result<T> {
    check_unit("p", &p)?;
    check_unit("p_a", &p_a)?;
    let a = params.alpha();
    if a.is_zero() {
        return Err(Error::DegenerateDynamics(
            "alpha = 0 has no decay and no steady state".into(),
        ));
    }
    let beta = T::one() - a;
    let two = T::from_ratio(2, 1);
    let r = weighted_rate(rates, &p, &p_a);
    Ok((two * beta * beta + a * a * r) / decay_constant(&a))
}

/// Driver's pure final response.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OqPure<T> {
    pub action: DriverAction,
    pub pr_continue: T,
    /// `λ = 0` or `Pr(C)` within [`TIE_TOL`] of ½.
    pub degenerate: bool,
}

/// Cognition parameters together with the rates derived from a utility table.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverModel<T> {
    params: CognitionParams<T>,
    rates: LuceRates<T>,
}

impl<T: Real> DriverModel<T> {
    pub fn new(params: CognitionParams<T>, u: &DriverUtilities<T>) -> Result<Self> {
        u.validate()?;
        let rates = build_luce_rates(u, params.lambda())?;
        Ok(DriverModel { params, rates })
    }
}

impl<T: Scalar + Copy> DriverModel<T> {
    pub fn from_rates(params: CognitionParams<T>, rates: LuceRates<T>) -> Self {
        DriverModel { params, rates }
    }

    pub fn params(&self) -> &CognitionParams<T> {
        &self.params
    }

    pub fn rates(&self) -> &LuceRates<T> {
        &self.rates
    }

    pub fn cognition_matrix(&self) -> CognitionMatrix<T> {
        build_cognition_matrix(&self.rates)
    }

    pub fn steady_state(&self, p: T, p_a: T) -> Result<T> {
        steady_state_pr_continue(&self.params, &self.rates, p, p_a)
    }

    pub fn oq_mix(&self, p_a: T, p: T) -> Result<T> {
        self.steady_state(p, p_a)
    }
}

impl<T: Real> DriverModel<T> {
    /// Continue iff the steady-state `Pr(C) ≥ ½`.
    pub fn oq_pure(&self, action: CarAction, p: T) -> Result<OqPure<T>> {
        let p_a = match action {
            CarAction::NoAlert => T::zero(),
            CarAction::Alert => T::one(),
        };
        let pr = self.steady_state(p, p_a)?;
        let tie = (pr - T::half()).abs() <= T::tol(TIE_TOL);
        Ok(OqPure {
            action: if pr >= T::half() || tie {
                DriverAction::Continue
            } else {
                DriverAction::Stop
            },
            pr_continue: pr,
            degenerate: tie || self.params.lambda() == T::zero(),
        })
    }
}

/// Free-standing form of [`DriverModel::oq_pure`].
pub fn oq_pure<T: Real>(
    action: CarAction,
    params: CognitionParams<T>,
    belief: DriverBelief<T>,
    u: &DriverUtilities<T>,
) -> Result<OqPure<T>> {
    DriverModel::new(params, u)?.oq_pure(action, belief.p())
}

/// Free-standing form of [`DriverModel::oq_mix`].
pub fn oq_mix<T: Real>(
    p_a: T,
    params: CognitionParams<T>,
    belief: DriverBelief<T>,
    u: &DriverUtilities<T>,
) -> Result<T> {
    DriverModel::new(params, u)?.oq_mix(p_a, belief.p())
}

/// Exact model for integer `lambda`, used by structure checks.
pub fn exact_driver_model(
    alpha: BigRational,
    lambda: u32,
    u: &DriverUtilities<BigRational>,
) -> Result<DriverModel<BigRational>> {
    u.validate()?;
    if alpha < BigRational::zero() || alpha > BigRational::one() {
        return Err(Error::validation(
            "alpha",
            format!("{alpha} is outside [0, 1]"),
        ));
    }
    let rates = build_luce_rates_exact(u, lambda)?;
    Ok(DriverModel {
        params: CognitionParams {
            alpha,
            lambda: BigRational::from_integer(BigInt::from(lambda)),
        },
        rates,
    })
}

impl DriverModel<BigRational> {
    /// Exact steady state (no `Copy` bound).
    pub fn steady_state_exact(&self, p: &BigRational, p_a: &BigRational) -> Result<BigRational> {
        check_unit("p", p)?;
        check_unit("p_a", p_a)?;
        let a = self.params.alpha.clone();
        if a.is_zero() {
            return Err(Error::DegenerateDynamics(
                "alpha = 0 has no decay and no steady state".into(),
            ));
        }
        let beta = BigRational::one() - a.clone();
        let two = BigRational::from_ratio(2, 1);
        let r = weighted_rate(&self.rates, p, p_a);
        Ok((two * beta.clone() * beta + a.clone() * a.clone() * r) / decay_constant(&a))
    }

    pub fn exact_rates(&self) -> &LuceRates<BigRational> {
        &self.rates
    }

    pub fn exact_alpha(&self) -> &BigRational {
        &self.params.alpha
    }
}
