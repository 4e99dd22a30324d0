//! Pure equilibria via the final-response loop and mixed equilibria via the
//! car's indifference condition.

use crate::cognition::{CognitionParams, DriverModel};
use crate::error::{Error, Result};
use crate::game::{
    agnostic_response_car, car_expected_utility, check_unit, compare_payoffs, CarAction,
    CarResponse, DriverAction, UtilityTable, PAYOFF_TOL,
};
use crate::scalar::{Real, Scalar};

/// Residual bound for mixed equilibria.
pub const MIXED_TOL: f64 = 1e-9;
/// Allowed gap between closed-form and bisection `p_A*`.
pub const BISECTION_TOL: f64 = 1e-10;
/// Response residual below which `p_A*` is taken at an end of [0, 1].
pub const ENDPOINT_TOL: f64 = 1e-15;
/// `|K₁|` below which the steady state is treated as independent of `p_A`.
pub const FLAT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureProfile<T> {
    pub car: CarAction,
    pub driver: DriverAction,
    /// Steady-state continue probability behind the driver's action.
    pub pr_continue: T,
    /// Driver tie or `λ = 0`.
    pub degenerate: bool,
    /// The car is indifferent against this driver action.
    pub payoff_tie: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureEquilibriumSet<T> {
    pub profiles: Vec<PureProfile<T>>,
    /// `α = 0`: no steady state, no profiles.
    pub degenerate_dynamics: bool,
}

impl<T> PureEquilibriumSet<T> {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn contains(&self, car: CarAction, driver: DriverAction) -> bool {
        self.profiles
            .iter()
            .any(|p| p.car == car && p.driver == driver)
    }

    pub fn pairs(&self) -> Vec<(CarAction, DriverAction)> {
        self.profiles.iter().map(|p| (p.car, p.driver)).collect()
    }
}

/// Utilities plus the driver's cognition model.
#[derive(Clone, Debug)]
pub struct Game<T> {
    utilities: UtilityTable<T>,
    driver: DriverModel<T>,
}

impl<T: Real> Game<T> {
    pub fn new(utilities: UtilityTable<T>, params: CognitionParams<T>) -> Result<Self> {
        utilities.validate()?;
        let driver = DriverModel::new(params, &utilities.driver())?;
        Ok(Game { utilities, driver })
    }

    pub fn utilities(&self) -> &UtilityTable<T> {
        &self.utilities
    }

    pub fn driver(&self) -> &DriverModel<T> {
        &self.driver
    }

    /// For each car action `s₁`, take the driver's final response `s₂` and
    /// keep `(s₁, s₂)` when `s₁` is a weak best response to `s₂`.
    pub fn pure_equilibria(&self, p: T, q: T) -> Result<PureEquilibriumSet<T>> {
        check_unit("p", &p)?;
        check_unit("q", &q)?;
        let mut profiles = Vec::with_capacity(2);
        for car in CarAction::ALL {
            let response = match self.driver.oq_pure(car, p) {
                Ok(r) => r,
                Err(Error::DegenerateDynamics(_)) => {
                    return Ok(PureEquilibriumSet {
                        profiles: Vec::new(),
                        degenerate_dynamics: true,
                    })
                }
                Err(e) => return Err(e),
            };
            let pc = match response.action {
                DriverAction::Continue => T::one(),
                DriverAction::Stop => T::zero(),
            };
            let own = car_expected_utility(car, pc, q, &self.utilities)?;
            let alt = car_expected_utility(car.other(), pc, q, &self.utilities)?;
            if own >= alt - T::tol(PAYOFF_TOL) {
                profiles.push(PureProfile {
                    car,
                    driver: response.action,
                    pr_continue: response.pr_continue,
                    degenerate: response.degenerate,
                    payoff_tie: (own - alt).abs() <= T::tol(PAYOFF_TOL),
                });
            }
        }
        Ok(PureEquilibriumSet {
            profiles,
            degenerate_dynamics: false,
        })
    }

    /// Benchmark: the car alerts iff `q < ½`, the driver answers with its
    /// final response.
    pub fn agnostic_outcome(&self, p: T, q: T) -> Result<PureEquilibriumSet<T>> {
        check_unit("p", &p)?;
        let car = agnostic_response_car(q)?;
        match self.driver.oq_pure(car, p) {
            Ok(r) => Ok(PureEquilibriumSet {
                profiles: vec![PureProfile {
                    car,
                    driver: r.action,
                    pr_continue: r.pr_continue,
                    degenerate: r.degenerate,
                    payoff_tie: false,
                }],
                degenerate_dynamics: false,
            }),
            Err(Error::DegenerateDynamics(_)) => Ok(PureEquilibriumSet {
                profiles: Vec::new(),
                degenerate_dynamics: true,
            }),
            Err(e) => Err(e),
        }
    }

    /// Re-checks both fixed-point conditions of a profile.
    pub fn is_fixed_point(&self, profile: &PureProfile<T>, p: T, q: T) -> Result<bool> {
        let response = self.driver.oq_pure(profile.car, p)?;
        if response.action != profile.driver {
            return Ok(false);
        }
        let pc = match profile.driver {
            DriverAction::Continue => T::one(),
            DriverAction::Stop => T::zero(),
        };
        let n = car_expected_utility(CarAction::NoAlert, pc, q, &self.utilities)?;
        let a = car_expected_utility(CarAction::Alert, pc, q, &self.utilities)?;
        Ok(compare_payoffs(n, a).admits(profile.car))
    }

    pub fn mixed_equilibrium(&self, p: T, q: T) -> Result<Option<MixedEquilibrium<T>>> {
        check_unit("p", &p)?;
        let Some(pc) = mixed_pc_star(q, &self.utilities)? else {
            return Ok(None);
        };
        let Some(pa) = solve_pa_star(pc, &self.driver, p)? else {
            return Ok(None);
        };
        let n = car_expected_utility(CarAction::NoAlert, pc, q, &self.utilities)?;
        let a = car_expected_utility(CarAction::Alert, pc, q, &self.utilities)?;
        let indifference_gap = (n - a).abs();
        let response_gap = (self.driver.oq_mix(pa.value, p)? - pc).abs();
        let bisected = bisect_pa_star(pc, &self.driver, p)?;
        let bisection_gap = match (bisected, pa.any_pa) {
            (_, true) => T::zero(),
            (Some(b), false) => (b - pa.value).abs(),
            (None, false) => T::infinity(),
        };
        let tol = T::tol(MIXED_TOL);
        if !(indifference_gap <= tol && response_gap <= tol) {
            return Err(Error::NumericalInstability(format!(
                "mixed equilibrium residuals too large: indifference {indifference_gap}, \
                 response {response_gap}"
            )));
        }
        if !(bisection_gap <= T::tol(BISECTION_TOL)) {
            return Err(Error::NumericalInstability(format!(
                "closed-form p_A* {} disagrees with bisection by {bisection_gap}",
                pa.value
            )));
        }
        Ok(Some(MixedEquilibrium {
            pa_star: pa.value,
            pc_star: pc,
            any_pa: pa.any_pa,
            indifference_gap,
            response_gap,
            bisection_gap,
        }))
    }
}

/// `(p_A*, p_C*)` with residuals of both defining conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedEquilibrium<T> {
    pub pa_star: T,
    pub pc_star: T,
    /// The driver's response does not depend on `p_A`; `pa_star` is the
    /// canonical midpoint.
    pub any_pa: bool,
    /// `|U_N(p_C*) − U_A(p_C*)|`.
    pub indifference_gap: T,
    /// `|OQ_mix(p_A*) − p_C*|`.
    pub response_gap: T,
    pub bisection_gap: T,
}

/// Solution of the car's indifference condition; `Some` only inside [0, 1]
/// (values within [`FLAT_TOL`] of an endpoint are snapped onto it).
/// With `Δs = b1s − d1s`, `Δd = b1d − d1d`:
/// `p_C* = (qΔs + (1−q)Δd) / (q(Δs + c1s − a1s) + (1−q)(Δd + c1d − a1d))`.
pub fn mixed_pc_star<T: Real>(q: T, u: &UtilityTable<T>) -> Result<Option<T>> {
    check_unit("q", &q)?;
    let (num, den) = indifference_terms(q, u);
    if den.abs() <= T::tol(1e-15) * T::one().max(num.abs()) {
        return Err(Error::NoIndifference(format!(
            "payoff difference does not depend on p_C at q = {q}"
        )));
    }
    let pc = num / den;
    let slack = T::tol(FLAT_TOL);
    Ok(if pc >= -slack && pc <= T::one() + slack {
        Some(pc.max(T::zero()).min(T::one()))
    } else {
        None
    })
}

/// Exact indifference point, without the [0, 1] filter.
pub fn pc_star_exact<T: Scalar>(q: &T, u: &UtilityTable<T>) -> Result<T> {
    check_unit("q", q)?;
    let (num, den) = indifference_terms(q.clone(), u);
    if den.is_zero() {
        return Err(Error::NoIndifference(format!(
            "payoff difference does not depend on p_C at q = {q:?}"
        )));
    }
    Ok(num / den)
}

fn indifference_terms<T: Scalar>(q: T, u: &UtilityTable<T>) -> (T, T) {
    let ds = u.b1s.clone() - u.d1s.clone();
    let dd = u.b1d.clone() - u.d1d.clone();
    let es = ds.clone() + u.c1s.clone() - u.a1s.clone();
    let ed = dd.clone() + u.c1d.clone() - u.a1d.clone();
    let w = T::one() - q.clone();
    (q.clone() * ds + w.clone() * dd, q * es + w * ed)
}

/// Car belief `q` whose indifference point is `p_c`, if one exists in [0, 1].
pub fn q_for_pc_star<T: Real>(p_c: T, u: &UtilityTable<T>) -> Option<T> {
    let ds = u.b1s - u.d1s;
    let dd = u.b1d - u.d1d;
    let es = ds + u.c1s - u.a1s;
    let ed = dd + u.c1d - u.a1d;
    let den = p_c * (es - ed) - ds + dd;
    if den == T::zero() {
        return None;
    }
    let q = (dd - p_c * ed) / den;
    let slack = T::tol(FLAT_TOL);
    (q.is_finite() && q >= -slack && q <= T::one() + slack).then(|| q.max(T::zero()).min(T::one()))
}

/// Pole of [`q_for_pc_star`] in `p_C`, if any.
pub fn pc_star_pole<T: Real>(u: &UtilityTable<T>) -> Option<T> {
    let ds = u.b1s - u.d1s;
    let dd = u.b1d - u.d1d;
    let es = ds + u.c1s - u.a1s;
    let ed = dd + u.c1d - u.a1d;
    let slope = es - ed;
    (slope != T::zero()).then(|| (ds - dd) / slope)
}

/// Steady state as a line in `p_A`: `Pr(C) = K₀ + K₁ p_A`.
pub fn steady_state_line<T: Real>(driver: &DriverModel<T>, p: T) -> Result<(T, T)> {
    let k0 = driver.steady_state(p, T::zero())?;
    let k1 = driver.steady_state(p, T::one())? - k0;
    Ok((k0, k1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PaStar<T> {
    pub value: T,
    pub any_pa: bool,
}

/// `p_A* = (p_C* − K₀) / K₁` when it lies in [0, 1].
pub fn solve_pa_star<T: Real>(p_c: T, driver: &DriverModel<T>, p: T) -> Result<Option<PaStar<T>>> {
    check_unit("p_c", &p_c)?;
    let (k0, k1) = steady_state_line(driver, p)?;
    if k1.abs() <= T::tol(FLAT_TOL) {
        return Ok(((k0 - p_c).abs() <= T::tol(MIXED_TOL)).then_some(PaStar {
            value: T::half(),
            any_pa: true,
        }));
    }
    let end = T::tol(ENDPOINT_TOL);
    if (p_c - k0).abs() <= end {
        return Ok(Some(PaStar {
            value: T::zero(),
            any_pa: false,
        }));
    }
    if (p_c - k0 - k1).abs() <= end {
        return Ok(Some(PaStar {
            value: T::one(),
            any_pa: false,
        }));
    }
    let pa = (p_c - k0) / k1;
    let slack = T::tol(FLAT_TOL);
    if pa < -slack || pa > T::one() + slack {
        return Ok(None);
    }
    Ok(Some(PaStar {
        value: pa.max(T::zero()).min(T::one()),
        any_pa: false,
    }))
}

/// Bisection on the (monotone) mixed response; oracle for [`solve_pa_star`].
pub fn bisect_pa_star<T: Real>(p_c: T, driver: &DriverModel<T>, p: T) -> Result<Option<T>> {
    let f = |pa: T| -> Result<T> { Ok(driver.oq_mix(pa, p)? - p_c) };
    let tol = T::tol(MIXED_TOL);
    let (mut lo, mut hi) = (T::zero(), T::one());
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.abs() <= tol && fhi.abs() <= tol {
        return Ok(Some(T::half()));
    }
    if flo.abs() <= T::tol(ENDPOINT_TOL) {
        return Ok(Some(lo));
    }
    if fhi.abs() <= T::tol(ENDPOINT_TOL) {
        return Ok(Some(hi));
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Ok(None);
    }
    let rising = fhi > flo;
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if (fm < T::zero()) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((lo + hi) * T::half()))
}

/// Free-standing form of [`Game::pure_equilibria`].
pub fn pure_equilibria<T: Real>(
    params: CognitionParams<T>,
    p: T,
    q: T,
    u: &UtilityTable<T>,
) -> Result<PureEquilibriumSet<T>> {
    Game::new(u.clone(), params)?.pure_equilibria(p, q)
}

/// Free-standing form of [`Game::mixed_equilibrium`].
pub fn mixed_equilibrium<T: Real>(
    params: CognitionParams<T>,
    p: T,
    q: T,
    u: &UtilityTable<T>,
) -> Result<Option<MixedEquilibrium<T>>> {
    Game::new(u.clone(), params)?.mixed_equilibrium(p, q)
}

/// Whether the car is indifferent at `p_c` (closure check with
/// [`mixed_pc_star`]).
pub fn car_indifferent_at<T: Real>(p_c: T, q: T, u: &UtilityTable<T>) -> Result<bool> {
    Ok(crate::game::best_response_car(p_c, q, u)? == CarResponse::Indifferent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(alpha: f64, lambda: f64) -> Game<f64> {
        Game::new(
            UtilityTable::baseline(),
            CognitionParams::new(alpha, lambda).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn baseline_corner_profiles() {
        let g = game(0.2, 10.0);
        let set = g.pure_equilibria(0.9, 0.9).unwrap();
        assert_eq!(
            set.pairs(),
            vec![(CarAction::NoAlert, DriverAction::Continue)]
        );
        let set = g.pure_equilibria(0.1, 0.1).unwrap();
        assert_eq!(set.pairs(), vec![(CarAction::Alert, DriverAction::Stop)]);
        for prof in &set.profiles {
            assert!(g.is_fixed_point(prof, 0.1, 0.1).unwrap());
        }
    }

    #[test]
    fn alpha_zero_is_flagged_not_failed() {
        let g = game(0.0, 1.0);
        let set = g.pure_equilibria(0.5, 0.5).unwrap();
        assert!(set.is_empty());
        assert!(set.degenerate_dynamics);
    }

    #[test]
    fn pc_star_formula() {
        let u = UtilityTable::<f64>::baseline();
        for q in [0.55, 0.6, 0.65] {
            let v = mixed_pc_star(q, &u).unwrap().unwrap();
            assert!((v - (11.0 - 16.0 * q) / (3.0 * q + 1.0)).abs() < 1e-12);
        }
        assert!((mixed_pc_star(0.6, &u).unwrap().unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(mixed_pc_star(11.0 / 16.0, &u).unwrap(), Some(0.0));
        assert_eq!(mixed_pc_star(0.3, &u).unwrap(), None);
        assert!((mixed_pc_star(10.0 / 19.0, &u).unwrap().unwrap() - 1.0).abs() < 1e-15);
        assert!(car_indifferent_at(0.5, 0.6, &u).unwrap());
        let ue = UtilityTable::<crate::BigRational>::baseline();
        let r = |n, d| crate::BigRational::from_ratio(n, d);
        assert_eq!(pc_star_exact(&r(10, 19), &ue).unwrap(), r(1, 1));
        assert_eq!(pc_star_exact(&r(11, 16), &ue).unwrap(), r(0, 1));
    }

    #[test]
    fn pc_star_inverse_round_trips() {
        let u = UtilityTable::<f64>::baseline();
        for pc in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let q = q_for_pc_star(pc, &u).unwrap();
            assert!((mixed_pc_star(q, &u).unwrap().unwrap() - pc).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_denominator_is_reported() {
        let mut u = UtilityTable::<f64>::baseline();
        // identical car rows make the payoff difference constant
        u.c1s = u.a1s;
        u.d1s = u.b1s;
        u.c1d = u.a1d;
        u.d1d = u.b1d;
        assert!(matches!(
            mixed_pc_star(0.5, &u),
            Err(Error::NoIndifference(_))
        ));
    }

    #[test]
    fn pa_star_examples() {
        let g = game(1.0, 1.0);
        let pa = solve_pa_star(5.0 / 22.0, g.driver(), 0.0).unwrap().unwrap();
        assert!((pa.value - 1.0).abs() < 1e-12);
        assert!(!pa.any_pa);
        let flat = game(0.5, 0.0);
        let pa = solve_pa_star(0.5, flat.driver(), 0.3).unwrap().unwrap();
        assert_eq!(
            pa,
            PaStar {
                value: 0.5,
                any_pa: true
            }
        );
        assert_eq!(solve_pa_star(0.4, flat.driver(), 0.3).unwrap(), None);
        assert_eq!(solve_pa_star(0.99, g.driver(), 0.0).unwrap(), None);
    }

    #[test]
    fn bisection_agrees() {
        let g = game(0.8, 3.0);
        let (k0, k1) = steady_state_line(g.driver(), 0.4).unwrap();
        let target = k0 + 0.3 * k1;
        let closed = solve_pa_star(target, g.driver(), 0.4).unwrap().unwrap();
        let bis = bisect_pa_star(target, g.driver(), 0.4).unwrap().unwrap();
        assert!((closed.value - 0.3).abs() < 1e-12);
        assert!((bis - 0.3).abs() < 1e-12);
    }

    #[test]
    fn mixed_absent_outside_feasible_q() {
        let g = game(0.8, 10.0);
        assert_eq!(g.mixed_equilibrium(0.5, 0.3).unwrap(), None);
    }

    #[test]
    fn mixed_equilibrium_inside_band() {
        let g = game(0.8, 10.0);
        // choose q so that p_C* hits the middle of the driver's range at p
        let p = 0.5;
        let (k0, k1) = steady_state_line(g.driver(), p).unwrap();
        let q = q_for_pc_star(k0 + 0.5 * k1, g.utilities()).unwrap();
        let eq = g.mixed_equilibrium(p, q).unwrap().unwrap();
        assert!((eq.pa_star - 0.5).abs() < 1e-6);
        assert!(eq.indifference_gap <= 1e-9 && eq.response_gap <= 1e-9);
        assert!(eq.bisection_gap <= 1e-10);
    }
}
