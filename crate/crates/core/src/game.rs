//! Bimatrix utilities, beliefs and the car's expected payoffs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Indifference tolerance on the car's payoff difference.
pub const PAYOFF_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CarAction {
    NoAlert,
    Alert,
}

impl CarAction {
    pub const ALL: [CarAction; 2] = [CarAction::NoAlert, CarAction::Alert];

    pub fn label(self) -> &'static str {
        match self {
            CarAction::NoAlert => "N",
            CarAction::Alert => "A",
        }
    }

    pub fn other(self) -> CarAction {
        match self {
            CarAction::NoAlert => CarAction::Alert,
            CarAction::Alert => CarAction::NoAlert,
        }
    }
}

impl fmt::Display for CarAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DriverAction {
    Continue,
    Stop,
}

impl DriverAction {
    pub fn label(self) -> &'static str {
        match self {
            DriverAction::Continue => "C",
            DriverAction::Stop => "S",
        }
    }
}

impl fmt::Display for DriverAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Car's pure best response.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarResponse {
    NoAlert,
    Alert,
    Indifferent,
}

impl CarResponse {
    /// Whether `action` is a (weak) best response.
    pub fn admits(self, action: CarAction) -> bool {
        match self {
            CarResponse::Indifferent => true,
            CarResponse::NoAlert => action == CarAction::NoAlert,
            CarResponse::Alert => action == CarAction::Alert,
        }
    }
}

/// The sixteen payoffs of the 2x2 game on a safe (`s`) and a dangerous (`d`)
/// road. Index 1 is the car, index 2 the driver; rows are N/A, columns C/S:
///
/// ```text
///        C            S
///   N  a1s, a2s    b1s, b2s
///   A  c1s, c2s    d1s, d2s
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityTable<T> {
    pub a1s: T,
    pub b1s: T,
    pub c1s: T,
    pub d1s: T,
    pub a1d: T,
    pub b1d: T,
    pub c1d: T,
    pub d1d: T,
    pub a2s: T,
    pub b2s: T,
    pub c2s: T,
    pub d2s: T,
    pub a2d: T,
    pub b2d: T,
    pub c2d: T,
    pub d2d: T,
}

/// Driver half of a [`UtilityTable`].
#[derive(Clone, Debug, PartialEq)]
pub struct DriverUtilities<T> {
    pub a2s: T,
    pub b2s: T,
    pub c2s: T,
    pub d2s: T,
    pub a2d: T,
    pub b2d: T,
    pub c2d: T,
    pub d2d: T,
}

impl<T: Scalar> DriverUtilities<T> {
    pub fn fields(&self) -> [(&'static str, &T); 8] {
        [
            ("a2s", &self.a2s),
            ("b2s", &self.b2s),
            ("c2s", &self.c2s),
            ("d2s", &self.d2s),
            ("a2d", &self.a2d),
            ("b2d", &self.b2d),
            ("c2d", &self.c2d),
            ("d2d", &self.d2d),
        ]
    }

    /// Every utility finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !v.is_finite_value() {
                return Err(Error::validation(name, "driver utility must be finite"));
            }
            if *v <= T::zero() {
                return Err(Error::validation(
                    name,
                    format!("driver utility must be strictly positive, got {v:?}"),
                ));
            }
        }
        Ok(())
    }
}

impl<T: Scalar> UtilityTable<T> {
    /// Default numerical example.
    pub fn baseline() -> Self {
        let v = |x: i64| T::from_ratio(x, 1);
        UtilityTable {
            a1s: v(85),
            b1s: v(75),
            c1s: v(40),
            d1s: v(50),
            a1d: v(25),
            b1d: v(30),
            c1d: v(75),
            d1d: v(85),
            a2s: v(85),
            b2s: v(50),
            c2s: v(85),
            d2s: v(50),
            a2d: v(25),
            b2d: v(60),
            c2d: v(25),
            d2d: v(85),
        }
    }

    pub fn fields(&self) -> [(&'static str, &T); 16] {
        [
            ("a1s", &self.a1s),
            ("b1s", &self.b1s),
            ("c1s", &self.c1s),
            ("d1s", &self.d1s),
            ("a1d", &self.a1d),
            ("b1d", &self.b1d),
            ("c1d", &self.c1d),
            ("d1d", &self.d1d),
            ("a2s", &self.a2s),
            ("b2s", &self.b2s),
            ("c2s", &self.c2s),
            ("d2s", &self.d2s),
            ("a2d", &self.a2d),
            ("b2d", &self.b2d),
            ("c2d", &self.c2d),
            ("d2d", &self.d2d),
        ]
    }

    /// All entries finite, driver utilities strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !v.is_finite_value() {
                return Err(Error::validation(name, "utility must be finite"));
            }
        }
        self.driver().validate()
    }

    pub fn driver(&self) -> DriverUtilities<T> {
        DriverUtilities {
            a2s: self.a2s.clone(),
            b2s: self.b2s.clone(),
            c2s: self.c2s.clone(),
            d2s: self.d2s.clone(),
            a2d: self.a2d.clone(),
            b2d: self.b2d.clone(),
            c2d: self.c2d.clone(),
            d2d: self.d2d.clone(),
        }
    }

    /// `scale * u + shift` applied to the eight car payoffs.
    pub fn with_car_affine(&self, scale: T, shift: T) -> Self {
        let f = |v: &T| scale.clone() * v.clone() + shift.clone();
        UtilityTable {
            a1s: f(&self.a1s),
            b1s: f(&self.b1s),
            c1s: f(&self.c1s),
            d1s: f(&self.d1s),
            a1d: f(&self.a1d),
            b1d: f(&self.b1d),
            c1d: f(&self.c1d),
            d1d: f(&self.d1d),
            ..self.clone()
        }
    }

    /// Car payoff for a pure profile, averaged over the road state with
    /// weight `q` on safe.
    fn car_payoff_pure(&self, action: CarAction, driver: DriverAction, q: &T) -> T {
        let (s, d) = match (action, driver) {
            (CarAction::NoAlert, DriverAction::Continue) => (&self.a1s, &self.a1d),
            (CarAction::NoAlert, DriverAction::Stop) => (&self.b1s, &self.b1d),
            (CarAction::Alert, DriverAction::Continue) => (&self.c1s, &self.c1d),
            (CarAction::Alert, DriverAction::Stop) => (&self.d1s, &self.d1d),
        };
        q.clone() * s.clone() + (T::one() - q.clone()) * d.clone()
    }
}

/// Car's prior that the road is safe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarBelief<T> {
    q: T,
}

impl<T: Scalar + Copy> CarBelief<T> {
    pub fn new(q: T) -> Result<Self> {
        check_unit("q", &q)?;
        Ok(CarBelief { q })
    }

    pub fn q(&self) -> T {
        self.q
    }
}

pub(crate) fn check_unit<T: Scalar>(field: &str, v: &T) -> Result<()> {
    if !v.is_finite_value() || *v < T::zero() || *v > T::one() {
        return Err(Error::validation(field, format!("{v:?} is outside [0, 1]")));
    }
    Ok(())
}

/// Expected car payoff of `action` when the driver continues with
/// probability `p_c`:
/// `U = p_C [x_s q + x_d (1−q)] + (1−p_C) [y_s q + y_d (1−q)]`.
pub fn car_expected_utility<T: Scalar>(
    action: CarAction,
    p_c: T,
    q: T,
    u: &UtilityTable<T>,
) -> Result<T> {
    check_unit("p_c", &p_c)?;
    check_unit("q", &q)?;
    let cont = u.car_payoff_pure(action, DriverAction::Continue, &q);
    let stop = u.car_payoff_pure(action, DriverAction::Stop, &q);
    Ok(p_c.clone() * cont + (T::one() - p_c) * stop)
}

/// Strictly better action, or `Indifferent` within [`PAYOFF_TOL`].
pub fn best_response_car<T: Real>(p_c: T, q: T, u: &UtilityTable<T>) -> Result<CarResponse> {
    let n = car_expected_utility(CarAction::NoAlert, p_c, q, u)?;
    let a = car_expected_utility(CarAction::Alert, p_c, q, u)?;
    Ok(compare_payoffs(n, a))
}

pub(crate) fn compare_payoffs<T: Real>(n: T, a: T) -> CarResponse {
    if (n - a).abs() <= T::tol(PAYOFF_TOL) {
        CarResponse::Indifferent
    } else if n > a {
        CarResponse::NoAlert
    } else {
        CarResponse::Alert
    }
}

/// Benchmark car that ignores the driver: alert iff `q < 0.5`.
pub fn agnostic_response_car<T: Scalar>(q: T) -> Result<CarAction> {
    check_unit("q", &q)?;
    Ok(if q < T::half() {
        CarAction::Alert
    } else {
        CarAction::NoAlert
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t3() -> UtilityTable<f64> {
        UtilityTable::baseline()
    }

    #[test]
    fn expected_utility_corners() {
        let u = t3();
        assert_eq!(
            car_expected_utility(CarAction::NoAlert, 1.0, 1.0, &u).unwrap(),
            85.0
        );
        assert_eq!(
            car_expected_utility(CarAction::Alert, 0.0, 0.0, &u).unwrap(),
            85.0
        );
        let mid = car_expected_utility(CarAction::NoAlert, 0.5, 0.5, &u).unwrap();
        assert!((mid - 53.75).abs() < 1e-12);
    }

    #[test]
    fn expected_utility_rejects_out_of_range() {
        let u = t3();
        assert!(car_expected_utility(CarAction::NoAlert, 1.5, 0.5, &u).is_err());
        assert!(car_expected_utility(CarAction::NoAlert, 0.5, -0.1, &u).is_err());
    }

    #[test]
    fn best_responses() {
        let u = t3();
        assert_eq!(
            best_response_car(1.0, 1.0, &u).unwrap(),
            CarResponse::NoAlert
        );
        assert_eq!(best_response_car(0.0, 0.0, &u).unwrap(), CarResponse::Alert);
        assert_eq!(
            best_response_car(0.5, 0.6, &u).unwrap(),
            CarResponse::Indifferent
        );
    }

    #[test]
    fn agnostic_rule() {
        assert_eq!(agnostic_response_car(0.3).unwrap(), CarAction::Alert);
        assert_eq!(agnostic_response_car(0.5).unwrap(), CarAction::NoAlert);
        assert_eq!(agnostic_response_car(0.9).unwrap(), CarAction::NoAlert);
        assert!(agnostic_response_car(1.1).is_err());
    }

    #[test]
    fn validation_names_field() {
        let mut u = t3();
        u.b2d = 0.0;
        match u.validate() {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "b2d"),
            other => panic!("unexpected {other:?}"),
        }
        u.b2d = 60.0;
        u.c1s = f64::NAN;
        assert!(u.validate().is_err());
        assert!(t3().validate().is_ok());
    }

    #[test]
    fn exact_payoffs() {
        use num_rational::BigRational;
        let u = UtilityTable::<BigRational>::baseline();
        let q = BigRational::from_ratio(3, 5);
        let pc = BigRational::from_ratio(1, 2);
        let n = car_expected_utility(CarAction::NoAlert, pc.clone(), q.clone(), &u).unwrap();
        let a = car_expected_utility(CarAction::Alert, pc, q, &u).unwrap();
        assert_eq!(n, a);
    }

    #[test]
    fn deserializes_and_rejects_unknown_fields() {
        let src = "a1s=85\nb1s=75\nc1s=40\nd1s=50\na1d=25\nb1d=30\nc1d=75\nd1d=85\n\
                   a2s=85\nb2s=50\nc2s=85\nd2s=50\na2d=25\nb2d=60\nc2d=25\nd2d=85\n";
        let u: UtilityTable<f64> = toml::from_str(src).unwrap();
        assert_eq!(u, t3());
        let err = toml::from_str::<UtilityTable<f64>>(&format!("{src}e1s=1\n"));
        assert!(err.is_err());
        let missing = toml::from_str::<UtilityTable<f64>>("a1s=1\n").unwrap_err();
        assert!(missing.to_string().contains("b1s"));
    }
}
