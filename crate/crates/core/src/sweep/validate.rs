use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::config::SweepConfig;
use crate::cognition::{
    build_cognition_matrix, build_luce_rates, build_luce_rates_exact, initial_state_mixed,
    pr_continue_closed_form, pr_continue_from_state, steady_state_pr_continue, DriverBelief,
    LuceRates,
};
use crate::engine::{
    build_generator, build_lambda, build_phi, generator_brute_force, hamiltonian,
    lambda_closed_form, phi_closed_form, vec_l_brute_force, vec_l_closed_form,
    vectorize_hamiltonian, vectorized_hamiltonian_closed_form, MasterEquation, Propagator, DIM,
    RK4_STEP,
};
use crate::error::{Error, Result};
use crate::game::UtilityTable;
use crate::matrix::ComplexMatrix;
use crate::scalar::{decimal_from_f64, Scalar};

type Q = BigRational;

/// One named check with its worst observed deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} max_dev={:<12.3e} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.detail
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Test hook: adds `1/100` to one entry of a generator block before the
/// structure comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultInjection {
    /// Block `A_i`, 1..=4.
    pub block: usize,
    /// 0-based position inside the 16x16 block.
    pub row: usize,
    pub col: usize,
}

impl FaultInjection {
    pub fn new(block: usize, row: usize, col: usize) -> Result<Self> {
        if !(1..=4).contains(&block) || row >= 16 || col >= 16 {
            return Err(Error::Argument(format!(
                "fault position (block {block}, {row}, {col}) outside four 16x16 blocks"
            )));
        }
        Ok(FaultInjection { block, row, col })
    }
}

fn exact_table(u: &UtilityTable<f64>) -> Result<UtilityTable<Q>> {
    let e = |name: &str, v: f64| {
        decimal_from_f64(v).ok_or_else(|| Error::validation(name, "utility must be finite"))
    };
    Ok(UtilityTable {
        a1s: e("a1s", u.a1s)?,
        b1s: e("b1s", u.b1s)?,
        c1s: e("c1s", u.c1s)?,
        d1s: e("d1s", u.d1s)?,
        a1d: e("a1d", u.a1d)?,
        b1d: e("b1d", u.b1d)?,
        c1d: e("c1d", u.c1d)?,
        d1d: e("d1d", u.d1d)?,
        a2s: e("a2s", u.a2s)?,
        b2s: e("b2s", u.b2s)?,
        c2s: e("c2s", u.c2s)?,
        d2s: e("d2s", u.d2s)?,
        a2d: e("a2d", u.a2d)?,
        b2d: e("b2d", u.b2d)?,
        c2d: e("c2d", u.c2d)?,
        d2d: e("d2d", u.d2d)?,
    })
}

fn exact_deviation(a: &ComplexMatrix<Q>, b: &ComplexMatrix<Q>) -> (f64, Option<(usize, usize)>) {
    let mut worst = Q::zero();
    let mut first = None;
    for ((r, c), x) in a.indexed() {
        let y = &b[(r, c)];
        if x != y {
            first.get_or_insert((r, c));
            let d = (x.re.clone() - y.re.clone()).abs() + (x.im.clone() - y.im.clone()).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    (worst.to_f64().unwrap_or(f64::INFINITY), first)
}

fn check(name: &str, max_deviation: f64, passed: bool, detail: String) -> ValidationCheck {
    ValidationCheck {
        name: name.into(),
        passed,
        max_deviation,
        detail,
    }
}

fn exact_check(
    name: &str,
    cases: impl Iterator<Item = Result<(String, ComplexMatrix<Q>, ComplexMatrix<Q>)>>,
) -> Result<ValidationCheck> {
    let mut worst = 0.0f64;
    let mut total = 0;
    let mut bad = Vec::new();
    for case in cases {
        let (label, closed, brute) = case?;
        total += 1;
        let (dev, first) = exact_deviation(&closed, &brute);
        worst = worst.max(dev);
        if let Some((r, c)) = first {
            let block = if r / 16 == c / 16 {
                format!(" in block A_{}", r / 16 + 1)
            } else {
                String::new()
            };
            bad.push(format!("{label}: entry ({}, {}){block}", r + 1, c + 1));
        }
    }
    let detail = if bad.is_empty() {
        format!("{total} cases equal")
    } else {
        format!("{} of {total} differ; first mismatch {}", bad.len(), bad[0])
    };
    Ok(check(name, worst, bad.is_empty(), detail))
}

/// Integer discrimination values used by the exact checks.
fn exact_lambdas(config: &SweepConfig) -> Vec<u32> {
    let mut out = vec![0, 1, 3, 10];
    let l = config.lambda;
    if l.fract() == 0.0 && (0.0..=64.0).contains(&l) && !out.contains(&(l as u32)) {
        out.push(l as u32);
    }
    out
}

fn exact_alphas(config: &SweepConfig) -> Vec<Q> {
    let mut out: Vec<Q> = [(0, 1), (1, 5), (1, 2), (4, 5), (1, 1)]
        .iter()
        .map(|&(n, d)| Q::from_ratio(n, d))
        .collect();
    if let Some(a) = decimal_from_f64(config.alpha) {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

fn structure_checks(
    config: &SweepConfig,
    fault: Option<FaultInjection>,
) -> Result<Vec<ValidationCheck>> {
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> = (1..=DIM)
        .flat_map(|m| (1..=DIM).map(move |n| (m, n)))
        .collect();
    out.push(exact_check(
        "lambda_closed_form",
        pairs.iter().map(|&(m, n)| {
            Ok((
                format!("({m},{n})"),
                lambda_closed_form::<Q>(m, n)?,
                build_lambda::<Q>(m, n)?,
            ))
        }),
    )?);
    out.push(exact_check(
        "phi_closed_form",
        pairs.iter().map(|&(m, n)| {
            Ok((
                format!("({m},{n})"),
                phi_closed_form::<Q>(n)?,
                build_phi::<Q>(m, n)?,
            ))
        }),
    )?);
    out.push(exact_check(
        "vec_h_closed_form",
        std::iter::once(Ok((
            "H".to_string(),
            vectorized_hamiltonian_closed_form::<Q>(),
            vectorize_hamiltonian(&hamiltonian::<Q>())?,
        ))),
    )?);

    let table = exact_table(&config.utilities)?;
    let driver = table.driver();
    let lambdas = exact_lambdas(config);
    let rates: Vec<(u32, LuceRates<Q>)> = lambdas
        .iter()
        .map(|&l| Ok((l, build_luce_rates_exact(&driver, l)?)))
        .collect::<Result<_>>()?;
    out.push(exact_check(
        "vec_l_closed_form",
        rates.iter().map(|(l, r)| {
            let c = build_cognition_matrix(r).into_matrix();
            Ok((
                format!("lambda={l}"),
                vec_l_closed_form(&c)?,
                vec_l_brute_force(&c)?,
            ))
        }),
    )?);

    let alphas = exact_alphas(config);
    let fault_target = (
        decimal_from_f64(config.alpha).unwrap_or_else(|| Q::from_ratio(1, 5)),
        lambdas[lambdas.len() - 1],
    );
    let mut cases = Vec::new();
    for a in &alphas {
        for (l, r) in &rates {
            let c = build_cognition_matrix(r).into_matrix();
            let mut closed = build_generator(a.clone(), &c)?;
            if let Some(f) = fault {
                if (a, *l) == (&fault_target.0, fault_target.1) {
                    let base = 16 * (f.block - 1);
                    closed = closed.perturbed(
                        base + f.row,
                        base + f.col,
                        Complex::new(Q::from_ratio(1, 100), Q::zero()),
                    );
                }
            }
            let brute = generator_brute_force(a.clone(), &c)?;
            let block_diag = closed.is_block_diagonal();
            cases.push(Ok((
                format!(
                    "alpha={a} lambda={l}{}",
                    if block_diag {
                        ""
                    } else {
                        " (not block-diagonal)"
                    }
                ),
                closed.into_entries(),
                brute.into_entries(),
            )));
        }
    }
    out.push(exact_check("generator_closed_form", cases.into_iter())?);
    Ok(out)
}

const P_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const PA_GRID: [f64; 3] = [0.0, 0.5, 1.0];
const T_GRID: [f64; 5] = [0.0, 0.5, 2.0, 10.0, 50.0];

fn dynamics_checks(config: &SweepConfig) -> Result<Vec<ValidationCheck>> {
    let params = config.params()?;
    let rates = build_luce_rates(&config.utilities.driver(), config.lambda)?;
    let c = build_cognition_matrix(&rates).into_matrix();
    let g = build_generator(config.alpha, &c)?;
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    let mut trace_dev = 0.0f64;
    let mut herm_dev = 0.0f64;
    let mut min_pop = f64::INFINITY;
    for &t in &T_GRID {
        let prop = Propagator::new(&g, t)?;
        for &p in &P_GRID {
            for &pa in &PA_GRID {
                let rho0 = initial_state_mixed(DriverBelief::new(p)?, pa)?;
                let rho = prop.apply(&rho0)?;
                let numeric = pr_continue_from_state(&rho)?;
                let closed = pr_continue_closed_form(&params, &rates, p, pa, t)?;
                worst = worst.max((numeric - closed).abs());
                trace_dev = trace_dev.max((rho.trace() - Complex::new(1.0, 0.0)).norm());
                herm_dev = herm_dev.max(rho.hermiticity_defect());
                min_pop = rho.populations().into_iter().fold(min_pop, f64::min);
            }
        }
    }
    out.push(check(
        "closed_form_vs_expm",
        worst,
        worst <= 1e-8,
        format!(
            "{} points, tolerance 1e-8",
            T_GRID.len() * P_GRID.len() * PA_GRID.len()
        ),
    ));
    out.push(check(
        "trace_hermiticity",
        trace_dev.max(herm_dev),
        trace_dev <= 1e-10 && herm_dev <= 1e-10 && min_pop >= -1e-9,
        format!("trace {trace_dev:.1e}, hermiticity {herm_dev:.1e}, min population {min_pop:.1e}"),
    ));

    let eq = MasterEquation::new(config.alpha, &c)?;
    let times = [0.5, 2.0, 10.0];
    let mut rk_worst = 0.0f64;
    for &(p, pa) in &[(0.0, 0.0), (0.25, 1.0), (0.75, 0.5), (1.0, 0.0)] {
        let rho0 = initial_state_mixed(DriverBelief::new(p)?, pa)?;
        for (t, rho) in times
            .iter()
            .zip(eq.integrate_checkpoints(&rho0, &times, RK4_STEP)?)
        {
            let closed = pr_continue_closed_form(&params, &rates, p, pa, *t)?;
            rk_worst = rk_worst.max((pr_continue_from_state(&rho)? - closed).abs());
        }
    }
    out.push(check(
        "master_equation_rk4",
        rk_worst,
        rk_worst <= 1e-6,
        format!("direct integration, step {RK4_STEP}, tolerance 1e-6"),
    ));

    let mut zero_dev = 0.0f64;
    for &p in &P_GRID {
        for &pa in &PA_GRID {
            zero_dev =
                zero_dev.max((pr_continue_closed_form(&params, &rates, p, pa, 0.0)? - 0.5).abs());
        }
    }
    out.push(check(
        "initial_probability_half",
        zero_dev,
        zero_dev <= 1e-12,
        "Pr(C) at t = 0".into(),
    ));

    if config.alpha > 0.0 {
        let flat = LuceRates::<f64>::uniform();
        let mut flat_dev = 0.0f64;
        let mut affine_dev = 0.0f64;
        for &p in &P_GRID {
            for &pa in &PA_GRID {
                flat_dev =
                    flat_dev.max((steady_state_pr_continue(&params, &flat, p, pa)? - 0.5).abs());
            }
            let ss = |pa: f64| steady_state_pr_continue(&params, &rates, p, pa);
            affine_dev = affine_dev.max((ss(0.5)? - 0.5 * (ss(0.0)? + ss(1.0)?)).abs());
        }
        for &pa in &PA_GRID {
            let ss = |p: f64| steady_state_pr_continue(&params, &rates, p, pa);
            affine_dev = affine_dev.max((ss(0.5)? - 0.5 * (ss(0.0)? + ss(1.0)?)).abs());
        }
        out.push(check(
            "steady_state_identities",
            flat_dev.max(affine_dev),
            flat_dev <= 1e-12 && affine_dev <= 1e-12,
            format!(
                "lambda = 0 gives 1/2 ({flat_dev:.1e}); affine in p and p_A ({affine_dev:.1e})"
            ),
        ));
    } else {
        out.push(check(
            "steady_state_identities",
            0.0,
            true,
            "skipped: alpha = 0 has no steady state".into(),
        ));
    }
    Ok(out)
}

/// Runs the structure and dynamics cross-checks for a configuration.
///
/// Invalid configurations are returned as errors; failing checks are
/// reported in the returned report.
pub fn run_validate(
    config: &SweepConfig,
    fault: Option<FaultInjection>,
) -> Result<ValidationReport> {
    config.validate()?;
    let mut checks = structure_checks(config, fault)?;
    checks.extend(dynamics_checks(config)?);
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_position_is_checked() {
        assert!(FaultInjection::new(0, 0, 0).is_err());
        assert!(FaultInjection::new(2, 16, 0).is_err());
        assert!(FaultInjection::new(4, 15, 15).is_ok());
    }

    #[test]
    fn exact_table_round_trips() {
        let t = exact_table(&UtilityTable::baseline()).unwrap();
        assert_eq!(t, UtilityTable::<Q>::baseline());
    }

    #[test]
    fn lambda_list_includes_integer_config_value() {
        let cfg = SweepConfig {
            lambda: 5.0,
            ..SweepConfig::default()
        };
        assert_eq!(exact_lambdas(&cfg), vec![0, 1, 3, 10, 5]);
        let cfg = SweepConfig {
            lambda: 2.5,
            ..SweepConfig::default()
        };
        assert_eq!(exact_lambdas(&cfg), vec![0, 1, 3, 10]);
    }
}
