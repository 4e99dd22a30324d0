use rayon::prelude::*;

use super::config::{Mode, SweepConfig};
use crate::equilibrium::{
    mixed_pc_star, pc_star_pole, steady_state_line, Game, MixedEquilibrium, PureEquilibriumSet,
};
use crate::error::{Error, Result};
use crate::game::UtilityTable;

/// Cells over the belief plane, row-major: one row per driver prior `p`,
/// one column per car prior `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid<C> {
    p_axis: Vec<f64>,
    q_axis: Vec<f64>,
    cells: Vec<C>,
}

impl<C> PhaseGrid<C> {
    pub fn new(p_axis: Vec<f64>, q_axis: Vec<f64>, cells: Vec<C>) -> Result<Self> {
        if cells.len() != p_axis.len() * q_axis.len() {
            return Err(Error::Dimension {
                expected: format!("{} cells", p_axis.len() * q_axis.len()),
                found: format!("{}", cells.len()),
            });
        }
        Ok(PhaseGrid {
            p_axis,
            q_axis,
            cells,
        })
    }

    /// Evaluates `f` at every `(p, q)`, in parallel, keeping row-major order.
    pub fn build<F>(p_axis: Vec<f64>, q_axis: Vec<f64>, f: F) -> Result<Self>
    where
        C: Send,
        F: Fn(usize, usize) -> Result<C> + Sync,
    {
        let nq = q_axis.len();
        let cells = (0..p_axis.len() * nq)
            .into_par_iter()
            .map(|k| f(k / nq, k % nq))
            .collect::<Result<Vec<C>>>()?;
        Self::new(p_axis, q_axis, cells)
    }

    pub fn p_axis(&self) -> &[f64] {
        &self.p_axis
    }

    pub fn q_axis(&self) -> &[f64] {
        &self.q_axis
    }

    pub fn cells(&self) -> &[C] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell at row `i` (p) and column `j` (q).
    pub fn cell(&self, i: usize, j: usize) -> &C {
        &self.cells[i * self.q_axis.len() + j]
    }

    pub fn row(&self, i: usize) -> &[C] {
        let nq = self.q_axis.len();
        &self.cells[i * nq..(i + 1) * nq]
    }

    /// `((p, q), cell)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((f64, f64), &C)> + '_ {
        let nq = self.q_axis.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, c)| ((self.p_axis[k / nq], self.q_axis[k % nq]), c))
    }

    /// Index of the cell nearest to `(p, q)`.
    pub fn nearest(&self, p: f64, q: f64) -> (usize, usize) {
        let near = |axis: &[f64], v: f64| {
            axis.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0)
        };
        (near(&self.p_axis, p), near(&self.q_axis, q))
    }
}

pub type PureGrid = PhaseGrid<PureEquilibriumSet<f64>>;
pub type MixedGrid = PhaseGrid<MixedCell>;

fn game(config: &SweepConfig) -> Result<Game<f64>> {
    config.validate()?;
    Game::new(config.utilities.clone(), config.params()?)
}

/// Pure equilibria at every grid cell, or the driver-agnostic benchmark when
/// `config.mode` is [`Mode::Agnostic`].
pub fn run_pure_sweep(config: &SweepConfig) -> Result<PureGrid> {
    let g = game(config)?;
    let axis = config.axis();
    let agnostic = config.mode == Mode::Agnostic;
    PhaseGrid::build(axis.clone(), axis.clone(), |i, j| {
        if agnostic {
            g.agnostic_outcome(axis[i], axis[j])
        } else {
            g.pure_equilibria(axis[i], axis[j])
        }
    })
}

/// Mixed-sweep cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedCell {
    /// Indifference point at the grid `q`, if inside [0, 1].
    pub grid_pc_star: Option<f64>,
    pub equilibrium: Option<MixedEquilibrium<f64>>,
    /// Car prior at which the equilibrium was solved.
    pub witness_q: Option<f64>,
    /// Witness differs from the grid `q`.
    pub shifted: bool,
    /// Solved at the grid point only (footprint not usable).
    pub point_sampled: bool,
    /// `alpha = 0`: no steady state.
    pub no_dynamics: bool,
}

impl MixedCell {
    pub fn exists(&self) -> bool {
        self.equilibrium.is_some()
    }

    /// `p_C*` reported for the cell: the equilibrium's value when one exists.
    pub fn pc_star(&self) -> Option<f64> {
        self.equilibrium.map(|e| e.pc_star).or(self.grid_pc_star)
    }
}

/// Mixed equilibria over the belief plane.
///
/// Each cell covers the car priors `[q − step/2, q + step/2] ∩ [0, 1]`. The
/// driver at prior `p` can only produce `p_C` in the segment between its
/// responses to `p_A = 0` and `p_A = 1`; the cell holds an equilibrium when
/// the car's indifference curve maps some `q` of its span into that segment.
/// The witness is the admissible `q` closest to the grid value.
pub fn run_mixed_sweep(config: &SweepConfig) -> Result<MixedGrid> {
    let g = game(config)?;
    let axis = config.axis();
    let half = config.grid_step / 2.0;
    let pole = pc_star_pole(g.utilities());
    PhaseGrid::build(axis.clone(), axis.clone(), |i, j| {
        mixed_cell(&g, pole, axis[i], axis[j], half)
    })
}

fn mixed_cell(g: &Game<f64>, pole: Option<f64>, p: f64, q: f64, half: f64) -> Result<MixedCell> {
    let grid_pc_star = match mixed_pc_star(q, g.utilities()) {
        Ok(v) => v,
        Err(Error::NoIndifference(_)) => None,
        Err(e) => return Err(e),
    };
    let mut cell = MixedCell {
        grid_pc_star,
        equilibrium: None,
        witness_q: None,
        shifted: false,
        point_sampled: false,
        no_dynamics: false,
    };
    let (k0, k1) = match steady_state_line(g.driver(), p) {
        Ok(v) => v,
        Err(Error::DegenerateDynamics(_)) => {
            cell.no_dynamics = true;
            return Ok(cell);
        }
        Err(e) => return Err(e),
    };
    let lo = k0.min(k0 + k1).max(0.0);
    let hi = k0.max(k0 + k1).min(1.0);
    let straddles_pole = pole.is_some_and(|x| lo < x && x < hi);
    let witness = if lo > hi {
        None
    } else if straddles_pole {
        cell.point_sampled = true;
        Some(q)
    } else {
        footprint_witness(g.utilities(), lo, hi, q, half)
    };
    let Some(w) = witness else {
        return Ok(cell);
    };
    let eq = match g.mixed_equilibrium(p, w) {
        Ok(v) => v,
        Err(Error::NoIndifference(_)) => None,
        Err(e) => return Err(e),
    };
    if eq.is_some() {
        cell.equilibrium = eq;
        cell.witness_q = Some(w);
        cell.shifted = w != q;
    }
    Ok(cell)
}

/// `q` of the footprint closest to `q0` whose indifference point lies in
/// `[lo, hi]`.
fn footprint_witness(u: &UtilityTable<f64>, lo: f64, hi: f64, q0: f64, half: f64) -> Option<f64> {
    let qa = inverse_raw(u, lo)?;
    let qb = inverse_raw(u, hi)?;
    let (qmin, qmax) = (qa.min(qb), qa.max(qb));
    let from = (q0 - half).max(0.0).max(qmin);
    let to = (q0 + half).min(1.0).min(qmax);
    (from <= to).then(|| q0.clamp(from, to))
}

fn inverse_raw(u: &UtilityTable<f64>, pc: f64) -> Option<f64> {
    let ds = u.b1s - u.d1s;
    let dd = u.b1d - u.d1d;
    let es = ds + u.c1s - u.a1s;
    let ed = dd + u.c1d - u.a1d;
    let den = pc * (es - ed) - ds + dd;
    if den == 0.0 {
        return None;
    }
    let q = (dd - pc * ed) / den;
    q.is_finite().then_some(q)
}

/// Mixed equilibria at the grid points themselves, without footprints.
pub fn run_mixed_point_sweep(
    config: &SweepConfig,
) -> Result<PhaseGrid<Option<MixedEquilibrium<f64>>>> {
    let g = game(config)?;
    let axis = config.axis();
    PhaseGrid::build(axis.clone(), axis.clone(), |i, j| {
        match g.mixed_equilibrium(axis[i], axis[j]) {
            Err(Error::DegenerateDynamics(_)) | Err(Error::NoIndifference(_)) => Ok(None),
            other => other,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{CarAction, DriverAction};

    fn cfg(alpha: f64, lambda: f64, step: f64) -> SweepConfig {
        SweepConfig {
            alpha,
            lambda,
            grid_step: step,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn grid_shape_and_order() {
        let grid = run_pure_sweep(&cfg(0.2, 10.0, 0.1)).unwrap();
        assert_eq!(grid.len(), 121);
        let cells: Vec<_> = grid.iter().map(|(pq, _)| pq).collect();
        assert_eq!(cells[1], (0.0, 0.1));
        assert_eq!(cells[11], (0.1, 0.0));
        let (i, j) = grid.nearest(0.9, 0.9);
        assert!(grid
            .cell(i, j)
            .contains(CarAction::NoAlert, DriverAction::Continue));
        assert_eq!(grid.row(3).len(), 11);
    }

    #[test]
    fn sweep_equals_sequential_evaluation() {
        let c = cfg(0.8, 3.0, 0.05);
        let grid = run_pure_sweep(&c).unwrap();
        let g = Game::new(c.utilities.clone(), c.params().unwrap()).unwrap();
        for ((p, q), cell) in grid.iter() {
            assert_eq!(cell, &g.pure_equilibria(p, q).unwrap());
        }
    }

    #[test]
    fn agnostic_mode_uses_benchmark() {
        let mut c = cfg(0.2, 10.0, 0.1);
        c.mode = Mode::Agnostic;
        let grid = run_pure_sweep(&c).unwrap();
        for ((_, q), cell) in grid.iter() {
            assert_eq!(cell.len(), 1);
            let expected = if q < 0.5 {
                CarAction::Alert
            } else {
                CarAction::NoAlert
            };
            assert_eq!(cell.profiles[0].car, expected);
        }
    }

    #[test]
    fn mixed_cells_outside_feasible_q_are_absent() {
        let grid = run_mixed_sweep(&cfg(0.8, 10.0, 0.02)).unwrap();
        for ((_, q), cell) in grid.iter() {
            if !(10.0 / 19.0 - 0.011..=11.0 / 16.0 + 0.011).contains(&q) {
                assert!(!cell.exists(), "q = {q}");
            }
            if let Some(w) = cell.witness_q {
                assert!((w - q).abs() <= 0.01 + 1e-12);
            }
        }
        assert!(grid.cells().iter().any(MixedCell::exists));
    }

    #[test]
    fn build_checks_shape() {
        assert!(PhaseGrid::new(vec![0.0, 1.0], vec![0.0], vec![1, 2, 3]).is_err());
    }
}
