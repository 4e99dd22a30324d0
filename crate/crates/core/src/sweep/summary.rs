use std::collections::BTreeSet;

use super::grid::{MixedGrid, PureGrid};
use crate::equilibrium::PureEquilibriumSet;
use crate::error::{Error, Result};
use crate::game::{CarAction, DriverAction};

/// Equilibrium type of a pure-sweep cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    NoAlertContinue,
    NoAlertStop,
    AlertContinue,
    AlertStop,
    Two,
    None,
    /// `alpha = 0`, no steady state.
    Undefined,
}

impl CellKind {
    pub const ALL: [CellKind; 7] = [
        CellKind::NoAlertContinue,
        CellKind::NoAlertStop,
        CellKind::AlertContinue,
        CellKind::AlertStop,
        CellKind::Two,
        CellKind::None,
        CellKind::Undefined,
    ];

    pub fn of(cell: &PureEquilibriumSet<f64>) -> CellKind {
        if cell.degenerate_dynamics {
            return CellKind::Undefined;
        }
        match cell.profiles.as_slice() {
            [] => CellKind::None,
            [one] => match (one.car, one.driver) {
                (CarAction::NoAlert, DriverAction::Continue) => CellKind::NoAlertContinue,
                (CarAction::NoAlert, DriverAction::Stop) => CellKind::NoAlertStop,
                (CarAction::Alert, DriverAction::Continue) => CellKind::AlertContinue,
                (CarAction::Alert, DriverAction::Stop) => CellKind::AlertStop,
            },
            _ => CellKind::Two,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CellKind::NoAlertContinue => "NC",
            CellKind::NoAlertStop => "NS",
            CellKind::AlertContinue => "AC",
            CellKind::AlertStop => "AS",
            CellKind::Two => "two",
            CellKind::None => "none",
            CellKind::Undefined => "undefined",
        }
    }
}

/// Car-action border along one `p` row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowBorder {
    pub p: f64,
    /// First grid `q` whose (single) car action differs from the one before.
    pub flip_q: Option<f64>,
    /// Midpoint between that `q` and the previous cell with a single action.
    pub midpoint: Option<f64>,
    pub from: Option<CarAction>,
    pub to: Option<CarAction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureSummary {
    pub cells: usize,
    pub cells_with_equilibrium: usize,
    /// Mean over cells with equilibria of the share of their profiles in
    /// which the driver stops.
    pub stop_fraction: f64,
    /// Same, restricted to profiles in which the car alerts.
    pub stop_fraction_given_alert: Option<f64>,
    /// Share of cells whose profiles include at least one stop.
    pub any_stop_fraction: f64,
    pub borders: Vec<RowBorder>,
    /// `(kind, count, fraction of all cells)`.
    pub areas: Vec<(CellKind, usize, f64)>,
    /// Profile pairs occurring in two-equilibrium cells.
    pub two_equilibrium_pairs: BTreeSet<String>,
}

impl PureSummary {
    pub fn area(&self, kind: CellKind) -> f64 {
        self.areas
            .iter()
            .find(|(k, _, _)| *k == kind)
            .map(|(_, _, f)| *f)
            .unwrap_or(0.0)
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.areas
            .iter()
            .find(|(k, _, _)| *k == kind)
            .map(|(_, n, _)| *n)
            .unwrap_or(0)
    }
}

/// Aggregate statistics of a pure (or agnostic) sweep.
pub fn summarize(grid: &PureGrid) -> Result<PureSummary> {
    if grid.is_empty() {
        return Err(Error::Argument("cannot summarize an empty grid".into()));
    }
    let mut with_eq = 0usize;
    let mut stop_sum = 0.0;
    let mut any_stop = 0usize;
    let mut alert_cells = 0usize;
    let mut alert_stop = 0.0;
    let mut counts = vec![0usize; CellKind::ALL.len()];
    let mut pairs = BTreeSet::new();
    for cell in grid.cells() {
        let kind = CellKind::of(cell);
        counts[CellKind::ALL
            .iter()
            .position(|k| *k == kind)
            .expect("known kind")] += 1;
        if kind == CellKind::Two {
            let sig: Vec<String> = cell
                .profiles
                .iter()
                .map(|p| format!("({},{})", p.car, p.driver))
                .collect();
            pairs.insert(sig.join("+"));
        }
        if cell.is_empty() {
            continue;
        }
        with_eq += 1;
        let stops = cell
            .profiles
            .iter()
            .filter(|p| p.driver == DriverAction::Stop)
            .count();
        stop_sum += stops as f64 / cell.len() as f64;
        if stops > 0 {
            any_stop += 1;
        }
        let alerts: Vec<_> = cell
            .profiles
            .iter()
            .filter(|p| p.car == CarAction::Alert)
            .collect();
        if !alerts.is_empty() {
            alert_cells += 1;
            let s = alerts
                .iter()
                .filter(|p| p.driver == DriverAction::Stop)
                .count();
            alert_stop += s as f64 / alerts.len() as f64;
        }
    }
    let total = grid.len() as f64;
    let borders = (0..grid.p_axis().len())
        .map(|i| row_border(grid, i))
        .collect();
    Ok(PureSummary {
        cells: grid.len(),
        cells_with_equilibrium: with_eq,
        stop_fraction: if with_eq == 0 {
            0.0
        } else {
            stop_sum / with_eq as f64
        },
        stop_fraction_given_alert: (alert_cells > 0).then(|| alert_stop / alert_cells as f64),
        any_stop_fraction: if with_eq == 0 {
            0.0
        } else {
            any_stop as f64 / with_eq as f64
        },
        borders,
        areas: CellKind::ALL
            .iter()
            .zip(&counts)
            .map(|(k, n)| (*k, *n, *n as f64 / total))
            .collect(),
        two_equilibrium_pairs: pairs,
    })
}

fn row_border(grid: &PureGrid, i: usize) -> RowBorder {
    let q = grid.q_axis();
    let mut last: Option<(f64, CarAction)> = None;
    for (j, cell) in grid.row(i).iter().enumerate() {
        let [only] = cell.profiles.as_slice() else {
            continue;
        };
        match last {
            Some((q_prev, action)) if action != only.car => {
                return RowBorder {
                    p: grid.p_axis()[i],
                    flip_q: Some(q[j]),
                    midpoint: Some(0.5 * (q_prev + q[j])),
                    from: Some(action),
                    to: Some(only.car),
                };
            }
            _ => last = Some((q[j], only.car)),
        }
    }
    RowBorder {
        p: grid.p_axis()[i],
        flip_q: None,
        midpoint: None,
        from: last.map(|(_, a)| a),
        to: None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedSummary {
    pub cells: usize,
    pub existing: usize,
    /// Rows (`p` values) holding at least one equilibrium.
    pub rows_covered: usize,
    pub rows: usize,
    /// `max − min` of `p_C*` over existing cells.
    pub pc_spread: Option<f64>,
    /// Connected components of existing cells (8-neighbour adjacency).
    pub components: usize,
    pub any_pa_cells: usize,
    pub max_indifference_gap: f64,
    pub max_response_gap: f64,
    pub max_bisection_gap: f64,
}

impl MixedSummary {
    pub fn connected(&self) -> bool {
        self.components == 1
    }

    pub fn every_row_covered(&self) -> bool {
        self.rows_covered == self.rows
    }
}

pub fn summarize_mixed(grid: &MixedGrid) -> Result<MixedSummary> {
    if grid.is_empty() {
        return Err(Error::Argument("cannot summarize an empty grid".into()));
    }
    let (np, nq) = (grid.p_axis().len(), grid.q_axis().len());
    let exists = |i: usize, j: usize| grid.cell(i, j).exists();
    let mut rows_covered = 0;
    for i in 0..np {
        if (0..nq).any(|j| exists(i, j)) {
            rows_covered += 1;
        }
    }
    let eqs: Vec<_> = grid.cells().iter().filter_map(|c| c.equilibrium).collect();
    let pc = eqs.iter().map(|e| e.pc_star);
    let pc_spread = (!eqs.is_empty())
        .then(|| pc.clone().fold(f64::MIN, f64::max) - pc.fold(f64::MAX, f64::min));
    let max = |f: &dyn Fn(&crate::equilibrium::MixedEquilibrium<f64>) -> f64| {
        eqs.iter().map(f).fold(0.0, f64::max)
    };
    Ok(MixedSummary {
        cells: grid.len(),
        existing: eqs.len(),
        rows_covered,
        rows: np,
        pc_spread,
        components: components(np, nq, &exists),
        any_pa_cells: eqs.iter().filter(|e| e.any_pa).count(),
        max_indifference_gap: max(&|e| e.indifference_gap),
        max_response_gap: max(&|e| e.response_gap),
        max_bisection_gap: max(&|e| e.bisection_gap),
    })
}

/// Number of 8-connected components of the cells where `on` holds.
pub fn components(rows: usize, cols: usize, on: &dyn Fn(usize, usize) -> bool) -> usize {
    let mut seen = vec![false; rows * cols];
    let mut count = 0;
    for start in 0..rows * cols {
        if seen[start] || !on(start / cols, start % cols) {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            let (i, j) = ((k / cols) as isize, (k % cols) as isize);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let (ni, nj) = (i + di, j + dj);
                    if ni < 0 || nj < 0 || ni >= rows as isize || nj >= cols as isize {
                        continue;
                    }
                    let nk = ni as usize * cols + nj as usize;
                    if !seen[nk] && on(ni as usize, nj as usize) {
                        seen[nk] = true;
                        stack.push(nk);
                    }
                }
            }
        }
    }
    count
}
