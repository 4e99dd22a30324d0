use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{Mode, SweepConfig};
use super::grid::{MixedGrid, PureGrid};
use super::summary::{CellKind, MixedSummary, PureSummary};
use crate::error::{Error, Result};

pub const PURE_HEADER: &str = "p,q,eq_count,eq1_car,eq1_driver,eq2_car,eq2_driver,flags";
pub const MIXED_HEADER: &str = "p,q,pc_star,pa_star,exists,flags";

/// Heatmap pixels per grid cell.
pub const PPM_SCALE: usize = 8;

/// Fixed heatmap colours for pure-sweep cells.
pub const PURE_COLORS: [(CellKind, [u8; 3]); 7] = [
    (CellKind::NoAlertContinue, [46, 160, 67]),
    (CellKind::NoAlertStop, [230, 190, 40]),
    (CellKind::AlertContinue, [52, 101, 164]),
    (CellKind::AlertStop, [204, 51, 51]),
    (CellKind::Two, [128, 64, 160]),
    (CellKind::None, [0, 0, 0]),
    (CellKind::Undefined, [128, 128, 128]),
];

/// Mixed heatmap: absent cells, then the `p_A* = 0` and `p_A* = 1` ends of a
/// linear ramp for existing cells.
pub const MIXED_ABSENT: [u8; 3] = [255, 255, 255];
pub const MIXED_RAMP: [[u8; 3]; 2] = [[52, 101, 164], [204, 51, 51]];

/// `%g`-style formatting with six significant digits.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn pure_csv(grid: &PureGrid) -> String {
    let mut out = String::with_capacity(64 * grid.len());
    out.push_str(PURE_HEADER);
    out.push('\n');
    for ((p, q), cell) in grid.iter() {
        let mut cols: Vec<String> = vec![fmt_g6(p), fmt_g6(q), cell.len().to_string()];
        for k in 0..2 {
            match cell.profiles.get(k) {
                Some(pr) => {
                    cols.push(pr.car.label().into());
                    cols.push(pr.driver.label().into());
                }
                None => {
                    cols.push(String::new());
                    cols.push(String::new());
                }
            }
        }
        let mut flags = Vec::new();
        if cell.degenerate_dynamics {
            flags.push("no_dynamics");
        }
        if cell.profiles.iter().any(|p| p.degenerate) {
            flags.push("degenerate");
        }
        if cell.profiles.iter().any(|p| p.payoff_tie) {
            flags.push("payoff_tie");
        }
        cols.push(flags.join("|"));
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn mixed_csv(grid: &MixedGrid) -> String {
    let mut out = String::with_capacity(48 * grid.len());
    out.push_str(MIXED_HEADER);
    out.push('\n');
    for ((p, q), cell) in grid.iter() {
        let pc = cell.pc_star().map(fmt_g6).unwrap_or_default();
        let (pa, exists) = match cell.equilibrium {
            Some(e) => (fmt_g6(e.pa_star), "1"),
            None => (String::new(), "0"),
        };
        let mut flags = Vec::new();
        if cell.no_dynamics {
            flags.push("no_dynamics".to_string());
        }
        if cell.point_sampled {
            flags.push("point_sampled".to_string());
        }
        if cell.shifted {
            if let Some(w) = cell.witness_q {
                flags.push(format!("shifted:q={}", fmt_g6(w)));
            }
        }
        if cell.equilibrium.is_some_and(|e| e.any_pa) {
            flags.push("any_pa".to_string());
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_g6(p),
            fmt_g6(q),
            pc,
            pa,
            exists,
            flags.join("|")
        );
    }
    out
}

/// Binary P6 image: `q` increases to the right, `p` upwards.
fn ppm(rows: usize, cols: usize, color: &dyn Fn(usize, usize) -> [u8; 3]) -> Vec<u8> {
    let (w, h) = (cols * PPM_SCALE, rows * PPM_SCALE);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h * 3);
    for y in 0..h {
        let i = rows - 1 - y / PPM_SCALE;
        for x in 0..w {
            out.extend_from_slice(&color(i, x / PPM_SCALE));
        }
    }
    out
}

pub fn pure_ppm(grid: &PureGrid) -> Vec<u8> {
    ppm(grid.p_axis().len(), grid.q_axis().len(), &|i, j| {
        let kind = CellKind::of(grid.cell(i, j));
        PURE_COLORS
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, c)| *c)
            .expect("colour for every kind")
    })
}

pub fn mixed_ppm(grid: &MixedGrid) -> Vec<u8> {
    ppm(
        grid.p_axis().len(),
        grid.q_axis().len(),
        &|i, j| match grid.cell(i, j).equilibrium {
            None => MIXED_ABSENT,
            Some(e) => {
                let t = e.pa_star.clamp(0.0, 1.0);
                let [a, b] = MIXED_RAMP;
                std::array::from_fn(|k| {
                    (a[k] as f64 + t * (b[k] as f64 - a[k] as f64)).round() as u8
                })
            }
        },
    )
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g6).unwrap_or_else(|| "-".into())
}

pub fn pure_summary_text(summary: &PureSummary, config: &SweepConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode: {}", config.mode);
    let _ = writeln!(
        s,
        "alpha: {}  lambda: {}  grid_step: {}",
        fmt_g6(config.alpha),
        fmt_g6(config.lambda),
        fmt_g6(config.grid_step)
    );
    let _ = writeln!(s, "cells: {}", summary.cells);
    let _ = writeln!(
        s,
        "cells_with_equilibrium: {}",
        summary.cells_with_equilibrium
    );
    let _ = writeln!(s, "stop_fraction: {}", fmt_g6(summary.stop_fraction));
    let _ = writeln!(
        s,
        "stop_fraction_given_alert: {}",
        opt(summary.stop_fraction_given_alert)
    );
    let _ = writeln!(
        s,
        "any_stop_fraction: {}",
        fmt_g6(summary.any_stop_fraction)
    );
    s.push_str("areas:\n");
    for (kind, n, f) in &summary.areas {
        let _ = writeln!(s, "  {}: {} ({})", kind.label(), n, fmt_g6(*f));
    }
    if !summary.two_equilibrium_pairs.is_empty() {
        let pairs: Vec<&str> = summary
            .two_equilibrium_pairs
            .iter()
            .map(String::as_str)
            .collect();
        let _ = writeln!(s, "two_equilibrium_pairs: {}", pairs.join(" "));
    }
    s.push_str("borders (p: flip_q midpoint from->to):\n");
    for b in &summary.borders {
        let dir = match (b.from, b.to) {
            (Some(f), Some(t)) => format!("{f}->{t}"),
            (Some(f), None) => format!("{f}"),
            _ => "-".into(),
        };
        let _ = writeln!(
            s,
            "  {}: {} {} {}",
            fmt_g6(b.p),
            opt(b.flip_q),
            opt(b.midpoint),
            dir
        );
    }
    s
}

pub fn mixed_summary_text(summary: &MixedSummary, config: &SweepConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode: mixed");
    let _ = writeln!(
        s,
        "alpha: {}  lambda: {}  grid_step: {}",
        fmt_g6(config.alpha),
        fmt_g6(config.lambda),
        fmt_g6(config.grid_step)
    );
    let _ = writeln!(s, "cells: {}", summary.cells);
    let _ = writeln!(s, "existing: {}", summary.existing);
    let _ = writeln!(s, "rows_covered: {}/{}", summary.rows_covered, summary.rows);
    let _ = writeln!(s, "components: {}", summary.components);
    let _ = writeln!(s, "pc_spread: {}", opt(summary.pc_spread));
    let _ = writeln!(s, "any_pa_cells: {}", summary.any_pa_cells);
    let _ = writeln!(
        s,
        "max_indifference_gap: {}",
        fmt_g6(summary.max_indifference_gap)
    );
    let _ = writeln!(s, "max_response_gap: {}", fmt_g6(summary.max_response_gap));
    let _ = writeln!(
        s,
        "max_bisection_gap: {}",
        fmt_g6(summary.max_bisection_gap)
    );
    s
}

/// Completed sweep ready to be written.
#[derive(Clone, Debug)]
pub enum SweepOutput {
    Pure {
        grid: PureGrid,
        summary: PureSummary,
    },
    Mixed {
        grid: MixedGrid,
        summary: MixedSummary,
    },
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `<stem>.csv`, `<stem>.ppm` (per `config.format`) and
/// `<stem>_summary.txt` into `config.output_dir`, where `stem` is the mode
/// name. Returns the written paths.
pub fn emit_outputs(output: &SweepOutput, config: &SweepConfig) -> Result<Vec<PathBuf>> {
    let dir: &Path = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = match (output, config.mode) {
        (SweepOutput::Mixed { .. }, _) => "mixed",
        (SweepOutput::Pure { .. }, Mode::Agnostic) => "agnostic",
        (SweepOutput::Pure { .. }, _) => "pure",
    };
    let mut written = Vec::new();
    let (csv, image, text) = match output {
        SweepOutput::Pure { grid, summary } => (
            pure_csv(grid),
            pure_ppm(grid),
            pure_summary_text(summary, config),
        ),
        SweepOutput::Mixed { grid, summary } => (
            mixed_csv(grid),
            mixed_ppm(grid),
            mixed_summary_text(summary, config),
        ),
    };
    if config.format.csv() {
        written.push(write(dir.join(format!("{stem}.csv")), csv.as_bytes())?);
    }
    if config.format.ppm() {
        written.push(write(dir.join(format!("{stem}.ppm")), &image)?);
    }
    written.push(write(
        dir.join(format!("{stem}_summary.txt")),
        text.as_bytes(),
    )?);
    Ok(written)
}
