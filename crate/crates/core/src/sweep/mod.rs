//! Belief-plane sweeps: configuration, grids, summaries, file outputs and
//! the self-validation report.

mod config;
mod grid;
mod output;
mod summary;
mod validate;

pub use config::{
    axis, Mode, OutputFormat, SweepConfig, DEFAULT_ALPHA, DEFAULT_LAMBDA, DEFAULT_STEP, MAX_STEP,
};
pub use grid::{
    run_mixed_point_sweep, run_mixed_sweep, run_pure_sweep, MixedCell, MixedGrid, PhaseGrid,
    PureGrid,
};
pub use output::{
    emit_outputs, fmt_g6, mixed_csv, mixed_ppm, mixed_summary_text, pure_csv, pure_ppm,
    pure_summary_text, SweepOutput, MIXED_ABSENT, MIXED_HEADER, MIXED_RAMP, PPM_SCALE, PURE_COLORS,
    PURE_HEADER,
};
pub use summary::{
    components, summarize, summarize_mixed, CellKind, MixedSummary, PureSummary, RowBorder,
};
pub use validate::{run_validate, FaultInjection, ValidationCheck, ValidationReport};

use crate::error::Result;

/// Runs the sweep selected by `config.mode` (pure, agnostic or mixed) and
/// summarizes it.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    match config.mode {
        Mode::Mixed => {
            let grid = run_mixed_sweep(config)?;
            let summary = summarize_mixed(&grid)?;
            Ok(SweepOutput::Mixed { grid, summary })
        }
        Mode::Pure | Mode::Agnostic => {
            let grid = run_pure_sweep(config)?;
            let summary = summarize(&grid)?;
            Ok(SweepOutput::Pure { grid, summary })
        }
        other => Err(crate::Error::Argument(format!(
            "mode `{other}` is not a sweep"
        ))),
    }
}
