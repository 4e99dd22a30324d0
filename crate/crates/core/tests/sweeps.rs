use oqdrive::equilibrium::Game;
use oqdrive::game::{CarAction, DriverAction};
use oqdrive::sweep::{
    emit_outputs, pure_csv, run_mixed_sweep, run_pure_sweep, run_sweep, summarize, summarize_mixed,
    Mode, OutputFormat, PhaseGrid, SweepConfig, SweepOutput,
};
use oqdrive::{Params, Utilities};

fn config(alpha: f64, lambda: f64, mode: Mode) -> SweepConfig {
    SweepConfig {
        alpha,
        lambda,
        mode,
        ..SweepConfig::default()
    }
}

#[test]
fn two_by_two_grid_has_four_rows() {
    let g = Game::new(Utilities::baseline(), Params::new(0.2, 10.0).unwrap()).unwrap();
    let grid = PhaseGrid::build(vec![0.0, 1.0], vec![0.0, 1.0], |i, j| {
        g.pure_equilibria(i as f64, j as f64)
    })
    .unwrap();
    let csv = pure_csv(&grid);
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(csv.lines().nth(1).unwrap().split(',').next(), Some("0"));
}

#[test]
fn default_grid_corners() {
    let grid = run_pure_sweep(&config(0.2, 10.0, Mode::Pure)).unwrap();
    assert_eq!(grid.len(), 51 * 51);
    let (i, j) = grid.nearest(0.9, 0.9);
    assert_eq!(
        grid.cell(i, j).pairs(),
        vec![(CarAction::NoAlert, DriverAction::Continue)]
    );
    let (i, j) = grid.nearest(0.1, 0.1);
    assert_eq!(
        grid.cell(i, j).pairs(),
        vec![(CarAction::Alert, DriverAction::Stop)]
    );
}

#[test]
fn summary_fractions_are_probabilities() {
    for (a, l) in [(0.2, 10.0), (0.8, 1.0), (0.8, 3.0), (0.5, 0.1)] {
        let s = summarize(&run_pure_sweep(&config(a, l, Mode::Pure)).unwrap()).unwrap();
        for f in [s.stop_fraction, s.any_stop_fraction] {
            assert!((0.0..=1.0).contains(&f));
        }
        assert!(s
            .stop_fraction_given_alert
            .is_none_or(|f| (0.0..=1.0).contains(&f)));
        let total: f64 = s.areas.iter().map(|(_, _, f)| f).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn alert_conditioned_stop_fraction_dominates_on_defaults() {
    let s = summarize(&run_pure_sweep(&SweepConfig::default()).unwrap()).unwrap();
    assert!(s.stop_fraction_given_alert.unwrap() >= s.stop_fraction);
}

#[test]
fn mixed_band_flattens_as_discrimination_drops() {
    let spread = |lambda| {
        summarize_mixed(&run_mixed_sweep(&config(0.8, lambda, Mode::Mixed)).unwrap())
            .unwrap()
            .pc_spread
            .unwrap()
    };
    let (sharp, flat) = (spread(10.0), spread(1.0));
    assert!(flat < sharp, "{flat} vs {sharp}");
}

#[test]
fn mixed_band_lies_inside_feasible_range() {
    let grid = run_mixed_sweep(&config(0.8, 10.0, Mode::Mixed)).unwrap();
    for (_, cell) in grid.iter() {
        if let Some(w) = cell.witness_q {
            assert!((10.0 / 19.0 - 1e-12..=11.0 / 16.0 + 1e-12).contains(&w));
        }
    }
    let s = summarize_mixed(&grid).unwrap();
    assert!(s.connected() && s.every_row_covered());
}

#[test]
fn alpha_zero_has_no_equilibria_to_report() {
    let grid = run_pure_sweep(&config(0.0, 10.0, Mode::Pure)).unwrap();
    assert!(grid.cells().iter().all(|c| c.degenerate_dynamics));
    let mixed = run_mixed_sweep(&config(0.0, 10.0, Mode::Mixed)).unwrap();
    assert!(mixed.cells().iter().all(|c| c.no_dynamics && !c.exists()));
}

#[test]
fn emitted_files_are_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for run in 0..2 {
        let mut cfg = config(0.8, 3.0, Mode::Pure);
        cfg.format = OutputFormat::Both;
        cfg.output_dir = dir.path().join(run.to_string());
        let out = run_sweep(&cfg).unwrap();
        assert!(matches!(out, SweepOutput::Pure { .. }));
        let files: Vec<Vec<u8>> = emit_outputs(&out, &cfg)
            .unwrap()
            .iter()
            .map(|p| std::fs::read(p).unwrap())
            .collect();
        bytes.push(files);
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn non_sweep_modes_are_rejected() {
    assert!(run_sweep(&config(0.2, 10.0, Mode::Evolve)).is_err());
}
