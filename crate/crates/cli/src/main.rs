use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oqdrive::cognition::{
    build_cognition_matrix, build_luce_rates, initial_state_mixed, pr_continue_closed_form,
    pr_continue_from_state, DriverBelief,
};
use oqdrive::engine::{build_generator, Propagator};
use oqdrive::sweep::{
    emit_outputs, fmt_g6, run_sweep, run_validate, FaultInjection, Mode, OutputFormat, SweepConfig,
    SweepOutput,
};
use oqdrive::{DriverGame, Error};

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Driver/vehicle alert game solver.
#[derive(Parser, Debug)]
#[command(name = "oqdrive", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pure equilibria over the (p, q) belief plane.
    PureSweep(SweepArgs),
    /// Mixed equilibria (p_A*) over the belief plane.
    MixedSweep(SweepArgs),
    /// Continue probability over time for one initial state.
    Evolve(EvolveArgs),
    /// Equilibria at a single belief profile.
    Equilibrium(PointArgs),
    /// Structure and dynamics self-checks.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// TOML config; built-in baseline utilities when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Driver-agnostic car (pure sweep only).
    #[arg(long)]
    agnostic: bool,
    /// csv, ppm or both.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    /// Driver prior on a safe road.
    #[arg(long)]
    p: f64,
    /// Probability the car alerts.
    #[arg(long)]
    pa: f64,
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, hide = true, value_name = "BLOCK,ROW,COL")]
    inject_fault: Option<String>,
}

fn load(common: &Common) -> Result<SweepConfig, Error> {
    let mut config = match &common.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    if let Some(a) = common.alpha {
        config.alpha = a;
    }
    if let Some(l) = common.lambda {
        config.lambda = l;
    }
    Ok(config)
}

fn sweep(args: &SweepArgs, mixed: bool) -> Result<u8, Error> {
    let mut config = load(&args.common)?;
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(step) = args.grid_step {
        config.grid_step = step;
    }
    if let Some(f) = &args.format {
        config.format = f.parse::<OutputFormat>()?;
    }
    config.mode = match (mixed, args.agnostic) {
        (true, true) => {
            return Err(Error::Argument(
                "--agnostic applies to pure-sweep only".into(),
            ))
        }
        (true, false) => Mode::Mixed,
        (false, true) => Mode::Agnostic,
        (false, false) => Mode::Pure,
    };
    config.validate()?;
    let output = run_sweep(&config)?;
    for path in emit_outputs(&output, &config)? {
        println!("wrote {}", path.display());
    }
    match &output {
        SweepOutput::Pure { summary, .. } => {
            println!(
                "stop_fraction {}  stop_fraction_given_alert {}",
                fmt_g6(summary.stop_fraction),
                summary
                    .stop_fraction_given_alert
                    .map(fmt_g6)
                    .unwrap_or_else(|| "-".into())
            );
        }
        SweepOutput::Mixed { summary, .. } => {
            println!(
                "existing cells {} of {}  components {}",
                summary.existing, summary.cells, summary.components
            );
        }
    }
    Ok(0)
}

fn evolve(args: &EvolveArgs) -> Result<u8, Error> {
    let config = load(&args.common)?;
    config.validate()?;
    if !(args.t_max.is_finite() && args.t_max >= 0.0) {
        return Err(Error::Validation {
            field: "t-max".into(),
            reason: format!("{} is not a non-negative time", args.t_max),
        });
    }
    if args.steps == 0 {
        return Err(Error::Validation {
            field: "steps".into(),
            reason: "must be at least 1".into(),
        });
    }
    let params = config.params()?;
    let rates = build_luce_rates(&config.utilities.driver(), config.lambda)?;
    let c = build_cognition_matrix(&rates).into_matrix();
    let g = build_generator(config.alpha, &c)?;
    let mut rho = initial_state_mixed(DriverBelief::new(args.p)?, args.pa)?;
    let dt = args.t_max / args.steps as f64;
    let step = Propagator::new(&g, dt)?;

    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| io_error(path, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let target = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut emit = |line: String| writeln!(sink, "{line}").map_err(|e| io_error(&target, e));
    emit("t,pr_continue,pr_continue_closed_form".into())?;
    for k in 0..=args.steps {
        let t = k as f64 * dt;
        if k > 0 {
            rho = step.apply(&rho)?;
        }
        let closed = pr_continue_closed_form(&params, &rates, args.p, args.pa, t)?;
        emit(format!(
            "{},{},{}",
            fmt_g6(t),
            fmt_g6(pr_continue_from_state(&rho)?),
            fmt_g6(closed)
        ))?;
    }
    sink.flush().map_err(|e| io_error(&target, e))?;
    Ok(0)
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn equilibrium(args: &PointArgs) -> Result<u8, Error> {
    let config = load(&args.common)?;
    config.validate()?;
    let game = DriverGame::new(config.utilities.clone(), config.params()?)?;
    println!(
        "p = {}  q = {}  alpha = {}  lambda = {}",
        fmt_g6(args.p),
        fmt_g6(args.q),
        fmt_g6(config.alpha),
        fmt_g6(config.lambda)
    );
    let pure = game.pure_equilibria(args.p, args.q)?;
    if pure.degenerate_dynamics {
        println!("pure: undefined (alpha = 0, no steady state)");
    } else if pure.is_empty() {
        println!("pure: none");
    }
    for pr in &pure.profiles {
        let mut flags = Vec::new();
        if pr.degenerate {
            flags.push("degenerate");
        }
        if pr.payoff_tie {
            flags.push("payoff_tie");
        }
        println!(
            "pure: ({}, {})  Pr(C) = {}{}",
            pr.car,
            pr.driver,
            fmt_g6(pr.pr_continue),
            if flags.is_empty() {
                String::new()
            } else {
                format!("  [{}]", flags.join(", "))
            }
        );
    }
    for pr in &game.agnostic_outcome(args.p, args.q)?.profiles {
        println!("agnostic: ({}, {})", pr.car, pr.driver);
    }
    match game.mixed_equilibrium(args.p, args.q) {
        Ok(Some(m)) => println!(
            "mixed: p_C* = {}  p_A* = {}{}",
            fmt_g6(m.pc_star),
            fmt_g6(m.pa_star),
            if m.any_pa { "  [any p_A]" } else { "" }
        ),
        Ok(None) => println!("mixed: none"),
        Err(Error::DegenerateDynamics(_)) => println!("mixed: undefined (alpha = 0)"),
        Err(Error::NoIndifference(_)) => println!("mixed: none (car never indifferent)"),
        Err(e) => return Err(e),
    }
    Ok(0)
}

fn parse_fault(s: &str) -> Result<FaultInjection, Error> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Argument(format!("bad fault position {s:?}")))?;
    match parts.as_slice() {
        [b, r, c] => FaultInjection::new(*b, *r, *c),
        _ => Err(Error::Argument(format!("bad fault position {s:?}"))),
    }
}

fn validate(args: &ValidateArgs) -> Result<u8, Error> {
    let config = load(&args.common)?;
    let fault = args.inject_fault.as_deref().map(parse_fault).transpose()?;
    let report = run_validate(&config, fault)?;
    println!("{report}");
    Ok(if report.all_passed() { 0 } else { EXIT_FAILED })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Validation { .. } | Error::Argument(_) => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_FAILED,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::PureSweep(a) => sweep(a, false),
        Command::MixedSweep(a) => sweep(a, true),
        Command::Evolve(a) => evolve(a),
        Command::Equilibrium(a) => equilibrium(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
