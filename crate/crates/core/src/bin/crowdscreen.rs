use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crowdscreen::analytic::Mode;
use crowdscreen::cli::{self, CommandOutput, Status, Strategy};
use crowdscreen::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "crowdscreen",
    version,
    about = "Crowdsourced paper screening: model, simulate, optimize"
)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (flat `key = value` file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Accuracy model; overrides the config `mode` key.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Random seed; overrides the config `seed` key.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated budgets for `curve`.
    #[arg(long, global = true, value_delimiter = ',')]
    budgets: Vec<f64>,

    #[arg(long, global = true, value_enum, default_value = "single")]
    strategy: StrategyArg,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form quantities for the configured parameters.
    Analyze,
    /// Budget versus minimal expected loss.
    Curve,
    /// Replicated Monte-Carlo task simulation.
    Simulate,
    /// Choose N_t, J and J_t under the configured budget.
    Optimize,
    /// Check the simulator against the closed form.
    Validate,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Paper,
    Exact,
    Both,
}

#[derive(ValueEnum, Clone, Copy)]
enum StrategyArg {
    Single,
    Iterative,
    Horizontal,
}

fn run(args: Args) -> crowdscreen::Result<CommandOutput> {
    let mut cfg = RunConfig::load(args.config.expect("checked in main"))?;
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    let modes = match args.mode {
        Some(ModeArg::Paper) => vec![Mode::Paper],
        Some(ModeArg::Exact) => vec![Mode::Exact],
        Some(ModeArg::Both) => vec![Mode::Exact, Mode::Paper],
        None => vec![cfg.mode],
    };
    cfg.mode = modes[0];
    let out = args.out.as_deref();
    match args.command {
        Command::Analyze => cli::cmd_analyze(&cfg, &modes, out),
        Command::Curve => cli::cmd_curve(&cfg, &args.budgets, out),
        Command::Simulate => cli::cmd_simulate(&cfg, out),
        Command::Optimize => {
            let strategy = match args.strategy {
                StrategyArg::Single => Strategy::Single,
                StrategyArg::Iterative => Strategy::Iterative,
                StrategyArg::Horizontal => Strategy::Horizontal,
            };
            cli::cmd_optimize(&cfg, strategy, out)
        }
        Command::Validate => cli::cmd_validate(&cfg, out),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if args.config.is_none() {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(Status::Error.code() as u8);
    }
    match run(args) {
        Ok(o) => {
            print!("{}", o.summary);
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::from(o.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::Error.code() as u8)
        }
    }
}
