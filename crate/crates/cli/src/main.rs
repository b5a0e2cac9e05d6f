use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use selfsim::lab::InequalityReport;
use selfsim::runner::{
    cmd_run, cmd_signcheck, cmd_sweep, cmd_verify, constants_table, parse_config, Exit,
    ReportBundle, RunConfig, DEFAULT_SIGNCHECK_ALPHAS,
};

/// Navier–Stokes in self-similar variables, with checks of the energy
/// inequalities along each trajectory.
#[derive(Parser)]
#[command(name = "selfsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one trajectory and check it.
    Run(RunArgs),
    /// Run every point of the configured sweep axes.
    Sweep(RunArgs),
    /// Scan the sign brackets of the split-energy estimate.
    Signcheck {
        /// Values of alpha in (0, 1/8); defaults to 1/32, 1/16, 3/32, 0.124.
        alphas: Vec<f64>,
    },
    /// Print the Hausdorff–Young constants C(alpha, 4) and C(alpha, inf).
    Constants { alphas: Vec<f64> },
    /// Re-run the checks on an existing ledger CSV.
    Verify {
        ledger: PathBuf,
        #[command(flatten)]
        args: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file in `key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Require written ledgers to re-read bit-exactly.
    #[arg(long)]
    strict: bool,
    /// Log every N-th step (overrides `stride`).
    #[arg(long)]
    stride: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, Exit> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path).map_err(|e| {
                error!("cannot read {}: {e}", path.display());
                Exit::Io
            })?,
            None => String::new(),
        };
        let mut config = parse_config(&text).map_err(|e| {
            error!("{e}");
            Exit::Config
        })?;
        if let Some(out) = &self.out {
            config.output = out.clone();
        }
        if let Some(stride) = self.stride {
            config.simulation.stride = stride;
        }
        config.strict |= self.strict;
        config.validate().map_err(|e| {
            error!("{e}");
            Exit::Config
        })?;
        Ok(config)
    }
}

fn print_reports(reports: &[InequalityReport]) {
    for r in reports {
        println!(
            "{:<20} {:<24} max residual {:>11.3e}  tolerance {:>11.3e}  certificate {:.3e}",
            r.id.label(),
            r.status.label(),
            r.max_residual,
            r.tolerance,
            r.certificate
        );
    }
}

fn print_bundle(bundle: &ReportBundle) {
    print_reports(&bundle.reports);
    println!("max route gap {:.3e}", bundle.max_route_gap);
}

fn alphas_or_default(alphas: Vec<f64>) -> Vec<f64> {
    if alphas.is_empty() {
        DEFAULT_SIGNCHECK_ALPHAS.to_vec()
    } else {
        alphas
    }
}

fn execute(command: Command) -> Exit {
    match command {
        Command::Run(args) => {
            let config = match args.load() {
                Ok(c) => c,
                Err(exit) => return exit,
            };
            let (exit, bundle) = cmd_run(&config);
            if let Some(b) = &bundle {
                print_bundle(b);
            }
            exit
        }
        Command::Verify { ledger, args } => {
            let config = match args.load() {
                Ok(c) => c,
                Err(exit) => return exit,
            };
            let (exit, bundle) = cmd_verify(&ledger, &config);
            if let Some(b) = &bundle {
                print_bundle(b);
            }
            exit
        }
        Command::Sweep(args) => {
            let config = match args.load() {
                Ok(c) => c,
                Err(exit) => return exit,
            };
            let (exit, summary) = cmd_sweep(&config);
            if let Some(s) = summary {
                for p in &s.points {
                    let certs: Vec<String> = p
                        .certificates
                        .iter()
                        .map(|c| format!("{}={:.3e} (raw {:.3e})", c.id, c.value, c.raw))
                        .collect();
                    println!("{:<40} exit {}  {}", p.label, p.exit_code, certs.join("  "));
                }
            }
            exit
        }
        Command::Signcheck { alphas } => {
            let (exit, rows) = cmd_signcheck(&alphas_or_default(alphas));
            match rows {
                Ok(rows) => {
                    for r in rows {
                        println!(
                            "alpha {:<8} max A {:>11.3e}  max B {:>11.3e}",
                            r.alpha, r.max_a, r.max_b
                        );
                    }
                }
                Err(e) => error!("{e}"),
            }
            exit
        }
        Command::Constants { alphas } => match constants_table(&alphas_or_default(alphas)) {
            Ok(table) => {
                println!("alpha,C4,Cinf");
                for (alpha, c4, cinf) in table {
                    println!("{alpha},{c4:.16e},{cinf:.16e}");
                }
                Exit::Success
            }
            Err(e) => {
                error!("{e}");
                Exit::from_error(&e)
            }
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("SELFSIM_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            error!("cannot configure {threads} threads: {e}");
        }
    }
    ExitCode::from(execute(cli.command).code() as u8)
}
