use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lipflow::experiment::{run_and_report, ExperimentConfig, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    EmbedBorel,
    EmbedTopo,
    MainLemma,
    Mcshane,
    Mollify,
    Verify,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::EmbedBorel => Subcommand::EmbedBorel,
            Command::EmbedTopo => Subcommand::EmbedTopo,
            Command::MainLemma => Subcommand::MainLemma,
            Command::Mcshane => Subcommand::McShane,
            Command::Mollify => Subcommand::Mollify,
            Command::Verify => Subcommand::Verify,
        }
    }
}

/// Runs one experiment and prints its report CSV. Exit code 0 when every check
/// passes, 1 when a check fails, 2 on configuration errors.
#[derive(Debug, Parser)]
#[command(name = "lipflow", version)]
struct Cli {
    command: Command,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    flow: Option<String>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    cover: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    retries: Option<usize>,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory for the report and per-stage CSVs.
    #[arg(long)]
    output: Option<PathBuf>,
}

macro_rules! override_fields {
    ($cfg:ident, $cli:ident; $($plain:ident),*; $($opt:ident),*) => {
        $(if let Some(v) = $cli.$plain.clone() { $cfg.$plain = v; })*
        $(if let Some(v) = $cli.$opt.clone() { $cfg.$opt = Some(v); })*
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::from_file(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    override_fields!(cfg, cli;
        flow, scale, seed, points, a, delta, cover, kappa, trials, retries, dim, tau, epsilon;
        window, m_max, input, output);

    let (code, out) = run_and_report(cli.command.into(), &cfg);
    match out {
        Ok(out) => print!("{}", out.report.to_csv_string()),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
