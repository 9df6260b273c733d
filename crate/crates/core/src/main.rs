use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gravity_shock::pipeline::{run_pipeline, RunConfig, Stage};
use gravity_shock::Error;

#[derive(Parser)]
#[command(name = "gravity-shock", version, about = "Conflict-shock gravity model pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides `[io] out_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Route forces, route reports and the anti-gravity aggregate.
    Simulate,
    /// IDW field from the simulated routes.
    Field,
    /// Parameter sweeps with response-shape classification.
    Sweep,
    /// Nested gravity regressions.
    Fit,
    /// Ranked trade changes between two years.
    Deltas,
    /// Every stage.
    All,
    /// Selected stages.
    Run {
        #[arg(long = "stage", required = true)]
        stages: Vec<String>,
    },
}

fn execute(cli: Cli) -> Result<(), Error> {
    let path = cli
        .config
        .ok_or_else(|| Error::Config { key: "--config".into(), message: "required".into() })?;
    let mut config = RunConfig::load(&path)?;
    if let Some(out) = cli.out {
        config.out_dir = out;
    }
    let stages = match cli.command {
        Command::Simulate => vec![Stage::Simulate],
        Command::Field => vec![Stage::Field],
        Command::Sweep => vec![Stage::Sweep],
        Command::Fit => vec![Stage::Fit],
        Command::Deltas => vec![Stage::Deltas],
        Command::All => Stage::ALL.to_vec(),
        Command::Run { stages } => stages
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Stage>, _>>()?,
    };
    let report = run_pipeline(&config, &stages)?;
    for (name, digest) in &report.files {
        println!("{digest}  {name}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.kind();
            let message = e.to_string().replace('\n', " ");
            eprintln!("error kind={} code={} message={message:?}", kind.as_str(), kind.exit_code());
            ExitCode::from(kind.exit_code() as u8)
        }
    }
}
