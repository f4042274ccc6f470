use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lvq::cli::{envelope, run, Command};
use lvq::config::RunConfig;
use lvq::output::{to_json, write_file};

#[derive(Parser)]
#[command(name = "lvq", version, about = "Schrodingerised local-volatility pricing emulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output base path; writes `<out>.json` and `<out>.csv`. Defaults to
    /// `output.path` from the config, else JSON on stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `retrieval.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Omit the timestamp and timings so reruns are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Schrodingerised pipeline with swap-test readout.
    Price,
    /// Implicit finite differences and quadrature.
    Classical,
    /// Forward and backward overlap series.
    Overlap,
    /// Resource and cost estimates.
    Resources,
    /// Price and classical side by side.
    Compare,
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    match base.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("csv") => base.with_extension(ext),
        _ => PathBuf::from(format!("{}.{ext}", base.display())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.cmd {
        Cmd::Price => Command::Price,
        Cmd::Classical => Command::Classical,
        Cmd::Overlap => Command::Overlap,
        Cmd::Resources => Command::Resources,
        Cmd::Compare => Command::Compare,
    };
    let result = (|| -> lvq::Result<()> {
        let path = cli.config.ok_or_else(|| lvq::Error::config("--config", "a configuration file is required"))?;
        let mut cfg = RunConfig::load(&path)?;
        if let Some(s) = cli.seed {
            cfg.retrieval.seed = s;
        }
        let report = run(cmd, &cfg)?;
        let doc = to_json(&envelope(cmd, &cfg, &report, cli.deterministic))?;
        match cli.out.or(cfg.output.path.as_ref().map(PathBuf::from)) {
            Some(base) => {
                write_file(&with_ext(&base, "json"), &doc)?;
                write_file(&with_ext(&base, "csv"), &report.csv.to_csv()?)?;
            }
            None => print!("{doc}"),
        }
        Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
