use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use topk_shapley::harness::{
    exact_report, parse_config, run_bench, run_pac, ExperimentConfig, GameSpec,
};
use topk_shapley::numeric::fmt_g17;
use topk_shapley::par::with_threads;
use topk_shapley::Execution;

/// Budget-limited Shapley value estimation experiments.
#[derive(Parser)]
#[command(name = "topk-shapley", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print exact Shapley values, eligible sets and moments of a game.
    Exact {
        /// e.g. unanimity:4, carrier:4:1,2, airport:1,2,3, sou:6,8,1, tabular:PATH
        #[arg(long)]
        game: String,
    },
    /// Fixed-budget runs, one CSV row per run and budget checkpoint.
    Bench(RunArgs),
    /// Runs with the PAC stopping rule, one CSV row per run.
    Pac(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
    /// Overrides base_seed from the config.
    #[arg(long)]
    base_seed: Option<u64>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(&self.config)
            .with_context(|| format!("reading {}", self.config.display()))?;
        let mut config =
            parse_config(&text).with_context(|| format!("in {}", self.config.display()))?;
        if let Some(seed) = self.base_seed {
            config.base_seed = seed;
        }
        Ok(config)
    }

    fn base_dir(&self) -> Option<&Path> {
        self.config.parent()
    }

    fn execution(&self) -> Execution {
        if self.parallelism == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn output(&self) -> Result<BufWriter<File>> {
        let file =
            File::create(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(BufWriter::new(file))
    }
}

fn exact(game: &str) -> Result<()> {
    let spec: GameSpec = game.parse().map_err(anyhow::Error::msg)?;
    let report = exact_report(&spec, None)?;
    print!("{report}");
    Ok(())
}

fn bench(args: &RunArgs) -> Result<()> {
    let config = args.load()?;
    let out = args.output()?;
    let report = with_threads(args.parallelism, || {
        run_bench(&config, args.base_dir(), out, args.execution())
    })?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "game algorithm k T runs eps_inc_exc se mse se")?;
    for g in &report.groups {
        writeln!(
            stdout,
            "{} {} {} {} {} {} {} {} {}",
            g.game,
            g.algorithm,
            g.k,
            g.budget,
            g.runs,
            fmt_g17(g.eps_inc_exc.mean),
            fmt_g17(g.eps_inc_exc.se),
            fmt_g17(g.mse.mean),
            fmt_g17(g.mse.se),
        )?;
    }
    writeln!(
        stdout,
        "wrote {} rows to {}",
        report.rows,
        args.out.display()
    )?;
    Ok(())
}

fn pac(args: &RunArgs) -> Result<()> {
    let config = args.load()?;
    let out = args.output()?;
    let report = with_threads(args.parallelism, || {
        run_pac(&config, args.base_dir(), out, args.execution())
    })?;
    let mut stdout = io::stdout().lock();
    writeln!(
        stdout,
        "game algorithm k runs mean_calls se coverage stopped"
    )?;
    for s in &report.summaries {
        writeln!(
            stdout,
            "{} {} {} {} {} {} {} {}",
            s.game,
            s.algorithm,
            s.k,
            s.runs,
            fmt_g17(s.calls.mean),
            fmt_g17(s.calls.se),
            fmt_g17(s.coverage),
            fmt_g17(s.stopped),
        )?;
    }
    writeln!(
        stdout,
        "wrote {} rows to {}",
        report.rows,
        args.out.display()
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exact { game } => exact(game),
        Command::Bench(args) => bench(args),
        Command::Pac(args) => pac(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
