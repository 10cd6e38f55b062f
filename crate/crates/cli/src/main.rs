use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vmlab::run::{self, Suite};
use vmlab::{CliError, Result};

#[derive(Parser)]
#[command(name = "vmlab", version, about = "Random vorticity laboratory")]
struct Cli {
    /// Worker threads for data-parallel kernels and Monte-Carlo batches (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file in `key = value` form.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shipped scenario: kato_small, linear_check, dirac_limit, hitting, tail, moments_small.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one path and write the full artifact set.
    Solve {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Run Picard even when the smallness gate fails.
        #[arg(long)]
        override_smallness: bool,
    },
    /// Monte-Carlo batch; path i uses the seed derived from seed ⊕ i.
    Mc {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate C1, C2 and C* for the scenario's grid and horizon.
    Calibrate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and write a CSV report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
    },
}

fn source_config(s: &Source, fallback: Option<&str>) -> Result<vmlab::ScenarioConfig> {
    let preset = s.preset.as_deref().or(if s.config.is_none() { fallback } else { None });
    run::load_config(s.config.as_deref(), preset)
}

fn execute(cli: Cli) -> Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.workers.is_some_and(|w| w > 1) {
        log::warn!("built without the parallel feature; --workers ignored");
    }

    match cli.command {
        Command::Solve {
            source,
            seed,
            out,
            override_smallness,
        } => {
            let cfg = source_config(&source, None)?;
            let s = run::run_solve(cfg, seed, &out, override_smallness)?;
            println!("seed = {}", s.seed);
            println!("iterations = {}", s.record.iterations);
            println!("znorm = {}", stochvort::noise::fmt17(s.record.kato.znorm));
            println!("output = {}", out.display());
        }
        Command::Mc {
            source,
            paths,
            seed,
            out,
        } => {
            let cfg = source_config(&source, None)?;
            let s = run::run_mc(cfg, paths, seed, &out)?;
            println!("paths = {}", s.paths);
            if let Some((est, exact)) = s.hitting {
                println!("hitting = {} +- {} (exact {})", est.estimate, est.stderr, exact);
            }
            for t in &s.tail {
                println!(
                    "tail r = {}: fraction {} bound {} {}",
                    t.r,
                    t.fraction_analytic,
                    t.bound,
                    if t.pass { "PASS" } else { "FAIL" }
                );
            }
            for (i, e) in &s.failures {
                println!("path {i} excluded: {e}");
            }
            println!("output = {}", out.display());
        }
        Command::Calibrate { source, out } => {
            let cfg = source_config(&source, None)?;
            let cal = run::run_calibrate(cfg, out.as_deref())?;
            print!("{}", run::calibration_text(&cal));
        }
        Command::Verify { suite, source, out } => {
            let cfg = source_config(&source, Some("kato_small"))?;
            let result = run::run_verify(suite, &cfg, Some(&out));
            match &result {
                Ok(rows) => {
                    for r in rows {
                        println!("{} {} {}", if r.pass { "PASS" } else { "FAIL" }, r.suite, r.name);
                    }
                }
                Err(CliError::VerifyFailed(names)) => println!("FAILED: {names}"),
                Err(_) => {}
            }
            result?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VM_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
