use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lrdhom::config::{ExperimentConfig, ExperimentKind};
use lrdhom::experiments::run_experiment;
use lrdhom::table::ResultTable;

#[derive(Parser)]
#[command(
    name = "lrdhom",
    about = "Monte Carlo laboratory for random homogenization with long-range-dependent potentials",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description (strict JSON schema).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results are independent of this value.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; overrides the config's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decay of E|u_eps - u0|^2 across scales against the regime theory.
    Rate(RunArgs),
    /// Distribution of the normalized fluctuation against the limit law.
    Fluct(RunArgs),
    /// Autocovariance decay of the transformed potential.
    Autocov(RunArgs),
    /// Variance and skewness of normalized partial integrals.
    Hermite(RunArgs),
    /// Monte Carlo variance of Wiener integrals against the integrand norm.
    Isometry(RunArgs),
    /// Re-read summaries in an output directory and print their verdicts.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Rate(a) => run(a, ExperimentKind::Rate),
        Command::Fluct(a) => run(a, ExperimentKind::FluctuationDist),
        Command::Autocov(a) => run(a, ExperimentKind::Autocov),
        Command::Hermite(a) => run(a, ExperimentKind::HermiteVar),
        Command::Isometry(a) => run(a, ExperimentKind::Isometry),
        Command::Report { out } => report(&out),
    }
}

fn run(args: RunArgs, expected: ExperimentKind) -> Result<bool, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if cfg.kind != expected {
        return Err(format!(
            "config kind `{}` does not match the `{}` subcommand",
            cfg.kind.name(),
            expected.name()
        )
        .into());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out_dir = args.out.unwrap_or_else(|| PathBuf::from(&cfg.out));
    std::fs::create_dir_all(&out_dir)?;

    let table = match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()?;
            pool.install(|| run_experiment(&cfg, Some(&out_dir)))?
        }
        None => run_experiment(&cfg, Some(&out_dir))?,
    };

    let stem = cfg.kind.name();
    table.write_csv(&out_dir.join(format!("{stem}.csv")))?;
    table.write_summary(&out_dir.join(format!("{stem}_summary.json")))?;
    print_verdicts(&table);
    Ok(table.all_pass())
}

fn print_verdicts(table: &ResultTable) {
    for v in &table.verdicts {
        println!(
            "{}: {} -- {}",
            v.name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "{}: {} verdicts, {} ms, seed {}, config {:016x}",
        table.experiment,
        table.verdicts.len(),
        table.wall_ms,
        table.seed,
        table.config_hash
    );
}

fn report(out: &Path) -> Result<bool, Box<dyn std::error::Error>> {
    let mut all_pass = true;
    let mut seen = 0usize;
    let mut entries: Vec<_> = std::fs::read_dir(out)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with("_summary.json"))
        })
        .collect();
    entries.sort();
    for path in entries {
        let table: ResultTable = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        print_verdicts(&table);
        all_pass &= table.all_pass();
        seen += 1;
    }
    if seen == 0 {
        return Err(format!("no summaries found under {}", out.display()).into());
    }
    Ok(all_pass)
}
