use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rankpc_cli::experiment::{summary_table, write_failures, write_records, write_summary};
use rankpc_cli::{oracle_check, plotdata, simulation, summarize, ExperimentConfig};

#[derive(Parser)]
#[command(name = "rankpc", version, about = "Rank-based PC algorithm: checks and simulation studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run PC with a d-separation oracle on random DAGs and compare to the CPDAG
    OracleCheck {
        #[arg(long, default_value_t = 6)]
        p_max: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Write simulated datasets, models and a manifest
    Simulate(RunArgs),
    /// Run the alpha-grid study and write records and a summary
    Experiment(RunArgs),
    /// Turn a records file into per-regime plot tables
    Plotdata {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config's conditioning-set limit
    #[arg(long)]
    max_cond: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.max_cond.is_some() {
            cfg.max_cond = self.max_cond;
        }
        if let Some(k) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
                .context("configuring the thread pool")?;
        }
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(cfg)
    }
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::OracleCheck { p_max, trials, seed } => {
            let report = oracle_check(p_max, trials, seed)?;
            print!("{report}");
            if !report.passed() {
                bail!("oracle check failed");
            }
        }
        Command::Simulate(args) => {
            let cfg = args.load()?;
            let count = simulation::write_simulation(&cfg, &args.out)?;
            println!("wrote {count} datasets to {}", args.out.display());
        }
        Command::Experiment(args) => {
            let cfg = args.load()?;
            let out = rankpc_cli::run_experiment(&cfg);
            write_records(&out.records, fs::File::create(args.out.join("records.csv"))?)?;
            write_failures(&out.failures, fs::File::create(args.out.join("failures.csv"))?)?;
            let rows = summarize(&out.records);
            write_summary(&rows, fs::File::create(args.out.join("summary.csv"))?)?;
            print!("{}", summary_table(&rows));
            if !out.failures.is_empty() {
                log::warn!("{} runs failed; see failures.csv", out.failures.len());
            }
        }
        Command::Plotdata { records, out } => {
            let file = fs::File::open(&records).with_context(|| format!("opening {}", records.display()))?;
            let recs = rankpc_cli::experiment::read_records(file)?;
            fs::create_dir_all(&out)?;
            for (name, body) in plotdata::plot_files(&recs) {
                fs::write(out.join(&name), body)?;
                println!("{name}");
            }
        }
    }
    Ok(())
}
