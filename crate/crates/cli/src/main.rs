use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use derand_cli::bench::{bench, parse_batch};
use derand_cli::config::RawConfig;
use derand_cli::run::{run, Status};
use derand_cli::CliError;

#[derive(Parser)]
#[command(name = "derand", version, about = "Run and verify derandomized MIS and spanner algorithms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one configuration, verify it, and emit JSON and CSV.
    Run(Box<RunArgs>),
    /// Run a batch file (one `key=value ...` config per line) into one CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    /// Graph file to load.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generator: gnp, weighted_gnp, grid, clique, path, cycle, star, random_tree, random_regular.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    max_weight: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    bandwidth_factor: Option<usize>,
    #[arg(long)]
    c_prime: Option<u32>,
    #[arg(long)]
    t_max: Option<u32>,
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Result JSON path; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV path for the single result row.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Batch file with one config per line.
    #[arg(long)]
    configs: PathBuf,
    /// Output CSV path; printed to stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl RunArgs {
    fn raw(&self) -> Result<RawConfig, CliError> {
        let mut raw = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                RawConfig::parse_file(&text)?
            }
            None => RawConfig::default(),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags: [(&str, Option<String>); 18] = [
            ("algo", self.algo.clone()),
            ("graph", path(&self.graph)),
            ("gen", self.gen.clone()),
            ("n", self.n.map(|v| v.to_string())),
            ("p", self.p.map(|v| v.to_string())),
            ("rows", self.rows.map(|v| v.to_string())),
            ("cols", self.cols.map(|v| v.to_string())),
            ("degree", self.degree.map(|v| v.to_string())),
            ("max-weight", self.max_weight.map(|v| v.to_string())),
            ("k", self.k.map(|v| v.to_string())),
            ("d", self.d.map(|v| v.to_string())),
            ("model", self.model.clone()),
            ("bandwidth-factor", self.bandwidth_factor.map(|v| v.to_string())),
            ("c-prime", self.c_prime.map(|v| v.to_string())),
            ("t-max", self.t_max.map(|v| v.to_string())),
            ("rng-seed", self.rng_seed.map(|v| v.to_string())),
            ("out", path(&self.out)),
            ("csv", path(&self.csv)),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set(key, v);
            }
        }
        Ok(raw)
    }
}

fn cmd_run(args: &RunArgs) -> Result<i32, CliError> {
    let cfg = args.raw()?.into_config()?;
    let out = run(&cfg)?;
    if cfg.out.is_none() {
        print!("{}", out.json_text());
    }
    match out.status {
        Status::Ok => eprintln!("{}: ok ({})", cfg.algo, out.row.verdict),
        s => eprintln!("{}: {:?}: {}{}", cfg.algo, s, out.row.verdict, out.row.error),
    }
    Ok(out.status.exit_code())
}

fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.configs)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.configs.display())))?;
    let configs = parse_batch(&text)?;
    let out = bench(&configs);
    let csv = out.csv()?;
    match &args.csv {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    if out.failures > 0 {
        eprintln!("{} of {} runs failed", out.failures, out.rows.len());
    }
    Ok(out.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
