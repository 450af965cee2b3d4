//! `saris`: Monte-Carlo runs and parameter sweeps of the RIS optimizer.

mod experiment;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use saris_core::scenario::{parse_config, ScenarioConfig};
use saris_core::Error;

use experiment::{run_all, summarize, Algo, Settings};
use output::{config_hash, write_metadata, write_run_outputs, write_sweep, SweepRow};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "saris", version, about = "RIS-aided multi-user link optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run independent realizations of one scenario.
    Run(Common),
    /// Repeat `run` for each value of one scenario parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        sweep: SweepVar,
        /// Comma-separated values, in the config file syntax.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file; the reference scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    algo: AlgoChoice,
    /// Realizations per algorithm (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// SMSE change threshold, relative to the initial precoder gain.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
    /// Reactance draws of the random baseline.
    #[arg(long, default_value_t = 100)]
    random_draws: usize,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum AlgoChoice {
    Saris,
    Mismatched,
    Random,
    All,
}

impl AlgoChoice {
    fn algos(self) -> Vec<Algo> {
        match self {
            AlgoChoice::Saris => vec![Algo::Saris],
            AlgoChoice::Mismatched => vec![Algo::Mismatched],
            AlgoChoice::Random => vec![Algo::Random],
            AlgoChoice::All => Algo::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SweepVar {
    #[value(name = "N")]
    N,
    #[value(name = "d")]
    D,
    #[value(name = "N_c")]
    Nc,
    #[value(name = "L")]
    L,
    #[value(name = "R0")]
    R0,
}

impl SweepVar {
    fn key(self) -> &'static str {
        match self {
            SweepVar::N => "N",
            SweepVar::D => "d",
            SweepVar::Nc => "N_c",
            SweepVar::L => "L",
            SweepVar::R0 => "R0",
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }
    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } | Error::Geometry(_) | Error::InvalidArgument(_) => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Failure { code, message: e.to_string() }
    }
}

fn load_config(c: &Common) -> Result<ScenarioConfig, Failure> {
    let text = match &c.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::io(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text).map_err(|e| {
        let origin = c.config.as_ref().map_or("<default>".to_string(), |p| p.display().to_string());
        Failure::config(format!("{origin}: {e}"))
    })?;
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if let Some(e) = c.epsilon {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Failure::config(format!("--epsilon must be positive, got {e}")));
        }
    }
    if c.max_iter == Some(0) {
        return Err(Failure::config("--max-iter must be at least 1"));
    }
    if c.random_draws == 0 {
        return Err(Failure::config("--random-draws must be at least 1"));
    }
    if c.jobs == Some(0) {
        return Err(Failure::config("--jobs must be at least 1"));
    }
    Ok(cfg)
}

/// Replace one key of the configuration, going through the parser so the
/// value gets the same validation as in a file.
fn with_value(base: &ScenarioConfig, key: &str, value: &str) -> Result<ScenarioConfig, Failure> {
    let prefix = format!("{key} = ");
    let mut text: String = base
        .serialize()
        .lines()
        .filter(|l| !l.starts_with(&prefix))
        .map(|l| format!("{l}\n"))
        .collect();
    text.push_str(&format!("{key} = {value}\n"));
    parse_config(&text).map_err(|e| Failure::config(format!("--values {value}: {e}")))
}

fn settings(c: &Common) -> Settings {
    Settings {
        epsilon: c.epsilon,
        max_iter: c.max_iter,
        random_draws: c.random_draws,
    }
}

fn pool(c: &Common) -> Result<rayon::ThreadPool, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = c.jobs {
        b = b.num_threads(j);
    }
    b.build().map_err(|e| Failure { code: EXIT_NUMERIC, message: e.to_string() })
}

fn prepare_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))
}

fn metadata(command: &str, cfg: &ScenarioConfig, c: &Common, algos: &[Algo]) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg.serialize(),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "rng": cfg.rng,
        "algorithms": algos.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "epsilon": c.epsilon,
        "max_iter": c.max_iter,
        "random_draws": c.random_draws,
    })
}

fn run(c: &Common) -> Result<(), Failure> {
    let cfg = load_config(c)?;
    let algos = c.algo.algos();
    let s = settings(c);
    let records = pool(c)?.install(|| run_all(&cfg, &algos, &s))?;
    let summary = summarize(&records, &algos);
    let hash = config_hash(&cfg);

    prepare_out(&c.out)?;
    let io = |e: std::io::Error| Failure::io(format!("writing {}: {e}", c.out.display()));
    write_run_outputs(&c.out, &records, &summary, &hash).map_err(io)?;
    write_metadata(&c.out, &metadata("run", &cfg, c, &algos)).map_err(io)?;
    for s in &summary {
        println!("{:<10} mean sum-rate {:.4} (std {:.4}) over {} runs", s.algo, s.mean_rate, s.std_rate, s.trials);
    }
    Ok(())
}

fn sweep(c: &Common, var: SweepVar, values: &[String]) -> Result<(), Failure> {
    let base = load_config(c)?;
    let algos = c.algo.algos();
    let s = settings(c);
    let configs: Vec<(String, ScenarioConfig)> = values
        .iter()
        .map(|v| Ok((v.trim().to_string(), with_value(&base, var.key(), v.trim())?)))
        .collect::<Result<_, Failure>>()?;
    let pool = pool(c)?;
    let mut rows = Vec::new();
    for (value, cfg) in &configs {
        let records = pool.install(|| run_all(cfg, &algos, &s))?;
        for sm in summarize(&records, &algos) {
            rows.push(SweepRow {
                var: var.key().to_string(),
                value: value.clone(),
                algo: sm.algo,
                mean_rate: sm.mean_rate,
                std_rate: sm.std_rate,
                mean_iters: sm.mean_iters,
                mean_time_s: sm.mean_time_s,
            });
        }
    }

    prepare_out(&c.out)?;
    let io = |e: std::io::Error| Failure::io(format!("writing {}: {e}", c.out.display()));
    write_sweep(&c.out, &rows).map_err(io)?;
    let mut meta = metadata("sweep", &base, c, &algos);
    meta["sweep"] = serde_json::json!({
        "var": var.key(),
        "values": values,
        "config_hashes": configs.iter().map(|(_, cfg)| config_hash(cfg)).collect::<Vec<_>>(),
    });
    write_metadata(&c.out, &meta).map_err(io)?;
    for r in &rows {
        println!("{}={:<8} {:<10} mean sum-rate {:.4}", r.var, r.value, r.algo, r.mean_rate);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => run(c),
        Command::Sweep { common, sweep: var, values } => sweep(common, *var, values),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("saris: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
