use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use edlforge_cli::{run, Command, RunConfig};

/// Exact verification of extended Deligne–Lusztig constructions over
/// truncated ramified rings.
///
/// Settings come from the defaults, then `--config`, then the flags below.
/// Exit status: 0 when every check passes, 1 when one fails, 2 on usage or
/// configuration errors.
#[derive(Parser, Debug)]
#[command(name = "edlforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    q: Option<u64>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    r: Option<usize>,
    #[arg(long = "r-prime", global = true)]
    r_prime: Option<usize>,
    /// Ramification index; values above 2 use tame cyclic ramification.
    #[arg(long, global = true)]
    e: Option<u32>,
    #[arg(long, global = true)]
    variety: Option<String>,
    #[arg(long = "r-max", global = true)]
    r_max: Option<usize>,
    #[arg(long = "rprime-max", global = true)]
    rprime_max: Option<usize>,
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,
    #[arg(long = "group-cap", global = true)]
    group_cap: Option<u64>,
    #[arg(long = "point-cap", global = true)]
    point_cap: Option<u64>,
    /// Largest coefficient degree tried by the Lang search.
    #[arg(long = "lang-cap", global = true)]
    lang_cap: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random samples for seeded checks.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Evaluation budget for polynomial-system solving.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, visible_alias = "threads", global = true)]
    workers: Option<usize>,
    /// JSON report path (stdout when absent).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// CSV summary table path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
}

impl Cli {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        macro_rules! over {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        over!(q, n, r, r_prime, e, variety, r_max, rprime_max, n_max, group_cap, point_cap, lang_cap, seed, samples, budget, workers);
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        if self.csv.is_some() {
            cfg.csv = self.csv.clone();
        }
        cfg.timings |= self.timings;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.config().and_then(|cfg| {
        let report = run(cli.command, &cfg)?;
        report.emit(&cfg)?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {}", c.name, c.detail);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
