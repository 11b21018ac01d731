//! Command-line front end: `run`, `aggregate` and `list`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wexplore::envs::ENV_IDS;
use wexplore::harness::{
    aggregate, bundles, read_outputs, run_matrix, write_outputs, AlgoId, HorizonMode, MemoryMode, OutputFormat,
    RecapRow, ScenarioConfig,
};
use wexplore::learning::InitMode;
use wexplore::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "wexplore", about = "Tabular exploration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run experiments and write the dataset.
    Run(RunArgs),
    /// Recompute the recap table of a written dataset.
    Aggregate {
        /// Dataset directory (written with --format both).
        dir: PathBuf,
    },
    /// List environments, algorithms, bundles or scenarios.
    List { what: ListWhat },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ListWhat {
    Envs,
    Algos,
    Bundles,
    Scenarios,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum InitArg {
    Zero,
    Optimistic,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum HorizonArg {
    Short,
    Long,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MemoryArg {
    Infinite,
    Finite,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Environment id, e.g. toy or deep_sea:10. Ignored with --bundle.
    #[arg(long, default_value = "toy")]
    env: String,
    /// Comma-separated algorithm ids, or "all".
    #[arg(long, default_value = "w_ucb")]
    algo: String,
    #[arg(long, value_enum, default_value = "zero")]
    init: InitArg,
    #[arg(long, value_enum, default_value = "short")]
    horizon: HorizonArg,
    /// Defaults to the environment's own choice.
    #[arg(long, value_enum)]
    memory: Option<MemoryArg>,
    /// Inclusive seed range A..B, or a single seed.
    #[arg(long, default_value = "1..5")]
    seeds: String,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long = "gamma-w")]
    gamma_w: Option<f64>,
    /// Predefined scenario set; overrides --env/--algo/--init/--horizon.
    #[arg(long)]
    bundle: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
}

/// Parses `A..B` (inclusive) or a single seed.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Usage(format!("bad seed range {s:?}, expected A..B"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

fn parse_algos(s: &str) -> Result<Vec<AlgoId>> {
    if s == "all" {
        return Ok(AlgoId::ALL.to_vec());
    }
    s.split(',').map(|a| a.trim().parse()).collect()
}

fn build_configs(a: &RunArgs) -> Result<Vec<ScenarioConfig>> {
    let seeds = parse_seeds(&a.seeds)?;
    let mut cfgs = match &a.bundle {
        Some(name) => bundles::bundle(name, 1)?,
        None => {
            let (init, horizon, name) = match (a.init, a.horizon) {
                (InitArg::Zero, HorizonArg::Short) => (InitMode::Zero, HorizonMode::Short, "zero_short"),
                (InitArg::Zero, HorizonArg::Long) => (InitMode::Zero, HorizonMode::Long, "zero_long"),
                (InitArg::Optimistic, HorizonArg::Short) => {
                    (InitMode::Optimistic, HorizonMode::Short, "optimistic_short")
                }
                (InitArg::Optimistic, HorizonArg::Long) => (InitMode::Optimistic, HorizonMode::Long, "optimistic_long"),
            };
            parse_algos(&a.algo)?
                .into_iter()
                .map(|algo| {
                    Ok(ScenarioConfig::new(&a.env, algo, 1)?
                        .with_name(name)
                        .with_init(init)
                        .with_horizon(horizon))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    for c in &mut cfgs {
        c.seeds = seeds.clone();
        if let Some(b) = a.budget {
            c.budget = b;
        }
        if let Some(g) = a.gamma_w {
            c.hyper.gamma_w = Some(g);
        }
        if let Some(m) = a.memory {
            c.memory_mode = match m {
                MemoryArg::Infinite => MemoryMode::Infinite,
                MemoryArg::Finite => MemoryMode::Finite,
                MemoryArg::None => MemoryMode::None,
            };
        }
        c.resolve()?;
    }
    Ok(cfgs)
}

fn print_recap(out: &mut dyn Write, rows: &[RecapRow]) -> std::io::Result<()> {
    writeln!(out, "{:<18} {:<16} {:<11} {:>5} {:>18} {:>18}", "scenario", "env", "algo", "seeds", "discovery %", "success %")?;
    for r in rows {
        writeln!(
            out,
            "{:<18} {:<16} {:<11} {:>5} {:>9.2} ± {:<6.2} {:>9.2} ± {:<6.2}",
            r.scenario,
            r.env,
            r.algo.as_str(),
            r.n_seeds,
            r.discovery.mean,
            r.discovery.ci95,
            r.success.mean,
            r.success.ci95
        )?;
    }
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match cli.command {
        Command::Run(a) => {
            let cfgs = build_configs(&a)?;
            let runs = run_matrix(&cfgs)?;
            let rows = aggregate(&runs);
            let format = match a.format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Both => OutputFormat::Both,
            };
            write_outputs(&runs, &rows, &cfgs, &a.out, format)?;
            print_recap(out, &rows).map_err(io)?;
            writeln!(out, "{} runs written to {}", runs.len(), a.out.display()).map_err(io)?;
        }
        Command::Aggregate { dir } => {
            let (runs, summary) = read_outputs(&dir)?;
            let rows = aggregate(&runs);
            write_outputs(&runs, &rows, &summary.configs, &dir, OutputFormat::Json)?;
            print_recap(out, &rows).map_err(io)?;
        }
        Command::List { what } => match what {
            ListWhat::Envs => {
                for (id, desc) in ENV_IDS {
                    writeln!(out, "{id:<16} {desc}").map_err(io)?;
                }
            }
            ListWhat::Algos => {
                for a in AlgoId::ALL {
                    writeln!(out, "{:<11} {}", a.as_str(), a.description()).map_err(io)?;
                }
            }
            ListWhat::Bundles => {
                for b in bundles::BUNDLES {
                    writeln!(out, "{b}").map_err(io)?;
                }
            }
            ListWhat::Scenarios => {
                for (name, _, _) in bundles::SCENARIOS {
                    writeln!(out, "{name}").map_err(io)?;
                }
            }
        },
    }
    Ok(())
}

/// Entry point with explicit output streams. Returns the process exit code:
/// 0 on success, 2 on usage or configuration errors, 1 otherwise.
pub fn cli_main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                2
            } else {
                1
            }
        }
    }
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    cli_main_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("a..b").is_err());
    }
}
