//! `trade-lab`: run regret experiments, check properties, export plot data.
//!
//! Exit codes: 0 success, 1 a property failed, 2 bad configuration or input.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trade_lab::harness::{replicate_with, EnvSpec};
use trade_lab::oracle;
use trade_lab::parallel::Execution;
use trade_lab::strategy::tuning;
use trade_lab::verify;

#[derive(Parser)]
#[command(name = "trade-lab", version, about = "Regret experiments for sequential bilateral trade")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file and write trace and summary CSVs.
    Run {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite.
    Verify {
        /// Only properties whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Log-log coordinates with reference slopes for a summary CSV, or
    /// expected-gain curves for named instances.
    Plotdata {
        /// A `<name>_summary.csv` written by `run`.
        summary: Option<PathBuf>,
        /// Instance as JSON, e.g. '{"family":"t23_lower","eps":0.7}'; repeatable.
        #[arg(long = "instance")]
        instances: Vec<String>,
        /// Output file; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the upper- and lower-bound tables.
    Bounds {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1_000u64, 10_000, 100_000, 1_000_000])]
        horizons: Vec<u64>,
    },
}

enum Failure {
    Property(String),
    Config(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Verify { filter } => cmd_verify(filter.as_deref()),
        Command::Plotdata { summary, instances, out } => cmd_plotdata(summary, &instances, out),
        Command::Bounds { horizons } => cmd_bounds(&horizons),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn cmd_run(path: &std::path::Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let file = config::load(path).map_err(Failure::Config)?;
    let dir = out.unwrap_or(file.output_dir);
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    let exec = Execution::from_env();
    println!("{:<28} {:>10} {:>14} {:>24} {:>14}", "experiment", "T", "mean regret", "95% CI", "upper bound");
    for cfg in &file.experiments {
        let summary = replicate_with(cfg, exec).map_err(|e| Failure::Config(format!("{}: {e}", cfg.name)))?;
        output::write_run(&dir, &summary).map_err(Failure::Config)?;
        for h in &summary.horizons {
            let s = h.final_stats();
            let bound = h.theoretical_upper_bound.map_or("-".to_string(), |b| format!("{b:.4e}"));
            println!(
                "{:<28} {:>10} {:>14.3} {:>24} {:>14}",
                cfg.name,
                h.horizon,
                s.mean_pseudo_regret,
                format!("[{:.3}, {:.3}]", s.ci_lo, s.ci_hi),
                bound
            );
        }
        match summary.fit() {
            Ok(f) => println!("{:<28} fitted exponent {:.3} (r^2 {:.3})", cfg.name, f.exponent, f.r_squared),
            Err(_) => println!("{:<28} fitted exponent - (needs 3 horizons with positive regret)", cfg.name),
        }
    }
    println!("wrote CSVs to {}", dir.display());
    Ok(())
}

fn cmd_verify(filter: Option<&str>) -> Result<(), Failure> {
    let outcomes = verify::run(filter);
    if outcomes.is_empty() {
        let names: Vec<&str> = verify::properties().iter().map(|p| p.name).collect();
        return Err(Failure::Config(format!("no property matches; known: {}", names.join(", "))));
    }
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        return Err(Failure::Property(format!("{failed} of {} properties failed", outcomes.len())));
    }
    println!("all {} properties passed", outcomes.len());
    Ok(())
}

fn cmd_plotdata(summary: Option<PathBuf>, instances: &[String], out: Option<PathBuf>) -> Result<(), Failure> {
    let mut sink: Box<dyn std::io::Write> = match &out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    };
    match (summary, instances.is_empty()) {
        (Some(path), true) => output::loglog(&path, &mut sink).map_err(Failure::Config),
        (None, false) => {
            let mut envs = Vec::new();
            for raw in instances {
                let env: EnvSpec = serde_json::from_str(raw)
                    .or_else(|_| serde_json::from_value(serde_json::json!({ "family": raw })))
                    .map_err(|e| Failure::Config(format!("instance {raw}: {e}")))?;
                let d = env
                    .distribution()
                    .map_err(|e| Failure::Config(format!("instance {raw}: {e}")))?
                    .ok_or_else(|| Failure::Config(format!("instance {raw}: the adversary has no expected-gain curve")))?;
                envs.push((env.label(), d));
            }
            output::curves(&envs, &mut sink).map_err(Failure::Config)
        }
        _ => Err(Failure::Config("give either a summary CSV or at least one --instance".into())),
    }
}

fn cmd_bounds(horizons: &[u64]) -> Result<(), Failure> {
    if horizons.iter().any(|&t| t < 2) {
        return Err(Failure::Config("horizons must be >= 2".into()));
    }
    println!("upper bounds (auto tuning; M = 24 for scouting bandits, M = 64/3 for scouting blindits)");
    println!("{:>10} {:>14} {:>14} {:>14}", "T", "fbp", "scouting_bandits", "scouting_blindits");
    for &t in horizons {
        let (t0, k) = tuning::scouting_bandits_auto(t);
        let (t0b, kb) = tuning::scouting_blindits_auto(t);
        println!(
            "{:>10} {:>14.4e} {:>14.4e} {:>14.4e}",
            t,
            oracle::bound_fbp(t),
            oracle::bound_sb_moss(t, t0, k, 24.0),
            oracle::bound_sbl(t, t0b, kb, 64.0 / 3.0)
        );
    }
    println!();
    println!("lower bounds c * rate");
    print!("{:<18} {:>8} {:>12}", "regime", "rate", "c");
    for &t in horizons {
        print!(" {:>12}", format!("T={t}"));
    }
    println!();
    for lb in oracle::lower_bound_constants() {
        print!("{:<18} {:>8} {:>12.6}", lb.regime, lb.rate, lb.constant);
        for &t in horizons {
            print!(" {:>12.3}", lb.at(t));
        }
        println!();
    }
    Ok(())
}
