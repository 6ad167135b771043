//! Command-line driver: config parsing, dispatch and report emission.

pub mod commands;
pub mod config;
pub mod error;

use clap::{Parser, Subcommand};
use commands::{Outcome, Params};
use config::{build_system, parse_config, Format, Mode, RunConfig, SystemSource};
use error::CliError;
use furst_core::rng::{with_workers, Streams};
use std::io::Write;
use std::path::PathBuf;

/// Environment variable that overrides the config seed.
pub const SEED_ENV: &str = "FURST_SEED";

#[derive(Parser, Debug)]
#[command(name = "furst", version, about = "Random walks on SL(2,C): assumption checks, estimators and experiments")]
struct Cli {
    /// Master seed (overrides FURST_SEED and the config seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Config file with [system], [params] and [output] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named system; replaces the config system.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Arithmetic mode: auto, exact or float.
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Estimator parameter, overriding [params].
    #[arg(long = "param", short = 'P', global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Standing assumptions: irreducibility, proximality, fixed circles.
    Check,
    /// Lyapunov exponent by two estimators.
    Chi,
    /// Random-walk entropy H_n / n by exact enumeration.
    Hrw {
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Separation of n-fold products.
    Dio {
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Sample the stationary measure.
    Sample {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Dimension of the stationary measure.
    Dim {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Conditional entropy of the first letter given the boundary point.
    Delta {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run one experiment.
    Exp {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(commands::EXPERIMENTS))]
        name: String,
    },
    /// Full pipeline report.
    Report,
    /// List the shipped systems.
    Presets,
}

/// Runs the CLI with the given environment seed; returns the exit code.
pub fn run_with_env<O: Write, E: Write>(argv: &[String], env_seed: Option<&str>, stdout: &mut O, stderr: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = if e.use_stderr() { e.render().to_string() } else { e.to_string() };
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, env_seed, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Runs the CLI reading `FURST_SEED` from the process environment.
pub fn run<O: Write, E: Write>(argv: &[String], stdout: &mut O, stderr: &mut E) -> i32 {
    let env = std::env::var(SEED_ENV).ok();
    run_with_env(argv, env.as_deref(), stdout, stderr)
}

/// Seed precedence: flag, then environment, then config, then 0.
fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: u64) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env {
        return v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not a 64-bit unsigned integer")));
    }
    Ok(config)
}

fn load_config(cli: &Cli, env_seed: Option<&str>) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.system = Some(SystemSource::Preset(p.clone()));
    }
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    for kv in &cli.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--param expects KEY=VALUE, got '{kv}'")))?;
        cfg.set_param(k.trim(), v.trim());
    }
    let flag = |k: &str, v: Option<usize>, cfg: &mut RunConfig| {
        if let Some(v) = v {
            cfg.set_param(k, &v.to_string());
        }
    };
    match &cli.command {
        Command::Hrw { nmax } | Command::Dio { nmax } => flag("nmax", *nmax, &mut cfg),
        Command::Sample { samples } | Command::Dim { samples } | Command::Delta { samples } => {
            flag("samples", *samples, &mut cfg)
        }
        _ => {}
    }
    cfg.seed = resolve_seed(cli.seed, env_seed, cfg.seed)?;
    if let Some(o) = &cli.out {
        cfg.output.path = Some(o.display().to_string());
    }
    if let Some(f) = cli.format {
        cfg.output.format = Some(f);
    }
    Ok(cfg)
}

fn execute<O: Write>(cli: Cli, env_seed: Option<&str>, stdout: &mut O) -> Result<i32, CliError> {
    let cfg = load_config(&cli, env_seed)?;
    let streams = Streams::new(cfg.seed);
    let outcome = match cli.command {
        Command::Presets => commands::presets(cfg.seed),
        ref cmd => {
            let sys = build_system(&cfg)?;
            let p = Params(&cfg);
            let go = || match cmd {
                Command::Check => commands::check(&sys, &p, &streams),
                Command::Chi => commands::chi(&sys, &p, &streams),
                Command::Hrw { .. } => commands::hrw(&sys, &p, &streams),
                Command::Dio { .. } => commands::dio(&sys, &p, &streams),
                Command::Sample { .. } => commands::sample(&sys, &p, &streams),
                Command::Dim { .. } => commands::dim(&sys, &p, &streams),
                Command::Delta { .. } => commands::delta(&sys, &p, &streams),
                Command::Exp { name } => commands::experiment(name, &sys, &p, &streams),
                Command::Report => commands::experiment("main-theorem", &sys, &p, &streams),
                Command::Presets => unreachable!(),
            };
            match cli.workers {
                Some(w) => with_workers(w, go)?,
                None => go()?,
            }
        }
    };
    let format = cfg.output.format.unwrap_or(Format::Json);
    let (text, code) = render(&outcome, format);
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(code)
}

/// Serialized output and exit code of a finished command.
pub fn render(outcome: &Outcome, format: Format) -> (String, i32) {
    match outcome {
        Outcome::Experiment(r) => {
            let text = match format {
                Format::Json => r.to_json_string(),
                Format::Csv => r.rows_csv(),
            };
            (text, r.verdict.exit_code())
        }
        Outcome::Measurement(r) | Outcome::Sample { report: r, .. } => {
            let text = match (format, outcome) {
                (Format::Csv, Outcome::Sample { csv, .. }) => csv.clone(),
                (Format::Csv, _) => r.rows_csv(),
                (Format::Json, _) => {
                    let mut j = r.to_json();
                    j["verdict"] = "complete".into();
                    let mut s = serde_json::to_string_pretty(&j).expect("serializable");
                    s.push('\n');
                    s
                }
            };
            (text, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(5), Some("6"), 7).unwrap(), 5);
        assert_eq!(resolve_seed(None, Some("6"), 7).unwrap(), 6);
        assert_eq!(resolve_seed(None, None, 7).unwrap(), 7);
        assert!(resolve_seed(None, Some("x"), 7).is_err());
    }
}
