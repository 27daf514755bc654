use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sposs::descriptor::instance_to_json;
use sposs::harness::{self, Config, ParamMap, ParamValue};
use sposs::Error;

#[derive(Parser)]
#[command(name = "sposs", version, about = "Sparsification experiments for stochastic probing")]
struct Cli {
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true, env = "SPOSS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials_override: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate each [[experiment]] and write one CSV row per entry.
    Run(Common),
    /// Per-element balance of a contention resolution scheme.
    Balance(Common),
    /// Statistical checks of the exchange and stitching procedures.
    Certify(Common),
    /// Compare the simplex solver against vertex enumeration on random LPs.
    Lpcheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance as JSON.
    Gen {
        /// rank1, blocks or equal_partition.
        name: String,
        /// Generator parameter, e.g. `--set n=50`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_value(raw: &str) -> ParamValue {
    if let Ok(i) = raw.parse::<i64>() {
        ParamValue::Int(i)
    } else if let Ok(x) = raw.parse::<f64>() {
        ParamValue::Float(x)
    } else if let Ok(b) = raw.parse::<bool>() {
        ParamValue::Bool(b)
    } else {
        ParamValue::Str(raw.to_string())
    }
}

fn parse_sets(items: &[String]) -> Result<ParamMap, Error> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got {kv:?}")))?;
            Ok((k.trim().to_string(), parse_value(v.trim())))
        })
        .collect()
}

fn load(path: &Path) -> Result<Config, Error> {
    Config::load(path).map_err(|e| match e {
        Error::Io(io) => Error::Parse(format!("{}: {io}", path.display())),
        other => other,
    })
}

/// Returns whether every check passed.
fn dispatch(command: Command) -> Result<bool, Error> {
    match command {
        Command::Run(c) => {
            let cfg = load(&c.config)?;
            let rows = harness::run_experiments(&cfg, c.trials_override)?;
            let mut out = output(&c.out)?;
            harness::write_run_csv(&mut out, &rows)?;
            out.flush()?;
            for r in &rows {
                let ratio = r.ratio_mean.map_or("-".to_string(), |v| format!("{v:.4}"));
                eprintln!(
                    "{} / {}: ratio {ratio}, trials {}, {:.2}s {}",
                    r.instance, r.sparsifier, r.trials, r.wall_time, r.notes
                );
            }
            Ok(true)
        }
        Command::Balance(c) => {
            let cfg = load(&c.config)?;
            let mut out = output(&c.out)?;
            harness::run_balance(&cfg, &mut out, c.trials_override)?;
            out.flush()?;
            Ok(true)
        }
        Command::Certify(c) => {
            let cfg = load(&c.config)?;
            let mut out = output(&c.out)?;
            let ok = harness::run_certify(&cfg, &mut out, c.trials_override)?;
            out.flush()?;
            Ok(ok)
        }
        Command::Lpcheck { config, out } => {
            let cfg = load(&config)?;
            let mut w = output(&out)?;
            let ok = harness::run_lpcheck(&cfg, &mut w)?;
            w.flush()?;
            Ok(ok)
        }
        Command::Gen { name, set, out } => {
            let inst = harness::generate(&name, &parse_sets(&set)?)?;
            let mut w = output(&out)?;
            writeln!(w, "{}", instance_to_json(&inst)?)?;
            w.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("sposs: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("sposs: some checks failed");
            ExitCode::from(1)
        }
        Err(e @ Error::Parse(_)) => {
            eprintln!("sposs: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("sposs: {e}");
            ExitCode::from(1)
        }
    }
}
