use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lipflow::harness::{
    cmd_embed, cmd_enumerate, cmd_plotdata, cmd_verify, write_enumeration_csv, write_text, RunConfig,
    Selector,
};
use lipflow::Error;

/// Equivariant embeddings of flows into sequences of Lipschitz functions.
#[derive(Parser, Debug)]
#[command(name = "lipflow", version)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured number of universal entries.
    #[arg(long = "depth-k", global = true)]
    depth_k: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed the configured initial states and write manifests.
    Embed,
    /// Run every property suite and write a report.
    Verify,
    /// Print the listing k -> (i, j, r_j).
    Enumerate,
    /// Export `t,value` series from a manifest.
    PlotData {
        #[arg(long)]
        manifest: PathBuf,
        /// Entry index k (or component m of an orbit manifest).
        #[arg(long, conflicts_with = "all")]
        entry: Option<u64>,
        #[arg(long)]
        all: bool,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(k) = cli.depth_k {
        cfg.depth_k = k;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, file: &str, text: &str) -> Result<(), Error> {
    match out {
        Some(dir) => write_text(&dir.join(file), text),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Embed => {
            let cfg = load_config(cli)?;
            let dir = out.ok_or_else(|| Failure::Validation("embed needs --out <dir>".into()))?;
            let summary = cmd_embed(&cfg, dir)?;
            for rec in &summary.states {
                println!("{}", dir.join(&rec.universal_manifest).display());
            }
        }
        Command::Verify => {
            let cfg = load_config(cli)?;
            let report = cmd_verify(&cfg)?;
            emit(out, "report.json", &report.to_json())?;
            for p in report.failures() {
                eprintln!("FAIL {}: defect {:?} > budget {}", p.name, p.max_defect, p.budget);
            }
            if !report.pass {
                return Err(Failure::Numerical(
                    "some properties exceeded their budgets".into(),
                ));
            }
        }
        Command::Enumerate => {
            let k_max = match cli.depth_k {
                Some(k) => k,
                None => load_config(cli)?.depth_k,
            };
            let rows = cmd_enumerate(k_max)?;
            let mut buf = Vec::new();
            write_enumeration_csv(&rows, &mut buf)?;
            emit(
                out,
                "enumeration.csv",
                &String::from_utf8(buf).expect("csv is UTF-8"),
            )?;
        }
        Command::PlotData { manifest, entry, all } => {
            let selector = match (entry, all) {
                (Some(k), _) => Selector::Entry(*k),
                (None, true) => Selector::All,
                // an impossible index yields the list of available entries
                (None, false) => Selector::Entry(0),
            };
            let series = cmd_plotdata(manifest, selector, out.unwrap_or(Path::new(".")))?;
            for s in &series {
                println!("{}", s.path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
