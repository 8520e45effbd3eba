use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use muskat::commands::{self, RunRequest};
use muskat::config::RunConfig;
use muskat::Error;

#[derive(Parser)]
#[command(name = "muskat", version, about = "Muskat interface over a permeability jump")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the Picard tolerance (run, linear) or the oracle bound (oracle-check).
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the configured datum and write trajectory artifacts.
    Run {
        #[command(flatten)]
        common: Common,
        /// Refuse to run unless the datum is certified admissible.
        #[arg(long)]
        require_certificate: bool,
        /// Defaults to the config's output dir, then $MUSKAT_OUTPUT_DIR.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Continue from a checkpoint written by an earlier run of this config.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Print the certificate JSON to stdout and a margin table to stderr.
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the linear symbol as CSV.
    Linear {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        k_max: i64,
        /// Also measure decay rates from tiny-amplitude runs.
        #[arg(long)]
        measure: bool,
    },
    /// Compare the fast paths with the brute-force oracle.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        corrupt_fast_path: bool,
    },
    /// Run several configs in parallel, one output directory each.
    Sweep {
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        require_certificate: bool,
    },
}

fn load(common: &Common) -> muskat::Result<RunConfig> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(t) = common.tolerance {
        cfg.solver.picard_tol = t;
        cfg.solver.oracle_tolerance = t;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> muskat::Result<i32> {
    match cli.cmd {
        Cmd::Run { common, require_certificate, output_dir, resume } => {
            let cfg = load(&common)?;
            let req = RunRequest {
                output_dir: commands::output_dir(output_dir.as_deref(), &cfg),
                require_certificate,
                resume,
            };
            let (tr, _) = commands::cmd_run(&cfg, &req)?;
            eprintln!("{} steps, {} rows in {}", tr.steps, tr.rows.len(), req.output_dir.display());
        }
        Cmd::Certify { common } => {
            let cert = commands::cmd_certify(&load(&common)?)?;
            eprint!("{}", cert.table());
            println!("{}", serde_json::to_string_pretty(&cert)?);
        }
        Cmd::Linear { common, k_max, measure } => {
            let rows = commands::cmd_linear(&load(&common)?, k_max, measure)?;
            print!("{}", commands::dispersion_csv(&rows));
        }
        Cmd::OracleCheck { common, corrupt_fast_path } => {
            let rep = commands::cmd_oracle_check(&load(&common)?, corrupt_fast_path)?;
            for (what, v) in &rep.discrepancies {
                println!("{what:<18} {v:.3e}");
            }
            rep.check()?;
        }
        Cmd::Sweep { configs, output_dir, threads, require_certificate } => {
            let root = output_dir
                .or_else(|| std::env::var_os(commands::OUTPUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("muskat-out"));
            let out = commands::cmd_sweep(&configs, &root, threads, require_certificate)?;
            let mut worst = 0;
            for o in &out {
                println!("{} -> {} [{}] {}", o.config.display(), o.output_dir.display(), o.exit_code, o.message);
                worst = worst.max(o.exit_code);
            }
            return Ok(worst);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            report_blowup(&e);
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn report_blowup(e: &Error) {
    if let Error::BlowUp { last_valid, .. } = e {
        eprintln!("last valid state at t = {}", last_valid.time);
    }
}
