//! `advcap`: rates, tables, simulations, sweeps and code generation from a
//! single TOML config.
//!
//! Exit codes: 0 success, 1 config error, 2 infeasible spec, 3 distortion
//! audit or invariant failure.

use std::path::PathBuf;
use std::process::ExitCode;

use advcap::workflow::{run, RunConfig, Workflow};
use advcap::Error;
use anyhow::Context;
use clap::Parser;
use log::{error, info};

#[derive(Debug, Parser)]
#[command(name = "advcap", version, about = "Capacity and simulation toolkit for adversarial multi-route channels")]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// rates, table1, simulate, sweep or codegen; overrides `workflow`.
    #[arg(long)]
    workflow: Option<String>,
    /// Trials per placement (simulate).
    #[arg(long)]
    trials: Option<usize>,
    /// Block length (simulate, codegen).
    #[arg(long)]
    n: Option<usize>,
    /// Only print errors.
    #[arg(long)]
    quiet: bool,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_AUDIT: u8 = 3;

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Infeasible(_) | Error::NotApplicable { .. } | Error::VarshamovExhausted { .. }) => EXIT_INFEASIBLE,
        Some(Error::SearchTooLarge { .. }) => EXIT_INFEASIBLE,
        Some(Error::ConstraintViolation(_)) => EXIT_AUDIT,
        _ => EXIT_CONFIG,
    }
}

fn load(args: &Args) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let w = args
                .workflow
                .as_deref()
                .ok_or_else(|| Error::Config("give --config or at least --workflow".into()))?;
            RunConfig::from_toml_str(&format!("workflow = {w:?}"))?
        }
    };
    if let Some(w) = &args.workflow {
        cfg.workflow = w.parse::<Workflow>()?;
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(d) = &args.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(t) = args.trials {
        let sim = cfg
            .simulate
            .as_mut()
            .ok_or_else(|| Error::Config("--trials needs a [simulate] table".into()))?;
        sim.trials = t;
    }
    if let Some(n) = args.n {
        match (cfg.simulate.as_mut(), cfg.codegen.as_mut()) {
            (None, None) => return Err(Error::Config("--n needs a [simulate] or [codegen] table".into()).into()),
            (s, c) => {
                if let Some(s) = s {
                    s.block_length = n;
                }
                if let Some(c) = c {
                    c.n = n;
                }
            }
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .format_target(false)
        .init();

    let result = load(&args).and_then(|cfg| {
        let out = run(&cfg, &mut |msg| info!("{msg}"))?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            if !args.quiet {
                println!("{}", out.summary);
                for f in &out.files {
                    info!("wrote {}", f.display());
                }
            }
            if out.audit_passed {
                ExitCode::SUCCESS
            } else {
                error!("distortion audit failed: a block exceeded its route budget");
                ExitCode::from(EXIT_AUDIT)
            }
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
