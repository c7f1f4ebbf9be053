//! Batch experiment runner: reproducible simulation, counting, estimation and
//! bound checking driven by a `key = value` config file.

mod commands;
mod config;
mod error;
mod output;
mod specs;

use std::path::PathBuf;
use std::time::Instant;

use config::Config;
use error::CliError;
use output::OutDir;

struct Args {
    config: PathBuf,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    format: Option<String>,
}

fn parse_args(mut argv: impl Iterator<Item = String>) -> Result<Args, CliError> {
    let mut args = Args {
        config: PathBuf::new(),
        seed: None,
        threads: None,
        out: None,
        format: None,
    };
    let mut config_seen = false;
    while let Some(flag) = argv.next() {
        let mut value = |name: &str| {
            argv.next()
                .ok_or_else(|| CliError::Config(format!("flag {name} needs a value")))
        };
        match flag.as_str() {
            "--config" => {
                args.config = PathBuf::from(value("--config")?);
                config_seen = true;
            }
            "--seed" => {
                let v = value("--seed")?;
                args.seed = Some(v.parse().map_err(|_| {
                    CliError::Config(format!("flag --seed: expected integer, got '{v}'"))
                })?);
            }
            "--threads" => {
                let v = value("--threads")?;
                args.threads = Some(v.parse().map_err(|_| {
                    CliError::Config(format!("flag --threads: expected integer, got '{v}'"))
                })?);
            }
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--format" => args.format = Some(value("--format")?),
            other => {
                return Err(CliError::Config(format!("unknown flag '{other}'")));
            }
        }
    }
    if !config_seen {
        return Err(CliError::Config("flag --config PATH is required".into()));
    }
    Ok(args)
}

fn run() -> Result<(), CliError> {
    let args = parse_args(std::env::args().skip(1))?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = Config::parse(&text)?;

    let command = cfg.require("command")?;
    let master_seed = match args.seed {
        Some(s) => {
            cfg.get("master_seed");
            s
        }
        None => cfg.require_u64("master_seed")?,
    };
    let threads = match args.threads {
        Some(t) => {
            cfg.get("threads");
            Some(t)
        }
        None => cfg.get_u64("threads")?.map(|t| t as usize),
    };
    let out_path = match &args.out {
        Some(p) => {
            cfg.get("out");
            p.clone()
        }
        None => PathBuf::from(cfg.get("out").unwrap_or_else(|| ".".into())),
    };
    let format = match &args.format {
        Some(f) => {
            cfg.get("format");
            f.clone()
        }
        None => cfg.get("format").unwrap_or_else(|| "csv".into()),
    };
    let json_mirror = match format.as_str() {
        "csv" => false,
        "json" => true,
        other => {
            return Err(CliError::Config(format!(
                "flag --format: expected csv|json, got '{other}'"
            )))
        }
    };

    let out = OutDir::create(&out_path)?;
    let started = Instant::now();
    let canonical = cfg.canonical_text();

    let ctx = commands::Ctx {
        cfg: &cfg,
        out: &out,
        master_seed,
        json_mirror,
    };
    levelcross::exec::with_threads(threads, || commands::dispatch(&command, &ctx))?;
    cfg.finish()?;

    let manifest = output::manifest_json(
        &canonical,
        master_seed,
        threads,
        started.elapsed().as_millis(),
    );
    out.write("manifest.json", &manifest)?;
    Ok(())
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
