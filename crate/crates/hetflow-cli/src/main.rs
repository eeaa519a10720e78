//! hetflow: run and validate curvature-flow experiments from flat config
//! files.
//!
//! Exit codes: 0 success, 2 config error (parse, range, or unknown key),
//! 3 runtime failure (solver breakdown or unwritable artifacts). A runtime
//! failure still writes manifest.json with the error note, so partial
//! artifacts remain inspectable.

mod artifacts;
mod config;
mod experiments;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

const EXIT_CONFIG: i32 = 2;
const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "hetflow",
    version,
    about = "Numerical laboratory for curvature-driven flow with bounded forcing"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a config file and write artifacts
    Run {
        /// Config file (flat `key = value` lines)
        #[arg(long)]
        config: PathBuf,
        /// Output directory; the HETFLOW_OUT environment variable overrides
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker cap for experiments that fan out (homogenization sweeps)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Seed override; replaces the `seed` config key
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and range-check a config without computing anything
    Validate {
        /// Config file (flat `key = value` lines)
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run {
            config,
            out,
            jobs,
            seed,
        } => cmd_run(&config, out, jobs, seed),
        Cmd::Validate { config } => cmd_validate(&config),
    };
    std::process::exit(code);
}

fn read_config(path: &Path) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("config error: cannot read {}: {e}", path.display());
        EXIT_CONFIG
    })
}

fn cmd_validate(path: &Path) -> i32 {
    let text = match read_config(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match config::build(&text, None, 1) {
        Ok(cfg) => {
            println!("ok: {} config, {} keys", cfg.experiment, cfg.echo.len());
            0
        }
        Err(e) => {
            eprintln!("config error: {e}");
            EXIT_CONFIG
        }
    }
}

fn cmd_run(path: &Path, out_flag: PathBuf, jobs: usize, seed: Option<u64>) -> i32 {
    let text = match read_config(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let cfg = match config::build(&text, seed, jobs) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = std::env::var_os("HETFLOW_OUT")
        .map(PathBuf::from)
        .unwrap_or(out_flag);
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!(
            "config error: cannot create output directory {}: {e}",
            out.display()
        );
        return EXIT_CONFIG;
    }

    let started = Instant::now();
    let result = experiments::run(&cfg, &out);
    let wall = started.elapsed().as_secs_f64();

    // The manifest is written last so the failure note (if any) lands in it.
    // Wall time is the one field that varies between identical runs; every
    // data artifact is byte-reproducible.
    let error_note = result.as_ref().err().cloned();
    let manifest = serde_json::json!({
        "tool": "hetflow",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment,
        "config": cfg.echo,
        "jobs": jobs,
        "seed": cfg.seed,
        "status": if error_note.is_none() { "ok" } else { "failed" },
        "error": error_note,
        "wall_seconds": wall,
    });
    let manifest_path = out.join("manifest.json");
    if let Err(e) = artifacts::write_json(&manifest_path, &manifest) {
        eprintln!("error: cannot write {}: {e}", manifest_path.display());
        return EXIT_RUNTIME;
    }

    match result {
        Ok(_) => {
            println!("ok: {} experiment, artifacts in {}", cfg.experiment, out.display());
            0
        }
        Err(note) => {
            eprintln!("run failed: {note}");
            EXIT_RUNTIME
        }
    }
}
