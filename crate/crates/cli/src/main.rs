use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use ramstab::report::{self, golden_report};
use ramstab::{fixtures, Error, InputDocument};

/// Exact ramification data and stability certificates for branch extensions.
///
/// INPUT is a JSON document path, or `@sample` / `@berger` for a bundled
/// fixture. Set RAMSTAB_LOG=debug for diagnostics.
#[derive(Parser)]
#[command(name = "ramstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limiting ramification data V, R, M, E and the error coefficient C.
    LimitData {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The branch valuations, extended by predicted steps up to --depth.
    Branch {
        input: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability certificate. Several inputs are certified in parallel.
    Certify {
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transition functions φ_n, tower functions Φ_n, breaks and subfields.
    Hh {
        input: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Build over K_N for this N instead of the certified level.
        #[arg(long)]
        reindex: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ramification breaks and the elementary-subfield table.
    Breaks {
        input: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        reindex: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of N_n, coN_n, φ_n and Φ_n for n = 1..depth.
    Plot {
        input: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        reindex: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs the bundled fixtures end to end against the golden reports.
    Selftest {
        /// Write fresh golden reports into this directory instead of comparing.
        #[arg(long, hide = true)]
        bless: Option<PathBuf>,
    },
}

/// Exit 1: not certified or a tower invariant failed. Exit 2: bad input.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotStable { .. }
            | Error::TowerInvariant { .. }
            | Error::WildD { .. }
            | Error::Degenerate(_)
            | Error::Overflow(_)
            | Error::MissingErrorCoefficient => 1,
            _ => 2,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

fn load(input: &str) -> Result<InputDocument, Failure> {
    if let Some(name) = input.strip_prefix('@') {
        return fixtures::document(name)
            .ok_or_else(|| anyhow::anyhow!("unknown bundled fixture {name}; use @sample or @berger").into());
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
    Ok(InputDocument::from_json(&text).with_context(|| format!("parsing {input}"))?)
}

fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).context("serializing report")?;
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?,
        None => {
            if let Err(e) = writeln!(io::stdout().lock(), "{text}") {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    return Err(anyhow::Error::from(e).context("writing to stdout").into());
                }
            }
        }
    }
    Ok(())
}

fn certify_one(input: &str) -> (Value, u8) {
    let result = load(input).and_then(|doc| report::certify_report(&doc).map_err(Failure::from));
    match result {
        Ok(r) => {
            let code = if r.certificate.kind.is_certified() { 0 } else { 1 };
            log::info!("{input}: {:?}", r.certificate.kind);
            (serde_json::json!({ "input": input, "certificate": r }), code)
        }
        Err(f) => (serde_json::json!({ "input": input, "error": format!("{:#}", f.error) }), f.code),
    }
}

fn selftest(bless: Option<&Path>) -> Result<u8, Failure> {
    let mut failures = 0;
    for (name, command, golden) in fixtures::GOLDEN {
        let doc = fixtures::document(name).expect("golden fixtures are bundled");
        let got = golden_report(&doc, command, fixtures::GOLDEN_DEPTH)?;
        if let Some(dir) = bless {
            let path = dir.join(format!("{name}.{command}.json"));
            let text = serde_json::to_string_pretty(&got).context("serializing report")?;
            fs::write(&path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
            continue;
        }
        let want: Value = serde_json::from_str(golden).context("parsing golden report")?;
        if got == want {
            println!("ok        {name} {command}");
        } else {
            failures += 1;
            println!("MISMATCH  {name} {command}");
        }
    }
    Ok(u8::from(failures > 0))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::LimitData { input, out } => {
            emit(&report::limit_data_report(&load(&input)?)?, out.as_deref())?;
        }
        Command::Branch { input, depth, out } => {
            emit(&report::branch_report(&load(&input)?, depth)?, out.as_deref())?;
        }
        Command::Certify { inputs, jobs, out } => {
            if inputs.len() == 1 {
                let doc = load(&inputs[0])?;
                let r = report::certify_report(&doc)?;
                emit(&r, out.as_deref())?;
                return Ok(if r.certificate.kind.is_certified() { 0 } else { 1 });
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()
                .context("building thread pool")?;
            let results: Vec<(Value, u8)> = pool.install(|| inputs.par_iter().map(|i| certify_one(i)).collect());
            let code = results.iter().map(|r| r.1).max().unwrap_or(0);
            let values: Vec<Value> = results.into_iter().map(|r| r.0).collect();
            emit(&values, out.as_deref())?;
            return Ok(code);
        }
        Command::Hh {
            input,
            depth,
            reindex,
            out,
        } => {
            emit(&report::hh_report(&load(&input)?, depth, reindex)?, out.as_deref())?;
        }
        Command::Breaks {
            input,
            depth,
            reindex,
            out,
        } => {
            emit(&report::breaks_report(&load(&input)?, depth, reindex)?, out.as_deref())?;
        }
        Command::Plot {
            input,
            depth,
            reindex,
            out,
        } => {
            let setup = report::tower_setup(&load(&input)?, reindex)?;
            let svg = ramstab::plot::render_tower(&setup.base, depth)?;
            write_text(&svg, Some(&out))?;
        }
        Command::Selftest { bless } => return selftest(bless.as_deref()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RAMSTAB_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
