//! `octant`: certify octant walk models from the command line.
//!
//! Exit codes: 0 certified (or oracle/verify pass), 1 usage or input error
//! (and verify mismatch), 2 zero orbit sum, 3 group cap exceeded / lower
//! dimensional / parity conflict, 4 obstructed / inconclusive, 5 oracle failure.

mod census;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use octant_core::certifier::{certify, verify_certificate, Certificate, CertifyConfig, DisjointnessMode};
use octant_core::oracle::run_oracle;
use octant_core::stepmodel::StepSet;
use octant_core::walkgroup::DEFAULT_GROUP_CAP;

const EXIT_USAGE: u8 = 1;
const EXIT_ORACLE_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "octant", version, about = "Certify D-finiteness of octant lattice walk models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct RunConfig {
    /// Largest group order explored before giving up.
    #[arg(long, default_value_t = DEFAULT_GROUP_CAP, value_parser = positive)]
    group_cap: usize,
    /// Set the shifted cones must avoid: positivity or paper-cone.
    #[arg(long, default_value = "positivity")]
    mode: DisjointnessMode,
    /// Run the leading-term search even when the orbit sum vanishes.
    #[arg(long)]
    no_zero_gate: bool,
}

impl RunConfig {
    pub fn certify_config(&self) -> CertifyConfig {
        CertifyConfig {
            group_cap: self.group_cap,
            mode: self.mode,
            zero_orbit_sum_gate: !self.no_zero_gate,
            ..CertifyConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certify one model and print its certificate.
    Analyze {
        /// Step list such as "(1,0,0),(-1,0,0)" or a hex id such as 0x0000001.
        model: String,
        #[command(flatten)]
        config: RunConfig,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify many models, writing PREFIX.jsonl and PREFIX.csv.
    Census(census::CensusArgs),
    /// Run the orbit-identity and positive-part checks for one model.
    Oracle {
        model: String,
        #[command(flatten)]
        config: RunConfig,
        /// Largest walk length compared.
        #[arg(long, default_value_t = 8)]
        oracle_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check certificates (one JSON object per line or a single object).
    Verify { certificate: PathBuf },
}

pub fn positive(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

pub fn parse_model(text: &str) -> Result<StepSet> {
    text.trim()
        .parse::<StepSet>()
        .with_context(|| format!("invalid model {text:?}"))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => writeln!(std::io::stdout().lock(), "{text}").context("writing stdout"),
    }
}

fn read_certificates(path: &PathBuf) -> Result<Vec<Certificate>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(c) = Certificate::from_json(&text) {
        return Ok(vec![c]);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Certificate::from_json(l).with_context(|| format!("{}:{}: malformed certificate", path.display(), i + 1)))
        .collect()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { model, config, out } => {
            let s = parse_model(&model)?;
            let cert = certify(&s, &config.certify_config());
            emit(&out, &cert.to_json_pretty())?;
            eprintln!("{} {}", s.hex_id(), cert.verdict);
            Ok(cert.verdict.exit_code() as u8)
        }
        Command::Census(args) => census::run(args),
        Command::Oracle {
            model,
            config,
            oracle_n,
            out,
        } => {
            let s = parse_model(&model)?;
            let report = run_oracle(&s, &config.certify_config(), oracle_n);
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            eprintln!("{} {} oracle {}", s.hex_id(), report.verdict, if report.pass { "pass" } else { "FAIL" });
            Ok(if report.pass { 0 } else { EXIT_ORACLE_FAILED })
        }
        Command::Verify { certificate } => {
            let certs = read_certificates(&certificate)?;
            if certs.is_empty() {
                bail!("{}: no certificates", certificate.display());
            }
            let mut failed = 0;
            for c in &certs {
                if let Err(e) = verify_certificate(c) {
                    eprintln!("{}: mismatch at {e}", c.model.hex_id());
                    failed += 1;
                }
            }
            eprintln!("verified {} of {} certificates", certs.len() - failed, certs.len());
            Ok(if failed == 0 { 0 } else { EXIT_USAGE })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
