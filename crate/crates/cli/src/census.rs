use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{ArgGroup, Args, ValueEnum};
use octant_core::census::{certify_batch, read_records, write_records, CensusRecord, Tallies, EQUIVALENCE_CAVEAT};
use octant_core::stepmodel::{enumerate_models, StepSet, MAX_ID};
use serde_json::json;

use crate::{parse_model, positive, RunConfig};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// Every certificate.
    All,
    /// Only models whose group closed within the cap.
    Finite,
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["range", "file", "all"])))]
pub struct CensusArgs {
    /// Inclusive id range such as 1-1000 or 0x1-0x3ff; non-canonical ids are skipped.
    #[arg(long)]
    range: Option<String>,
    /// Model list: one step list or hex id per line, '#' starts a comment.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Every canonical model.
    #[arg(long)]
    all: bool,
    /// Output prefix; writes PREFIX.jsonl, PREFIX.csv and PREFIX.tallies.json.
    #[arg(long, default_value = "census")]
    out: PathBuf,
    /// Skip models already recorded under the output prefix.
    #[arg(long)]
    resume: bool,
    /// Worker threads.
    #[arg(long, default_value_t = default_jobs(), value_parser = positive)]
    jobs: usize,
    /// Which certificates go to the JSONL file; the CSV always has every model.
    #[arg(long, value_enum, default_value = "all")]
    emit: Emit,
    /// Record 0 in the millis column so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Models certified between flushes.
    #[arg(long, default_value_t = 4096, value_parser = positive)]
    chunk: usize,
    #[command(flatten)]
    config: RunConfig,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn parse_id(text: &str) -> Result<u32> {
    let t = text.trim();
    let v = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(h) => u32::from_str_radix(h, 16),
        None => t.parse(),
    };
    v.with_context(|| format!("invalid id {t:?}"))
}

fn parse_range(text: &str) -> Result<(u32, u32)> {
    let (a, b) = text.split_once('-').with_context(|| format!("range {text:?} must look like LO-HI"))?;
    let (lo, hi) = (parse_id(a)?, parse_id(b)?);
    ensure!(lo <= hi, "empty range {text:?}");
    ensure!(hi <= MAX_ID, "range end exceeds {MAX_ID:#x}");
    Ok((lo, hi))
}

/// Canonical, deduplicated, id-sorted models from a list file.
fn read_model_file(path: &Path) -> Result<Vec<StepSet>> {
    let file = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let mut models = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let s = parse_model(body).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        models.push(s.axis_canonical());
    }
    models.sort_by_key(|s| s.id());
    models.dedup();
    Ok(models)
}

/// Records already written under the prefix, after cross-checking both files.
fn load_existing(csv_path: &Path, jsonl_path: &Path) -> Result<Vec<CensusRecord>> {
    let corrupt = |p: &Path| format!("corrupt resume file {}", p.display());
    let records = match File::open(csv_path) {
        Ok(f) => read_records(f).map_err(anyhow::Error::msg).with_context(|| corrupt(csv_path))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e).with_context(|| format!("reading {}", csv_path.display())),
    };
    let mut last = 0u32;
    for r in &records {
        let id = parse_id(&r.id).with_context(|| corrupt(csv_path))?;
        if id <= last {
            bail!("{}: ids out of order at {}", corrupt(csv_path), r.id);
        }
        last = id;
    }
    let ids: HashSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let mut reader = match File::open(jsonl_path) {
        Ok(f) => BufReader::new(f),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(records),
        Err(e) => return Err(e).with_context(|| format!("reading {}", jsonl_path.display())),
    };
    let mut line = String::new();
    for n in 1.. {
        line.clear();
        if reader.read_line(&mut line).with_context(|| corrupt(jsonl_path))? == 0 {
            break;
        }
        if !line.ends_with('\n') {
            bail!("{}: truncated line {n}", corrupt(jsonl_path));
        }
        let v: serde_json::Value = serde_json::from_str(&line).with_context(|| format!("{} line {n}", corrupt(jsonl_path)))?;
        let id = v["model"].as_str().unwrap_or_default();
        if !ids.contains(id) {
            bail!("{}: line {n} has model {id:?} missing from {}", corrupt(jsonl_path), csv_path.display());
        }
    }
    Ok(records)
}

fn tallies_json(records: &[CensusRecord]) -> serde_json::Value {
    let mut t = Tallies::default();
    let mut finite = 0usize;
    for r in records {
        t.add(&r.verdict);
        finite += r.group_order.is_some() as usize;
    }
    json!({
        "total": t.total,
        "finite_group": finite,
        "verdicts": t.counts,
        "caveat": EQUIVALENCE_CAVEAT,
    })
}

pub fn run(args: CensusArgs) -> Result<u8> {
    let config = args.config.certify_config();
    let csv_path = with_ext(&args.out, "csv");
    let jsonl_path = with_ext(&args.out, "jsonl");
    let tallies_path = with_ext(&args.out, "tallies.json");

    let mut records = if args.resume { load_existing(&csv_path, &jsonl_path)? } else { Vec::new() };
    let done: HashSet<u32> = records.iter().map(|r| parse_id(&r.id)).collect::<Result<_>>()?;
    let last_done = done.iter().copied().max().unwrap_or(0);

    let models: Box<dyn Iterator<Item = StepSet>> = if let Some(r) = &args.range {
        let (lo, hi) = parse_range(r)?;
        Box::new(enumerate_models(lo..=hi, |_| true))
    } else if let Some(p) = &args.file {
        Box::new(read_model_file(p)?.into_iter())
    } else {
        Box::new(enumerate_models(1..=MAX_ID, |_| true))
    };
    let mut pending = models.filter(|s| !done.contains(&s.id())).peekable();
    if let Some(first) = pending.peek() {
        ensure!(
            first.id() > last_done,
            "resume would insert {} before already recorded {:#09x}; outputs must stay id-sorted",
            first.hex_id(),
            last_done
        );
    }

    let open = |p: &Path| -> Result<BufWriter<File>> {
        let f = OpenOptions::new()
            .create(true)
            .write(true)
            .append(args.resume)
            .truncate(!args.resume)
            .open(p)
            .with_context(|| format!("opening {}", p.display()))?;
        Ok(BufWriter::new(f))
    };
    let mut jsonl = open(&jsonl_path)?;
    let mut csv_out = open(&csv_path)?;
    let mut need_header = records.is_empty() && csv_path.metadata().map(|m| m.len() == 0).unwrap_or(true);

    loop {
        let chunk: Vec<StepSet> = pending.by_ref().take(args.chunk).collect();
        if chunk.is_empty() {
            break;
        }
        let results = certify_batch(&chunk, &config, args.jobs);
        let mut rows = Vec::with_capacity(results.len());
        for (cert, millis) in &results {
            if args.emit == Emit::All || cert.group_order.is_some() {
                writeln!(jsonl, "{}", cert.to_json())?;
            }
            rows.push(CensusRecord::new(cert, if args.no_timing { 0 } else { *millis }));
        }
        jsonl.flush()?;
        write_records(&mut csv_out, &rows, need_header)?;
        csv_out.flush()?;
        need_header = false;
        records.extend(rows);
    }

    let tallies = serde_json::to_string_pretty(&tallies_json(&records))?;
    std::fs::write(&tallies_path, format!("{tallies}\n")).with_context(|| format!("writing {}", tallies_path.display()))?;
    println!("{tallies}");
    Ok(0)
}
