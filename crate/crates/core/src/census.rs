//! Batch certification over many models with a fixed worker count.
//! Results always come back in input order.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certifier::{certify, Certificate, CertifyConfig};
use crate::stepmodel::StepSet;

/// One CSV summary row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub id: String,
    pub verdict: String,
    pub group_order: Option<usize>,
    pub choice_index: Option<u128>,
    pub millis: u128,
}

impl CensusRecord {
    pub fn new(cert: &Certificate, millis: u128) -> Self {
        CensusRecord {
            id: cert.model.hex_id(),
            verdict: cert.verdict.name().to_string(),
            group_order: cert.group_order,
            choice_index: cert.choice_index,
            millis,
        }
    }
}

/// Write records as CSV, with a header line when `header` is set.
pub fn write_records<W: Write>(out: W, records: &[CensusRecord], header: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a CSV summary with header. Rows with a malformed id are errors.
pub fn read_records<R: Read>(input: R) -> Result<Vec<CensusRecord>, String> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (i, row) in rd.deserialize::<CensusRecord>().enumerate() {
        let r = row.map_err(|e| format!("row {}: {e}", i + 1))?;
        let valid = r.id.len() == 9 && r.id.starts_with("0x") && u32::from_str_radix(&r.id[2..], 16).is_ok();
        if !valid || r.verdict.is_empty() {
            return Err(format!("row {}: malformed record {r:?}", i + 1));
        }
        out.push(r);
    }
    Ok(out)
}

/// Certify every model on a pool of `jobs` workers.
pub fn certify_batch(models: &[StepSet], config: &CertifyConfig, jobs: usize) -> Vec<(Certificate, u128)> {
    let run = || {
        models
            .par_iter()
            .map(|s| {
                let t = Instant::now();
                let cert = certify(s, config);
                (cert, t.elapsed().as_millis())
            })
            .collect()
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
        .install(run)
}

/// Verdict counts keyed by verdict name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub counts: BTreeMap<String, usize>,
    pub total: usize,
}

impl Tallies {
    pub fn add(&mut self, verdict: &str) {
        *self.counts.entry(verdict.to_string()).or_default() += 1;
        self.total += 1;
    }

    pub fn get(&self, verdict: &str) -> usize {
        self.counts.get(verdict).copied().unwrap_or(0)
    }
}

/// Caveat printed with every tally: counts are per S_3 class only.
pub const EQUIVALENCE_CAVEAT: &str = "counts are over canonical representatives under coordinate permutations only; \
finer equivalences and reductions to lower dimension are not applied, so totals are not comparable one-to-one \
with published classifications";
