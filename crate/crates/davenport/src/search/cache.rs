//! Append-only JSON-lines cache of search outcomes.
//!
//! One record per line. Lookups scan the whole file; the last record whose
//! ring, m, and crate version match wins, so re-running a search simply
//! shadows the older entry. Records written by other crate versions are
//! skipped silently; lines that fail to parse or validate are counted and
//! reported so the caller can warn about them.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::SearchOutcome;
use crate::ring::{RingElem, RingSpec};
use crate::symfun::MultisetSeq;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord {
    moduli: Vec<u64>,
    m: u64,
    value: u64,
    /// Witness as (residues, multiplicity) pairs.
    witness: Vec<(Vec<u64>, u64)>,
    exhaustive: bool,
    nodes: u64,
    version: String,
    timestamp: u64,
}

/// Result of a cache lookup. `corrupt_lines` counts records that could not
/// be parsed or reconstructed, regardless of whether a hit was found.
#[derive(Debug)]
pub struct CacheLookup {
    pub outcome: Option<SearchOutcome>,
    pub corrupt_lines: usize,
}

/// Appends the outcome to the cache file, creating it if needed.
pub fn cache_put(path: &Path, outcome: &SearchOutcome) -> Result<(), CacheError> {
    let record = CacheRecord {
        moduli: outcome.ring.moduli().to_vec(),
        m: outcome.m,
        value: outcome.value,
        witness: outcome
            .witness
            .pairs()
            .into_iter()
            .map(|(e, c)| (e.residues, c))
            .collect(),
        exhaustive: outcome.exhaustive,
        nodes: outcome.nodes_explored,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default()
            .as_secs(),
    };
    let line = serde_json::to_string(&record).expect("cache record serializes");
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(file, "{line}")?;
    Ok(())
}

fn rebuild(record: &CacheRecord, ring: &RingSpec) -> Option<SearchOutcome> {
    let mut witness = MultisetSeq::new(ring.clone());
    for (residues, count) in &record.witness {
        let elem = RingElem {
            residues: residues.clone(),
        };
        witness.insert(elem, *count).ok()?;
    }
    if record.value == 0 || witness.len() != record.value - 1 {
        return None;
    }
    Some(SearchOutcome {
        ring: ring.clone(),
        m: record.m,
        value: record.value,
        witness,
        all_witnesses: None,
        nodes_explored: record.nodes,
        exhaustive: record.exhaustive,
        elapsed: Duration::ZERO,
        depth_cap: record.value - 1,
        certified_by_cap: false,
    })
}

/// Scans the cache for the given ring and m. A missing file is an empty
/// cache, not an error.
pub fn cache_get(path: &Path, ring: &RingSpec, m: u64) -> Result<CacheLookup, CacheError> {
    if !path.exists() {
        return Ok(CacheLookup {
            outcome: None,
            corrupt_lines: 0,
        });
    }
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut outcome = None;
    let mut corrupt_lines = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CacheRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) => {
                corrupt_lines += 1;
                continue;
            }
        };
        if record.version != env!("CARGO_PKG_VERSION") {
            continue;
        }
        if record.moduli != ring.moduli() || record.m != m {
            continue;
        }
        match rebuild(&record, ring) {
            Some(o) => outcome = Some(o), // last matching record wins
            None => corrupt_lines += 1,
        }
    }
    Ok(CacheLookup {
        outcome,
        corrupt_lines,
    })
}
