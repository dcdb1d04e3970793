//! Per-machine classification evidence (JSONL). Big integers serialize as
//! decimal strings; `wall_seconds` is informational and excluded from the
//! canonical digest.

use std::io::{self, BufRead};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{HaltKind, RunResult, Status};
use crate::machine::Machine;

pub const STATUS_HALTED: &str = "halted";
pub const STATUS_NONTERMINATING: &str = "nonterminating";
pub const STATUS_HOLDOUT: &str = "holdout";

/// Rendered final configurations longer than this are replaced by a digest.
const RENDER_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub machine_index: u64,
    pub machine: String,
    pub status: String,
    pub reason: String,
    pub ones: String,
    pub hops: String,
    pub contiguous_ones: String,
    pub steps: u64,
    pub otters: u64,
    pub otter_hops: String,
    pub k: usize,
    pub window: usize,
    pub verified: bool,
    pub wall_seconds: f64,
    pub final_config: String,
}

impl EvidenceRecord {
    pub fn from_run(
        machine_index: u64,
        machine: &Machine,
        result: &RunResult,
        wall_seconds: f64,
    ) -> EvidenceRecord {
        let (status, reason) = match result.status {
            Status::Halted { via: HaltKind::Explicit } => (STATUS_HALTED, "explicit"),
            Status::Halted { via: HaltKind::Undefined } => (STATUS_HALTED, "undefined"),
            Status::InnerLoopNonTerm => (STATUS_NONTERMINATING, "inner_loop"),
            Status::RepeatNonTerm => (STATUS_NONTERMINATING, "exact_config_repeat"),
            Status::BlankRunawayNonTerm => (STATUS_NONTERMINATING, "blank_runaway"),
            Status::BudgetExceeded => (STATUS_HOLDOUT, "budget"),
        };
        let rendering = result.final_config.render();
        let final_config = if rendering.len() > RENDER_CAP {
            format!("sha256:{:x}", Sha256::digest(rendering.as_bytes()))
        } else {
            rendering
        };
        EvidenceRecord {
            machine_index,
            machine: machine.format(),
            status: status.into(),
            reason: reason.into(),
            ones: result.ones.to_string(),
            hops: result.hops.to_string(),
            contiguous_ones: result.final_config.contiguous_ones().to_string(),
            steps: result.steps,
            otters: result.otters,
            otter_hops: result.otter_hops.to_string(),
            k: result.params.k,
            window: result.params.window,
            verified: result.params.verify,
            wall_seconds,
            final_config,
        }
    }

    pub fn is_halted(&self) -> bool {
        self.status == STATUS_HALTED
    }

    pub fn is_holdout(&self) -> bool {
        self.status == STATUS_HOLDOUT
    }
}

/// SHA-256 over the records serialized with `wall_seconds` zeroed, hex.
/// Byte-identical across reruns and parallelism settings.
pub fn canonical_digest<'a>(records: impl IntoIterator<Item = &'a EvidenceRecord>) -> String {
    let mut hasher = Sha256::new();
    for record in records {
        let mut canonical = record.clone();
        canonical.wall_seconds = 0.0;
        hasher.update(serde_json::to_vec(&canonical).expect("evidence serializes"));
        hasher.update(b"\n");
    }
    format!("{:x}", hasher.finalize())
}

pub fn read_evidence<R: BufRead>(reader: R) -> io::Result<Vec<EvidenceRecord>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn write_evidence<'a, W: io::Write>(
    writer: &mut W,
    records: impl IntoIterator<Item = &'a EvidenceRecord>,
) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut *writer, record)?;
        writeln!(writer)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::naive_run;

    #[test]
    fn record_round_trips_and_digest_ignores_wall_time() {
        let machine = Machine::parse("1RB1LB_1LA1RZ").unwrap();
        let result = naive_run(&machine, 100);
        let a = EvidenceRecord::from_run(7, &machine, &result, 0.25);
        let mut buf = Vec::new();
        write_evidence(&mut buf, [&a]).unwrap();
        let back = read_evidence(io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back, vec![a.clone()]);

        let mut b = a.clone();
        b.wall_seconds = 99.0;
        assert_eq!(canonical_digest([&a]), canonical_digest([&b]));
        let mut c = a.clone();
        c.hops = "7".into();
        assert_ne!(canonical_digest([&a]), canonical_digest([&c]));
    }
}
