//! Budgeted batch classification of machine lists into halted,
//! non-terminating, and holdout, with evidence records ordered by machine
//! index regardless of completion order.
//!
//! Beyond the three runtime detectors, a static control-closure check runs
//! first: a machine whose consultable (state, symbol) pairs are all defined
//! and halting-free can never stop, whatever the tape holds. This settles
//! counter-like machines whose configurations never recur.

use std::io::Write;
use std::time::Instant;

use num_bigint::BigUint;
use thiserror::Error;

use crate::engine::{
    run_auto, EngineParams, MacroEngine, RunResult, Status, DEFAULT_WINDOW, OTTER_STEP_BUDGET,
};
use crate::evidence::{EvidenceRecord, STATUS_HOLDOUT, STATUS_NONTERMINATING};
use crate::machine::{control_closure, ControlClosure, Machine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    Fixed(usize),
    Auto,
}

impl std::str::FromStr for KPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(KPolicy::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KPolicy::Fixed(k)),
            _ => Err(format!("block size must be 'auto' or a positive integer, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyBudgets {
    pub max_steps: u64,
    pub max_hops: Option<BigUint>,
    pub k: KPolicy,
    pub otter: bool,
    pub verify: bool,
    pub window: usize,
}

impl Default for ClassifyBudgets {
    fn default() -> Self {
        ClassifyBudgets {
            max_steps: OTTER_STEP_BUDGET,
            max_hops: None,
            k: KPolicy::Fixed(1),
            otter: true,
            verify: false,
            window: DEFAULT_WINDOW,
        }
    }
}

impl ClassifyBudgets {
    fn engine_params(&self, k: usize) -> EngineParams {
        EngineParams {
            k,
            otter: self.otter,
            window: self.window,
            verify: self.verify,
            accel: true,
            max_steps: self.max_steps,
            max_hops: self.max_hops.clone(),
            max_cells: None,
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ClassifySummary {
    pub total: u64,
    pub halted: u64,
    pub nonterminating: u64,
    pub holdouts: u64,
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("evidence sink failed after machine index {written} (resume there): {source}")]
    Sink { written: u64, source: std::io::Error },
}

/// Classify one machine. Engine faults become holdout records with a fault
/// note; they never abort a batch.
pub fn classify_machine(
    index: u64,
    machine: &Machine,
    budgets: &ClassifyBudgets,
) -> EvidenceRecord {
    let start = Instant::now();
    if control_closure(machine, 0, 0, &[], &[]) == ControlClosure::ClosedHaltFree {
        let mut record = EvidenceRecord::from_run(
            index,
            machine,
            &empty_result(budgets),
            start.elapsed().as_secs_f64(),
        );
        record.status = STATUS_NONTERMINATING.into();
        record.reason = "unreachable_halt".into();
        return record;
    }
    let outcome = match budgets.k {
        KPolicy::Fixed(k) => {
            MacroEngine::new(machine.clone(), budgets.engine_params(k)).run()
        }
        KPolicy::Auto => run_auto(machine, &budgets.engine_params(1)),
    };
    match outcome {
        Ok(result) => {
            if result.status == Status::BudgetExceeded {
                // Counting machines first (the closures are cheap): show
                // the halt pattern can never form, or that no position can
                // host the halting step.
                if crate::ctl::prove_gram_auto(machine).is_some()
                    || crate::segment::prove_segment_auto(machine).is_some()
                {
                    let wall = start.elapsed().as_secs_f64();
                    let mut record = EvidenceRecord::from_run(index, machine, &result, wall);
                    record.status = STATUS_NONTERMINATING.into();
                    record.reason = "unreachable_halt".into();
                    return record;
                }
                // A growing sweep never recurs; close it by induction.
                if let Some(proof) = crate::sweep::prove_sweep_auto(machine) {
                    let wall = start.elapsed().as_secs_f64();
                    let mut record = EvidenceRecord::from_run(index, machine, &result, wall);
                    record.status = STATUS_NONTERMINATING.into();
                    record.reason = "inductive_sweep".into();
                    record.final_config = proof.anchor;
                    return record;
                }
            }
            let wall = start.elapsed().as_secs_f64();
            EvidenceRecord::from_run(index, machine, &result, wall)
        }
        Err(fault) => {
            let wall = start.elapsed().as_secs_f64();
            let mut record =
                EvidenceRecord::from_run(index, machine, &empty_result(budgets), wall);
            record.status = STATUS_HOLDOUT.into();
            record.reason = format!("fault: {fault}");
            record
        }
    }
}

fn empty_result(budgets: &ClassifyBudgets) -> RunResult {
    RunResult {
        status: Status::BudgetExceeded,
        ones: BigUint::from(0u32),
        hops: BigUint::from(0u32),
        steps: 0,
        otters: 0,
        otter_hops: BigUint::from(0u32),
        final_config: crate::tape::MacroConfig::start(),
        params: budgets.engine_params(match budgets.k {
            KPolicy::Fixed(k) => k,
            KPolicy::Auto => 1,
        }),
        otter_jumps: Vec::new(),
        multi_regressor_skips: 0,
        note: None,
    }
}

const CHUNK: usize = 4096;

/// Classify `machines[start_index..]`, writing JSONL records in index
/// order. Work is spread over `parallelism` threads chunk by chunk; the
/// output is identical for any thread count.
pub fn classify_batch<W: Write>(
    machines: &[Machine],
    budgets: &ClassifyBudgets,
    parallelism: usize,
    start_index: u64,
    out: &mut W,
) -> Result<ClassifySummary, ClassifyError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("thread pool");
    let mut summary = ClassifySummary::default();
    let mut written = start_index;
    let todo = &machines[start_index as usize..];
    for (chunk_no, chunk) in todo.chunks(CHUNK).enumerate() {
        let base = start_index + (chunk_no * CHUNK) as u64;
        let records: Vec<EvidenceRecord> = pool.install(|| {
            use rayon::prelude::*;
            chunk
                .par_iter()
                .enumerate()
                .map(|(i, machine)| classify_machine(base + i as u64, machine, budgets))
                .collect()
        });
        for record in &records {
            summary.total += 1;
            match record.status.as_str() {
                crate::evidence::STATUS_HALTED => summary.halted += 1,
                STATUS_NONTERMINATING => summary.nonterminating += 1,
                _ => summary.holdouts += 1,
            }
            serde_json::to_writer(&mut *out, record)
                .map_err(|e| ClassifyError::Sink { written, source: e.into() })?;
            writeln!(out).map_err(|source| ClassifyError::Sink { written, source })?;
            written += 1;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::{canonical_digest, read_evidence};

    fn budgets() -> ClassifyBudgets {
        ClassifyBudgets { max_steps: 10_000, ..ClassifyBudgets::default() }
    }

    #[test]
    fn self_loop_classified_within_ten_steps() {
        let machine = Machine::parse("0RA---").unwrap();
        let record = classify_machine(0, &machine, &budgets());
        assert_eq!(record.status, STATUS_NONTERMINATING);
        assert!(record.steps <= 10);
    }

    #[test]
    fn halting_machine_is_not_flagged() {
        let machine = Machine::parse("1RB1LB_1LA1RZ").unwrap();
        let record = classify_machine(0, &machine, &budgets());
        assert_eq!(record.status, "halted");
        assert_eq!(record.ones, "4");
        assert_eq!(record.hops, "6");
        assert_eq!(record.contiguous_ones, "4");
    }

    #[test]
    fn closed_control_set_is_nonterminating() {
        // Both states point at each other with every slot defined and no
        // halting transition anywhere.
        let machine = Machine::parse("1RB1LA_0LA0RB").unwrap();
        let record = classify_machine(0, &machine, &budgets());
        assert_eq!(record.status, STATUS_NONTERMINATING);
        assert_eq!(record.reason, "unreachable_halt");
    }

    #[test]
    fn batch_is_deterministic_across_parallelism() {
        let machines: Vec<Machine> = ["1RZ", "1RB1LB_1LA1RZ", "0RA---", "1RA---", "1RB1LA_0LA0RB"]
            .iter()
            .map(|s| Machine::parse(s).unwrap())
            .collect();
        let mut one = Vec::new();
        let mut eight = Vec::new();
        let a = classify_batch(&machines, &budgets(), 1, 0, &mut one).unwrap();
        let b = classify_batch(&machines, &budgets(), 8, 0, &mut eight).unwrap();
        assert_eq!(a, b);
        let ra = read_evidence(std::io::BufReader::new(&one[..])).unwrap();
        let rb = read_evidence(std::io::BufReader::new(&eight[..])).unwrap();
        assert_eq!(canonical_digest(ra.iter()), canonical_digest(rb.iter()));
    }

    #[test]
    fn resume_continues_from_cursor() {
        let machines: Vec<Machine> =
            ["1RZ", "1RB1LB_1LA1RZ", "0RA---"].iter().map(|s| Machine::parse(s).unwrap()).collect();
        let mut full = Vec::new();
        classify_batch(&machines, &budgets(), 1, 0, &mut full).unwrap();
        let mut head = Vec::new();
        classify_batch(&machines[..1], &budgets(), 1, 0, &mut head).unwrap();
        let mut tail = Vec::new();
        classify_batch(&machines, &budgets(), 1, 1, &mut tail).unwrap();
        let full = read_evidence(std::io::BufReader::new(&full[..])).unwrap();
        let head = read_evidence(std::io::BufReader::new(&head[..])).unwrap();
        let tail = read_evidence(std::io::BufReader::new(&tail[..])).unwrap();
        let digest_full = canonical_digest(full.iter());
        let digest_join = canonical_digest(head.iter().chain(tail.iter()));
        assert_eq!(digest_full, digest_join);
    }
}
