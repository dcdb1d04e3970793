//! The block-compressed interpreter. Each loop iteration is one "step":
//! a single block rule, a whole-run acceleration, or a pattern jump.
//!
//! Three non-termination detectors run inline. An in-window loop comes out
//! of the rule computation itself. A whole-configuration repeat (the
//! two-stack form is head-relative, so in-place cycles recur exactly) is
//! checked against a bounded set of recent small configurations. Blank-side
//! runaway fires when the head faces the blank end in a state it has faced
//! it in before and the finite side still carries the same cells above the
//! deepest level consumed in between — the interval evolution then replays
//! forever, shifted outward.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::machine::{Machine, Side};
use crate::otter::{
    apply_jump, find_match, verify_jump, HistoryBuffer, HistoryEntry, OtterJumpRecord,
};
use crate::tape::{Head, MacroConfig, RleStack, Segment};

use super::rule::{MacroRule, RuleCache};
use super::{EngineFault, EngineParams, HaltKind, RunResult, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Macro,
    Accel,
    Otter,
    Halt,
}

impl StepKind {
    pub fn label(self) -> &'static str {
        match self {
            StepKind::Macro => "MACRO",
            StepKind::Accel => "ACCEL",
            StepKind::Otter => "OTTER",
            StepKind::Halt => "HALT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Ran(StepKind),
    /// Only returned when stepping with `pause_on_undefined`: the machine
    /// needs slot (state, symbol) and nothing has been mutated.
    UndefinedSlot { state: u8, symbol: u8 },
    Terminal(Status),
}

pub type TraceFn = Box<dyn FnMut(&BigUint, StepKind, &MacroConfig) + Send>;

const REPEAT_CELL_CAP: u32 = 1_000;
const RUNAWAY_SNAPSHOT_CAP: usize = 1_000;
/// Configurations with more segments than this skip pattern matching for
/// that step; the window patterns stay far below it in practice.
const SHAPE_SEGMENT_CAP: usize = 128;

/// Exact-recurrence detector: keeps one reference configuration at a
/// power-of-two step schedule and compares every configuration against it.
/// Any eventually-periodic trajectory whose preperiod-plus-period fits the
/// step budget is caught, with one cheap comparison per step.
#[derive(Debug, Clone)]
struct RepeatDetector {
    reference: Option<MacroConfig>,
    since_reference: u64,
    rotate_at: u64,
}

impl Default for RepeatDetector {
    fn default() -> Self {
        RepeatDetector { reference: None, since_reference: 0, rotate_at: 1 }
    }
}

impl RepeatDetector {
    /// Returns true when the configuration equals the reference seen
    /// earlier on this trajectory.
    fn check_insert(&mut self, config: &MacroConfig) -> bool {
        if let Some(reference) = &self.reference {
            // Cheap guards before the structural comparison.
            if reference.head == config.head
                && reference.left.segments().len() == config.left.segments().len()
                && reference.right.segments().len() == config.right.segments().len()
                && reference == config
            {
                return true;
            }
        }
        self.since_reference += 1;
        if self.since_reference >= self.rotate_at {
            self.reference = if config.total_cells() <= BigUint::from(REPEAT_CELL_CAP) {
                Some(config.clone())
            } else {
                None
            };
            self.since_reference = 0;
            self.rotate_at = self.rotate_at.saturating_mul(2);
        }
        false
    }
}

#[derive(Debug, Clone)]
struct BlankMemo {
    /// Finite-side cell count when recorded.
    recorded: BigUint,
    /// Minimum finite-side cell count seen since.
    min_since: BigUint,
    /// Nearest finite-side cells at record time, nearest first.
    snapshot: Vec<u8>,
    /// Cells of blank tape read past the finite side's far end since the
    /// record; those depths must still read blank at the next occurrence.
    beyond: usize,
}

/// Outward-travel detector. The head stands before the blank end of the
/// tape with at most a small fixed lookahead of remaining cells ahead. If
/// the same state sees the same lookahead again, the finite side has not
/// shrunk below its recorded size, the cells above the deepest level
/// consumed in between are unchanged, and anything read past its far end
/// still reads blank, then the interval evolution replays forever, shifted
/// outward: every cell it can inspect is exactly as it was.
#[derive(Debug, Clone, Default)]
struct BlankRunaway {
    memos: HashMap<(u8, Side, Vec<u8>), BlankMemo>,
}

/// Facing-side content beyond this many cells disables the trigger.
const LOOKAHEAD_CAP: u32 = 32;
/// Memo table size guard; clearing only delays detection.
const MEMO_CAP: usize = 64;
const BEYOND_CAP: usize = 100_000;

impl BlankRunaway {
    /// Record that `side` was popped down to `cells` cells.
    fn on_pop(&mut self, side: Side, cells: &BigUint) {
        for ((_, facing, _), memo) in self.memos.iter_mut() {
            if facing.opposite() == side && *cells < memo.min_since {
                memo.min_since = cells.clone();
            }
        }
    }

    /// A pop of `side` while it was empty: the machine read `k` cells of
    /// blank tape beyond that side's content.
    fn on_virtual_pop(&mut self, side: Side, k: usize) {
        for ((_, facing, _), memo) in self.memos.iter_mut() {
            if facing.opposite() == side {
                memo.beyond = memo.beyond.saturating_add(k).min(BEYOND_CAP);
            }
        }
    }

    /// The head faces `facing` in `state` with only `lookahead` cells ahead
    /// of it. Returns true when the interval since the matching memo proves
    /// unbounded travel.
    fn observe(
        &mut self,
        state: u8,
        facing: Side,
        lookahead: Vec<u8>,
        finite: &RleStack,
    ) -> bool {
        let key = (state, facing, lookahead);
        let finite_side = facing.opposite();
        let now = finite.cells().clone();
        if let Some(memo) = self.memos.get(&key) {
            if now >= memo.recorded && memo.beyond < BEYOND_CAP {
                // Depth consumed below the recorded frontier.
                let d = (&memo.recorded - &memo.min_since)
                    .try_into()
                    .unwrap_or(usize::MAX);
                if d <= memo.snapshot.len() {
                    let cells = finite.top_cells(d + memo.beyond, finite_side);
                    let (head, tail) = cells.split_at(d.min(cells.len()));
                    if head == &memo.snapshot[..d] && tail.iter().all(|&c| c == 0) {
                        return true;
                    }
                }
            }
        }
        if self.memos.len() >= MEMO_CAP {
            self.memos.clear();
        }
        self.memos.insert(
            key,
            BlankMemo {
                recorded: now.clone(),
                min_since: now,
                snapshot: finite.top_cells(RUNAWAY_SNAPSHOT_CAP, finite_side),
                beyond: 0,
            },
        );
        false
    }

    fn clear(&mut self) {
        self.memos.clear();
    }
}

/// Resumable execution state, independent of the rule cache (which is
/// semantically transparent) and of the jump history.
#[derive(Debug, Clone)]
pub struct SimState {
    pub config: MacroConfig,
    pub hops: BigUint,
    pub steps: u64,
    repeat: RepeatDetector,
    blank: BlankRunaway,
}

pub struct MacroEngine {
    machine: Machine,
    params: EngineParams,
    config: MacroConfig,
    hops: BigUint,
    steps: u64,
    cache: RuleCache,
    history: HistoryBuffer,
    otters: u64,
    otter_hops: BigUint,
    jumps: Vec<OtterJumpRecord>,
    multi_skips: u64,
    repeat: RepeatDetector,
    blank: BlankRunaway,
    note: Option<String>,
    trace: Option<TraceFn>,
}

impl MacroEngine {
    pub fn new(machine: Machine, params: EngineParams) -> MacroEngine {
        let config = MacroConfig::start();
        Self::with_config(machine, params, config, BigUint::zero())
    }

    pub fn with_config(
        machine: Machine,
        params: EngineParams,
        config: MacroConfig,
        hops: BigUint,
    ) -> MacroEngine {
        let window = params.window;
        MacroEngine {
            machine,
            params,
            config,
            hops,
            steps: 0,
            cache: RuleCache::new(),
            history: HistoryBuffer::new(window),
            otters: 0,
            otter_hops: BigUint::zero(),
            jumps: Vec::new(),
            multi_skips: 0,
            repeat: RepeatDetector::default(),
            blank: BlankRunaway::default(),
            note: None,
            trace: None,
        }
    }

    /// Resume from a snapshot, possibly under an extended machine (the
    /// enumerator adds slots; past execution never consulted them, so the
    /// detector state stays valid).
    pub fn resume(machine: Machine, params: EngineParams, state: SimState) -> MacroEngine {
        let mut engine = Self::with_config(machine, params, state.config, state.hops);
        engine.steps = state.steps;
        engine.repeat = state.repeat;
        engine.blank = state.blank;
        engine
    }

    pub fn snapshot(&self) -> SimState {
        SimState {
            config: self.config.clone(),
            hops: self.hops.clone(),
            steps: self.steps,
            repeat: self.repeat.clone(),
            blank: self.blank.clone(),
        }
    }

    pub fn set_trace(&mut self, f: TraceFn) {
        self.trace = Some(f);
    }

    pub fn config(&self) -> &MacroConfig {
        &self.config
    }

    pub fn hops(&self) -> &BigUint {
        &self.hops
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn machine(&self) -> &Machine {
        &self.machine
    }

    /// Rules are recomputed on demand; clearing never changes results.
    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    fn emit_trace(&mut self, kind: StepKind) {
        if let Some(t) = &mut self.trace {
            t(&self.hops, kind, &self.config);
        }
    }

    fn pop_facing_block(&mut self, facing: Side) {
        let k = self.params.k;
        let stack = self.config.stack_mut(facing);
        if stack.is_empty() {
            self.blank.on_virtual_pop(facing, k);
        } else {
            stack.decouple(k);
            let cells = stack.cells().clone();
            self.blank.on_pop(facing, &cells);
        }
    }

    /// One engine step. With `pause_on_undefined`, an undefined slot is
    /// reported without mutating anything so the caller can extend the
    /// machine and resume.
    pub fn step(&mut self, pause_on_undefined: bool) -> Result<StepOutcome, EngineFault> {
        let head = self
            .config
            .head
            .ok_or_else(|| EngineFault("step on a terminal configuration".into()))?;

        if pause_on_undefined {
            // Check the upcoming rule before the detectors record anything,
            // so the caller can extend the machine and resume seamlessly.
            let facing = head.facing;
            let k = self.params.k;
            let block = match self.config.stack(facing).top() {
                Some(seg) => seg.block.clone(),
                None => vec![0; k],
            };
            let rule =
                self.cache
                    .get_or_compute(&self.machine, head.state, &block, facing.opposite());
            if let MacroRule::Undefined { state, symbol, .. } = rule {
                return Ok(StepOutcome::UndefinedSlot { state: *state, symbol: *symbol });
            }
        }

        if self.repeat.check_insert(&self.config) {
            self.note = Some(format!("configuration recurred: {}", self.config.render()));
            return Ok(StepOutcome::Terminal(Status::RepeatNonTerm));
        }

        let facing_stack = self.config.stack(head.facing);
        if facing_stack.cells() <= &BigUint::from(LOOKAHEAD_CAP) {
            let lookahead = facing_stack.top_cells(LOOKAHEAD_CAP as usize, head.facing);
            let finite = self.config.stack(head.facing.opposite());
            if self.blank.observe(head.state, head.facing, lookahead, finite) {
                self.note = Some(format!("blank-side runaway: {}", self.config.render()));
                return Ok(StepOutcome::Terminal(Status::BlankRunawayNonTerm));
            }
        }

        let small_enough = self.config.left.segments().len()
            + self.config.right.segments().len()
            <= SHAPE_SEGMENT_CAP;
        let entry = if self.params.otter && small_enough {
            let (shape, exponents) = self.config.shape();
            Some(HistoryEntry::new(self.hops.clone(), shape, exponents))
        } else {
            None
        };

        if let Some(entry) = &entry {
            let (m, skips) = find_match(&self.history, entry);
            self.multi_skips += skips;
            if let Some(m) = m {
                let ok = !self.params.verify
                    || verify_jump(&self.machine, &self.config, &m, self.params.k);
                if ok {
                    let new_config = apply_jump(&self.config, &m)?;
                    self.history.push(entry.clone());
                    let advance = &m.predicted_hop - &self.hops;
                    self.hops = m.predicted_hop.clone();
                    self.otter_hops += advance;
                    self.otters += 1;
                    self.steps += 1;
                    self.config = new_config;
                    // The skipped execution may have read arbitrarily deep;
                    // runaway memos are no longer comparable.
                    self.blank.clear();
                    self.jumps.push(OtterJumpRecord {
                        h3: m.h3.to_string(),
                        h2: m.h2.to_string(),
                        h1: m.h1.to_string(),
                        regressor_index: m.regressor_index,
                        a: m.a.to_string(),
                        m: m.m.to_string(),
                        predicted_hop: m.predicted_hop.to_string(),
                        shape: m.shape.render(),
                        verified: self.params.verify,
                        multi_regressor_skips: self.multi_skips,
                    });
                    self.emit_trace(StepKind::Otter);
                    return Ok(StepOutcome::Ran(StepKind::Otter));
                }
            }
        }

        let facing = head.facing;
        let entry_end = facing.opposite();
        let k = self.params.k;
        let block = match self.config.stack(facing).top() {
            Some(seg) => seg.block.clone(),
            None => vec![0; k],
        };
        let rule = self
            .cache
            .get_or_compute(&self.machine, head.state, &block, entry_end)
            .clone();

        match rule {
            MacroRule::InnerLoop => {
                self.note = Some(format!(
                    "in-window loop for state {} entering {} from {entry_end}: {}",
                    crate::machine::state_letter(head.state),
                    block.iter().map(|&c| (b'0' + c) as char).collect::<String>(),
                    self.config.render()
                ));
                Ok(StepOutcome::Terminal(Status::InnerLoopNonTerm))
            }
            MacroRule::Undefined { cells, hops, state, symbol, .. } => {
                if pause_on_undefined {
                    return Ok(StepOutcome::UndefinedSlot { state, symbol });
                }
                self.pop_facing_block(facing);
                self.config.stack_mut(facing).push(Segment::new(cells, 1u32));
                self.config.head = None;
                self.hops += hops;
                self.steps += 1;
                self.emit_trace(StepKind::Halt);
                Ok(StepOutcome::Terminal(Status::Halted { via: HaltKind::Undefined }))
            }
            MacroRule::Halt { cells, hops, .. } => {
                self.pop_facing_block(facing);
                self.config.stack_mut(facing).push(Segment::new(cells, 1u32));
                self.config.head = None;
                self.hops += hops;
                self.steps += 1;
                self.emit_trace(StepKind::Halt);
                Ok(StepOutcome::Terminal(Status::Halted { via: HaltKind::Explicit }))
            }
            MacroRule::Step { block: out, exit, state: new_state, hops } => {
                if let Some(e) = entry {
                    self.history.push(e);
                }
                let run_available = self.params.accel
                    && new_state == head.state
                    && exit == facing
                    && !self.config.stack(facing).is_empty();
                if run_available {
                    let seg = self.config.stack_mut(facing).pop_run().unwrap();
                    let cells = self.config.stack(facing).cells().clone();
                    self.blank.on_pop(facing, &cells);
                    let reps = seg.exponent;
                    self.hops += &reps * BigUint::from(hops);
                    self.config
                        .stack_mut(facing.opposite())
                        .push(Segment { block: out, exponent: reps });
                    self.steps += 1;
                    self.emit_trace(StepKind::Accel);
                    Ok(StepOutcome::Ran(StepKind::Accel))
                } else {
                    self.pop_facing_block(facing);
                    self.config
                        .stack_mut(exit.opposite())
                        .push(Segment::new(out, 1u32));
                    self.config.head = Some(Head { state: new_state, facing: exit });
                    self.hops += hops;
                    self.steps += 1;
                    self.emit_trace(StepKind::Macro);
                    Ok(StepOutcome::Ran(StepKind::Macro))
                }
            }
        }
    }

    pub fn over_budget(&self) -> bool {
        if self.steps >= self.params.max_steps {
            return true;
        }
        if let Some(mh) = &self.params.max_hops {
            if &self.hops >= mh {
                return true;
            }
        }
        if let Some(mc) = self.params.max_cells {
            if self.config.total_cells() > BigUint::from(mc) {
                return true;
            }
        }
        false
    }

    pub fn run(mut self) -> Result<RunResult, EngineFault> {
        loop {
            if self.over_budget() {
                return Ok(self.finish(Status::BudgetExceeded));
            }
            match self.step(false)? {
                StepOutcome::Ran(_) => {}
                StepOutcome::Terminal(status) => return Ok(self.finish(status)),
                StepOutcome::UndefinedSlot { .. } => unreachable!(),
            }
        }
    }

    pub fn finish(self, status: Status) -> RunResult {
        RunResult {
            status,
            ones: self.config.ones_count(),
            hops: self.hops,
            steps: self.steps,
            otters: self.otters,
            otter_hops: self.otter_hops,
            final_config: self.config,
            params: self.params,
            otter_jumps: self.jumps,
            multi_regressor_skips: self.multi_skips,
            note: self.note,
        }
    }
}
