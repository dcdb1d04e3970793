//! Machine execution engines: the naive cell-by-cell reference interpreter
//! and the block-compressed engine with run acceleration and pattern jumps.

pub mod macro_engine;
pub mod naive;
pub mod rule;

use num_bigint::BigUint;

pub use macro_engine::{MacroEngine, SimState, StepKind, StepOutcome};
pub use naive::naive_run;
pub use rule::{compute_macro_rule, MacroRule, RuleCache};

use crate::otter::OtterJumpRecord;
use crate::tape::MacroConfig;

/// Per-run knobs. `hops` are naive transition executions; `steps` count
/// engine loop iterations, each of which may cover astronomically many hops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineParams {
    pub k: usize,
    pub otter: bool,
    pub window: usize,
    pub verify: bool,
    /// Block-run acceleration; disabled only by equivalence tests.
    pub accel: bool,
    pub max_steps: u64,
    pub max_hops: Option<BigUint>,
    pub max_cells: Option<u64>,
}

/// Step budget for comparison runs without the pattern jump.
pub const NO_OTTER_STEP_BUDGET: u64 = 5_000_000;
/// Default step budget for runs with the pattern jump enabled.
pub const OTTER_STEP_BUDGET: u64 = 10_000_000;
/// Default history window.
pub const DEFAULT_WINDOW: usize = 150;

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            k: 1,
            otter: false,
            window: DEFAULT_WINDOW,
            verify: false,
            accel: true,
            max_steps: OTTER_STEP_BUDGET,
            max_hops: None,
            max_cells: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltKind {
    /// A halting transition fired.
    Explicit,
    /// An undefined slot was encountered; the machine stops in place.
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Halted { via: HaltKind },
    /// A block rule repeated an in-window configuration.
    InnerLoopNonTerm,
    /// The whole configuration (stacks, state, facing) recurred.
    RepeatNonTerm,
    /// The head keeps running into the blank side of the tape.
    BlankRunawayNonTerm,
    BudgetExceeded,
}

impl Status {
    pub fn is_halted(&self) -> bool {
        matches!(self, Status::Halted { .. })
    }

    pub fn is_nonterminating(&self) -> bool {
        matches!(
            self,
            Status::InnerLoopNonTerm | Status::RepeatNonTerm | Status::BlankRunawayNonTerm
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub status: Status,
    pub ones: BigUint,
    pub hops: BigUint,
    pub steps: u64,
    pub otters: u64,
    pub otter_hops: BigUint,
    pub final_config: MacroConfig,
    pub params: EngineParams,
    pub otter_jumps: Vec<OtterJumpRecord>,
    pub multi_regressor_skips: u64,
    /// Detector note for non-terminating outcomes (witness context).
    pub note: Option<String>,
}

/// Internal invariant violations (a pattern jump that would zero an
/// exponent, and the like). The classifier maps these to holdout records.
#[derive(Debug, Clone, thiserror::Error)]
#[error("engine fault: {0}")]
pub struct EngineFault(pub String);

/// Block-size selection: try k = 1..6 round-robin under doubling step
/// budgets (starting at 10^3) and keep the first conclusive run; if every k
/// exhausts the full budget, keep the k with the most hops per step.
pub fn run_auto(
    machine: &crate::machine::Machine,
    params: &EngineParams,
) -> Result<RunResult, EngineFault> {
    const K_RANGE: std::ops::RangeInclusive<usize> = 1..=6;
    let mut budget: u64 = 1_000;
    loop {
        let final_round = budget >= params.max_steps;
        let mut best: Option<RunResult> = None;
        for k in K_RANGE {
            let mut p = params.clone();
            p.k = k;
            p.max_steps = budget.min(params.max_steps);
            let result = MacroEngine::new(machine.clone(), p).run()?;
            if result.status != Status::BudgetExceeded {
                return Ok(result);
            }
            let better = match &best {
                None => true,
                // Compare hops/steps by cross-multiplying exact integers.
                Some(b) => {
                    &result.hops * BigUint::from(b.steps.max(1))
                        > &b.hops * BigUint::from(result.steps.max(1))
                }
            };
            if better {
                best = Some(result);
            }
        }
        if final_round {
            return Ok(best.expect("at least one k was tried"));
        }
        budget = budget.saturating_mul(2);
    }
}
