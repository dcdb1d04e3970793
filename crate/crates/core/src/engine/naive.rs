//! Cell-by-cell reference interpreter. Slow and simple; the compressed
//! engine is checked against it for exact ones/hops agreement.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::machine::{Machine, Next, Side};
use crate::tape::{MacroConfig, RleStack, Segment};

use super::{EngineParams, HaltKind, RunResult, Status};

/// Grow-on-demand tape over `i64` positions.
#[derive(Debug, Default)]
struct CellTape {
    pos: Vec<u8>,
    neg: Vec<u8>,
}

impl CellTape {
    fn get(&self, p: i64) -> u8 {
        if p >= 0 {
            self.pos.get(p as usize).copied().unwrap_or(0)
        } else {
            self.neg.get((-p - 1) as usize).copied().unwrap_or(0)
        }
    }

    fn set(&mut self, p: i64, v: u8) {
        let (vec, idx) =
            if p >= 0 { (&mut self.pos, p as usize) } else { (&mut self.neg, (-p - 1) as usize) };
        if idx >= vec.len() {
            vec.resize(idx + 1, 0);
        }
        vec[idx] = v;
    }

    fn ones(&self) -> u64 {
        self.pos.iter().chain(self.neg.iter()).filter(|&&c| c != 0).count() as u64
    }
}

/// Run from the blank tape, counting every executed transition (including
/// the halting one) as a hop. Hitting an undefined slot stops the machine
/// in place with the distinguishing flag.
pub fn naive_run(machine: &Machine, max_hops: u64) -> RunResult {
    let mut tape = CellTape::default();
    let mut pos: i64 = 0;
    let mut state: u8 = 0;
    let mut hops: u64 = 0;
    let status = loop {
        if hops >= max_hops {
            break Status::BudgetExceeded;
        }
        let read = tape.get(pos);
        let t = match machine.slot(state, read) {
            Some(t) => t,
            None => break Status::Halted { via: HaltKind::Undefined },
        };
        tape.set(pos, t.output);
        pos += match t.dir {
            Side::Left => -1,
            Side::Right => 1,
        };
        hops += 1;
        match t.next {
            Next::Halt => break Status::Halted { via: HaltKind::Explicit },
            Next::State(q) => state = q,
        }
    };
    let final_config = config_from_tape(&tape, pos, state, status.is_halted());
    RunResult {
        status,
        ones: BigUint::from(tape.ones()),
        hops: BigUint::from(hops),
        steps: hops,
        otters: 0,
        otter_hops: BigUint::zero(),
        final_config,
        params: EngineParams { k: 1, max_steps: max_hops, ..EngineParams::default() },
        otter_jumps: Vec::new(),
        multi_regressor_skips: 0,
        note: None,
    }
}

fn config_from_tape(tape: &CellTape, pos: i64, state: u8, halted: bool) -> MacroConfig {
    let lo = -(tape.neg.len() as i64);
    let hi = tape.pos.len() as i64;
    let mut left = RleStack::new();
    let mut right = RleStack::new();
    let boundary = if halted { hi } else { pos };
    for p in lo..boundary {
        left.push(Segment::new(vec![tape.get(p)], 1u32));
    }
    let mut right_cells: Vec<u8> = (boundary..hi).map(|p| tape.get(p)).collect();
    while right_cells.last() == Some(&0) {
        right_cells.pop();
    }
    for &c in right_cells.iter().rev() {
        right.push(Segment::new(vec![c], 1u32));
    }
    MacroConfig {
        left,
        right,
        head: if halted {
            None
        } else {
            Some(crate::tape::Head { state, facing: Side::Right })
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_machine_prints_one() {
        let r = naive_run(&Machine::parse("1RZ").unwrap(), 100);
        assert_eq!(r.status, Status::Halted { via: HaltKind::Explicit });
        assert_eq!(r.ones, BigUint::from(1u32));
        assert_eq!(r.hops, BigUint::from(1u32));
    }

    #[test]
    fn two_state_champion() {
        let r = naive_run(&Machine::parse("1RB1LB_1LA1RZ").unwrap(), 100);
        assert_eq!(r.status, Status::Halted { via: HaltKind::Explicit });
        assert_eq!(r.ones, BigUint::from(4u32));
        assert_eq!(r.hops, BigUint::from(6u32));
        assert!(r.final_config.head.is_none());
    }

    #[test]
    fn undefined_slot_halts_in_place() {
        // (a,0) -> 1RB, then (b,0) is undefined: one hop, one 1.
        let r = naive_run(&Machine::parse("1RB---_------").unwrap(), 100);
        assert_eq!(r.status, Status::Halted { via: HaltKind::Undefined });
        assert_eq!(r.hops, BigUint::from(1u32));
        assert_eq!(r.ones, BigUint::from(1u32));
    }

    #[test]
    fn budget_exhaustion() {
        let r = naive_run(&Machine::parse("1RA---").unwrap(), 1000);
        assert_eq!(r.status, Status::BudgetExceeded);
        assert_eq!(r.hops, BigUint::from(1000u32));
    }
}
