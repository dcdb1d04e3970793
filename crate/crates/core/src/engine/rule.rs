//! Block-level transitions, computed lazily by running the machine inside a
//! k-cell window until it exits, halts, or repeats an in-window
//! configuration.

use std::collections::{HashMap, HashSet};

use crate::machine::{Machine, Next, Side};
use crate::tape::Block;

/// Outcome of running one (state, block, entry end) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacroRule {
    /// The head left the window.
    Step { block: Block, exit: Side, state: u8, hops: u64 },
    /// A halting transition fired inside the window. `offset` is the cell
    /// the final write landed on.
    Halt { cells: Block, offset: usize, hops: u64 },
    /// An undefined slot was encountered inside the window after `hops`
    /// in-window transitions; `cells` holds the rewrites made so far.
    Undefined { cells: Block, offset: usize, hops: u64, state: u8, symbol: u8 },
    /// An in-window configuration repeated; the machine never leaves.
    InnerLoop,
}

/// Run the machine naively inside the window until it exits, halts, hits an
/// undefined slot, or repeats an in-window configuration.
pub fn compute_macro_rule(machine: &Machine, state: u8, block: &[u8], entry: Side) -> MacroRule {
    let k = block.len();
    debug_assert!(k >= 1);
    let mut cells: Block = block.to_vec();
    let mut offset: isize = match entry {
        Side::Left => 0,
        Side::Right => k as isize - 1,
    };
    let mut state = state;
    let mut hops: u64 = 0;
    let mut visited: HashSet<(u8, usize, Block)> = HashSet::new();
    // In-window configuration space bound: n * k * m^k.
    loop {
        let off = offset as usize;
        if !visited.insert((state, off, cells.clone())) {
            return MacroRule::InnerLoop;
        }
        let symbol = cells[off];
        let t = match machine.slot(state, symbol) {
            Some(t) => t,
            None => {
                return MacroRule::Undefined { cells, offset: off, hops, state, symbol };
            }
        };
        cells[off] = t.output;
        hops += 1;
        match t.next {
            Next::Halt => return MacroRule::Halt { cells, offset: off, hops },
            Next::State(q) => state = q,
        }
        offset += match t.dir {
            Side::Left => -1,
            Side::Right => 1,
        };
        if offset < 0 {
            return MacroRule::Step { block: cells, exit: Side::Left, state, hops };
        }
        if offset as usize >= k {
            return MacroRule::Step { block: cells, exit: Side::Right, state, hops };
        }
    }
}

/// Lazy per-run rule cache. Clearing it never changes execution results.
#[derive(Debug, Clone, Default)]
pub struct RuleCache {
    rules: HashMap<(u8, Block, Side), MacroRule>,
}

impl RuleCache {
    pub fn new() -> RuleCache {
        RuleCache::default()
    }

    pub fn get_or_compute(
        &mut self,
        machine: &Machine,
        state: u8,
        block: &[u8],
        entry: Side,
    ) -> &MacroRule {
        self.rules
            .entry((state, block.to_vec(), entry))
            .or_insert_with(|| compute_macro_rule(machine, state, block, entry))
    }

    pub fn clear(&mut self) {
        self.rules.clear();
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_rule_is_the_underlying_transition() {
        let m = Machine::parse("1RB1LB_1LA1RZ").unwrap();
        let rule = compute_macro_rule(&m, 0, &[0], Side::Left);
        assert_eq!(
            rule,
            MacroRule::Step { block: vec![1], exit: Side::Right, state: 1, hops: 1 }
        );
        let rule = compute_macro_rule(&m, 1, &[1], Side::Right);
        assert!(matches!(rule, MacroRule::Halt { hops: 1, .. }));
    }

    #[test]
    fn five_state_champion_block_rule() {
        // State b entering 001 from the left rewrites it to 111 (five naive
        // transitions, exiting left in state d under this labeling).
        let m = Machine::parse("1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA").unwrap();
        let rule = compute_macro_rule(&m, 1, &[0, 0, 1], Side::Left);
        assert_eq!(
            rule,
            MacroRule::Step { block: vec![1, 1, 1], exit: Side::Left, state: 3, hops: 5 }
        );
        // State b passes through 111-runs rightward; state d leftward.
        let rule = compute_macro_rule(&m, 1, &[1, 1, 1], Side::Left);
        assert_eq!(
            rule,
            MacroRule::Step { block: vec![1, 1, 1], exit: Side::Right, state: 1, hops: 3 }
        );
        let rule = compute_macro_rule(&m, 3, &[1, 1, 1], Side::Right);
        assert_eq!(
            rule,
            MacroRule::Step { block: vec![1, 1, 1], exit: Side::Left, state: 3, hops: 3 }
        );
    }

    #[test]
    fn in_window_loop_is_detected() {
        // a bounces right, b bounces left: inside any window of length >= 2
        // the pair loops without exiting.
        let m = Machine::parse("0RB---_0LA---").unwrap();
        let rule = compute_macro_rule(&m, 0, &[0, 0, 0], Side::Left);
        assert_eq!(rule, MacroRule::InnerLoop);
    }

    #[test]
    fn undefined_slot_reports_partial_progress() {
        let m = Machine::parse("1RB1LA_0LA---").unwrap();
        // Entering 11 from the left in state b: (b,1) is undefined at once.
        let rule = compute_macro_rule(&m, 1, &[1, 1], Side::Left);
        assert_eq!(
            rule,
            MacroRule::Undefined { cells: vec![1, 1], offset: 0, hops: 0, state: 1, symbol: 1 }
        );
    }

    #[test]
    fn hop_cost_within_window_bound() {
        let m = Machine::parse("1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA").unwrap();
        let k = 3usize;
        let bound = m.states() as u64 * k as u64 * (m.symbols() as u64).pow(k as u32) + 1;
        for state in 0..m.states() {
            for cells in [[0, 0, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1]] {
                for entry in [Side::Left, Side::Right] {
                    let hops = match compute_macro_rule(&m, state, &cells, entry) {
                        MacroRule::Step { hops, .. }
                        | MacroRule::Halt { hops, .. }
                        | MacroRule::Undefined { hops, .. } => hops,
                        MacroRule::InnerLoop => 0,
                    };
                    assert!(hops <= bound);
                }
            }
        }
    }
}
