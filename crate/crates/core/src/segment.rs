//! Halting-segment closure: proves non-termination by showing no tape
//! position can ever host the halting step.
//!
//! Suppose the machine halts. The final step fires at some position p.
//! Anchor a window of `s` cells with p at its center and run the machine
//! abstractly: cells inside the window are tracked exactly, cells outside
//! read as every symbol at once, and writes outside are forgotten. The
//! blank initial tape makes every anchor the same abstract system, with the
//! head starting at any offset. If the exhaustive closure never executes a
//! halting or undefined transition with the head on the center cell, no
//! halting position exists and the machine runs forever. Counting
//! machines, whose configurations never recur, routinely fall to this:
//! the window pins the digit pattern that a halt would require and the
//! closure shows it never forms.

use std::collections::{HashSet, VecDeque};

use crate::machine::{Machine, Next, Side};

/// Head location relative to the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Pos {
    /// Two or more cells left of the window.
    FarLeft,
    /// The cell immediately left of the window.
    JustLeft,
    In(u8),
    JustRight,
    FarRight,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    pos: Pos,
    state: u8,
    cells: Vec<u8>,
}

/// Node budget per window size; the space is finite but m^s grows fast.
const NODE_BUDGET: usize = 2_000_000;

/// Attempt the proof at one window size, trying every anchor offset for
/// the halting cell. `true` means the machine provably never halts.
pub fn prove_halting_segment(machine: &Machine, window: usize) -> bool {
    (0..window).any(|anchor| prove_anchored(machine, window, anchor))
}

/// One window size, one halting-cell offset.
fn prove_anchored(machine: &Machine, window: usize, anchor: usize) -> bool {
    debug_assert!(window >= 1);
    let m = machine.symbols();
    let center = anchor as u8;
    let blank = vec![0u8; window];
    let mut seen: HashSet<Node> = HashSet::new();
    let mut queue: VecDeque<Node> = VecDeque::new();

    let mut push = |node: Node, seen: &mut HashSet<Node>, queue: &mut VecDeque<Node>| {
        if seen.insert(node.clone()) {
            queue.push_back(node);
        }
    };

    // The halt position is unknown, so the head starts at every offset.
    let mut roots = vec![Pos::FarLeft, Pos::JustLeft, Pos::JustRight, Pos::FarRight];
    roots.extend((0..window as u8).map(Pos::In));
    for pos in roots {
        push(Node { pos, state: 0, cells: blank.clone() }, &mut seen, &mut queue);
    }

    while let Some(node) = queue.pop_front() {
        if seen.len() > NODE_BUDGET {
            return false;
        }
        // Symbols the head may be reading.
        let reads: Vec<u8> = match node.pos {
            Pos::In(i) => vec![node.cells[i as usize]],
            _ => (0..m).collect(),
        };
        for read in reads {
            let Some(t) = machine.slot(node.state, read) else {
                // An undefined slot stops the machine in place.
                if node.pos == Pos::In(center) {
                    return false;
                }
                continue;
            };
            if t.next == Next::Halt {
                if node.pos == Pos::In(center) {
                    return false;
                }
                // A halt away from the anchor belongs to a different
                // anchoring; this branch simply ends.
                continue;
            }
            let Next::State(next_state) = t.next else { unreachable!() };
            let mut cells = node.cells.clone();
            if let Pos::In(i) = node.pos {
                cells[i as usize] = t.output;
            }
            let positions: Vec<Pos> = match (node.pos, t.dir) {
                (Pos::FarLeft, Side::Left) => vec![Pos::FarLeft],
                // From at least two cells out, one step right may stay far
                // or reach the boundary cell.
                (Pos::FarLeft, Side::Right) => vec![Pos::FarLeft, Pos::JustLeft],
                (Pos::JustLeft, Side::Left) => vec![Pos::FarLeft],
                (Pos::JustLeft, Side::Right) => vec![Pos::In(0)],
                (Pos::JustRight, Side::Right) => vec![Pos::FarRight],
                (Pos::JustRight, Side::Left) => vec![Pos::In(window as u8 - 1)],
                (Pos::FarRight, Side::Right) => vec![Pos::FarRight],
                (Pos::FarRight, Side::Left) => vec![Pos::FarRight, Pos::JustRight],
                (Pos::In(i), Side::Left) => {
                    if i == 0 {
                        vec![Pos::JustLeft]
                    } else {
                        vec![Pos::In(i - 1)]
                    }
                }
                (Pos::In(i), Side::Right) => {
                    if i as usize == window - 1 {
                        vec![Pos::JustRight]
                    } else {
                        vec![Pos::In(i + 1)]
                    }
                }
            };
            for pos in positions {
                push(
                    Node { pos, state: next_state, cells: cells.clone() },
                    &mut seen,
                    &mut queue,
                );
            }
        }
    }
    true
}

/// Try growing window sizes.
pub fn prove_segment_auto(machine: &Machine) -> Option<usize> {
    let sizes: &[usize] = if machine.symbols() <= 2 {
        &[4, 6, 8, 10, 12]
    } else {
        &[4, 6, 8]
    };
    sizes.iter().copied().find(|&s| prove_halting_segment(machine, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proves_a_counting_machine() {
        // Configurations never recur and sweeps do not close, but no tape
        // position can host the halting step.
        let machine = Machine::parse("1RB1RZ_1LC1RB_0RA0LC").unwrap();
        assert!(prove_segment_auto(&machine).is_some());
    }

    #[test]
    fn never_proves_halting_machines() {
        for line in [
            "1RZ",
            "1RB1LB_1LA1RZ",
            "1RB1LB_1LA0LC_1RZ1LD_1RD0RA",
            "1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA",
            "1RB2LB1RZ_2LA2RB1LB",
            "1RB2LA1RA1RA_1LB1LA3RB1RZ",
        ] {
            let machine = Machine::parse(line).unwrap();
            assert!(
                prove_segment_auto(&machine).is_none(),
                "{line} halts; the segment closure must not prove it"
            );
        }
    }
}
