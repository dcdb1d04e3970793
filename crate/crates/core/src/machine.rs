//! Quintuple Turing machine model and its line format.
//!
//! A machine line is one group of slots per state, groups joined by `_`.
//! Each slot is three characters, `<output digit><L|R><next-state letter>`,
//! or `---` for an undefined slot. The letter `Z` names the halt state,
//! letters `a`.. name states `0`.. Input is case-insensitive; output uses
//! lowercase state letters and uppercase `L`/`R`/`Z`.

use std::fmt;

use thiserror::Error;

/// Head travel direction; also used for tape sides and block ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "L"),
            Side::Right => write!(f, "R"),
        }
    }
}

/// Target of a transition: another state or the halt state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Next {
    State(u8),
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub output: u8,
    pub dir: Side,
    pub next: Next,
}

impl Transition {
    pub fn is_halt(&self) -> bool {
        self.next == Next::Halt
    }
}

/// Highest representable state index; states are spelled `a`..`w`.
pub const MAX_STATES: u8 = 23;
/// Symbols are spelled with the digits `0`..`9`.
pub const MAX_SYMBOLS: u8 = 10;

/// An n-state, m-symbol machine with a total slot table; `None` marks an
/// undefined slot (the enumerator works with these; executing one halts the
/// machine with a distinguishing flag).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Machine {
    n: u8,
    m: u8,
    table: Vec<Option<Transition>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty machine line")]
    Empty,
    #[error("state group {group} has length {len}, not a multiple of 3")]
    BadGroupLength { group: usize, len: usize },
    #[error("machine has {0} state groups, more than the supported {MAX_STATES}")]
    TooManyStates(usize),
    #[error("machine has {0} symbol slots per state, more than the supported {MAX_SYMBOLS}")]
    TooManySymbols(usize),
    #[error("slot ({state},{symbol}): illegal output digit '{ch}' (machine has {m} symbols)")]
    BadOutput { state: u8, symbol: u8, ch: char, m: u8 },
    #[error("slot ({state},{symbol}): illegal direction '{ch}'")]
    BadDirection { state: u8, symbol: u8, ch: char },
    #[error("slot ({state},{symbol}): illegal next-state letter '{ch}' (machine has {n} states)")]
    BadNextState { state: u8, symbol: u8, ch: char, n: u8 },
    #[error("machine needs {needed} states and {MAX_STATES} is the maximum")]
    StateRange { needed: usize },
}

pub fn state_letter(s: u8) -> char {
    (b'a' + s) as char
}

impl Machine {
    pub fn new(n: u8, m: u8, table: Vec<Option<Transition>>) -> Machine {
        assert!(n >= 1 && n <= MAX_STATES, "state count out of range");
        assert!(m >= 2 && m <= MAX_SYMBOLS, "symbol count out of range");
        assert_eq!(table.len(), n as usize * m as usize);
        Machine { n, m, table }
    }

    /// All slots undefined.
    pub fn empty(n: u8, m: u8) -> Machine {
        Machine::new(n, m, vec![None; n as usize * m as usize])
    }

    pub fn states(&self) -> u8 {
        self.n
    }

    pub fn symbols(&self) -> u8 {
        self.m
    }

    pub fn dimension(&self) -> u16 {
        self.n as u16 * self.m as u16
    }

    pub fn slot(&self, state: u8, symbol: u8) -> Option<Transition> {
        self.table[state as usize * self.m as usize + symbol as usize]
    }

    pub fn with_slot(&self, state: u8, symbol: u8, t: Transition) -> Machine {
        let mut next = self.clone();
        next.table[state as usize * self.m as usize + symbol as usize] = Some(t);
        next
    }

    pub fn slots(&self) -> impl Iterator<Item = (u8, u8, Option<Transition>)> + '_ {
        let m = self.m;
        self.table
            .iter()
            .enumerate()
            .map(move |(i, t)| ((i / m as usize) as u8, (i % m as usize) as u8, *t))
    }

    pub fn halt_transition_count(&self) -> usize {
        self.table
            .iter()
            .filter(|t| matches!(t, Some(t) if t.is_halt()))
            .count()
    }

    pub fn undefined_count(&self) -> usize {
        self.table.iter().filter(|t| t.is_none()).count()
    }

    /// Enumerator-internal machines with undefined slots are "partial".
    pub fn is_partial(&self) -> bool {
        self.undefined_count() > 0
    }

    /// Parse a machine line. The symbol count is the largest slot count of
    /// any state group, with a floor of two (a one-slot line like `1RZ`
    /// denotes the one-state two-symbol machine whose second slot is
    /// undefined).
    pub fn parse(text: &str) -> Result<Machine, ParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ParseError::Empty);
        }
        let groups: Vec<&str> = text.split('_').collect();
        if groups.len() > MAX_STATES as usize {
            return Err(ParseError::TooManyStates(groups.len()));
        }
        let n = groups.len() as u8;
        let mut max_slots = 0usize;
        for (g, group) in groups.iter().enumerate() {
            if group.len() % 3 != 0 {
                return Err(ParseError::BadGroupLength { group: g, len: group.len() });
            }
            max_slots = max_slots.max(group.len() / 3);
        }
        if max_slots > MAX_SYMBOLS as usize {
            return Err(ParseError::TooManySymbols(max_slots));
        }
        let m = max_slots.max(2) as u8;

        let mut table = vec![None; n as usize * m as usize];
        for (s, group) in groups.iter().enumerate() {
            let chars: Vec<char> = group.chars().collect();
            for (i, slot) in chars.chunks(3).enumerate() {
                let (state, symbol) = (s as u8, i as u8);
                if slot == ['-', '-', '-'] {
                    continue;
                }
                let out = match slot[0].to_digit(10) {
                    Some(d) if (d as u8) < m => d as u8,
                    _ => {
                        return Err(ParseError::BadOutput { state, symbol, ch: slot[0], m });
                    }
                };
                let dir = match slot[1].to_ascii_uppercase() {
                    'L' => Side::Left,
                    'R' => Side::Right,
                    ch => return Err(ParseError::BadDirection { state, symbol, ch }),
                };
                let next = match slot[2].to_ascii_lowercase() {
                    'z' => Next::Halt,
                    ch if ch.is_ascii_lowercase() && ((ch as u8 - b'a') < n) => {
                        Next::State(ch as u8 - b'a')
                    }
                    ch => return Err(ParseError::BadNextState { state, symbol, ch, n }),
                };
                table[s * m as usize + i] = Some(Transition { output: out, dir, next });
            }
        }
        Ok(Machine { n, m, table })
    }

    /// Canonical spelling: every slot of every state rendered positionally.
    pub fn format(&self) -> String {
        let mut out = String::with_capacity(self.table.len() * 3 + self.n as usize);
        for s in 0..self.n {
            if s > 0 {
                out.push('_');
            }
            for i in 0..self.m {
                match self.slot(s, i) {
                    None => out.push_str("---"),
                    Some(t) => {
                        out.push((b'0' + t.output) as char);
                        out.push(match t.dir {
                            Side::Left => 'L',
                            Side::Right => 'R',
                        });
                        out.push(match t.next {
                            Next::Halt => 'Z',
                            Next::State(q) => state_letter(q).to_ascii_uppercase(),
                        });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl std::str::FromStr for Machine {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Machine::parse(s)
    }
}

/// Outcome of the directional control-closure analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlClosure {
    /// Every consultable (state, symbol) pair carries a standard
    /// transition: the machine can never halt and never needs a new slot.
    ClosedHaltFree,
    /// Some halting transition or undefined slot may be consulted.
    MayStop,
}

/// Conservative reachability over (state, symbol) pairs from a mid-run
/// situation. A symbol written before a left move can only ever sit to the
/// head's right, and symmetrically, so states entered moving left only read
/// symbols that can appear on the left. If the closure contains neither a
/// halting transition nor an undefined slot, the machine runs forever.
///
/// The pair about to be consulted is known exactly: `seed_state` reading
/// `seed_symbol`. `left_symbols`/`right_symbols` seed the symbols currently
/// on each side of the head (the blank is always included). From the blank
/// tape use (0, 0) and empty sides.
pub fn control_closure(
    machine: &Machine,
    seed_state: u8,
    seed_symbol: u8,
    left_symbols: &[u8],
    right_symbols: &[u8],
) -> ControlClosure {
    let n = machine.states() as usize;
    let m = machine.symbols() as usize;
    let mut left = vec![false; m];
    let mut right = vec![false; m];
    left[0] = true;
    right[0] = true;
    for &s in left_symbols {
        left[s as usize] = true;
    }
    for &s in right_symbols {
        right[s as usize] = true;
    }
    // States entered while traveling left/right (reading from that side).
    let mut states_left = vec![false; n];
    let mut states_right = vec![false; n];
    loop {
        let mut consult = vec![(seed_state as usize, seed_symbol as usize)];
        for q in 0..n {
            for i in 0..m {
                if (states_left[q] && left[i]) || (states_right[q] && right[i]) {
                    consult.push((q, i));
                }
            }
        }
        let mut changed = false;
        for (q, i) in consult {
            let Some(t) = machine.slot(q as u8, i as u8) else {
                return ControlClosure::MayStop;
            };
            let Next::State(r) = t.next else {
                return ControlClosure::MayStop;
            };
            match t.dir {
                Side::Left => {
                    // The written cell ends up right of the head.
                    if !right[t.output as usize] {
                        right[t.output as usize] = true;
                        changed = true;
                    }
                    if !states_left[r as usize] {
                        states_left[r as usize] = true;
                        changed = true;
                    }
                }
                Side::Right => {
                    if !left[t.output as usize] {
                        left[t.output as usize] = true;
                        changed = true;
                    }
                    if !states_right[r as usize] {
                        states_right[r as usize] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return ControlClosure::ClosedHaltFree;
        }
    }
}

/// Structural predicates computed from a machine table plus a short
/// blank-input simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineDiagnostics {
    pub is_exhaustive: bool,
    pub is_tnf_canonical: bool,
    pub halt_transition_count: usize,
    pub undefined_count: usize,
}

const DIAGNOSE_HOP_BUDGET: u64 = 10_000;

/// Compute structural predicates. A machine is exhaustive when it has
/// exactly one halting transition and every other slot carries a standard
/// transition. Tree-normal-form canonicality checks the fixed first
/// transition, the allowed second-transition set, and that states and
/// symbols are numbered in order of first appearance along a blank-input
/// simulation of up to 10^4 hops.
pub fn diagnose(machine: &Machine) -> MachineDiagnostics {
    let halt_transition_count = machine.halt_transition_count();
    let undefined_count = machine.undefined_count();
    let standard = machine.dimension() as usize - halt_transition_count - undefined_count;
    let is_exhaustive =
        halt_transition_count == 1 && standard == machine.dimension() as usize - 1;
    MachineDiagnostics {
        is_exhaustive,
        is_tnf_canonical: tnf_canonical(machine),
        halt_transition_count,
        undefined_count,
    }
}

fn tnf_canonical(machine: &Machine) -> bool {
    let first = match machine.slot(0, 0) {
        Some(t) => t,
        None => return false,
    };
    if machine.states() == 1 {
        // With a single state the first transition cannot introduce a second
        // state; the only canonical form halts immediately.
        return first.is_halt() && first.output == 1;
    }
    if first != (Transition { output: 1, dir: Side::Right, next: Next::State(1) }) {
        return false;
    }
    // Second transition, when defined, must bounce left into {a, b} or pass
    // control to a fresh state c.
    if let Some(t) = machine.slot(1, 0) {
        let ok = match (t.dir, t.next) {
            (Side::Left, Next::State(0)) | (Side::Left, Next::State(1)) => true,
            (_, Next::State(2)) => machine.states() >= 3,
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    first_appearance_ordered(machine)
}

/// Simulate from the blank tape and require that new states appear in label
/// order and new non-blank symbols in print order.
fn first_appearance_ordered(machine: &Machine) -> bool {
    let mut tape: std::collections::HashMap<i64, u8> = std::collections::HashMap::new();
    let mut pos: i64 = 0;
    let mut state: u8 = 0;
    let mut next_state_label: u8 = 1;
    let mut next_symbol_label: u8 = 1;
    for _ in 0..DIAGNOSE_HOP_BUDGET {
        let read = tape.get(&pos).copied().unwrap_or(0);
        let t = match machine.slot(state, read) {
            Some(t) => t,
            None => return true,
        };
        if t.output >= next_symbol_label {
            if t.output != next_symbol_label {
                return false;
            }
            next_symbol_label += 1;
        }
        tape.insert(pos, t.output);
        pos += match t.dir {
            Side::Left => -1,
            Side::Right => 1,
        };
        match t.next {
            Next::Halt => return true,
            Next::State(q) => {
                if q >= next_state_label {
                    if q != next_state_label {
                        return false;
                    }
                    next_state_label += 1;
                }
                state = q;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_smallest_machine() {
        let m = Machine::parse("1RZ").unwrap();
        assert_eq!(m.states(), 1);
        assert_eq!(m.symbols(), 2);
        assert_eq!(
            m.slot(0, 0),
            Some(Transition { output: 1, dir: Side::Right, next: Next::Halt })
        );
        assert_eq!(m.slot(0, 1), None);
        assert_eq!(m.format(), "1RZ---");
    }

    #[test]
    fn parse_partial_machine() {
        let m = Machine::parse("1RB1LA_0LA---").unwrap();
        assert_eq!(m.states(), 2);
        assert_eq!(m.symbols(), 2);
        assert_eq!(m.slot(1, 1), None);
        assert_eq!(m.halt_transition_count(), 0);
        assert!(m.is_partial());
        assert_eq!(m.format(), "1RB1LA_0LA---");
    }

    #[test]
    fn parse_is_case_insensitive() {
        let a = Machine::parse("1rb1lA_0la---").unwrap();
        let b = Machine::parse("1RB1LA_0LA---").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_rejects_bad_slots() {
        // Output digit beyond the symbol count.
        assert!(matches!(
            Machine::parse("1RB3LA_0LA0RB"),
            Err(ParseError::BadOutput { state: 0, symbol: 1, .. })
        ));
        // Next-state letter beyond the state count.
        assert!(matches!(
            Machine::parse("1RB1LC_0LA0RB"),
            Err(ParseError::BadNextState { state: 0, symbol: 1, .. })
        ));
        // Group length not a multiple of three.
        assert!(matches!(
            Machine::parse("1RB1L_0LA0RB"),
            Err(ParseError::BadGroupLength { group: 0, len: 5 })
        ));
        assert!(matches!(
            Machine::parse("1RB1XB_0LA0RB"),
            Err(ParseError::BadDirection { state: 0, symbol: 1, ch: 'X' })
        ));
    }

    #[test]
    fn format_round_trips() {
        for line in ["1RB1LB_1LA1RZ", "1RB---_1RZ---", "1RB2LB1RZ_2LA2RB1LB", "0RA---"] {
            let m = Machine::parse(line).unwrap();
            assert_eq!(m.format(), *line);
            assert_eq!(Machine::parse(&m.format()).unwrap(), m);
        }
    }

    #[test]
    fn diagnose_smallest_machine() {
        let d = diagnose(&Machine::parse("1RZ").unwrap());
        assert!(!d.is_exhaustive);
        assert_eq!(d.halt_transition_count, 1);
        assert_eq!(d.undefined_count, 1);
        assert!(d.is_tnf_canonical);
    }

    #[test]
    fn diagnose_exhaustive_five_state() {
        let d = diagnose(&Machine::parse("1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA").unwrap());
        assert!(d.is_exhaustive);
        assert_eq!(d.halt_transition_count, 1);
        assert_eq!(d.undefined_count, 0);
        assert!(d.is_tnf_canonical);
    }

    #[test]
    fn diagnose_left_mover_not_canonical() {
        // First transition moves left instead of right.
        let d = diagnose(&Machine::parse("1LB1RZ_1LA1RA").unwrap());
        assert!(!d.is_tnf_canonical);
    }

    #[test]
    fn diagnose_out_of_order_states_not_canonical() {
        // Blank-input execution introduces state d before c ever appears.
        let d = diagnose(&Machine::parse("1RB1RD_1LA1RA_------_1RZ1RA").unwrap());
        assert!(!d.is_tnf_canonical);
        // Printing 2 as the second non-blank is in order...
        let d = diagnose(&Machine::parse("1RB2RZ1LB_1LA2RB1LB").unwrap());
        assert!(d.is_tnf_canonical);
        // ...but printing 3 before 2 is not.
        let d = diagnose(&Machine::parse("1RB3RZ1LB1LB_1LA2RB1LB1LB").unwrap());
        assert!(!d.is_tnf_canonical);
    }

    #[test]
    fn exhaustive_iff_one_halt_and_rest_standard() {
        let m = Machine::parse("1RB1LB_1LA1RZ").unwrap();
        let d = diagnose(&m);
        assert!(d.is_exhaustive);
        assert_eq!(d.halt_transition_count, 1);
        assert_eq!(d.undefined_count, 0);
    }
}
