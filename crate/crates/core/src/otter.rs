//! Regression-pattern detection over recent configurations and the jump
//! that fast-forwards a detected pattern to its last occurrence before the
//! regressing exponent would reach zero.
//!
//! A pattern is three same-shape configurations at hops H3 < H2 < H1 in
//! which exactly one exponent position regresses arithmetically toward the
//! present (y3 = y1 + 2a, y2 = y1 + a for some a > 0) while every other
//! position is constant or grows as an exact arithmetic progression. With m
//! further occurrences predicted, the final hop follows a quadratic in m
//! because the hop differences themselves grow with a constant second
//! difference.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedSub, Zero};
use serde::Serialize;

use crate::engine::{EngineFault, EngineParams, MacroEngine, StepOutcome};
use crate::machine::Machine;
use crate::tape::{MacroConfig, Shape};

#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub hop: BigUint,
    pub shape: Arc<Shape>,
    pub shape_hash: u64,
    pub exponents: Vec<BigUint>,
}

impl HistoryEntry {
    pub fn new(hop: BigUint, shape: Arc<Shape>, exponents: Vec<BigUint>) -> HistoryEntry {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        shape.hash(&mut h);
        HistoryEntry { hop, shape, shape_hash: h.finish(), exponents }
    }
}

/// FIFO of the most recent configurations, oldest first, hops strictly
/// increasing. A window of 150 has been enough for every machine tried.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    capacity: usize,
    entries: VecDeque<HistoryEntry>,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> HistoryBuffer {
        HistoryBuffer { capacity, entries: VecDeque::with_capacity(capacity.min(1024)) }
    }

    pub fn push(&mut self, entry: HistoryEntry) {
        debug_assert!(self.entries.back().map_or(true, |last| last.hop < entry.hop));
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }
}

/// A detected three-occurrence regression with its prediction.
#[derive(Debug, Clone)]
pub struct OtterMatch {
    pub h3: BigUint,
    pub h2: BigUint,
    pub h1: BigUint,
    pub regressor_index: usize,
    /// Regression step per occurrence.
    pub a: BigUint,
    /// Growth per occurrence at each position; zero at constant positions
    /// and at the regressor.
    pub deltas: Vec<BigUint>,
    /// Further occurrences after H1.
    pub m: BigUint,
    pub predicted_hop: BigUint,
    pub predicted_exponents: Vec<BigUint>,
    pub shape: Arc<Shape>,
}

/// One applied jump, as logged (JSONL).
#[derive(Debug, Clone, Serialize)]
pub struct OtterJumpRecord {
    #[serde(rename = "H3")]
    pub h3: String,
    #[serde(rename = "H2")]
    pub h2: String,
    #[serde(rename = "H1")]
    pub h1: String,
    pub regressor_index: usize,
    pub a: String,
    pub m: String,
    pub predicted_hop: String,
    pub shape: String,
    pub verified: bool,
    pub multi_regressor_skips: u64,
}

/// How many further occurrences follow H1: y1 div a, less one when a
/// divides y1, so the final regressor exponent stays in [1, a].
pub fn occurrences_after(y1: &BigUint, a: &BigUint) -> BigUint {
    debug_assert!(!y1.is_zero() && !a.is_zero());
    let (q, r) = y1.div_rem(a);
    if r.is_zero() {
        q - 1u32
    } else {
        q
    }
}

/// Hop of the final occurrence, m occurrences past H1. Taking H3, H2, H1 as
/// a_0, a_1, a_2 of a sequence whose differences grow by the constant
/// second difference d2 = (H1-H2) - (H2-H3):
///
///   a_n = H3 + (H2 - H3)*n + d2 * n(n-1)/2,   evaluated at n = m + 2.
///
/// Returns `None` when the second difference is negative (the pattern is
/// rejected, not an arithmetic fault).
pub fn predict_hop(h3: &BigUint, h2: &BigUint, h1: &BigUint, m: &BigUint) -> Option<BigUint> {
    debug_assert!(h3 < h2 && h2 < h1);
    let d1 = h2 - h3;
    let d2 = (h1 - h2).checked_sub(&d1)?;
    let n = m + 2u32;
    let pairs = (&n * (&n - 1u32)) / 2u32;
    Some(h3 + &d1 * &n + d2 * pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Progression {
    Constant,
    /// Strictly increasing toward the present in equal steps.
    Growing,
    /// Strictly decreasing toward the present in equal steps.
    Regressing,
    /// Anything else, including the mixed equal/strict cases.
    Broken,
}

/// Classify one exponent position across (oldest, middle, newest).
fn classify(old: &BigUint, mid: &BigUint, new: &BigUint) -> Progression {
    if old == mid && mid == new {
        Progression::Constant
    } else if new > mid && mid > old && (new - mid) == (mid - old) {
        Progression::Growing
    } else if old > mid && mid > new && (old - mid) == (mid - new) {
        Progression::Regressing
    } else {
        Progression::Broken
    }
}

/// Scan the history for two earlier same-shape occurrences forming a
/// single-regressor pattern with the current configuration. Pairs are
/// scanned newest-first and the first qualifying pair wins; pairs with two
/// or more regressing positions are counted and skipped.
pub fn find_match(history: &HistoryBuffer, current: &HistoryEntry) -> (Option<OtterMatch>, u64) {
    let mut multi_skips = 0u64;
    let same_shape: Vec<&HistoryEntry> = history
        .iter()
        .filter(|e| {
            e.shape_hash == current.shape_hash
                && e.hop < current.hop
                && e.shape == current.shape
        })
        .collect();
    if same_shape.len() < 2 {
        return (None, 0);
    }
    // Newest-first over (H2, H3) pairs.
    for i2 in (1..same_shape.len()).rev() {
        for i3 in (0..i2).rev() {
            let e2 = same_shape[i2];
            let e3 = same_shape[i3];
            let mut regressor = None;
            let mut multi = false;
            let mut broken = false;
            for (idx, y1) in current.exponents.iter().enumerate() {
                match classify(&e3.exponents[idx], &e2.exponents[idx], y1) {
                    Progression::Constant | Progression::Growing => {}
                    Progression::Regressing => {
                        if regressor.is_some() {
                            multi = true;
                            break;
                        }
                        regressor = Some(idx);
                    }
                    Progression::Broken => {
                        broken = true;
                        break;
                    }
                }
            }
            if multi {
                multi_skips += 1;
                continue;
            }
            if broken {
                continue;
            }
            let Some(reg) = regressor else { continue };
            let y1 = &current.exponents[reg];
            let a = &e2.exponents[reg] - y1;
            let m = occurrences_after(y1, &a);
            if m.is_zero() {
                continue;
            }
            let Some(predicted_hop) = predict_hop(&e3.hop, &e2.hop, &current.hop, &m) else {
                continue;
            };
            let mut deltas = Vec::with_capacity(current.exponents.len());
            let mut predicted_exponents = Vec::with_capacity(current.exponents.len());
            for (idx, y) in current.exponents.iter().enumerate() {
                if idx == reg {
                    deltas.push(BigUint::zero());
                    predicted_exponents.push(y - &m * &a);
                } else {
                    let delta = y - &e2.exponents[idx];
                    predicted_exponents.push(y + &m * &delta);
                    deltas.push(delta);
                }
            }
            debug_assert!(!predicted_exponents[reg].is_zero());
            debug_assert!(predicted_exponents[reg] <= a);
            return (
                Some(OtterMatch {
                    h3: e3.hop.clone(),
                    h2: e2.hop.clone(),
                    h1: current.hop.clone(),
                    regressor_index: reg,
                    a,
                    deltas,
                    m,
                    predicted_hop,
                    predicted_exponents,
                    shape: current.shape.clone(),
                }),
                multi_skips,
            );
        }
    }
    (None, multi_skips)
}

/// Rewrite the configuration to the pattern's final occurrence: the
/// regressor drops to y1 - m*a (never zero), every other position grows by
/// m times its per-occurrence delta.
pub fn apply_jump(config: &MacroConfig, m: &OtterMatch) -> Result<MacroConfig, EngineFault> {
    let (shape, exponents) = config.shape();
    if shape != m.shape || exponents.len() != m.predicted_exponents.len() {
        return Err(EngineFault("jump applied to a configuration of a different shape".into()));
    }
    if m.predicted_exponents.iter().any(|e| e.is_zero()) {
        return Err(EngineFault("jump would drive an exponent to zero".into()));
    }
    Ok(MacroConfig::from_shape(&m.shape, &m.predicted_exponents))
}

/// Budget for the verification simulation.
pub const VERIFY_STEP_BUDGET: u64 = 100_000;

/// Check a match by simulating forward (jumps disabled) until the shape
/// recurs once, and comparing the observed hop and exponents against the
/// prediction for occurrence index 3. Any deviation, or running past the
/// verification budget, discards the match.
pub fn verify_jump(machine: &Machine, config: &MacroConfig, m: &OtterMatch, k: usize) -> bool {
    let expected_hop = {
        let d1 = &m.h2 - &m.h3;
        let Some(d2) = (&m.h1 - &m.h2).checked_sub(&d1) else { return false };
        &m.h3 + &d1 * 3u32 + d2 * 3u32
    };
    let mut expected_exponents = Vec::new();
    {
        let (_, current) = config.shape();
        for (idx, y) in current.iter().enumerate() {
            if idx == m.regressor_index {
                expected_exponents.push(y - &m.a);
            } else {
                expected_exponents.push(y + &m.deltas[idx]);
            }
        }
    }
    let params = EngineParams {
        k,
        otter: false,
        max_steps: VERIFY_STEP_BUDGET,
        max_hops: None,
        ..EngineParams::default()
    };
    let mut engine = MacroEngine::with_config(machine.clone(), params, config.clone(), m.h1.clone());
    loop {
        match engine.step(false) {
            Ok(StepOutcome::Ran(_)) => {}
            _ => return false,
        }
        if engine.steps() > VERIFY_STEP_BUDGET {
            return false;
        }
        let Some(_) = engine.config().head else { return false };
        let (shape, exponents) = engine.config().shape();
        if shape == m.shape {
            return *engine.hops() == expected_hop && exponents == expected_exponents;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::Side;
    use crate::tape::{Head, RleStack, Segment};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn sweep_config(x: u64, y: u64) -> MacroConfig {
        MacroConfig {
            left: RleStack::from_segments(vec![
                Segment::new(vec![0, 0, 1], 1u32),
                Segment::new(vec![1, 1, 1], x),
            ]),
            right: RleStack::from_segments(vec![
                Segment::new(vec![1, 0, 0], 1u32),
                Segment::new(vec![0, 0, 1], y),
            ]),
            head: Some(Head { state: 1, facing: Side::Right }),
        }
    }

    fn entry(hop: u64, x: u64, y: u64) -> HistoryEntry {
        let (shape, exponents) = sweep_config(x, y).shape();
        HistoryEntry::new(big(hop), shape, exponents)
    }

    #[test]
    fn occurrences_examples() {
        assert_eq!(occurrences_after(&big(60), &big(3)), big(19));
        assert_eq!(occurrences_after(&big(7), &big(3)), big(2));
        assert_eq!(occurrences_after(&big(5), &big(5)), big(0));
    }

    #[test]
    fn predict_hop_examples() {
        assert_eq!(
            predict_hop(&big(12393), &big(12480), &big(12657), &big(19)),
            Some(big(33120))
        );
        // Constant difference: H1 + m*d.
        assert_eq!(predict_hop(&big(100), &big(110), &big(120), &big(4)), Some(big(160)));
        // Hand evaluation at n = 3.
        assert_eq!(predict_hop(&big(0), &big(1), &big(3), &big(1)), Some(big(6)));
        // Negative second difference is a rejection, not a panic.
        assert_eq!(predict_hop(&big(0), &big(10), &big(15), &big(1)), None);
    }

    #[test]
    fn worked_example_match_and_jump() {
        let mut history = HistoryBuffer::new(150);
        history.push(entry(12393, 1, 66));
        history.push(entry(12480, 6, 63));
        let current = entry(12657, 11, 60);
        let (m, skips) = find_match(&history, &current);
        let m = m.expect("pattern detected");
        assert_eq!(skips, 0);
        assert_eq!(m.regressor_index, 2);
        assert_eq!(m.a, big(3));
        assert_eq!(m.deltas, vec![big(0), big(5), big(0), big(0)]);
        assert_eq!(m.m, big(19));
        assert_eq!(m.predicted_hop, big(33120));
        assert_eq!(m.predicted_exponents, vec![big(1), big(106), big(3), big(1)]);

        let jumped = apply_jump(&sweep_config(11, 60), &m).unwrap();
        assert_eq!(jumped, sweep_config(106, 3));
    }

    #[test]
    fn non_arithmetic_position_is_no_match() {
        let mut history = HistoryBuffer::new(150);
        history.push(entry(100, 7, 30));
        history.push(entry(200, 8, 20));
        // Position 1 runs 7, 8, 10: not an arithmetic progression.
        let current = entry(320, 10, 10);
        let (m, skips) = find_match(&history, &current);
        assert!(m.is_none());
        assert_eq!(skips, 0);
    }

    #[test]
    fn two_regressors_are_logged_and_skipped() {
        let mut history = HistoryBuffer::new(150);
        history.push(entry(100, 30, 30));
        history.push(entry(200, 20, 20));
        let current = entry(320, 10, 10);
        let (m, skips) = find_match(&history, &current);
        assert!(m.is_none());
        assert_eq!(skips, 1);
    }

    #[test]
    fn mixed_equal_strict_cases_are_excluded() {
        // Oldest two equal, then a strict drop: 60, 60, 50 toward present.
        let mut history = HistoryBuffer::new(150);
        history.push(entry(100, 1, 60));
        history.push(entry(200, 1, 60));
        let current = entry(320, 1, 50);
        let (m, _) = find_match(&history, &current);
        assert!(m.is_none());
    }

    #[test]
    fn zero_final_occurrences_means_no_match() {
        // y1 = 3 with a = 3 leaves m = 0: nothing to jump over.
        let mut history = HistoryBuffer::new(150);
        history.push(entry(100, 1, 9));
        history.push(entry(200, 6, 6));
        let current = entry(320, 11, 3);
        let (m, _) = find_match(&history, &current);
        assert!(m.is_none());
    }

    #[test]
    fn constant_positions_stay_fixed_across_jump() {
        let mut history = HistoryBuffer::new(150);
        history.push(entry(12393, 5, 66));
        history.push(entry(12480, 5, 63));
        let current = entry(12657, 5, 60);
        let (m, _) = find_match(&history, &current);
        let m = m.unwrap();
        let jumped = apply_jump(&sweep_config(5, 60), &m).unwrap();
        assert_eq!(jumped, sweep_config(5, 3));
    }
}
