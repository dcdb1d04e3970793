//! Run-length-encoded two-stack tape configurations.
//!
//! The head sits on the boundary between the two stacks; `facing` names the
//! side whose nearest segment it is about to enter. Rendering follows the
//! entry-direction convention: the letter marks the end of the upcoming
//! block at which the head sits, so facing the right side prints `{l}`
//! (entering that block at its left end) and facing left prints `{r}`.

use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::machine::Side;

/// A fixed-length block of tape symbols.
pub type Block = Vec<u8>;

/// A block repeated `exponent` times; exponents are arbitrary precision and
/// always at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub block: Block,
    pub exponent: BigUint,
}

impl Segment {
    pub fn new(block: Block, exponent: impl Into<BigUint>) -> Segment {
        Segment { block, exponent: exponent.into() }
    }

    pub fn cells(&self) -> BigUint {
        &self.exponent * BigUint::from(self.block.len())
    }

    fn ones(&self) -> BigUint {
        let nonblank = self.block.iter().filter(|&&c| c != 0).count();
        &self.exponent * BigUint::from(nonblank)
    }
}

fn is_blank(block: &[u8]) -> bool {
    block.iter().all(|&c| c == 0)
}

/// One side of the tape. Index 0 is the outermost segment; the segment
/// nearest the head is at the top (end). Beyond the outermost segment the
/// tape is an infinite run of blanks.
#[derive(Debug, Clone, Default)]
pub struct RleStack {
    segs: Vec<Segment>,
    cells: BigUint,
}

impl PartialEq for RleStack {
    fn eq(&self, other: &Self) -> bool {
        self.segs == other.segs
    }
}
impl Eq for RleStack {}
impl Hash for RleStack {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.segs.hash(state);
    }
}

impl RleStack {
    pub fn new() -> RleStack {
        RleStack::default()
    }

    pub fn from_segments(segs: Vec<Segment>) -> RleStack {
        let mut stack = RleStack::new();
        for seg in segs {
            stack.push(seg);
        }
        stack
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    /// Total expanded cell count.
    pub fn cells(&self) -> &BigUint {
        &self.cells
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segs
    }

    pub fn top(&self) -> Option<&Segment> {
        self.segs.last()
    }

    /// Push a segment as the new nearest-to-head segment, merging with an
    /// identical top block and dropping blank runs pushed against the
    /// infinite blank end.
    pub fn push(&mut self, seg: Segment) {
        assert!(!seg.exponent.is_zero(), "segment exponent must be >= 1");
        if self.segs.is_empty() && is_blank(&seg.block) {
            return;
        }
        self.cells += seg.cells();
        if let Some(top) = self.segs.last_mut() {
            if top.block == seg.block {
                top.exponent += seg.exponent;
                return;
            }
        }
        self.segs.push(seg);
    }

    /// Remove one copy of the nearest block and return it. An empty stack
    /// yields a blank block of the given length.
    pub fn decouple(&mut self, k: usize) -> Block {
        match self.segs.last_mut() {
            None => vec![0; k],
            Some(top) => {
                debug_assert_eq!(top.block.len(), k);
                self.cells -= BigUint::from(k);
                if top.exponent.is_one() {
                    self.segs.pop().unwrap().block
                } else {
                    top.exponent -= 1u32;
                    top.block.clone()
                }
            }
        }
    }

    /// Remove the whole nearest segment.
    pub fn pop_run(&mut self) -> Option<Segment> {
        let seg = self.segs.pop()?;
        self.cells -= seg.cells();
        Some(seg)
    }

    pub fn ones(&self) -> BigUint {
        self.segs.iter().map(|s| s.ones()).sum()
    }

    /// The nearest `want` cells, nearest-to-head first, for a stack sitting
    /// on the given side of the head. Stops early at the blank end.
    pub fn top_cells(&self, want: usize, side: Side) -> Vec<u8> {
        if want == 0 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(want.min(4096));
        'outer: for seg in self.segs.iter().rev() {
            let reps = seg.exponent.to_usize().unwrap_or(usize::MAX);
            for _ in 0..reps {
                let cells: &mut dyn Iterator<Item = &u8> = match side {
                    Side::Left => &mut seg.block.iter().rev(),
                    Side::Right => &mut seg.block.iter(),
                };
                for &c in cells {
                    out.push(c);
                    if out.len() == want {
                        break 'outer;
                    }
                }
            }
        }
        out
    }

    /// Distinct symbols present anywhere in the stack.
    pub fn symbols(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        let mut out = Vec::new();
        for seg in &self.segs {
            for &c in &seg.block {
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    out.push(c);
                }
            }
        }
        out
    }

    /// Expanded cells ordered outermost-first, or `None` past the cap.
    fn expand(&self, cap: usize) -> Option<Vec<u8>> {
        if self.cells > BigUint::from(cap) {
            return None;
        }
        let mut out = Vec::new();
        for seg in &self.segs {
            let reps = seg.exponent.to_usize()?;
            for _ in 0..reps {
                out.extend_from_slice(&seg.block);
            }
        }
        Some(out)
    }
}

/// Head state plus the side it is about to enter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Head {
    pub state: u8,
    pub facing: Side,
}

/// A two-stack tape configuration. `head` is `None` for the terminal
/// configuration left behind by a halted machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MacroConfig {
    pub left: RleStack,
    pub right: RleStack,
    pub head: Option<Head>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("configuration expansion exceeds the {cap}-cell cap")]
pub struct ExpandError {
    pub cap: usize,
}

impl MacroConfig {
    /// Blank tape, start state, facing right.
    pub fn start() -> MacroConfig {
        MacroConfig {
            left: RleStack::new(),
            right: RleStack::new(),
            head: Some(Head { state: 0, facing: Side::Right }),
        }
    }

    pub fn stack(&self, side: Side) -> &RleStack {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn stack_mut(&mut self, side: Side) -> &mut RleStack {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn total_cells(&self) -> BigUint {
        self.left.cells() + self.right.cells()
    }

    /// Non-blank cells, exact.
    pub fn ones_count(&self) -> BigUint {
        self.left.ones() + self.right.ones()
    }

    /// Length of the longest run of non-blank cells, computed segment by
    /// segment so huge exponents never force an expansion.
    pub fn contiguous_ones(&self) -> BigUint {
        let mut best = BigUint::zero();
        let mut carry = BigUint::zero();
        let segments = self
            .left
            .segments()
            .iter()
            .chain(self.right.segments().iter().rev());
        for seg in segments {
            let k = seg.block.len();
            let nonblank = seg.block.iter().filter(|&&c| c != 0).count();
            if nonblank == k {
                carry += seg.cells();
                continue;
            }
            let prefix = seg.block.iter().take_while(|&&c| c != 0).count();
            let suffix = seg.block.iter().rev().take_while(|&&c| c != 0).count();
            let mut interior = 0usize;
            let mut run = 0usize;
            for &c in &seg.block {
                if c != 0 {
                    run += 1;
                    interior = interior.max(run);
                } else {
                    run = 0;
                }
            }
            best = best.max(&carry + BigUint::from(prefix));
            best = best.max(BigUint::from(interior));
            if seg.exponent > BigUint::one() {
                best = best.max(BigUint::from(suffix + prefix));
            }
            carry = BigUint::from(suffix);
        }
        best.max(carry)
    }

    /// Reconstruct the finite tape window (outermost-left to
    /// outermost-right). Fails loudly past the cell cap.
    pub fn expand(&self, cap: usize) -> Result<Vec<u8>, ExpandError> {
        let left = self.left.expand(cap).ok_or(ExpandError { cap })?;
        let right = self.right.expand(cap).ok_or(ExpandError { cap })?;
        if left.len() + right.len() > cap {
            return Err(ExpandError { cap });
        }
        let mut cells = left;
        cells.extend(right.iter().rev().copied());
        Ok(cells)
    }

    /// Compress a raw cell window into a headless configuration with block
    /// size `k`, padding with blanks on the right to fill the last block.
    pub fn from_cells(cells: &[u8], k: usize) -> MacroConfig {
        assert!(k >= 1);
        let mut padded = cells.to_vec();
        while padded.len() % k != 0 {
            padded.push(0);
        }
        let mut left = RleStack::new();
        for chunk in padded.chunks(k) {
            left.push(Segment::new(chunk.to_vec(), 1u32));
        }
        MacroConfig { left, right: RleStack::new(), head: None }
    }

    /// The block sequences, state, and facing with the exponents separated
    /// out positionally (left outermost-first, then right nearest-first,
    /// matching rendering order).
    pub fn shape(&self) -> (Arc<Shape>, Vec<BigUint>) {
        let head = self.head.expect("shape of a terminal configuration");
        let left_blocks: Vec<Block> =
            self.left.segments().iter().map(|s| s.block.clone()).collect();
        let right_blocks: Vec<Block> =
            self.right.segments().iter().rev().map(|s| s.block.clone()).collect();
        let mut exponents =
            Vec::with_capacity(left_blocks.len() + right_blocks.len());
        exponents.extend(self.left.segments().iter().map(|s| s.exponent.clone()));
        exponents.extend(self.right.segments().iter().rev().map(|s| s.exponent.clone()));
        (
            Arc::new(Shape {
                left_blocks,
                right_blocks,
                state: head.state,
                facing: head.facing,
            }),
            exponents,
        )
    }

    /// Rebuild a configuration from a shape and a positional exponent
    /// vector. Exponent changes never alter the block sequence, so the
    /// result stays canonical.
    pub fn from_shape(shape: &Shape, exponents: &[BigUint]) -> MacroConfig {
        assert_eq!(
            exponents.len(),
            shape.left_blocks.len() + shape.right_blocks.len()
        );
        let mut left = RleStack::new();
        for (block, e) in shape.left_blocks.iter().zip(exponents) {
            left.push(Segment::new(block.clone(), e.clone()));
        }
        let mut right = RleStack::new();
        let right_exps = &exponents[shape.left_blocks.len()..];
        for (block, e) in shape.right_blocks.iter().zip(right_exps).rev() {
            right.push(Segment::new(block.clone(), e.clone()));
        }
        MacroConfig {
            left,
            right,
            head: Some(Head { state: shape.state, facing: shape.facing }),
        }
    }

    /// Textual rendering: `<left segments> {state} {l|r} <right segments>`,
    /// exponent omitted when 1.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_segments(&mut out, self.left.segments().iter());
        if let Some(head) = self.head {
            if !out.is_empty() {
                out.push(' ');
            }
            let _ = write!(out, "{{{}}}", crate::machine::state_letter(head.state));
            // Entry-direction letter: the head sits at the left end of the
            // right side's nearest block, and vice versa.
            let letter = match head.facing {
                Side::Right => 'l',
                Side::Left => 'r',
            };
            let _ = write!(out, " {{{letter}}}");
        }
        let at_start = out.is_empty();
        let mut right = String::new();
        render_segments(&mut right, self.right.segments().iter().rev());
        if !right.is_empty() {
            if !at_start {
                out.push(' ');
            }
            out.push_str(&right);
        }
        if out.is_empty() {
            out.push_str("(blank)");
        }
        out
    }
}

fn render_segments<'a>(out: &mut String, segs: impl Iterator<Item = &'a Segment>) {
    for (i, seg) in segs.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let cells: String = seg.block.iter().map(|&c| (b'0' + c) as char).collect();
        if seg.exponent.is_one() {
            out.push_str(&cells);
        } else {
            let _ = write!(out, "({cells})^{}", seg.exponent);
        }
    }
}

/// Block sequences, state, and facing; two configurations match for the
/// pattern detector exactly when their shapes are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    pub left_blocks: Vec<Block>,
    pub right_blocks: Vec<Block>,
    pub state: u8,
    pub facing: Side,
}

impl Shape {
    pub fn positions(&self) -> usize {
        self.left_blocks.len() + self.right_blocks.len()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.left_blocks.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let cells: String = block.iter().map(|&c| (b'0' + c) as char).collect();
            let _ = write!(out, "({cells})^*");
        }
        if !out.is_empty() {
            out.push(' ');
        }
        let _ = write!(out, "{{{}}}", crate::machine::state_letter(self.state));
        let letter = match self.facing {
            Side::Right => 'l',
            Side::Left => 'r',
        };
        let _ = write!(out, " {{{letter}}}");
        for block in &self.right_blocks {
            let cells: String = block.iter().map(|&c| (b'0' + c) as char).collect();
            let _ = write!(out, " ({cells})^*");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(cells: &[u8], e: u32) -> Segment {
        Segment::new(cells.to_vec(), e)
    }

    #[test]
    fn push_merges_identical_blocks() {
        let mut stack = RleStack::from_segments(vec![seg(&[0, 0, 1], 3)]);
        stack.push(seg(&[0, 0, 1], 2));
        assert_eq!(stack.segments().len(), 1);
        assert_eq!(stack.top().unwrap().exponent, BigUint::from(5u32));
    }

    #[test]
    fn push_drops_blanks_on_empty_stack() {
        let mut stack = RleStack::new();
        stack.push(seg(&[0, 0, 0], 7));
        assert!(stack.is_empty());
        // But interior blanks stay.
        stack.push(seg(&[0, 1, 1], 1));
        stack.push(seg(&[0, 0, 0], 2));
        assert_eq!(stack.segments().len(), 2);
    }

    #[test]
    fn push_keeps_distinct_blocks() {
        let mut stack = RleStack::from_segments(vec![seg(&[0, 0, 1], 3)]);
        stack.push(seg(&[0, 1, 1], 1));
        assert_eq!(stack.segments().len(), 2);
    }

    #[test]
    fn decouple_decrements_and_removes() {
        let mut stack = RleStack::from_segments(vec![seg(&[1, 1, 0], 2), seg(&[0, 0, 1], 12)]);
        assert_eq!(stack.decouple(3), vec![0, 0, 1]);
        assert_eq!(stack.top().unwrap().exponent, BigUint::from(11u32));

        let mut stack = RleStack::from_segments(vec![seg(&[1, 1, 0], 2), seg(&[0, 0, 1], 1)]);
        assert_eq!(stack.decouple(3), vec![0, 0, 1]);
        assert_eq!(stack.top().unwrap().block, vec![1, 1, 0]);
    }

    #[test]
    fn decouple_on_empty_stack_yields_blanks() {
        let mut stack = RleStack::new();
        assert_eq!(stack.decouple(2), vec![0, 0]);
        assert!(stack.is_empty());
    }

    #[test]
    fn decouple_then_push_restores_stack() {
        let orig = RleStack::from_segments(vec![seg(&[1, 1, 0], 2), seg(&[0, 0, 1], 12)]);
        let mut stack = orig.clone();
        let block = stack.decouple(3);
        stack.push(Segment::new(block, 1u32));
        assert_eq!(stack, orig);
        assert_eq!(stack.cells(), orig.cells());
    }

    #[test]
    fn ones_count_examples() {
        assert!(MacroConfig::start().ones_count().is_zero());

        // 1 (110110)^10 11
        let config = MacroConfig {
            left: RleStack::from_segments(vec![
                seg(&[1], 1),
                // run-length layer is per-block; use block length 6 here
            ]),
            right: RleStack::from_segments(vec![
                seg(&[1, 1], 1),
                seg(&[1, 1, 0, 1, 1, 0], 10),
            ]),
            head: None,
        };
        assert_eq!(config.ones_count(), BigUint::from(1u32 + 4 * 10 + 2));
    }

    #[test]
    fn contiguous_ones_examples() {
        // 1 0 1 1 -> 2
        let config = MacroConfig::from_cells(&[1, 0, 1, 1], 1);
        assert_eq!(config.contiguous_ones(), BigUint::from(2u32));
        // (11)^5 -> 10
        let config = MacroConfig {
            left: RleStack::from_segments(vec![seg(&[1, 1], 5)]),
            right: RleStack::new(),
            head: None,
        };
        assert_eq!(config.contiguous_ones(), BigUint::from(10u32));
        // 1 (110110)^10 11: leading 1 joins the first block's 11.
        let config = MacroConfig {
            left: RleStack::from_segments(vec![seg(&[1], 1)]),
            right: RleStack::from_segments(vec![seg(&[1, 1], 1), seg(&[1, 1, 0, 1, 1, 0], 10)]),
            head: None,
        };
        assert_eq!(config.contiguous_ones(), BigUint::from(3u32));
    }

    #[test]
    fn expand_round_trip() {
        let cells = vec![0, 1, 1, 0, 2, 0, 1];
        let config = MacroConfig::from_cells(&cells, 3);
        let back = config.expand(10_000).unwrap();
        // Compression pads to a whole block on the right.
        assert_eq!(&back[..cells.len()], &cells[..]);
        assert!(back[cells.len()..].iter().all(|&c| c == 0));
    }

    #[test]
    fn expand_respects_cap() {
        let config = MacroConfig {
            left: RleStack::from_segments(vec![seg(&[1, 1], 100)]),
            right: RleStack::new(),
            head: None,
        };
        assert!(config.expand(10).is_err());
        assert!(config.expand(200).is_ok());
    }

    #[test]
    fn shapes_separate_exponents() {
        // 001 (111)^1 {b} (001)^66 100 versus 001 (111)^6 {b} (001)^63 100
        let mk = |x: u32, y: u32| MacroConfig {
            left: RleStack::from_segments(vec![seg(&[0, 0, 1], 1), seg(&[1, 1, 1], x)]),
            right: RleStack::from_segments(vec![seg(&[1, 0, 0], 1), seg(&[0, 0, 1], y)]),
            head: Some(Head { state: 1, facing: Side::Right }),
        };
        let (s1, e1) = mk(1, 66).shape();
        let (s2, e2) = mk(6, 63).shape();
        assert_eq!(s1, s2);
        assert_eq!(
            e1,
            vec![1u32, 1, 66, 1].into_iter().map(BigUint::from).collect::<Vec<_>>()
        );
        assert_eq!(
            e2,
            vec![1u32, 6, 63, 1].into_iter().map(BigUint::from).collect::<Vec<_>>()
        );

        // Different state or facing: different shapes.
        let mut other = mk(1, 66);
        other.head = Some(Head { state: 2, facing: Side::Right });
        assert_ne!(*s1, other.shape().0.as_ref().clone());
        let mut other = mk(1, 66);
        other.head = Some(Head { state: 1, facing: Side::Left });
        assert_ne!(*s1, other.shape().0.as_ref().clone());
    }

    #[test]
    fn from_shape_round_trips() {
        let config = MacroConfig {
            left: RleStack::from_segments(vec![seg(&[0, 0, 1], 1), seg(&[1, 1, 1], 11)]),
            right: RleStack::from_segments(vec![seg(&[1, 0, 0], 1), seg(&[0, 0, 1], 60)]),
            head: Some(Head { state: 1, facing: Side::Right }),
        };
        let (shape, exps) = config.shape();
        assert_eq!(MacroConfig::from_shape(&shape, &exps), config);
    }

    #[test]
    fn render_matches_notation() {
        let config = MacroConfig {
            left: RleStack::from_segments(vec![seg(&[0, 0, 1], 1), seg(&[1, 1, 1], 6)]),
            right: RleStack::from_segments(vec![seg(&[1, 0, 0], 1), seg(&[0, 0, 1], 63)]),
            head: Some(Head { state: 1, facing: Side::Right }),
        };
        assert_eq!(config.render(), "001 (111)^6 {b} {l} (001)^63 100");
    }
}
