//! Turing machine workbench: a block-compressed interpreter with run
//! acceleration and regression-pattern jumps, a tree-normal-form
//! enumerator, a budgeted classifier with auditable evidence records, and
//! busy-beaver-style aggregation.

pub mod aggregate;
pub mod classify;
pub mod corpus;
pub mod ctl;
pub mod engine;
pub mod enumerate;
pub mod evidence;
pub mod listfile;
pub mod machine;
pub mod otter;
pub mod segment;
pub mod sweep;
pub mod tape;

pub use engine::{naive_run, EngineFault, EngineParams, MacroEngine, RunResult, Status};
pub use evidence::EvidenceRecord;
pub use machine::{diagnose, Machine, MachineDiagnostics, Next, Side, Transition};
pub use tape::{Block, MacroConfig, RleStack, Segment, Shape};
