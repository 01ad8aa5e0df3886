//! Single-machine makespan minimization with simultaneously deteriorating
//! jobs and positional learning.
//!
//! A job with deterioration rate `b_j` started at time `t` in sequence
//! position `r` takes `(a0 + b_j * t) * alpha^(r-1)` time units: processing
//! grows linearly with the start time and shrinks geometrically with the
//! position. The goal is the permutation minimizing the completion time of
//! the last job.
//!
//! - [`model`]: instances, sequences, schedules, solver outcomes.
//! - [`evaluator`]: the processing-time model, the completion-time
//!   recurrence, and the adjacent-swap threshold analysis.
//! - [`solvers`]: SDR/LDR dispatch rules, the two-sequence threshold
//!   heuristic, exhaustive enumeration, and a pruned exact search.
//! - [`instances`]: seeded instance generation and file I/O.
//! - [`bench`]: the experiment harness comparing heuristics against the
//!   exact optimum.

pub mod bench;
pub mod evaluator;
pub mod instances;
pub mod model;
pub mod solvers;

pub use model::{Instance, Schedule, Sequence, SolveOutcome, SolverId};
