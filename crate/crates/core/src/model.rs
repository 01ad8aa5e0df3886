//! Core domain types: problem instances, processing orders, evaluated
//! schedules, and solver outcomes.
//!
//! Job indices and sequence positions are 0-based inside the crate; every
//! text format and display string uses 1-based labels (`J1`, `J2`, ...).
//! All types are immutable after construction and safe to share across
//! threads.

use std::fmt;
use std::time::Duration;

use thiserror::Error;

/// Why a set of raw instance fields was rejected. Nothing is clamped; a
/// value outside its domain is always an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("a0 must be positive, got {0}")]
    NonPositiveA0(f64),
    #[error("alpha must satisfy 0 < alpha <= 1, got {0}")]
    AlphaOutOfRange(f64),
    #[error("deterioration rate of J{job} must be >= 0, got {value}")]
    NegativeRate { job: usize, value: f64 },
    #[error("start time t0 must be >= 0, got {0}")]
    NegativeStart(f64),
    #[error("an instance needs at least one job")]
    EmptyJobs,
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
}

/// A single-machine problem: `n` jobs sharing a basic processing time `a0`
/// and a learning index `alpha`, with one linear deterioration rate per job
/// and machine start time `t0`.
///
/// A job with rate `b` started at time `t` in position `r` (1-based) takes
/// `(a0 + b * t) * alpha^(r-1)` time units.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    a0: f64,
    alpha: f64,
    t0: f64,
    b: Vec<f64>,
}

impl Instance {
    /// Validates the raw fields and builds an instance.
    ///
    /// `alpha = 1` is allowed (no learning effect), as is `t0 = 0` (the
    /// machine starts at the origin).
    pub fn new(a0: f64, alpha: f64, t0: f64, b: Vec<f64>) -> Result<Self, ValidationError> {
        if b.is_empty() {
            return Err(ValidationError::EmptyJobs);
        }
        if a0.is_nan() || a0 <= 0.0 {
            return Err(ValidationError::NonPositiveA0(a0));
        }
        if a0.is_infinite() {
            return Err(ValidationError::NonFinite { field: "a0", value: a0 });
        }
        if alpha.is_nan() || alpha <= 0.0 || alpha > 1.0 {
            return Err(ValidationError::AlphaOutOfRange(alpha));
        }
        if t0.is_nan() || t0 < 0.0 {
            return Err(ValidationError::NegativeStart(t0));
        }
        if t0.is_infinite() {
            return Err(ValidationError::NonFinite { field: "t0", value: t0 });
        }
        for (idx, &rate) in b.iter().enumerate() {
            if rate.is_nan() || rate < 0.0 {
                return Err(ValidationError::NegativeRate { job: idx + 1, value: rate });
            }
            if rate.is_infinite() {
                return Err(ValidationError::NonFinite { field: "b", value: rate });
            }
        }
        Ok(Self { a0, alpha, t0, b })
    }

    /// Number of jobs.
    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// Common basic processing time.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Learning index in `(0, 1]`; 1 disables the positional effect.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Machine start time.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// All deterioration rates, indexed 0-based.
    pub fn rates(&self) -> &[f64] {
        &self.b
    }

    /// Deterioration rate of `job` (0-based).
    pub fn rate(&self, job: usize) -> f64 {
        self.b[job]
    }
}

/// Why a job order was rejected as a sequence for an instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("sequence has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("job J{0} appears more than once")]
    DuplicateJob(usize),
    #[error("job label J{0} is outside J1..=J{1}")]
    IndexOutOfRange(usize, usize),
}

/// A processing order: a permutation of an instance's jobs. `jobs()[r]` is
/// the 0-based job processed in 0-based position `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    order: Vec<usize>,
}

impl Sequence {
    /// Validates a 0-based order against an instance size.
    pub fn from_zero_based(n: usize, order: Vec<usize>) -> Result<Self, SequenceError> {
        if order.len() != n {
            return Err(SequenceError::WrongLength { expected: n, got: order.len() });
        }
        let mut seen = vec![false; n];
        for &job in &order {
            if job >= n {
                return Err(SequenceError::IndexOutOfRange(job + 1, n));
            }
            if seen[job] {
                return Err(SequenceError::DuplicateJob(job + 1));
            }
            seen[job] = true;
        }
        Ok(Self { order })
    }

    /// Validates a 1-based order (the convention of files and reports).
    pub fn from_one_based(n: usize, labels: &[usize]) -> Result<Self, SequenceError> {
        if labels.len() != n {
            return Err(SequenceError::WrongLength { expected: n, got: labels.len() });
        }
        let mut order = Vec::with_capacity(labels.len());
        for &label in labels {
            if label == 0 || label > n {
                return Err(SequenceError::IndexOutOfRange(label, n));
            }
            order.push(label - 1);
        }
        Self::from_zero_based(n, order)
    }

    /// Wraps an order already known to be a permutation of `0..len`.
    pub(crate) fn from_permutation_unchecked(order: Vec<usize>) -> Self {
        debug_assert!({
            let mut seen = vec![false; order.len()];
            order.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
        });
        Self { order }
    }

    /// The order as 0-based job indices.
    pub fn jobs(&self) -> &[usize] {
        &self.order
    }

    /// The order as 1-based job labels.
    pub fn one_based(&self) -> Vec<usize> {
        self.order.iter().map(|&j| j + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

impl fmt::Display for Sequence {
    /// Space-separated 1-based labels, e.g. `J3 J1 J2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &job) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "J{}", job + 1)?;
        }
        Ok(())
    }
}

/// A sequence together with the completion time of every position and the
/// resulting makespan (the last completion time).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    sequence: Sequence,
    completion_times: Vec<f64>,
    makespan: f64,
}

impl Schedule {
    pub(crate) fn new(sequence: Sequence, completion_times: Vec<f64>) -> Self {
        debug_assert_eq!(sequence.len(), completion_times.len());
        let makespan = *completion_times.last().expect("schedule of at least one job");
        Self { sequence, completion_times, makespan }
    }

    pub fn sequence(&self) -> &Sequence {
        &self.sequence
    }

    /// Completion time after each position, in processing order.
    pub fn completion_times(&self) -> &[f64] {
        &self.completion_times
    }

    pub fn makespan(&self) -> f64 {
        self.makespan
    }
}

/// Which solution method produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverId {
    ExactEnum,
    ExactBnb,
    Sdr,
    Ldr,
    Heuristic,
}

impl SolverId {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::ExactEnum => "exact_enum",
            SolverId::ExactBnb => "exact_bnb",
            SolverId::Sdr => "sdr",
            SolverId::Ldr => "ldr",
            SolverId::Heuristic => "heuristic",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A solved schedule plus the wall-clock time spent inside the solver call.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    solver: SolverId,
    schedule: Schedule,
    wall_time: Duration,
}

impl SolveOutcome {
    pub(crate) fn new(solver: SolverId, schedule: Schedule, wall_time: Duration) -> Self {
        Self { solver, schedule, wall_time }
    }

    pub fn solver(&self) -> SolverId {
        self.solver
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn into_schedule(self) -> Schedule {
        self.schedule
    }

    pub fn wall_time(&self) -> Duration {
        self.wall_time
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_a_plain_instance() {
        let inst = Instance::new(1.0, 0.5, 1.0, vec![2.0, 1.0]).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.rates(), &[2.0, 1.0]);
    }

    #[test]
    fn rejects_alpha_above_one() {
        let err = Instance::new(1.0, 1.5, 1.0, vec![2.0, 1.0]).unwrap_err();
        assert_eq!(err, ValidationError::AlphaOutOfRange(1.5));
    }

    #[test]
    fn rejects_zero_a0() {
        let err = Instance::new(0.0, 0.5, 0.0, vec![0.0]).unwrap_err();
        assert_eq!(err, ValidationError::NonPositiveA0(0.0));
    }

    #[test]
    fn rejects_negative_rate_and_start() {
        assert_eq!(
            Instance::new(1.0, 0.5, 1.0, vec![1.0, -0.1]).unwrap_err(),
            ValidationError::NegativeRate { job: 2, value: -0.1 }
        );
        assert_eq!(
            Instance::new(1.0, 0.5, -1.0, vec![1.0]).unwrap_err(),
            ValidationError::NegativeStart(-1.0)
        );
        assert_eq!(Instance::new(1.0, 0.5, 1.0, vec![]).unwrap_err(), ValidationError::EmptyJobs);
    }

    #[test]
    fn rejects_non_finite_fields() {
        assert!(matches!(
            Instance::new(f64::INFINITY, 0.5, 1.0, vec![1.0]),
            Err(ValidationError::NonFinite { field: "a0", .. })
        ));
        assert!(matches!(
            Instance::new(f64::NAN, 0.5, 1.0, vec![1.0]),
            Err(ValidationError::NonPositiveA0(_))
        ));
        assert!(matches!(
            Instance::new(1.0, 0.5, 1.0, vec![f64::NAN]),
            Err(ValidationError::NegativeRate { job: 1, .. })
        ));
    }

    #[test]
    fn alpha_one_and_t0_zero_are_allowed() {
        assert!(Instance::new(1.0, 1.0, 0.0, vec![1.0]).is_ok());
    }

    #[test]
    fn sequence_examples() {
        assert!(Sequence::from_one_based(3, &[2, 3, 1]).is_ok());
        assert_eq!(
            Sequence::from_one_based(3, &[1, 1, 2]).unwrap_err(),
            SequenceError::DuplicateJob(1)
        );
        assert_eq!(
            Sequence::from_one_based(3, &[1, 2]).unwrap_err(),
            SequenceError::WrongLength { expected: 3, got: 2 }
        );
        assert_eq!(
            Sequence::from_one_based(3, &[0, 1, 2]).unwrap_err(),
            SequenceError::IndexOutOfRange(0, 3)
        );
        assert_eq!(
            Sequence::from_zero_based(3, vec![0, 1, 3]).unwrap_err(),
            SequenceError::IndexOutOfRange(4, 3)
        );
    }

    #[test]
    fn sequence_roundtrips_one_based() {
        let seq = Sequence::from_one_based(4, &[3, 1, 4, 2]).unwrap();
        assert_eq!(seq.jobs(), &[2, 0, 3, 1]);
        assert_eq!(seq.one_based(), vec![3, 1, 4, 2]);
        assert_eq!(seq.to_string(), "J3 J1 J4 J2");
    }

    /// Every array in {1..n}^n is accepted iff it is a permutation, so the
    /// number of accepted arrays must be exactly n!.
    #[test]
    fn validation_accepts_exactly_the_permutations() {
        for n in 1..=6usize {
            let factorial: usize = (1..=n).product();
            let mut accepted = 0usize;
            let mut labels = vec![1usize; n];
            loop {
                if Sequence::from_one_based(n, &labels).is_ok() {
                    accepted += 1;
                }
                // odometer over {1..n}^n
                let mut pos = 0;
                while pos < n {
                    if labels[pos] < n {
                        labels[pos] += 1;
                        break;
                    }
                    labels[pos] = 1;
                    pos += 1;
                }
                if pos == n {
                    break;
                }
            }
            assert_eq!(accepted, factorial, "n = {n}");
        }
    }
}
