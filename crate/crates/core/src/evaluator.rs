//! Processing-time model, completion-time recurrence, and the adjacent-swap
//! analysis that drives the dispatch decisions.
//!
//! A job with deterioration rate `b` started at time `t` in 1-based position
//! `r` takes `(a0 + b * t) * alpha^(r-1)` time units. Completion times follow
//! `C_0 = t0`, `C_r = C_{r-1} + p(job_r, r, C_{r-1})`.

use crate::model::{Instance, Schedule, Sequence};

/// Relative tolerance at which `a0` and the swap threshold count as equal.
pub const INDIFFERENCE_RTOL: f64 = 1e-12;

/// `alpha^exp` by left-to-right repeated multiplication.
///
/// Every positional factor in this crate comes from this chain, so the
/// incremental solvers reproduce [`evaluate`] bit for bit.
pub(crate) fn alpha_power(alpha: f64, exp: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..exp {
        p *= alpha;
    }
    p
}

/// `[alpha^0, alpha^1, ..., alpha^(n-1)]`, the same chain as [`alpha_power`].
pub(crate) fn alpha_powers(alpha: f64, n: usize) -> Vec<f64> {
    let mut pows = Vec::with_capacity(n);
    let mut p = 1.0;
    for _ in 0..n {
        pows.push(p);
        p *= alpha;
    }
    pows
}

/// Processing time of `job` (0-based) started at `start` in 1-based position
/// `position`.
pub fn processing_time(instance: &Instance, job: usize, position: usize, start: f64) -> f64 {
    debug_assert!(position >= 1, "positions are 1-based");
    (instance.a0() + instance.rate(job) * start) * alpha_power(instance.alpha(), position - 1)
}

/// Runs the completion-time recurrence over `sequence` and returns the full
/// schedule. Recomputes from `t0` on every call; the enumeration solvers keep
/// their own incremental version of the same arithmetic.
pub fn evaluate(instance: &Instance, sequence: &Sequence) -> Schedule {
    assert_eq!(sequence.len(), instance.n(), "sequence does not match instance size");
    let mut completions = Vec::with_capacity(instance.n());
    let mut t = instance.t0();
    for (rank, &job) in sequence.jobs().iter().enumerate() {
        t += processing_time(instance, job, rank + 1, t);
        completions.push(t);
    }
    Schedule::new(sequence.clone(), completions)
}

/// Which of two adjacent jobs should go first, given the pair's position and
/// the completion time of everything before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapPreference {
    /// Larger deterioration rate first.
    Ldr,
    /// Smaller deterioration rate first.
    Sdr,
    /// Both orders finish the pair at the same time.
    Indifferent,
}

/// The basic-time threshold `start * (1 - alpha) / alpha^r` for a pair whose
/// first job sits in 1-based position `r`. Zero when `alpha = 1` or
/// `start = 0`.
pub fn swap_threshold(start: f64, alpha: f64, r: usize) -> f64 {
    debug_assert!(r >= 1, "positions are 1-based");
    if start == 0.0 || alpha == 1.0 {
        return 0.0;
    }
    start * (1.0 - alpha) / alpha_power(alpha, r)
}

/// Compares the instance's `a0` against [`swap_threshold`] at relative
/// tolerance [`INDIFFERENCE_RTOL`]. At exact equality the two adjacent
/// orders produce identical pair completion times.
pub fn swap_preference(instance: &Instance, r: usize, start: f64) -> SwapPreference {
    let a0 = instance.a0();
    let threshold = swap_threshold(start, instance.alpha(), r);
    if threshold.is_infinite() {
        // alpha^r underflowed; any finite a0 sits below the threshold
        return SwapPreference::Sdr;
    }
    let scale = a0.abs().max(threshold.abs());
    if (a0 - threshold).abs() <= INDIFFERENCE_RTOL * scale {
        SwapPreference::Indifferent
    } else if a0 > threshold {
        SwapPreference::Ldr
    } else {
        SwapPreference::Sdr
    }
}

/// Closed-form completion-time difference between the two orders of an
/// adjacent pair with rates `b_k`, `b_l` in positions `r`, `r+1`, when the
/// preceding work finishes at `start`:
///
/// `(b_k - b_l) * (start * alpha^r - start * alpha^(r-1) + a0 * alpha^(2r-1))`
///
/// A positive value means the order `(k, l)` finishes the pair's second job
/// sooner than `(l, k)`.
pub fn pair_completion_delta(
    instance: &Instance,
    r: usize,
    start: f64,
    b_k: f64,
    b_l: f64,
) -> f64 {
    debug_assert!(r >= 1, "positions are 1-based");
    let alpha = instance.alpha();
    let bracket = start * alpha_power(alpha, r) - start * alpha_power(alpha, r - 1)
        + instance.a0() * alpha_power(alpha, 2 * r - 1);
    (b_k - b_l) * bracket
}
