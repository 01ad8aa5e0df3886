//! The five solution methods: SDR and LDR dispatch baselines, the
//! two-sequence threshold heuristic, exhaustive permutation enumeration,
//! and a pruned depth-first exact search.
//!
//! Every solver is a pure function of its inputs: repeated calls return the
//! same sequence and a bit-identical makespan, and enumeration results do
//! not depend on the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use thiserror::Error;

use crate::evaluator::{alpha_powers, evaluate, swap_preference, SwapPreference};
use crate::model::{Instance, Sequence, SolveOutcome, SolverId};

/// Largest `n` the enumeration solver accepts without `force`
/// (13! is about 6.2e9 sequences).
pub const DEFAULT_ENUM_GUARD: usize = 13;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("n = {n} exceeds the enumeration guard of {guard} jobs")]
    TooLarge { n: usize, guard: usize },
}

/// Options for [`solve_exact_enumeration`].
#[derive(Debug, Clone)]
pub struct EnumOptions {
    /// Worker threads sweeping the permutation space. Has no effect on the
    /// returned schedule.
    pub workers: usize,
    /// Report the number of complete sequences evaluated.
    pub count_evaluated: bool,
    /// Refuse instances with more jobs than this unless `force` is set.
    pub guard: usize,
    /// Run past the guard anyway.
    pub force: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self { workers: 1, count_evaluated: false, guard: DEFAULT_ENUM_GUARD, force: false }
    }
}

/// Options for the two-sequence heuristic.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicOptions {
    /// In the second sequence's first pick, use the second-smallest rate
    /// instead of the smallest when the threshold test selects the SDR
    /// branch. Off by default: the written rule uses the smallest.
    pub second_smallest_variant: bool,
}

/// Jobs by ascending deterioration rate, ties by ascending index.
pub fn sdr_sequence(instance: &Instance) -> Sequence {
    Sequence::from_permutation_unchecked(rate_order(instance, false))
}

/// Jobs by descending deterioration rate, ties by ascending index.
pub fn ldr_sequence(instance: &Instance) -> Sequence {
    Sequence::from_permutation_unchecked(rate_order(instance, true))
}

pub fn solve_sdr(instance: &Instance) -> SolveOutcome {
    let started = Instant::now();
    let schedule = evaluate(instance, &sdr_sequence(instance));
    SolveOutcome::new(SolverId::Sdr, schedule, started.elapsed())
}

pub fn solve_ldr(instance: &Instance) -> SolveOutcome {
    let started = Instant::now();
    let schedule = evaluate(instance, &ldr_sequence(instance));
    SolveOutcome::new(SolverId::Ldr, schedule, started.elapsed())
}

/// All jobs sorted by rate, ties broken by ascending index.
fn rate_order(instance: &Instance, descending: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (instance.rate(i), instance.rate(j));
        let by_rate = if descending {
            b.partial_cmp(&a).expect("rates are finite")
        } else {
            a.partial_cmp(&b).expect("rates are finite")
        };
        by_rate.then(i.cmp(&j))
    });
    order
}

/// Unplaced job with the extreme rate; ties go to the lowest index.
fn extreme_remaining(instance: &Instance, remaining: &[bool], largest: bool) -> usize {
    let mut best: Option<usize> = None;
    for (job, &free) in remaining.iter().enumerate() {
        if !free {
            continue;
        }
        let better = match best {
            None => true,
            Some(cur) => {
                if largest {
                    instance.rate(job) > instance.rate(cur)
                } else {
                    instance.rate(job) < instance.rate(cur)
                }
            }
        };
        if better {
            best = Some(job);
        }
    }
    best.expect("at least one job remains")
}

/// Greedy threshold construction from position `start_r` onward: LDR pick
/// when `a0` is at or above the swap threshold, SDR pick below it.
fn greedy_extend(
    instance: &Instance,
    pows: &[f64],
    remaining: &mut [bool],
    order: &mut Vec<usize>,
    mut t: f64,
    start_r: usize,
) {
    for r in start_r..=instance.n() {
        let job = match swap_preference(instance, r, t) {
            SwapPreference::Sdr => extreme_remaining(instance, remaining, false),
            // the threshold condition reads "a0 >= ...", so ties go to LDR
            _ => extreme_remaining(instance, remaining, true),
        };
        remaining[job] = false;
        t += (instance.a0() + instance.rate(job) * t) * pows[r - 1];
        order.push(job);
    }
}

/// First candidate sequence: the greedy threshold rule at every position.
pub fn heuristic_sequence1(instance: &Instance) -> Sequence {
    let n = instance.n();
    let pows = alpha_powers(instance.alpha(), n);
    let mut remaining = vec![true; n];
    let mut order = Vec::with_capacity(n);
    greedy_extend(instance, &pows, &mut remaining, &mut order, instance.t0(), 1);
    Sequence::from_permutation_unchecked(order)
}

/// Second candidate sequence: position 1 takes the second-largest rate in
/// the LDR branch (perturbing the first pick), then continues with the same
/// greedy rule as [`heuristic_sequence1`]. For a single job this is `[J1]`.
///
/// "Second largest" means the second entry of the rate-descending,
/// index-ascending order, so duplicate maxima still yield a genuine
/// perturbation.
pub fn heuristic_sequence2(instance: &Instance, options: &HeuristicOptions) -> Sequence {
    let n = instance.n();
    if n == 1 {
        return Sequence::from_permutation_unchecked(vec![0]);
    }
    let pows = alpha_powers(instance.alpha(), n);
    let first = match swap_preference(instance, 1, instance.t0()) {
        SwapPreference::Sdr => {
            if options.second_smallest_variant {
                rate_order(instance, false)[1]
            } else {
                extreme_remaining(instance, &vec![true; n], false)
            }
        }
        _ => rate_order(instance, true)[1],
    };
    let mut remaining = vec![true; n];
    remaining[first] = false;
    let mut order = Vec::with_capacity(n);
    order.push(first);
    let t = instance.t0() + (instance.a0() + instance.rate(first) * instance.t0()) * pows[0];
    greedy_extend(instance, &pows, &mut remaining, &mut order, t, 2);
    Sequence::from_permutation_unchecked(order)
}

/// Builds both candidate sequences and returns the one with the smaller
/// makespan; ties go to the first sequence.
pub fn solve_heuristic(instance: &Instance, options: &HeuristicOptions) -> SolveOutcome {
    let started = Instant::now();
    let first = evaluate(instance, &heuristic_sequence1(instance));
    let second = evaluate(instance, &heuristic_sequence2(instance, options));
    let schedule = if second.makespan() < first.makespan() { second } else { first };
    SolveOutcome::new(SolverId::Heuristic, schedule, started.elapsed())
}

/// Result of an exhaustive sweep: the optimal schedule plus, when requested,
/// the number of complete sequences evaluated.
#[derive(Debug, Clone)]
pub struct EnumOutcome {
    pub outcome: SolveOutcome,
    pub evaluated: Option<u64>,
}

struct SweepResult {
    makespan: f64,
    order: Vec<usize>,
    leaves: u64,
}

/// Evaluates every permutation and returns the minimum-makespan schedule.
/// Exact ties are broken by the lexicographically smallest order, so the
/// result is identical for any partition of the work across threads.
pub fn solve_exact_enumeration(
    instance: &Instance,
    options: &EnumOptions,
) -> Result<EnumOutcome, SolveError> {
    let started = Instant::now();
    let n = instance.n();
    if n > options.guard && !options.force {
        return Err(SolveError::TooLarge { n, guard: options.guard });
    }
    let pows = alpha_powers(instance.alpha(), n);

    // one task per first-position job, merged in task order
    let workers = options.workers.max(1).min(n);
    let results: Vec<SweepResult> = if workers == 1 {
        (0..n).map(|first| sweep_from(instance, &pows, first)).collect()
    } else {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<SweepResult>>> =
            Mutex::new((0..n).map(|_| None).collect());
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let task = next.fetch_add(1, Ordering::Relaxed);
                    if task >= n {
                        break;
                    }
                    let result = sweep_from(instance, &pows, task);
                    slots.lock().expect("sweep worker panicked")[task] = Some(result);
                });
            }
        });
        slots
            .into_inner()
            .expect("sweep worker panicked")
            .into_iter()
            .map(|slot| slot.expect("every task ran"))
            .collect()
    };

    let mut leaves = 0u64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for result in results {
        leaves += result.leaves;
        let replace = match &best {
            None => true,
            Some((mk, order)) => {
                result.makespan < *mk || (result.makespan == *mk && result.order < *order)
            }
        };
        if replace {
            best = Some((result.makespan, result.order));
        }
    }
    let (makespan, order) = best.expect("n >= 1");

    let schedule = evaluate(instance, &Sequence::from_permutation_unchecked(order));
    debug_assert_eq!(schedule.makespan().to_bits(), makespan.to_bits());
    let outcome = SolveOutcome::new(SolverId::ExactEnum, schedule, started.elapsed());
    Ok(EnumOutcome { outcome, evaluated: options.count_evaluated.then_some(leaves) })
}

/// Depth-first sweep over all permutations that start with `first`,
/// extending completion times one job at a time.
fn sweep_from(instance: &Instance, pows: &[f64], first: usize) -> SweepResult {
    let n = instance.n();
    let mut arr: Vec<usize> = (0..n).collect();
    arr.swap(0, first);
    let t0 = instance.t0();
    let t1 = t0 + (instance.a0() + instance.rate(arr[0]) * t0) * pows[0];
    let mut sweep = Sweep {
        instance,
        pows,
        arr,
        best: f64::INFINITY,
        best_order: Vec::new(),
        leaves: 0,
    };
    sweep.recur(1, t1);
    SweepResult { makespan: sweep.best, order: sweep.best_order, leaves: sweep.leaves }
}

struct Sweep<'a> {
    instance: &'a Instance,
    pows: &'a [f64],
    arr: Vec<usize>,
    best: f64,
    best_order: Vec<usize>,
    leaves: u64,
}

impl Sweep<'_> {
    fn recur(&mut self, depth: usize, t: f64) {
        let n = self.arr.len();
        if depth == n {
            self.leaves += 1;
            if t < self.best || (t == self.best && self.arr < self.best_order) {
                self.best = t;
                self.best_order.clear();
                self.best_order.extend_from_slice(&self.arr);
            }
            return;
        }
        for i in depth..n {
            self.arr.swap(depth, i);
            let job = self.arr[depth];
            let next =
                t + (self.instance.a0() + self.instance.rate(job) * t) * self.pows[depth];
            self.recur(depth + 1, next);
            self.arr.swap(depth, i);
        }
    }
}

/// Depth-first exact search seeded with the heuristic schedule, pruning any
/// prefix whose completion time already reaches the incumbent makespan.
/// Sound because every processing time is strictly positive, so a prefix's
/// completion time lower-bounds all of its extensions.
///
/// The returned makespan equals [`solve_exact_enumeration`]'s; the sequence
/// may differ among exact-tie optima.
pub fn solve_exact_bnb(instance: &Instance) -> SolveOutcome {
    let started = Instant::now();
    let n = instance.n();
    let pows = alpha_powers(instance.alpha(), n);
    let seed = solve_heuristic(instance, &HeuristicOptions::default());
    let mut search = Prune {
        instance,
        pows: &pows,
        arr: (0..n).collect(),
        best: seed.schedule().makespan(),
        best_order: seed.schedule().sequence().jobs().to_vec(),
    };
    search.recur(0, instance.t0());
    let schedule = evaluate(instance, &Sequence::from_permutation_unchecked(search.best_order));
    debug_assert_eq!(schedule.makespan().to_bits(), search.best.to_bits());
    SolveOutcome::new(SolverId::ExactBnb, schedule, started.elapsed())
}

struct Prune<'a> {
    instance: &'a Instance,
    pows: &'a [f64],
    arr: Vec<usize>,
    best: f64,
    best_order: Vec<usize>,
}

impl Prune<'_> {
    fn recur(&mut self, depth: usize, t: f64) {
        if t >= self.best {
            return;
        }
        let n = self.arr.len();
        if depth == n {
            self.best = t;
            self.best_order.clear();
            self.best_order.extend_from_slice(&self.arr);
            return;
        }
        for i in depth..n {
            self.arr.swap(depth, i);
            let job = self.arr[depth];
            let next =
                t + (self.instance.a0() + self.instance.rate(job) * t) * self.pows[depth];
            self.recur(depth + 1, next);
            self.arr.swap(depth, i);
        }
    }
}
