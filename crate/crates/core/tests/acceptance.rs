//! End-to-end acceptance gate. Each test covers one numbered criterion and
//! prints a `PASS` line (visible with `--nocapture`); a failure panics with
//! the offending values.
//!
//! Run with: `cargo test -p dlsched-core --test acceptance -- --nocapture`

use std::time::Instant;

use dlsched_core::bench::{error_percentage, run_benchmark, BenchConfig};
use dlsched_core::evaluator::{evaluate, pair_completion_delta, swap_preference, SwapPreference};
use dlsched_core::instances::{generate_instance, GenSpec};
use dlsched_core::model::{Instance, Sequence};
use dlsched_core::solvers::{
    solve_exact_bnb, solve_exact_enumeration, solve_heuristic, solve_ldr, solve_sdr, EnumOptions,
    HeuristicOptions,
};

/// Small deterministic RNG for test-side draws, independent of the crate's
/// generator.
struct TestRng(u64);

impl TestRng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, low: f64, high: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        low + u * (high - low)
    }

    fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Independent pair oracle: completion of the second job of an adjacent
/// pair at positions r, r+1, computed with `powi`.
fn oracle_pair_second(a0: f64, alpha: f64, start: f64, r: usize, b_first: f64, b_second: f64) -> f64 {
    let c1 = start + (a0 + b_first * start) * alpha.powi(r as i32 - 1);
    c1 + (a0 + b_second * c1) * alpha.powi(r as i32)
}

#[test]
fn c1_error_percentage_reproduces_reference_cells() {
    let cases = [
        (26.265, 24.975, 5.16),
        (93.334, 82.948, 12.52),
        (21.159, 16.780, 26.09),
        (105.765, 81.458, 29.84),
        (249.031, 185.756, 34.06),
        (4361.866, 3836.419, 13.69),
        (1435.403, 1020.844, 40.60),
        (2691.113, 2162.115, 24.46),
        (5219.636, 4277.653, 22.02),
        (16.864, 16.780, 0.50),
    ];
    for (alg, opt, expected) in cases {
        let err = error_percentage(alg, opt).unwrap();
        assert!(
            (err - expected).abs() <= 0.01,
            "({alg}, {opt}): got {err:.4}, expected {expected} +- 0.01"
        );
    }
    println!("PASS criterion 1: error percentage reproduces all {} reference cells", cases.len());
}

#[test]
fn c2_mean_error_aggregation() {
    let heur = [0.0, 0.0, 0.50, 0.0, 0.0, 0.0, 0.0, 0.0, 1.70];
    let sdr = [5.16, 12.52, 26.09, 29.84, 34.06, 13.69, 40.60, 24.46, 22.02];
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let heur_mean = mean(&heur);
    let sdr_mean = mean(&sdr);
    assert!((heur_mean - 0.24).abs() <= 0.005, "heuristic mean {heur_mean:.4} vs 0.24");
    assert!((sdr_mean - 23.16).abs() <= 0.005, "SDR mean {sdr_mean:.4} vs 23.16");
    println!("PASS criterion 2: column means {heur_mean:.4} / {sdr_mean:.4} match 0.24 / 23.16");
}

#[test]
fn c3_swap_delta_matches_brute_force_and_orders_pairs() {
    let mut rng = TestRng(0x5EED_0003);
    let mut checked = 0;
    while checked < 1000 {
        let n = 2 + rng.index(7);
        let instance = generate_instance(&GenSpec::with_seed(rng.next_u64()), n).unwrap();
        let r = 1 + rng.index(6);
        // alternate between a raw start-time draw and one reachable as a
        // prefix completion of the instance itself
        let start = if checked % 3 == 0 {
            let prefix_len = rng.index(n) + 1;
            let order: Vec<usize> = (1..=n).collect();
            let seq = Sequence::from_one_based(n, &order).unwrap();
            evaluate(&instance, &seq).completion_times()[prefix_len - 1]
        } else {
            rng.uniform(0.5, 1.5)
        };
        let b_k = rng.uniform(0.0, 6.0);
        let b_l = rng.uniform(0.0, 6.0);

        let (a0, alpha) = (instance.a0(), instance.alpha());
        let delta = pair_completion_delta(&instance, r, start, b_k, b_l);
        let kl = oracle_pair_second(a0, alpha, start, r, b_k, b_l);
        let lk = oracle_pair_second(a0, alpha, start, r, b_l, b_k);
        let brute = lk - kl;
        // relative to the completion-time scale the deltas are differenced from
        let scale = delta.abs().max(brute.abs()).max(kl.abs());
        assert!(
            (delta - brute).abs() <= 1e-9 * scale,
            "delta {delta} vs brute {brute} (a0={a0}, alpha={alpha}, r={r}, start={start})"
        );

        let (hi, lo) = if b_k >= b_l { (b_k, b_l) } else { (b_l, b_k) };
        let large_first = oracle_pair_second(a0, alpha, start, r, hi, lo);
        let small_first = oracle_pair_second(a0, alpha, start, r, lo, hi);
        let tol = 1e-9 * large_first.abs().max(small_first.abs());
        match swap_preference(&instance, r, start) {
            SwapPreference::Ldr => assert!(
                large_first <= small_first + tol,
                "LDR preferred but worse (a0={a0}, alpha={alpha}, r={r}, start={start})"
            ),
            SwapPreference::Sdr => assert!(
                small_first <= large_first + tol,
                "SDR preferred but worse (a0={a0}, alpha={alpha}, r={r}, start={start})"
            ),
            SwapPreference::Indifferent => assert!(
                (large_first - small_first).abs() <= tol,
                "indifferent but unequal (a0={a0}, alpha={alpha}, r={r}, start={start})"
            ),
        }
        checked += 1;
    }
    println!("PASS criterion 3: {checked} random swap configurations match the brute-force oracle");
}

#[test]
fn c4_exact_solvers_agree() {
    let mut count = 0;
    for n in 2..=9usize {
        for rep in 0..25u64 {
            let seed = 0xC4_0000 + (n as u64) * 100 + rep;
            let instance = generate_instance(&GenSpec::with_seed(seed), n).unwrap();

            let single = solve_exact_enumeration(&instance, &EnumOptions::default()).unwrap();
            let multi = solve_exact_enumeration(
                &instance,
                &EnumOptions { workers: 4, ..EnumOptions::default() },
            )
            .unwrap();
            assert_eq!(
                single.outcome.schedule().sequence(),
                multi.outcome.schedule().sequence(),
                "worker count changed the sequence (n={n}, rep={rep})"
            );
            assert_eq!(
                single.outcome.schedule().makespan().to_bits(),
                multi.outcome.schedule().makespan().to_bits(),
                "worker count changed the makespan (n={n}, rep={rep})"
            );

            let opt = single.outcome.schedule().makespan();
            let bnb = solve_exact_bnb(&instance).schedule().makespan();
            assert!(
                (bnb - opt).abs() <= 1e-12 * opt.abs(),
                "bnb {bnb} vs enumeration {opt} (n={n}, rep={rep})"
            );
            count += 1;
        }
    }
    println!("PASS criterion 4: branch-and-bound and enumeration agree on {count} instances");
}

#[test]
fn c5_heuristic_quality_over_replicated_sizes() {
    let config = BenchConfig::new((2..=10).collect(), 0xBEEF);
    assert_eq!(config.replications, 30);
    let table = run_benchmark(&config).unwrap();
    assert_eq!(table.rows.len(), 9 * 30);
    assert!(
        table.mean_err_heuristic < 5.0,
        "mean heuristic error {:.3}% is not below 5%",
        table.mean_err_heuristic
    );
    assert!(
        table.mean_err_sdr > table.mean_err_heuristic,
        "mean SDR error {:.3}% does not exceed mean heuristic error {:.3}%",
        table.mean_err_sdr,
        table.mean_err_heuristic
    );
    println!(
        "PASS criterion 5: mean heuristic error {:.3}% < 5% and < mean SDR error {:.3}% over {} runs",
        table.mean_err_heuristic,
        table.mean_err_sdr,
        table.rows.len()
    );
}

#[test]
fn c6_ten_job_enumeration_is_feasible() {
    let instance = generate_instance(&GenSpec::with_seed(0xC6), 10).unwrap();
    let started = Instant::now();
    let result = solve_exact_enumeration(
        &instance,
        &EnumOptions { count_evaluated: true, ..EnumOptions::default() },
    )
    .unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(result.evaluated, Some(3_628_800));
    assert!(elapsed < 120.0, "10-job enumeration took {elapsed:.1} s");
    println!(
        "PASS criterion 6: 3628800 sequences evaluated in {elapsed:.2} s (makespan {:.3})",
        result.outcome.schedule().makespan()
    );
}

#[test]
fn c7_invariant_suite() {
    // alpha = 1: LDR is optimal
    for k in 0..100u64 {
        let n = 2 + (k as usize % 6);
        let sampled = generate_instance(&GenSpec::with_seed(0xC7_0000 + k), n).unwrap();
        let instance =
            Instance::new(sampled.a0(), 1.0, sampled.t0(), sampled.rates().to_vec()).unwrap();
        let opt = solve_exact_enumeration(&instance, &EnumOptions::default())
            .unwrap()
            .outcome
            .schedule()
            .makespan();
        let ldr = solve_ldr(&instance).schedule().makespan();
        assert!((ldr - opt).abs() <= 1e-12 * opt, "alpha=1 case {k}: LDR {ldr} vs opt {opt}");
    }

    // all rates zero: every permutation shares the closed-form makespan
    for n in 2..=6usize {
        let sampled = generate_instance(&GenSpec::with_seed(0xC7_1000 + n as u64), n).unwrap();
        let instance = Instance::new(sampled.a0(), sampled.alpha(), sampled.t0(), vec![0.0; n]).unwrap();
        let expected = instance.t0()
            + instance.a0() * (0..n).map(|k| instance.alpha().powi(k as i32)).sum::<f64>();
        let mut order: Vec<usize> = (1..=n).collect();
        permute_all(&mut order, 0, &mut |perm| {
            let seq = Sequence::from_one_based(n, perm).unwrap();
            let mk = evaluate(&instance, &seq).makespan();
            assert!((mk - expected).abs() <= 1e-12 * expected, "n={n}, perm {perm:?}");
        });
    }

    // makespan strictly increases with the start time
    let mut rng = TestRng(0xC7_2000);
    for k in 0..200u64 {
        let n = 1 + rng.index(7);
        let sampled = generate_instance(&GenSpec::with_seed(0xC7_3000 + k), n).unwrap();
        let delta = rng.uniform(0.01, 2.0);
        let shifted =
            Instance::new(sampled.a0(), sampled.alpha(), sampled.t0() + delta, sampled.rates().to_vec())
                .unwrap();
        let order: Vec<usize> = (1..=n).collect();
        let seq = Sequence::from_one_based(n, &order).unwrap();
        assert!(
            evaluate(&shifted, &seq).makespan() > evaluate(&sampled, &seq).makespan(),
            "case {k}: makespan did not increase with t0"
        );
    }

    // heuristic and SDR never beat the exact optimum
    for k in 0..100u64 {
        let n = 2 + (k as usize % 7);
        let instance = generate_instance(&GenSpec::with_seed(0xC7_4000 + k), n).unwrap();
        let opt = solve_exact_enumeration(&instance, &EnumOptions::default())
            .unwrap()
            .outcome
            .schedule()
            .makespan();
        let heuristic = solve_heuristic(&instance, &HeuristicOptions::default())
            .schedule()
            .makespan();
        let sdr = solve_sdr(&instance).schedule().makespan();
        let tol = 1e-9 * opt;
        assert!(heuristic >= opt - tol, "case {k}: heuristic beat the optimum");
        assert!(sdr >= opt - tol, "case {k}: SDR beat the optimum");
    }

    println!("PASS criterion 7: degenerate-case and bound invariants hold");
}

fn permute_all(order: &mut Vec<usize>, depth: usize, visit: &mut impl FnMut(&[usize])) {
    if depth == order.len() {
        visit(order);
        return;
    }
    for i in depth..order.len() {
        order.swap(depth, i);
        permute_all(order, depth + 1, visit);
        order.swap(depth, i);
    }
}

#[test]
fn c8_end_to_end_determinism() {
    // instance generation
    for n in [1usize, 3, 7, 10] {
        let spec = GenSpec::with_seed(0xC8_0000 + n as u64);
        let a = generate_instance(&spec, n).unwrap();
        let b = generate_instance(&spec, n).unwrap();
        assert_eq!(a, b, "generation differs for n = {n}");
    }

    // a full benchmark run, twice
    let mut config = BenchConfig::new(vec![2, 4, 5], 0xC8_1000);
    config.replications = 3;
    let first = run_benchmark(&config).unwrap();
    let second = run_benchmark(&config).unwrap();
    assert_eq!(first.rows.len(), second.rows.len());
    for (x, y) in first.rows.iter().zip(&second.rows) {
        assert_eq!(x.instance_id, y.instance_id);
        assert_eq!(x.makespan_exact.to_bits(), y.makespan_exact.to_bits());
        assert_eq!(x.makespan_heuristic.to_bits(), y.makespan_heuristic.to_bits());
        assert_eq!(x.makespan_sdr.to_bits(), y.makespan_sdr.to_bits());
        assert_eq!(x.err_heuristic.to_bits(), y.err_heuristic.to_bits());
        assert_eq!(x.err_sdr.to_bits(), y.err_sdr.to_bits());
        assert_eq!(x.seq_exact, y.seq_exact);
        assert_eq!(x.seq_heuristic, y.seq_heuristic);
        assert_eq!(x.seq_sdr, y.seq_sdr);
    }
    assert_eq!(first.mean_err_heuristic.to_bits(), second.mean_err_heuristic.to_bits());
    assert_eq!(first.mean_err_sdr.to_bits(), second.mean_err_sdr.to_bits());
    println!("PASS criterion 8: two consecutive runs reproduce every value bit for bit");
}
