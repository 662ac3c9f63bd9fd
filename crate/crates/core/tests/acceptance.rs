//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trapwalk_core::criticality::{classify, Verdict, DEFAULT_MAX_SHIFT};
use trapwalk_core::exact_engine::expected_survival;
use trapwalk_core::landscape::{generate_recursive, validate_c, RecursionParams, DEFAULT_DIGIT_BUDGET};
use trapwalk_core::mc_sim::{simulate, Mode, SimConfig};
use trapwalk_core::monotonicity::{
    compute_split_stats, decompose_trajectory, example_trajectory, find_counterexample, survival_via_split,
    verify_lemma52, SearchSpace,
};
use trapwalk_core::path_enumerator::{
    expected_y_given_aplus, formula_kappa_one, prob_a_kappa, site_level_oracle, verify_lemma41_bounds, KappaSequence,
};
use trapwalk_core::rational::{self, int, rat};
use trapwalk_core::{Landscape, Rational};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn recursive(i1: u64, c: Rational, n: usize) -> Landscape {
    generate_recursive(&RecursionParams::new(i1, c, n), DEFAULT_DIGIT_BUDGET)
        .expect("recursion landscape")
        .landscape
}

/// Random walled landscape with wall at most `max_wall`.
fn random_walled(rng: &mut ChaCha8Rng, max_wall: u64) -> Landscape {
    loop {
        let n = rng.random_range(1..=8usize);
        let lens: Vec<u64> = (0..n).map(|_| rng.random_range(1..=8u64)).collect();
        let last: u64 = lens.iter().sum();
        if last >= max_wall {
            continue;
        }
        let wall = rng.random_range(last + 1..=max_wall);
        return Landscape::from_lengths(&lens, Some(wall)).expect("valid");
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 200;
    let mut mismatches = 0;
    for _ in 0..n {
        let ls = random_walled(&mut rng, 40);
        let engine = expected_survival(&ls).expect("engine").expected_tau;
        let oracle = site_level_oracle(&ls, 1).expect("oracle").expected_tau;
        if engine != oracle {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        mismatches == 0 && elapsed <= Duration::from_secs(60),
        format!("{n} landscapes, {mismatches} mismatches, {:.2?}", elapsed),
    )
}

fn kappa_one_formula() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (i1, c) in [(1, int(2)), (4, rat(1, 2))] {
        let ls = recursive(i1, c.clone(), 7);
        for i in 1..=6 {
            let one = KappaSequence::ones(i - 1);
            let prod = prob_a_kappa(&ls, &one).unwrap() * expected_y_given_aplus(&ls, &one).unwrap();
            checked += 1;
            if formula_kappa_one(&ls, &c, i).unwrap() != prod {
                bad.push(format!("I1={i1} i={i}"));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{checked} cases, mismatches {bad:?}"))
}

fn kappa_bounds() -> Outcome {
    let start = Instant::now();
    let mut sequences = 0;
    let mut violations = 0;
    for (i1, c) in [(1, int(2)), (4, rat(1, 2))] {
        let ls = recursive(i1, c.clone(), 7);
        let rep = verify_lemma41_bounds(&ls, &c, 6).expect("bounds");
        sequences += rep.sequences_checked();
        violations += rep.violations().len();
    }
    let elapsed = start.elapsed();
    Outcome::new(
        violations == 0 && sequences >= 300 && elapsed <= Duration::from_secs(30),
        format!("{sequences} sequences, {violations} violations, {:.2?}", elapsed),
    )
}

fn phase_table() -> Outcome {
    let mut rows = 0;
    let mut bad = Vec::new();
    for i1 in 1..=8u64 {
        for m in 2..=2 * i1 {
            let c = rat(m as i64, i1 as i64);
            let expected = match c.cmp(&Rational::one()) {
                std::cmp::Ordering::Less => Verdict::Finite,
                std::cmp::Ordering::Greater => Verdict::Infinite,
                std::cmp::Ordering::Equal => Verdict::Indeterminate,
            };
            let rep = classify(&RecursionParams::new(i1, c.clone(), 1), DEFAULT_MAX_SHIFT).expect("classify");
            rows += 1;
            if rep.verdict != expected {
                bad.push(format!("I1={i1} c={c}: {:?}", rep.verdict));
            }
        }
    }
    let named = |i1, c| {
        classify(&RecursionParams::new(i1, c, 1), DEFAULT_MAX_SHIFT)
            .unwrap()
            .verdict
    };
    let critical = named(1, int(2)) == Verdict::Infinite;
    let subcritical = named(4, rat(1, 2)) == Verdict::Finite;
    Outcome::new(
        bad.is_empty() && critical && subcritical,
        format!("{rows} grid points, wrong {bad:?}, (1,2) infinite {critical}, (4,1/2) finite {subcritical}"),
    )
}

fn split_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 150;
    let mut bad = 0;
    for _ in 0..n {
        let ls = random_walled(&mut rng, 60);
        let k = rng.random_range(1..=ls.trap_count());
        let s = compute_split_stats(&ls, k).expect("split");
        let direct = expected_survival(&ls).unwrap().expected_tau;
        if survival_via_split(&s).expect("nonsingular") != direct {
            bad += 1;
        }
    }
    Outcome::new(bad == 0, format!("{n} pairs, {bad} mismatches"))
}

fn insertion_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 150;
    let mut bad = 0;
    for _ in 0..n {
        let ls = random_walled(&mut rng, 60);
        let k = rng.random_range(1..=ls.interval_count());
        let rep = verify_lemma52(&ls, k).expect("insert");
        if !(rep.p_plus_holds && rep.e_plus_holds) {
            bad += 1;
        }
    }
    Outcome::new(bad == 0, format!("{n} pairs, {bad} failures"))
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let found = find_counterexample(&SearchSpace::default());
    let elapsed = start.elapsed();
    match found {
        Ok(w) => Outcome::new(
            w.e_tau_after < w.e_tau_before && w.bounds.all() && elapsed <= Duration::from_secs(300),
            format!(
                "{:?} wall {:?}: E = {} -> {}, bounds {}, {:.2?}",
                w.before.intervals,
                w.before.wall,
                rational::format(&w.e_tau_before),
                rational::format(&w.e_tau_after),
                w.bounds.all(),
                elapsed
            ),
        ),
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn example_replay() -> Outcome {
    let (ls, traj) = example_trajectory();
    match decompose_trajectory(&traj, &ls, 3) {
        Ok(d) => Outcome::new(
            d.l_times == [9, 10, 11, 18, 23] && d.t_segments == [9, 1, 1, 7, 5, 5] && d.tau == 28,
            format!("l = {:?}, T = {:?}, tau = {}", d.l_times, d.t_segments, d.tau),
        ),
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn monte_carlo() -> Outcome {
    let instances: [(&[u64], u64); 10] = [
        (&[2], 4),
        (&[1, 1, 1], 6),
        (&[3, 4, 5], 13),
        (&[3, 4, 5], 20),
        (&[5, 1, 5], 14),
        (&[2, 6, 2, 6], 20),
        (&[8], 12),
        (&[1, 2, 8], 15),
        (&[4, 8], 20),
        (&[6, 1, 10], 30),
    ];
    let mut within = 0;
    let mut lower_variance = 0;
    let mut notes = Vec::new();
    for (idx, (lens, wall)) in instances.iter().enumerate() {
        let ls = Landscape::from_lengths(lens, Some(*wall)).unwrap();
        let exact = rational::to_f64(&expected_survival(&ls).unwrap().expected_tau);
        let seed = 1000 + idx as u64;
        let site = simulate(&ls, &SimConfig::new(seed, 100_000, 4, Mode::SiteLevel)).unwrap();
        let trap = simulate(&ls, &SimConfig::new(seed, 100_000, 4, Mode::TrapLevel)).unwrap();
        let ok = |m: f64, se: f64| (m - exact).abs() <= 3.0 * se;
        if ok(site.mean, site.stderr) && ok(trap.mean, trap.stderr) {
            within += 1;
        } else {
            notes.push(format!(
                "#{idx} exact {exact:.4} site {:.4} trap {:.4}",
                site.mean, trap.mean
            ));
        }
        if trap.variance <= site.variance {
            lower_variance += 1;
        }
    }
    Outcome::new(
        within == instances.len() && lower_variance >= 8,
        format!("{within}/10 within 3 SE, trap-level variance lower in {lower_variance}/10 {notes:?}",),
    )
}

fn integrality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let trials = 1000;
    let mut false_accept = 0;
    let mut false_reject = 0;
    for t in 0..trials {
        let i1: u64 = rng.random_range(1..=200);
        let c = if t % 2 == 0 {
            rat(rng.random_range(1..=400), i1 as i64)
        } else {
            rat(rng.random_range(1..=400), rng.random_range(1..=400))
        };
        // c = p/q in lowest terms; c * i1 is natural iff q divides i1
        let q = c.denom().magnitude().clone();
        let expected = BigUint::from(i1).is_multiple_of(&q) && !c.numer().is_zero();
        match validate_c(&BigUint::from(i1), &c) {
            Ok(m) => {
                if !expected || rational::from_uint(&m) != &c * int(i1 as i64) {
                    false_accept += 1;
                }
            }
            Err(_) => {
                if expected {
                    false_reject += 1;
                }
            }
        }
    }
    Outcome::new(
        false_accept == 0 && false_reject == 0,
        format!("{trials} trials, {false_accept} false accepts, {false_reject} false rejects"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("all-ones history formula", kappa_one_formula),
        ("history bounds", kappa_bounds),
        ("phase table", phase_table),
        ("split identity", split_identity),
        ("site insertion identities", insertion_identities),
        ("non-monotone witness", counterexample),
        ("worked trajectory", example_replay),
        ("monte carlo consistency", monte_carlo),
        ("scale integrality", integrality),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failed += 1;
        }
        println!("[{tag}] {:>2} {name}: {}", n + 1, out.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
