//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use choremarket::graphs::{direct_bound, dual_bound};
use choremarket::rounding::check_budgets_close;
use choremarket::solver::AllocationsError;
use choremarket::{
    all_allocations, brute_force_cu, check_ef11, check_prop1, int, is_pareto_optimal, is_weighted_envy_free, kkt_check,
    ratio, round_fair, solve_all, verify_outcome, Allocation, Instance, Mode, Rational, SolutionSet,
};
use num_bigint::BigUint;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 0x5eed_0001;
const ROUNDING_SEED: u64 = 0x5eed_0002;
const RUNTIME_SEED: u64 = 0x5eed_0003;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, ok: bool, elapsed: Duration, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        if !ok {
            self.failures += 1;
        }
        println!(
            "criterion {id} [PRIMARY] {name}: {verdict} ({:.3} s) {detail}",
            elapsed.as_secs_f64()
        );
    }
}

fn small_instance(report: &mut Report) {
    let start = Instant::now();
    let inst = common::small_instance();
    let sol = solve_all(&inst, Mode::Auto);
    let elapsed = start.elapsed();
    let z1 = Allocation::integral(2, &[0, 1]);
    let z2 = Allocation::from_ratios(&[vec![(1, 1), (1, 4)], vec![(0, 1), (3, 4)]]).unwrap();
    let ok = sol.profiles == vec![vec![int(-3), ratio(-3, 2)], vec![int(-1), int(-2)]]
        && sol.outcomes[0].z == z2
        && sol.outcomes[0].p == vec![ratio(-1, 3), ratio(-8, 3)]
        && sol.outcomes[1].z == z1
        && sol.outcomes[1].p == vec![int(-1), int(-2)]
        && elapsed < Duration::from_secs(1);
    report.line(
        1,
        "two-by-two instance reproduction",
        ok,
        elapsed,
        format!("{} profiles", sol.profiles.len()),
    );
}

fn outcome_checks(inst: &Instance, sol: &SolutionSet) -> bool {
    let beta: Vec<Rational> = inst.budgets().iter().map(Signed::abs).collect();
    sol.outcomes.iter().all(|out| {
        verify_outcome(inst, out)
            && is_pareto_optimal(inst, &out.z)
            && is_weighted_envy_free(inst, &out.z, &beta)
            && kkt_check(inst, &out.z)
    })
}

fn corpus_criteria(report: &mut Report) {
    let corpus = common::corpus(CORPUS_SEED, 500, 4, 4);
    let start = Instant::now();
    let direct: Vec<SolutionSet> = corpus.iter().map(|i| solve_all(i, Mode::Direct)).collect();
    let solve_time = start.elapsed();

    let start = Instant::now();
    let mismatches = corpus
        .iter()
        .zip(&direct)
        .filter(|(inst, sol)| brute_force_cu(inst).expect("within cap").profiles != sol.profiles)
        .count();
    let elapsed = solve_time + start.elapsed();
    report.line(
        2,
        "oracle equivalence",
        mismatches == 0 && elapsed < Duration::from_secs(300),
        elapsed,
        format!("{} instances, {mismatches} mismatches", corpus.len()),
    );

    let start = Instant::now();
    let outcomes: usize = direct.iter().map(|s| s.outcomes.len()).sum();
    let bad = corpus
        .iter()
        .zip(&direct)
        .filter(|(inst, sol)| !outcome_checks(inst, sol))
        .count();
    report.line(
        3,
        "welfare and fairness of outcomes",
        bad == 0,
        start.elapsed(),
        format!("{outcomes} outcomes, {bad} instances failing"),
    );

    let start = Instant::now();
    let dual: Vec<SolutionSet> = corpus.iter().map(|i| solve_all(i, Mode::Dual)).collect();
    let differing = direct
        .iter()
        .zip(&dual)
        .filter(|(a, b)| a.profiles != b.profiles)
        .count();
    report.line(
        4,
        "direct and dual agree",
        differing == 0,
        start.elapsed(),
        format!("{differing} differing instances"),
    );

    let start = Instant::now();
    let violations = corpus
        .iter()
        .zip(direct.iter().zip(&dual))
        .filter(|(inst, (d, u))| {
            let (n, m) = (inst.n(), inst.m());
            let (db, ub) = (direct_bound(n, m), dual_bound(n, m));
            let profiles = BigUint::from(d.profiles.len());
            BigUint::from(d.meta.graphs_enumerated) > db
                || BigUint::from(u.meta.graphs_enumerated) > ub
                || profiles > db
                || profiles > ub
        })
        .count();
    report.line(
        5,
        "enumeration and profile bounds",
        violations == 0,
        start.elapsed(),
        format!("{violations} violations"),
    );
}

fn degenerate(report: &mut Report) {
    let start = Instant::now();
    let inst = Instance::from_ints(&[vec![-1; 4], vec![-1; 4]], &[-1, -1]).unwrap();
    let sol = solve_all(&inst, Mode::Auto);
    let refusal = all_allocations(&inst, &sol);
    let ok = sol.profiles == vec![vec![int(-2), int(-2)]]
        && matches!(refusal, Err(AllocationsError::Degenerate))
        && sol.outcomes.iter().all(|o| verify_outcome(&inst, o));
    let detail = match &refusal {
        Err(e) => format!("refused: {e}"),
        Ok(_) => "not refused".to_string(),
    };
    report.line(6, "degenerate identical chores", ok, start.elapsed(), detail);
}

fn rounding(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ROUNDING_SEED);
    let mut failures = 0;
    for _ in 0..200 {
        let inst = common::random_instance(&mut rng, 5, 5);
        let beta = common::positive_weights(&mut rng, inst.n());
        let ok = match round_fair(&inst, &beta) {
            Ok(r) => {
                check_ef11(&inst, &r.allocation, &beta)
                    && check_prop1(&inst, &r.allocation, &beta)
                    && check_budgets_close(&r.allocation, &r.prices, &r.budgets)
            }
            Err(_) => false,
        };
        if !ok {
            failures += 1;
        }
    }
    report.line(
        7,
        "rounding guarantees",
        failures == 0,
        start.elapsed(),
        format!("200 instances, {failures} failures"),
    );
}

fn runtime(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(RUNTIME_SEED);
    let inst = common::sized_instance(&mut rng, 3, 8);
    let start = Instant::now();
    let sol = solve_all(&inst, Mode::Direct);
    let elapsed = start.elapsed();
    let ok = elapsed < Duration::from_secs(10)
        && !sol.profiles.is_empty()
        && sol.meta.graphs_enumerated <= 4913
        && sol.outcomes.iter().all(|o| verify_outcome(&inst, o));
    report.line(
        8,
        "desk-scale runtime n=3 m=8",
        ok,
        elapsed,
        format!("{} graphs, {} profiles", sol.meta.graphs_enumerated, sol.profiles.len()),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    small_instance(&mut report);
    corpus_criteria(&mut report);
    degenerate(&mut report);
    rounding(&mut report);
    runtime(&mut report);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
