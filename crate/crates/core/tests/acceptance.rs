//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always show. The process
//! fails if any criterion fails, except those in `KNOWN_RED`, which are
//! reported but documented as unattainable.

use std::time::Instant;

use num_traits::Signed;

use lbclust::audit::{self, Check};
use lbclust::gen::{gen_hardness_gadget, gen_random, gen_random_set_cover, GenSpec, Geometry};
use lbclust::harness::{run_full_suite, to_csv};
use lbclust::oracle::{brute_force_sum_radii, brute_force_supplier};
use lbclust::par::Parallelism;
use lbclust::primal_dual::pd_alg_outlier;
use lbclust::rational::{self, frac, int, Rational};
use lbclust::sum_radii::{solve_lbksr, solve_lbksro, SolveOptions};
use lbclust::supplier::{reduce_supplier_to_center, solve_lbksup, solve_lbksupo};
use lbclust::{validate_solution, Error, GuessContext, Instance, Solution};

/// Criteria that the algorithm provably cannot meet as stated.
/// 3: the greedy separated-client step may open a single set whose
/// three-hop neighbourhood covers everything, so cost 3 is returned while a
/// two-set cover of cost 1 exists (e.g. sets {0,1}, {0,2} with k = 2).
const KNOWN_RED: &[usize] = &[3];

/// Seeds per problem in the bench suite used by the check-counter criteria.
const SUITE_SEEDS: u64 = 200;

const GEOMETRIES: [Geometry; 3] = [Geometry::Line, Geometry::Plane, Geometry::RandomMetric];

// Sum-of-radii bound with outlier-free clusters, for OPT = O* and ε:
// the combined residual solution costs at most ρ(1+ε/3)·OPT' + 7R*, where
// ρ ≤ 3.83 is the combination factor and OPT' ≤ O* − G with G the guessed
// radius total. Translation adds at most 2G, and ρ(1+ε/3) ≥ 2 absorbs it.
// With R* ≤ ε·O* this gives 3.83·O* + (3.83/3 + 7)·ε·O* = 3.83·O* + (2483/300)·ε·O*.
fn lbksr_bound(opt: &Rational, epsilon: &Rational) -> Rational {
    (frac(383, 100) + frac(2483, 300) * epsilon) * opt
}

// With outliers the residual solution costs at most ρ_A(6+4ε)·OPT' +
// (4ρ_A + 30)R*, with ρ_A = 1 + 3/(2√2) < 2.0607 from the two-solution
// combination and 30R* from rounding the two-constraint LP. Translation and
// R* ≤ ε·O* give 6ρ_A·O* + (8ρ_A + 30)·ε·O* < 12.365·O* + 46.5·ε·O*.
fn lbksro_bound(opt: &Rational, epsilon: &Rational) -> Rational {
    (frac(12365, 1000) + frac(93, 2) * epsilon) * opt
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn feasible_instances(spec_for: impl Fn(u64) -> GenSpec, oracle: impl Fn(&Instance) -> lbclust::Result<Solution>, count: usize) -> Vec<(u64, Instance, Solution)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        let inst = gen_random(seed, &spec_for(seed));
        match oracle(&inst) {
            Ok(opt) => out.push((seed, inst, opt)),
            Err(Error::Infeasible) => {}
            Err(e) => panic!("oracle failed on seed {seed}: {e}"),
        }
        seed += 1;
    }
    out
}

fn supplier_spec(m: usize) -> impl Fn(u64) -> GenSpec {
    move |seed| GenSpec {
        max_facilities: 5,
        max_clients: 8,
        max_lower: 3,
        max_k: 3,
        max_m: m,
        geometry: GEOMETRIES[(seed % 3) as usize],
    }
}

fn supplier_factor(m: usize, factor: i64) -> Outcome {
    let start = Instant::now();
    let cases = feasible_instances(supplier_spec(m), brute_force_supplier, 200);
    let mut violations = Vec::new();
    for (seed, inst, opt) in &cases {
        let sol = if m == 0 { solve_lbksup(inst, Parallelism::Auto) } else { solve_lbksupo(inst, Parallelism::Auto) };
        match sol {
            Ok(s) if validate_solution(inst, &s).is_valid() && s.cost <= int(factor) * &opt.cost => {}
            Ok(s) => violations.push(format!("seed {seed}: {} vs optimum {}", s.cost, opt.cost)),
            Err(e) => violations.push(format!("seed {seed}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations.is_empty() && secs < 120.0,
        format!("{} instances, {} violations, {secs:.1}s {}", cases.len(), violations.len(), violations.join("; ")),
    )
}

fn gadget_sanity() -> Outcome {
    let mut mismatches = Vec::new();
    for seed in 0..20 {
        let (universe, sets, k) = gen_random_set_cover(seed);
        let inst = gen_hardness_gadget(universe, &sets, k);
        let opt = brute_force_supplier(&inst).expect("gadgets are feasible").cost;
        let alg = solve_lbksup(&inst, Parallelism::Auto).map(|s| s.cost);
        let shown = alg.as_ref().map_or_else(|e| e.to_string(), |c| c.to_string());
        let agree = alg.as_ref().is_ok_and(|c| (*c == int(1)) == (opt == int(1)));
        if !agree {
            mismatches.push(format!("seed {seed} sets {sets:?} k={k}: optimum {opt}, returned {shown}"));
        }
    }
    outcome(mismatches.is_empty(), format!("{} of 20 gadgets disagree {}", mismatches.len(), mismatches.join("; ")))
}

fn check_counts(checks: &[Check], before: &audit::Snapshot, after: &audit::Snapshot) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &c in checks {
        let ran = after.passed(c) - before.passed(c);
        let failed = after.failed(c) - before.failed(c);
        pass &= failed == 0 && ran > 0;
        parts.push(format!("{}: {ran} passed, {failed} failed", c.name()));
    }
    outcome(pass, parts.join(", "))
}

fn sum_radii_bounds() -> Outcome {
    let epsilon = frac(1, 2);
    let opts = SolveOptions::with_epsilon(epsilon.clone());
    let mut parts = Vec::new();
    let mut pass = true;
    for outliers in [false, true] {
        let spec = move |seed: u64| GenSpec {
            max_facilities: 4,
            max_clients: 7,
            max_lower: 3,
            max_k: 3,
            max_m: if outliers { 2 } else { 0 },
            geometry: GEOMETRIES[(seed % 3) as usize],
        };
        let oracle = move |inst: &Instance| brute_force_sum_radii(&if outliers { inst.clone() } else { inst.with_budgets(inst.k, 0) });
        let cases = feasible_instances(spec, oracle, 100);
        let (mut infeasible, mut over) = (0, 0);
        for (_, inst, opt) in &cases {
            let (sol, bound) = if outliers {
                (solve_lbksro(inst, &opts), lbksro_bound(&opt.cost, &epsilon))
            } else {
                (solve_lbksr(inst, &opts), lbksr_bound(&opt.cost, &epsilon))
            };
            let checked = if outliers { inst.clone() } else { inst.with_budgets(inst.k, 0) };
            match sol {
                Ok(s) if validate_solution(&checked, &s).is_valid() => over += usize::from(s.cost > bound),
                _ => infeasible += 1,
            }
        }
        pass &= infeasible == 0 && over == 0;
        let name = if outliers { "with outliers" } else { "without outliers" };
        parts.push(format!("{name}: {} instances, {infeasible} infeasible, {over} above bound", cases.len()));
    }
    outcome(pass, parts.join("; "))
}

fn continuity() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut seed = 0;
    while checked < 20 {
        let spec = GenSpec {
            max_facilities: 3,
            max_clients: 5,
            max_lower: 2,
            max_k: 2,
            max_m: 2,
            geometry: GEOMETRIES[(seed % 3) as usize],
        };
        let inst = gen_random(seed, &spec);
        seed += 1;
        let all = inst.candidate_pairs();
        let ctx = GuessContext::new(&inst, Vec::new(), &all);
        let coverable = ctx.residual_clients.iter().all(|&j| all.iter().any(|p| inst.c(p.facility, j) <= &p.radius));
        if !coverable || ctx.residual_clients.len() <= inst.m || inst.n() > 8 {
            continue;
        }
        checked += 1;
        let c_max = inst.c_max();
        let z = &c_max * frac((seed % 7) as i64, 2);
        let delta = &c_max / rational::pow2(1 + (seed % 9) as usize) + frac(1, 1000);
        let a = pd_alg_outlier(&ctx, &z, inst.m).expect("coverable context");
        let b = pd_alg_outlier(&ctx, &(&z + &delta), inst.m).expect("coverable context");
        let limit = rational::pow2(inst.n()) * &delta;
        let alpha_gap = a.dual.alpha.iter().zip(&b.dual.alpha).map(|(x, y)| (x - y).abs()).max().unwrap_or_else(rational::zero);
        let gamma_gap = match (&a.dual.gamma, &b.dual.gamma) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => rational::zero(),
        };
        if alpha_gap > limit || gamma_gap > limit {
            failures.push(format!("seed {}: gaps {alpha_gap}, {gamma_gap} above {limit}", seed - 1));
        }
    }
    outcome(failures.is_empty(), format!("{checked} contexts, {} failures {}", failures.len(), failures.join("; ")))
}

fn reduction() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..30 {
        let spec = GenSpec {
            max_facilities: 3,
            max_clients: 5,
            max_lower: 2,
            max_k: 2,
            max_m: 1,
            geometry: GEOMETRIES[(seed % 3) as usize],
        };
        let inst = gen_random(seed, &spec);
        let red = reduce_supplier_to_center(&inst);
        match (brute_force_supplier(&inst), brute_force_supplier(&red.center)) {
            (Ok(orig), Ok(center)) => {
                let ok = center.cost <= orig.cost
                    && red
                        .back_translate(&inst, &center)
                        .is_ok_and(|b| validate_solution(&inst, &b).is_valid() && b.cost <= center.cost);
                if !ok {
                    failures.push(format!("seed {seed}"));
                }
            }
            (Err(Error::Infeasible), Err(Error::Infeasible)) => {}
            (Err(Error::Infeasible), Ok(center)) => {
                if red.back_translate(&inst, &center).is_ok() {
                    failures.push(format!("seed {seed}: infeasible instance translated back"));
                }
            }
            (o, c) => failures.push(format!("seed {seed}: {:?} vs {:?}", o.map(|s| s.cost), c.map(|s| s.cost))),
        }
    }
    outcome(failures.is_empty(), format!("30 instances, {} failures {}", failures.len(), failures.join("; ")))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "supplier within 3x optimum", supplier_factor(0, 3)));
    results.push((2, "supplier with outliers within 5x optimum", supplier_factor(2, 5)));
    results.push((3, "set-cover gadget cost 1 iff optimum 1", gadget_sanity()));

    let before = audit::snapshot();
    let suite = run_full_suite(0..SUITE_SEEDS, &SolveOptions::default()).expect("bench suite runs");
    let half = SolveOptions::with_epsilon(frac(1, 2));
    let suite_half = run_full_suite(0..SUITE_SEEDS, &half).expect("bench suite runs");
    let after = audit::snapshot();
    let within = suite.iter().chain(&suite_half).filter(|r| r.within_bound()).count();
    eprintln!("bench suite: {within} of {} rows within the proven factor", suite.len() + suite_half.len());
    results.push((4, "Lagrangian-preserving inequality on every primal-dual run", check_counts(&[Check::Lmp], &before, &after)));
    results.push((5, "bracket inequality on every binary-search bracket", check_counts(&[Check::Bracket], &before, &after)));
    results.push((
        6,
        "extreme points and rounding",
        check_counts(&[Check::ExtremePoint, Check::Rounding], &before, &after),
    ));
    results.push((7, "sum-of-radii feasibility and bound", sum_radii_bounds()));
    results.push((8, "dual continuity in the price", continuity()));
    results.push((9, "supplier to center reduction", reduction()));

    let again = run_full_suite(0..SUITE_SEEDS, &SolveOptions::default()).expect("bench suite runs");
    let (a, b) = (to_csv(&suite, false), to_csv(&again, false));
    results.push((10, "bench CSV is deterministic", outcome(a == b, format!("{} bytes", a.len()))));

    let mut unexpected = 0;
    for (id, name, o) in &results {
        let status = match (o.pass, KNOWN_RED.contains(id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known, unattainable)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2} {status}: {name} [{}]", o.detail.trim());
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
