//! Lower-bounded min-sum-of-radii, with and without outliers.
//!
//! Each guess of the largest clusters induces a residual ball-selection
//! instance; its solution is turned into an assignment by opening a maximal
//! non-intersecting family of inner balls plus guessed balls and redirecting
//! the rest. The cheapest assignment over all guesses wins.

use std::collections::BTreeMap;

use crate::audit::{self, Check};
use crate::error::{Error, Result};
use crate::guess::{guess_size, Combinations, GuessContext};
use crate::instance::{Instance, Pair};
use crate::kbs::{solve_kbs, CombineRule, KbsOptions, KbsResult};
use crate::par::{self, Parallelism};
use crate::primal_dual::cost;
use crate::rational::{self, Rational};
use crate::solution::{Assignment, Objective, Solution};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub epsilon: Rational,
    pub combine: CombineRule,
    pub delta_override: Option<Rational>,
    pub parallelism: Parallelism,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: rational::one(),
            combine: CombineRule::default(),
            delta_override: None,
            parallelism: Parallelism::Auto,
        }
    }
}

impl SolveOptions {
    pub fn with_epsilon(epsilon: Rational) -> Self {
        SolveOptions {
            epsilon,
            ..Self::default()
        }
    }

    fn kbs(&self) -> KbsOptions {
        KbsOptions {
            epsilon: self.epsilon.clone(),
            combine: self.combine,
            delta_override: self.delta_override.clone(),
        }
    }
}

/// Turns a ball-selection solution for the residual instance of `ctx` into
/// an assignment for the whole instance.
///
/// Opens the rad pairs plus a greedy non-intersecting subset `P` of the
/// guessed pairs; clients go to the disjoint opened balls first, then to any
/// ball of `F`, then to the opened partner of a rejected guessed ball that
/// holds them, and otherwise are outliers.
pub fn translate_to_solution(res: &KbsResult, ctx: &GuessContext<'_>) -> Result<Solution> {
    let inst = ctx.inst;
    let mut opened: Vec<Pair> = res.rad_pairs();
    let mut rejected: Vec<(&Pair, usize)> = Vec::new();
    for g in &ctx.guessed {
        match opened.iter().position(|u| inst.intersects(u, g)) {
            None => opened.push(g.clone()),
            Some(x) => rejected.push((g, x)),
        }
    }
    let assignment: Vec<Assignment> = (0..inst.nc())
        .map(|j| {
            let holds = |p: &Pair| inst.c(p.facility, j) <= &p.radius;
            if let Some(u) = opened.iter().find(|u| holds(u)) {
                Assignment::Facility(u.facility)
            } else if let Some(p) = res.pairs.iter().find(|p| holds(p)) {
                Assignment::Facility(p.facility)
            } else if let Some((_, x)) = rejected.iter().find(|(g, _)| holds(g)) {
                Assignment::Facility(opened[*x].facility)
            } else {
                Assignment::Out
            }
        })
        .collect();
    let open = opened.iter().map(|p| p.facility).collect();
    let sol = Solution::from_assignment(inst, open, assignment, Objective::SumOfRadii);
    let bound = res.cost() + rational::int(2) * cost(&ctx.guessed);
    audit::record(Check::Translation, sol.cost <= bound, || {
        format!(
            "translated cost {} exceeds {}",
            rational::format(&sol.cost),
            rational::format(&bound)
        )
    })?;
    Ok(sol)
}

/// Guesses of 0 to `t` candidate pairs on distinct facilities, smallest
/// first and lexicographic within a size. The smaller guesses cover optima
/// that open fewer than `t` balls.
pub fn distinct_facility_guesses(inst: &Instance, epsilon: &Rational) -> Vec<Vec<Pair>> {
    let all = inst.candidate_pairs();
    let t = guess_size(inst.k, epsilon);
    let mut out = vec![Vec::new()];
    for size in 1..=t {
        for idx in Combinations::new(all.len(), size) {
            let guess: Vec<Pair> = idx.iter().map(|&x| all[x].clone()).collect();
            let distinct = guess.windows(2).all(|w| w[0].facility != w[1].facility);
            if distinct {
                out.push(guess);
            }
        }
    }
    out
}

type ContextKey = (Vec<usize>, Option<Rational>, usize);

fn solve(inst: &Instance, outliers: Option<usize>, opts: &SolveOptions) -> Result<Solution> {
    let all = inst.candidate_pairs();
    let guesses = distinct_facility_guesses(inst, &opts.epsilon);
    let contexts: Vec<GuessContext<'_>> = guesses.into_iter().map(|g| GuessContext::new(inst, g, &all)).collect();
    // Guesses with the same residual clients, cap and budget share one solve.
    let mut unique: BTreeMap<ContextKey, usize> = BTreeMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let slot: Vec<usize> = contexts
        .iter()
        .enumerate()
        .map(|(x, c)| {
            let key = (c.residual_clients.clone(), c.r_star.clone(), c.k_prime);
            *unique.entry(key).or_insert_with(|| {
                reps.push(x);
                reps.len() - 1
            })
        })
        .collect();
    let kbs_opts = opts.kbs();
    let solved: Vec<Result<Option<KbsResult>>> = par::map(&reps, opts.parallelism, |&x| solve_kbs(&contexts[x], outliers, &kbs_opts));
    let solved: Vec<Option<KbsResult>> = solved.into_iter().collect::<Result<_>>()?;
    let indices: Vec<usize> = (0..contexts.len()).collect();
    let translated: Vec<Result<Option<Solution>>> = par::map(&indices, opts.parallelism, |&x| match &solved[slot[x]] {
        None => Ok(None),
        Some(res) => translate_to_solution(res, &contexts[x]).map(Some),
    });
    let mut best: Option<Solution> = None;
    for sol in translated {
        if let Some(sol) = sol? {
            if best.as_ref().is_none_or(|b| sol.cost < b.cost) {
                best = Some(sol);
            }
        }
    }
    best.ok_or(Error::Infeasible)
}

/// Lower-bounded k-sum-of-radii: every client is served.
pub fn solve_lbksr(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    solve(&inst.with_budgets(inst.k, 0), None, opts)
}

/// Lower-bounded k-sum-of-radii with up to `m` outliers.
pub fn solve_lbksro(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    solve(inst, Some(inst.m), opts)
}
