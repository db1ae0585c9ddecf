//! Solving the residual k-ball-selection problem: pick at most `k'` balls
//! covering all but `m` residual clients at small total radius, together with
//! a non-intersecting family of inner radii `rad(i)`.

pub mod combine;
pub mod outlier;
pub mod search;

use std::collections::BTreeMap;

use crate::audit::{self, Check};
use crate::error::Result;
use crate::guess::GuessContext;
use crate::instance::Pair;
use crate::lp::solve_covering_lp;
use crate::primal_dual::cost;
use crate::rational::{self, Rational};

pub use combine::{combine_basic, combine_improved, StarDecomposition};
pub use outlier::{combine_outliers_a, combine_outliers_b, simple_cases};
pub use search::{binary_search_z, check_bracket, delta_z, BracketPair, Delta, DeltaSource, SearchOutcome};

/// Which step produced a [`KbsResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// No residual clients need covering.
    Empty,
    /// The LP optimum is zero and zero-radius balls suffice.
    ZeroCover,
    /// A single primal-dual run met the budget.
    Early,
    /// The upper-price solution was no more expensive than the merge.
    UpperSide,
    Basic,
    Improved,
    /// The upper-price solution padded with lower-price pairs reached `k'`.
    Augmented,
    OutlierA,
    OutlierSimple,
    OutlierB,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbsResult {
    /// `F`, sorted.
    pub pairs: Vec<Pair>,
    /// `rad(i)` for each facility of `F`.
    pub rad: BTreeMap<usize, Rational>,
    pub route: Route,
}

impl KbsResult {
    pub fn cost(&self) -> Rational {
        cost(&self.pairs)
    }

    pub fn rad_pairs(&self) -> Vec<Pair> {
        self.rad.iter().map(|(&i, r)| Pair::new(i, r.clone())).collect()
    }

    fn empty(route: Route) -> Self {
        KbsResult {
            pairs: Vec::new(),
            rad: BTreeMap::new(),
            route,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CombineRule {
    Basic,
    #[default]
    Improved,
}

#[derive(Debug, Clone)]
pub struct KbsOptions {
    pub epsilon: Rational,
    pub combine: CombineRule,
    /// Replaces the computed `δ_z`; bracket bounds tied to `OPT` are then skipped.
    pub delta_override: Option<Rational>,
}

impl Default for KbsOptions {
    fn default() -> Self {
        KbsOptions {
            epsilon: rational::one(),
            combine: CombineRule::default(),
            delta_override: None,
        }
    }
}

/// `R*`, or `c_max` when nothing was guessed.
pub(crate) fn r_cap(ctx: &GuessContext<'_>) -> Rational {
    ctx.r_star.clone().unwrap_or_else(|| ctx.inst.c_max())
}

/// Zero-radius balls covering all but `m` residual clients with at most `k'`
/// balls, taking the largest client groups first.
pub fn zero_cover(ctx: &GuessContext<'_>, m: usize) -> Option<Vec<Pair>> {
    let mut groups: Vec<(Vec<usize>, Pair)> = Vec::new();
    for p in ctx.candidates.iter().filter(|p| p.radius == rational::zero()) {
        let ball = ctx.residual_ball(p);
        if !ball.is_empty() && !groups.iter().any(|(b, _)| *b == ball) {
            groups.push((ball, p.clone()));
        }
    }
    groups.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.1.cmp(&b.1)));
    let mut chosen: Vec<Pair> = groups.into_iter().take(ctx.k_prime).map(|(_, p)| p).collect();
    chosen.sort();
    (ctx.uncovered(&chosen).len() <= m).then_some(chosen)
}

fn zero_result(pairs: Vec<Pair>) -> KbsResult {
    let rad = pairs.iter().map(|p| (p.facility, rational::zero())).collect();
    KbsResult {
        pairs,
        rad,
        route: Route::ZeroCover,
    }
}

fn from_output(out: &crate::primal_dual::PrunedOutput) -> KbsResult {
    KbsResult {
        pairs: out.pairs.clone(),
        rad: out.rad.clone(),
        route: Route::Early,
    }
}

/// Structural guarantees of any returned solution: at most `k'` balls, at
/// most `m` uncovered residual clients, `rad(i)` at most the ball radius,
/// rad pairs non-intersecting and drawn from the capped candidates.
pub fn check_result(ctx: &GuessContext<'_>, res: &KbsResult, m: usize) -> Result<()> {
    let inst = ctx.inst;
    audit::record(Check::Combination, res.pairs.len() <= ctx.k_prime, || {
        format!("{} balls exceed the budget {}", res.pairs.len(), ctx.k_prime)
    })?;
    let uncovered = ctx.uncovered(&res.pairs).len();
    audit::record(Check::Combination, uncovered <= m, || {
        format!("{uncovered} residual clients uncovered, at most {m} allowed")
    })?;
    let keys_match = res.pairs.len() == res.rad.len() && res.pairs.iter().all(|p| res.rad.get(&p.facility).is_some_and(|r| *r <= p.radius));
    audit::record(Check::Combination, keys_match, || "rad map does not match the returned balls".into())?;
    let rads = res.rad_pairs();
    for (x, a) in rads.iter().enumerate() {
        audit::record(Check::Combination, ctx.candidates.binary_search(a).is_ok(), || {
            format!("rad pair {} is not a capped candidate", inst.pair_label(a))
        })?;
        for b in &rads[x + 1..] {
            audit::record(Check::Combination, !inst.intersects(a, b), || {
                format!("rad pairs {} and {} intersect", inst.pair_label(a), inst.pair_label(b))
            })?;
        }
    }
    Ok(())
}

/// Solves the covering LP for `ctx` and runs the matching solver; `None` when
/// the LP is infeasible and the guess must be rejected.
pub fn solve_kbs(ctx: &GuessContext<'_>, outliers: Option<usize>, opts: &KbsOptions) -> Result<Option<KbsResult>> {
    let m = outliers.unwrap_or(0);
    let lp = solve_covering_lp(ctx, outliers.is_some(), m);
    if !lp.is_feasible() {
        return Ok(None);
    }
    let res = match outliers {
        None => kbs_alg(ctx, &lp.opt_value, opts)?,
        Some(m) => kbs_alg_outlier(ctx, m, &lp.opt_value, opts)?,
    };
    Ok(Some(res))
}

/// k-ball selection without outliers; `lp_opt` is the covering LP optimum.
pub fn kbs_alg(ctx: &GuessContext<'_>, lp_opt: &Rational, opts: &KbsOptions) -> Result<KbsResult> {
    if ctx.residual_clients.is_empty() {
        return Ok(KbsResult::empty(Route::Empty));
    }
    if *lp_opt == rational::zero() && opts.delta_override.is_none() {
        if let Some(pairs) = zero_cover(ctx, 0) {
            let res = zero_result(pairs);
            check_result(ctx, &res, 0)?;
            return Ok(res);
        }
    }
    let exponential = opts.combine == CombineRule::Improved;
    let delta = delta_z(ctx, &opts.epsilon, lp_opt, exponential, opts.delta_override.as_ref());
    let res = match binary_search_z(ctx, None, lp_opt, &delta.value)? {
        SearchOutcome::Early(out) => from_output(&out),
        SearchOutcome::Bracket(b) => {
            let improved = opts.combine == CombineRule::Improved;
            check_bracket(ctx, &b, lp_opt, &opts.epsilon, &delta, false, improved)?;
            if improved {
                combine_improved(ctx, &b)?
            } else {
                combine_basic(ctx, &b)?
            }
        }
    };
    check_result(ctx, &res, 0)?;
    Ok(res)
}

/// k-ball selection with at most `m` uncovered residual clients.
pub fn kbs_alg_outlier(ctx: &GuessContext<'_>, m: usize, lp_opt: &Rational, opts: &KbsOptions) -> Result<KbsResult> {
    if ctx.residual_clients.len() <= m {
        return Ok(KbsResult::empty(Route::Empty));
    }
    if *lp_opt == rational::zero() && opts.delta_override.is_none() {
        if let Some(pairs) = zero_cover(ctx, m) {
            let res = zero_result(pairs);
            check_result(ctx, &res, m)?;
            return Ok(res);
        }
    }
    let delta = delta_z(ctx, &opts.epsilon, lp_opt, true, opts.delta_override.as_ref());
    let res = match binary_search_z(ctx, Some(m), lp_opt, &delta.value)? {
        SearchOutcome::Early(out) => from_output(&out),
        SearchOutcome::Bracket(b) => {
            check_bracket(ctx, &b, lp_opt, &opts.epsilon, &delta, true, false)?;
            let via_a = combine_outliers_a(ctx, &b, m)?;
            if b.lo.without_f().len() > ctx.k_prime {
                via_a
            } else if let Some(simple) = simple_cases(ctx, &b, m) {
                simple
            } else {
                match combine_outliers_b(ctx, &b, m, lp_opt, &opts.epsilon, &delta)? {
                    Some(via_b) if via_b.cost() < via_a.cost() => via_b,
                    _ => via_a,
                }
            }
        }
    };
    check_result(ctx, &res, m)?;
    Ok(res)
}
