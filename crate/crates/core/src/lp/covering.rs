//! The covering LP over candidate balls: minimize `Σ r·y` subject to every
//! residual client being covered (possibly fractionally discarded as an
//! outlier), at most `k'` balls and at most `m` discarded clients.

use num_traits::Zero;

use super::simplex::{self, Problem, Row, Sense};
use crate::error::Error;
use crate::guess::GuessContext;
use crate::instance::Pair;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct CoveringLpResult {
    pub status: LpStatus,
    pub opt_value: Rational,
    /// Nonzero `y` values only.
    pub y: Vec<(Pair, Rational)>,
    /// Nonzero `w` values only (outlier variant).
    pub w: Vec<(usize, Rational)>,
}

impl CoveringLpResult {
    pub fn is_feasible(&self) -> bool {
        self.status == LpStatus::Feasible
    }

    fn infeasible() -> Self {
        CoveringLpResult {
            status: LpStatus::Infeasible,
            opt_value: rational::zero(),
            y: Vec::new(),
            w: Vec::new(),
        }
    }
}

pub fn solve_covering_lp(ctx: &GuessContext<'_>, with_outliers: bool, m: usize) -> CoveringLpResult {
    let clients = &ctx.residual_clients;
    if clients.is_empty() {
        return CoveringLpResult {
            status: LpStatus::Feasible,
            opt_value: rational::zero(),
            y: Vec::new(),
            w: Vec::new(),
        };
    }
    // Balls missing every residual client never help; their y is zero.
    let pairs: Vec<(&Pair, Vec<usize>)> = ctx
        .candidates
        .iter()
        .map(|p| (p, ctx.residual_ball(p)))
        .filter(|(_, b)| !b.is_empty())
        .collect();
    let uncoverable = clients
        .iter()
        .filter(|&&j| !pairs.iter().any(|(_, b)| b.contains(&j)))
        .count();
    if uncoverable > if with_outliers { m } else { 0 } {
        return CoveringLpResult::infeasible();
    }
    let np = pairs.len();
    let nw = if with_outliers { clients.len() } else { 0 };
    let width = np + nw;
    let mut cost = vec![rational::zero(); width];
    for (v, (p, _)) in pairs.iter().enumerate() {
        cost[v] = p.radius.clone();
    }
    let mut rows = Vec::new();
    for (ci, &j) in clients.iter().enumerate() {
        let mut coeffs = vec![rational::zero(); width];
        for (v, (_, b)) in pairs.iter().enumerate() {
            if b.contains(&j) {
                coeffs[v] = rational::one();
            }
        }
        if with_outliers {
            coeffs[np + ci] = rational::one();
        }
        rows.push(Row {
            coeffs,
            sense: Sense::Ge,
            rhs: rational::one(),
        });
    }
    let mut budget = vec![rational::zero(); width];
    for c in budget.iter_mut().take(np) {
        *c = rational::one();
    }
    rows.push(Row {
        coeffs: budget,
        sense: Sense::Le,
        rhs: rational::int(ctx.k_prime as i64),
    });
    if with_outliers {
        let mut out = vec![rational::zero(); width];
        for c in out.iter_mut().skip(np) {
            *c = rational::one();
        }
        rows.push(Row {
            coeffs: out,
            sense: Sense::Le,
            rhs: rational::int(m as i64),
        });
    }
    match simplex::solve(&Problem { cost, rows }) {
        Ok(opt) => CoveringLpResult {
            status: LpStatus::Feasible,
            opt_value: opt.value,
            y: pairs
                .iter()
                .zip(&opt.x)
                .filter(|(_, v)| !v.is_zero())
                .map(|((p, _), v)| ((*p).clone(), v.clone()))
                .collect(),
            w: clients
                .iter()
                .zip(opt.x.iter().skip(np))
                .filter(|(_, v)| !v.is_zero())
                .map(|(&j, v)| (j, v.clone()))
                .collect(),
        },
        Err(Error::LpInfeasible) => CoveringLpResult::infeasible(),
        Err(e) => unreachable!("covering LP is bounded below by zero: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guess::GuessContext;
    use crate::instance::tests::e1;
    use crate::rational::{frac, int};

    #[test]
    fn empty_residual() {
        let inst = e1();
        let all = inst.candidate_pairs();
        let ctx = GuessContext::new(&inst, vec![Pair::new(1, int(10))], &all);
        assert!(ctx.residual_clients.is_empty());
        let lp = solve_covering_lp(&ctx, false, 0);
        assert!(lp.is_feasible());
        assert_eq!(lp.opt_value, int(0));
        assert!(lp.y.is_empty());
    }

    #[test]
    fn uncoverable_client() {
        let inst = e1();
        // Cap at radius 0 around a: j2 lies in no ball of radius 0.
        let all = inst.candidate_pairs();
        let ctx = GuessContext::new(&inst, vec![Pair::new(0, int(0))], &all);
        assert!(!solve_covering_lp(&ctx, false, 0).is_feasible());
        assert!(solve_covering_lp(&ctx, true, 1).is_feasible());
    }

    #[test]
    fn fractional_optimum() {
        // Three clients pairwise at distance 2 around a hub facility.
        let inst = crate::instance::Instance::from_fn(
            vec![("h".into(), 1), ("x".into(), 1), ("y".into(), 1), ("z".into(), 1)],
            vec!["cx".into(), "cy".into(), "cz".into()],
            2,
            0,
            |a, b| {
                if a == b {
                    return Ok(int(0));
                }
                let hub = |s: &str| s == "h";
                let same = |s: &str, t: &str| s.len() + t.len() == 3 && (s.ends_with(t) || t.ends_with(s));
                Ok(if hub(a) || hub(b) {
                    int(2)
                } else if same(a, b) {
                    int(1)
                } else {
                    int(3)
                })
            },
        )
        .unwrap();
        assert!(inst.is_valid(), "{:?}", inst.validate());
        let all = inst.candidate_pairs();
        let ctx = GuessContext::residual(&inst, (0..3).collect(), all, 2, None);
        let lp = solve_covering_lp(&ctx, false, 0);
        assert!(lp.is_feasible());
        // Integral optimum is 3 (x@1 + hub@2); LP can do 2 via the hub alone.
        assert_eq!(lp.opt_value, int(2));
        let half = solve_covering_lp(&GuessContext::residual(&inst, (0..3).collect(), inst.candidate_pairs(), 1, None), true, 1);
        assert!(half.opt_value <= frac(2, 1));
    }
}
