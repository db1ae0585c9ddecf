//! Box-constrained LPs with at most two side constraints, written in the
//! "value if chosen / value if not chosen" form of the combination LPs.

use num_traits::Zero;

use super::simplex::{self, Problem, Row, Sense};
use crate::audit::{self, Check};
use crate::error::Result;
use crate::rational::{self, Rational};

/// Contribution `when_one·x + when_zero·(1 − x)` of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineTerm {
    pub when_one: Rational,
    pub when_zero: Rational,
}

impl AffineTerm {
    pub fn new(when_one: Rational, when_zero: Rational) -> Self {
        AffineTerm { when_one, when_zero }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.when_one * x + &self.when_zero * (rational::one() - x)
    }
}

/// `Σ_v terms[v](x_v) ≤ bound`.
#[derive(Debug, Clone)]
pub struct SideConstraint {
    pub terms: Vec<AffineTerm>,
    pub bound: Rational,
}

impl SideConstraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.terms.iter().zip(x).fold(rational::zero(), |acc, (t, v)| acc + t.eval(v))
    }
}

/// Minimize `Σ objective[v](x_v)` over `x ∈ [0,1]^n` and the side constraints.
#[derive(Debug, Clone)]
pub struct KnapsackLp {
    pub objective: Vec<AffineTerm>,
    pub constraints: Vec<SideConstraint>,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub x: Vec<Rational>,
    pub objective: Rational,
    pub tight: usize,
    pub fractional: usize,
}

impl KnapsackLp {
    pub fn value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).fold(rational::zero(), |acc, (t, v)| acc + t.eval(v))
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.iter().all(|v| *v >= rational::zero() && *v <= rational::one())
            && self.constraints.iter().all(|c| c.lhs(x) <= c.bound)
    }
}

pub fn is_fractional(v: &Rational) -> bool {
    !v.is_integer()
}

/// An optimal vertex of the LP. Fails with [`crate::Error::LpInfeasible`] when
/// no point satisfies the side constraints.
pub fn extreme_point_optimum(lp: &KnapsackLp) -> Result<Vertex> {
    assert!(lp.constraints.len() <= 2, "at most two side constraints");
    let n = lp.objective.len();
    let x = if lp.constraints.is_empty() {
        // Each variable independently takes its cheaper endpoint.
        lp.objective
            .iter()
            .map(|t| if t.when_one < t.when_zero { rational::one() } else { rational::zero() })
            .collect()
    } else {
        let mut rows = Vec::with_capacity(n + lp.constraints.len());
        for v in 0..n {
            let mut coeffs = vec![rational::zero(); n];
            coeffs[v] = rational::one();
            rows.push(Row {
                coeffs,
                sense: Sense::Le,
                rhs: rational::one(),
            });
        }
        for c in &lp.constraints {
            let constant = c.terms.iter().fold(rational::zero(), |acc, t| acc + &t.when_zero);
            rows.push(Row {
                coeffs: c.terms.iter().map(|t| &t.when_one - &t.when_zero).collect(),
                sense: Sense::Le,
                rhs: &c.bound - constant,
            });
        }
        let cost = lp.objective.iter().map(|t| &t.when_one - &t.when_zero).collect();
        simplex::solve(&Problem { cost, rows })?.x
    };
    let tight = lp.constraints.iter().filter(|c| c.lhs(&x) == c.bound).count();
    let fractional = x.iter().filter(|v| is_fractional(v)).count();
    audit::record(Check::ExtremePoint, fractional <= tight, || {
        format!("{fractional} fractional components but only {tight} tight side constraints")
    })?;
    Ok(Vertex {
        objective: lp.value(&x),
        x,
        tight,
        fractional,
    })
}

/// Rounds every component up.
pub fn ceil_all(x: &[Rational]) -> Vec<Rational> {
    x.iter().map(|v| v.ceil()).collect()
}

pub fn is_zero_one(x: &[Rational]) -> bool {
    x.iter().all(|v| v.is_zero() || *v == rational::one())
}
