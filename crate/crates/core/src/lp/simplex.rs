//! Dense two-phase tableau simplex over exact rationals with Bland's rule.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `min cost·x` subject to `rows`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub cost: Vec<Rational>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub x: Vec<Rational>,
    pub value: Rational,
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    allowed: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col].clone();
        for v in self.a[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.a.len() {
            if r == row || self.a[r][col].is_zero() {
                continue;
            }
            let f = self.a[r][col].clone();
            for (v, pv) in self.a[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[r] -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut red = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (c, v) in red.iter_mut().zip(&self.a[r]) {
                if !v.is_zero() {
                    *c -= cb * v;
                }
            }
        }
        red
    }

    /// Minimizes `cost` from the current feasible basis.
    fn optimize(&mut self, cost: &[Rational]) -> Result<()> {
        loop {
            let red = self.reduced_costs(cost);
            let Some(col) = (0..red.len()).find(|&j| self.allowed[j] && red[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                if self.a[r][col].is_positive() {
                    let ratio = &self.rhs[r] / &self.a[r][col];
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(row, col);
        }
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(rational::zero(), |acc, (&b, v)| acc + &cost[b] * v)
    }
}

pub fn solve(problem: &Problem) -> Result<Optimum> {
    let n = problem.cost.len();
    let m = problem.rows.len();
    let slack_count = problem.rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let art_needed: Vec<bool> = problem
        .rows
        .iter()
        .map(|r| {
            let flipped = r.rhs.is_negative();
            match r.sense {
                Sense::Le => flipped,
                Sense::Ge => !flipped,
                Sense::Eq => true,
            }
        })
        .collect();
    let art_count = art_needed.iter().filter(|x| **x).count();
    let width = n + slack_count + art_count;
    let mut a = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack_col = n;
    let mut art_col = n + slack_count;
    for (row, &needs_art) in problem.rows.iter().zip(&art_needed) {
        let sign = if row.rhs.is_negative() { -rational::one() } else { rational::one() };
        let mut line: Vec<Rational> = row.coeffs.iter().map(|c| c * &sign).collect();
        line.resize(width, rational::zero());
        let slack_basic = match row.sense {
            Sense::Le => {
                line[slack_col] = sign.clone();
                slack_col += 1;
                !needs_art
            }
            Sense::Ge => {
                line[slack_col] = -sign.clone();
                slack_col += 1;
                !needs_art
            }
            Sense::Eq => false,
        };
        if slack_basic {
            basis.push(slack_col - 1);
        } else {
            line[art_col] = rational::one();
            basis.push(art_col);
            art_col += 1;
        }
        a.push(line);
        rhs.push(&row.rhs * &sign);
    }
    let mut tab = Tableau {
        a,
        rhs,
        basis,
        allowed: vec![true; width],
    };
    let art_start = n + slack_count;
    if art_count > 0 {
        let mut phase1 = vec![rational::zero(); width];
        for c in phase1.iter_mut().skip(art_start) {
            *c = rational::one();
        }
        tab.optimize(&phase1)?;
        if tab.objective(&phase1).is_positive() {
            return Err(Error::LpInfeasible);
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.basis.len() {
            if tab.basis[r] >= art_start {
                if let Some(col) = (0..art_start).find(|&j| !tab.a[r][j].is_zero()) {
                    tab.pivot(r, col);
                } else {
                    tab.a.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
        for allowed in tab.allowed.iter_mut().skip(art_start) {
            *allowed = false;
        }
    }
    let mut cost = problem.cost.clone();
    cost.resize(width, rational::zero());
    tab.optimize(&cost)?;
    let mut x = vec![rational::zero(); n];
    for (&b, v) in tab.basis.iter().zip(&tab.rhs) {
        if b < n {
            x[b] = v.clone();
        }
    }
    let value = x.iter().zip(&problem.cost).fold(rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    Ok(Optimum { x, value })
}
