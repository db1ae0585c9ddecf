//! Solutions `(S, σ)` and their independent validation.

use std::collections::BTreeSet;

use crate::instance::Instance;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assignment {
    Facility(usize),
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    SumOfRadii,
    MaxRadius,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::SumOfRadii => "sum_of_radii",
            Objective::MaxRadius => "max_radius",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sum_of_radii" => Some(Objective::SumOfRadii),
            "max_radius" => Some(Objective::MaxRadius),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub open: Vec<usize>,
    pub assignment: Vec<Assignment>,
    pub objective: Objective,
    pub cost: Rational,
}

impl Solution {
    /// Builds a solution whose cost is recomputed from the assignment.
    pub fn from_assignment(inst: &Instance, open: Vec<usize>, assignment: Vec<Assignment>, objective: Objective) -> Self {
        let mut open = open;
        open.sort_unstable();
        open.dedup();
        let cost = cost_of(inst, &open, &assignment, objective);
        Solution {
            open,
            assignment,
            objective,
            cost,
        }
    }

    /// Radius of each open facility: the largest distance to an assigned client.
    pub fn radii(&self, inst: &Instance) -> Vec<(usize, Rational)> {
        radii_of(inst, &self.open, &self.assignment)
    }

    pub fn outliers(&self) -> usize {
        self.assignment.iter().filter(|a| **a == Assignment::Out).count()
    }
}

fn radii_of(inst: &Instance, open: &[usize], assignment: &[Assignment]) -> Vec<(usize, Rational)> {
    open.iter()
        .map(|&i| {
            let r = assignment
                .iter()
                .enumerate()
                .filter(|(_, a)| **a == Assignment::Facility(i))
                .map(|(j, _)| inst.c(i, j))
                .max()
                .cloned()
                .unwrap_or_else(rational::zero);
            (i, r)
        })
        .collect()
}

fn cost_of(inst: &Instance, open: &[usize], assignment: &[Assignment], objective: Objective) -> Rational {
    let radii = radii_of(inst, open, assignment).into_iter().map(|x| x.1);
    match objective {
        Objective::SumOfRadii => radii.fold(rational::zero(), |a, b| a + b),
        Objective::MaxRadius => radii.max().unwrap_or_else(rational::zero),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionReport {
    pub cost: Rational,
    pub violations: Vec<String>,
}

impl SolutionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes the cost and lists every feasibility violation.
pub fn validate_solution(inst: &Instance, sol: &Solution) -> SolutionReport {
    let mut violations = Vec::new();
    let open: BTreeSet<usize> = sol.open.iter().copied().collect();
    if open.len() != sol.open.len() {
        violations.push("open facility listed twice".to_string());
    }
    if let Some(&bad) = open.iter().find(|&&i| i >= inst.nf()) {
        violations.push(format!("open facility index {bad} does not exist"));
    }
    if open.len() > inst.k {
        violations.push(format!("{} facilities opened but k = {}", open.len(), inst.k));
    }
    if sol.assignment.len() != inst.nc() {
        violations.push(format!(
            "assignment covers {} clients but the instance has {}",
            sol.assignment.len(),
            inst.nc()
        ));
        return SolutionReport {
            cost: sol.cost.clone(),
            violations,
        };
    }
    for (j, a) in sol.assignment.iter().enumerate() {
        if let Assignment::Facility(i) = a {
            if !open.contains(i) {
                violations.push(format!("client `{}` assigned to unopened facility", inst.client_id(j)));
            }
        }
    }
    for &i in open.iter().filter(|&&i| i < inst.nf()) {
        let load = sol.assignment.iter().filter(|a| **a == Assignment::Facility(i)).count() as u64;
        if load < inst.lower_bound(i) {
            violations.push(format!(
                "facility `{}` serves {load} clients, below its lower bound {}",
                inst.facility_id(i),
                inst.lower_bound(i)
            ));
        }
    }
    if sol.outliers() > inst.m {
        violations.push(format!("outlier budget exceeded: {} > m = {}", sol.outliers(), inst.m));
    }
    let valid_open: Vec<usize> = open.iter().copied().filter(|&i| i < inst.nf()).collect();
    let cost = cost_of(inst, &valid_open, &sol.assignment, sol.objective);
    if cost != sol.cost {
        violations.push(format!(
            "stated cost {} differs from recomputed {}",
            rational::format(&sol.cost),
            rational::format(&cost)
        ));
    }
    SolutionReport { cost, violations }
}
