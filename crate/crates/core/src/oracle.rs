//! Exhaustive solvers for tiny instances, used to check the approximation
//! algorithms.
//!
//! Both enumerate facility sets and radii and decide feasibility of the
//! resulting assignment problem with a lower-bounded flow.

use crate::error::{Error, Result};
use crate::flow::assign_by_flow;
use crate::instance::Instance;
use crate::guess::Combinations;
use crate::rational::{self, Rational};
use crate::solution::{Objective, Solution};

pub const SUM_RADII_MAX_FACILITIES: usize = 6;
pub const SUM_RADII_MAX_CLIENTS: usize = 9;
pub const SUPPLIER_MAX_OPENABLE: usize = 6;
pub const SUPPLIER_MAX_CLIENTS: usize = 40;

fn radius_menu(inst: &Instance, i: usize) -> Vec<Rational> {
    let mut radii: Vec<Rational> = std::iter::once(rational::zero()).chain((0..inst.nc()).map(|j| inst.c(i, j).clone())).collect();
    radii.sort();
    radii.dedup();
    radii
}

/// Facility subsets of size at most `k`, smallest first, lexicographic within a size.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k.min(n)).flat_map(move |t| Combinations::new(n, t))
}

/// Exact lower-bounded min-sum-of-radii with `inst.m` outliers.
pub fn brute_force_sum_radii(inst: &Instance) -> Result<Solution> {
    if inst.nf() > SUM_RADII_MAX_FACILITIES || inst.nc() > SUM_RADII_MAX_CLIENTS {
        return Err(Error::GuardExceeded(format!(
            "sum-of-radii oracle handles at most {SUM_RADII_MAX_FACILITIES} facilities and {SUM_RADII_MAX_CLIENTS} clients, got {} and {}",
            inst.nf(),
            inst.nc()
        )));
    }
    let menus: Vec<Vec<Rational>> = (0..inst.nf()).map(|i| radius_menu(inst, i)).collect();
    let mut best: Option<Solution> = None;
    for open in subsets(inst.nf(), inst.k) {
        let mut choice = vec![0usize; open.len()];
        loop {
            let radii: Vec<&Rational> = open.iter().zip(&choice).map(|(&i, &c)| &menus[i][c]).collect();
            let total = radii.iter().fold(rational::zero(), |a, r| a + *r);
            if best.as_ref().is_none_or(|b| total < b.cost) {
                let reach = |x: usize, j: usize| inst.c(open[x], j) <= radii[x];
                if let Some(assignment) = assign_by_flow(inst, &open, inst.m, reach) {
                    let sol = Solution::from_assignment(inst, open.clone(), assignment, Objective::SumOfRadii);
                    if best.as_ref().is_none_or(|b| sol.cost < b.cost) {
                        best = Some(sol);
                    }
                }
            }
            // Odometer over radius choices.
            let mut pos = 0;
            while pos < choice.len() {
                choice[pos] += 1;
                if choice[pos] < menus[open[pos]].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
        }
    }
    best.ok_or(Error::Infeasible)
}

/// Facilities that could serve their lower bound at all.
fn openable(inst: &Instance) -> Vec<usize> {
    (0..inst.nf()).filter(|&i| inst.lower_bound(i) as usize <= inst.nc()).collect()
}

/// Exact lower-bounded k-supplier with `inst.m` outliers.
pub fn brute_force_supplier(inst: &Instance) -> Result<Solution> {
    let cand = openable(inst);
    if cand.len() > SUPPLIER_MAX_OPENABLE || inst.nc() > SUPPLIER_MAX_CLIENTS {
        return Err(Error::GuardExceeded(format!(
            "supplier oracle handles at most {SUPPLIER_MAX_OPENABLE} openable facilities and {SUPPLIER_MAX_CLIENTS} clients, got {} and {}",
            cand.len(),
            inst.nc()
        )));
    }
    let mut taus: Vec<Rational> = std::iter::once(rational::zero())
        .chain((0..inst.nf()).flat_map(|i| (0..inst.nc()).map(move |j| inst.c(i, j).clone())))
        .collect();
    taus.sort();
    taus.dedup();
    for tau in &taus {
        for idx in subsets(cand.len(), inst.k) {
            let open: Vec<usize> = idx.iter().map(|&x| cand[x]).collect();
            if let Some(assignment) = assign_by_flow(inst, &open, inst.m, |x, j| inst.c(open[x], j) <= tau) {
                return Ok(Solution::from_assignment(inst, open, assignment, Objective::MaxRadius));
            }
        }
    }
    Err(Error::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::e1;
    use crate::rational::int;
    use crate::solution::validate_solution;

    #[test]
    fn e1_optima() {
        let inst = e1();
        let s = brute_force_sum_radii(&inst).unwrap();
        assert_eq!(s.cost, int(1));
        assert!(validate_solution(&inst, &s).is_valid());
        assert_eq!(brute_force_supplier(&inst).unwrap().cost, int(1));
    }

    #[test]
    fn e2_optima() {
        let inst = e1().with_budgets(1, 1);
        assert_eq!(brute_force_sum_radii(&inst).unwrap().cost, int(1));
        assert_eq!(brute_force_supplier(&inst).unwrap().cost, int(1));
    }

    #[test]
    fn everything_out() {
        let inst = e1().with_budgets(0, 3);
        let s = brute_force_sum_radii(&inst).unwrap();
        assert_eq!(s.cost, int(0));
        assert_eq!(s.outliers(), 3);
    }

    #[test]
    fn co_located_single_pair() {
        let inst = Instance::on_line(&[("f", 0, 1)], &[("c", 0)], 1, 0);
        assert_eq!(brute_force_supplier(&inst).unwrap().cost, int(0));
    }

    #[test]
    fn guard() {
        let fac: Vec<(String, i64, u64)> = (0..7).map(|x| (format!("f{x}"), x, 1)).collect();
        let refs: Vec<(&str, i64, u64)> = fac.iter().map(|(a, b, c)| (a.as_str(), *b, *c)).collect();
        let inst = Instance::on_line(&refs, &[("c", 0)], 1, 0);
        assert!(matches!(brute_force_sum_radii(&inst), Err(Error::GuardExceeded(_))));
        assert!(matches!(brute_force_supplier(&inst), Err(Error::GuardExceeded(_))));
    }
}
