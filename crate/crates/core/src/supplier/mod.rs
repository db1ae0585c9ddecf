//! Lower-bounded k-supplier, with and without outliers, on threshold graphs.
//!
//! Both solvers scan the candidate thresholds in increasing order and return
//! the first feasible assignment; the reported cost is the true maximum radius.

pub mod graph;
pub mod reduction;

pub use graph::{build_threshold_graph, distance_assignment, grow_pre_skeleton, SkeletonState, SkeletonStatus, ThresholdGraph};
pub use reduction::{reduce_supplier_to_center, SupplierCenterReduction};

use crate::audit::{self, Check};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::par::{self, Parallelism};
use crate::rational::{self, Rational};
use crate::solution::{Objective, Solution};

/// Zero together with every facility–client distance, sorted and deduplicated.
pub fn candidate_thresholds(inst: &Instance) -> Vec<Rational> {
    let mut taus: Vec<Rational> = std::iter::once(rational::zero())
        .chain((0..inst.nf()).flat_map(|i| (0..inst.nc()).map(move |j| inst.c(i, j).clone())))
        .collect();
    taus.sort();
    taus.dedup();
    taus
}

fn first_success(inst: &Instance, parallelism: Parallelism, factor: i64, trial: impl Fn(&ThresholdGraph) -> Option<Solution> + Sync + Send) -> Result<Solution> {
    let taus = candidate_thresholds(inst);
    let found = par::map(&taus, parallelism, |tau| trial(&build_threshold_graph(inst, tau)));
    let (tau, sol) = taus.iter().zip(found).find_map(|(tau, s)| s.map(|s| (tau, s))).ok_or(Error::Infeasible)?;
    let bound = rational::int(factor) * tau;
    audit::record(Check::SupplierRadius, sol.cost <= bound, || {
        format!("radius {} exceeds {factor}·{}", rational::format(&sol.cost), rational::format(tau))
    })?;
    Ok(sol)
}

/// Greedy clients pairwise without a common neighbour, in index order.
pub fn separated_clients(g: &ThresholdGraph) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for j in 0..g.client_neighbors.len() {
        if chosen.iter().all(|&x| g.client_hops(j, x).is_none_or(|h| h >= 3)) {
            chosen.push(j);
        }
    }
    chosen
}

/// The distance-3 routine at one threshold; `None` when it rejects the threshold.
pub fn lbksup_at(inst: &Instance, g: &ThresholdGraph) -> Option<Solution> {
    if g.client_neighbors.iter().any(|n| n.is_empty()) {
        return None;
    }
    let gamma = separated_clients(g);
    if gamma.len() > inst.k {
        return None;
    }
    let open: Vec<usize> = gamma
        .iter()
        .map(|&j| *g.client_neighbors[j].iter().min_by_key(|&&i| (inst.lower_bound(i), i)).expect("nonempty neighbourhood"))
        .collect();
    let assignment = distance_assignment(inst, g, &open, 3, 0)?;
    Some(Solution::from_assignment(inst, open, assignment, Objective::MaxRadius))
}

/// Lower-bounded k-supplier; the outlier budget of `inst` is ignored.
pub fn solve_lbksup(inst: &Instance, parallelism: Parallelism) -> Result<Solution> {
    let inst = inst.with_budgets(inst.k, 0);
    first_success(&inst, parallelism, 3, |g| lbksup_at(&inst, g))
}

/// The skeleton routine at one threshold; `None` when no grown set admits a distance-5 assignment.
pub fn lbksupo_at(inst: &Instance, g: &ThresholdGraph) -> Option<Solution> {
    let mut state = SkeletonState::empty();
    loop {
        if let Some(assignment) = distance_assignment(inst, g, &state.current, 5, inst.m) {
            return Some(Solution::from_assignment(inst, state.current, assignment, Objective::MaxRadius));
        }
        if state.current.len() >= inst.k {
            return None;
        }
        state = grow_pre_skeleton(g, &state.current).expect("growth keeps facilities 6 hops apart");
        if state.status == SkeletonStatus::Exhausted {
            return None;
        }
    }
}

/// Lower-bounded k-supplier with up to `m` outliers.
pub fn solve_lbksupo(inst: &Instance, parallelism: Parallelism) -> Result<Solution> {
    first_success(inst, parallelism, 5, |g| lbksupo_at(inst, g))
}

/// The skeleton sequence grown at threshold `tau`, starting from the empty set.
pub fn skeleton_sequence(inst: &Instance, tau: &Rational) -> Vec<Vec<usize>> {
    let g = build_threshold_graph(inst, tau);
    let mut seq = vec![Vec::new()];
    while seq.last().is_some_and(|f| f.len() < inst.k) {
        let state = grow_pre_skeleton(&g, seq.last().expect("nonempty")).expect("growth keeps facilities 6 hops apart");
        if state.status == SkeletonStatus::Exhausted {
            break;
        }
        seq.push(state.current);
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::e1;
    use crate::rational::int;
    use crate::solution::{validate_solution, Assignment};

    #[test]
    fn e1_supplier() {
        let g = build_threshold_graph(&e1(), &int(1));
        assert_eq!(separated_clients(&g), vec![0, 2]);
        let s = solve_lbksup(&e1(), Parallelism::Sequential).unwrap();
        assert_eq!(s.open, vec![0, 1]);
        assert_eq!(s.cost, int(1));
        assert!(validate_solution(&e1(), &s).is_valid());
    }

    #[test]
    fn forced_single_facility() {
        let inst = Instance::on_line(&[("a", 0, 3)], &[("x", 0), ("y", 2), ("z", 7)], 1, 0);
        assert_eq!(solve_lbksup(&inst, Parallelism::Sequential).unwrap().cost, int(7));
    }

    #[test]
    fn e2_outliers() {
        let inst = e1().with_budgets(1, 1);
        let s = solve_lbksupo(&inst, Parallelism::Sequential).unwrap();
        assert_eq!(s.cost, int(1));
        assert_eq!(s.outliers(), 1);
        assert!(validate_solution(&inst, &s).is_valid());
    }

    #[test]
    fn all_outliers() {
        let inst = e1().with_budgets(0, 3);
        let s = solve_lbksupo(&inst, Parallelism::Sequential).unwrap();
        assert_eq!(s.cost, int(0));
        assert_eq!(s.assignment, vec![Assignment::Out; 3]);
    }

    #[test]
    fn sequence_is_separated() {
        let seq = skeleton_sequence(&e1().with_budgets(2, 0), &int(1));
        assert_eq!(seq, vec![vec![], vec![0], vec![0, 1]]);
    }

    #[test]
    fn unmeetable_bounds_are_infeasible() {
        let inst = Instance::on_line(&[("a", 0, 5)], &[("x", 0)], 1, 0);
        assert!(matches!(solve_lbksup(&inst, Parallelism::Sequential), Err(Error::Infeasible)));
        assert!(matches!(solve_lbksupo(&inst, Parallelism::Sequential), Err(Error::Infeasible)));
    }
}
