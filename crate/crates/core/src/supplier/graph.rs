//! Threshold graphs, hop-bounded assignments and pre-skeleton growth.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::flow::assign_by_flow;
use crate::instance::Instance;
use crate::rational::Rational;
use crate::solution::Assignment;

/// Bipartite graph joining each eligible facility to the clients within `tau`.
/// Facility `i` is node `i`, client `j` is node `nf + j`.
#[derive(Debug, Clone)]
pub struct ThresholdGraph {
    pub tau: Rational,
    /// `eligible[i]` iff `|B(i, tau)| >= L_i`.
    pub eligible: Vec<bool>,
    pub facility_neighbors: Vec<Vec<usize>>,
    pub client_neighbors: Vec<Vec<usize>>,
    /// Hop counts between all nodes; `None` when disconnected.
    hops: Vec<Vec<Option<u32>>>,
}

pub fn build_threshold_graph(inst: &Instance, tau: &Rational) -> ThresholdGraph {
    let (nf, nc) = (inst.nf(), inst.nc());
    let mut eligible = vec![false; nf];
    let mut facility_neighbors = vec![Vec::new(); nf];
    let mut client_neighbors = vec![Vec::new(); nc];
    for i in 0..nf {
        let ball: Vec<usize> = (0..nc).filter(|&j| inst.c(i, j) <= tau).collect();
        if ball.len() as u64 >= inst.lower_bound(i) {
            eligible[i] = true;
            for &j in &ball {
                client_neighbors[j].push(i);
            }
            facility_neighbors[i] = ball;
        }
    }
    let n = nf + nc;
    let adj = |v: usize| -> Vec<usize> {
        if v < nf {
            facility_neighbors[v].iter().map(|&j| nf + j).collect()
        } else {
            client_neighbors[v - nf].clone()
        }
    };
    let hops = (0..n)
        .map(|src| {
            let mut dist = vec![None; n];
            dist[src] = Some(0);
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].unwrap_or(0);
                for v in adj(u) {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect();
    ThresholdGraph {
        tau: tau.clone(),
        eligible,
        facility_neighbors,
        client_neighbors,
        hops,
    }
}

impl ThresholdGraph {
    pub fn nf(&self) -> usize {
        self.eligible.len()
    }

    pub fn eligible_facilities(&self) -> Vec<usize> {
        (0..self.nf()).filter(|&i| self.eligible[i]).collect()
    }

    pub fn facility_client_hops(&self, i: usize, j: usize) -> Option<u32> {
        self.hops[i][self.nf() + j]
    }

    pub fn facility_hops(&self, a: usize, b: usize) -> Option<u32> {
        self.hops[a][b]
    }

    pub fn client_hops(&self, a: usize, b: usize) -> Option<u32> {
        let nf = self.nf();
        self.hops[nf + a][nf + b]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.facility_neighbors[i].len()
    }
}

/// Assignment of clients to `open` along paths of at most `alpha` hops,
/// meeting every lower bound and leaving at most `m` clients out.
pub fn distance_assignment(inst: &Instance, g: &ThresholdGraph, open: &[usize], alpha: u32, m: usize) -> Option<Vec<Assignment>> {
    debug_assert!(open.iter().all(|&i| g.eligible[i]));
    assign_by_flow(inst, open, m, |x, j| g.facility_client_hops(open[x], j).is_some_and(|h| h <= alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkeletonStatus {
    PreSkeletonCandidate,
    /// A distance-5 assignment from `current` exists.
    SkeletonFound,
    /// No eligible facility is 6 or more hops from `current`.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonState {
    pub current: Vec<usize>,
    pub status: SkeletonStatus,
}

impl SkeletonState {
    pub fn empty() -> Self {
        SkeletonState {
            current: Vec::new(),
            status: SkeletonStatus::PreSkeletonCandidate,
        }
    }
}

fn far(hops: Option<u32>) -> bool {
    hops.is_none_or(|h| h >= 6)
}

/// Adds the eligible facility of largest degree among those at least 6 hops
/// from every member of `current` (lowest index on ties), or reports exhaustion.
pub fn grow_pre_skeleton(g: &ThresholdGraph, current: &[usize]) -> Result<SkeletonState> {
    for (x, &a) in current.iter().enumerate() {
        if !g.eligible[a] {
            return Err(Error::Precondition(format!("facility {a} is not eligible at this threshold")));
        }
        if let Some(&b) = current[x + 1..].iter().find(|&&b| !far(g.facility_hops(a, b))) {
            return Err(Error::Precondition(format!("facilities {a} and {b} are fewer than 6 hops apart")));
        }
    }
    let pick = g
        .eligible_facilities()
        .into_iter()
        .filter(|&i| current.iter().all(|&f| far(g.facility_hops(i, f))))
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if g.degree(b) >= g.degree(i) => Some(b),
            _ => Some(i),
        });
    Ok(match pick {
        None => SkeletonState {
            current: current.to_vec(),
            status: SkeletonStatus::Exhausted,
        },
        Some(i) => {
            let mut next = current.to_vec();
            next.push(i);
            SkeletonState {
                current: next,
                status: SkeletonStatus::PreSkeletonCandidate,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::e1;
    use crate::rational::int;

    #[test]
    fn e1_threshold_one() {
        let g = build_threshold_graph(&e1(), &int(1));
        assert_eq!(g.eligible_facilities(), vec![0, 1]);
        assert_eq!(g.facility_neighbors, vec![vec![0, 1], vec![2]]);
        let sigma = distance_assignment(&e1(), &g, &[0, 1], 1, 0).unwrap();
        assert_eq!(sigma, vec![Assignment::Facility(0), Assignment::Facility(0), Assignment::Facility(1)]);
    }

    #[test]
    fn empty_below_min_distance() {
        let inst = Instance::on_line(&[("a", 0, 1)], &[("j", 3)], 1, 0);
        assert!(build_threshold_graph(&inst, &int(2)).eligible_facilities().is_empty());
    }

    #[test]
    fn competing_lower_bounds() {
        // Both facilities are eligible but together need four of the two clients.
        let inst = Instance::on_line(&[("a", 0, 2), ("b", 1, 2)], &[("j1", 0), ("j2", 1)], 2, 0);
        let g = build_threshold_graph(&inst, &int(1));
        assert_eq!(g.eligible_facilities(), vec![0, 1]);
        assert!(distance_assignment(&inst, &g, &[0], 1, 0).is_some());
        assert!(distance_assignment(&inst, &g, &[0, 1], 1, 0).is_none());
    }

    #[test]
    fn everything_out() {
        let g = build_threshold_graph(&e1(), &int(0));
        assert_eq!(distance_assignment(&e1(), &g, &[], 5, 3), Some(vec![Assignment::Out; 3]));
    }

    #[test]
    fn growth_picks_largest_degree() {
        // a serves four clients, b three; they are 6 hops apart through a chain.
        let inst = Instance::on_line(
            &[("a", 0, 1), ("b", 30, 1), ("m1", 10, 1), ("m2", 20, 1)],
            &[("x1", 0), ("x2", 1), ("x3", 1), ("y", 5), ("z", 15), ("w", 25), ("v1", 30), ("v2", 31)],
            2,
            0,
        );
        let g = build_threshold_graph(&inst, &int(5));
        assert_eq!(g.degree(0), 4);
        let s = grow_pre_skeleton(&g, &[]).unwrap();
        assert_eq!(s.current, vec![0]);
        let s = grow_pre_skeleton(&g, &s.current).unwrap();
        assert_eq!(s.current, vec![0, 1]);
        let s = grow_pre_skeleton(&g, &s.current).unwrap();
        assert_eq!(s.status, SkeletonStatus::Exhausted);
        assert!(grow_pre_skeleton(&g, &[0, 2]).is_err());
    }
}
