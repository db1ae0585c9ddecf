//! Maximum flow with arc lower bounds.
//!
//! Lower bounds are removed by the usual excess transformation: each arc keeps
//! capacity `upper - lower`, the forced `lower` units become node excesses, and
//! an uncapacitated `t → s` arc closes the circulation. A feasible flow exists
//! iff the auxiliary super-source/super-sink flow saturates every excess; the
//! `s → t` value is then maximized on the remaining residual network.

use std::collections::VecDeque;

use crate::instance::Instance;
use crate::solution::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    /// `None` is unbounded.
    pub upper: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct BoundedFlowNetwork {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub value: i64,
    /// Flow on each arc, in the order of [`BoundedFlowNetwork::arcs`].
    pub arc_flow: Vec<i64>,
}

impl BoundedFlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        BoundedFlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, lower: i64, upper: Option<i64>) -> usize {
        assert!(lower >= 0 && upper.is_none_or(|u| u >= lower), "arc bounds must satisfy 0 <= lower <= upper");
        self.arcs.push(Arc { from, to, lower, upper });
        self.arcs.len() - 1
    }

    /// Capacity standing in for "unbounded": exceeds the total of all finite bounds.
    fn infinity(&self) -> i64 {
        1 + self
            .arcs
            .iter()
            .map(|a| a.lower + a.upper.unwrap_or(0))
            .sum::<i64>()
    }
}

struct Residual {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let e = self.to.len();
        self.head[u].push(e);
        self.to.push(v);
        self.cap.push(cap);
        self.head[v].push(e + 1);
        self.to.push(u);
        self.cap.push(0);
        e
    }

    /// Edmonds-Karp: shortest augmenting paths until none remain.
    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        if s == t {
            return 0;
        }
        loop {
            let mut parent = vec![usize::MAX; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        parent[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = i64::MAX;
            let mut v = t;
            while v != s {
                let e = parent[v];
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = parent[v];
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            total += bottleneck;
        }
    }
}

/// Integral flow meeting every bound with maximum `s → t` value, or `None`
/// when no flow satisfies the lower bounds.
pub fn max_flow_with_lower_bounds(net: &BoundedFlowNetwork) -> Option<Flow> {
    let inf = net.infinity();
    let n = net.nodes;
    let (super_s, super_t) = (n, n + 1);
    let mut res = Residual::new(n + 2);
    let mut excess = vec![0i64; n];
    let mut arc_edge = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let cap = a.upper.map_or(inf, |u| u - a.lower);
        arc_edge.push(res.add(a.from, a.to, cap));
        excess[a.to] += a.lower;
        excess[a.from] -= a.lower;
    }
    let back = res.add(net.sink, net.source, inf);
    let mut required = 0;
    let mut aux = Vec::new();
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            aux.push(res.add(super_s, v, x));
            required += x;
        } else if x < 0 {
            aux.push(res.add(v, super_t, -x));
        }
    }
    if res.max_flow(super_s, super_t) < required {
        return None;
    }
    // Freeze the auxiliary arcs and turn the circulation's t→s flow into s→t value.
    for e in aux {
        res.cap[e] = 0;
        res.cap[e ^ 1] = 0;
    }
    let circulated = res.cap[back ^ 1];
    res.cap[back] = 0;
    res.cap[back ^ 1] = 0;
    let extra = res.max_flow(net.source, net.sink);
    let arc_flow = net
        .arcs
        .iter()
        .zip(&arc_edge)
        .map(|(a, &e)| a.lower + res.cap[e ^ 1])
        .collect();
    Some(Flow {
        value: circulated + extra,
        arc_flow,
    })
}

/// Assigns clients to `open` facilities, each client `j` reachable from the
/// `x`-th open facility when `reach(x, j)`, meeting lower bounds and leaving at
/// most `m` clients out. Returns the assignment or `None`.
pub fn assign_by_flow(inst: &Instance, open: &[usize], m: usize, reach: impl Fn(usize, usize) -> bool) -> Option<Vec<Assignment>> {
    let nc = inst.nc();
    let (s, t) = (0, 1);
    let fac_node = |x: usize| 2 + x;
    let client_node = |j: usize| 2 + open.len() + j;
    let mut net = BoundedFlowNetwork::new(2 + open.len() + nc, s, t);
    for (x, &i) in open.iter().enumerate() {
        net.add_arc(s, fac_node(x), inst.lower_bound(i) as i64, None);
    }
    let mut edges = Vec::new();
    for x in 0..open.len() {
        for j in 0..nc {
            if reach(x, j) {
                edges.push((net.add_arc(fac_node(x), client_node(j), 0, Some(1)), x, j));
            }
        }
    }
    for j in 0..nc {
        net.add_arc(client_node(j), t, 0, Some(1));
    }
    let flow = max_flow_with_lower_bounds(&net)?;
    if (flow.value as usize) + m < nc {
        return None;
    }
    let mut assignment = vec![Assignment::Out; nc];
    for (e, x, j) in edges {
        if flow.arc_flow[e] > 0 {
            assignment[j] = Assignment::Facility(open[x]);
        }
    }
    Some(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Nodes: s=0, a=1, j1=2, j2=3, t=4.
    fn example(lower: i64) -> BoundedFlowNetwork {
        let mut net = BoundedFlowNetwork::new(5, 0, 4);
        net.add_arc(0, 1, lower, None);
        net.add_arc(1, 2, 0, None);
        net.add_arc(1, 3, 0, None);
        net.add_arc(2, 4, 0, Some(1));
        net.add_arc(3, 4, 0, Some(1));
        net
    }

    #[test]
    fn saturating_flow() {
        let f = max_flow_with_lower_bounds(&example(2)).unwrap();
        assert_eq!(f.value, 2);
        assert_eq!(f.arc_flow, vec![2, 1, 1, 1, 1]);
    }

    #[test]
    fn lower_bound_too_large() {
        assert!(max_flow_with_lower_bounds(&example(3)).is_none());
    }

    #[test]
    fn zero_lower_bounds_is_plain_max_flow() {
        assert_eq!(max_flow_with_lower_bounds(&example(0)).unwrap().value, 2);
    }

    #[test]
    fn lower_bound_on_inner_arc() {
        // s→a (0..1), s→b (0..1), a→t (lower 1), b→t (lower 1).
        let mut net = BoundedFlowNetwork::new(4, 0, 3);
        net.add_arc(0, 1, 0, Some(1));
        net.add_arc(0, 2, 0, Some(1));
        net.add_arc(1, 3, 1, Some(5));
        net.add_arc(2, 3, 1, Some(5));
        let f = max_flow_with_lower_bounds(&net).unwrap();
        assert_eq!(f.value, 2);
    }
}
