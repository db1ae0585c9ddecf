use lbclust::flow::{assign_by_flow, max_flow_with_lower_bounds, BoundedFlowNetwork};
use lbclust::gen::{gen_random, GenSpec, Geometry};
use lbclust::lp::knapsack::is_fractional;
use lbclust::lp::{extreme_point_optimum, AffineTerm, KnapsackLp, SideConstraint};
use lbclust::rational::{frac, int, Rational};
use lbclust::{Assignment, Error};
use proptest::prelude::*;

fn term(one: i64, zero: i64) -> AffineTerm {
    AffineTerm::new(int(one), int(zero))
}

/// Solves the square system `rows·y = rhs` exactly (at most 2×2).
fn solve_square(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    match rows.len() {
        0 => Some(Vec::new()),
        1 => (rows[0][0] != int(0)).then(|| vec![&rhs[0] / &rows[0][0]]),
        2 => {
            let det = &rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0];
            if det == int(0) {
                return None;
            }
            let a = (&rhs[0] * &rows[1][1] - &rows[0][1] * &rhs[1]) / &det;
            let b = (&rows[0][0] * &rhs[1] - &rhs[0] * &rows[1][0]) / &det;
            Some(vec![a, b])
        }
        _ => unreachable!(),
    }
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize <= max).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
}

/// Minimum over all basic points: every variable at 0 or 1 except a set `S`
/// pinned by making |S| side constraints tight.
fn vertex_oracle(lp: &KnapsackLp) -> Option<Rational> {
    let n = lp.objective.len();
    let k = lp.constraints.len();
    let mut best: Option<Rational> = None;
    for free in subsets(n, k) {
        for tight in subsets(k, k).into_iter().filter(|t| t.len() == free.len()) {
            for mask in 0u32..1 << n {
                let mut x: Vec<Rational> = (0..n).map(|i| int(i64::from(mask >> i & 1))).collect();
                for &f in &free {
                    x[f] = int(0);
                }
                let rows: Vec<Vec<Rational>> = tight
                    .iter()
                    .map(|&c| free.iter().map(|&f| &lp.constraints[c].terms[f].when_one - &lp.constraints[c].terms[f].when_zero).collect())
                    .collect();
                let rhs: Vec<Rational> = tight.iter().map(|&c| &lp.constraints[c].bound - lp.constraints[c].lhs(&x)).collect();
                let Some(y) = solve_square(&rows, &rhs) else { continue };
                for (&f, v) in free.iter().zip(y) {
                    x[f] = v;
                }
                if lp.is_feasible(&x) {
                    let v = lp.value(&x);
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
    }
    best
}

fn knapsack_lp() -> impl Strategy<Value = KnapsackLp> {
    (1usize..=5, 1usize..=2).prop_flat_map(|(n, k)| {
        let terms = proptest::collection::vec((0i64..8, 0i64..8), n);
        let cons = proptest::collection::vec((proptest::collection::vec((0i64..6, 0i64..6), n), 0i64..20), k);
        (terms, cons).prop_map(|(obj, cons)| KnapsackLp {
            objective: obj.into_iter().map(|(a, b)| term(a, b)).collect(),
            constraints: cons
                .into_iter()
                .map(|(ts, bound)| SideConstraint {
                    terms: ts.into_iter().map(|(a, b)| term(a, b)).collect(),
                    bound: int(bound),
                })
                .collect(),
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extreme_point_matches_vertex_enumeration(lp in knapsack_lp()) {
        match (extreme_point_optimum(&lp), vertex_oracle(&lp)) {
            (Ok(v), Some(best)) => {
                prop_assert!(lp.is_feasible(&v.x));
                prop_assert_eq!(v.objective.clone(), best);
                prop_assert!(v.x.iter().filter(|x| is_fractional(x)).count() <= lp.constraints.len());
            }
            (Err(Error::LpInfeasible), None) => {}
            (got, want) => prop_assert!(false, "solver {:?} vs oracle {:?}", got.map(|v| v.objective), want),
        }
    }
}

/// Brute force over every map from clients to `open ∪ {out}`.
fn assignment_exists(nc: usize, open: &[usize], lower: &[u64], m: usize, reach: &dyn Fn(usize, usize) -> bool) -> bool {
    let base = open.len() + 1;
    let total = base.pow(nc as u32);
    (0..total).any(|code| {
        let mut load = vec![0u64; open.len()];
        let mut out = 0;
        let mut c = code;
        for j in 0..nc {
            let x = c % base;
            c /= base;
            if x == open.len() {
                out += 1;
            } else if reach(x, j) {
                load[x] += 1;
            } else {
                return false;
            }
        }
        out <= m && open.iter().zip(&load).all(|(&i, &l)| l >= lower[i])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_assignment_matches_enumeration(seed in 0u64..10_000, open_mask in 0u32..8, tau in 0i64..12, m in 0usize..3) {
        let spec = GenSpec { max_facilities: 3, max_clients: 5, max_lower: 3, max_k: 3, max_m: 0, geometry: Geometry::Line };
        let inst = gen_random(seed, &spec);
        let open: Vec<usize> = (0..inst.nf()).filter(|&i| open_mask >> i & 1 == 1).collect();
        let tau = int(tau);
        let reach = |x: usize, j: usize| *inst.c(open[x], j) <= tau;
        let got = assign_by_flow(&inst, &open, m, reach);
        let want = assignment_exists(inst.nc(), &open, inst.lower_bounds(), m, &reach);
        prop_assert_eq!(got.is_some(), want);
        if let Some(a) = got {
            let out = a.iter().filter(|x| **x == Assignment::Out).count();
            prop_assert!(out <= m);
            for (x, &i) in open.iter().enumerate() {
                let load = a.iter().filter(|y| **y == Assignment::Facility(i)).count() as u64;
                prop_assert!(load >= inst.lower_bound(i));
                for (j, y) in a.iter().enumerate() {
                    if *y == Assignment::Facility(i) {
                        prop_assert!(reach(x, j));
                    }
                }
            }
        }
    }

    #[test]
    fn bounded_flow_respects_bounds(arcs in proptest::collection::vec((0usize..5, 0usize..5, 0i64..3, 0i64..4), 1..10)) {
        let mut net = BoundedFlowNetwork::new(5, 0, 4);
        for &(u, v, lo, extra) in &arcs {
            if u != v {
                net.add_arc(u, v, lo, Some(lo + extra));
            }
        }
        if let Some(flow) = max_flow_with_lower_bounds(&net) {
            let mut balance = [0i64; 5];
            for (a, &f) in net.arcs.iter().zip(&flow.arc_flow) {
                prop_assert!(f >= a.lower && a.upper.is_none_or(|u| f <= u));
                balance[a.from] -= f;
                balance[a.to] += f;
            }
            prop_assert!(balance[1..4].iter().all(|&b| b == 0));
            prop_assert_eq!(balance[4], flow.value);
        }
    }
}

#[test]
fn fractional_vertex_example() {
    // min -x0 - x1 subject to 2x0 + 2x1 ≤ 3: one component is fractional.
    let lp = KnapsackLp {
        objective: vec![term(-1, 0), term(-1, 0)],
        constraints: vec![SideConstraint {
            terms: vec![term(2, 0), term(2, 0)],
            bound: int(3),
        }],
    };
    let v = extreme_point_optimum(&lp).unwrap();
    assert_eq!(v.objective, frac(-3, 2));
    assert_eq!(v.fractional, 1);
}
