//! Combining an outlier-mode bracket.
//!
//! The merge combination joins stars like the plain combination but may leave
//! lower-price pairs unclustered; a two-constraint covering-knapsack LP keeps
//! both the ball count and the number of uncovered clients in budget.
//! The swap combination handles large `z₁`: it starts from `F₁ ∖ f₁` and swaps in
//! upper-price pairs one by one until few enough clients are uncovered.

use std::collections::BTreeMap;

use super::combine::{basic_representative_radius, cheaper, rad_subset, StarDecomposition};
use super::search::{BracketPair, Delta, DeltaSource};
use super::{r_cap, KbsResult, Route};
use crate::audit::{self, Check};
use crate::error::{Error, Result};
use crate::guess::GuessContext;
use crate::instance::Pair;
use crate::lp::knapsack::{extreme_point_optimum, is_fractional, AffineTerm, KnapsackLp, SideConstraint};
use crate::primal_dual::{cost, Absorb};
use crate::rational::{self, Rational};

fn count(n: usize) -> Rational {
    rational::int(n as i64)
}

/// First pair of `pairs` whose ball holds `j`.
fn owner(ctx: &GuessContext<'_>, pairs: &[Pair], j: usize) -> Option<usize> {
    pairs.iter().position(|p| ctx.inst.c(p.facility, j) <= &p.radius)
}

/// Rounds an extreme point of the two-constraint LP to an integral point.
///
/// Rounds everything up, except when exactly two fractional entries both
/// contribute only their own value to the ball count and together less than
/// two: then the one with the larger outlier coefficient becomes 1 and the
/// other 0.
fn round_two_constraint(lp: &KnapsackLp, x: &[Rational], ceil_only: &[bool]) -> Vec<Rational> {
    let frac: Vec<usize> = (0..x.len()).filter(|&v| is_fractional(&x[v])).collect();
    let size = &lp.constraints[0];
    let l_star = frac.iter().fold(rational::zero(), |acc, &v| acc + size.terms[v].eval(&x[v]));
    let mut out: Vec<Rational> = x.to_vec();
    if l_star >= rational::int(2) || frac.len() <= 1 || frac.iter().any(|&v| ceil_only[v]) {
        for v in &frac {
            out[*v] = x[*v].ceil();
        }
        return out;
    }
    let outbound = &lp.constraints[1];
    let weight = |v: usize| &outbound.terms[v].when_zero - &outbound.terms[v].when_one;
    let (a, b) = (frac[0], frac[1]);
    let (up, down) = if weight(b) > weight(a) { (b, a) } else { (a, b) };
    out[up] = rational::one();
    out[down] = rational::zero();
    out
}

/// Merge combination with a covering-knapsack rounding step.
pub fn combine_outliers_a(ctx: &GuessContext<'_>, bracket: &BracketPair, m: usize) -> Result<KbsResult> {
    let inst = ctx.inst;
    let f1 = &bracket.lo.pairs;
    let f2 = &bracket.hi.pairs;
    let rad1 = &bracket.lo.rad;
    let rad2 = &bracket.hi.rad;
    let uc1 = ctx.uncovered(f1);
    let uc2 = ctx.uncovered(f2);
    let both = uc1.iter().filter(|j| uc2.binary_search(j).is_ok()).count();
    let stars = StarDecomposition::build(f1.len(), f2.len(), |p, c| inst.intersects(&f1[p], &f2[c]));
    let mut uc1_of = vec![0usize; f2.len()];
    for &j in uc1.iter().filter(|j| uc2.binary_search(j).is_err()) {
        if let Some(c) = owner(ctx, f2, j) {
            uc1_of[c] += 1;
        }
    }
    let mut uc2_of = vec![0usize; f1.len()];
    for &j in uc2.iter().filter(|j| uc1.binary_search(j).is_err()) {
        if let Some(p) = owner(ctx, f1, j) {
            uc2_of[p] += 1;
        }
    }
    let two = rational::int(2);
    let q_pairs = &stars.unmatched;
    let mut objective = Vec::new();
    let mut size = Vec::new();
    let mut outbound = Vec::new();
    let mut ceil_only = Vec::new();
    for (c, centre) in f2.iter().enumerate() {
        let members = stars.stars[c].iter().fold(rational::zero(), |acc, &p| acc + &f1[p].radius);
        objective.push(AffineTerm::new(&two * &centre.radius + &two * &members, members));
        size.push(AffineTerm::new(rational::one(), count(stars.stars[c].len())));
        outbound.push(AffineTerm::new(rational::zero(), count(uc1_of[c])));
        ceil_only.push(!stars.stars[c].is_empty());
    }
    for &p in q_pairs {
        objective.push(AffineTerm::new(f1[p].radius.clone(), rational::zero()));
        size.push(AffineTerm::new(rational::one(), rational::zero()));
        outbound.push(AffineTerm::new(rational::zero(), count(uc2_of[p])));
        ceil_only.push(false);
    }
    let lp = KnapsackLp {
        objective,
        constraints: vec![
            SideConstraint {
                terms: size,
                bound: count(ctx.k_prime),
            },
            SideConstraint {
                terms: outbound,
                bound: rational::int(m as i64 - both as i64),
            },
        ],
    };
    let vertex = extreme_point_optimum(&lp)?;
    let rounded = round_two_constraint(&lp, &vertex.x, &ceil_only);
    let rounded_value = lp.value(&rounded);
    audit::record(Check::Rounding, lp.is_feasible(&rounded), || "rounded point violates the two-constraint LP".into())?;
    if let Some(r) = &ctx.r_star {
        let bound = &vertex.objective + rational::int(30) * r;
        audit::record(Check::Rounding, rounded_value <= bound, || {
            format!("rounded objective {} exceeds LP optimum plus 30R*", rational::format(&rounded_value))
        })?;
    }
    let one = rational::one();
    // F'': kept stars, merged representatives and chosen unclustered pairs.
    let mut base: Vec<(Pair, Rational)> = Vec::new();
    for (c, centre) in f2.iter().enumerate() {
        let members: Vec<&Pair> = stars.stars[c].iter().map(|&p| &f1[p]).collect();
        if members.is_empty() {
            continue;
        }
        if rounded[c] == one {
            let mut best = (0, basic_representative_radius(&centre.radius, &members, 0));
            for x in 1..members.len() {
                let r = basic_representative_radius(&centre.radius, &members, x);
                if r < best.1 {
                    best = (x, r);
                }
            }
            let f = members[best.0].facility;
            base.push((Pair::new(f, best.1), rad1[&f].clone()));
        } else {
            base.extend(members.iter().map(|p| ((*p).clone(), rad1[&p.facility].clone())));
        }
    }
    for (x, &p) in q_pairs.iter().enumerate() {
        if rounded[f2.len() + x] == one {
            base.push((f1[p].clone(), rad1[&f1[p].facility].clone()));
        }
    }
    base.sort();
    let mut grown: Vec<Rational> = base.iter().map(|(p, _)| p.radius.clone()).collect();
    let mut extra: Vec<(Pair, Rational)> = Vec::new();
    for (c, centre) in f2.iter().enumerate() {
        if !stars.stars[c].is_empty() || rounded[c] != one {
            continue;
        }
        match base.iter().position(|(p, _)| inst.intersects(centre, p)) {
            Some(x) => grown[x] += &two * &centre.radius,
            None => extra.push((centre.clone(), rad2[&centre.facility].clone())),
        }
    }
    let mut merged: Vec<(Pair, Rational)> = base
        .into_iter()
        .zip(grown)
        .map(|((p, rad), r)| (Pair::new(p.facility, r), rad))
        .chain(extra)
        .collect();
    merged.sort();
    let pairs: Vec<Pair> = merged.iter().map(|(p, _)| p.clone()).collect();
    let rad: BTreeMap<usize, Rational> = merged.into_iter().map(|(p, r)| (p.facility, r)).collect();
    audit::record(Check::Rounding, cost(&pairs) <= rounded_value, || "subroutine A pays more than its rounded objective".into())?;
    let uncovered = ctx.uncovered(&pairs).len();
    audit::record(Check::Combination, uncovered <= m && pairs.len() <= ctx.k_prime, || {
        format!("subroutine A leaves {uncovered} uncovered with {} balls", pairs.len())
    })?;
    Ok(cheaper(pairs, rad, f2.clone(), rad2.clone(), Route::OutlierA))
}

/// The two direct repairs tried when `F₁` is one ball over budget: enlarge
/// one ball of `F₁ ∖ f₁` by `12R*`, or merge two balls whose centres are
/// within `12R*`.
pub fn simple_cases(ctx: &GuessContext<'_>, bracket: &BracketPair, m: usize) -> Option<KbsResult> {
    let inst = ctx.inst;
    let f1 = &bracket.lo.pairs;
    let rad1 = &bracket.lo.rad;
    let twelve = rational::int(12) * r_cap(ctx);
    let kept = bracket.lo.without_f();
    let finish = |mut pairs: Vec<Pair>| {
        pairs.sort();
        let rad = rad_subset(&pairs, rad1);
        KbsResult {
            pairs,
            rad,
            route: Route::OutlierSimple,
        }
    };
    for (x, p) in kept.iter().enumerate() {
        let mut pairs = kept.clone();
        pairs[x] = Pair::new(p.facility, &p.radius + &twelve);
        if ctx.uncovered(&pairs).len() <= m {
            return Some(finish(pairs));
        }
    }
    for (a, pa) in f1.iter().enumerate() {
        for (b, pb) in f1.iter().enumerate() {
            if a == b || *inst.ff(pa.facility, pb.facility) > twelve {
                continue;
            }
            let reach = ctx
                .residual_ball(pb)
                .into_iter()
                .map(|j| inst.c(pa.facility, j).clone())
                .fold(pa.radius.clone(), |acc, d| if d > acc { d } else { acc });
            let mut pairs: Vec<Pair> = f1.iter().enumerate().filter(|(x, _)| *x != a && *x != b).map(|(_, p)| p.clone()).collect();
            pairs.push(Pair::new(pa.facility, reach));
            return Some(finish(pairs));
        }
    }
    None
}

/// Swap combination. Returns `None` when the lower-price solution does not have
/// the one-ball-over shape it needs, or when the bracket violates the
/// one-intersection structure and the price is too low for that to be a
/// contradiction.
pub fn combine_outliers_b(
    ctx: &GuessContext<'_>,
    bracket: &BracketPair,
    m: usize,
    lp_opt: &Rational,
    epsilon: &Rational,
    delta: &Delta,
) -> Result<Option<KbsResult>> {
    let inst = ctx.inst;
    let k = ctx.k_prime;
    if bracket.k1() != k + 1 || bracket.lo.absorb != Absorb::Appended {
        return Err(Error::Precondition(format!(
            "subroutine B needs |F1| = k'+1 with f1 appended, got |F1| = {}",
            bracket.k1()
        )));
    }
    let one = rational::one();
    let strict = delta.source == DeltaSource::Formula && bracket.z_lo > (&one + epsilon) * lp_opt;
    let f1 = bracket.lo.without_f();
    let f2 = &bracket.hi.pairs;
    let rad1 = &bracket.lo.rad;
    let rad2 = &bracket.hi.rad;
    let z1 = &bracket.z_lo;
    let dual = &bracket.lo.dual;
    let slack = rational::pow2(ctx.n()) * &delta.value;
    let pos: BTreeMap<usize, usize> = ctx.residual_clients.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let gamma = dual.gamma.clone().unwrap_or_else(rational::zero);
    let almost_tight = |p: &Pair| {
        let s = ctx.residual_ball(p).iter().fold(rational::zero(), |acc, j| acc + &dual.alpha[pos[j]]);
        s >= &p.radius + z1 - &slack
    };
    let almost_out: Vec<usize> = ctx
        .residual_clients
        .iter()
        .enumerate()
        .filter(|(p, _)| dual.alpha[*p] >= &gamma - &slack)
        .map(|(_, &j)| j)
        .collect();

    // ψ: intersecting pairs first, then a greedy matching of the rest.
    let mut psi: Vec<Option<usize>> = vec![None; f2.len()];
    let mut used = vec![false; f1.len()];
    let mut violation = None;
    for (c, q) in f2.iter().enumerate() {
        let hits: Vec<usize> = (0..f1.len()).filter(|&p| inst.intersects(q, &f1[p])).collect();
        match hits.as_slice() {
            [] => {}
            [p] if !used[*p] => {
                used[*p] = true;
                psi[c] = Some(*p);
            }
            _ => {
                violation = Some(format!("{} meets {} lower-price balls or shares one", inst.pair_label(q), hits.len()));
                break;
            }
        }
    }
    if let Some(detail) = violation {
        if strict {
            audit::record(Check::IntersectionBound, false, || detail)?;
        }
        return Ok(None);
    }
    audit::record(Check::IntersectionBound, true, String::new)?;
    let in_m: Vec<bool> = psi.iter().map(Option::is_some).collect();
    for slot in psi.iter_mut().filter(|s| s.is_none()) {
        let Some(p) = used.iter().position(|u| !u) else {
            return Err(Error::invariant("psi-matching", "too few lower-price balls to match"));
        };
        used[p] = true;
        *slot = Some(p);
    }
    let psi: Vec<usize> = psi.into_iter().map(|s| s.expect("every pair matched")).collect();

    // Current solution keyed by facility: (ball, rad).
    let mut current: BTreeMap<usize, (Pair, Rational)> = f1.iter().map(|p| (p.facility, (p.clone(), rad1[&p.facility].clone()))).collect();
    let snapshot = |cur: &BTreeMap<usize, (Pair, Rational)>| -> Vec<Pair> { cur.values().map(|(p, _)| p.clone()).collect() };
    let three_eps = rational::int(3) * epsilon;
    let r_star = r_cap(ctx);
    let check_swap_state = |cur: &BTreeMap<usize, (Pair, Rational)>| -> Result<()> {
        let balls = snapshot(cur);
        let t_f: Vec<Pair> = cur.values().map(|(p, r)| Pair::new(p.facility, r.clone())).collect();
        audit::record(Check::SwapBound, t_f.iter().all(almost_tight), || "a swapped-in rad pair is not almost tight".into())?;
        let free = almost_out
            .iter()
            .filter(|&&j| !balls.iter().any(|p| inst.c(p.facility, j) <= &p.radius))
            .count();
        if balls.len() >= k && free >= m {
            let lhs = cost(&t_f) + count(balls.len()) * z1;
            let rhs = dual.alpha_sum() - count(m) * &gamma + count(m + ctx.residual_clients.len()) * &slack;
            audit::record(Check::SwapBound, lhs <= rhs, || "swap-state rad cost exceeds the dual bound".into())?;
        }
        Ok(())
    };
    check_swap_state(&current)?;
    let finish = |cur: BTreeMap<usize, (Pair, Rational)>| -> Result<Option<KbsResult>> {
        let pairs: Vec<Pair> = cur.values().map(|(p, _)| p.clone()).collect();
        if strict {
            let bound = (rational::int(9) + &three_eps) * lp_opt + rational::int(18) * &r_star;
            audit::record(Check::OutlierBounds, cost(&pairs) <= bound, || "swap result exceeds (9+3ε)OPT + 18R*".into())?;
        }
        let rad = cur.into_iter().map(|(i, (_, r))| (i, r)).collect();
        Ok(Some(KbsResult {
            pairs,
            rad,
            route: Route::OutlierB,
        }))
    };
    if ctx.uncovered(&snapshot(&current)).len() <= m {
        return finish(current);
    }
    for (c, q) in f2.iter().enumerate() {
        let out = &f1[psi[c]];
        if out.radius >= q.radius {
            continue;
        }
        current.remove(&out.facility);
        let ball = if in_m[c] {
            Pair::new(q.facility, &q.radius + rational::int(2) * &out.radius)
        } else {
            q.clone()
        };
        current.insert(q.facility, (ball, rad2[&q.facility].clone()));
        check_swap_state(&current)?;
        if ctx.uncovered(&snapshot(&current)).len() <= m {
            return finish(current);
        }
    }
    if strict {
        let bound = (rational::int(3) + &three_eps) * lp_opt + rational::int(9) * &r_star;
        audit::record(Check::OutlierBounds, cost(f2) <= bound, || "upper-price cost exceeds (3+3ε)OPT + 9R*".into())?;
    }
    Ok(Some(KbsResult {
        pairs: f2.clone(),
        rad: rad2.clone(),
        route: Route::UpperSide,
    }))
}
