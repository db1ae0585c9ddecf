//! Combining the two sides of a bracket when no single price hits `k'`.
//!
//! Every `F₁` pair is attached to an intersecting `F₂` pair, forming stars.
//! A covering-knapsack LP decides per star whether to keep all its members or
//! replace them by one enlarged representative; the LP has one side
//! constraint, so its optimal vertex has at most one fractional entry, which
//! is rounded up.

use std::collections::BTreeMap;

use super::search::BracketPair;
use super::{KbsResult, Route};
use crate::audit::{self, Check};
use crate::error::{Error, Result};
use crate::guess::GuessContext;
use crate::instance::Pair;
use crate::lp::knapsack::{ceil_all, extreme_point_optimum, AffineTerm, KnapsackLp, SideConstraint};
use crate::primal_dual::cost;
use crate::rational::{self, Rational};

/// Star decomposition: `pi[p]` is the index into `centres` of the star holding
/// `F₁` pair `p`, or `None` when no centre qualifies.
#[derive(Debug, Clone)]
pub struct StarDecomposition {
    pub pi: Vec<Option<usize>>,
    pub stars: Vec<Vec<usize>>,
    pub unmatched: Vec<usize>,
}

impl StarDecomposition {
    /// Attaches each of `n1` pairs to the first centre accepted by `meets`.
    pub fn build(n1: usize, n2: usize, meets: impl Fn(usize, usize) -> bool) -> Self {
        let mut pi = vec![None; n1];
        let mut stars = vec![Vec::new(); n2];
        let mut unmatched = Vec::new();
        for (p, slot) in pi.iter_mut().enumerate() {
            match (0..n2).find(|&c| meets(p, c)) {
                Some(c) => {
                    *slot = Some(c);
                    stars[c].push(p);
                }
                None => unmatched.push(p),
            }
        }
        StarDecomposition { pi, stars, unmatched }
    }
}

fn sum(values: impl IntoIterator<Item = Rational>) -> Rational {
    values.into_iter().fold(rational::zero(), |a, b| a + b)
}

/// Merged radius of representative `rep` of a star around a centre of radius
/// `r`: `2r + r' + 2·max` over the other members' radii.
pub fn basic_representative_radius(centre: &Rational, members: &[&Pair], rep: usize) -> Rational {
    let others = members
        .iter()
        .enumerate()
        .filter(|(x, _)| *x != rep)
        .map(|(_, p)| p.radius.clone())
        .max()
        .unwrap_or_else(rational::zero);
    rational::int(2) * centre + &members[rep].radius + rational::int(2) * others
}

/// Picks the member minimizing `radius_of`, ties to the first.
fn best_representative(n: usize, radius_of: impl Fn(usize) -> Rational) -> (usize, Rational) {
    let mut best = (0, radius_of(0));
    for x in 1..n {
        let r = radius_of(x);
        if r < best.1 {
            best = (x, r);
        }
    }
    best
}

fn check_fractional_rounding(ctx: &GuessContext<'_>, materialized: &Rational, lp_value: &Rational, per_pair: i64) -> Result<()> {
    if let Some(r) = &ctx.r_star {
        let bound = lp_value + rational::int(per_pair) * r;
        audit::record(Check::Rounding, *materialized <= bound, || {
            format!(
                "materialized cost {} exceeds LP value plus {per_pair}R*",
                rational::format(materialized)
            )
        })?;
    }
    Ok(())
}

/// Basic combination: stars by ball intersection, representative radius
/// `2r + r' + 2·max r''`.
pub fn combine_basic(ctx: &GuessContext<'_>, bracket: &BracketPair) -> Result<KbsResult> {
    let inst = ctx.inst;
    let f1 = &bracket.lo.pairs;
    let f2 = &bracket.hi.pairs;
    let stars = StarDecomposition::build(f1.len(), f2.len(), |p, c| inst.intersects(&f1[p], &f2[c]));
    if let Some(&p) = stars.unmatched.first() {
        return Err(Error::invariant(
            "star-cover",
            format!("{} meets no pair of the upper-price solution", inst.pair_label(&f1[p])),
        ));
    }
    let two = rational::int(2);
    let mut objective = Vec::with_capacity(f2.len());
    let mut size = Vec::with_capacity(f2.len());
    for (c, centre) in f2.iter().enumerate() {
        let members = sum(stars.stars[c].iter().map(|&p| f1[p].radius.clone()));
        objective.push(AffineTerm::new(&two * &centre.radius + &two * &members, members));
        size.push(AffineTerm::new(rational::one(), rational::int(stars.stars[c].len() as i64)));
    }
    let lp = KnapsackLp {
        objective,
        constraints: vec![SideConstraint {
            terms: size,
            bound: rational::int(ctx.k_prime as i64),
        }],
    };
    let vertex = extreme_point_optimum(&lp)?;
    let x = ceil_all(&vertex.x);
    let mut pairs = Vec::new();
    for (c, centre) in f2.iter().enumerate() {
        let members: Vec<&Pair> = stars.stars[c].iter().map(|&p| &f1[p]).collect();
        if members.is_empty() {
            continue;
        }
        if x[c] == rational::zero() {
            pairs.extend(members.iter().map(|p| (*p).clone()));
        } else {
            let (rep, radius) = best_representative(members.len(), |r| basic_representative_radius(&centre.radius, &members, r));
            pairs.push(Pair::new(members[rep].facility, radius));
        }
    }
    pairs.sort();
    check_fractional_rounding(ctx, &cost(&pairs), &vertex.objective, 15)?;
    let rad = rad_subset(&pairs, &bracket.lo.rad);
    Ok(cheaper(pairs, rad, f2.clone(), bracket.hi.rad.clone(), Route::Basic))
}

/// `rad` restricted to the facilities of `pairs`.
pub(crate) fn rad_subset(pairs: &[Pair], rad: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
    pairs.iter().map(|p| (p.facility, rad[&p.facility].clone())).collect()
}

/// Keeps `F₂` when it is no more expensive than the merged solution.
pub(crate) fn cheaper(
    merged: Vec<Pair>,
    merged_rad: BTreeMap<usize, Rational>,
    f2: Vec<Pair>,
    rad2: BTreeMap<usize, Rational>,
    route: Route,
) -> KbsResult {
    if cost(&f2) <= cost(&merged) {
        KbsResult {
            pairs: f2,
            rad: rad2,
            route: Route::UpperSide,
        }
    } else {
        KbsResult {
            pairs: merged,
            rad: merged_rad,
            route,
        }
    }
}

/// Improved combination: `F₂` is first padded with non-intersecting rad pairs
/// of `F₁`; stars are formed by rad-pair intersection and merged with radius
/// `max{r', 2rad₂(i) + rad₁(i') + 4·max rad₁(i'')}`, which the LP bounds by
/// `2rad₂(i) + Σ 4rad₁`.
pub fn combine_improved(ctx: &GuessContext<'_>, bracket: &BracketPair) -> Result<KbsResult> {
    let inst = ctx.inst;
    let k = ctx.k_prime;
    let f1 = &bracket.lo.pairs;
    let rad1 = &bracket.lo.rad;
    let mut f2 = bracket.hi.pairs.clone();
    let mut rad2 = bracket.hi.rad.clone();
    for p in f1 {
        if f2.len() >= k {
            break;
        }
        let rp = Pair::new(p.facility, rad1[&p.facility].clone());
        let clear = rad2.iter().all(|(&i, r)| !inst.intersects(&rp, &Pair::new(i, r.clone())));
        if clear {
            rad2.insert(p.facility, rp.radius.clone());
            f2.push(p.clone());
        }
    }
    f2.sort();
    if f2.len() == k {
        return Ok(KbsResult {
            pairs: f2,
            rad: rad2,
            route: Route::Augmented,
        });
    }
    let rad_of = |map: &BTreeMap<usize, Rational>, p: &Pair| Pair::new(p.facility, map[&p.facility].clone());
    let stars = StarDecomposition::build(f1.len(), f2.len(), |p, c| {
        inst.intersects(&rad_of(rad1, &f1[p]), &rad_of(&rad2, &f2[c]))
    });
    if let Some(&p) = stars.unmatched.first() {
        return Err(Error::invariant(
            "star-cover",
            format!("rad pair of {} meets no padded upper-side rad pair", inst.pair_label(&f1[p])),
        ));
    }
    let (two, three, four) = (rational::int(2), rational::int(3), rational::int(4));
    let mut objective = Vec::with_capacity(f2.len());
    let mut size = Vec::with_capacity(f2.len());
    for (c, centre) in f2.iter().enumerate() {
        let members = sum(stars.stars[c].iter().map(|&p| rad1[&f1[p].facility].clone()));
        objective.push(AffineTerm::new(&two * &rad2[&centre.facility] + &four * &members, &three * &members));
        size.push(AffineTerm::new(rational::one(), rational::int(stars.stars[c].len() as i64)));
    }
    let lp = KnapsackLp {
        objective,
        constraints: vec![SideConstraint {
            terms: size,
            bound: rational::int(k as i64),
        }],
    };
    let vertex = extreme_point_optimum(&lp)?;
    let x = ceil_all(&vertex.x);
    let mut pairs = Vec::new();
    for (c, centre) in f2.iter().enumerate() {
        let members: Vec<&Pair> = stars.stars[c].iter().map(|&p| &f1[p]).collect();
        if members.is_empty() {
            continue;
        }
        if x[c] == rational::zero() {
            pairs.extend(members.iter().map(|p| (*p).clone()));
        } else {
            let centre_rad = &rad2[&centre.facility];
            let (rep, radius) = best_representative(members.len(), |r| {
                improved_representative_radius(centre_rad, &members, rad1, r)
            });
            pairs.push(Pair::new(members[rep].facility, radius));
        }
    }
    pairs.sort();
    check_fractional_rounding(ctx, &cost(&pairs), &vertex.objective, 7)?;
    let rad = rad_subset(&pairs, rad1);
    Ok(cheaper(pairs, rad, f2, rad2, Route::Improved))
}

/// `max{r', 2·rad₂(i) + rad₁(i') + 4·max_{i'' ≠ i'} rad₁(i'')}` for representative `rep`.
pub fn improved_representative_radius(
    centre_rad: &Rational,
    members: &[&Pair],
    rad1: &BTreeMap<usize, Rational>,
    rep: usize,
) -> Rational {
    let own = &members[rep];
    let others = members
        .iter()
        .enumerate()
        .filter(|(x, _)| *x != rep)
        .map(|(_, p)| rad1[&p.facility].clone())
        .max();
    match others {
        None => own.radius.clone(),
        Some(o) => {
            let merged = rational::int(2) * centre_rad + &rad1[&own.facility] + rational::int(4) * o;
            rational::max(&merged, &own.radius).clone()
        }
    }
}
