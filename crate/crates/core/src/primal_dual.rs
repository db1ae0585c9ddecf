//! Dual ascent and pruning for the Lagrangian relaxation of k-ball selection.
//!
//! For a fixed price `z` per opened ball, the duals of all active residual
//! clients rise uniformly. A pair `(i,r)` becomes tight when
//! `Σ_{j ∈ B(i,r) ∩ D'} α_j = r + z`; its active clients then freeze. Event
//! times are solved exactly. The tight pairs are pruned greedily by
//! non-increasing radius to a non-intersecting set, and each survivor's radius
//! is expanded to swallow the tight balls it intersects.

use std::collections::BTreeMap;

use crate::audit::{self, Check};
use crate::error::{Error, Result};
use crate::guess::GuessContext;
use crate::instance::Pair;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualState {
    /// `α_j`, aligned with `ctx.residual_clients`.
    pub alpha: Vec<Rational>,
    pub z: Rational,
    /// `γ`, present in outlier mode.
    pub gamma: Option<Rational>,
    /// `T`, in tightening order.
    pub tight_pairs: Vec<Pair>,
    /// `f`, the pair whose tightening ended an outlier-mode ascent.
    pub last_tight: Option<Pair>,
    /// `Out`, in client index order (outlier mode).
    pub out_set: Vec<usize>,
}

impl DualState {
    pub fn alpha_sum(&self) -> Rational {
        self.alpha.iter().fold(rational::zero(), |a, b| a + b)
    }
}

/// How the outlier-mode pruning dealt with the last tight pair `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Absorb {
    /// `F'` already leaves at most `m` clients uncovered (also the non-outlier case).
    NotNeeded,
    /// The ball of this facility was grown to contain `B_f`.
    Grown(usize),
    /// `f` itself was added with `rad(i_f) = r_f`.
    Appended,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedOutput {
    /// `F`, sorted by facility.
    pub pairs: Vec<Pair>,
    /// `rad(i)` for every facility of `F`.
    pub rad: BTreeMap<usize, Rational>,
    pub dual: DualState,
    pub absorb: Absorb,
}

impl PrunedOutput {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn cost(&self) -> Rational {
        cost(&self.pairs)
    }

    /// `F ∖ f`: drops the appended last pair, if any.
    pub fn without_f(&self) -> Vec<Pair> {
        match (&self.absorb, &self.dual.last_tight) {
            (Absorb::Appended, Some(f)) => self.pairs.iter().filter(|p| p.facility != f.facility).cloned().collect(),
            _ => self.pairs.clone(),
        }
    }

    /// The rad pairs `{(i, rad(i))}`.
    pub fn rad_pairs(&self) -> Vec<Pair> {
        self.rad.iter().map(|(&i, r)| Pair::new(i, r.clone())).collect()
    }
}

pub fn cost<'a>(pairs: impl IntoIterator<Item = &'a Pair>) -> Rational {
    pairs.into_iter().fold(rational::zero(), |acc, p| acc + &p.radius)
}

struct Ascent {
    alpha: Vec<Rational>,
    tight: Vec<Pair>,
    last: Option<Pair>,
    time: Rational,
    active: Vec<bool>,
}

/// Raises duals until at most `stop_at` residual clients remain active.
fn ascend(ctx: &GuessContext<'_>, z: &Rational, stop_at: usize) -> Result<Ascent> {
    let nd = ctx.residual_clients.len();
    let pos: BTreeMap<usize, usize> = ctx.residual_clients.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let balls: Vec<Vec<usize>> = ctx
        .candidates
        .iter()
        .map(|p| ctx.residual_ball(p).iter().map(|j| pos[j]).collect())
        .collect();
    let mut alpha = vec![rational::zero(); nd];
    let mut active = vec![true; nd];
    let mut is_tight = vec![false; ctx.candidates.len()];
    let mut tight = Vec::new();
    let mut last = None;
    let mut time = rational::zero();
    let mut remaining = nd;
    while remaining > stop_at {
        let mut best: Option<Rational> = None;
        let mut ties: Vec<usize> = Vec::new();
        for (p, ball) in balls.iter().enumerate() {
            if is_tight[p] {
                continue;
            }
            let live = ball.iter().filter(|&&c| active[c]).count();
            if live == 0 {
                continue;
            }
            let frozen = ball
                .iter()
                .filter(|&&c| !active[c])
                .fold(rational::zero(), |acc, &c| acc + &alpha[c]);
            let t = (&ctx.candidates[p].radius + z - frozen) / rational::int(live as i64);
            match &best {
                Some(b) if t > *b => {}
                Some(b) if t == *b => ties.push(p),
                _ => {
                    best = Some(t);
                    ties = vec![p];
                }
            }
        }
        let Some(t) = best else {
            let j = (0..nd).find(|&c| active[c]).map(|c| ctx.residual_clients[c]).unwrap_or(0);
            return Err(Error::UncoverableClient(ctx.inst.client_id(j).to_string()));
        };
        time = t;
        for c in 0..nd {
            if active[c] {
                alpha[c] = time.clone();
            }
        }
        for p in ties {
            let pair = ctx.candidates[p].clone();
            log::trace!("t={} tight={}", rational::format(&time), ctx.inst.pair_label(&pair));
            is_tight[p] = true;
            for &c in &balls[p] {
                if active[c] {
                    active[c] = false;
                    remaining -= 1;
                }
            }
            tight.push(pair.clone());
            last = Some(pair);
            if stop_at > 0 && remaining <= stop_at {
                break;
            }
        }
    }
    Ok(Ascent {
        alpha,
        tight,
        last,
        time,
        active,
    })
}

/// Greedy non-intersecting subset `T_I` of `tight` (by non-increasing radius,
/// ties in pair order) and the expanded pairs `(i, r_i)`.
fn prune(ctx: &GuessContext<'_>, tight: &[Pair]) -> (BTreeMap<usize, Rational>, Vec<Pair>) {
    let inst = ctx.inst;
    let mut order: Vec<&Pair> = tight.iter().collect();
    order.sort_by(|a, b| b.radius.cmp(&a.radius).then_with(|| a.cmp(b)));
    let mut selected: Vec<&Pair> = Vec::new();
    for p in order {
        if selected.iter().all(|q| !inst.intersects(p, q)) {
            selected.push(p);
        }
    }
    let mut rad = BTreeMap::new();
    let mut pairs = Vec::new();
    for p in selected {
        let mut r_i = rational::zero();
        for q in tight {
            if q.radius <= p.radius && inst.intersects(p, q) {
                let r = inst.covering_radius(p.facility, inst.ball(q));
                if r > r_i {
                    r_i = r;
                }
            }
        }
        rad.insert(p.facility, p.radius.clone());
        pairs.push(Pair::new(p.facility, r_i));
    }
    pairs.sort();
    (rad, pairs)
}

/// The basic primal-dual routine: every residual client ends inside a tight ball.
pub fn pd_alg(ctx: &GuessContext<'_>, z: &Rational) -> Result<PrunedOutput> {
    for &j in &ctx.residual_clients {
        if !ctx.candidates.iter().any(|p| ctx.inst.c(p.facility, j) <= &p.radius) {
            return Err(Error::UncoverableClient(ctx.inst.client_id(j).to_string()));
        }
    }
    let ascent = ascend(ctx, z, 0)?;
    let (rad, pairs) = prune(ctx, &ascent.tight);
    let out = PrunedOutput {
        pairs,
        rad,
        dual: DualState {
            alpha: ascent.alpha,
            z: z.clone(),
            gamma: None,
            tight_pairs: ascent.tight,
            last_tight: None,
            out_set: Vec::new(),
        },
        absorb: Absorb::NotNeeded,
    };
    check_structure(ctx, &out, None)?;
    Ok(out)
}

/// The outlier variant: the ascent stops once at most `m` clients are active.
pub fn pd_alg_outlier(ctx: &GuessContext<'_>, z: &Rational, m: usize) -> Result<PrunedOutput> {
    let inst = ctx.inst;
    let nd = ctx.residual_clients.len();
    if nd <= m {
        let out = PrunedOutput {
            pairs: Vec::new(),
            rad: BTreeMap::new(),
            dual: DualState {
                alpha: vec![rational::zero(); nd],
                z: z.clone(),
                gamma: Some(rational::zero()),
                tight_pairs: Vec::new(),
                last_tight: None,
                out_set: ctx.residual_clients.clone(),
            },
            absorb: Absorb::NotNeeded,
        };
        check_structure(ctx, &out, Some(m))?;
        return Ok(out);
    }
    let ascent = ascend(ctx, z, m)?;
    let f = ascent.last.clone().expect("a nontrivial ascent tightens at least one pair");
    let without_f: Vec<Pair> = ascent.tight.iter().filter(|p| **p != f).cloned().collect();
    let (mut rad, mut pairs) = prune(ctx, &without_f);
    let mut absorb = Absorb::NotNeeded;
    if ctx.uncovered(&pairs).len() > m {
        let two_r_star = ctx.r_star.as_ref().map(|r| r * rational::int(2));
        let near = pairs
            .iter()
            .position(|p| two_r_star.as_ref().is_none_or(|b| inst.ff(p.facility, f.facility) <= b));
        let ball_f = inst.ball(&f);
        match near {
            Some(idx) => {
                let p = &mut pairs[idx];
                let grown = inst.covering_radius(p.facility, ball_f.iter().copied());
                if grown > p.radius {
                    p.radius = grown;
                }
                absorb = Absorb::Grown(p.facility);
            }
            None => {
                rad.insert(f.facility, f.radius.clone());
                pairs.push(f.clone());
                pairs.sort();
                absorb = Absorb::Appended;
            }
        }
    }
    // Out: uncov(T) plus a lexicographic fill from uncov(T ∖ f).
    let uncov_t: Vec<usize> = ctx
        .residual_clients
        .iter()
        .enumerate()
        .filter(|(c, _)| ascent.active[*c])
        .map(|(_, &j)| j)
        .collect();
    let uncov_without_f = ctx.uncovered(&without_f);
    let mut out_set = uncov_t.clone();
    for j in uncov_without_f {
        if out_set.len() >= m {
            break;
        }
        if !out_set.contains(&j) {
            out_set.push(j);
        }
    }
    out_set.sort_unstable();
    let out = PrunedOutput {
        pairs,
        rad,
        dual: DualState {
            alpha: ascent.alpha,
            z: z.clone(),
            gamma: Some(ascent.time),
            tight_pairs: ascent.tight,
            last_tight: Some(f),
            out_set,
        },
        absorb,
    };
    check_structure(ctx, &out, Some(m))?;
    Ok(out)
}

/// Structural guarantees of the pruned output that do not need the LP optimum.
fn check_structure(ctx: &GuessContext<'_>, out: &PrunedOutput, m: Option<usize>) -> Result<()> {
    let inst = ctx.inst;
    let d = &out.dual;
    let pos: BTreeMap<usize, usize> = ctx.residual_clients.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    for p in &d.tight_pairs {
        let lhs = ctx.residual_ball(p).iter().fold(rational::zero(), |acc, j| acc + &d.alpha[pos[j]]);
        audit::record(Check::PrunedStructure, lhs == &p.radius + &d.z, || {
            format!("tight pair {} has dual load {} ≠ r + z", inst.pair_label(p), rational::format(&lhs))
        })?;
    }
    let rads = out.rad_pairs();
    for (a, p) in rads.iter().enumerate() {
        for q in &rads[a + 1..] {
            audit::record(Check::PrunedStructure, !inst.intersects(p, q), || {
                format!("rad pairs {} and {} intersect", inst.pair_label(p), inst.pair_label(q))
            })?;
        }
    }
    for p in &out.pairs {
        let rad = &out.rad[&p.facility];
        let mut ok = *rad <= p.radius;
        if let Some(r) = &ctx.r_star {
            ok &= p.radius <= r * rational::int(3);
        }
        audit::record(Check::PrunedStructure, ok, || {
            format!("radius of {} outside [rad(i), 3R*]", inst.pair_label(p))
        })?;
    }
    let uncovered = ctx.uncovered(&out.pairs).len();
    match m {
        None => audit::record(Check::PrunedStructure, uncovered == 0, || format!("{uncovered} residual clients uncovered")),
        Some(m) => {
            let gamma = d.gamma.clone().unwrap_or_else(rational::zero);
            audit::record(Check::PrunedStructure, d.alpha.iter().all(|a| *a <= gamma), || "some α exceeds γ".into())?;
            audit::record(Check::PrunedStructure, uncovered <= m, || {
                format!("{uncovered} residual clients uncovered with budget {m}")
            })?;
            if let Some(f) = &d.last_tight {
                let without_f: Vec<Pair> = d.tight_pairs.iter().filter(|p| *p != f).cloned().collect();
                let lower = ctx.uncovered(&d.tight_pairs);
                let upper = ctx.uncovered(&without_f);
                let ok = d.out_set.len() == m
                    && lower.iter().all(|j| d.out_set.contains(j))
                    && d.out_set.iter().all(|j| upper.contains(j));
                audit::record(Check::PrunedStructure, ok, || "Out is not sandwiched between uncov(T) and uncov(T∖f)".into())?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
pub enum LmpMode {
    Plain,
    Outlier { m: usize, r_star: Rational },
}

/// The Lagrangian-multiplier-preserving inequality chain:
/// plain: `cost(F) + 3|F|z ≤ 3Σα ≤ 3(OPT + k'z)`;
/// outlier: `cost(F∖f) + 3|F∖f|z − 3R* ≤ 3(Σα − mγ) ≤ 3(OPT + k'z)`.
pub fn check_lmp(out: &PrunedOutput, k_prime: usize, lp_opt: &Rational, mode: &LmpMode) -> bool {
    let three = rational::int(3);
    let z = &out.dual.z;
    let rhs = &three * (lp_opt + rational::int(k_prime as i64) * z);
    match mode {
        LmpMode::Plain => {
            let lhs = out.cost() + &three * rational::int(out.len() as i64) * z;
            let mid = &three * out.dual.alpha_sum();
            lhs <= mid && mid <= rhs
        }
        LmpMode::Outlier { m, r_star } => {
            let kept = out.without_f();
            let lhs = cost(&kept) + &three * rational::int(kept.len() as i64) * z - &three * r_star;
            let gamma = out.dual.gamma.clone().unwrap_or_else(rational::zero);
            let mid = &three * (out.dual.alpha_sum() - rational::int(*m as i64) * gamma);
            lhs <= mid && mid <= rhs
        }
    }
}

/// `z = 2·n·k'·c_max`, at which the outlier routine opens at most `k'` balls.
pub fn saturating_price(ctx: &GuessContext<'_>) -> Rational {
    rational::int(2 * ctx.n() as i64 * ctx.k_prime as i64) * ctx.inst.c_max()
}

/// Whether every residual client is inside some ball of `pairs`.
pub fn covers_residual(ctx: &GuessContext<'_>, pairs: &[Pair]) -> bool {
    ctx.uncovered(pairs).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::rational::{frac, int};

    /// One facility at 0 with clients at 0 and 2.
    fn e3() -> Instance {
        Instance::on_line(&[("i", 0, 1)], &[("j1", 0), ("j2", 2)], 1, 0)
    }

    fn ctx(inst: &Instance) -> GuessContext<'_> {
        GuessContext::residual(inst, vec![0, 1], inst.candidate_pairs(), 1, Some(int(2)))
    }

    #[test]
    fn e3_zero_price() {
        let inst = e3();
        let out = pd_alg(&ctx(&inst), &int(0)).unwrap();
        assert_eq!(out.dual.tight_pairs, vec![Pair::new(0, int(0)), Pair::new(0, int(2))]);
        assert_eq!(out.pairs, vec![Pair::new(0, int(2))]);
        assert_eq!(out.rad[&0], int(2));
        assert_eq!(out.dual.alpha, vec![int(0), int(2)]);
        assert!(check_lmp(&out, 1, &int(2), &LmpMode::Plain));
    }

    #[test]
    fn e3_high_price() {
        let inst = e3();
        let out = pd_alg(&ctx(&inst), &int(5)).unwrap();
        assert_eq!(out.dual.tight_pairs[0], Pair::new(0, int(2)));
        assert_eq!(out.dual.alpha, vec![frac(7, 2), frac(7, 2)]);
        assert_eq!(out.pairs, vec![Pair::new(0, int(2))]);
        // 2 + 15 ≤ 21 ≤ 3(2 + 5).
        assert!(check_lmp(&out, 1, &int(2), &LmpMode::Plain));
    }

    #[test]
    fn inflated_radius_fails_lmp() {
        let inst = e3();
        let mut out = pd_alg(&ctx(&inst), &int(5)).unwrap();
        out.pairs[0].radius = int(10);
        assert!(!check_lmp(&out, 1, &int(2), &LmpMode::Plain));
    }

    #[test]
    fn empty_residual() {
        let inst = e3();
        let c = GuessContext::residual(&inst, vec![], inst.candidate_pairs(), 1, Some(int(2)));
        let out = pd_alg(&c, &int(1)).unwrap();
        assert!(out.is_empty());
        assert!(out.dual.alpha.is_empty());
    }

    #[test]
    fn outlier_trivial_budget() {
        let inst = e3();
        let out = pd_alg_outlier(&ctx(&inst), &int(0), 2).unwrap();
        assert!(out.is_empty());
        assert_eq!(out.dual.gamma, Some(int(0)));
        assert_eq!(out.dual.out_set, vec![0, 1]);
    }

    #[test]
    fn outlier_single_budget() {
        let inst = e3();
        let out = pd_alg_outlier(&ctx(&inst), &int(0), 1).unwrap();
        let f = Pair::new(0, int(0));
        assert_eq!(out.dual.tight_pairs, vec![f.clone()]);
        assert_eq!(out.dual.last_tight, Some(f.clone()));
        assert_eq!(out.pairs, vec![f]);
        assert_eq!(out.absorb, Absorb::Appended);
        assert_eq!(out.dual.out_set, vec![1]);
        assert_eq!(out.dual.gamma, Some(int(0)));
        assert!(check_lmp(&out, 1, &int(0), &LmpMode::Outlier { m: 1, r_star: int(2) }));
    }

    #[test]
    fn uncoverable_client_errors() {
        let inst = e3();
        let c = GuessContext::residual(&inst, vec![0, 1], vec![Pair::new(0, int(0))], 1, Some(int(0)));
        assert!(matches!(pd_alg(&c, &int(0)), Err(Error::UncoverableClient(_))));
    }
}
