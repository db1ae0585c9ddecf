//! Binary search over the ball price `z`.

use crate::audit::{self, Check};
use crate::error::{Error, Result};
use crate::guess::GuessContext;
use crate::kbs::r_cap;
use crate::primal_dual::{check_lmp, pd_alg, pd_alg_outlier, saturating_price, LmpMode, PrunedOutput};
use crate::rational::{self, Rational};

/// Two primal-dual runs at prices `z_lo ≤ z_hi` straddling the budget:
/// `|F_lo| > k' ≥ |F_hi|`.
#[derive(Debug, Clone)]
pub struct BracketPair {
    pub z_lo: Rational,
    pub lo: PrunedOutput,
    pub z_hi: Rational,
    pub hi: PrunedOutput,
    pub delta_z: Rational,
    pub iterations: usize,
}

impl BracketPair {
    pub fn k1(&self) -> usize {
        self.lo.len()
    }

    pub fn k2(&self) -> usize {
        self.hi.len()
    }

    /// Convex weights `(a, b)` with `a + b = 1` and `a·k1 + b·k2 = k'`.
    pub fn weights(&self, k_prime: usize) -> (Rational, Rational) {
        let (k1, k2, k) = (self.k1() as i64, self.k2() as i64, k_prime as i64);
        let span = rational::int(k1 - k2);
        (rational::int(k - k2) / &span, rational::int(k1 - k) / span)
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SearchOutcome {
    /// A single run already satisfies the budget.
    Early(PrunedOutput),
    Bracket(BracketPair),
}

/// Where `δ_z` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSource {
    /// The formula scaled by the LP optimum.
    Formula,
    /// The LP optimum is zero; `R*` stands in for it.
    ZeroOptimum,
    /// Supplied by the caller.
    Override,
}

#[derive(Debug, Clone)]
pub struct Delta {
    pub value: Rational,
    pub source: DeltaSource,
}

/// `δ_z = ε·OPT / (3n)`, or `ε·OPT / (3n·2ⁿ)` when `exponential` is set.
pub fn delta_z(ctx: &GuessContext<'_>, epsilon: &Rational, lp_opt: &Rational, exponential: bool, override_: Option<&Rational>) -> Delta {
    if let Some(v) = override_ {
        return Delta {
            value: v.clone(),
            source: DeltaSource::Override,
        };
    }
    let n = ctx.n();
    let mut denom = rational::int(3 * n as i64);
    if exponential {
        denom *= rational::pow2(n);
    }
    if *lp_opt > rational::zero() {
        return Delta {
            value: epsilon * lp_opt / denom,
            source: DeltaSource::Formula,
        };
    }
    let scale = ctx.r_star.clone().filter(|r| *r > rational::zero()).unwrap_or_else(|| {
        let c = ctx.inst.c_max();
        if c > rational::zero() {
            c
        } else {
            rational::one()
        }
    });
    Delta {
        value: epsilon * scale / denom,
        source: DeltaSource::ZeroOptimum,
    }
}

fn run(ctx: &GuessContext<'_>, z: &Rational, outlier: Option<usize>, lp_opt: &Rational) -> Result<PrunedOutput> {
    let out = match outlier {
        None => pd_alg(ctx, z)?,
        Some(m) => pd_alg_outlier(ctx, z, m)?,
    };
    let mode = match outlier {
        None => LmpMode::Plain,
        Some(m) => LmpMode::Outlier { m, r_star: r_cap(ctx) },
    };
    audit::record(Check::Lmp, check_lmp(&out, ctx.k_prime, lp_opt, &mode), || {
        format!("LMP chain fails at z = {}", rational::format(z))
    })?;
    Ok(out)
}

/// Searches `z` until the bracket is narrower than `delta`.
///
/// Plain mode stops as soon as a run opens exactly `k'` balls; outlier mode
/// (`outlier = Some(m)`) only stops early when `z = 0` already fits.
pub fn binary_search_z(ctx: &GuessContext<'_>, outlier: Option<usize>, lp_opt: &Rational, delta: &Rational) -> Result<SearchOutcome> {
    let k = ctx.k_prime;
    let z_lo = rational::zero();
    let lo = run(ctx, &z_lo, outlier, lp_opt)?;
    log::debug!("iter=0 z={} |F|={}", rational::format(&z_lo), lo.len());
    if lo.len() <= k {
        return Ok(SearchOutcome::Early(lo));
    }
    let z_hi = match outlier {
        None => rational::int(2 * k as i64) * ctx.inst.c_max(),
        Some(_) => saturating_price(ctx),
    };
    let hi = run(ctx, &z_hi, outlier, lp_opt)?;
    log::debug!("iter=1 z={} |F|={}", rational::format(&z_hi), hi.len());
    if hi.len() > k {
        return Err(Error::invariant(
            "upper-price",
            format!("{} balls opened at the upper starting price, budget {k}", hi.len()),
        ));
    }
    if outlier.is_none() && hi.len() == k {
        return Ok(SearchOutcome::Early(hi));
    }
    let mut b = BracketPair {
        z_lo,
        lo,
        z_hi,
        hi,
        delta_z: delta.clone(),
        iterations: 2,
    };
    while &b.z_hi - &b.z_lo > *delta {
        let z = (&b.z_lo + &b.z_hi) / rational::int(2);
        let out = run(ctx, &z, outlier, lp_opt)?;
        log::debug!("iter={} z={} |F|={}", b.iterations, rational::format(&z), out.len());
        b.iterations += 1;
        if outlier.is_none() && out.len() == k {
            return Ok(SearchOutcome::Early(out));
        }
        if out.len() > k {
            b.z_lo = z;
            b.lo = out;
        } else {
            b.z_hi = z;
            b.hi = out;
        }
    }
    Ok(SearchOutcome::Bracket(b))
}

/// Exact per-bracket inequalities.
///
/// Always: the bracket straddles `k'` and is at most `δ_z` wide; the min-form
/// combination bound `min{C₂, 2bC₂ + (1+b)C₁} ≤ (b+1)/(3b²−2b+1)·(aC₁+bC₂)`.
/// When `δ_z` comes from the formula: `aC₁ + bC₂ ≤ (3+ε)OPT` (plain) or
/// `≤ (3+ε)OPT + 4R* + 3z₁` (outlier), and with `rad_bound` also
/// `aΣrad₁ + bΣrad₂ ≤ (1+ε/3)OPT`.
pub fn check_bracket(
    ctx: &GuessContext<'_>,
    b: &BracketPair,
    lp_opt: &Rational,
    epsilon: &Rational,
    delta: &Delta,
    outlier: bool,
    rad_bound: bool,
) -> Result<()> {
    let k = ctx.k_prime;
    audit::record(Check::Bracket, b.k1() > k && k >= b.k2() && &b.z_hi - &b.z_lo <= b.delta_z, || {
        format!("bracket k1={} k'={k} k2={} is malformed", b.k1(), b.k2())
    })?;
    let (a, bw) = b.weights(k);
    let c1 = b.lo.cost();
    let c2 = b.hi.cost();
    let mix = &a * &c1 + &bw * &c2;
    let one = rational::one();
    let min_form = std::cmp::min(c2.clone(), rational::int(2) * &bw * &c2 + (&one + &bw) * &c1);
    let denom = rational::int(3) * &bw * &bw - rational::int(2) * &bw + &one;
    audit::record(Check::Bracket, min_form * &denom <= (&bw + &one) * &mix, || "min-form combination bound fails".into())?;
    if delta.source != DeltaSource::Formula {
        return Ok(());
    }
    let three_eps = rational::int(3) + epsilon;
    let bound = if outlier {
        &three_eps * lp_opt + rational::int(4) * r_cap(ctx) + rational::int(3) * &b.z_lo
    } else {
        &three_eps * lp_opt
    };
    audit::record(Check::Bracket, mix <= bound, || {
        format!(
            "aC1 + bC2 = {} exceeds {}",
            rational::format(&mix),
            rational::format(&bound)
        )
    })?;
    if rad_bound {
        let r1 = crate::primal_dual::cost(&b.lo.rad_pairs());
        let r2 = crate::primal_dual::cost(&b.hi.rad_pairs());
        let lhs = &a * r1 + &bw * r2;
        let rhs = (&one + epsilon / rational::int(3)) * lp_opt;
        audit::record(Check::Bracket, lhs <= rhs, || "rad-cost mix exceeds (1+ε/3)OPT".into())?;
    }
    Ok(())
}
