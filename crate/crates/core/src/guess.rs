//! Guessed large clusters `F^O` and the residual k-ball-selection instance they induce.

use num_integer::Integer;

use crate::instance::{Instance, Pair};
use crate::rational::Rational;

/// A guess `F^O` with residual clients `D'`, capped candidates `L'`, budget
/// `k' = k - |F^O|` and cap `R*` (the smallest guessed radius; `None` for the
/// empty guess, meaning no cap).
#[derive(Debug, Clone)]
pub struct GuessContext<'a> {
    pub inst: &'a Instance,
    pub guessed: Vec<Pair>,
    pub residual_clients: Vec<usize>,
    pub candidates: Vec<Pair>,
    pub k_prime: usize,
    pub r_star: Option<Rational>,
    in_residual: Vec<bool>,
}

impl<'a> GuessContext<'a> {
    /// `all_pairs` is the full candidate list of the instance.
    pub fn new(inst: &'a Instance, guessed: Vec<Pair>, all_pairs: &[Pair]) -> Self {
        let mut covered = vec![false; inst.nc()];
        for p in &guessed {
            for j in inst.ball(p) {
                covered[j] = true;
            }
        }
        let residual_clients: Vec<usize> = (0..inst.nc()).filter(|&j| !covered[j]).collect();
        let r_star = guessed.iter().map(|p| p.radius.clone()).min();
        let candidates = all_pairs
            .iter()
            .filter(|p| r_star.as_ref().is_none_or(|r| p.radius <= *r))
            .cloned()
            .collect();
        GuessContext {
            inst,
            k_prime: inst.k.saturating_sub(guessed.len()),
            guessed,
            residual_clients,
            candidates,
            r_star,
            in_residual: covered.iter().map(|c| !c).collect(),
        }
    }

    /// A context over `residual` with an explicit cap, independent of any guess.
    /// Used by tests and by callers that build residual instances directly.
    pub fn residual(inst: &'a Instance, residual: Vec<usize>, candidates: Vec<Pair>, k_prime: usize, r_star: Option<Rational>) -> Self {
        let mut in_residual = vec![false; inst.nc()];
        for &j in &residual {
            in_residual[j] = true;
        }
        GuessContext {
            inst,
            guessed: Vec::new(),
            residual_clients: residual,
            candidates,
            k_prime,
            r_star,
            in_residual,
        }
    }

    pub fn is_residual(&self, j: usize) -> bool {
        self.in_residual[j]
    }

    /// `B(i,r) ∩ D'`.
    pub fn residual_ball(&self, p: &Pair) -> Vec<usize> {
        self.residual_clients
            .iter()
            .copied()
            .filter(|&j| *self.inst.c(p.facility, j) <= p.radius)
            .collect()
    }

    /// Residual clients outside every ball of `pairs`, in index order.
    pub fn uncovered<'p>(&self, pairs: impl IntoIterator<Item = &'p Pair> + Clone) -> Vec<usize> {
        self.residual_clients
            .iter()
            .copied()
            .filter(|&j| !pairs.clone().into_iter().any(|p| *self.inst.c(p.facility, j) <= p.radius))
            .collect()
    }

    /// `n = |F| + |D|` of the whole instance.
    pub fn n(&self) -> usize {
        self.inst.n()
    }
}

/// `t = min{k, ⌈1/ε⌉}`.
pub fn guess_size(k: usize, epsilon: &Rational) -> usize {
    assert!(*epsilon > crate::rational::zero(), "epsilon must be positive");
    let inv = epsilon.recip();
    let (q, r) = inv.numer().div_rem(inv.denom());
    let ceil: usize = if r == 0.into() { q } else { q + 1 }.try_into().unwrap_or(usize::MAX);
    k.min(ceil)
}

/// Every size-`t` subset of the candidate pairs, in lexicographic order.
pub fn enumerate_guesses<'a>(inst: &'a Instance, epsilon: &Rational) -> impl Iterator<Item = GuessContext<'a>> + 'a {
    let all = inst.candidate_pairs();
    let t = guess_size(inst.k, epsilon);
    Combinations::new(all.len(), t).map(move |idx| {
        let guessed = idx.iter().map(|&x| all[x].clone()).collect();
        GuessContext::new(inst, guessed, &all)
    })
}

/// Lexicographic `t`-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, t: usize) -> Self {
        Combinations {
            n,
            current: (t <= n).then(|| (0..t).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let t = out.len();
        let mut next = out.clone();
        let mut pos = t;
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if next[pos] < self.n - t + pos {
                next[pos] += 1;
                for q in pos + 1..t {
                    next[q] = next[q - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::e1;
    use crate::rational::{frac, int};

    #[test]
    fn guess_counts() {
        let inst = e1();
        assert_eq!(enumerate_guesses(&inst, &int(1)).count(), 6);
        assert_eq!(enumerate_guesses(&inst, &frac(2, 5)).count(), 15);
        let k0 = inst.with_budgets(0, 0);
        let all: Vec<_> = enumerate_guesses(&k0, &int(1)).collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].guessed.is_empty());
        assert!(all[0].r_star.is_none());
    }

    #[test]
    fn contexts_are_consistent() {
        let inst = e1();
        for ctx in enumerate_guesses(&inst, &frac(2, 5)) {
            assert_eq!(ctx.k_prime, 0);
            let r = ctx.r_star.clone().unwrap();
            assert!(ctx.candidates.iter().all(|p| p.radius <= r));
            for j in 0..inst.nc() {
                let covered = ctx.guessed.iter().any(|p| inst.ball(p).contains(&j));
                assert_eq!(ctx.is_residual(j), !covered);
            }
        }
    }

    #[test]
    fn combinations_small() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}
