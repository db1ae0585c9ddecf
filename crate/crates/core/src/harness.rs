//! Algorithm-versus-oracle benchmark over a range of seeds, reported as CSV.

use std::ops::Range;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{gen_random, GenSpec, Geometry};
use crate::instance::Instance;
use crate::oracle::{brute_force_sum_radii, brute_force_supplier};
use crate::par;
use crate::rational::{self, Rational};
use crate::solution::Solution;
use crate::sum_radii::{solve_lbksr, solve_lbksro, SolveOptions};
use crate::supplier::{solve_lbksup, solve_lbksupo};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Lbksr,
    Lbksro,
    Lbksup,
    Lbksupo,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Lbksr, Problem::Lbksro, Problem::Lbksup, Problem::Lbksupo];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Lbksr => "lbksr",
            Problem::Lbksro => "lbksro",
            Problem::Lbksup => "lbksup",
            Problem::Lbksupo => "lbksupo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn has_outliers(self) -> bool {
        matches!(self, Problem::Lbksro | Problem::Lbksupo)
    }

    pub fn is_supplier(self) -> bool {
        matches!(self, Problem::Lbksup | Problem::Lbksupo)
    }

    /// Proven approximation factor at `epsilon`.
    pub fn bound(self, epsilon: &Rational) -> Rational {
        match self {
            Problem::Lbksr => rational::frac(383, 100) + rational::frac(2483, 300) * epsilon,
            Problem::Lbksro => rational::frac(12365, 1000) + rational::frac(93, 2) * epsilon,
            Problem::Lbksup => rational::int(3),
            Problem::Lbksupo => rational::int(5),
        }
    }

    /// Instance sizes the oracle handles quickly.
    pub fn default_spec(self) -> GenSpec {
        let (max_facilities, max_clients) = if self.is_supplier() { (5, 8) } else { (4, 7) };
        GenSpec {
            max_facilities,
            max_clients,
            max_lower: 3,
            max_k: 3,
            max_m: if self.has_outliers() { 2 } else { 0 },
            geometry: Geometry::Line,
        }
    }

    pub fn solve(self, inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
        match self {
            Problem::Lbksr => solve_lbksr(inst, opts),
            Problem::Lbksro => solve_lbksro(inst, opts),
            Problem::Lbksup => solve_lbksup(inst, opts.parallelism),
            Problem::Lbksupo => solve_lbksupo(inst, opts.parallelism),
        }
    }

    pub fn oracle(self, inst: &Instance) -> Result<Solution> {
        let inst = if self.has_outliers() { inst.clone() } else { inst.with_budgets(inst.k, 0) };
        if self.is_supplier() {
            brute_force_supplier(&inst)
        } else {
            brute_force_sum_radii(&inst)
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub problem: Problem,
    pub seeds: Range<u64>,
    pub spec: GenSpec,
    /// Cycle line, plane and random-metric geometries by seed instead of using `spec.geometry`.
    pub mixed_geometry: bool,
    pub options: SolveOptions,
}

impl BenchConfig {
    pub fn new(problem: Problem, seeds: Range<u64>) -> Self {
        BenchConfig {
            problem,
            seeds,
            spec: problem.default_spec(),
            mixed_geometry: true,
            options: SolveOptions::default(),
        }
    }

    pub fn instance(&self, seed: u64) -> Instance {
        let mut spec = self.spec;
        if self.mixed_geometry {
            spec.geometry = [Geometry::Line, Geometry::Plane, Geometry::RandomMetric][(seed % 3) as usize];
        }
        gen_random(seed, &spec)
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub seed: u64,
    pub problem: Problem,
    /// `None` when the instance is infeasible.
    pub alg_cost: Option<Rational>,
    pub opt_cost: Option<Rational>,
    pub paper_bound: Rational,
    pub runtime_ms: f64,
}

impl BenchRow {
    pub fn ratio(&self) -> Option<Rational> {
        let (a, o) = (self.alg_cost.as_ref()?, self.opt_cost.as_ref()?);
        if *o == rational::zero() {
            (*a == rational::zero()).then(rational::one)
        } else {
            Some(a / o)
        }
    }

    /// Costs within the proven factor; infeasibility must agree with the oracle.
    pub fn within_bound(&self) -> bool {
        match (&self.alg_cost, &self.opt_cost) {
            (Some(a), Some(o)) => *a <= &self.paper_bound * o,
            (None, None) => true,
            _ => false,
        }
    }
}

fn infeasible_as_none(r: Result<Solution>) -> Result<Option<Solution>> {
    match r {
        Ok(s) => Ok(Some(s)),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs solver and oracle on every seed; seeds are processed in parallel but
/// rows come back in seed order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let seeds: Vec<u64> = cfg.seeds.clone().collect();
    let bound = cfg.problem.bound(&cfg.options.epsilon);
    par::map(&seeds, cfg.options.parallelism, |&seed| {
        let inst = cfg.instance(seed);
        let start = Instant::now();
        let alg = infeasible_as_none(cfg.problem.solve(&inst, &cfg.options))?;
        let runtime_ms = start.elapsed().as_secs_f64() * 1000.0;
        let opt = infeasible_as_none(cfg.problem.oracle(&inst))?;
        Ok(BenchRow {
            seed,
            problem: cfg.problem,
            alg_cost: alg.map(|s| s.cost),
            opt_cost: opt.map(|s| s.cost),
            paper_bound: bound.clone(),
            runtime_ms,
        })
    })
    .into_iter()
    .collect()
}

/// Every problem over the same seed range with default sizes.
pub fn run_full_suite(seeds: Range<u64>, options: &SolveOptions) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for problem in Problem::ALL {
        let mut cfg = BenchConfig::new(problem, seeds.clone());
        cfg.options = options.clone();
        rows.extend(run_bench(&cfg)?);
    }
    Ok(rows)
}

#[derive(Serialize)]
struct CsvRow {
    seed: u64,
    problem: &'static str,
    alg_cost: String,
    opt_cost: String,
    ratio: String,
    paper_bound: String,
    runtime_ms: String,
}

/// CSV with columns seed, problem, alg_cost, opt_cost, ratio, paper_bound,
/// runtime_ms. Without `timing` the runtime column is left empty so that
/// repeated runs are byte-identical.
pub fn to_csv(rows: &[BenchRow], timing: bool) -> String {
    let cost = |c: &Option<Rational>| c.as_ref().map_or_else(|| "infeasible".to_string(), rational::format);
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        let ratio = match (&r.alg_cost, &r.opt_cost, r.ratio()) {
            (_, _, Some(q)) => rational::to_decimal(&q, 4),
            (Some(_), Some(_), None) => "inf".to_string(),
            _ => String::new(),
        };
        w.serialize(CsvRow {
            seed: r.seed,
            problem: r.problem.name(),
            alg_cost: cost(&r.alg_cost),
            opt_cost: cost(&r.opt_cost),
            ratio,
            paper_bound: rational::to_decimal(&r.paper_bound, 4),
            runtime_ms: if timing { format!("{:.3}", r.runtime_ms) } else { String::new() },
        })
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_names_round_trip() {
        for p in Problem::ALL {
            assert_eq!(Problem::parse(p.name()), Some(p));
        }
        assert_eq!(Problem::parse("kmedian"), None);
    }

    #[test]
    fn csv_header_and_determinism() {
        let cfg = BenchConfig::new(Problem::Lbksup, 0..4);
        let rows = run_bench(&cfg).unwrap();
        let a = to_csv(&rows, false);
        assert!(a.starts_with("seed,problem,alg_cost,opt_cost,ratio,paper_bound,runtime_ms\n"));
        assert_eq!(a.lines().count(), 5);
        assert_eq!(a, to_csv(&run_bench(&cfg).unwrap(), false));
        assert!(rows.iter().all(BenchRow::within_bound));
    }

    #[test]
    fn bounds_at_half() {
        let half = rational::frac(1, 2);
        assert_eq!(Problem::Lbksr.bound(&half), rational::frac(383, 100) + rational::frac(2483, 600));
        assert_eq!(Problem::Lbksro.bound(&half), rational::frac(12365, 1000) + rational::frac(93, 4));
    }
}
