//! Deterministic instance generators: random small instances and the
//! set-cover gadget on which k-supplier cannot be approximated below 3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::io::{euclidean_matrix, metric_closure};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Integer points on a line.
    Line,
    /// Integer points in the plane with Euclidean distances.
    Plane,
    /// Random integer distances closed under shortest paths.
    RandomMetric,
}

impl Geometry {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "line" => Some(Geometry::Line),
            "plane" => Some(Geometry::Plane),
            "random-metric" => Some(Geometry::RandomMetric),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Line => "line",
            Geometry::Plane => "plane",
            Geometry::RandomMetric => "random-metric",
        }
    }
}

/// Upper limits for [`gen_random`]; each size is drawn uniformly from its range.
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub max_facilities: usize,
    pub max_clients: usize,
    pub max_lower: u64,
    pub max_k: usize,
    pub max_m: usize,
    pub geometry: Geometry,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            max_facilities: 4,
            max_clients: 7,
            max_lower: 3,
            max_k: 3,
            max_m: 0,
            geometry: Geometry::Line,
        }
    }
}

pub fn facility_id(x: usize) -> String {
    format!("f{x:02}")
}

pub fn client_id(x: usize) -> String {
    format!("c{x:02}")
}

/// A random instance; identical seeds and specs give identical instances.
pub fn gen_random(seed: u64, spec: &GenSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = rng.gen_range(1..=spec.max_facilities.max(1));
    let nc = rng.gen_range(1..=spec.max_clients.max(1));
    let lower: Vec<u64> = (0..nf).map(|_| rng.gen_range(0..=spec.max_lower)).collect();
    let k = rng.gen_range(1..=spec.max_k.max(1));
    let m = rng.gen_range(0..=spec.max_m.min(nc));
    let n = nf + nc;
    let d: Vec<Vec<Rational>> = match spec.geometry {
        Geometry::Line => {
            let xs: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=20)).collect();
            (0..n).map(|a| (0..n).map(|b| rational::int((xs[a] - xs[b]).abs())).collect()).collect()
        }
        Geometry::Plane => {
            let pts: Vec<Vec<Rational>> = (0..n)
                .map(|_| vec![rational::int(rng.gen_range(0..=8)), rational::int(rng.gen_range(0..=8))])
                .collect();
            euclidean_matrix(&pts).expect("two-dimensional points")
        }
        Geometry::RandomMetric => {
            let mut d = vec![vec![rational::zero(); n]; n];
            for a in 0..n {
                for b in a + 1..n {
                    let v = rational::int(rng.gen_range(1..=10));
                    d[a][b] = v.clone();
                    d[b][a] = v;
                }
            }
            metric_closure(&mut d);
            d
        }
    };
    let order: Vec<String> = (0..nf).map(facility_id).chain((0..nc).map(client_id)).collect();
    Instance::from_matrix(
        (0..nf).map(|i| (facility_id(i), lower[i])).collect(),
        (0..nc).map(client_id).collect(),
        &order,
        &d,
        k,
        m,
    )
    .expect("generated ids are distinct")
}

/// Set-cover gadget: one facility per set (lower bound 1), one client per
/// element, distance 1 between a set and its elements and 3 otherwise;
/// facilities are pairwise 2 apart and so are clients. The k-supplier optimum
/// is 1 exactly when `k` sets cover the universe.
pub fn gen_hardness_gadget(universe: usize, sets: &[Vec<usize>], k: usize) -> Instance {
    let nf = sets.len();
    let n = nf + universe;
    let mut d = vec![vec![rational::int(2); n]; n];
    for (x, row) in d.iter_mut().enumerate() {
        row[x] = rational::zero();
    }
    for (q, set) in sets.iter().enumerate() {
        for p in 0..universe {
            let v = rational::int(if set.contains(&p) { 1 } else { 3 });
            d[q][nf + p] = v.clone();
            d[nf + p][q] = v;
        }
    }
    let order: Vec<String> = (0..nf).map(facility_id).chain((0..universe).map(client_id)).collect();
    Instance::from_matrix(
        (0..nf).map(|i| (facility_id(i), 1)).collect(),
        (0..universe).map(client_id).collect(),
        &order,
        &d,
        k,
        0,
    )
    .expect("gadget ids are distinct")
}

/// A random set system over a small universe, with a budget `k`.
pub fn gen_random_set_cover(seed: u64) -> (usize, Vec<Vec<usize>>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe = rng.gen_range(1..=5);
    let count = rng.gen_range(1..=5);
    let sets = (0..count)
        .map(|_| (0..universe).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    let k = rng.gen_range(1..=3);
    (universe, sets, k)
}
