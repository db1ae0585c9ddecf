//! Instance model: facilities with lower bounds, clients, a metric over both,
//! and the ball / candidate-pair machinery built on it.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A ball candidate `(i, r)`. Ordered by facility index, then radius; since
/// facility indices follow the sorted facility ids this is the lexicographic
/// pair order used for every tie-break.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub facility: usize,
    pub radius: Rational,
}

impl Pair {
    pub fn new(facility: usize, radius: Rational) -> Self {
        Pair { facility, radius }
    }
}

/// Facilities occupy point indices `0..nf`, clients `nf..nf+nc`. Ids are kept
/// sorted, so index order is id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    facility_ids: Vec<String>,
    client_ids: Vec<String>,
    lower_bounds: Vec<u64>,
    dist: Vec<Vec<Rational>>,
    pub k: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

impl Instance {
    /// Builds an instance from a distance matrix given over `order`, which must
    /// list every facility and client id exactly once.
    pub fn from_matrix(
        facilities: Vec<(String, u64)>,
        clients: Vec<String>,
        order: &[String],
        d: &[Vec<Rational>],
        k: usize,
        m: usize,
    ) -> Result<Self> {
        let n = facilities.len() + clients.len();
        if order.len() != n || d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "distance matrix must be {n}x{n} over all facility and client ids"
            )));
        }
        let mut pos = std::collections::HashMap::new();
        for (idx, id) in order.iter().enumerate() {
            if pos.insert(id.as_str(), idx).is_some() {
                return Err(Error::InvalidInstance(format!("id `{id}` repeated in metric order")));
            }
        }
        Self::from_fn(facilities, clients, k, m, |a, b| {
            let pa = *pos.get(a).ok_or_else(|| Error::UnknownId(a.to_string()))?;
            let pb = *pos.get(b).ok_or_else(|| Error::UnknownId(b.to_string()))?;
            Ok(d[pa][pb].clone())
        })
    }

    /// Builds an instance, querying `dist(id_a, id_b)` for every ordered pair of points.
    pub fn from_fn(
        mut facilities: Vec<(String, u64)>,
        mut clients: Vec<String>,
        k: usize,
        m: usize,
        mut dist: impl FnMut(&str, &str) -> Result<Rational>,
    ) -> Result<Self> {
        facilities.sort();
        clients.sort();
        let mut seen = BTreeSet::new();
        for id in facilities.iter().map(|f| &f.0).chain(clients.iter()) {
            if !seen.insert(id.clone()) {
                return Err(Error::InvalidInstance(format!("duplicate id `{id}`")));
            }
        }
        let ids: Vec<&str> = facilities
            .iter()
            .map(|f| f.0.as_str())
            .chain(clients.iter().map(|c| c.as_str()))
            .collect();
        let mut matrix = Vec::with_capacity(ids.len());
        for a in &ids {
            let mut row = Vec::with_capacity(ids.len());
            for b in &ids {
                row.push(dist(a, b)?);
            }
            matrix.push(row);
        }
        Ok(Instance {
            lower_bounds: facilities.iter().map(|f| f.1).collect(),
            facility_ids: facilities.into_iter().map(|f| f.0).collect(),
            client_ids: clients,
            dist: matrix,
            k,
            m,
        })
    }

    /// Points on the real line, given as integer coordinates.
    pub fn on_line(facilities: &[(&str, i64, u64)], clients: &[(&str, i64)], k: usize, m: usize) -> Self {
        let mut coord = std::collections::HashMap::new();
        for (id, x, _) in facilities {
            coord.insert(id.to_string(), *x);
        }
        for (id, x) in clients {
            coord.insert(id.to_string(), *x);
        }
        Self::from_fn(
            facilities.iter().map(|(id, _, l)| (id.to_string(), *l)).collect(),
            clients.iter().map(|(id, _)| id.to_string()).collect(),
            k,
            m,
            |a, b| Ok(rational::int((coord[a] - coord[b]).abs())),
        )
        .expect("line instance ids must be distinct")
    }

    pub fn nf(&self) -> usize {
        self.facility_ids.len()
    }

    pub fn nc(&self) -> usize {
        self.client_ids.len()
    }

    /// `n = |F| + |D|`.
    pub fn n(&self) -> usize {
        self.nf() + self.nc()
    }

    pub fn facility_id(&self, i: usize) -> &str {
        &self.facility_ids[i]
    }

    pub fn client_id(&self, j: usize) -> &str {
        &self.client_ids[j]
    }

    pub fn facility_ids(&self) -> &[String] {
        &self.facility_ids
    }

    pub fn client_ids(&self) -> &[String] {
        &self.client_ids
    }

    pub fn facility_index(&self, id: &str) -> Option<usize> {
        self.facility_ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn client_index(&self, id: &str) -> Option<usize> {
        self.client_ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn lower_bound(&self, i: usize) -> u64 {
        self.lower_bounds[i]
    }

    pub fn lower_bounds(&self) -> &[u64] {
        &self.lower_bounds
    }

    /// Facility-to-client distance `c(i,j)`.
    pub fn c(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][self.nf() + j]
    }

    /// Facility-to-facility distance.
    pub fn ff(&self, a: usize, b: usize) -> &Rational {
        &self.dist[a][b]
    }

    /// Client-to-client distance.
    pub fn cc(&self, a: usize, b: usize) -> &Rational {
        let nf = self.nf();
        &self.dist[nf + a][nf + b]
    }

    /// Distance between raw point indices (facilities first, then clients).
    pub fn point_dist(&self, p: usize, q: usize) -> &Rational {
        &self.dist[p][q]
    }

    /// Largest facility-client distance (zero without clients or facilities).
    pub fn c_max(&self) -> Rational {
        let mut best = rational::zero();
        for i in 0..self.nf() {
            for j in 0..self.nc() {
                if *self.c(i, j) > best {
                    best = self.c(i, j).clone();
                }
            }
        }
        best
    }

    pub fn with_budgets(&self, k: usize, m: usize) -> Instance {
        Instance { k, m, ..self.clone() }
    }

    pub fn with_lower_bounds(&self, lower_bounds: Vec<u64>) -> Instance {
        assert_eq!(lower_bounds.len(), self.nf());
        Instance {
            lower_bounds,
            ..self.clone()
        }
    }

    /// Replaces the symmetric distance between two points given by id.
    pub fn with_distance(&self, a: &str, b: &str, d: Rational) -> Result<Instance> {
        let pa = self.point_index(a)?;
        let pb = self.point_index(b)?;
        let mut out = self.clone();
        out.dist[pa][pb] = d.clone();
        out.dist[pb][pa] = d;
        Ok(out)
    }

    fn point_index(&self, id: &str) -> Result<usize> {
        self.facility_index(id)
            .or_else(|| self.client_index(id).map(|j| self.nf() + j))
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    fn point_id(&self, p: usize) -> &str {
        if p < self.nf() {
            &self.facility_ids[p]
        } else {
            &self.client_ids[p - self.nf()]
        }
    }

    /// Clients within distance `r` of facility `i`, in index order.
    pub fn ball(&self, p: &Pair) -> Vec<usize> {
        (0..self.nc()).filter(|&j| *self.c(p.facility, j) <= p.radius).collect()
    }

    /// Checked variant of [`Instance::ball`] for externally supplied facility indices.
    pub fn try_ball(&self, p: &Pair) -> Result<Vec<usize>> {
        if p.facility >= self.nf() {
            return Err(Error::UnknownFacility(p.facility.to_string()));
        }
        Ok(self.ball(p))
    }

    pub fn ball_by_id(&self, facility: &str, radius: Rational) -> Result<Vec<usize>> {
        let i = self
            .facility_index(facility)
            .ok_or_else(|| Error::UnknownFacility(facility.to_string()))?;
        Ok(self.ball(&Pair::new(i, radius)))
    }

    /// Whether the balls of two pairs may share a client: `c(i,i') ≤ r + r'`.
    pub fn intersects(&self, a: &Pair, b: &Pair) -> bool {
        *self.ff(a.facility, b.facility) <= &a.radius + &b.radius
    }

    /// Smallest radius at which `i`'s ball contains every client in `clients`.
    pub fn covering_radius(&self, i: usize, clients: impl IntoIterator<Item = usize>) -> Rational {
        let mut r = rational::zero();
        for j in clients {
            if *self.c(i, j) > r {
                r = self.c(i, j).clone();
            }
        }
        r
    }

    /// All pairs `(i, c(i,j))` whose ball meets the lower bound of `i`, sorted and deduplicated.
    pub fn candidate_pairs(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for i in 0..self.nf() {
            let mut radii: Vec<&Rational> = (0..self.nc()).map(|j| self.c(i, j)).collect();
            radii.sort();
            radii.dedup();
            for r in radii {
                let size = (0..self.nc()).filter(|&j| self.c(i, j) <= r).count() as u64;
                if size >= self.lower_bounds[i] {
                    out.push(Pair::new(i, r.clone()));
                }
            }
        }
        out
    }

    pub fn pair_label(&self, p: &Pair) -> String {
        format!("({},{})", self.facility_id(p.facility), rational::format(&p.radius))
    }

    /// Lists metric-axiom violations, bound warnings and budget errors.
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        let n = self.n();
        let err = |message: String| Issue {
            severity: Severity::Error,
            message,
        };
        for p in 0..n {
            if !self.dist[p][p].is_zero() {
                issues.push(err(format!("d({0},{0}) is not zero", self.point_id(p))));
            }
            for q in 0..n {
                if self.dist[p][q].is_negative() {
                    issues.push(err(format!("d({},{}) is negative", self.point_id(p), self.point_id(q))));
                }
                if q > p && self.dist[p][q] != self.dist[q][p] {
                    issues.push(err(format!("d({},{}) is not symmetric", self.point_id(p), self.point_id(q))));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for w in 0..n {
                    if self.dist[p][q] > &self.dist[p][w] + &self.dist[w][q] {
                        issues.push(err(format!(
                            "triangle inequality violated: d({a},{b}) > d({a},{c}) + d({c},{b})",
                            a = self.point_id(p),
                            b = self.point_id(q),
                            c = self.point_id(w)
                        )));
                    }
                }
            }
        }
        for i in 0..self.nf() {
            if self.lower_bounds[i] as usize > self.nc() {
                issues.push(Issue {
                    severity: Severity::Warning,
                    message: format!(
                        "lower bound of `{}` exceeds the number of clients; it can never be opened",
                        self.facility_ids[i]
                    ),
                });
            }
        }
        if self.m > self.nc() {
            issues.push(err(format!("m = {} exceeds client count {}", self.m, self.nc())));
        }
        issues
    }

    pub fn is_valid(&self) -> bool {
        self.validate().iter().all(|i| i.severity != Severity::Error)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::int;

    /// Facilities a@0, b@10; clients j1@0, j2@1, j3@10; unit lower bounds.
    pub fn e1() -> Instance {
        Instance::on_line(&[("a", 0, 1), ("b", 10, 1)], &[("j1", 0), ("j2", 1), ("j3", 10)], 2, 0)
    }

    fn ids(inst: &Instance, set: &[usize]) -> Vec<String> {
        set.iter().map(|&j| inst.client_id(j).to_string()).collect()
    }

    #[test]
    fn line_instance_is_valid() {
        assert!(e1().validate().is_empty());
    }

    #[test]
    fn detects_triangle_violation() {
        let bad = e1().with_distance("a", "j3", int(100)).unwrap();
        let issues = bad.validate();
        assert!(issues.iter().any(|i| i.message.contains("triangle")));
    }

    #[test]
    fn detects_excess_outlier_budget() {
        let bad = e1().with_budgets(2, 5);
        assert!(bad.validate().iter().any(|i| i.severity == Severity::Error && i.message.contains("m = 5")));
    }

    #[test]
    fn balls() {
        let inst = e1();
        assert_eq!(ids(&inst, &inst.ball_by_id("a", int(1)).unwrap()), ["j1", "j2"]);
        assert_eq!(ids(&inst, &inst.ball_by_id("a", int(0)).unwrap()), ["j1"]);
        assert_eq!(ids(&inst, &inst.ball_by_id("b", int(10)).unwrap()), ["j1", "j2", "j3"]);
        assert!(matches!(inst.ball_by_id("zz", int(1)), Err(Error::UnknownFacility(_))));
    }

    #[test]
    fn candidate_pairs_e1() {
        let inst = e1();
        let labels: Vec<String> = inst.candidate_pairs().iter().map(|p| inst.pair_label(p)).collect();
        assert_eq!(labels, ["(a,0/1)", "(a,1/1)", "(a,10/1)", "(b,0/1)", "(b,9/1)", "(b,10/1)"]);
    }

    #[test]
    fn candidate_pairs_respect_lower_bound() {
        let inst = e1().with_lower_bounds(vec![2, 1]);
        let a: Vec<String> = inst
            .candidate_pairs()
            .iter()
            .filter(|p| p.facility == 0)
            .map(|p| inst.pair_label(p))
            .collect();
        assert_eq!(a, ["(a,1/1)", "(a,10/1)"]);
        let none = e1().with_lower_bounds(vec![4, 4]);
        assert!(none.candidate_pairs().is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = Instance::from_fn(vec![("x".into(), 0)], vec!["x".into()], 1, 0, |_, _| Ok(int(0)));
        assert!(r.is_err());
    }
}
