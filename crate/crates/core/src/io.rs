//! JSON encodings of instances and solutions.
//!
//! Euclidean distances that are not exact rationals are rounded up to a
//! `1/EUCLIDEAN_GRID` grid and then replaced by shortest-path distances, which
//! restores the triangle inequality broken by rounding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};
use crate::solution::{Assignment, Objective, Solution};

pub const EUCLIDEAN_GRID: u64 = 1_000_000;

#[derive(Debug, Serialize, Deserialize)]
struct FacilityJson {
    id: String,
    #[serde(default)]
    lower_bound: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClientJson {
    id: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MetricJson {
    Explicit { order: Vec<String>, d: Vec<Vec<Value>> },
    Euclidean { points: BTreeMap<String, Vec<Value>> },
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceJson {
    facilities: Vec<FacilityJson>,
    clients: Vec<ClientJson>,
    metric: MetricJson,
    k: usize,
    #[serde(default)]
    m: usize,
}

fn number(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s),
        Value::Number(n) => rational::parse(&n.to_string()),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: InstanceJson = serde_json::from_str(text)?;
    let facilities: Vec<(String, u64)> = raw.facilities.into_iter().map(|f| (f.id, f.lower_bound)).collect();
    let clients: Vec<String> = raw.clients.into_iter().map(|c| c.id).collect();
    match raw.metric {
        MetricJson::Explicit { order, d } => {
            let d = d
                .iter()
                .map(|row| row.iter().map(number).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Instance::from_matrix(facilities, clients, &order, &d, raw.k, raw.m)
        }
        MetricJson::Euclidean { points } => {
            let order: Vec<String> = facilities.iter().map(|f| f.0.clone()).chain(clients.iter().cloned()).collect();
            let mut coords = Vec::with_capacity(order.len());
            for id in &order {
                let p = points.get(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
                coords.push(p.iter().map(number).collect::<Result<Vec<_>>>()?);
            }
            let d = euclidean_matrix(&coords)?;
            Instance::from_matrix(facilities, clients, &order, &d, raw.k, raw.m)
        }
    }
}

/// Pairwise Euclidean distances; exact where the distance is rational.
pub fn euclidean_matrix(coords: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = coords.len();
    let dim = coords.first().map_or(0, |c| c.len());
    if coords.iter().any(|c| c.len() != dim) {
        return Err(Error::InvalidInstance("points have differing dimensions".into()));
    }
    let mut d = vec![vec![rational::zero(); n]; n];
    let mut rounded = false;
    for a in 0..n {
        for b in a + 1..n {
            let sq = coords[a]
                .iter()
                .zip(&coords[b])
                .fold(rational::zero(), |acc, (x, y)| acc + (x - y) * (x - y));
            let v = match rational::exact_sqrt(&sq) {
                Some(v) => v,
                None => {
                    rounded = true;
                    rational::sqrt_ceil_on_grid(&sq, EUCLIDEAN_GRID)
                }
            };
            d[a][b] = v.clone();
            d[b][a] = v;
        }
    }
    if rounded {
        metric_closure(&mut d);
    }
    Ok(d)
}

/// Replaces every entry by the shortest-path distance (Floyd-Warshall).
pub fn metric_closure(d: &mut [Vec<Rational>]) {
    let n = d.len();
    for w in 0..n {
        for a in 0..n {
            for b in 0..n {
                let via = &d[a][w] + &d[w][b];
                if via < d[a][b] {
                    d[a][b] = via;
                }
            }
        }
    }
}

pub fn instance_to_json(inst: &Instance) -> Value {
    let order: Vec<String> = inst.facility_ids().iter().chain(inst.client_ids()).cloned().collect();
    let n = order.len();
    let d: Vec<Vec<Value>> = (0..n)
        .map(|p| (0..n).map(|q| Value::String(rational::format(inst.point_dist(p, q)))).collect())
        .collect();
    let raw = InstanceJson {
        facilities: (0..inst.nf())
            .map(|i| FacilityJson {
                id: inst.facility_id(i).to_string(),
                lower_bound: inst.lower_bound(i),
            })
            .collect(),
        clients: inst.client_ids().iter().map(|id| ClientJson { id: id.clone() }).collect(),
        metric: MetricJson::Explicit { order, d },
        k: inst.k,
        m: inst.m,
    };
    serde_json::to_value(raw).expect("instance serializes")
}

#[derive(Debug, Serialize, Deserialize)]
struct SolutionJson {
    open: Vec<String>,
    assignment: BTreeMap<String, String>,
    objective: String,
    cost: String,
}

pub const OUT: &str = "OUT";

pub fn solution_to_json(inst: &Instance, sol: &Solution) -> Value {
    let raw = SolutionJson {
        open: sol.open.iter().map(|&i| inst.facility_id(i).to_string()).collect(),
        assignment: sol
            .assignment
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let target = match a {
                    Assignment::Facility(i) => inst.facility_id(*i).to_string(),
                    Assignment::Out => OUT.to_string(),
                };
                (inst.client_id(j).to_string(), target)
            })
            .collect(),
        objective: sol.objective.name().to_string(),
        cost: rational::format(&sol.cost),
    };
    serde_json::to_value(raw).expect("solution serializes")
}

/// Parses a solution against `inst`; every client must be assigned.
pub fn parse_solution(inst: &Instance, text: &str) -> Result<Solution> {
    let raw: SolutionJson = serde_json::from_str(text)?;
    let open = raw
        .open
        .iter()
        .map(|id| inst.facility_index(id).ok_or_else(|| Error::UnknownFacility(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut assignment = vec![None; inst.nc()];
    for (client, target) in &raw.assignment {
        let j = inst.client_index(client).ok_or_else(|| Error::UnknownId(client.clone()))?;
        assignment[j] = Some(if target == OUT {
            Assignment::Out
        } else {
            Assignment::Facility(inst.facility_index(target).ok_or_else(|| Error::UnknownFacility(target.clone()))?)
        });
    }
    let assignment = assignment
        .into_iter()
        .enumerate()
        .map(|(j, a)| a.ok_or_else(|| Error::Parse(format!("client `{}` has no assignment", inst.client_id(j)))))
        .collect::<Result<Vec<_>>>()?;
    let objective = Objective::parse(&raw.objective).ok_or_else(|| Error::Parse(format!("unknown objective `{}`", raw.objective)))?;
    Ok(Solution {
        open,
        assignment,
        objective,
        cost: rational::parse(&raw.cost)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::e1;
    use crate::rational::{frac, int};

    #[test]
    fn instance_roundtrip() {
        let inst = e1();
        let text = serde_json::to_string(&instance_to_json(&inst)).unwrap();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.facility_ids(), inst.facility_ids());
        assert_eq!(back.c(0, 2), &int(10));
        assert_eq!(back.k, 2);
    }

    #[test]
    fn euclidean_exact_and_rounded() {
        let text = r#"{"facilities":[{"id":"a","lower_bound":1}],"clients":[{"id":"x"},{"id":"y"}],
            "metric":{"type":"euclidean","points":{"a":[0,0],"x":[3,4],"y":["1/2",0.5]}},"k":1,"m":0}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.c(0, 0), &int(5));
        // sqrt(1/2) is irrational: rounded up onto the grid.
        let d = inst.c(0, 1).clone();
        assert!(&d * &d >= frac(1, 2));
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn solution_roundtrip() {
        let inst = e1();
        let sol = Solution::from_assignment(
            &inst,
            vec![0],
            vec![Assignment::Facility(0), Assignment::Facility(0), Assignment::Out],
            Objective::SumOfRadii,
        );
        let text = serde_json::to_string(&solution_to_json(&inst, &sol)).unwrap();
        assert!(text.contains("\"cost\":\"1/1\""));
        assert_eq!(parse_solution(&inst, &text).unwrap(), sol);
    }
}
