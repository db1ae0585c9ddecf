//! Reduction from lower-bounded k-supplier to lower-bounded k-center.
//!
//! Every client is copied `N = |F| + 1` times and the facilities join the
//! point set; every point may be a center. Client copies get a lower bound no
//! solution can meet, so only original facilities open, and the extra outlier
//! slack `N - 1` absorbs the facility points themselves.

use crate::error::{Error, Result};
use crate::flow::assign_by_flow;
use crate::instance::Instance;
use crate::rational::Rational;
use crate::solution::{Objective, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Point {
    Facility(usize),
    ClientCopy(usize, usize),
}

#[derive(Debug, Clone)]
pub struct SupplierCenterReduction {
    /// Facilities and clients are both the point set, under prefixed ids.
    pub center: Instance,
    pub copies: usize,
    /// Point behind each center facility index.
    pub facility_points: Vec<Point>,
}

fn point_name(inst: &Instance, p: Point) -> String {
    match p {
        Point::Facility(i) => format!("f.{}", inst.facility_id(i)),
        Point::ClientCopy(j, c) => format!("c.{}.{c}", inst.client_id(j)),
    }
}

pub fn reduce_supplier_to_center(inst: &Instance) -> SupplierCenterReduction {
    let (nf, nc) = (inst.nf(), inst.nc());
    let copies = nf + 1;
    let points: Vec<Point> = (0..nf)
        .map(Point::Facility)
        .chain((0..nc).flat_map(|j| (0..copies).map(move |c| Point::ClientCopy(j, c))))
        .collect();
    let by_name: std::collections::HashMap<String, Point> = points.iter().map(|&p| (point_name(inst, p), p)).collect();
    let lower = |p: Point| -> u64 {
        match p {
            Point::Facility(i) => copies as u64 * inst.lower_bound(i),
            Point::ClientCopy(..) => (copies * (nc + 1)) as u64,
        }
    };
    let dist = |a: Point, b: Point| -> Rational {
        match (a, b) {
            (Point::Facility(x), Point::Facility(y)) => inst.ff(x, y).clone(),
            (Point::Facility(x), Point::ClientCopy(j, _)) | (Point::ClientCopy(j, _), Point::Facility(x)) => inst.c(x, j).clone(),
            (Point::ClientCopy(a, _), Point::ClientCopy(b, _)) => inst.cc(a, b).clone(),
        }
    };
    let resolve = |id: &str| -> Result<Point> {
        id.get(2..).and_then(|name| by_name.get(name).copied()).ok_or_else(|| Error::UnknownId(id.to_string()))
    };
    let center = Instance::from_fn(
        points.iter().map(|&p| (format!("F:{}", point_name(inst, p)), lower(p))).collect(),
        points.iter().map(|&p| format!("C:{}", point_name(inst, p))).collect(),
        inst.k,
        copies * inst.m + copies - 1,
        |a, b| Ok(dist(resolve(a)?, resolve(b)?)),
    )
    .expect("point names are distinct");
    let facility_points = center
        .facility_ids()
        .iter()
        .map(|id| resolve(id).expect("center ids come from point names"))
        .collect();
    SupplierCenterReduction {
        center,
        copies,
        facility_points,
    }
}

impl SupplierCenterReduction {
    /// Turns a center solution of radius `R` into a supplier solution of
    /// radius at most `R` by rerouting clients through a lower-bounded flow.
    pub fn back_translate(&self, inst: &Instance, center_sol: &Solution) -> Result<Solution> {
        let open: Vec<usize> = center_sol
            .open
            .iter()
            .map(|&x| match self.facility_points[x] {
                Point::Facility(i) => Ok(i),
                Point::ClientCopy(..) => Err(Error::Precondition(format!("center `{}` is a client copy", self.center.facility_id(x)))),
            })
            .collect::<Result<_>>()?;
        let radius = &center_sol.cost;
        let assignment = assign_by_flow(inst, &open, inst.m, |x, j| inst.c(open[x], j) <= radius).ok_or(Error::Infeasible)?;
        Ok(Solution::from_assignment(inst, open, assignment, Objective::MaxRadius))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::e1;
    use crate::oracle::brute_force_supplier;
    use crate::solution::validate_solution;

    #[test]
    fn e1_sizes() {
        let r = reduce_supplier_to_center(&e1());
        assert_eq!(r.copies, 3);
        assert_eq!(r.center.nc(), 11);
        assert_eq!(r.center.nf(), 11);
        let a = r.center.facility_index("F:f.a").unwrap();
        assert_eq!(r.center.lower_bound(a), 3);
        assert_eq!(r.center.m, 2);
        assert!(r.center.is_valid());
    }

    #[test]
    fn e1_round_trip() {
        let inst = e1();
        let r = reduce_supplier_to_center(&inst);
        let center = brute_force_supplier(&r.center).unwrap();
        let orig = brute_force_supplier(&inst).unwrap();
        assert!(center.cost <= orig.cost);
        let back = r.back_translate(&inst, &center).unwrap();
        assert!(validate_solution(&inst, &back).is_valid());
        assert!(back.cost <= center.cost);
    }
}
