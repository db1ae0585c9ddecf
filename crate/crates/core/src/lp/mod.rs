//! Exact linear programming: the covering LPs that gate each guess and the
//! small covering-knapsack LPs used to combine two primal-dual solutions.

pub mod covering;
pub mod knapsack;
pub(crate) mod simplex;

pub use covering::{solve_covering_lp, CoveringLpResult, LpStatus};
pub use knapsack::{extreme_point_optimum, AffineTerm, KnapsackLp, SideConstraint, Vertex};
