//! Lower-bounded clustering with exact rational arithmetic.
//!
//! Sum-of-radii (with and without outliers) is solved by guessing the largest
//! clusters, running a Lagrangian primal-dual routine on the residual instance
//! and translating the resulting balls back into an assignment. The k-supplier
//! variants use threshold graphs and lower-bounded flows.

pub mod audit;
pub mod error;
pub mod flow;
pub mod gen;
pub mod guess;
pub mod harness;
pub mod instance;
pub mod io;
pub mod kbs;
pub mod lp;
pub mod oracle;
pub mod par;
pub mod primal_dual;
pub mod rational;
pub mod solution;
pub mod sum_radii;
pub mod supplier;

pub use error::{Error, Result};
pub use guess::{enumerate_guesses, GuessContext};
pub use instance::{Instance, Pair};
pub use rational::Rational;
pub use solution::{validate_solution, Assignment, Objective, Solution};
