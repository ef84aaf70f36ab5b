//! Matching items to platforms under diversity constraints.
//!
//! Three problems share the item/platform model in [`model`]:
//!
//! * lower bounds: each platform needs enough matched neighbors overall and in
//!   each of its (possibly overlapping) groups; solved online by [`solve_lb`].
//! * proportional fairness: each group's share of a platform's matches lies in
//!   `[alpha, beta]`; solved online by [`solve_fair`] and [`solve_fair_naive`].
//! * region trees: open an antichain covering every root-leaf path, within
//!   group budgets, maximizing reward; solved exactly by [`solve_tree`].
//!
//! [`oracle`] holds exponential exact solvers for small instances, [`gen`] the
//! seeded instance generators and [`io`] the JSON formats.

pub mod gen;
pub mod io;
pub mod model;
pub mod oracle;
pub mod ratio;
pub mod solver;

pub use model::*;
pub use ratio::Ratio;
pub use solver::fair::{solve_fair, solve_fair_naive, FairError, FairSolution};
pub use solver::lb::{online_new_platform, solve_lb, LbError, LbSolution, LbStrategy, LbVariant, OnlineState};
pub use solver::tree::{solve_tree, TreeError, TreeOptions, TreeOutcome};
