//! Online greedy solvers for the lower-bound and fairness problems, and the
//! exact tree solver.

pub mod fair;
pub mod lb;
pub mod tree;
