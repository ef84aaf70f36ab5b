//! Opening platforms on a region tree.
//!
//! The pipeline turns a [`TreeInstance`] into a budgeted rooted Steiner tree
//! instance and solves that exactly by dynamic programming over the budget
//! lattice:
//!
//! 1. [`fold_overall_bounds`] adds a "total items" coordinate when overall
//!    bounds or the item total can bind.
//! 2. [`reduce_base_to_intermediate`] prepends a zero root and rewrites bounds
//!    and rewards so that they telescope along every root-leaf path.
//! 3. [`reduce_intermediate_to_steiner`] moves each node's children sums onto
//!    the node, so choosing a node means opening all of its children.
//! 4. [`binarize`] replaces high-degree nodes by balanced binary gadgets.
//! 5. [`dp_solve`] fills the tables and backtracks one optimal subtree.
//! 6. [`extract_solution`] maps that subtree back to a satisfied frontier.

mod binarize;
mod dp;
mod extract;
mod reduce;

use crate::model::{has_errors, NodeId, TreeInstance, TreeSolution, Violation};

pub use binarize::binarize;
pub use dp::{dp_solve, dp_tables, DpOutcome, DpTable};
pub use extract::{chosen_from_steiner, extract_solution, ChosenSubtree};
pub use reduce::{fold_overall_bounds, reduce_base_to_intermediate, reduce_intermediate_to_steiner};

/// Default cap on the number of DP cells (nodes times budget lattice points).
pub const DEFAULT_CELL_LIMIT: usize = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrigin {
    Original(NodeId),
    SyntheticRoot,
    Filler,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerNode {
    pub children: Vec<usize>,
    pub cost: Vec<usize>,
    pub reward: u64,
    pub origin: NodeOrigin,
}

/// Rooted tree with vector costs, rewards and a budget vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerInstance {
    pub nodes: Vec<SteinerNode>,
    pub root: usize,
    pub budget: Vec<usize>,
}

impl SteinerInstance {
    pub fn max_children(&self) -> usize {
        self.nodes.iter().map(|v| v.children.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TreeOptions {
    pub cell_limit: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { cell_limit: DEFAULT_CELL_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("instance violates its invariants: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("dp needs {cells} cells, limit is {limit}")]
    TooLarge { cells: u128, limit: usize },
    #[error("back-mapped frontier does not fit the budget")]
    Infeasible,
}

pub(crate) fn require_valid(inst: &TreeInstance) -> Result<(), TreeError> {
    let v = inst.validate();
    if has_errors(&v) {
        return Err(TreeError::Invalid(v));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeOutcome {
    pub solution: TreeSolution,
    /// Optimal value found by the DP; equals `solution.total_reward`.
    pub dp_reward: u64,
}

/// Runs the whole pipeline on a validated instance.
pub fn solve_tree(inst: &TreeInstance, opts: TreeOptions) -> Result<TreeOutcome, TreeError> {
    require_valid(inst)?;
    let folded = fold_overall_bounds(inst);
    let intermediate = reduce_base_to_intermediate(&folded)?;
    let steiner = reduce_intermediate_to_steiner(&intermediate);
    let binary = binarize(&steiner);
    let dp = dp_solve(&binary, opts.cell_limit)?;
    let chosen = chosen_from_steiner(&binary, &dp.chosen);
    let solution = extract_solution(inst, &chosen)?;
    debug_assert_eq!(solution.total_reward, dp.reward);
    Ok(TreeOutcome { solution, dp_reward: dp.reward })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::model::{NodeSpec, TreeInstance};

    /// The seven-node, one-group example: n = 10, bounds 6 / 4,4 / 3,3,3,3.
    pub fn worked_tree() -> TreeInstance {
        let bounds = [6, 4, 4, 3, 3, 3, 3];
        let rewards = [0, 3, 3, 2, 2, 2, 2];
        let parents = [None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)];
        let specs = (0..7)
            .map(|i| NodeSpec { parent: parents[i], group_lb: vec![bounds[i]], lb: bounds[i], reward: rewards[i] })
            .collect();
        TreeInstance::from_parents(1, vec![10], 10, specs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_tree_solution;

    #[test]
    fn worked_tree_end_to_end() {
        let inst = fixtures::worked_tree();
        let out = solve_tree(&inst, TreeOptions::default()).unwrap();
        assert_eq!(out.dp_reward, 7);
        assert_eq!(out.solution.satisfied_nodes, vec![2, 3, 4]);
        let total: usize = out.solution.allocation.values().flatten().sum();
        assert_eq!(total, 10);
        check_tree_solution(&inst, &out.solution).unwrap();
    }

    #[test]
    fn invalid_instance_rejected() {
        let mut inst = fixtures::worked_tree();
        inst.nodes[0].group_lb = vec![9];
        assert!(matches!(solve_tree(&inst, TreeOptions::default()), Err(TreeError::Invalid(_))));
    }

    #[test]
    fn cell_limit_enforced() {
        let inst = fixtures::worked_tree();
        assert!(matches!(
            solve_tree(&inst, TreeOptions { cell_limit: 10 }),
            Err(TreeError::TooLarge { .. })
        ));
    }
}
