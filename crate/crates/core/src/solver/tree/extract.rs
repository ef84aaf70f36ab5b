use std::collections::{BTreeMap, BTreeSet};

use super::{NodeOrigin, SteinerInstance, TreeError};
use crate::model::{NodeId, TreeInstance, TreeSolution};

/// A chosen Steiner subtree in terms of the original tree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChosenSubtree {
    /// The synthetic root was chosen, so the original root is open.
    pub opened: bool,
    /// Original nodes whose children are opened.
    pub expanded: BTreeSet<NodeId>,
}

/// Drops fillers and keeps original identities.
pub fn chosen_from_steiner(inst: &SteinerInstance, chosen: &[usize]) -> ChosenSubtree {
    let mut out = ChosenSubtree::default();
    for &v in chosen {
        match inst.nodes[v].origin {
            NodeOrigin::SyntheticRoot => out.opened = true,
            NodeOrigin::Original(id) => {
                out.expanded.insert(id);
            }
            NodeOrigin::Filler => {}
        }
    }
    out
}

/// Frontier of the opened subtree with an allocation meeting every bound.
///
/// Each frontier node receives its group bounds, then is topped up to its
/// overall bound from the leftover group budgets in group order.
pub fn extract_solution(inst: &TreeInstance, chosen: &ChosenSubtree) -> Result<TreeSolution, TreeError> {
    if !chosen.opened {
        return Ok(TreeSolution {
            satisfied_nodes: Vec::new(),
            allocation: BTreeMap::new(),
            total_reward: 0,
            synthetic_root_only: true,
        });
    }
    let mut frontier = Vec::new();
    let mut stack = vec![inst.root];
    while let Some(v) = stack.pop() {
        let node = &inst.nodes[v];
        if chosen.expanded.contains(&v) && !node.is_leaf() {
            stack.extend(node.children.iter().copied());
        } else {
            frontier.push(v);
        }
    }
    frontier.sort_unstable();

    let mut remaining = inst.budget.clone();
    let mut supply = inst.total;
    let mut allocation = BTreeMap::new();
    for &v in &frontier {
        let node = &inst.nodes[v];
        for (r, &l) in remaining.iter_mut().zip(&node.group_lb) {
            *r = r.checked_sub(l).ok_or(TreeError::Infeasible)?;
        }
        supply = supply.checked_sub(node.group_lb.iter().sum()).ok_or(TreeError::Infeasible)?;
        allocation.insert(v, node.group_lb.clone());
    }
    for &v in &frontier {
        let counts = allocation.get_mut(&v).unwrap();
        let mut deficit = inst.nodes[v].demand() - counts.iter().sum::<usize>();
        for (c, r) in counts.iter_mut().zip(remaining.iter_mut()) {
            let take = deficit.min(*r).min(supply);
            *c += take;
            *r -= take;
            supply -= take;
            deficit -= take;
        }
        if deficit > 0 {
            return Err(TreeError::Infeasible);
        }
    }
    let total_reward = frontier.iter().map(|&v| inst.nodes[v].reward).sum();
    Ok(TreeSolution { satisfied_nodes: frontier, allocation, total_reward, synthetic_root_only: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_tree_solution, NodeSpec};
    use crate::solver::tree::fixtures::worked_tree;

    #[test]
    fn frontier_stops_at_unexpanded_nodes() {
        let inst = worked_tree();
        let chosen = ChosenSubtree { opened: true, expanded: [0, 1, 5].into_iter().collect() };
        let sol = extract_solution(&inst, &chosen).unwrap();
        assert_eq!(sol.satisfied_nodes, vec![2, 3, 4]);
        assert_eq!(sol.total_reward, 7);
        check_tree_solution(&inst, &sol).unwrap();
    }

    #[test]
    fn unopened_root_is_fallback() {
        let sol = extract_solution(&worked_tree(), &ChosenSubtree::default()).unwrap();
        assert!(sol.synthetic_root_only);
        check_tree_solution(&worked_tree(), &sol).unwrap();
    }

    #[test]
    fn overall_bound_topped_up_in_group_order() {
        let inst = TreeInstance::from_parents(
            2,
            vec![1, 5],
            6,
            vec![NodeSpec { parent: None, group_lb: vec![0, 1], lb: 4, reward: 2 }],
        );
        let chosen = ChosenSubtree { opened: true, expanded: BTreeSet::new() };
        let sol = extract_solution(&inst, &chosen).unwrap();
        assert_eq!(sol.allocation[&0], vec![1, 3]);
        check_tree_solution(&inst, &sol).unwrap();
    }

    #[test]
    fn over_budget_frontier_rejected() {
        let mut inst = worked_tree();
        inst.budget = vec![7];
        let chosen = ChosenSubtree { opened: true, expanded: [0].into_iter().collect() };
        assert_eq!(extract_solution(&inst, &chosen), Err(TreeError::Infeasible));
    }
}
