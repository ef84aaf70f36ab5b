use super::{require_valid, NodeOrigin, SteinerInstance, SteinerNode, TreeError};
use crate::model::{NodeSpec, TreeInstance};

/// Moves overall bounds into the group vector.
///
/// When some node's overall bound exceeds its group-bound sum, or the item
/// total is below the summed group budgets, a coordinate is appended holding
/// each node's demand `max(lb, sum of group bounds)` against the item supply
/// `min(total, sum of budgets)`. Demands obey the same monotonicity as the
/// bounds they come from. The returned instance has every `lb` set to 0.
pub fn fold_overall_bounds(inst: &TreeInstance) -> TreeInstance {
    let needs_total = inst.total < inst.budget.iter().sum::<usize>()
        || inst.nodes.iter().any(|v| v.lb > v.group_lb.iter().sum());
    let mut out = inst.clone();
    for v in &mut out.nodes {
        if needs_total {
            let demand = v.demand();
            v.group_lb.push(demand);
        }
        v.lb = 0;
    }
    if needs_total {
        out.k += 1;
        out.budget.push(inst.item_supply());
    }
    out
}

/// Splits `parent` over `children` greedily in child order: `x_i = min(child_i, remaining)`.
fn greedy_split(parent: u64, children: &[u64]) -> Vec<u64> {
    let mut remaining = parent;
    children
        .iter()
        .map(|&c| {
            let x = c.min(remaining);
            remaining -= x;
            c - x
        })
        .collect()
}

/// Prepends a zero-bound root and rewrites every child's group bounds and
/// reward so that, along any root-leaf path, the values of a sibling-closed
/// subtree telescope to the original values of its frontier.
///
/// Each node's children are rewritten against the node's original values, so
/// the result does not depend on processing order. Overall bounds are ignored;
/// fold them first with [`fold_overall_bounds`].
pub fn reduce_base_to_intermediate(inst: &TreeInstance) -> Result<TreeInstance, TreeError> {
    require_valid(inst)?;
    let n = inst.nodes.len();
    let mut specs: Vec<NodeSpec> = inst
        .nodes
        .iter()
        .map(|v| NodeSpec { parent: v.parent, group_lb: v.group_lb.clone(), lb: 0, reward: v.reward })
        .collect();
    specs[inst.root].parent = Some(n);
    specs.push(NodeSpec { parent: None, group_lb: vec![0; inst.k], lb: 0, reward: 0 });

    for v in &inst.nodes {
        if v.children.is_empty() {
            continue;
        }
        for g in 0..inst.k {
            let child_bounds: Vec<u64> = v.children.iter().map(|&c| inst.nodes[c].group_lb[g] as u64).collect();
            let rest = greedy_split(v.group_lb[g] as u64, &child_bounds);
            for (&c, t) in v.children.iter().zip(rest) {
                specs[c].group_lb[g] = t as usize;
            }
        }
        let child_rewards: Vec<u64> = v.children.iter().map(|&c| inst.nodes[c].reward).collect();
        for (&c, z) in v.children.iter().zip(greedy_split(v.reward, &child_rewards)) {
            specs[c].reward = z;
        }
    }
    let mut out = TreeInstance::from_parents(inst.k, inst.budget.clone(), inst.total, specs);
    // from_parents lists children in id order; keep the original child order
    for (id, v) in inst.nodes.iter().enumerate() {
        out.nodes[id].children = v.children.clone();
    }
    out.nodes[n].children = vec![inst.root];
    out.root = n;
    Ok(out)
}

/// Each node takes the summed bounds and rewards of its children; leaves
/// become free. Choosing a node then means opening all of its children.
pub fn reduce_intermediate_to_steiner(inst: &TreeInstance) -> SteinerInstance {
    let nodes = inst
        .nodes
        .iter()
        .enumerate()
        .map(|(id, v)| {
            let mut cost = vec![0; inst.k];
            let mut reward = 0;
            for &c in &v.children {
                for (acc, x) in cost.iter_mut().zip(&inst.nodes[c].group_lb) {
                    *acc += x;
                }
                reward += inst.nodes[c].reward;
            }
            let origin = if id == inst.root { NodeOrigin::SyntheticRoot } else { NodeOrigin::Original(id) };
            SteinerNode { children: v.children.clone(), cost, reward, origin }
        })
        .collect();
    SteinerInstance { nodes, root: inst.root, budget: inst.budget.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeSpec;
    use crate::solver::tree::fixtures::worked_tree;

    #[test]
    fn worked_tree_canonical_split() {
        let inter = reduce_base_to_intermediate(&worked_tree()).unwrap();
        let t: Vec<usize> = (0..7).map(|i| inter.nodes[i].group_lb[0]).collect();
        let z: Vec<u64> = (0..7).map(|i| inter.nodes[i].reward).collect();
        assert_eq!(t, vec![6, 0, 2, 0, 2, 0, 2]);
        assert_eq!(z, vec![0, 3, 3, 0, 1, 0, 1]);
        assert_eq!(inter.root, 7);
        assert_eq!(inter.nodes[7].group_lb, vec![0]);
        assert_eq!(inter.nodes[0].parent, Some(7));
    }

    #[test]
    fn worked_tree_steiner_costs_telescope() {
        let s = reduce_intermediate_to_steiner(&reduce_base_to_intermediate(&worked_tree()).unwrap());
        // subtree {root', p0, p1} opens p0, then p1 and p2, then p3 and p4
        let cost: usize = [7, 0, 1].iter().map(|&v| s.nodes[v].cost[0]).sum();
        assert_eq!(cost, 3 + 3 + 4);
        let reward: u64 = [7, 0, 1].iter().map(|&v| s.nodes[v].reward).sum();
        assert_eq!(reward, 7);
        for leaf in 3..7 {
            assert_eq!(s.nodes[leaf].cost, vec![0]);
            assert_eq!(s.nodes[leaf].reward, 0);
        }
    }

    #[test]
    fn single_node_becomes_chain() {
        let inst = TreeInstance::from_parents(
            1,
            vec![5],
            5,
            vec![NodeSpec { parent: None, group_lb: vec![2], lb: 2, reward: 4 }],
        );
        let inter = reduce_base_to_intermediate(&inst).unwrap();
        assert_eq!(inter.nodes.len(), 2);
        assert_eq!(inter.nodes[0].group_lb, vec![2]);
        assert_eq!(inter.nodes[0].reward, 4);
        assert_eq!(inter.nodes[1].children, vec![0]);
        let s = reduce_intermediate_to_steiner(&inter);
        assert_eq!(s.nodes[1].cost, vec![2]);
        assert_eq!(s.nodes[1].reward, 4);
    }

    #[test]
    fn chain_of_three() {
        let specs = vec![
            NodeSpec { parent: None, group_lb: vec![2], lb: 0, reward: 1 },
            NodeSpec { parent: Some(0), group_lb: vec![3], lb: 0, reward: 2 },
            NodeSpec { parent: Some(1), group_lb: vec![3], lb: 0, reward: 5 },
        ];
        let inst = TreeInstance::from_parents(1, vec![9], 9, specs);
        let s = reduce_intermediate_to_steiner(&reduce_base_to_intermediate(&inst).unwrap());
        // t = 2 | 1 | 0 ; z = 1 | 1 | 3
        assert_eq!(s.nodes[3].cost, vec![2]);
        assert_eq!(s.nodes[0].cost, vec![1]);
        assert_eq!(s.nodes[1].cost, vec![0]);
        assert_eq!(s.nodes[1].reward, 3);
    }

    #[test]
    fn folding_adds_total_coordinate_only_when_binding() {
        let plain = fold_overall_bounds(&worked_tree());
        assert_eq!(plain.k, 1);
        let mut tight = worked_tree();
        tight.total = 9;
        let folded = fold_overall_bounds(&tight);
        assert_eq!(folded.k, 2);
        assert_eq!(folded.budget, vec![10, 9]);
        assert_eq!(folded.nodes[1].group_lb, vec![4, 4]);
    }
}
