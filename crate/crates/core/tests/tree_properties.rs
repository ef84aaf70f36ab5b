use diverse_match::gen::{gen_tree, TreeParams};
use diverse_match::oracle::{exact_tree, OracleLimits};
use diverse_match::solver::tree::{
    binarize, dp_solve, fold_overall_bounds, reduce_base_to_intermediate, reduce_intermediate_to_steiner,
    DEFAULT_CELL_LIMIT,
};
use diverse_match::{check_tree_solution, solve_tree, TreeInstance, TreeOptions};
use proptest::prelude::*;

fn arb_tree() -> impl Strategy<Value = TreeInstance> {
    (1usize..=10, 1usize..=2, any::<u64>()).prop_map(|(nodes, k, seed)| {
        gen_tree(&TreeParams { nodes, k, max_leaf_bound: 4, max_leaf_reward: 6, max_budget: 12 }, seed).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pipeline_matches_exhaustive_oracle(inst in arb_tree()) {
        let out = solve_tree(&inst, TreeOptions::default()).unwrap();
        let opt = exact_tree(&inst, &OracleLimits::default()).unwrap();
        prop_assert_eq!(out.solution.total_reward, opt.total_reward);
        prop_assert_eq!(out.dp_reward, opt.total_reward);
        check_tree_solution(&inst, &out.solution).unwrap();
        check_tree_solution(&inst, &opt).unwrap();
    }

    #[test]
    fn binarization_preserves_optimum(inst in arb_tree()) {
        let steiner = reduce_intermediate_to_steiner(&reduce_base_to_intermediate(&fold_overall_bounds(&inst)).unwrap());
        let binary = binarize(&steiner);
        prop_assert!(binary.max_children() <= 2);
        let before = dp_solve(&steiner, DEFAULT_CELL_LIMIT).unwrap().reward;
        let after = dp_solve(&binary, DEFAULT_CELL_LIMIT).unwrap().reward;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn child_rewrite_splits_parent_exactly(inst in arb_tree()) {
        let inter = reduce_base_to_intermediate(&inst).unwrap();
        for v in &inst.nodes {
            if v.children.is_empty() {
                continue;
            }
            for g in 0..inst.k {
                let mut taken = 0;
                for &c in &v.children {
                    let (orig, t) = (inst.nodes[c].group_lb[g], inter.nodes[c].group_lb[g]);
                    prop_assert!(t <= orig);
                    taken += orig - t;
                }
                prop_assert_eq!(taken, v.group_lb[g]);
            }
            let taken: u64 = v.children.iter().map(|&c| inst.nodes[c].reward - inter.nodes[c].reward).sum();
            prop_assert_eq!(taken, v.reward);
        }
    }

    #[test]
    fn steiner_costs_telescope_to_frontier(inst in arb_tree(), expand_bits in any::<u16>()) {
        let steiner = reduce_intermediate_to_steiner(&reduce_base_to_intermediate(&inst).unwrap());
        let synthetic = inst.nodes.len();
        // expand a random downward-closed set of inner nodes, starting at the root
        let mut chosen = vec![synthetic];
        let mut frontier = Vec::new();
        let mut stack = vec![inst.root];
        while let Some(v) = stack.pop() {
            if !inst.nodes[v].children.is_empty() && expand_bits >> (v % 16) & 1 == 1 {
                chosen.push(v);
                stack.extend(&inst.nodes[v].children);
            } else {
                frontier.push(v);
            }
        }
        for g in 0..inst.k {
            let cost: usize = chosen.iter().map(|&v| steiner.nodes[v].cost[g]).sum();
            let orig: usize = frontier.iter().map(|&v| inst.nodes[v].group_lb[g]).sum();
            prop_assert_eq!(cost, orig);
        }
        let reward: u64 = chosen.iter().map(|&v| steiner.nodes[v].reward).sum();
        prop_assert_eq!(reward, frontier.iter().map(|&v| inst.nodes[v].reward).sum::<u64>());
    }
}

#[test]
fn larger_trees_still_match_oracle() {
    for seed in 0..40 {
        let inst = gen_tree(&TreeParams { nodes: 16, k: 1, max_leaf_bound: 3, max_leaf_reward: 9, max_budget: 20 }, seed)
            .unwrap();
        let out = solve_tree(&inst, TreeOptions::default()).unwrap();
        let opt = exact_tree(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(out.solution.total_reward, opt.total_reward, "seed {seed}");
    }
}
