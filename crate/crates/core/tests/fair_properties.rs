use std::collections::BTreeSet;

use diverse_match::gen::gen_small_fair;
use diverse_match::oracle::{exact_fair, OracleLimits};
use diverse_match::solver::fair::{construct_block, BlockSpec};
use diverse_match::{canonical_order, fair_score, solve_fair, solve_fair_naive, Assignment, FairInstance, FairMode, FairPlatform};
use proptest::prelude::*;

/// Strict recount with the windows cross-multiplied by hand.
fn naive_strict(inst: &FairInstance, a: &Assignment) -> (BTreeSet<usize>, usize) {
    let mut sat = BTreeSet::new();
    let mut matched = 0;
    for (j, p) in inst.platforms.iter().enumerate() {
        let m: Vec<usize> = (0..inst.item_count).filter(|&i| a.item_to_platform[i] == Some(j)).collect();
        let s = m.len() as u64;
        let ok = s >= p.lb as u64
            && s <= p.ub as u64
            && s > 0
            && p.groups.iter().all(|g| {
                let c = m.iter().filter(|i| g.members.contains(i)).count() as u64;
                g.alpha.num() * s <= c * g.alpha.den() && c * g.beta.den() <= g.beta.num() * s
            });
        if ok {
            sat.insert(j);
            matched += m.len();
        }
    }
    (sat, matched)
}

/// Additive window `(alpha - 3/l) s <= c <= (beta + 3/l) s`, multiplied through by `den * l`.
fn relaxed_ok(p: &FairPlatform, m: &[usize]) -> bool {
    let s = m.len() as i128;
    let l = p.lb as i128;
    p.groups.iter().all(|g| {
        let c = m.iter().filter(|i| g.members.contains(i)).count() as i128;
        let (an, ad) = (g.alpha.num() as i128, g.alpha.den() as i128);
        let (bn, bd) = (g.beta.num() as i128, g.beta.den() as i128);
        (an * l - 3 * ad) * s <= c * ad * l && c * bd * l <= (bn * l + 3 * bd) * s
    })
}

/// Some `lb`-subset of the free neighbors meets every block window.
fn block_exists(p: &FairPlatform, free: &[bool], spec: &BlockSpec) -> bool {
    let cand: Vec<usize> = p.neighbors.iter().copied().filter(|&i| free[i]).collect();
    (0u32..1 << cand.len()).filter(|m| m.count_ones() as usize == spec.size).any(|mask| {
        let set: Vec<usize> = (0..cand.len()).filter(|b| mask >> b & 1 == 1).map(|b| cand[b]).collect();
        p.groups.iter().zip(&spec.windows).all(|(g, &(lo, hi))| {
            let c = set.iter().filter(|i| g.members.contains(i)).count();
            lo <= c && c <= hi
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strict_evaluator_matches_recount(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 12)) {
        let inst = gen_small_fair(12, 3, 3, seed);
        let mut a = Assignment::empty(inst.item_count);
        for (i, pick) in picks.iter().enumerate().take(inst.item_count) {
            let nbrs: Vec<usize> = (0..inst.platforms.len()).filter(|&j| inst.platforms[j].is_neighbor(i)).collect();
            let slot = pick.index(nbrs.len() + 1);
            if slot < nbrs.len() {
                a.assign(i, nbrs[slot]);
            }
        }
        let score = fair_score(&inst, &a, FairMode::Strict).unwrap();
        let (sat, matched) = naive_strict(&inst, &a);
        prop_assert_eq!(score.satisfied, sat);
        prop_assert_eq!(score.matched_to_satisfied, matched);
    }

    #[test]
    fn block_search_is_exact(seed in any::<u64>(), free_bits in any::<u16>()) {
        let inst = gen_small_fair(12, 3, 4, seed);
        let free: Vec<bool> = (0..inst.item_count).map(|i| free_bits >> i & 1 == 1).collect();
        for (j, p) in inst.platforms.iter().enumerate() {
            let spec = BlockSpec::new(j, p);
            let built = construct_block(p, &free, &spec);
            prop_assert_eq!(built.is_some(), block_exists(p, &free, &spec));
            if let Some(b) = built {
                prop_assert_eq!(b.len(), p.lb);
                prop_assert!(b.iter().all(|&i| free[i] && p.is_neighbor(i)));
            }
        }
    }

    #[test]
    fn block_greedy_guarantees(seed in any::<u64>()) {
        let inst = gen_small_fair(12, 3, 3, seed);
        let sol = solve_fair(&inst, &canonical_order(inst.platforms.len())).unwrap();
        let sets = sol.assignment.matched_sets(inst.platforms.len());
        for (j, p) in inst.platforms.iter().enumerate() {
            let m = &sets[j];
            prop_assert_eq!(m.len(), sol.blocks[j] * p.lb);
            if !m.is_empty() {
                prop_assert!(p.lb <= m.len() && m.len() <= p.ub);
                prop_assert!(relaxed_ok(p, m));
                prop_assert!(sol.report.relaxed.satisfied.contains(&j));
            }
        }
        let opt = exact_fair(&inst, &OracleLimits::default()).unwrap();
        prop_assert_eq!(naive_strict(&inst, &opt.assignment).1, opt.value);
        prop_assert!(sol.report.relaxed.matched_to_satisfied * 2 * (inst.ell_thm2() + 2) >= opt.value);
        prop_assert!(sol.report.strict.matched_to_satisfied <= opt.value);
    }

    #[test]
    fn naive_satisfies_strictly(seed in any::<u64>()) {
        let inst = gen_small_fair(12, 3, 3, seed);
        let sol = solve_fair_naive(&inst, &canonical_order(inst.platforms.len())).unwrap();
        let sets = sol.assignment.matched_sets(inst.platforms.len());
        let (strict, _) = naive_strict(&inst, &sol.assignment);
        for (j, m) in sets.iter().enumerate() {
            prop_assert_eq!(!m.is_empty(), strict.contains(&j));
        }
        let opt = exact_fair(&inst, &OracleLimits::default()).unwrap();
        prop_assert!(sol.report.strict.matched_to_satisfied <= opt.value);
    }
}
