use std::collections::BTreeSet;

use super::{
    Assignment, FairInstance, FairPlatform, ItemId, LbInstance, NodeId, PlatformId, TreeInstance,
    TreeSolution,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("assignment covers {found} items, instance has {expected}")]
    Length { expected: usize, found: usize },
    #[error("item {item} mapped to unknown platform {platform}")]
    UnknownPlatform { item: ItemId, platform: PlatformId },
    #[error("item {item} is not a neighbor of platform {platform}")]
    NotNeighbor { item: ItemId, platform: PlatformId },
}

fn check_assignment(
    item_count: usize,
    platform_count: usize,
    a: &Assignment,
    is_neighbor: impl Fn(PlatformId, ItemId) -> bool,
) -> Result<Vec<Vec<ItemId>>, AssignmentError> {
    if a.item_to_platform.len() != item_count {
        return Err(AssignmentError::Length { expected: item_count, found: a.item_to_platform.len() });
    }
    for (item, p) in a.item_to_platform.iter().enumerate() {
        if let Some(platform) = *p {
            if platform >= platform_count {
                return Err(AssignmentError::UnknownPlatform { item, platform });
            }
            if !is_neighbor(platform, item) {
                return Err(AssignmentError::NotNeighbor { item, platform });
            }
        }
    }
    Ok(a.matched_sets(platform_count))
}

/// Platforms whose overall and group lower bounds are all met by the assignment.
pub fn satisfied_lb_platforms(
    inst: &LbInstance,
    a: &Assignment,
) -> Result<BTreeSet<PlatformId>, AssignmentError> {
    let sets = check_assignment(inst.item_count, inst.platforms.len(), a, |p, i| {
        inst.platforms[p].is_neighbor(i)
    })?;
    Ok(inst
        .platforms
        .iter()
        .zip(&sets)
        .enumerate()
        .filter(|(_, (p, m))| p.is_satisfied_by(m))
        .map(|(j, _)| j)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FairMode {
    /// `alpha*|M| <= |M ∩ C| <= beta*|M|`.
    Strict,
    /// `(alpha - 3/l)*|M| <= |M ∩ C| <= (beta + 3/l)*|M|`, the window the block
    /// algorithm guarantees.
    Relaxed,
    /// `alpha*|M|*(1 - 3/l) <= |M ∩ C| <= beta*|M|*(1 + 3/l)`. Reported for
    /// comparison only; the block algorithm does not guarantee it.
    RelaxedMultiplicative,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FairScore {
    pub satisfied: BTreeSet<PlatformId>,
    pub matched_to_satisfied: usize,
}

/// All three fairness readings of one assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairReport {
    pub strict: FairScore,
    pub relaxed: FairScore,
    pub multiplicative: FairScore,
}

impl FairReport {
    pub fn evaluate(inst: &FairInstance, a: &Assignment) -> Result<Self, AssignmentError> {
        Ok(FairReport {
            strict: fair_score(inst, a, FairMode::Strict)?,
            relaxed: fair_score(inst, a, FairMode::Relaxed)?,
            multiplicative: fair_score(inst, a, FairMode::RelaxedMultiplicative)?,
        })
    }
}

/// Exact window test for one group count `c` out of a matched set of size `s`.
pub(crate) fn window_holds(p: &FairPlatform, group: usize, s: usize, c: usize, mode: FairMode) -> bool {
    let g = &p.groups[group];
    let (a_num, a_den) = (g.alpha.num() as i128, g.alpha.den() as i128);
    let (b_num, b_den) = (g.beta.num() as i128, g.beta.den() as i128);
    let (s, c, l) = (s as i128, c as i128, p.lb as i128);
    match mode {
        FairMode::Strict => g.alpha.mul_le(s as u64, c as u64) && g.beta.mul_ge(s as u64, c as u64),
        // (a/b - 3/l) s <= c  <=>  (a l - 3 b) s <= c b l
        FairMode::Relaxed => {
            (a_num * l - 3 * a_den) * s <= c * a_den * l && c * b_den * l <= (b_num * l + 3 * b_den) * s
        }
        // (a/b) s (1 - 3/l) <= c  <=>  a s (l - 3) <= c b l
        FairMode::RelaxedMultiplicative => {
            a_num * s * (l - 3) <= c * a_den * l && c * b_den * l <= b_num * s * (l + 3)
        }
    }
}

pub(crate) fn fair_platform_satisfied(p: &FairPlatform, matched: &[ItemId], mode: FairMode) -> bool {
    let s = matched.len();
    if s < p.lb || s > p.ub || s == 0 {
        return false;
    }
    (0..p.groups.len()).all(|g| {
        let c = matched.iter().filter(|&&i| p.groups[g].contains(i)).count();
        window_holds(p, g, s, c, mode)
    })
}

/// Satisfied platforms under `mode` and the number of items matched to them.
pub fn fair_score(inst: &FairInstance, a: &Assignment, mode: FairMode) -> Result<FairScore, AssignmentError> {
    let sets = check_assignment(inst.item_count, inst.platforms.len(), a, |p, i| {
        inst.platforms[p].is_neighbor(i)
    })?;
    let mut score = FairScore::default();
    for (j, (p, m)) in inst.platforms.iter().zip(&sets).enumerate() {
        if fair_platform_satisfied(p, m, mode) {
            score.satisfied.insert(j);
            score.matched_to_satisfied += m.len();
        }
    }
    Ok(score)
}

/// Fixed instance-independent processing order: ascending platform id.
pub fn canonical_order(platform_count: usize) -> Vec<PlatformId> {
    (0..platform_count).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeSolutionError {
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("satisfied nodes {0} and {1} lie on one root-leaf path")]
    NotAntichain(NodeId, NodeId),
    #[error("root-leaf path ending at leaf {0} has no satisfied node")]
    UncoveredPath(NodeId),
    #[error("allocation of node {0} misses its bounds")]
    BoundsMissed(NodeId),
    #[error("allocation exceeds the item budget")]
    OverBudget,
    #[error("total reward {found} differs from recomputed {expected}")]
    RewardMismatch { expected: u64, found: u64 },
    #[error("allocation lists node {0} which is not satisfied")]
    StrayAllocation(NodeId),
}

/// Checks every invariant of a tree solution against its instance.
pub fn check_tree_solution(inst: &TreeInstance, sol: &TreeSolution) -> Result<(), TreeSolutionError> {
    let n = inst.nodes.len();
    for &v in &sol.satisfied_nodes {
        if v >= n {
            return Err(TreeSolutionError::UnknownNode(v));
        }
    }
    let chosen: BTreeSet<NodeId> = sol.satisfied_nodes.iter().copied().collect();
    if sol.synthetic_root_only {
        if !chosen.is_empty() || !sol.allocation.is_empty() || sol.total_reward != 0 {
            return Err(TreeSolutionError::RewardMismatch { expected: 0, found: sol.total_reward });
        }
        return Ok(());
    }
    for path in inst.root_leaf_paths() {
        let hits: Vec<NodeId> = path.iter().copied().filter(|v| chosen.contains(v)).collect();
        match hits.as_slice() {
            [] => return Err(TreeSolutionError::UncoveredPath(*path.last().unwrap())),
            [_] => {}
            [a, b, ..] => return Err(TreeSolutionError::NotAntichain(*a, *b)),
        }
    }
    let mut used = vec![0usize; inst.k];
    for (&v, counts) in &sol.allocation {
        if !chosen.contains(&v) {
            return Err(TreeSolutionError::StrayAllocation(v));
        }
        if counts.len() != inst.k {
            return Err(TreeSolutionError::BoundsMissed(v));
        }
        for (u, c) in used.iter_mut().zip(counts) {
            *u += c;
        }
    }
    for &v in &chosen {
        let node = &inst.nodes[v];
        let counts = sol.allocation.get(&v).cloned().unwrap_or_else(|| vec![0; inst.k]);
        let ok = counts.iter().zip(&node.group_lb).all(|(c, l)| c >= l)
            && counts.iter().sum::<usize>() >= node.lb;
        if !ok {
            return Err(TreeSolutionError::BoundsMissed(v));
        }
    }
    if used.iter().zip(&inst.budget).any(|(u, b)| u > b) || used.iter().sum::<usize>() > inst.total {
        return Err(TreeSolutionError::OverBudget);
    }
    let expected: u64 = chosen.iter().map(|&v| inst.nodes[v].reward).sum();
    if expected != sol.total_reward {
        return Err(TreeSolutionError::RewardMismatch { expected, found: sol.total_reward });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FairGroup, LbGroup, LbPlatform};
    use crate::ratio::Ratio;

    #[test]
    fn vacuous_platform_is_satisfied() {
        let inst = LbInstance { item_count: 2, platforms: vec![LbPlatform::new(vec![0, 1], 0, vec![])] };
        let sat = satisfied_lb_platforms(&inst, &Assignment::empty(2)).unwrap();
        assert_eq!(sat, BTreeSet::from([0]));
    }

    #[test]
    fn unmatched_platform_with_bound_is_not_satisfied() {
        let inst = LbInstance { item_count: 2, platforms: vec![LbPlatform::new(vec![0, 1], 1, vec![])] };
        assert!(satisfied_lb_platforms(&inst, &Assignment::empty(2)).unwrap().is_empty());
    }

    #[test]
    fn non_neighbor_assignment_rejected() {
        let inst = LbInstance {
            item_count: 3,
            platforms: vec![LbPlatform::new(vec![0, 1], 1, vec![LbGroup::new(vec![0], 1)])],
        };
        let mut a = Assignment::empty(3);
        a.assign(2, 0);
        assert_eq!(
            satisfied_lb_platforms(&inst, &a),
            Err(AssignmentError::NotNeighbor { item: 2, platform: 0 })
        );
    }

    fn ten_item_platform(alpha: Ratio) -> FairInstance {
        let items: Vec<usize> = (0..10).collect();
        FairInstance {
            item_count: 10,
            platforms: vec![FairPlatform::new(
                items.clone(),
                10,
                10,
                vec![
                    FairGroup::new(items[..3].to_vec(), alpha, Ratio::ONE),
                    FairGroup::new(items[3..].to_vec(), Ratio::ZERO, Ratio::ONE),
                ],
            )],
        }
    }

    #[test]
    fn relaxed_window_admits_what_strict_rejects() {
        // |M| = 10, l = 10, group of 3 with alpha = 1/2: strict needs 5, relaxed needs (1/2 - 3/10)*10 = 2
        let inst = ten_item_platform(Ratio::new(1, 2).unwrap());
        let mut a = Assignment::empty(10);
        for i in 0..10 {
            a.assign(i, 0);
        }
        assert!(fair_score(&inst, &a, FairMode::Strict).unwrap().satisfied.is_empty());
        let relaxed = fair_score(&inst, &a, FairMode::Relaxed).unwrap();
        assert_eq!(relaxed.satisfied, BTreeSet::from([0]));
        assert_eq!(relaxed.matched_to_satisfied, 10);
        // multiplicative: 1/2 * 10 * (1 - 3/10) = 3.5 > 3
        assert!(fair_score(&inst, &a, FairMode::RelaxedMultiplicative).unwrap().satisfied.is_empty());
    }

    #[test]
    fn empty_fair_platform_never_satisfied() {
        let inst = ten_item_platform(Ratio::ZERO);
        for mode in [FairMode::Strict, FairMode::Relaxed, FairMode::RelaxedMultiplicative] {
            assert!(fair_score(&inst, &Assignment::empty(10), mode).unwrap().satisfied.is_empty());
        }
    }

    #[test]
    fn canonical_order_is_ascending() {
        assert_eq!(canonical_order(3), vec![0, 1, 2]);
        assert!(canonical_order(0).is_empty());
    }
}
