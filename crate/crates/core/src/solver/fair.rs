//! Proportional fairness: an exact-window greedy and the block greedy.
//!
//! The block greedy matches each platform a union of disjoint blocks of size
//! `l_j`, every block holding between `max(0, ceil(alpha*l_j) - 3)` and
//! `floor(beta*l_j) + 3` items of each group. Summing over blocks gives the
//! additive window `(alpha - 3/l_j)|M_j| <= |M_j ∩ C| <= (beta + 3/l_j)|M_j|`.

use crate::model::{Assignment, FairInstance, FairPlatform, FairReport, ItemId, PlatformId};

/// Per-group count windows for one block of a platform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec {
    pub platform: PlatformId,
    pub size: usize,
    pub windows: Vec<(usize, usize)>,
}

impl BlockSpec {
    pub fn new(platform: PlatformId, p: &FairPlatform) -> Self {
        let l = p.lb as u64;
        let windows = p
            .groups
            .iter()
            .map(|g| {
                let lo = g.alpha.ceil_mul(l).saturating_sub(3) as usize;
                let hi = g.beta.floor_mul(l) as usize + 3;
                (lo, hi)
            })
            .collect();
        BlockSpec { platform, size: p.lb, windows }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FairError {
    #[error("platform order is not a permutation of 0..{platform_count}")]
    NotPermutation { platform_count: usize },
    #[error("platform {0} has groups that do not partition its neighbors")]
    NotPartition(PlatformId),
    #[error(transparent)]
    Assignment(#[from] crate::model::AssignmentError),
}

/// Free members of each group, ascending. `None` if some neighbor lies in no group.
fn free_by_group(p: &FairPlatform, free: &[bool]) -> Option<Vec<Vec<ItemId>>> {
    let covered: usize = p.groups.iter().map(|g| g.members.len()).sum();
    if covered != p.neighbors.len() {
        return None;
    }
    Some(
        p.groups
            .iter()
            .map(|g| g.members.iter().copied().filter(|&i| free[i]).collect())
            .collect(),
    )
}

/// Builds one block of exactly `spec.size` free items within the windows, or
/// `None`. Exact when the groups partition the neighbors: it succeeds iff
/// every `lo_i <= free_i`, `sum lo_i <= size` and `sum min(hi_i, free_i) >= size`.
pub fn construct_block(p: &FairPlatform, free: &[bool], spec: &BlockSpec) -> Option<Vec<ItemId>> {
    let by_group = free_by_group(p, free)?;
    let lo_sum: usize = spec.windows.iter().map(|w| w.0).sum();
    let cap_sum: usize = spec.windows.iter().zip(&by_group).map(|(w, f)| w.1.min(f.len())).sum();
    if lo_sum > spec.size || cap_sum < spec.size || spec.windows.iter().zip(&by_group).any(|(w, f)| w.0 > f.len()) {
        return None;
    }
    let mut count = vec![0usize; by_group.len()];
    let mut block = Vec::with_capacity(spec.size);
    for (g, members) in by_group.iter().enumerate() {
        block.extend_from_slice(&members[..spec.windows[g].0]);
        count[g] = spec.windows[g].0;
    }
    // top up in id order, skipping items already in the block or in a full group
    let mut group_of: Vec<(ItemId, usize)> = by_group
        .iter()
        .enumerate()
        .flat_map(|(g, m)| m.iter().skip(spec.windows[g].0).map(move |&i| (i, g)))
        .collect();
    group_of.sort_unstable();
    for (item, g) in group_of {
        if block.len() == spec.size {
            break;
        }
        if count[g] < spec.windows[g].1 {
            count[g] += 1;
            block.push(item);
        }
    }
    debug_assert_eq!(block.len(), spec.size);
    block.sort_unstable();
    Some(block)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairSolution {
    pub assignment: Assignment,
    pub report: FairReport,
    /// Blocks matched per platform (always 0 or 1 for the naive algorithm).
    pub blocks: Vec<usize>,
}

fn check_order(inst: &FairInstance, order: &[PlatformId]) -> Result<(), FairError> {
    let m = inst.platforms.len();
    let mut seen = vec![false; m];
    if order.len() != m || !order.iter().all(|&j| j < m && !std::mem::replace(&mut seen[j], true)) {
        return Err(FairError::NotPermutation { platform_count: m });
    }
    Ok(())
}

/// Picks, for one platform, the smallest size `s` in `[lb, ub]` admitting a
/// subset that meets the exact windows `[ceil(alpha*s), floor(beta*s)]`.
fn exact_window_subset(p: &FairPlatform, by_group: &[Vec<ItemId>]) -> Option<Vec<ItemId>> {
    let available: usize = by_group.iter().map(Vec::len).sum();
    for s in p.lb..=p.ub.min(available) {
        let mut lows = Vec::with_capacity(by_group.len());
        let mut highs = Vec::with_capacity(by_group.len());
        for (g, members) in p.groups.iter().zip(by_group) {
            lows.push(g.alpha.ceil_mul(s as u64) as usize);
            highs.push((g.beta.floor_mul(s as u64) as usize).min(members.len()));
        }
        if lows.iter().zip(&highs).any(|(l, h)| l > h) {
            continue;
        }
        let lo_sum: usize = lows.iter().sum();
        let hi_sum: usize = highs.iter().sum();
        if lo_sum > s || hi_sum < s {
            continue;
        }
        let mut remainder = s - lo_sum;
        let mut subset = Vec::with_capacity(s);
        for (g, members) in by_group.iter().enumerate() {
            let extra = (highs[g] - lows[g]).min(remainder);
            remainder -= extra;
            subset.extend_from_slice(&members[..lows[g] + extra]);
        }
        subset.sort_unstable();
        return Some(subset);
    }
    None
}

/// One subset per platform meeting the exact constraints, in `order`.
pub fn solve_fair_naive(inst: &FairInstance, order: &[PlatformId]) -> Result<FairSolution, FairError> {
    check_order(inst, order)?;
    let mut free = vec![true; inst.item_count];
    let mut assignment = Assignment::empty(inst.item_count);
    let mut blocks = vec![0; inst.platforms.len()];
    for &j in order {
        let p = &inst.platforms[j];
        let by_group = free_by_group(p, &free).ok_or(FairError::NotPartition(j))?;
        if let Some(subset) = exact_window_subset(p, &by_group) {
            for &i in &subset {
                free[i] = false;
                assignment.assign(i, j);
            }
            blocks[j] = 1;
        }
    }
    let report = FairReport::evaluate(inst, &assignment)?;
    Ok(FairSolution { assignment, report, blocks })
}

/// Block greedy: each platform takes up to `floor(ub/lb)` disjoint blocks.
pub fn solve_fair(inst: &FairInstance, order: &[PlatformId]) -> Result<FairSolution, FairError> {
    check_order(inst, order)?;
    let mut free = vec![true; inst.item_count];
    let mut assignment = Assignment::empty(inst.item_count);
    let mut blocks = vec![0; inst.platforms.len()];
    for &j in order {
        let p = &inst.platforms[j];
        if free_by_group(p, &free).is_none() {
            return Err(FairError::NotPartition(j));
        }
        let spec = BlockSpec::new(j, p);
        let cap = p.ub / p.lb.max(1);
        while blocks[j] < cap {
            let Some(block) = construct_block(p, &free, &spec) else { break };
            for &i in &block {
                free[i] = false;
                assignment.assign(i, j);
            }
            blocks[j] += 1;
        }
    }
    let report = FairReport::evaluate(inst, &assignment)?;
    Ok(FairSolution { assignment, report, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonical_order, FairGroup};
    use crate::ratio::Ratio;

    fn r(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn synthetic_parameters_window() {
        let items: Vec<usize> = (0..40).collect();
        let groups = items.chunks(2).map(|c| FairGroup::new(c.to_vec(), r(1, 40), r(1, 10))).collect();
        let p = FairPlatform::new(items, 10, 40, groups);
        let spec = BlockSpec::new(0, &p);
        assert_eq!(spec.windows.len(), 20);
        assert!(spec.windows.iter().all(|&w| w == (0, 4)));
    }

    #[test]
    fn lower_windows_too_large() {
        // alpha = 1 with lb 10: lo = 7 per group, 14 > 10
        let items: Vec<usize> = (0..20).collect();
        let p = FairPlatform::new(
            items.clone(),
            10,
            10,
            vec![
                FairGroup::new(items[..10].to_vec(), Ratio::ONE, Ratio::ONE),
                FairGroup::new(items[10..].to_vec(), Ratio::ONE, Ratio::ONE),
            ],
        );
        let spec = BlockSpec::new(0, &p);
        assert_eq!(spec.windows, vec![(7, 13), (7, 13)]);
        assert_eq!(construct_block(&p, &[true; 20], &spec), None);
    }

    #[test]
    fn naive_takes_both_items() {
        let inst = FairInstance {
            item_count: 2,
            platforms: vec![FairPlatform::new(vec![0, 1], 2, 2, vec![FairGroup::new(vec![0, 1], Ratio::ONE, Ratio::ONE)])],
        };
        let sol = solve_fair_naive(&inst, &canonical_order(1)).unwrap();
        assert_eq!(sol.assignment.matched_count(), 2);
        assert_eq!(sol.report.strict.matched_to_satisfied, 2);
    }

    #[test]
    fn naive_size_three_infeasible_with_halves() {
        // alpha = 1/2 for two groups: s = 3 needs 2 + 2 = 4 > 3; s = 4 works
        let items: Vec<usize> = (0..6).collect();
        let p = FairPlatform::new(
            items.clone(),
            3,
            4,
            vec![
                FairGroup::new(items[..3].to_vec(), r(1, 2), Ratio::ONE),
                FairGroup::new(items[3..].to_vec(), r(1, 2), Ratio::ONE),
            ],
        );
        let by_group = free_by_group(&p, &[true; 6]).unwrap();
        assert_eq!(exact_window_subset(&p, &by_group), Some(vec![0, 1, 3, 4]));
        let mut q = p.clone();
        q.ub = 3;
        assert_eq!(exact_window_subset(&q, &by_group), None);
    }

    #[test]
    fn block_count_capped_by_upper_bound() {
        let items: Vec<usize> = (0..40).collect();
        let inst = FairInstance {
            item_count: 40,
            platforms: vec![FairPlatform::new(
                items.clone(),
                10,
                25,
                vec![FairGroup::new(items, Ratio::ZERO, Ratio::ONE)],
            )],
        };
        let sol = solve_fair(&inst, &[0]).unwrap();
        assert_eq!(sol.blocks, vec![2]);
        assert_eq!(sol.assignment.matched_count(), 20);
        assert_eq!(sol.report.relaxed.matched_to_satisfied, 20);
    }

    #[test]
    fn rejects_uncovered_neighbor() {
        let inst = FairInstance {
            item_count: 2,
            platforms: vec![FairPlatform::new(vec![0, 1], 1, 1, vec![FairGroup::new(vec![0], Ratio::ZERO, Ratio::ONE)])],
        };
        assert_eq!(solve_fair(&inst, &[0]), Err(FairError::NotPartition(0)));
    }
}
