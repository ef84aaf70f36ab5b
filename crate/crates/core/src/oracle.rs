//! Exhaustive exact solvers for desk-scale instances.
//!
//! Every search refuses with [`OracleError::LimitExceeded`] instead of
//! approximating. Item sets are bitmasks, so `max_items` is capped at 32.

use std::collections::HashMap;

use crate::model::{Assignment, FairInstance, FairMode, LbInstance, NodeId, PlatformId, TreeInstance, TreeSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_items: usize,
    /// Total candidate sets over all platforms.
    pub max_candidates: usize,
    /// Memoized search states.
    pub max_states: usize,
    pub max_tree_nodes: usize,
    pub max_covers: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_items: 16,
            max_candidates: 1_000_000,
            max_states: 5_000_000,
            max_tree_nodes: 20,
            max_covers: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle refused: {what} is {value}, limit {limit}")]
    LimitExceeded { what: &'static str, value: usize, limit: usize },
}

fn refuse(what: &'static str, value: usize, limit: usize) -> Result<(), OracleError> {
    if value > limit {
        return Err(OracleError::LimitExceeded { what, value, limit });
    }
    Ok(())
}

fn items_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

fn mask_of(items: &[usize]) -> u32 {
    items.iter().fold(0, |m, &i| m | 1 << i)
}

/// Subsets of `mask`, ascending as integers.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
        Some(cur)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleWitness {
    pub value: usize,
    pub assignment: Assignment,
    pub satisfied: Vec<PlatformId>,
}

/// Memoized choice of at most one candidate per platform over disjoint item sets.
struct Packing<'a> {
    candidates: &'a [Vec<(u32, usize)>],
    memo: HashMap<(usize, u32), (usize, Option<u32>)>,
    max_states: usize,
}

impl Packing<'_> {
    fn best(&mut self, j: usize, used: u32) -> Result<usize, OracleError> {
        if j == self.candidates.len() {
            return Ok(0);
        }
        if let Some(&(v, _)) = self.memo.get(&(j, used)) {
            return Ok(v);
        }
        let mut best = (self.best(j + 1, used)?, None);
        for &(set, gain) in &self.candidates[j] {
            if set & used == 0 {
                let v = gain + self.best(j + 1, used | set)?;
                if v > best.0 {
                    best = (v, Some(set));
                }
            }
        }
        self.memo.insert((j, used), best);
        refuse("search states", self.memo.len(), self.max_states)?;
        Ok(best.0)
    }

    fn witness(&mut self, item_count: usize) -> Result<OracleWitness, OracleError> {
        let value = self.best(0, 0)?;
        let mut assignment = Assignment::empty(item_count);
        let mut satisfied = Vec::new();
        let mut used = 0;
        for j in 0..self.candidates.len() {
            if let Some(set) = self.memo[&(j, used)].1 {
                for i in items_of(set) {
                    assignment.assign(i, j);
                }
                satisfied.push(j);
                used |= set;
            }
        }
        Ok(OracleWitness { value, assignment, satisfied })
    }
}

/// Maximum number of simultaneously satisfiable platforms.
///
/// Candidates are the inclusion-minimal satisfying subsets of each platform's
/// neighbors: shrinking any matched set to a minimal one keeps it satisfied.
/// Platforms with nothing to satisfy have the empty set as their only
/// candidate. The witness lists platforms satisfied by the chosen sets.
pub fn exact_lb(inst: &LbInstance, limits: &OracleLimits) -> Result<OracleWitness, OracleError> {
    refuse("item count", inst.item_count, limits.max_items.min(32))?;
    let mut candidates = Vec::with_capacity(inst.platforms.len());
    let mut total = 0;
    for p in &inst.platforms {
        let groups: Vec<(u32, usize)> = p.groups.iter().map(|g| (mask_of(&g.members), g.lb)).collect();
        let ok = |s: u32| s.count_ones() as usize >= p.lb && groups.iter().all(|&(g, l)| (s & g).count_ones() as usize >= l);
        let neighbors = mask_of(&p.neighbors);
        let mut mine = Vec::new();
        for s in submasks(neighbors) {
            if ok(s) && items_of(s).all(|i| !ok(s & !(1 << i))) {
                mine.push((s, 1));
            }
        }
        total += mine.len();
        refuse("candidate sets", total, limits.max_candidates)?;
        candidates.push(mine);
    }
    Packing { candidates: &candidates, memo: HashMap::new(), max_states: limits.max_states }.witness(inst.item_count)
}

/// Maximum number of items matched to platforms meeting the exact size and
/// proportional windows. Items of unsatisfied platforms are left unmatched.
pub fn exact_fair(inst: &FairInstance, limits: &OracleLimits) -> Result<OracleWitness, OracleError> {
    refuse("item count", inst.item_count, limits.max_items.min(32))?;
    let mut candidates = Vec::with_capacity(inst.platforms.len());
    let mut total = 0;
    for p in &inst.platforms {
        let mut mine = Vec::new();
        for s in submasks(mask_of(&p.neighbors)) {
            let size = s.count_ones() as usize;
            if size < p.lb.max(1) || size > p.ub {
                continue;
            }
            let items: Vec<usize> = items_of(s).collect();
            if crate::model::fair_platform_satisfied(p, &items, FairMode::Strict) {
                mine.push((s, size));
            }
        }
        total += mine.len();
        refuse("candidate sets", total, limits.max_candidates)?;
        candidates.push(mine);
    }
    Packing { candidates: &candidates, memo: HashMap::new(), max_states: limits.max_states }.witness(inst.item_count)
}

/// All antichains meeting every root-leaf path exactly once, below `v`.
fn covers(inst: &TreeInstance, v: NodeId, limit: usize) -> Result<Vec<Vec<NodeId>>, OracleError> {
    let mut out = vec![vec![v]];
    let children = &inst.nodes[v].children;
    if children.is_empty() {
        return Ok(out);
    }
    let mut combos: Vec<Vec<NodeId>> = vec![Vec::new()];
    for &c in children {
        let sub = covers(inst, c, limit)?;
        refuse("covers", combos.len().saturating_mul(sub.len()), limit)?;
        combos = combos
            .iter()
            .flat_map(|base| {
                sub.iter().map(move |s| {
                    let mut next = base.clone();
                    next.extend_from_slice(s);
                    next
                })
            })
            .collect();
    }
    out.extend(combos);
    refuse("covers", out.len(), limit)?;
    Ok(out)
}

/// Allocation meeting every bound of `cover`, if one exists within the budget.
fn allocate(inst: &TreeInstance, cover: &[NodeId]) -> Option<Vec<Vec<usize>>> {
    let mut left = inst.budget.clone();
    let mut items = inst.total;
    let mut alloc = Vec::with_capacity(cover.len());
    for &v in cover {
        let node = &inst.nodes[v];
        let mut counts = Vec::with_capacity(inst.k);
        for (slot, &need) in left.iter_mut().zip(&node.group_lb) {
            *slot = slot.checked_sub(need)?;
            counts.push(need);
        }
        items = items.checked_sub(node.group_lb.iter().sum())?;
        alloc.push(counts);
    }
    for (&v, counts) in cover.iter().zip(&mut alloc) {
        let mut short = inst.nodes[v].lb.saturating_sub(counts.iter().sum());
        for g in 0..inst.k {
            let extra = short.min(left[g]).min(items);
            counts[g] += extra;
            left[g] -= extra;
            items -= extra;
            short -= extra;
        }
        if short > 0 {
            return None;
        }
    }
    Some(alloc)
}

/// Maximum reward over budget-feasible covers; when none fits, the empty
/// fallback with reward 0.
pub fn exact_tree(inst: &TreeInstance, limits: &OracleLimits) -> Result<TreeSolution, OracleError> {
    refuse("tree nodes", inst.nodes.len(), limits.max_tree_nodes)?;
    let mut best: Option<(u64, Vec<NodeId>, Vec<Vec<usize>>)> = None;
    for mut cover in covers(inst, inst.root, limits.max_covers)? {
        cover.sort_unstable();
        let Some(alloc) = allocate(inst, &cover) else { continue };
        let reward: u64 = cover.iter().map(|&v| inst.nodes[v].reward).sum();
        if best.as_ref().is_none_or(|b| reward > b.0) {
            best = Some((reward, cover, alloc));
        }
    }
    Ok(match best {
        Some((total_reward, cover, alloc)) => TreeSolution {
            allocation: cover.iter().copied().zip(alloc).collect(),
            satisfied_nodes: cover,
            total_reward,
            synthetic_root_only: false,
        },
        None => TreeSolution {
            satisfied_nodes: Vec::new(),
            allocation: Default::default(),
            total_reward: 0,
            synthetic_root_only: true,
        },
    })
}
