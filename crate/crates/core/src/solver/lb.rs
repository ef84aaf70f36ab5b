//! Greedy satisfying-set construction for platforms with group lower bounds.
//!
//! Each platform in turn receives a set `S` of free neighbors meeting every
//! group bound with `l_j <= |S| <= max(l_j, sum_k l_j^(k))`, or is skipped.
//! This is greedy matching in the implicit hypergraph whose hyperedges are the
//! satisfying sets; the hypergraph itself is never built.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::model::{satisfied_lb_platforms, Assignment, ItemId, LbInstance, LbPlatform, PlatformId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LbVariant {
    /// Plain greedy, items taken in ascending id order.
    Base,
    /// Prefer items adjacent to the fewest not-yet-processed platforms.
    MinDegree,
    /// Base order, plus short augmenting moves when a platform falls short.
    Augmenting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LbStrategy {
    pub variant: LbVariant,
    /// Breaks equal-degree ties under [`LbVariant::MinDegree`]; unused otherwise.
    pub rng_seed: u64,
}

impl LbStrategy {
    pub fn new(variant: LbVariant, rng_seed: u64) -> Self {
        LbStrategy { variant, rng_seed }
    }

    pub fn base() -> Self {
        LbStrategy::new(LbVariant::Base, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LbError {
    #[error("platform order is not a permutation of 0..{platform_count}")]
    NotPermutation { platform_count: usize },
    #[error("platform {0} already arrived")]
    DuplicateArrival(PlatformId),
    #[error("platform {platform} lists item {item}, beyond the {item_count} known items")]
    ItemOutOfRange { platform: PlatformId, item: ItemId, item_count: usize },
}

/// Order in which candidate items are offered to a platform.
#[derive(Debug, Clone, Copy)]
pub enum ItemOrder<'a> {
    ById,
    /// Ascending remaining degree, then a seeded hash, then id.
    ByDegree { degree: &'a [usize], seed: u64 },
}

fn ordered_candidates(p: &LbPlatform, free: &[bool], order: ItemOrder<'_>) -> Vec<ItemId> {
    let mut cand: Vec<ItemId> = p.neighbors.iter().copied().filter(|&i| free[i]).collect();
    if let ItemOrder::ByDegree { degree, seed } = order {
        cand.sort_by_key(|&i| (degree[i], crate::gen::substream_seed(seed, i as u64), i));
    }
    cand
}

/// Builds a satisfying set for `p` from the free items, or `None`.
///
/// Groups are filled in declaration order; an item already in the set counts
/// toward every group containing it. The set is then topped up to `p.lb`.
/// For pairwise disjoint groups this succeeds whenever any satisfying subset
/// of the free neighbors exists.
pub fn construct_satisfying_set(p: &LbPlatform, free: &[bool], order: ItemOrder<'_>) -> Option<Vec<ItemId>> {
    let cand = ordered_candidates(p, free, order);
    if cand.len() < p.lb {
        return None;
    }
    let position: HashMap<ItemId, usize> = cand.iter().enumerate().map(|(pos, &i)| (i, pos)).collect();
    let mut groups_of: Vec<Vec<usize>> = vec![Vec::new(); cand.len()];
    let mut member_pos: Vec<Vec<usize>> = Vec::with_capacity(p.groups.len());
    for (g, group) in p.groups.iter().enumerate() {
        let mut pos: Vec<usize> = group.members.iter().filter_map(|i| position.get(i).copied()).collect();
        if pos.len() < group.lb {
            return None;
        }
        pos.sort_unstable();
        for &x in &pos {
            groups_of[x].push(g);
        }
        member_pos.push(pos);
    }

    let mut have = vec![0usize; p.groups.len()];
    let mut taken = vec![false; cand.len()];
    let mut chosen = Vec::new();
    let take = |x: usize, taken: &mut [bool], have: &mut [usize], chosen: &mut Vec<usize>| {
        taken[x] = true;
        chosen.push(x);
        for &g in &groups_of[x] {
            have[g] += 1;
        }
    };
    for (g, group) in p.groups.iter().enumerate() {
        for &x in &member_pos[g] {
            if have[g] >= group.lb {
                break;
            }
            if !taken[x] {
                take(x, &mut taken, &mut have, &mut chosen);
            }
        }
        if have[g] < group.lb {
            return None;
        }
    }
    let mut next = 0;
    while chosen.len() < p.lb {
        while next < cand.len() && taken[next] {
            next += 1;
        }
        if next == cand.len() {
            return None;
        }
        take(next, &mut taken, &mut have, &mut chosen);
    }
    let mut set: Vec<ItemId> = chosen.into_iter().map(|x| cand[x]).collect();
    set.sort_unstable();
    Some(set)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Satisfied(Vec<ItemId>),
    Skipped,
}

/// State of the greedy while platforms arrive one at a time.
#[derive(Debug, Clone)]
pub struct OnlineState {
    free: Vec<bool>,
    assignment: Assignment,
    satisfied: BTreeSet<PlatformId>,
    arrived: HashSet<PlatformId>,
    /// Satisfied platforms with their definition and current matched set.
    matched: HashMap<PlatformId, (LbPlatform, Vec<ItemId>)>,
    remaining_degree: Vec<usize>,
}

impl OnlineState {
    pub fn new(item_count: usize) -> Self {
        OnlineState::with_degrees(vec![0; item_count])
    }

    /// Seeds the state with the number of platforms each item will be offered
    /// to, which the min-degree variant consumes.
    pub fn with_degrees(degrees: Vec<usize>) -> Self {
        let n = degrees.len();
        OnlineState {
            free: vec![true; n],
            assignment: Assignment::empty(n),
            satisfied: BTreeSet::new(),
            arrived: HashSet::new(),
            matched: HashMap::new(),
            remaining_degree: degrees,
        }
    }

    pub fn free(&self) -> &[bool] {
        &self.free
    }

    pub fn free_count(&self) -> usize {
        self.free.iter().filter(|&&f| f).count()
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn satisfied(&self) -> &BTreeSet<PlatformId> {
        &self.satisfied
    }

    pub fn into_parts(self) -> (Assignment, BTreeSet<PlatformId>) {
        (self.assignment, self.satisfied)
    }

    /// Processes one arriving platform. Decisions are final except that the
    /// augmenting variant may later move items between satisfied platforms
    /// without unsatisfying any of them.
    pub fn new_platform(&mut self, id: PlatformId, p: &LbPlatform, strategy: &LbStrategy) -> Result<Decision, LbError> {
        if let Some(&item) = p.neighbors.iter().find(|&&i| i >= self.free.len()) {
            return Err(LbError::ItemOutOfRange { platform: id, item, item_count: self.free.len() });
        }
        if !self.arrived.insert(id) {
            return Err(LbError::DuplicateArrival(id));
        }
        for &i in &p.neighbors {
            self.remaining_degree[i] = self.remaining_degree[i].saturating_sub(1);
        }
        let built = match strategy.variant {
            LbVariant::Base => construct_satisfying_set(p, &self.free, ItemOrder::ById),
            LbVariant::MinDegree => construct_satisfying_set(
                p,
                &self.free,
                ItemOrder::ByDegree { degree: &self.remaining_degree, seed: strategy.rng_seed },
            ),
            LbVariant::Augmenting => match construct_satisfying_set(p, &self.free, ItemOrder::ById) {
                Some(s) => Some(s),
                None => self.augment_for(p),
            },
        };
        Ok(match built {
            Some(set) => {
                self.commit(id, p, &set);
                Decision::Satisfied(set)
            }
            None => Decision::Skipped,
        })
    }

    fn commit(&mut self, id: PlatformId, p: &LbPlatform, set: &[ItemId]) {
        for &i in set {
            self.free[i] = false;
            self.assignment.assign(i, id);
        }
        self.satisfied.insert(id);
        self.matched.insert(id, (p.clone(), set.to_vec()));
    }

    /// Frees neighbors of `p` held by satisfied platforms through moves of at
    /// most two reassignments, until a satisfying set exists. Every move is
    /// undone if `p` still cannot be satisfied.
    fn augment_for(&mut self, p: &LbPlatform) -> Option<Vec<ItemId>> {
        let mut journal: Vec<Move> = Vec::new();
        loop {
            if let Some(set) = construct_satisfying_set(p, &self.free, ItemOrder::ById) {
                return Some(set);
            }
            let short_groups: Vec<usize> = p
                .groups
                .iter()
                .enumerate()
                .filter(|(_, g)| g.members.iter().filter(|&&i| self.free[i]).count() < g.lb)
                .map(|(g, _)| g)
                .collect();
            let free_neighbors = p.neighbors.iter().filter(|&&i| self.free[i]).count();
            if short_groups.is_empty() && free_neighbors >= p.lb {
                break;
            }
            let wanted: Vec<ItemId> = p
                .neighbors
                .iter()
                .copied()
                .filter(|&i| !self.free[i])
                .filter(|&i| short_groups.is_empty() || short_groups.iter().any(|&g| p.groups[g].contains(i)))
                .collect();
            match self.find_release(&wanted).or_else(|| self.find_swap(&wanted, p)) {
                Some(mv) => {
                    self.apply(mv);
                    journal.push(mv);
                }
                None => break,
            }
        }
        for mv in journal.into_iter().rev() {
            self.revert(mv);
        }
        None
    }

    /// One reassignment: a surplus item leaves its platform.
    fn find_release(&self, wanted: &[ItemId]) -> Option<Move> {
        wanted.iter().find_map(|&x| {
            let holder = self.assignment.platform_of(x)?;
            let (qp, m) = &self.matched[&holder];
            still_satisfied(qp, m, x, None).then_some(Move { holder, out: x, replacement: None })
        })
    }

    /// Two reassignments: the holder of `x` takes a free item outside `N(p)` instead.
    fn find_swap(&self, wanted: &[ItemId], p: &LbPlatform) -> Option<Move> {
        wanted.iter().find_map(|&x| {
            let holder = self.assignment.platform_of(x)?;
            let (qp, m) = &self.matched[&holder];
            qp.neighbors
                .iter()
                .copied()
                .find(|&y| self.free[y] && !p.is_neighbor(y) && still_satisfied(qp, m, x, Some(y)))
                .map(|y| Move { holder, out: x, replacement: Some(y) })
        })
    }

    fn apply(&mut self, mv: Move) {
        let set = &mut self.matched.get_mut(&mv.holder).expect("holder is satisfied").1;
        set.retain(|&i| i != mv.out);
        self.free[mv.out] = true;
        self.assignment.unassign(mv.out);
        if let Some(y) = mv.replacement {
            set.push(y);
            set.sort_unstable();
            self.free[y] = false;
            self.assignment.assign(y, mv.holder);
        }
    }

    fn revert(&mut self, mv: Move) {
        let set = &mut self.matched.get_mut(&mv.holder).expect("holder is satisfied").1;
        if let Some(y) = mv.replacement {
            set.retain(|&i| i != y);
            self.free[y] = true;
            self.assignment.unassign(y);
        }
        set.push(mv.out);
        set.sort_unstable();
        self.free[mv.out] = false;
        self.assignment.assign(mv.out, mv.holder);
    }
}

#[derive(Debug, Clone, Copy)]
struct Move {
    holder: PlatformId,
    out: ItemId,
    replacement: Option<ItemId>,
}

fn still_satisfied(q: &LbPlatform, matched: &[ItemId], out: ItemId, replacement: Option<ItemId>) -> bool {
    let size = matched.len() - 1 + usize::from(replacement.is_some());
    size >= q.lb
        && q.groups.iter().all(|g| {
            let count = matched.iter().filter(|&&i| g.contains(i)).count() - usize::from(g.contains(out))
                + usize::from(replacement.is_some_and(|y| g.contains(y)));
            count >= g.lb
        })
}

/// Free-function form of [`OnlineState::new_platform`].
pub fn online_new_platform(
    state: &mut OnlineState,
    id: PlatformId,
    p: &LbPlatform,
    strategy: &LbStrategy,
) -> Result<Decision, LbError> {
    state.new_platform(id, p, strategy)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbSolution {
    pub assignment: Assignment,
    pub satisfied: BTreeSet<PlatformId>,
    /// Satisfied count after each processed platform, in order.
    pub progress: Vec<usize>,
}

fn check_permutation(order: &[PlatformId], platform_count: usize) -> Result<(), LbError> {
    let mut seen = vec![false; platform_count];
    let ok = order.len() == platform_count
        && order.iter().all(|&j| j < platform_count && !std::mem::replace(&mut seen[j], true));
    if ok {
        Ok(())
    } else {
        Err(LbError::NotPermutation { platform_count })
    }
}

/// Runs the greedy over all platforms in `order`.
pub fn solve_lb(inst: &LbInstance, order: &[PlatformId], strategy: &LbStrategy) -> Result<LbSolution, LbError> {
    check_permutation(order, inst.platforms.len())?;
    let mut state = OnlineState::with_degrees(inst.item_degrees());
    let mut progress = Vec::with_capacity(order.len());
    for &j in order {
        state.new_platform(j, &inst.platforms[j], strategy)?;
        progress.push(state.satisfied.len());
    }
    let (assignment, satisfied) = state.into_parts();
    debug_assert_eq!(
        satisfied_lb_platforms(inst, &assignment).ok().as_ref(),
        Some(&satisfied),
        "tracked satisfied set must match a recount"
    );
    Ok(LbSolution { assignment, satisfied, progress })
}
