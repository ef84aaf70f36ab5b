//! Instance and solution types shared by every solver.
//!
//! Identifiers are dense, 0-based indices into the owning instance. Neighbor
//! and group member lists are kept sorted and free of duplicates; the
//! constructors normalize them and the validators report lists that are not.

mod eval;
mod validate;

use std::collections::BTreeMap;

use crate::ratio::Ratio;

pub use eval::{
    canonical_order, check_tree_solution, fair_score, satisfied_lb_platforms, AssignmentError,
    FairMode, FairReport, FairScore, TreeSolutionError,
};
pub use validate::{has_errors, Location, Severity, Violation, ViolationKind};
pub(crate) use eval::fair_platform_satisfied;

pub type ItemId = usize;
pub type PlatformId = usize;
pub type NodeId = usize;
pub type GroupId = usize;

fn normalized(mut ids: Vec<usize>) -> Vec<usize> {
    ids.sort_unstable();
    ids.dedup();
    ids
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbGroup {
    pub members: Vec<ItemId>,
    pub lb: usize,
}

impl LbGroup {
    pub fn new(members: Vec<ItemId>, lb: usize) -> Self {
        LbGroup { members: normalized(members), lb }
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.members.binary_search(&item).is_ok()
    }
}

/// A platform with an overall lower bound and per-group lower bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbPlatform {
    pub neighbors: Vec<ItemId>,
    pub lb: usize,
    pub groups: Vec<LbGroup>,
}

impl LbPlatform {
    pub fn new(neighbors: Vec<ItemId>, lb: usize, groups: Vec<LbGroup>) -> Self {
        LbPlatform { neighbors: normalized(neighbors), lb, groups }
    }

    pub fn is_neighbor(&self, item: ItemId) -> bool {
        self.neighbors.binary_search(&item).is_ok()
    }

    /// `max(lb, sum of group lower bounds)`: the largest set the greedy ever builds.
    pub fn demand(&self) -> usize {
        self.lb.max(self.groups.iter().map(|g| g.lb).sum())
    }

    pub fn is_satisfied_by(&self, matched: &[ItemId]) -> bool {
        matched.len() >= self.lb
            && self
                .groups
                .iter()
                .all(|g| matched.iter().filter(|&&i| g.contains(i)).count() >= g.lb)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbInstance {
    pub item_count: usize,
    pub platforms: Vec<LbPlatform>,
}

impl LbInstance {
    /// `max_j max(l_j, sum_k l_j^(k))`, the hyperedge size parameter of the greedy guarantee.
    pub fn ell_thm1(&self) -> usize {
        self.platforms.iter().map(LbPlatform::demand).max().unwrap_or(0)
    }

    /// `max_j l_j`.
    pub fn ell_thm2(&self) -> usize {
        self.platforms.iter().map(|p| p.lb).max().unwrap_or(0)
    }

    pub fn item_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.item_count];
        for p in &self.platforms {
            for &i in &p.neighbors {
                if let Some(d) = deg.get_mut(i) {
                    *d += 1;
                }
            }
        }
        deg
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairGroup {
    pub members: Vec<ItemId>,
    pub alpha: Ratio,
    pub beta: Ratio,
}

impl FairGroup {
    pub fn new(members: Vec<ItemId>, alpha: Ratio, beta: Ratio) -> Self {
        FairGroup { members: normalized(members), alpha, beta }
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.members.binary_search(&item).is_ok()
    }
}

/// A platform with a size window `[lb, ub]` and proportional group windows.
/// Groups partition the neighbor set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairPlatform {
    pub neighbors: Vec<ItemId>,
    pub lb: usize,
    pub ub: usize,
    pub groups: Vec<FairGroup>,
}

impl FairPlatform {
    pub fn new(neighbors: Vec<ItemId>, lb: usize, ub: usize, groups: Vec<FairGroup>) -> Self {
        FairPlatform { neighbors: normalized(neighbors), lb, ub, groups }
    }

    pub fn is_neighbor(&self, item: ItemId) -> bool {
        self.neighbors.binary_search(&item).is_ok()
    }

    pub fn group_of(&self, item: ItemId) -> Option<GroupId> {
        self.groups.iter().position(|g| g.contains(item))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairInstance {
    pub item_count: usize,
    pub platforms: Vec<FairPlatform>,
}

impl FairInstance {
    /// `max_j l_j`, the block size parameter of the proportional guarantee.
    pub fn ell_thm2(&self) -> usize {
        self.platforms.iter().map(|p| p.lb).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Per-group lower bounds, one entry per global group.
    pub group_lb: Vec<usize>,
    pub lb: usize,
    pub reward: u64,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Items a satisfied node consumes: `max(lb, sum of group bounds)`.
    pub fn demand(&self) -> usize {
        self.lb.max(self.group_lb.iter().sum())
    }
}

/// A rooted region tree whose nodes are platforms that may be opened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance {
    pub k: usize,
    pub budget: Vec<usize>,
    pub total: usize,
    pub nodes: Vec<TreeNode>,
    pub root: NodeId,
}

/// Node description used to build a [`TreeInstance`] from parent links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpec {
    pub parent: Option<NodeId>,
    pub group_lb: Vec<usize>,
    pub lb: usize,
    pub reward: u64,
}

impl TreeInstance {
    /// Builds the tree from parent links. The root is the first node without a
    /// parent; malformed links are kept for [`TreeInstance::validate`] to report.
    pub fn from_parents(k: usize, budget: Vec<usize>, total: usize, specs: Vec<NodeSpec>) -> Self {
        let n = specs.len();
        let mut nodes: Vec<TreeNode> = specs
            .into_iter()
            .map(|s| TreeNode {
                parent: s.parent,
                children: Vec::new(),
                group_lb: s.group_lb,
                lb: s.lb,
                reward: s.reward,
            })
            .collect();
        for id in 0..n {
            if let Some(p) = nodes[id].parent {
                if p < n && p != id {
                    nodes[p].children.push(id);
                }
            }
        }
        let root = nodes.iter().position(|v| v.parent.is_none()).unwrap_or(0);
        TreeInstance { k, budget, total, nodes, root }
    }

    /// Items actually available: `min(total, sum of the group budgets)`.
    pub fn item_supply(&self) -> usize {
        self.total.min(self.budget.iter().sum())
    }

    pub fn node_specs(&self) -> Vec<NodeSpec> {
        self.nodes
            .iter()
            .map(|v| NodeSpec {
                parent: v.parent,
                group_lb: v.group_lb.clone(),
                lb: v.lb,
                reward: v.reward,
            })
            .collect()
    }

    /// Nodes in preorder starting at the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        let mut seen = vec![false; self.nodes.len()];
        while let Some(v) = stack.pop() {
            if v >= self.nodes.len() || std::mem::replace(&mut seen[v], true) {
                continue;
            }
            out.push(v);
            stack.extend(self.nodes[v].children.iter().rev());
        }
        out
    }

    /// All root-to-leaf paths, each as a node list starting at the root.
    pub fn root_leaf_paths(&self) -> Vec<Vec<NodeId>> {
        let mut paths = Vec::new();
        let mut stack = vec![vec![self.root]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            let children = &self.nodes[last].children;
            if children.is_empty() {
                paths.push(path);
            } else {
                for &c in children.iter().rev() {
                    let mut next = path.clone();
                    next.push(c);
                    stack.push(next);
                }
            }
        }
        paths
    }
}

/// Items mapped to at most one platform each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub item_to_platform: Vec<Option<PlatformId>>,
}

impl Assignment {
    pub fn empty(item_count: usize) -> Self {
        Assignment { item_to_platform: vec![None; item_count] }
    }

    pub fn platform_of(&self, item: ItemId) -> Option<PlatformId> {
        self.item_to_platform.get(item).copied().flatten()
    }

    pub fn assign(&mut self, item: ItemId, platform: PlatformId) {
        self.item_to_platform[item] = Some(platform);
    }

    pub fn unassign(&mut self, item: ItemId) {
        self.item_to_platform[item] = None;
    }

    pub fn matched_count(&self) -> usize {
        self.item_to_platform.iter().flatten().count()
    }

    /// `M_j` for every platform, each sorted ascending.
    pub fn matched_sets(&self, platform_count: usize) -> Vec<Vec<ItemId>> {
        let mut sets = vec![Vec::new(); platform_count];
        for (item, p) in self.item_to_platform.iter().enumerate() {
            if let Some(p) = *p {
                if p < platform_count {
                    sets[p].push(item);
                }
            }
        }
        sets
    }
}

/// Satisfied frontier of a region tree together with the per-group item counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSolution {
    /// Satisfied nodes, ascending. Empty exactly when `synthetic_root_only` is set.
    pub satisfied_nodes: Vec<NodeId>,
    pub allocation: BTreeMap<NodeId, Vec<usize>>,
    pub total_reward: u64,
    /// No cover of the tree fits the budget; only the zero-bound synthetic root is open.
    pub synthetic_root_only: bool,
}
