use std::fmt;

use super::{FairInstance, GroupId, ItemId, LbInstance, NodeId, PlatformId, TreeInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    /// The instance is well-formed but contains something worth flagging.
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Instance,
    Platform(PlatformId),
    Group { platform: PlatformId, group: GroupId },
    Node(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    ItemOutOfRange { item: ItemId },
    UnsortedOrDuplicate,
    GroupNotSubsetOfNeighbors { item: ItemId },
    /// The group can never be satisfied; the instance stays well-formed.
    GroupLbExceedsSize { lb: usize, size: usize },
    /// `lb = 0` and no groups: satisfied even when nothing is matched.
    DegeneratePlatform,
    ZeroLowerBound,
    LowerAboveUpper { lb: usize, ub: usize },
    RatioOutsideUnitInterval,
    AlphaAboveBeta,
    GroupsOverlap { item: ItemId },
    NeighborOutsideGroups { item: ItemId },
    NoRoot,
    MultipleRoots { extra: NodeId },
    ParentOutOfRange { parent: NodeId },
    Unreachable,
    VectorLength { expected: usize, found: usize },
    GroupBoundMonotonicity { group: GroupId, bound: usize, children_sum: usize },
    OverallBoundMonotonicity { bound: usize, children_sum: usize },
    RewardMonotonicity { reward: u64, children_sum: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
}

impl Violation {
    fn new(location: Location, kind: ViolationKind) -> Self {
        Violation { location, kind }
    }

    pub fn severity(&self) -> Severity {
        match self.kind {
            ViolationKind::GroupLbExceedsSize { .. } | ViolationKind::DegeneratePlatform => {
                Severity::Warning
            }
            _ => Severity::Error,
        }
    }
}

pub fn has_errors(violations: &[Violation]) -> bool {
    violations.iter().any(|v| v.severity() == Severity::Error)
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Location::Instance => write!(f, "instance"),
            Location::Platform(p) => write!(f, "platform {p}"),
            Location::Group { platform, group } => write!(f, "platform {platform} group {group}"),
            Location::Node(n) => write!(f, "node {n}"),
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ViolationKind::*;
        match self {
            ItemOutOfRange { item } => write!(f, "item {item} out of range"),
            UnsortedOrDuplicate => write!(f, "id list not sorted or has duplicates"),
            GroupNotSubsetOfNeighbors { item } => {
                write!(f, "group ⊄ neighbors (item {item})")
            }
            GroupLbExceedsSize { lb, size } => {
                write!(f, "group lb exceeds group size ({lb} > {size})")
            }
            DegeneratePlatform => write!(f, "lb 0 with no groups is satisfied vacuously"),
            ZeroLowerBound => write!(f, "lower bound must be at least 1"),
            LowerAboveUpper { lb, ub } => write!(f, "lower bound {lb} above upper bound {ub}"),
            RatioOutsideUnitInterval => write!(f, "alpha/beta outside [0, 1]"),
            AlphaAboveBeta => write!(f, "alpha above beta"),
            GroupsOverlap { item } => write!(f, "item {item} in more than one group"),
            NeighborOutsideGroups { item } => write!(f, "neighbor {item} in no group"),
            NoRoot => write!(f, "no root node"),
            MultipleRoots { extra } => write!(f, "second root {extra}"),
            ParentOutOfRange { parent } => write!(f, "parent {parent} out of range"),
            Unreachable => write!(f, "not reachable from the root"),
            VectorLength { expected, found } => {
                write!(f, "vector has {found} entries, expected {expected}")
            }
            GroupBoundMonotonicity { group, bound, children_sum } => write!(
                f,
                "group {group} bound {bound} exceeds children sum {children_sum}"
            ),
            OverallBoundMonotonicity { bound, children_sum } => {
                write!(f, "overall bound {bound} exceeds children sum {children_sum}")
            }
            RewardMonotonicity { reward, children_sum } => {
                write!(f, "reward {reward} exceeds children sum {children_sum}")
            }
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

fn is_strictly_sorted(ids: &[usize]) -> bool {
    ids.windows(2).all(|w| w[0] < w[1])
}

impl LbInstance {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (pid, p) in self.platforms.iter().enumerate() {
            let here = Location::Platform(pid);
            if !is_strictly_sorted(&p.neighbors) {
                out.push(Violation::new(here, ViolationKind::UnsortedOrDuplicate));
            }
            for &item in &p.neighbors {
                if item >= self.item_count {
                    out.push(Violation::new(here, ViolationKind::ItemOutOfRange { item }));
                }
            }
            if p.lb == 0 && p.groups.is_empty() {
                out.push(Violation::new(here, ViolationKind::DegeneratePlatform));
            }
            for (gid, g) in p.groups.iter().enumerate() {
                let at = Location::Group { platform: pid, group: gid };
                if !is_strictly_sorted(&g.members) {
                    out.push(Violation::new(at, ViolationKind::UnsortedOrDuplicate));
                }
                for &item in &g.members {
                    if !p.is_neighbor(item) {
                        out.push(Violation::new(
                            at,
                            ViolationKind::GroupNotSubsetOfNeighbors { item },
                        ));
                    }
                }
                if g.lb > g.members.len() {
                    out.push(Violation::new(
                        at,
                        ViolationKind::GroupLbExceedsSize { lb: g.lb, size: g.members.len() },
                    ));
                }
            }
        }
        out
    }
}

impl FairInstance {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (pid, p) in self.platforms.iter().enumerate() {
            let here = Location::Platform(pid);
            if !is_strictly_sorted(&p.neighbors) {
                out.push(Violation::new(here, ViolationKind::UnsortedOrDuplicate));
            }
            for &item in &p.neighbors {
                if item >= self.item_count {
                    out.push(Violation::new(here, ViolationKind::ItemOutOfRange { item }));
                }
            }
            if p.lb == 0 {
                out.push(Violation::new(here, ViolationKind::ZeroLowerBound));
            }
            if p.lb > p.ub {
                out.push(Violation::new(here, ViolationKind::LowerAboveUpper { lb: p.lb, ub: p.ub }));
            }
            let mut owner = vec![None::<usize>; p.neighbors.len()];
            for (gid, g) in p.groups.iter().enumerate() {
                let at = Location::Group { platform: pid, group: gid };
                if !is_strictly_sorted(&g.members) {
                    out.push(Violation::new(at, ViolationKind::UnsortedOrDuplicate));
                }
                if !g.alpha.in_unit_interval() || !g.beta.in_unit_interval() {
                    out.push(Violation::new(at, ViolationKind::RatioOutsideUnitInterval));
                }
                if g.alpha > g.beta {
                    out.push(Violation::new(at, ViolationKind::AlphaAboveBeta));
                }
                for &item in &g.members {
                    match p.neighbors.binary_search(&item) {
                        Err(_) => out.push(Violation::new(
                            at,
                            ViolationKind::GroupNotSubsetOfNeighbors { item },
                        )),
                        Ok(pos) => {
                            if owner[pos].replace(gid).is_some() {
                                out.push(Violation::new(at, ViolationKind::GroupsOverlap { item }));
                            }
                        }
                    }
                }
            }
            for (pos, o) in owner.iter().enumerate() {
                if o.is_none() {
                    out.push(Violation::new(
                        here,
                        ViolationKind::NeighborOutsideGroups { item: p.neighbors[pos] },
                    ));
                }
            }
        }
        out
    }
}

impl TreeInstance {
    /// Structural checks plus the monotonicity constraints on every internal
    /// node: group bounds, overall bound and reward never exceed the sums over
    /// the children.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.nodes.len();
        if self.budget.len() != self.k {
            out.push(Violation::new(
                Location::Instance,
                ViolationKind::VectorLength { expected: self.k, found: self.budget.len() },
            ));
        }
        let mut roots = self.nodes.iter().enumerate().filter(|(_, v)| v.parent.is_none());
        match roots.next() {
            None => out.push(Violation::new(Location::Instance, ViolationKind::NoRoot)),
            Some(_) => {
                for (extra, _) in roots {
                    out.push(Violation::new(Location::Node(extra), ViolationKind::MultipleRoots { extra }));
                }
            }
        }
        for (id, v) in self.nodes.iter().enumerate() {
            if let Some(parent) = v.parent {
                if parent >= n || parent == id {
                    out.push(Violation::new(Location::Node(id), ViolationKind::ParentOutOfRange { parent }));
                }
            }
            if v.group_lb.len() != self.k {
                out.push(Violation::new(
                    Location::Node(id),
                    ViolationKind::VectorLength { expected: self.k, found: v.group_lb.len() },
                ));
            }
        }
        if has_errors(&out) {
            return out;
        }
        let reached = self.preorder();
        if reached.len() != n {
            let mut seen = vec![false; n];
            for &v in &reached {
                seen[v] = true;
            }
            for (id, s) in seen.iter().enumerate() {
                if !s {
                    out.push(Violation::new(Location::Node(id), ViolationKind::Unreachable));
                }
            }
            return out;
        }
        for (id, v) in self.nodes.iter().enumerate() {
            if v.children.is_empty() {
                continue;
            }
            let here = Location::Node(id);
            for group in 0..self.k {
                let children_sum: usize = v.children.iter().map(|&c| self.nodes[c].group_lb[group]).sum();
                if v.group_lb[group] > children_sum {
                    out.push(Violation::new(
                        here,
                        ViolationKind::GroupBoundMonotonicity { group, bound: v.group_lb[group], children_sum },
                    ));
                }
            }
            let lb_sum: usize = v.children.iter().map(|&c| self.nodes[c].lb).sum();
            if v.lb > lb_sum {
                out.push(Violation::new(
                    here,
                    ViolationKind::OverallBoundMonotonicity { bound: v.lb, children_sum: lb_sum },
                ));
            }
            let reward_sum: u64 = v.children.iter().map(|&c| self.nodes[c].reward).sum();
            if v.reward > reward_sum {
                out.push(Violation::new(
                    here,
                    ViolationKind::RewardMonotonicity { reward: v.reward, children_sum: reward_sum },
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LbGroup, LbPlatform, NodeSpec};

    fn single(neighbors: Vec<usize>, lb: usize, groups: Vec<LbGroup>) -> LbInstance {
        LbInstance { item_count: 3, platforms: vec![LbPlatform::new(neighbors, lb, groups)] }
    }

    #[test]
    fn well_formed_lb_instance() {
        let inst = single(vec![0, 1, 2], 2, vec![LbGroup::new(vec![0, 1], 1)]);
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn group_outside_neighbors() {
        let mut inst = single(vec![0, 1, 2], 2, vec![LbGroup::new(vec![0, 5], 1)]);
        inst.item_count = 6;
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::GroupNotSubsetOfNeighbors { item: 5 });
        assert!(v[0].to_string().contains("group ⊄ neighbors"));
    }

    #[test]
    fn group_lb_too_large() {
        let inst = single(vec![0, 1, 2], 2, vec![LbGroup::new(vec![0, 1], 3)]);
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("group lb exceeds group size"));
        assert_eq!(v[0].severity(), Severity::Warning);
    }

    #[test]
    fn degenerate_platform_is_a_warning() {
        let inst = single(vec![], 0, vec![]);
        let v = inst.validate();
        assert_eq!(v[0].kind, ViolationKind::DegeneratePlatform);
        assert!(!has_errors(&v));
    }

    #[test]
    fn item_out_of_range() {
        let inst = single(vec![0, 7], 1, vec![]);
        assert!(has_errors(&inst.validate()));
    }

    fn worked_tree(root_bound: usize) -> TreeInstance {
        let bounds = [root_bound, 4, 4, 3, 3, 3, 3];
        let rewards = [0, 3, 3, 2, 2, 2, 2];
        let parents = [None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)];
        let specs = (0..7)
            .map(|i| NodeSpec { parent: parents[i], group_lb: vec![bounds[i]], lb: bounds[i], reward: rewards[i] })
            .collect();
        TreeInstance::from_parents(1, vec![10], 10, specs)
    }

    #[test]
    fn worked_tree_is_monotone() {
        assert!(worked_tree(6).validate().is_empty());
    }

    #[test]
    fn root_bound_above_children_sum() {
        let v = worked_tree(9).validate();
        assert!(v.iter().all(|x| x.location == Location::Node(0)));
        assert!(v.contains(&Violation {
            location: Location::Node(0),
            kind: ViolationKind::GroupBoundMonotonicity { group: 0, bound: 9, children_sum: 8 },
        }));
    }

    #[test]
    fn single_node_tree_is_valid() {
        let t = TreeInstance::from_parents(
            2,
            vec![1, 1],
            2,
            vec![NodeSpec { parent: None, group_lb: vec![5, 9], lb: 40, reward: 3 }],
        );
        assert!(t.validate().is_empty());
    }

    #[test]
    fn structural_tree_errors() {
        let specs = vec![
            NodeSpec { parent: None, group_lb: vec![0], lb: 0, reward: 0 },
            NodeSpec { parent: None, group_lb: vec![0], lb: 0, reward: 0 },
            NodeSpec { parent: Some(9), group_lb: vec![0, 1], lb: 0, reward: 0 },
        ];
        let v = TreeInstance::from_parents(1, vec![1], 1, specs).validate();
        assert!(v.iter().any(|x| matches!(x.kind, ViolationKind::MultipleRoots { extra: 1 })));
        assert!(v.iter().any(|x| matches!(x.kind, ViolationKind::ParentOutOfRange { parent: 9 })));
        assert!(v.iter().any(|x| matches!(x.kind, ViolationKind::VectorLength { .. })));
    }
}
