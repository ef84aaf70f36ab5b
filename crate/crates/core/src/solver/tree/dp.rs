use super::{SteinerInstance, TreeError};

/// Dense budget lattice `{0..=B_0} x ... x {0..=B_{k-1}}`, coordinate 0 fastest.
#[derive(Debug, Clone)]
struct Lattice {
    extents: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Lattice {
    fn new(budget: &[usize]) -> (Self, u128) {
        let extents: Vec<usize> = budget.iter().map(|b| b + 1).collect();
        let size128: u128 = extents.iter().map(|&e| e as u128).product();
        let mut strides = Vec::with_capacity(extents.len());
        let mut acc = 1usize;
        for &e in &extents {
            strides.push(acc);
            acc = acc.saturating_mul(e);
        }
        (Lattice { extents, strides, size: acc }, size128)
    }

    fn index(&self, c: &[usize]) -> usize {
        c.iter().zip(&self.strides).map(|(x, s)| x * s).sum()
    }

    /// Advances `c` to the next cell of the box `[0, bound]`, updating `ci`.
    /// Returns false after the last cell, leaving `c` at zero.
    fn step_within(&self, c: &mut [usize], ci: &mut usize, bound: &[usize]) -> bool {
        for d in 0..c.len() {
            if c[d] < bound[d] {
                c[d] += 1;
                *ci += self.strides[d];
                return true;
            }
            *ci -= c[d] * self.strides[d];
            c[d] = 0;
        }
        false
    }

    fn top(&self) -> Vec<usize> {
        self.extents.iter().map(|e| e - 1).collect()
    }
}

/// Best split `c' <= m` of `a[c'] + b[m - c']`; ties go to the largest index.
fn best_split(lat: &Lattice, a: &[u64], b: &[u64], m: &[usize], mi: usize) -> (usize, u64) {
    let mut c = vec![0; m.len()];
    let mut ci = 0;
    let mut best = (0, a[0] + b[mi]);
    while lat.step_within(&mut c, &mut ci, m) {
        let value = a[ci] + b[mi - ci];
        if value >= best.1 {
            best = (ci, value);
        }
    }
    best
}

fn convolve(lat: &Lattice, a: &[u64], b: &[u64]) -> Vec<u64> {
    let top = lat.top();
    let mut out = vec![0; lat.size];
    let mut m = vec![0; top.len()];
    let mut mi = 0;
    loop {
        out[mi] = best_split(lat, a, b, &m, mi).1;
        if !lat.step_within(&mut m, &mut mi, &top) {
            return out;
        }
    }
}

/// Value table of one node: best reward of a subtree rooted there within each budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    pub extents: Vec<usize>,
    pub values: Vec<u64>,
}

impl DpTable {
    pub fn get(&self, c: &[usize]) -> u64 {
        let mut idx = 0;
        let mut stride = 1;
        for (x, e) in c.iter().zip(&self.extents) {
            assert!(x < e, "budget coordinate out of range");
            idx += x * stride;
            stride *= e;
        }
        self.values[idx]
    }
}

fn postorder(inst: &SteinerInstance) -> Vec<usize> {
    let mut out = Vec::with_capacity(inst.nodes.len());
    let mut stack = vec![(inst.root, false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            out.push(v);
        } else {
            stack.push((v, true));
            stack.extend(inst.nodes[v].children.iter().rev().map(|&c| (c, false)));
        }
    }
    out
}

/// Children tables merged left to right; `None` for a leaf.
fn merged_children(lat: &Lattice, tables: &[Vec<u64>], children: &[usize]) -> Option<Vec<u64>> {
    let (first, rest) = children.split_first()?;
    let mut acc = tables[*first].clone();
    for &c in rest {
        acc = convolve(lat, &acc, &tables[c]);
    }
    Some(acc)
}

fn fill(inst: &SteinerInstance, cell_limit: usize) -> Result<(Lattice, Vec<Vec<u64>>), TreeError> {
    let (lat, size) = Lattice::new(&inst.budget);
    let cells = size * inst.nodes.len() as u128;
    if cells > cell_limit as u128 {
        return Err(TreeError::TooLarge { cells, limit: cell_limit });
    }
    let top = lat.top();
    let mut tables = vec![Vec::new(); inst.nodes.len()];
    for v in postorder(inst) {
        let node = &inst.nodes[v];
        let inner = merged_children(&lat, &tables, &node.children);
        let cost_idx = lat.index(&node.cost);
        let mut x = vec![0; lat.size];
        let mut c = vec![0; top.len()];
        let mut ci = 0;
        loop {
            if node.cost.iter().zip(&c).all(|(w, b)| w <= b) {
                x[ci] = node.reward + inner.as_ref().map_or(0, |y| y[ci - cost_idx]);
            }
            if !lat.step_within(&mut c, &mut ci, &top) {
                break;
            }
        }
        tables[v] = x;
    }
    Ok((lat, tables))
}

/// Tables for every node, indexed like `inst.nodes`.
pub fn dp_tables(inst: &SteinerInstance, cell_limit: usize) -> Result<Vec<DpTable>, TreeError> {
    let (lat, tables) = fill(inst, cell_limit)?;
    Ok(tables.into_iter().map(|values| DpTable { extents: lat.extents.clone(), values }).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpOutcome {
    pub reward: u64,
    /// Chosen nodes, ascending; a connected subtree containing the root, or empty.
    pub chosen: Vec<usize>,
}

/// Optimal root-containing subtree within the budget.
pub fn dp_solve(inst: &SteinerInstance, cell_limit: usize) -> Result<DpOutcome, TreeError> {
    let (lat, tables) = fill(inst, cell_limit)?;
    let top = lat.top();
    let top_idx = lat.index(&top);
    let reward = tables[inst.root][top_idx];
    let mut chosen = Vec::new();
    let mut stack = vec![(inst.root, top)];
    while let Some((v, c)) = stack.pop() {
        let node = &inst.nodes[v];
        if !node.cost.iter().zip(&c).all(|(w, b)| w <= b) {
            continue;
        }
        chosen.push(v);
        let mut m: Vec<usize> = c.iter().zip(&node.cost).map(|(b, w)| b - w).collect();
        let Some((first, rest)) = node.children.split_first() else { continue };
        // prefix[i] merges children 0..=i
        let mut prefix = vec![tables[*first].clone()];
        for &ch in &rest[..rest.len().saturating_sub(1)] {
            let next = convolve(&lat, prefix.last().unwrap(), &tables[ch]);
            prefix.push(next);
        }
        for (i, &ch) in rest.iter().enumerate().rev() {
            let mi = lat.index(&m);
            let (split, _) = best_split(&lat, &prefix[i], &tables[ch], &m, mi);
            let split_coords = coords(&lat, split);
            let child_budget: Vec<usize> = m.iter().zip(&split_coords).map(|(a, b)| a - b).collect();
            stack.push((ch, child_budget));
            m = split_coords;
        }
        stack.push((*first, m));
    }
    chosen.sort_unstable();
    Ok(DpOutcome { reward, chosen })
}

fn coords(lat: &Lattice, mut idx: usize) -> Vec<usize> {
    lat.extents
        .iter()
        .map(|&e| {
            let x = idx % e;
            idx /= e;
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::tree::{NodeOrigin, SteinerNode};
    use proptest::prelude::*;

    fn node(children: Vec<usize>, cost: Vec<usize>, reward: u64) -> SteinerNode {
        SteinerNode { children, cost, reward, origin: NodeOrigin::Filler }
    }

    #[test]
    fn leaf_budget_example() {
        // root costs 1, children cost 2 and 3 with rewards 5 and 4; budget 4
        let inst = SteinerInstance {
            nodes: vec![node(vec![1, 2], vec![1], 0), node(vec![], vec![2], 5), node(vec![], vec![3], 4)],
            root: 0,
            budget: vec![4],
        };
        let out = dp_solve(&inst, 1000).unwrap();
        assert_eq!(out.reward, 5);
        assert_eq!(out.chosen, vec![0, 1]);
        let t = dp_tables(&inst, 1000).unwrap();
        assert_eq!((0..=4).map(|b| t[0].get(&[b])).collect::<Vec<_>>(), vec![0, 0, 0, 5, 5]);
    }

    #[test]
    fn unaffordable_root_gives_empty() {
        let inst = SteinerInstance { nodes: vec![node(vec![], vec![3, 0], 9)], root: 0, budget: vec![2, 5] };
        assert_eq!(dp_solve(&inst, 1000).unwrap(), DpOutcome { reward: 0, chosen: vec![] });
    }

    #[test]
    fn two_dimensional_split() {
        let inst = SteinerInstance {
            nodes: vec![node(vec![1, 2], vec![0, 0], 0), node(vec![], vec![2, 0], 3), node(vec![], vec![0, 2], 3)],
            root: 0,
            budget: vec![2, 2],
        };
        let out = dp_solve(&inst, 1000).unwrap();
        assert_eq!(out.reward, 6);
        assert_eq!(out.chosen, vec![0, 1, 2]);
    }

    fn arb_tree() -> impl Strategy<Value = SteinerInstance> {
        (1usize..8, 1usize..3).prop_flat_map(|(n, k)| {
            (
                prop::collection::vec(any::<prop::sample::Index>(), n - 1),
                prop::collection::vec((prop::collection::vec(0usize..3, k), 0u64..5), n),
                prop::collection::vec(0usize..5, k),
            )
                .prop_map(move |(parents, attrs, budget)| {
                    let mut nodes: Vec<SteinerNode> =
                        attrs.into_iter().map(|(cost, reward)| node(vec![], cost, reward)).collect();
                    for (i, p) in parents.iter().enumerate() {
                        let parent = p.index(i + 1);
                        nodes[parent].children.push(i + 1);
                    }
                    SteinerInstance { nodes, root: 0, budget }
                })
        })
    }

    proptest! {
        #[test]
        fn tables_monotone_in_budget(inst in arb_tree()) {
            let tables = dp_tables(&inst, 1 << 20).unwrap();
            let (lat, _) = Lattice::new(&inst.budget);
            for t in &tables {
                for idx in 0..lat.size {
                    let c = coords(&lat, idx);
                    for (d, &cd) in c.iter().enumerate() {
                        if cd + 1 < lat.extents[d] {
                            prop_assert!(t.values[idx] <= t.values[idx + lat.strides[d]]);
                        }
                    }
                }
            }
        }

        #[test]
        fn backtrack_is_feasible_and_optimal(inst in arb_tree()) {
            let out = dp_solve(&inst, 1 << 20).unwrap();
            let reward: u64 = out.chosen.iter().map(|&v| inst.nodes[v].reward).sum();
            prop_assert_eq!(reward, out.reward);
            for d in 0..inst.budget.len() {
                let spent: usize = out.chosen.iter().map(|&v| inst.nodes[v].cost[d]).sum();
                prop_assert!(spent <= inst.budget[d]);
            }
            // connected: every chosen non-root node has a chosen parent
            for &v in &out.chosen {
                if v != inst.root {
                    prop_assert!(out.chosen.iter().any(|&p| inst.nodes[p].children.contains(&v)));
                }
            }
            prop_assert_eq!(out.reward, brute_force(&inst));
        }
    }

    /// Maximum over all root-containing connected subsets by enumeration.
    fn brute_force(inst: &SteinerInstance) -> u64 {
        let n = inst.nodes.len();
        let mut parent = vec![usize::MAX; n];
        for (v, node) in inst.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = v;
            }
        }
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if members.iter().any(|&v| v != 0 && mask >> parent[v] & 1 == 0) {
                continue;
            }
            let fits = (0..inst.budget.len())
                .all(|d| members.iter().map(|&v| inst.nodes[v].cost[d]).sum::<usize>() <= inst.budget[d]);
            if fits {
                best = best.max(members.iter().map(|&v| inst.nodes[v].reward).sum());
            }
        }
        best
    }
}
