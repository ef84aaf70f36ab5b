use super::{NodeOrigin, SteinerInstance, SteinerNode};

/// Replaces every node with more than two children by a balanced binary
/// gadget of zero-cost, zero-reward fillers. Original indices are kept and
/// fillers are appended; the left half takes the extra child on odd splits.
pub fn binarize(inst: &SteinerInstance) -> SteinerInstance {
    let k = inst.budget.len();
    let mut nodes = inst.nodes.clone();
    for v in 0..inst.nodes.len() {
        if nodes[v].children.len() > 2 {
            let children = std::mem::take(&mut nodes[v].children);
            nodes[v].children = split(&children, &mut nodes, k);
        }
    }
    SteinerInstance { nodes, root: inst.root, budget: inst.budget.clone() }
}

/// Two subtrees covering `children`, each a single child or a new filler.
fn split(children: &[usize], nodes: &mut Vec<SteinerNode>, k: usize) -> Vec<usize> {
    let mid = children.len().div_ceil(2);
    [&children[..mid], &children[mid..]].iter().map(|half| half_root(half, nodes, k)).collect()
}

fn half_root(half: &[usize], nodes: &mut Vec<SteinerNode>, k: usize) -> usize {
    if half.len() == 1 {
        return half[0];
    }
    let children = if half.len() == 2 { half.to_vec() } else { split(half, nodes, k) };
    nodes.push(SteinerNode { children, cost: vec![0; k], reward: 0, origin: NodeOrigin::Filler });
    nodes.len() - 1
}
