//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Independent streams derived from one seed use
//! [`substream_seed`], a SplitMix64 finalizer over `seed ^ stream * golden`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{FairGroup, FairInstance, FairPlatform, LbGroup, LbInstance, LbPlatform, NodeSpec, TreeInstance};
use crate::ratio::Ratio;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("edge probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("max degree {max_degree} exceeds platform count {platforms}")]
    MaxDegree { max_degree: usize, platforms: usize },
    #[error("{0} must be positive")]
    Zero(&'static str),
}

/// Global group of `item` when `items` are split into `groups` equal runs.
fn group_of(item: usize, items: usize, groups: usize) -> usize {
    item * groups / items
}

/// Splits each platform's neighbor list by global group.
fn split_by_group(neighbors: &[usize], items: usize, groups: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); groups];
    for &i in neighbors {
        out[group_of(i, items, groups)].push(i);
    }
    out
}

/// Erdős–Rényi bipartite instance: `groups * n_per_group` items in equal
/// global groups, each item-platform edge present independently with
/// probability `rho`. Every platform has one group per global group, lower
/// bound `ell` each, and overall bound `groups * ell`.
pub fn gen_er_partition(
    n_per_group: usize,
    groups: usize,
    rho: f64,
    platform_count: usize,
    ell: usize,
    seed: u64,
) -> Result<LbInstance, GenError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(GenError::Probability(rho));
    }
    let items = n_per_group * groups;
    let mut rng = rng_from_seed(seed);
    let platforms = (0..platform_count)
        .map(|_| {
            let neighbors: Vec<usize> = (0..items).filter(|_| rng.gen_bool(rho)).collect();
            let gs = split_by_group(&neighbors, items, groups).into_iter().map(|m| LbGroup::new(m, ell)).collect();
            LbPlatform::new(neighbors, groups * ell, gs)
        })
        .collect();
    Ok(LbInstance { item_count: items, platforms })
}

/// Draws, for every item, a degree uniform in `1..=max_degree` and that many
/// distinct platforms uniformly. Returns each platform's neighbor list.
fn sample_degree_capped(
    items: usize,
    platforms: usize,
    max_degree: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<usize>>, GenError> {
    if max_degree == 0 {
        return Err(GenError::Zero("max degree"));
    }
    if max_degree > platforms {
        return Err(GenError::MaxDegree { max_degree, platforms });
    }
    let mut adj = vec![Vec::new(); platforms];
    for item in 0..items {
        let d = rng.gen_range(1..=max_degree);
        for j in sample(rng, platforms, d) {
            adj[j].push(item);
        }
    }
    Ok(adj)
}

/// Parameters of the degree-capped lower-bound generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeCappedParams {
    pub items: usize,
    pub platforms: usize,
    pub max_degree: usize,
    pub group_count: usize,
    pub group_lb: usize,
    /// Overall bound; `None` means `group_count * group_lb`.
    pub overall_lb: Option<usize>,
}

impl DegreeCappedParams {
    /// 10,000 items, 250 platforms, 20 groups of 500, group bound 2.
    pub fn synthetic(max_degree: usize) -> Self {
        DegreeCappedParams { items: 10_000, platforms: 250, max_degree, group_count: 20, group_lb: 2, overall_lb: None }
    }

    /// A smaller analogue of real course data: 3,000 items, 100 platforms,
    /// overall bound 5, 5 groups with bound 1.
    pub fn real_like(max_degree: usize) -> Self {
        DegreeCappedParams { items: 3_000, platforms: 100, max_degree, group_count: 5, group_lb: 1, overall_lb: Some(5) }
    }

    /// Max degree giving mean item degree `avg`: `2*avg - 1`, capped at the platform count.
    pub fn max_degree_for_average(avg: usize, platforms: usize) -> usize {
        (2 * avg).saturating_sub(1).clamp(1, platforms.max(1))
    }
}

pub fn gen_degree_capped(params: &DegreeCappedParams, seed: u64) -> Result<LbInstance, GenError> {
    if params.items == 0 || params.group_count == 0 {
        return Err(GenError::Zero("item and group count"));
    }
    let mut rng = rng_from_seed(seed);
    let adj = sample_degree_capped(params.items, params.platforms, params.max_degree, &mut rng)?;
    let overall = params.overall_lb.unwrap_or(params.group_count * params.group_lb);
    let platforms = adj
        .into_iter()
        .map(|neighbors| {
            let gs = split_by_group(&neighbors, params.items, params.group_count)
                .into_iter()
                .map(|m| LbGroup::new(m, params.group_lb))
                .collect();
            LbPlatform::new(neighbors, overall, gs)
        })
        .collect();
    Ok(LbInstance { item_count: params.items, platforms })
}

/// Parameters of the proportional-fairness generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairParams {
    pub items: usize,
    pub platforms: usize,
    pub max_degree: usize,
    pub group_count: usize,
    pub lb: usize,
    pub ub: usize,
    pub alpha: Ratio,
    pub beta: Ratio,
}

impl FairParams {
    /// 2,000 items in 20 groups of 100, 100 platforms, `[10, 40]`, windows `[1/40, 1/10]`.
    pub fn synthetic(max_degree: usize) -> Self {
        FairParams {
            items: 2_000,
            platforms: 100,
            max_degree,
            group_count: 20,
            lb: 10,
            ub: 40,
            alpha: Ratio::new(1, 40).unwrap(),
            beta: Ratio::new(1, 10).unwrap(),
        }
    }
}

/// Degree-capped graph whose platform groups are the neighbors split by global
/// group; every global group appears on every platform, possibly empty.
pub fn gen_fair(params: &FairParams, seed: u64) -> Result<FairInstance, GenError> {
    if params.items == 0 || params.group_count == 0 {
        return Err(GenError::Zero("item and group count"));
    }
    let mut rng = rng_from_seed(seed);
    let adj = sample_degree_capped(params.items, params.platforms, params.max_degree, &mut rng)?;
    let platforms = adj
        .into_iter()
        .map(|neighbors| {
            let gs = split_by_group(&neighbors, params.items, params.group_count)
                .into_iter()
                .map(|m| FairGroup::new(m, params.alpha, params.beta))
                .collect();
            FairPlatform::new(neighbors, params.lb, params.ub, gs)
        })
        .collect();
    Ok(FairInstance { item_count: params.items, platforms })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub nodes: usize,
    pub k: usize,
    /// Leaf group bounds are drawn from `0..=max_leaf_bound`.
    pub max_leaf_bound: usize,
    pub max_leaf_reward: u64,
    /// Each budget coordinate is drawn from `0..=max_budget`.
    pub max_budget: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { nodes: 10, k: 2, max_leaf_bound: 4, max_leaf_reward: 5, max_budget: 12 }
    }
}

/// Random tree with `parent(i) < i`, built bottom-up: leaves draw bounds and
/// rewards, and every inner value is drawn between 0 and its children's sum,
/// so both monotonicity conditions hold by construction.
pub fn gen_tree(params: &TreeParams, seed: u64) -> Result<TreeInstance, GenError> {
    if params.nodes == 0 {
        return Err(GenError::Zero("node count"));
    }
    let mut rng = rng_from_seed(seed);
    let n = params.nodes;
    let parent: Vec<Option<usize>> =
        (0..n).map(|i| if i == 0 { None } else { Some(rng.gen_range(0..i)) }).collect();
    let mut children = vec![Vec::new(); n];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(i);
        }
    }
    let mut specs: Vec<NodeSpec> =
        parent.iter().map(|&p| NodeSpec { parent: p, group_lb: vec![0; params.k], lb: 0, reward: 0 }).collect();
    for v in (0..n).rev() {
        if children[v].is_empty() {
            let group_lb: Vec<usize> = (0..params.k).map(|_| rng.gen_range(0..=params.max_leaf_bound)).collect();
            let sum: usize = group_lb.iter().sum();
            specs[v].lb = rng.gen_range(0..=sum + 2);
            specs[v].group_lb = group_lb;
            specs[v].reward = rng.gen_range(0..=params.max_leaf_reward);
        } else {
            for g in 0..params.k {
                let sum: usize = children[v].iter().map(|&c| specs[c].group_lb[g]).sum();
                specs[v].group_lb[g] = rng.gen_range(0..=sum);
            }
            let lb_sum: usize = children[v].iter().map(|&c| specs[c].lb).sum();
            specs[v].lb = rng.gen_range(0..=lb_sum);
            let reward_sum: u64 = children[v].iter().map(|&c| specs[c].reward).sum();
            specs[v].reward = rng.gen_range(0..=reward_sum);
        }
    }
    let budget: Vec<usize> = (0..params.k).map(|_| rng.gen_range(0..=params.max_budget)).collect();
    let sum: usize = budget.iter().sum();
    let total = rng.gen_range(sum / 2..=sum + 2);
    Ok(TreeInstance::from_parents(params.k, budget, total, specs))
}

/// Random subset of `pool`, each element kept with probability 1/2.
fn coin_subset(pool: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    pool.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Splits `items` into `parts` random disjoint classes (some may be empty).
fn random_partition(items: &[usize], parts: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); parts];
    for &i in items {
        out[rng.gen_range(0..parts)].push(i);
    }
    out
}

/// Small lower-bound instance for exhaustive checks: up to `max_items` items,
/// up to `max_platforms` platforms, bounds up to `max_bound`, and at most two
/// disjoint groups per platform.
pub fn gen_small_lb(max_items: usize, max_platforms: usize, max_bound: usize, seed: u64) -> LbInstance {
    let mut rng = rng_from_seed(seed);
    let items = rng.gen_range(1..=max_items.max(1));
    let all: Vec<usize> = (0..items).collect();
    let m = rng.gen_range(1..=max_platforms.max(1));
    let platforms = (0..m)
        .map(|_| {
            let neighbors = coin_subset(&all, &mut rng);
            let group_count = rng.gen_range(0..=2);
            let mut groups = Vec::new();
            if group_count > 0 {
                for members in random_partition(&neighbors, group_count + 1, &mut rng).into_iter().take(group_count) {
                    let lb = rng.gen_range(0..=max_bound.min(members.len()));
                    groups.push(LbGroup::new(members, lb));
                }
            }
            let lb = rng.gen_range(0..=max_bound);
            LbPlatform::new(neighbors, lb, groups)
        })
        .collect();
    LbInstance { item_count: items, platforms }
}

fn small_ratio(rng: &mut ChaCha8Rng) -> Ratio {
    let den = rng.gen_range(1..=4);
    Ratio::new(rng.gen_range(0..=den), den).unwrap()
}

/// Small fairness instance for exhaustive checks; groups partition each
/// platform's neighbors and windows are fractions with denominator at most 4.
pub fn gen_small_fair(max_items: usize, max_platforms: usize, max_bound: usize, seed: u64) -> FairInstance {
    let mut rng = rng_from_seed(seed);
    let items = rng.gen_range(1..=max_items.max(1));
    let all: Vec<usize> = (0..items).collect();
    let m = rng.gen_range(1..=max_platforms.max(1));
    let platforms = (0..m)
        .map(|_| {
            let neighbors = coin_subset(&all, &mut rng);
            let parts = rng.gen_range(1..=3);
            let groups = random_partition(&neighbors, parts, &mut rng)
                .into_iter()
                .map(|members| {
                    let (a, b) = (small_ratio(&mut rng), small_ratio(&mut rng));
                    FairGroup::new(members, a.min(b), a.max(b))
                })
                .collect();
            let lb = rng.gen_range(1..=max_bound.max(1));
            let ub = rng.gen_range(lb..=3 * lb);
            FairPlatform::new(neighbors, lb, ub, groups)
        })
        .collect();
    FairInstance { item_count: items, platforms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::has_errors;

    #[test]
    fn complete_and_empty_graphs() {
        let full = gen_er_partition(4, 2, 1.0, 3, 1, 7).unwrap();
        assert!(full.platforms.iter().all(|p| p.neighbors.len() == 8));
        let empty = gen_er_partition(4, 2, 0.0, 3, 1, 7).unwrap();
        assert!(empty.platforms.iter().all(|p| p.neighbors.is_empty()));
        assert!(gen_er_partition(4, 2, 1.5, 3, 1, 7).is_err());
    }

    #[test]
    fn same_seed_same_instance() {
        let a = gen_er_partition(20, 4, 0.3, 10, 2, 42).unwrap();
        assert_eq!(a, gen_er_partition(20, 4, 0.3, 10, 2, 42).unwrap());
        assert_ne!(a, gen_er_partition(20, 4, 0.3, 10, 2, 43).unwrap());
        let p = DegreeCappedParams::synthetic(9);
        assert_eq!(gen_degree_capped(&p, 5).unwrap(), gen_degree_capped(&p, 5).unwrap());
        assert_eq!(gen_tree(&TreeParams::default(), 3).unwrap(), gen_tree(&TreeParams::default(), 3).unwrap());
    }

    #[test]
    fn degree_one_gives_single_neighbor() {
        let p = DegreeCappedParams { items: 50, platforms: 5, max_degree: 1, group_count: 5, group_lb: 1, overall_lb: None };
        let inst = gen_degree_capped(&p, 1).unwrap();
        assert!(inst.item_degrees().iter().all(|&d| d == 1));
    }

    #[test]
    fn degree_above_platforms_rejected() {
        let p = DegreeCappedParams { items: 5, platforms: 3, max_degree: 4, group_count: 1, group_lb: 1, overall_lb: None };
        assert_eq!(gen_degree_capped(&p, 0), Err(GenError::MaxDegree { max_degree: 4, platforms: 3 }));
    }

    #[test]
    fn synthetic_shape() {
        let inst = gen_degree_capped(&DegreeCappedParams::synthetic(5), 11).unwrap();
        assert_eq!(inst.item_count, 10_000);
        assert_eq!(inst.platforms.len(), 250);
        let sizes: Vec<usize> = (0..20).map(|g| (0..10_000).filter(|&i| group_of(i, 10_000, 20) == g).count()).collect();
        assert!(sizes.iter().all(|&s| s == 500));
        assert!(inst.platforms.iter().all(|p| p.groups.len() == 20 && p.lb == 40));
        assert!(!has_errors(&inst.validate()));
    }

    #[test]
    fn mean_degree_matches_uniform_draw() {
        for max_degree in [1, 10, 99] {
            let p = DegreeCappedParams { items: 2_000, platforms: 100, max_degree, group_count: 4, group_lb: 1, overall_lb: None };
            let mut total = 0usize;
            for seed in 0..10 {
                total += gen_degree_capped(&p, seed).unwrap().item_degrees().iter().sum::<usize>();
            }
            let mean = total as f64 / (10.0 * 2_000.0);
            let expected = (1 + max_degree) as f64 / 2.0;
            assert!((mean - expected).abs() <= 0.05 * expected, "max {max_degree}: mean {mean}");
        }
    }

    #[test]
    fn fair_defaults() {
        let inst = gen_fair(&FairParams::synthetic(10), 2).unwrap();
        assert_eq!(inst.item_count, 2_000);
        assert_eq!(inst.platforms.len(), 100);
        let p = &inst.platforms[0];
        assert_eq!((p.lb, p.ub, p.groups.len()), (10, 40, 20));
        assert_eq!(p.groups[0].alpha, Ratio::new(1, 40).unwrap());
        assert_eq!(p.groups[0].beta, Ratio::new(1, 10).unwrap());
        assert!(!has_errors(&inst.validate()));
    }

    #[test]
    fn trees_always_valid() {
        for seed in 0..1000 {
            let params = TreeParams { nodes: 1 + (seed as usize % 12), k: 1 + (seed as usize % 3), ..TreeParams::default() };
            let inst = gen_tree(&params, seed).unwrap();
            let v = inst.validate();
            assert!(!has_errors(&v), "seed {seed}: {v:?}");
        }
    }

    #[test]
    fn small_generators_are_valid() {
        for seed in 0..200 {
            assert!(!has_errors(&gen_small_lb(12, 4, 3, seed).validate()));
            assert!(!has_errors(&gen_small_fair(12, 3, 3, seed).validate()));
        }
    }

    #[test]
    fn average_degree_mapping() {
        assert_eq!(DegreeCappedParams::max_degree_for_average(1, 250), 1);
        assert_eq!(DegreeCappedParams::max_degree_for_average(5, 250), 9);
        assert_eq!(DegreeCappedParams::max_degree_for_average(125, 250), 249);
        assert_eq!(DegreeCappedParams::max_degree_for_average(200, 250), 250);
    }
}
