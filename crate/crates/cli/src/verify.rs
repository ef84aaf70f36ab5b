//! Named end-to-end checks. Each suite returns a report whose lines carry the
//! measured quantities; a suite passes only if every check in it holds.

use std::path::Path;
use std::time::Instant;

use diverse_match::gen::{gen_er_partition, gen_small_fair, gen_small_lb, gen_tree, DegreeCappedParams, TreeParams};
use diverse_match::model::NodeSpec;
use diverse_match::oracle::{exact_fair, exact_lb, exact_tree, OracleLimits};
use diverse_match::solver::tree::{
    binarize, dp_solve, fold_overall_bounds, reduce_base_to_intermediate, reduce_intermediate_to_steiner,
    DEFAULT_CELL_LIMIT,
};
use diverse_match::{
    canonical_order, fair_score, solve_fair, solve_lb, solve_tree, FairMode, LbStrategy, TreeInstance,
    TreeOptions,
};

use crate::args::{FairAlgorithm, GenArgs, Problem, SolveArgs, Strategy, SweepArgs};
use crate::commands::{cmd_gen, cmd_solve};
use crate::error::CliError;
use crate::sweep::{mean_by_degree, run_sweep, SweepConfig, SweepPreset, SweepStrategy};

pub const SUITES: [&str; 8] =
    ["fig1", "ratio-lb", "ratio-fair", "tree-oracle", "random-graph", "sweep-trend", "heuristic-order", "determinism"];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {line}"));
    }

    pub fn headline(&self) -> String {
        format!("{} {}", if self.passed { "PASS" } else { "FAIL" }, self.name)
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.headline())?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        Ok(())
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport, CliError> {
    Ok(match name {
        "fig1" => fig1(),
        "ratio-lb" => ratio_lb(500),
        "ratio-fair" => ratio_fair(300),
        "tree-oracle" => tree_oracle(300),
        "random-graph" => random_graph(20),
        "sweep-trend" => sweep_trend(5),
        "heuristic-order" => heuristic_order(15),
        "determinism" => determinism()?,
        other => return Err(CliError::Usage(format!("unknown suite `{other}`; one of {} or all", SUITES.join(", ")))),
    })
}

/// The seven-node, one-group region tree with 10 items.
pub fn worked_tree() -> TreeInstance {
    let bounds = [6, 4, 4, 3, 3, 3, 3];
    let rewards = [0, 3, 3, 2, 2, 2, 2];
    let parents = [None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)];
    let specs = (0..7)
        .map(|i| NodeSpec { parent: parents[i], group_lb: vec![bounds[i]], lb: bounds[i], reward: rewards[i] })
        .collect();
    TreeInstance::from_parents(1, vec![10], 10, specs)
}

pub fn fig1() -> SuiteReport {
    let mut r = SuiteReport::new("fig1");
    let inst = worked_tree();
    let start = Instant::now();
    let out = solve_tree(&inst, TreeOptions::default());
    let secs = start.elapsed().as_secs_f64();
    let Ok(out) = out else {
        r.check(false, format!("solver error: {}", out.unwrap_err()));
        return r;
    };
    let sol = out.solution;
    let allocated: usize = sol.allocation.values().flatten().sum();
    r.check(sol.total_reward == 7, format!("reward {} (expected 7)", sol.total_reward));
    r.check(sol.satisfied_nodes == vec![2, 3, 4], format!("satisfied {:?} (expected [2, 3, 4])", sol.satisfied_nodes));
    r.check(allocated == 10 && allocated <= inst.total, format!("allocated {allocated} of {}", inst.total));
    r.check(secs < 0.1, format!("runtime {secs:.4}s (< 0.1s)"));
    r
}

pub fn ratio_lb(instances: u64) -> SuiteReport {
    let mut r = SuiteReport::new("ratio-lb");
    let start = Instant::now();
    let (mut violations, mut below_opt, mut refused) = (0, 0, 0);
    let mut worst = f64::INFINITY;
    for seed in 0..instances {
        let inst = gen_small_lb(12, 4, 3, seed);
        let greedy = solve_lb(&inst, &canonical_order(inst.platforms.len()), &LbStrategy::base())
            .expect("canonical order is a permutation")
            .satisfied
            .len();
        let Ok(opt) = exact_lb(&inst, &OracleLimits::default()) else {
            refused += 1;
            continue;
        };
        if greedy * (inst.ell_thm1() + 2) < opt.value {
            violations += 1;
            r.note(format!("seed {seed}: greedy {greedy}, opt {}, ell {}", opt.value, inst.ell_thm1()));
        }
        if greedy < opt.value {
            below_opt += 1;
            worst = worst.min(greedy as f64 / opt.value as f64);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.check(refused == 0, format!("{instances} instances, oracle refused {refused}"));
    r.check(violations == 0, format!("greedy * (ell + 2) >= OPT on all; violations {violations}"));
    r.note(format!(
        "greedy below OPT on {below_opt} instances, worst greedy/OPT {}",
        if worst.is_finite() { format!("{worst:.3}") } else { "n/a".into() }
    ));
    r.check(secs < 60.0, format!("runtime {secs:.2}s (< 60s)"));
    r
}

pub fn ratio_fair(instances: u64) -> SuiteReport {
    let mut r = SuiteReport::new("ratio-fair");
    let start = Instant::now();
    let (mut window_bad, mut size_bad, mut ratio_bad, mut refused, mut satisfied_total) = (0, 0, 0, 0, 0);
    for seed in 0..instances {
        let inst = gen_small_fair(12, 3, 3, seed);
        let sol = solve_fair(&inst, &canonical_order(inst.platforms.len())).expect("generated groups partition");
        let relaxed = fair_score(&inst, &sol.assignment, FairMode::Relaxed).expect("solver output is valid");
        let sets = sol.assignment.matched_sets(inst.platforms.len());
        for (j, p) in inst.platforms.iter().enumerate() {
            let m = sets[j].len();
            if m == 0 {
                continue;
            }
            satisfied_total += 1;
            if !relaxed.satisfied.contains(&j) {
                window_bad += 1;
                r.note(format!("seed {seed} platform {j}: relaxed window violated"));
            }
            if !m.is_multiple_of(p.lb) || m < p.lb || m > p.ub {
                size_bad += 1;
                r.note(format!("seed {seed} platform {j}: |M| = {m} with lb {} ub {}", p.lb, p.ub));
            }
        }
        match exact_fair(&inst, &OracleLimits::default()) {
            Ok(opt) => {
                if relaxed.matched_to_satisfied * 2 * (inst.ell_thm2() + 2) < opt.value {
                    ratio_bad += 1;
                    r.note(format!("seed {seed}: matched {}, strict OPT {}", relaxed.matched_to_satisfied, opt.value));
                }
            }
            Err(_) => refused += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.check(refused == 0, format!("{instances} instances, {satisfied_total} matched platforms, oracle refused {refused}"));
    r.check(window_bad == 0, format!("(a) additive relaxed window on every matched platform; violations {window_bad}"));
    r.check(size_bad == 0, format!("(b) |M_j| a multiple of lb within [lb, ub]; violations {size_bad}"));
    r.check(ratio_bad == 0, format!("(c) matched * 2(ell + 2) >= strict OPT; violations {ratio_bad}"));
    r.check(secs < 120.0, format!("runtime {secs:.2}s (< 120s)"));
    r
}

pub fn tree_oracle(instances: u64) -> SuiteReport {
    let mut r = SuiteReport::new("tree-oracle");
    let start = Instant::now();
    let (mut mismatch, mut binarize_bad, mut errors) = (0, 0, 0);
    for seed in 0..instances {
        let params = TreeParams {
            nodes: 1 + (diverse_match::gen::substream_seed(seed, 0) % 10) as usize,
            k: 1 + (diverse_match::gen::substream_seed(seed, 1) % 2) as usize,
            max_leaf_bound: 4,
            max_leaf_reward: 6,
            max_budget: 12,
        };
        let inst = gen_tree(&params, seed).expect("positive node count");
        let (Ok(out), Ok(opt)) = (solve_tree(&inst, TreeOptions::default()), exact_tree(&inst, &OracleLimits::default()))
        else {
            errors += 1;
            continue;
        };
        if out.solution.total_reward != opt.total_reward {
            mismatch += 1;
            r.note(format!("seed {seed}: pipeline {} vs oracle {}", out.solution.total_reward, opt.total_reward));
        }
        let steiner = reduce_base_to_intermediate(&fold_overall_bounds(&inst)).map(|i| reduce_intermediate_to_steiner(&i));
        let same = steiner.ok().and_then(|s| {
            let a = dp_solve(&s, DEFAULT_CELL_LIMIT).ok()?.reward;
            let b = dp_solve(&binarize(&s), DEFAULT_CELL_LIMIT).ok()?.reward;
            Some(a == b)
        });
        if same != Some(true) {
            binarize_bad += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.check(errors == 0, format!("{instances} trees, solver or oracle errors {errors}"));
    r.check(mismatch == 0, format!("pipeline reward == exhaustive oracle; mismatches {mismatch}"));
    r.check(binarize_bad == 0, format!("binarization preserves the optimum; mismatches {binarize_bad}"));
    r.check(secs < 60.0, format!("runtime {secs:.2}s (< 60s)"));
    r
}

pub fn random_graph(seeds: u64) -> SuiteReport {
    let mut r = SuiteReport::new("random-graph");
    let start = Instant::now();
    let total = 800.0_f64;
    let rho = 8.0 * total.ln() / total;
    let mut counts = Vec::new();
    for seed in 0..seeds {
        let inst = gen_er_partition(200, 4, rho, 100, 2, seed).expect("rho in [0, 1]");
        let sol = solve_lb(&inst, &canonical_order(100), &LbStrategy::base()).expect("permutation");
        counts.push(sol.satisfied.len());
    }
    let secs = start.elapsed().as_secs_f64();
    let good = counts.iter().filter(|&&c| c >= 95).count();
    r.note(format!("rho = {rho:.6}; satisfied per seed {counts:?}"));
    let needed = (seeds * 9).div_ceil(10) as usize;
    r.check(good >= needed, format!("runs with >= 95 of 100 satisfied: {good} of {seeds} (need {needed})"));
    r.check(secs < 30.0, format!("runtime {secs:.2}s (< 30s)"));
    r
}

fn lb_sweep(degrees: Vec<usize>, seeds: u64, strategies: Vec<SweepStrategy>) -> Vec<crate::sweep::Row> {
    let cfg = SweepConfig {
        preset: SweepPreset::LbSynthetic,
        degrees,
        seeds: (0..seeds).collect(),
        strategies,
        oracle: None,
        timing: false,
        threads: crate::sweep::threads_from_env(),
    };
    run_sweep(&cfg).expect("thread pool builds")
}

pub fn sweep_trend(seeds: u64) -> SuiteReport {
    let mut r = SuiteReport::new("sweep-trend");
    let platforms = 250.0;
    let degrees: Vec<usize> = (5..=125).step_by(10).collect();
    let rows = lb_sweep(degrees, seeds, vec![SweepStrategy::Base]);
    let means = mean_by_degree(&rows, SweepStrategy::Base);
    r.note(format!(
        "mean satisfied by mean degree: {}",
        means.iter().map(|(d, m)| format!("{d}:{m:.1}")).collect::<Vec<_>>().join(" ")
    ));
    // a drop of more than 1% of the platforms between neighbours breaks the trend
    let drops: Vec<usize> = means.windows(2).filter(|w| w[1].1 + 0.01 * platforms < w[0].1).map(|w| w[1].0).collect();
    r.check(drops.is_empty(), format!("non-decreasing within 1% of platforms; drops at {drops:?}"));
    r.check(
        means.last().map(|l| l.1) > means.first().map(|f| f.1),
        "mean at the largest degree exceeds the smallest".to_string(),
    );
    let threshold = (0..means.len()).find(|&i| means[i..].iter().all(|&(_, m)| m >= 0.95 * platforms));
    r.check(
        threshold.is_some(),
        match threshold {
            Some(i) => format!("threshold degree {}: every later point >= 95% satisfied", means[i].0),
            None => "no degree beyond which >= 95% of platforms are satisfied".to_string(),
        },
    );
    let max_degree = DegreeCappedParams::max_degree_for_average(125, 250);
    let inst = diverse_match::gen::gen_degree_capped(&DegreeCappedParams::synthetic(max_degree), 0).expect("valid");
    let start = Instant::now();
    let _ = solve_lb(&inst, &canonical_order(250), &LbStrategy::base());
    let secs = start.elapsed().as_secs_f64();
    r.check(secs < 1.0, format!("greedy solve at full scale, mean degree 125: {secs:.3}s (< 1s)"));
    r
}

pub fn heuristic_order(seeds: u64) -> SuiteReport {
    let mut r = SuiteReport::new("heuristic-order");
    let degrees: Vec<usize> = (5..=125).step_by(20).collect();
    let rows = lb_sweep(degrees, seeds, SweepStrategy::LB.to_vec());
    let base = mean_by_degree(&rows, SweepStrategy::Base);
    let min_degree = mean_by_degree(&rows, SweepStrategy::MinDegree);
    let augment = mean_by_degree(&rows, SweepStrategy::Augment);
    for ((b, m), a) in base.iter().zip(&min_degree).zip(&augment) {
        r.note(format!("degree {:>3}: base {:.2}  min-degree {:.2}  augment {:.2}", b.0, b.1, m.1, a.1));
    }
    let overall = |v: &[(usize, f64)]| v.iter().map(|x| x.1).sum::<f64>() / v.len().max(1) as f64;
    let exceptions: Vec<usize> = base.iter().zip(&augment).filter(|(b, a)| a.1 < b.1).map(|(b, _)| b.0).collect();
    let md_exceptions: Vec<usize> = base.iter().zip(&min_degree).filter(|(b, m)| m.1 < b.1).map(|(b, _)| b.0).collect();
    r.check(
        overall(&augment) >= overall(&base),
        format!("mean augment {:.2} >= mean base {:.2}", overall(&augment), overall(&base)),
    );
    r.note(format!("points where augment < base: {exceptions:?}"));
    r.note(format!("mean min-degree {:.2}; points where min-degree < base: {md_exceptions:?}", overall(&min_degree)));
    r
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    matches!((std::fs::read(a), std::fs::read(b)), (Ok(x), Ok(y)) if x == y)
}

/// Runs `gen`, `solve` and `sweep` twice each into separate directories and compares bytes.
pub fn determinism() -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new("determinism");
    let dir = std::env::temp_dir().join(format!("diverse-match-determinism-{}", std::process::id()));
    let runs = [dir.join("a"), dir.join("b")];
    for d in &runs {
        std::fs::create_dir_all(d)?;
    }
    let cases: [(Problem, Option<&str>, &str); 4] = [
        (Problem::Lb, Some("synthetic"), "lb.json"),
        (Problem::Lb, Some("small"), "small.json.gz"),
        (Problem::Fair, Some("synthetic"), "fair.json"),
        (Problem::Tree, Some("random"), "tree.json"),
    ];
    for d in &runs {
        for (problem, preset, file) in cases {
            let gen = GenArgs {
                problem,
                preset: preset.map(str::to_string),
                seed: 7,
                out: d.join(file),
                avg_degree: Some(5),
                max_degree: None,
                items: None,
                platforms: None,
                groups: None,
                group_lb: None,
                rho: None,
                n_per_group: None,
                nodes: None,
                k: None,
                max_budget: None,
            };
            cmd_gen(&gen)?;
            for strategy in [Strategy::Base, Strategy::MinDegree, Strategy::Augment] {
                let solve = SolveArgs {
                    problem: Some(problem),
                    input: d.join(file),
                    out: Some(d.join(format!("sol-{}-{file}", crate::commands::strategy_name(strategy)))),
                    strategy,
                    algorithm: FairAlgorithm::Block,
                    seed: 3,
                    limits: None,
                    oracle: false,
                };
                cmd_solve(&solve)?;
            }
        }
        let sweep = SweepArgs {
            problem: Problem::Lb,
            preset: "real-like".into(),
            degrees: "2,6".into(),
            seeds: 2,
            seed: 0,
            strategies: vec![],
            out: Some(d.join("sweep.csv")),
            format: crate::args::Format::Csv,
            oracle: false,
            timing: false,
            limits: None,
        };
        crate::commands::cmd_sweep(&sweep)?;
    }
    let mut names: Vec<String> = std::fs::read_dir(&runs[0])?.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    let differing: Vec<&String> = names.iter().filter(|n| !same_bytes(&runs[0].join(n), &runs[1].join(n))).collect();
    r.check(differing.is_empty(), format!("{} files compared across two runs; differing {differing:?}", names.len()));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(r)
}
