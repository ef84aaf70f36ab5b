use std::path::Path;
use std::time::Instant;

use diverse_match::gen::{
    gen_degree_capped, gen_er_partition, gen_fair, gen_small_fair, gen_small_lb, gen_tree, DegreeCappedParams,
    FairParams, TreeParams,
};
use diverse_match::io::{
    assignment_from_doc, parse_solution, read_instance, read_solution, solution_to_string, write_instance,
    write_solution, write_text, FairScoreDoc, FairSolutionDoc, Instance, LbSolutionDoc, SolutionDoc, TreeSolutionDoc,
};
use diverse_match::oracle::{exact_fair, exact_lb, exact_tree, OracleError, OracleLimits};
use diverse_match::solver::tree::DEFAULT_CELL_LIMIT;
use diverse_match::{
    canonical_order, check_tree_solution, has_errors, satisfied_lb_platforms, solve_fair, solve_fair_naive, solve_lb,
    solve_tree, FairReport, LbStrategy, LbVariant, Severity, TreeError, TreeOptions,
};

use crate::args::{FairAlgorithm, Format, GenArgs, Problem, SolveArgs, Strategy, SweepArgs};
use crate::error::CliError;
use crate::sweep::{
    parse_degrees, rows_to_csv, rows_to_json, run_sweep, threads_from_env, Row, SweepConfig, SweepPreset, SweepStrategy,
};

/// Resource caps for the tree DP and the exact oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub cells: usize,
    pub oracle: OracleLimits,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { cells: DEFAULT_CELL_LIMIT, oracle: OracleLimits::default() }
    }
}

impl Limits {
    /// Parses `cells=N,items=N,...`; unspecified caps keep their defaults.
    pub fn parse(spec: Option<&str>) -> Result<Self, CliError> {
        let mut limits = Limits::default();
        for part in spec.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) =
                part.split_once('=').ok_or_else(|| CliError::Usage(format!("limit `{part}` is not name=value")))?;
            let value: usize =
                value.trim().parse().map_err(|_| CliError::Usage(format!("limit `{part}` needs an integer")))?;
            let slot = match name.trim() {
                "cells" => &mut limits.cells,
                "items" => &mut limits.oracle.max_items,
                "candidates" => &mut limits.oracle.max_candidates,
                "states" => &mut limits.oracle.max_states,
                "nodes" => &mut limits.oracle.max_tree_nodes,
                "covers" => &mut limits.oracle.max_covers,
                other => return Err(CliError::Usage(format!("unknown limit `{other}`"))),
            };
            *slot = value;
        }
        Ok(limits)
    }
}

pub fn variant_of(s: Strategy) -> LbVariant {
    match s {
        Strategy::Base => LbVariant::Base,
        Strategy::MinDegree => LbVariant::MinDegree,
        Strategy::Augment => LbVariant::Augmenting,
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Base => "base",
        Strategy::MinDegree => "min-degree",
        Strategy::Augment => "augment",
    }
}

fn limit_error(e: OracleError) -> CliError {
    CliError::Limit(e.to_string())
}

/// Solution of one instance together with solver time and, if requested, the optimum.
#[derive(Debug, Clone)]
pub struct Solved {
    pub doc: SolutionDoc,
    pub millis: u128,
    pub opt: Option<u64>,
}

pub fn solve_instance(inst: &Instance, args: &SolveArgs, limits: &Limits) -> Result<Solved, CliError> {
    let start = Instant::now();
    let doc = match inst {
        Instance::Lb(i) => {
            let strategy = LbStrategy::new(variant_of(args.strategy), args.seed);
            let sol = solve_lb(i, &canonical_order(i.platforms.len()), &strategy)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            SolutionDoc::Lb(LbSolutionDoc {
                strategy: strategy_name(args.strategy).to_string(),
                seed: args.seed,
                assignment: sol.assignment.item_to_platform,
                satisfied: sol.satisfied.into_iter().collect(),
            })
        }
        Instance::Fair(i) => {
            let order = canonical_order(i.platforms.len());
            let (name, sol) = match args.algorithm {
                FairAlgorithm::Block => ("block", solve_fair(i, &order)),
                FairAlgorithm::Naive => ("naive", solve_fair_naive(i, &order)),
            };
            let sol = sol.map_err(|e| CliError::Failed(e.to_string()))?;
            SolutionDoc::Fair(FairSolutionDoc {
                algorithm: name.to_string(),
                assignment: sol.assignment.item_to_platform,
                blocks: sol.blocks,
                strict: FairScoreDoc::from(&sol.report.strict),
                relaxed: FairScoreDoc::from(&sol.report.relaxed),
                multiplicative: FairScoreDoc::from(&sol.report.multiplicative),
            })
        }
        Instance::Tree(i) => {
            let out = solve_tree(i, TreeOptions { cell_limit: limits.cells }).map_err(|e| match e {
                TreeError::TooLarge { .. } => CliError::Limit(e.to_string()),
                TreeError::Invalid(_) => CliError::Validation(e.to_string()),
                TreeError::Infeasible => CliError::Failed(e.to_string()),
            })?;
            SolutionDoc::Tree(TreeSolutionDoc::from(&out.solution))
        }
    };
    let millis = start.elapsed().as_millis();
    let opt = if args.oracle {
        Some(match inst {
            Instance::Lb(i) => exact_lb(i, &limits.oracle).map_err(limit_error)?.value as u64,
            Instance::Fair(i) => exact_fair(i, &limits.oracle).map_err(limit_error)?.value as u64,
            Instance::Tree(i) => exact_tree(i, &limits.oracle).map_err(limit_error)?.total_reward,
        })
    } else {
        None
    };
    Ok(Solved { doc, millis, opt })
}

fn score_fields(prefix: &str, s: &FairScoreDoc) -> String {
    format!("{prefix}_satisfied={} {prefix}_matched={}", s.satisfied.len(), s.matched_to_satisfied)
}

fn disagree(what: &str) -> CliError {
    CliError::Failed(format!("solution file disagrees with the evaluator on {what}"))
}

/// Summary recomputed by the evaluators from a solution document.
pub fn summarize(inst: &Instance, doc: &SolutionDoc) -> Result<String, CliError> {
    match (inst, doc) {
        (Instance::Lb(i), SolutionDoc::Lb(d)) => {
            let a = assignment_from_doc(&d.assignment);
            let sat = satisfied_lb_platforms(i, &a).map_err(|e| CliError::Failed(e.to_string()))?;
            if sat.iter().copied().collect::<Vec<_>>() != d.satisfied {
                return Err(disagree("satisfied platforms"));
            }
            Ok(format!(
                "problem=lb strategy={} satisfied={} platforms={} matched={}",
                d.strategy,
                sat.len(),
                i.platforms.len(),
                a.matched_count()
            ))
        }
        (Instance::Fair(i), SolutionDoc::Fair(d)) => {
            let a = assignment_from_doc(&d.assignment);
            let report = FairReport::evaluate(i, &a).map_err(|e| CliError::Failed(e.to_string()))?;
            let (strict, relaxed, mult) = (
                FairScoreDoc::from(&report.strict),
                FairScoreDoc::from(&report.relaxed),
                FairScoreDoc::from(&report.multiplicative),
            );
            if strict != d.strict || relaxed != d.relaxed || mult != d.multiplicative {
                return Err(disagree("fairness scores"));
            }
            Ok(format!(
                "problem=fair algorithm={} {} {} {} matched={}",
                d.algorithm,
                score_fields("strict", &strict),
                score_fields("relaxed", &relaxed),
                score_fields("multiplicative", &mult),
                a.matched_count()
            ))
        }
        (Instance::Tree(i), SolutionDoc::Tree(d)) => {
            let sol = d.clone().into();
            check_tree_solution(i, &sol).map_err(|e| CliError::Failed(e.to_string()))?;
            let allocated: usize = sol.allocation.values().flatten().sum();
            Ok(format!(
                "problem=tree reward={} satisfied={} allocated={} synthetic_root_only={}",
                sol.total_reward,
                sol.satisfied_nodes.len(),
                allocated,
                sol.synthetic_root_only
            ))
        }
        _ => Err(CliError::Schema(format!(
            "solution for {} does not match a {} instance",
            doc.problem(),
            inst.problem()
        ))),
    }
}

/// Reads, validates and solves one instance; writes the solution when `out`
/// is set and returns the summary recomputed from what was written.
pub fn cmd_solve(args: &SolveArgs) -> Result<String, CliError> {
    let limits = Limits::parse(args.limits.as_deref())?;
    let inst = read_instance(&args.input)?;
    if let Some(p) = args.problem {
        if p.name() != inst.problem() {
            return Err(CliError::Schema(format!("--problem {} but the file holds a {} instance", p.name(), inst.problem())));
        }
    }
    let violations = inst.validate();
    for v in violations.iter().filter(|v| v.severity() == Severity::Warning) {
        eprintln!("warning: {v}");
    }
    if has_errors(&violations) {
        let lines: Vec<String> =
            violations.iter().filter(|v| v.severity() == Severity::Error).map(ToString::to_string).collect();
        return Err(CliError::Validation(lines.join("\n")));
    }
    let solved = solve_instance(&inst, args, &limits)?;
    let written = match &args.out {
        Some(path) => {
            write_solution(path, &solved.doc)?;
            read_solution(path)?
        }
        None => parse_solution(&solution_to_string(&solved.doc))?,
    };
    let mut line = summarize(&inst, &written)?;
    if let Some(opt) = solved.opt {
        line.push_str(&format!(" opt={opt}"));
    }
    line.push_str(&format!(" millis={}", solved.millis));
    Ok(line)
}

fn gen_error(e: diverse_match::gen::GenError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Max degree from `--max-degree`, else from `--avg-degree` (default 10).
fn max_degree(args: &GenArgs, platforms: usize) -> usize {
    args.max_degree
        .unwrap_or_else(|| DegreeCappedParams::max_degree_for_average(args.avg_degree.unwrap_or(10), platforms))
}

pub fn generate(args: &GenArgs) -> Result<Instance, CliError> {
    let preset = args.preset.as_deref();
    let inst = match (args.problem, preset) {
        (Problem::Lb, Some("er")) => {
            let n = args.n_per_group.unwrap_or(200);
            let groups = args.groups.unwrap_or(4);
            let rho = args.rho.unwrap_or_else(|| {
                let total = (n * groups) as f64;
                8.0 * total.ln() / total
            });
            let m = args.platforms.unwrap_or(100);
            Instance::Lb(gen_er_partition(n, groups, rho, m, args.group_lb.unwrap_or(2), args.seed).map_err(gen_error)?)
        }
        (Problem::Lb, None | Some("synthetic" | "real-like")) => {
            let base = if preset == Some("real-like") {
                DegreeCappedParams::real_like(1)
            } else {
                DegreeCappedParams::synthetic(1)
            };
            let mut params = DegreeCappedParams {
                items: args.items.unwrap_or(base.items),
                platforms: args.platforms.unwrap_or(base.platforms),
                group_count: args.groups.unwrap_or(base.group_count),
                group_lb: args.group_lb.unwrap_or(base.group_lb),
                ..base
            };
            params.max_degree = max_degree(args, params.platforms);
            Instance::Lb(gen_degree_capped(&params, args.seed).map_err(gen_error)?)
        }
        (Problem::Lb, Some("small")) => Instance::Lb(gen_small_lb(
            args.items.unwrap_or(12),
            args.platforms.unwrap_or(4),
            args.group_lb.unwrap_or(3),
            args.seed,
        )),
        (Problem::Fair, None | Some("synthetic")) => {
            let base = FairParams::synthetic(1);
            let mut params = FairParams {
                items: args.items.unwrap_or(base.items),
                platforms: args.platforms.unwrap_or(base.platforms),
                group_count: args.groups.unwrap_or(base.group_count),
                ..base
            };
            params.max_degree = max_degree(args, params.platforms);
            Instance::Fair(gen_fair(&params, args.seed).map_err(gen_error)?)
        }
        (Problem::Fair, Some("small")) => Instance::Fair(gen_small_fair(
            args.items.unwrap_or(12),
            args.platforms.unwrap_or(3),
            args.group_lb.unwrap_or(3),
            args.seed,
        )),
        (Problem::Tree, None | Some("random")) => {
            let base = TreeParams::default();
            let params = TreeParams {
                nodes: args.nodes.unwrap_or(base.nodes),
                k: args.k.unwrap_or(base.k),
                max_budget: args.max_budget.unwrap_or(base.max_budget),
                ..base
            };
            Instance::Tree(gen_tree(&params, args.seed).map_err(gen_error)?)
        }
        (p, Some(other)) => return Err(CliError::Usage(format!("unknown preset `{other}` for {}", p.name()))),
    };
    Ok(inst)
}

pub fn cmd_gen(args: &GenArgs) -> Result<String, CliError> {
    let inst = generate(args)?;
    write_instance(&args.out, &inst)?;
    Ok(format!("problem={} seed={} out={}", inst.problem(), args.seed, display(&args.out)))
}

pub(crate) fn display(p: &Path) -> String {
    p.display().to_string()
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, CliError> {
    let preset = match (args.problem, args.preset.as_str()) {
        (Problem::Lb, "synthetic") => SweepPreset::LbSynthetic,
        (Problem::Lb, "real-like") => SweepPreset::LbRealLike,
        (Problem::Fair, "synthetic") => SweepPreset::FairSynthetic,
        (Problem::Tree, _) => return Err(CliError::Usage("sweep supports lb and fair only".into())),
        (p, other) => return Err(CliError::Usage(format!("unknown sweep preset `{other}` for {}", p.name()))),
    };
    let allowed: &[SweepStrategy] = if args.problem == Problem::Lb { &SweepStrategy::LB } else { &SweepStrategy::FAIR };
    let strategies = if args.strategies.is_empty() {
        allowed.to_vec()
    } else {
        let mut out = Vec::new();
        for name in &args.strategies {
            match SweepStrategy::parse(name).filter(|s| allowed.contains(s)) {
                Some(s) if !out.contains(&s) => out.push(s),
                Some(_) => {}
                None => return Err(CliError::Usage(format!("strategy `{name}` does not apply to {}", args.problem.name()))),
            }
        }
        out
    };
    let limits = Limits::parse(args.limits.as_deref())?;
    Ok(SweepConfig {
        preset,
        degrees: parse_degrees(&args.degrees)?,
        seeds: (args.seed..args.seed.saturating_add(args.seeds)).collect(),
        strategies,
        oracle: args.oracle.then_some(limits.oracle),
        timing: args.timing,
        threads: threads_from_env(),
    })
}

/// Runs a sweep and writes rows to `--out` (plus a `.meta.json` sidecar) or stdout.
pub fn cmd_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let cfg = sweep_config(args)?;
    let rows = run_sweep(&cfg)?;
    let body = match args.format {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => rows_to_json(&rows),
    };
    let errors: Vec<&Row> = rows.iter().filter(|r| r.error.is_some()).collect();
    let summary = format!("problem={} rows={} errors={}", args.problem.name(), rows.len(), errors.len());
    let Some(out) = &args.out else {
        print!("{body}");
        return Ok(summary);
    };
    write_text(out, &body)?;
    let meta = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "git": env!("DM_GIT_DESCRIBE"),
        "problem": args.problem.name(),
        "preset": args.preset,
        "degrees": cfg.degrees,
        "seeds": cfg.seeds,
        "strategies": cfg.strategies.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "oracle": args.oracle,
        "timing": args.timing,
        "errors": errors.iter().map(|r| serde_json::json!({
            "degree": r.degree, "seed": r.seed, "strategy": r.strategy.name(), "error": r.error,
        })).collect::<Vec<_>>(),
    });
    let mut meta_path = out.clone().into_os_string();
    meta_path.push(".meta.json");
    let mut meta_text = serde_json::to_string_pretty(&meta).expect("json value serializes");
    meta_text.push('\n');
    write_text(Path::new(&meta_path), &meta_text)?;
    Ok(format!("{summary} out={}", display(out)))
}
