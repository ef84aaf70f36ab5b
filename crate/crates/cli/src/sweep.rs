//! Degree sweeps: generate, solve with several strategies, score, emit rows.
//!
//! CSV columns are `degree,seed,strategy,value,opt_or_bound,is_bound,ratio,millis`.
//! `degree` is the target mean item degree; the generator draws item degrees
//! uniformly from `1..=2*degree-1`, capped at the platform count. For `lb` the
//! value is the number of satisfied platforms and the bound
//! `min(platforms, floor(items / min demand))`; for `fair` the value is the
//! number of items matched to satisfied platforms (strict for `naive`,
//! additive-relaxed for `block`, multiplicative-relaxed for `block-mult`) and
//! the bound `min(items, sum of upper bounds)`. `is_bound` is 1 when the
//! reference is that bound rather than an exact optimum. `millis` is 0 unless
//! timing is requested, which keeps reruns byte-identical. A failed row keeps
//! its key with `value` set to `error`.

use std::time::Instant;

use diverse_match::gen::{gen_degree_capped, gen_fair, DegreeCappedParams, FairParams};
use diverse_match::oracle::{exact_fair, exact_lb, OracleLimits};
use diverse_match::{canonical_order, solve_fair, solve_fair_naive, solve_lb, FairInstance, LbInstance, LbStrategy, LbVariant};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;

pub const CSV_HEADER: [&str; 8] = ["degree", "seed", "strategy", "value", "opt_or_bound", "is_bound", "ratio", "millis"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepStrategy {
    Base,
    MinDegree,
    Augment,
    Naive,
    Block,
    BlockMult,
}

impl SweepStrategy {
    pub const LB: [SweepStrategy; 3] = [SweepStrategy::Base, SweepStrategy::MinDegree, SweepStrategy::Augment];
    pub const FAIR: [SweepStrategy; 3] = [SweepStrategy::Naive, SweepStrategy::Block, SweepStrategy::BlockMult];

    pub fn name(self) -> &'static str {
        match self {
            SweepStrategy::Base => "base",
            SweepStrategy::MinDegree => "min-degree",
            SweepStrategy::Augment => "augment",
            SweepStrategy::Naive => "naive",
            SweepStrategy::Block => "block",
            SweepStrategy::BlockMult => "block-mult",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::LB, Self::FAIR].concat().into_iter().find(|v| v.name() == s)
    }

    fn is_lb(self) -> bool {
        Self::LB.contains(&self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPreset {
    LbSynthetic,
    LbRealLike,
    FairSynthetic,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub preset: SweepPreset,
    pub degrees: Vec<usize>,
    pub seeds: Vec<u64>,
    pub strategies: Vec<SweepStrategy>,
    pub oracle: Option<OracleLimits>,
    pub timing: bool,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub degree: usize,
    pub seed: u64,
    pub strategy: SweepStrategy,
    pub value: Option<usize>,
    pub opt_or_bound: Option<usize>,
    pub is_bound: bool,
    pub ratio: Option<f64>,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Parses `a..b:step` (inclusive) or `a,b,c`.
pub fn parse_degrees(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("degree range `{spec}` is not `start..end:step` or a comma list"));
    let out: Vec<usize> = if let Some((range, step)) = spec.split_once(':') {
        let (a, b) = range.split_once("..").ok_or_else(bad)?;
        let (a, b, step): (usize, usize, usize) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if step == 0 || a > b {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

/// Worker count from `DM_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("DM_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0)
}

enum Generated {
    Lb(LbInstance),
    Fair(FairInstance),
}

fn generate(preset: SweepPreset, degree: usize, seed: u64) -> Result<Generated, String> {
    match preset {
        SweepPreset::LbSynthetic | SweepPreset::LbRealLike => {
            let mut p =
                if preset == SweepPreset::LbSynthetic { DegreeCappedParams::synthetic(1) } else { DegreeCappedParams::real_like(1) };
            p.max_degree = DegreeCappedParams::max_degree_for_average(degree, p.platforms);
            gen_degree_capped(&p, seed).map(Generated::Lb).map_err(|e| e.to_string())
        }
        SweepPreset::FairSynthetic => {
            let mut p = FairParams::synthetic(1);
            p.max_degree = DegreeCappedParams::max_degree_for_average(degree, p.platforms);
            gen_fair(&p, seed).map(Generated::Fair).map_err(|e| e.to_string())
        }
    }
}

/// Upper bound on satisfiable platforms: each needs at least its demand in distinct items.
pub fn lb_bound(inst: &LbInstance) -> usize {
    let m = inst.platforms.len();
    match inst.platforms.iter().map(|p| p.demand()).min() {
        Some(d) if d > 0 => m.min(inst.item_count / d),
        _ => m,
    }
}

pub fn fair_bound(inst: &FairInstance) -> usize {
    inst.item_count.min(inst.platforms.iter().map(|p| p.ub).sum())
}

fn run_lb(inst: &LbInstance, strategy: SweepStrategy, seed: u64) -> Result<usize, String> {
    let variant = match strategy {
        SweepStrategy::Base => LbVariant::Base,
        SweepStrategy::MinDegree => LbVariant::MinDegree,
        _ => LbVariant::Augmenting,
    };
    solve_lb(inst, &canonical_order(inst.platforms.len()), &LbStrategy::new(variant, seed))
        .map(|s| s.satisfied.len())
        .map_err(|e| e.to_string())
}

fn run_fair(inst: &FairInstance, strategy: SweepStrategy) -> Result<usize, String> {
    let order = canonical_order(inst.platforms.len());
    match strategy {
        SweepStrategy::Naive => solve_fair_naive(inst, &order).map(|s| s.report.strict.matched_to_satisfied),
        SweepStrategy::Block => solve_fair(inst, &order).map(|s| s.report.relaxed.matched_to_satisfied),
        _ => solve_fair(inst, &order).map(|s| s.report.multiplicative.matched_to_satisfied),
    }
    .map_err(|e| e.to_string())
}

/// Median wall time of three runs, in milliseconds.
fn timed<F: FnMut() -> Result<usize, String>>(timing: bool, mut f: F) -> (Result<usize, String>, u64) {
    if !timing {
        return (f(), 0);
    }
    let mut times = Vec::with_capacity(3);
    let mut result = Err(String::new());
    for _ in 0..3 {
        let start = Instant::now();
        result = f();
        times.push(start.elapsed().as_millis() as u64);
    }
    times.sort_unstable();
    (result, times[1])
}

fn rows_for(cfg: &SweepConfig, degree: usize, seed: u64) -> Vec<Row> {
    let error_row = |strategy, msg: String| Row {
        degree,
        seed,
        strategy,
        value: None,
        opt_or_bound: None,
        is_bound: false,
        ratio: None,
        millis: 0,
        error: Some(msg),
    };
    let inst = match generate(cfg.preset, degree, seed) {
        Ok(i) => i,
        Err(e) => return cfg.strategies.iter().map(|&s| error_row(s, e.clone())).collect(),
    };
    let exact = cfg.oracle.and_then(|l| match &inst {
        Generated::Lb(i) => exact_lb(i, &l).ok().map(|w| w.value),
        Generated::Fair(i) => exact_fair(i, &l).ok().map(|w| w.value),
    });
    let (reference, is_bound) = match (exact, &inst) {
        (Some(v), _) => (v, false),
        (None, Generated::Lb(i)) => (lb_bound(i), true),
        (None, Generated::Fair(i)) => (fair_bound(i), true),
    };
    cfg.strategies
        .iter()
        .map(|&strategy| {
            let (result, millis) = match (&inst, strategy.is_lb()) {
                (Generated::Lb(i), true) => timed(cfg.timing, || run_lb(i, strategy, seed)),
                (Generated::Fair(i), false) => timed(cfg.timing, || run_fair(i, strategy)),
                _ => (Err(format!("strategy {} does not apply to this problem", strategy.name())), 0),
            };
            match result {
                Ok(value) => Row {
                    degree,
                    seed,
                    strategy,
                    value: Some(value),
                    opt_or_bound: Some(reference),
                    is_bound,
                    ratio: Some(if reference == 0 { 1.0 } else { value as f64 / reference as f64 }),
                    millis,
                    error: None,
                },
                Err(e) => error_row(strategy, e),
            }
        })
        .collect()
}

/// Runs every `(degree, seed)` job on a worker pool and returns the rows
/// sorted by `(degree, seed, strategy)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Row>, CliError> {
    let jobs: Vec<(usize, u64)> = cfg.degrees.iter().flat_map(|&d| cfg.seeds.iter().map(move |&s| (d, s))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Failed(e.to_string()))?;
    let mut rows: Vec<Row> =
        pool.install(|| jobs.par_iter().flat_map_iter(|&(d, s)| rows_for(cfg, d, s)).collect());
    rows.sort_by_key(|r| (r.degree, r.seed, r.strategy));
    Ok(rows)
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
        w.write_record([
            r.degree.to_string(),
            r.seed.to_string(),
            r.strategy.name().to_string(),
            r.value.map_or_else(|| "error".to_string(), |v| v.to_string()),
            opt(r.opt_or_bound),
            u8::from(r.is_bound).to_string(),
            r.ratio.map_or(String::new(), |x| format!("{x:.6}")),
            r.millis.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn rows_to_json(rows: &[Row]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Mean value per degree for one strategy, skipping failed rows.
pub fn mean_by_degree(rows: &[Row], strategy: SweepStrategy) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    let mut degrees: Vec<usize> = rows.iter().map(|r| r.degree).collect();
    degrees.dedup();
    for d in degrees {
        let vals: Vec<usize> =
            rows.iter().filter(|r| r.degree == d && r.strategy == strategy).filter_map(|r| r.value).collect();
        if !vals.is_empty() {
            out.push((d, vals.iter().sum::<usize>() as f64 / vals.len() as f64));
        }
    }
    out
}
