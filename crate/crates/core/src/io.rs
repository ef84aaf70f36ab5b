//! JSON instance and solution documents, optionally gzip-compressed.
//!
//! Every document carries `"problem": "lb" | "fair" | "tree"`; ids are array
//! indices and unknown fields are rejected. Paths ending in `.gz` are read and
//! written through gzip with a zero timestamp, so output bytes depend only on
//! content.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{
    Assignment, FairGroup, FairInstance, FairPlatform, LbGroup, LbInstance, LbPlatform, NodeId, NodeSpec,
    PlatformId, TreeInstance, TreeSolution,
};
use crate::ratio::Ratio;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Malformed(serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(serde_json::Error),
    #[error("expected a {expected} document, found {found}")]
    WrongProblem { expected: &'static str, found: &'static str },
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => IoError::Schema(e),
            Category::Syntax | Category::Eof | Category::Io => IoError::Malformed(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LbGroupDoc {
    members: Vec<usize>,
    lb: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LbPlatformDoc {
    neighbors: Vec<usize>,
    lb: usize,
    #[serde(default)]
    groups: Vec<LbGroupDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LbDoc {
    items: usize,
    platforms: Vec<LbPlatformDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FairGroupDoc {
    members: Vec<usize>,
    alpha: Ratio,
    beta: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FairPlatformDoc {
    neighbors: Vec<usize>,
    lb: usize,
    ub: usize,
    groups: Vec<FairGroupDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairDoc {
    items: usize,
    platforms: Vec<FairPlatformDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeNodeDoc {
    parent: Option<usize>,
    l: Vec<usize>,
    lb: usize,
    reward: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    k: usize,
    budget: Vec<usize>,
    total: usize,
    nodes: Vec<TreeNodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
enum InstanceDoc {
    Lb(LbDoc),
    Fair(FairDoc),
    Tree(TreeDoc),
}

/// Any of the three instance kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Lb(LbInstance),
    Fair(FairInstance),
    Tree(TreeInstance),
}

impl Instance {
    pub fn problem(&self) -> &'static str {
        match self {
            Instance::Lb(_) => "lb",
            Instance::Fair(_) => "fair",
            Instance::Tree(_) => "tree",
        }
    }

    /// Validation findings of the wrapped instance.
    pub fn validate(&self) -> Vec<crate::model::Violation> {
        match self {
            Instance::Lb(i) => i.validate(),
            Instance::Fair(i) => i.validate(),
            Instance::Tree(i) => i.validate(),
        }
    }
}

impl From<&LbInstance> for LbDoc {
    fn from(inst: &LbInstance) -> Self {
        LbDoc {
            items: inst.item_count,
            platforms: inst
                .platforms
                .iter()
                .map(|p| LbPlatformDoc {
                    neighbors: p.neighbors.clone(),
                    lb: p.lb,
                    groups: p.groups.iter().map(|g| LbGroupDoc { members: g.members.clone(), lb: g.lb }).collect(),
                })
                .collect(),
        }
    }
}

impl From<LbDoc> for LbInstance {
    fn from(doc: LbDoc) -> Self {
        LbInstance {
            item_count: doc.items,
            platforms: doc
                .platforms
                .into_iter()
                .map(|p| {
                    let groups = p.groups.into_iter().map(|g| LbGroup::new(g.members, g.lb)).collect();
                    LbPlatform::new(p.neighbors, p.lb, groups)
                })
                .collect(),
        }
    }
}

impl From<&FairInstance> for FairDoc {
    fn from(inst: &FairInstance) -> Self {
        FairDoc {
            items: inst.item_count,
            platforms: inst
                .platforms
                .iter()
                .map(|p| FairPlatformDoc {
                    neighbors: p.neighbors.clone(),
                    lb: p.lb,
                    ub: p.ub,
                    groups: p
                        .groups
                        .iter()
                        .map(|g| FairGroupDoc { members: g.members.clone(), alpha: g.alpha, beta: g.beta })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl From<FairDoc> for FairInstance {
    fn from(doc: FairDoc) -> Self {
        FairInstance {
            item_count: doc.items,
            platforms: doc
                .platforms
                .into_iter()
                .map(|p| {
                    let groups = p.groups.into_iter().map(|g| FairGroup::new(g.members, g.alpha, g.beta)).collect();
                    FairPlatform::new(p.neighbors, p.lb, p.ub, groups)
                })
                .collect(),
        }
    }
}

impl From<&TreeInstance> for TreeDoc {
    fn from(inst: &TreeInstance) -> Self {
        TreeDoc {
            k: inst.k,
            budget: inst.budget.clone(),
            total: inst.total,
            nodes: inst
                .nodes
                .iter()
                .map(|v| TreeNodeDoc { parent: v.parent, l: v.group_lb.clone(), lb: v.lb, reward: v.reward })
                .collect(),
        }
    }
}

impl From<TreeDoc> for TreeInstance {
    fn from(doc: TreeDoc) -> Self {
        let specs = doc
            .nodes
            .into_iter()
            .map(|v| NodeSpec { parent: v.parent, group_lb: v.l, lb: v.lb, reward: v.reward })
            .collect();
        TreeInstance::from_parents(doc.k, doc.budget, doc.total, specs)
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        match inst {
            Instance::Lb(i) => InstanceDoc::Lb(i.into()),
            Instance::Fair(i) => InstanceDoc::Fair(i.into()),
            Instance::Tree(i) => InstanceDoc::Tree(i.into()),
        }
    }
}

impl From<InstanceDoc> for Instance {
    fn from(doc: InstanceDoc) -> Self {
        match doc {
            InstanceDoc::Lb(d) => Instance::Lb(d.into()),
            InstanceDoc::Fair(d) => Instance::Fair(d.into()),
            InstanceDoc::Tree(d) => Instance::Tree(d.into()),
        }
    }
}

/// Internally tagged enums buffer their content, which hides the
/// `deny_unknown_fields` error category behind a generic one; the tag is read
/// first and the body parsed directly into its struct instead.
fn parse_tagged<T, F>(text: &str, dispatch: F) -> Result<T, IoError>
where
    F: FnOnce(&str, serde_json::Value) -> Result<T, serde_json::Error>,
{
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let tag = match value.as_object_mut().and_then(|o| o.remove("problem")) {
        Some(serde_json::Value::String(s)) => s,
        _ => return Err(IoError::Schema(serde::de::Error::missing_field("problem"))),
    };
    Ok(dispatch(&tag, value)?)
}

fn unknown_problem(tag: &str) -> serde_json::Error {
    serde::de::Error::unknown_variant(tag, &["lb", "fair", "tree"])
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    parse_tagged(text, |tag, body| {
        Ok(match tag {
            "lb" => Instance::Lb(serde_json::from_value::<LbDoc>(body)?.into()),
            "fair" => Instance::Fair(serde_json::from_value::<FairDoc>(body)?.into()),
            "tree" => Instance::Tree(serde_json::from_value::<TreeDoc>(body)?.into()),
            other => return Err(unknown_problem(other)),
        })
    })
}

pub fn instance_to_string(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDoc::from(inst)).expect("instance serializes");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String, IoError> {
    let wrap = |source| IoError::File { path: path.to_path_buf(), source };
    let file = File::open(path).map_err(wrap)?;
    let mut text = String::new();
    if is_gz(path) {
        flate2::read::GzDecoder::new(BufReader::new(file)).read_to_string(&mut text).map_err(wrap)?;
    } else {
        BufReader::new(file).read_to_string(&mut text).map_err(wrap)?;
    }
    Ok(text)
}

/// Writes `text`, gzip-compressed when the path ends in `.gz`.
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let wrap = |source| IoError::File { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(wrap)?;
    if is_gz(path) {
        let mut enc = flate2::GzBuilder::new().mtime(0).write(BufWriter::new(file), flate2::Compression::default());
        enc.write_all(text.as_bytes()).map_err(wrap)?;
        enc.finish().map_err(wrap)?.flush().map_err(wrap)
    } else {
        let mut w = BufWriter::new(file);
        w.write_all(text.as_bytes()).map_err(wrap)?;
        w.flush().map_err(wrap)
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read_text(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), IoError> {
    write_text(path, &instance_to_string(inst))
}

/// Item counts of one fairness reading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairScoreDoc {
    pub satisfied: Vec<PlatformId>,
    pub matched_to_satisfied: usize,
}

impl From<&crate::model::FairScore> for FairScoreDoc {
    fn from(s: &crate::model::FairScore) -> Self {
        FairScoreDoc { satisfied: s.satisfied.iter().copied().collect(), matched_to_satisfied: s.matched_to_satisfied }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LbSolutionDoc {
    pub strategy: String,
    pub seed: u64,
    /// Platform of each item, `null` when unmatched.
    pub assignment: Vec<Option<PlatformId>>,
    pub satisfied: Vec<PlatformId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairSolutionDoc {
    pub algorithm: String,
    pub assignment: Vec<Option<PlatformId>>,
    pub blocks: Vec<usize>,
    pub strict: FairScoreDoc,
    pub relaxed: FairScoreDoc,
    pub multiplicative: FairScoreDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationDoc {
    pub node: NodeId,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSolutionDoc {
    pub satisfied_nodes: Vec<NodeId>,
    pub allocation: Vec<AllocationDoc>,
    pub total_reward: u64,
    pub synthetic_root_only: bool,
}

impl From<&TreeSolution> for TreeSolutionDoc {
    fn from(s: &TreeSolution) -> Self {
        TreeSolutionDoc {
            satisfied_nodes: s.satisfied_nodes.clone(),
            allocation: s.allocation.iter().map(|(&node, c)| AllocationDoc { node, counts: c.clone() }).collect(),
            total_reward: s.total_reward,
            synthetic_root_only: s.synthetic_root_only,
        }
    }
}

impl From<TreeSolutionDoc> for TreeSolution {
    fn from(d: TreeSolutionDoc) -> Self {
        TreeSolution {
            satisfied_nodes: d.satisfied_nodes,
            allocation: d.allocation.into_iter().map(|a| (a.node, a.counts)).collect::<BTreeMap<_, _>>(),
            total_reward: d.total_reward,
            synthetic_root_only: d.synthetic_root_only,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum SolutionDoc {
    Lb(LbSolutionDoc),
    Fair(FairSolutionDoc),
    Tree(TreeSolutionDoc),
}

impl SolutionDoc {
    pub fn problem(&self) -> &'static str {
        match self {
            SolutionDoc::Lb(_) => "lb",
            SolutionDoc::Fair(_) => "fair",
            SolutionDoc::Tree(_) => "tree",
        }
    }
}

pub fn assignment_from_doc(items: &[Option<PlatformId>]) -> Assignment {
    Assignment { item_to_platform: items.to_vec() }
}

pub fn solution_to_string(sol: &SolutionDoc) -> String {
    let mut s = serde_json::to_string_pretty(sol).expect("solution serializes");
    s.push('\n');
    s
}

pub fn parse_solution(text: &str) -> Result<SolutionDoc, IoError> {
    parse_tagged(text, |tag, body| {
        Ok(match tag {
            "lb" => SolutionDoc::Lb(serde_json::from_value(body)?),
            "fair" => SolutionDoc::Fair(serde_json::from_value(body)?),
            "tree" => SolutionDoc::Tree(serde_json::from_value(body)?),
            other => return Err(unknown_problem(other)),
        })
    })
}

pub fn read_solution(path: &Path) -> Result<SolutionDoc, IoError> {
    parse_solution(&read_text(path)?)
}

pub fn write_solution(path: &Path, sol: &SolutionDoc) -> Result<(), IoError> {
    write_text(path, &solution_to_string(sol))
}
