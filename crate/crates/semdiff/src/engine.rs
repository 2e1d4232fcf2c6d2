//! Commit drivers: load two source snapshots from disk, run one of the
//! matching engines over them, and package the result as per-file mapping
//! documents in the benchmark schema, ready for serialization or scoring.
//!
//! The refactoring-aware engine runs the four declaration-matching phases,
//! refactoring detection, and the composer. The baseline engines pair files
//! by path and run a per-file tree matcher; the staged variant additionally
//! matches leftover subtrees across file boundaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use walkdir::WalkDir;

use crate::bench::{
    changed_elements, compute_churn, compute_metrics, format_info, metrics_over_sets,
    BenchmarkMetadata, ChallengeLevel, Granularity, GroundTruthFile, GtEntry, GtGroup,
    MetricsReport,
};
use crate::compose::{compose, group_store, node_ref, ComposedRefactoring, FileGroup};
use crate::decl::{DeclMatcher, Loc, SourceFile};
use crate::gumtree::{match_trees, staged_tree_match, MatcherConfig};
use crate::java::parse_java;
use crate::refactor::detect_operations;
use crate::tree::{locate, pretty, AstTree, IsoMode, MappingStore, NodeRef};

// ---------------------------------------------------------------------------
// Engine selection
// ---------------------------------------------------------------------------

/// The available matching engines. `Semdiff` is the refactoring-aware
/// commit pipeline; the rest are per-file tree matchers used as baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Engine {
    /// Declaration matching + refactoring detection + composition.
    Semdiff,
    /// Two-stage matcher with greedy leaf recovery.
    Greedy,
    /// Two-stage matcher, containers only.
    Simple,
    /// Greedy with fine-grained (parent-fused) leaf labels.
    GreedyFg,
    /// Simple with fine-grained leaf labels.
    SimpleFg,
    /// Simple per file, then a staged cross-file pass over leftovers.
    SimpleStm,
}

impl Engine {
    pub const ALL: [Engine; 6] = [
        Engine::Semdiff,
        Engine::Greedy,
        Engine::Simple,
        Engine::GreedyFg,
        Engine::SimpleFg,
        Engine::SimpleStm,
    ];

    pub fn is_baseline(self) -> bool {
        self != Engine::Semdiff
    }

    /// Per-file matcher configuration for a baseline engine, with an
    /// optional minimum-height override. The refactoring-aware engine fixes
    /// its own matcher parameters and ignores both.
    pub fn matcher_config(self, min_height: Option<usize>) -> MatcherConfig {
        let mut cfg = match self {
            Engine::Semdiff => MatcherConfig::sub_statement(),
            Engine::Greedy => MatcherConfig::greedy(),
            Engine::Simple | Engine::SimpleStm => MatcherConfig::simple(),
            Engine::GreedyFg => MatcherConfig::greedy().with_fine_grained(),
            Engine::SimpleFg => MatcherConfig::simple().with_fine_grained(),
        };
        if self.is_baseline() {
            if let Some(h) = min_height {
                cfg.min_height = h;
            }
        }
        cfg
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Engine::Semdiff => "semdiff",
            Engine::Greedy => "greedy",
            Engine::Simple => "simple",
            Engine::GreedyFg => "greedy-fg",
            Engine::SimpleFg => "simple-fg",
            Engine::SimpleStm => "simple-stm",
        };
        f.write_str(s)
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.to_string() == s)
            .ok_or_else(|| {
                format!("unknown engine {s:?} (expected semdiff | greedy | simple | greedy-fg | simple-fg | simple-stm)")
            })
    }
}

// ---------------------------------------------------------------------------
// Snapshot loading
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {diagnostic}")]
    Parse { path: String, diagnostic: String },
}

/// One side of a commit: parsed files plus their raw texts (kept for churn
/// metadata and source-anchored reports). Files sort by path.
#[derive(Debug, Default)]
pub struct CommitSource {
    pub files: Vec<SourceFile>,
    /// Source text of each file, parallel to `files`.
    pub texts: Vec<String>,
    /// Files skipped in lenient mode: `(path, diagnostic)`.
    pub skipped: Vec<(String, String)>,
}

impl CommitSource {
    /// Parses in-memory `(path, text)` pairs; handy for tests and examples.
    pub fn from_sources(sources: &[(&str, &str)]) -> Result<Self, EngineError> {
        let mut out = CommitSource::default();
        let mut sorted: Vec<_> = sources.to_vec();
        sorted.sort_by_key(|(p, _)| p.to_string());
        for (path, text) in sorted {
            out.push_parsed(path.to_string(), text.to_string(), false)?;
        }
        Ok(out)
    }

    fn push_parsed(&mut self, path: String, text: String, lenient: bool) -> Result<(), EngineError> {
        match parse_java(&text) {
            Ok(unit) => {
                self.files.push(SourceFile { path, tree: unit.tree });
                self.texts.push(text);
                Ok(())
            }
            Err(d) if lenient => {
                self.skipped.push((path, d.to_string()));
                Ok(())
            }
            Err(d) => Err(EngineError::Parse { path, diagnostic: d.to_string() }),
        }
    }

    pub fn text_of(&self, path: &str) -> Option<&str> {
        let i = self.files.iter().position(|f| f.path == path)?;
        Some(&self.texts[i])
    }

    pub fn tree_of(&self, path: &str) -> Option<&AstTree> {
        self.files.iter().find(|f| f.path == path).map(|f| &f.tree)
    }
}

/// Loads one snapshot. `root` may be a single `.java` file or a directory
/// searched recursively; paths are stored relative to the directory root
/// with `/` separators. In lenient mode parse failures land in
/// [`CommitSource::skipped`] instead of failing the load.
pub fn load_commit_source(root: &Path, lenient: bool) -> Result<CommitSource, EngineError> {
    let read = |p: &Path| -> Result<String, EngineError> {
        fs::read_to_string(p).map_err(|e| EngineError::Io {
            path: p.display().to_string(),
            source: e,
        })
    };
    let mut out = CommitSource::default();
    if root.is_file() {
        let text = read(root)?;
        let name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| root.display().to_string());
        out.push_parsed(name, text, lenient)?;
        return Ok(out);
    }
    let mut paths = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| EngineError::Io {
            path: root.display().to_string(),
            source: e.into(),
        })?;
        if entry.file_type().is_file()
            && entry.path().extension().is_some_and(|x| x == "java")
        {
            let rel = entry
                .path()
                .strip_prefix(root)
                .unwrap_or(entry.path())
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            paths.push((rel, entry.path().to_path_buf()));
        }
    }
    paths.sort();
    for (rel, abs) in paths {
        let text = read(&abs)?;
        out.push_parsed(rel, text, lenient)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Running a commit
// ---------------------------------------------------------------------------

/// The commit-level result of one engine run: the full mapping store and
/// its per-file partition. Baselines leave `refactorings` empty.
pub struct CommitDiff {
    pub engine: Engine,
    pub store: MappingStore,
    pub intra_file: Vec<FileGroup>,
    pub inter_file: Vec<FileGroup>,
    pub refactorings: Vec<ComposedRefactoring>,
}

/// Runs one engine over a commit. Baseline engines honor `cfg`; the
/// refactoring-aware engine fixes its own matcher parameters.
pub fn run_commit(
    left: &CommitSource,
    right: &CommitSource,
    engine: Engine,
    cfg: &MatcherConfig,
) -> CommitDiff {
    if engine == Engine::Semdiff {
        let mut m = DeclMatcher::new(&left.files, &right.files);
        m.phase1_identical();
        m.phase2_changed_signatures();
        m.phase3_types();
        m.phase4_moved_members();
        let operations = detect_operations(&mut m);
        let diff = compose(&m, &operations);
        return CommitDiff {
            engine,
            store: diff.store,
            intra_file: diff.intra_file,
            inter_file: diff.inter_file,
            refactorings: diff.refactorings,
        };
    }

    let mut store = MappingStore::new();
    let mut per_file = Vec::new();
    for (li, lf) in left.files.iter().enumerate() {
        let Some(ri) = right.files.iter().position(|rf| rf.path == lf.path) else {
            continue;
        };
        let m = match_trees(&lf.tree, &right.files[ri].tree, cfg);
        for (l, r) in m.iter() {
            store.add(
                node_ref(&left.files, Loc { file: li, node: *l }),
                node_ref(&right.files, Loc { file: ri, node: *r }),
            );
        }
        per_file.push((li, ri, m));
    }
    if engine == Engine::SimpleStm {
        let lrefs: Vec<(&str, &AstTree)> =
            left.files.iter().map(|f| (f.path.as_str(), &f.tree)).collect();
        let rrefs: Vec<(&str, &AstTree)> =
            right.files.iter().map(|f| (f.path.as_str(), &f.tree)).collect();
        for ((lf, ln), (rf, rn)) in staged_tree_match(&lrefs, &rrefs, &per_file, cfg) {
            store.add(
                node_ref(&left.files, Loc { file: lf, node: ln }),
                node_ref(&right.files, Loc { file: rf, node: rn }),
            );
        }
    }
    let (intra_file, inter_file) = group_store(&store);
    CommitDiff {
        engine,
        store,
        intra_file,
        inter_file,
        refactorings: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Mapping documents
// ---------------------------------------------------------------------------

/// Character budget for the advisory `left`/`right` strings of an entry;
/// identity lives in the `info` string, so long renderings are elided.
const SNIPPET_BUDGET: usize = 120;

fn snippet(files: &[SourceFile], r: &NodeRef) -> String {
    let Some(f) = files.iter().find(|f| f.path == r.file) else {
        return String::new();
    };
    let Ok(n) = locate(&f.tree, &r.label, r.span) else {
        return String::new();
    };
    let text = pretty(&f.tree, n);
    let mut flat = String::with_capacity(text.len().min(SNIPPET_BUDGET + 1));
    for part in text.split_whitespace() {
        if !flat.is_empty() {
            flat.push(' ');
        }
        if flat.len() + part.len() > SNIPPET_BUDGET {
            flat.push('\u{2026}');
            break;
        }
        flat.push_str(part);
    }
    flat
}

fn entries(
    pairs: &[(NodeRef, NodeRef)],
    left: &CommitSource,
    right: &CommitSource,
) -> Vec<GtEntry> {
    pairs
        .iter()
        .map(|(l, r)| GtEntry {
            left: snippet(&left.files, l),
            right: snippet(&right.files, r),
            info: format_info(l, r),
        })
        .collect()
}

fn has_multi(sections: &[&[(NodeRef, NodeRef)]]) -> bool {
    let mut lefts = BTreeMap::new();
    let mut rights = BTreeMap::new();
    for pairs in sections {
        for (l, r) in *pairs {
            *lefts.entry(l.clone()).or_insert(0usize) += 1;
            *rights.entry(r.clone()).or_insert(0usize) += 1;
        }
    }
    lefts.values().chain(rights.values()).any(|&c| c > 1)
}

/// Mechanical challenge grading from churn: most of the file stable → low,
/// a third or more rewritten → high.
fn challenge_from_churn(left: f64, right: f64) -> ChallengeLevel {
    let worst = left.max(right);
    if worst < 0.10 {
        ChallengeLevel::Low
    } else if worst < 0.34 {
        ChallengeLevel::Medium
    } else {
        ChallengeLevel::High
    }
}

/// Renders a commit diff as per-file mapping documents in the benchmark
/// schema: one document per origin file, inter-file groups attached to the
/// document of their origin (created if the file has no same-path
/// counterpart). With `changed_only`, documents of value-isomorphic file
/// pairs without inter-file traffic are omitted. Metadata (multi-mapping
/// flag, churn, mechanically graded challenge level) is filled in from the
/// diff and the source texts.
pub fn mapping_documents(
    diff: &CommitDiff,
    left: &CommitSource,
    right: &CommitSource,
    changed_only: bool,
) -> Vec<GroundTruthFile> {
    let mut docs: BTreeMap<String, GroundTruthFile> = BTreeMap::new();
    let blank = |file: &str| GroundTruthFile {
        file: file.to_string(),
        matched_elements: Vec::new(),
        mappings: Vec::new(),
        inter_file: Vec::new(),
        metadata: None,
    };
    for g in &diff.intra_file {
        let doc = docs.entry(g.origin.clone()).or_insert_with(|| blank(&g.origin));
        doc.matched_elements = entries(&g.matched_elements, left, right);
        doc.mappings = entries(&g.mappings, left, right);
    }
    for g in &diff.inter_file {
        let doc = docs.entry(g.origin.clone()).or_insert_with(|| blank(&g.origin));
        doc.inter_file.push(GtGroup {
            origin: g.origin.clone(),
            destination: g.destination.clone(),
            matched_elements: entries(&g.matched_elements, left, right),
            mappings: entries(&g.mappings, left, right),
        });
    }

    let mut out = Vec::new();
    for (path, mut doc) in docs {
        if changed_only && doc.inter_file.is_empty() {
            let unchanged = match (left.tree_of(&path), right.tree_of(&path)) {
                (Some(lt), Some(rt)) => {
                    AstTree::isomorphic(lt, lt.root(), rt, rt.root(), IsoMode::Value)
                }
                _ => false,
            };
            if unchanged {
                continue;
            }
        }
        let ltext = left.text_of(&path).unwrap_or("");
        let rtext = right.text_of(&path).unwrap_or("");
        let (left_churn, right_churn) = compute_churn(ltext, rtext);
        let multi = {
            let group = diff
                .intra_file
                .iter()
                .find(|g| g.origin == path)
                .map(|g| (&g.matched_elements[..], &g.mappings[..]));
            let mut sections: Vec<&[(NodeRef, NodeRef)]> = Vec::new();
            if let Some((a, b)) = group {
                sections.push(a);
                sections.push(b);
            }
            for g in diff.inter_file.iter().filter(|g| g.origin == path) {
                sections.push(&g.matched_elements);
                sections.push(&g.mappings);
            }
            has_multi(&sections)
        };
        doc.metadata = Some(BenchmarkMetadata {
            multi_mappings: multi,
            left_churn,
            right_churn,
            challenge_level: challenge_from_churn(left_churn, right_churn),
            comments: String::new(),
        });
        out.push(doc);
    }
    out
}

// ---------------------------------------------------------------------------
// Scoring a commit
// ---------------------------------------------------------------------------

/// Accuracy of one engine run against a commit's ground-truth documents.
pub struct CommitEval {
    /// One report per ground-truth document, keyed by origin file, scored
    /// over the tool pairs whose left endpoint lives in that file.
    pub per_file: Vec<(String, MetricsReport)>,
    /// Commit-level report over the union of all documents.
    pub aggregate: MetricsReport,
    /// Tool pairs whose origin file has no ground-truth document; they
    /// count as false positives in the aggregate.
    pub unattributed: usize,
}

/// Scores a tool store against ground truth. Element pairs blessed by the
/// ground truth whose subtrees did not change shield their interiors from
/// both sets before counting.
pub fn evaluate_commit(
    s_t: &MappingStore,
    gts: &[GroundTruthFile],
    left: &[SourceFile],
    right: &[SourceFile],
    granularity: Granularity,
) -> CommitEval {
    let mut blessed_elements = BTreeSet::new();
    let mut blessed_all = BTreeSet::new();
    for gt in gts {
        blessed_elements.extend(crate::bench::element_pairs(gt));
        blessed_all.extend(crate::bench::all_pairs(gt));
    }
    let changed = changed_elements(&blessed_elements, left, right);
    let unchanged: Vec<(NodeRef, NodeRef)> = blessed_elements
        .iter()
        .filter(|p| !changed.contains(p))
        .cloned()
        .collect();

    let tool: BTreeSet<(NodeRef, NodeRef)> = s_t.iter().cloned().collect();
    let aggregate = metrics_over_sets(&tool, &blessed_all, &unchanged, granularity);

    let covered: BTreeSet<&str> = gts.iter().map(|g| g.file.as_str()).collect();
    let unattributed = tool
        .iter()
        .filter(|(l, _)| !covered.contains(l.file.as_str()))
        .count();

    let per_file = gts
        .iter()
        .map(|gt| {
            let subset: MappingStore = tool
                .iter()
                .filter(|(l, _)| l.file == gt.file)
                .cloned()
                .collect();
            (gt.file.clone(), compute_metrics(&subset, gt, &changed, granularity))
        })
        .collect();

    CommitEval {
        per_file,
        aggregate,
        unattributed,
    }
}
