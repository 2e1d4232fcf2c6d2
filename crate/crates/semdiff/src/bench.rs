//! Ground-truth mapping files, accuracy metrics, the semantic-compatibility
//! audit, line churn, and a timing harness.
//!
//! A ground-truth file records the blessed node mappings of one compilation
//! unit: matched program elements and statement/expression mappings within
//! the file, plus optional groups of mappings moving to or from other
//! files. Each entry carries human-readable `left`/`right` strings and a
//! machine-readable `info` string in the bit-exact form
//! `LeftASTType[Start-End]:RightASTType[Start-End]` which is the
//! identity-bearing part: set comparisons run over (file, label, span)
//! addresses, the strings are advisory.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decl::SourceFile;
use crate::taxonomy as tax;
use crate::tree::{flags, locate, AstTree, IsoMode, MappingStore, NodeId, NodeRef, Span};

// ---------------------------------------------------------------------------
// Ground-truth model
// ---------------------------------------------------------------------------

/// One blessed mapping: advisory strings plus the identity-bearing `info`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtEntry {
    pub left: String,
    pub right: String,
    pub info: String,
}

/// Mappings between this file and one other file (code moved from `origin`
/// to `destination`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GtGroup {
    pub origin: String,
    pub destination: String,
    #[serde(default)]
    pub matched_elements: Vec<GtEntry>,
    #[serde(default)]
    pub mappings: Vec<GtEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChallengeLevel {
    Low,
    Medium,
    High,
}

/// Commit-overview metadata attached to ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BenchmarkMetadata {
    /// Whether the diff contains one-to-many, many-to-one, or many-to-many
    /// node mappings.
    pub multi_mappings: bool,
    /// (removed + modified) / total lines on the left side; in [0, 1].
    pub left_churn: f64,
    /// (added + modified) / total lines on the right side; in [0, 1].
    pub right_churn: f64,
    pub challenge_level: ChallengeLevel,
    pub comments: String,
}

/// The blessed mappings of one compilation unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GroundTruthFile {
    /// Path of the compilation unit on both sides of the diff.
    pub file: String,
    /// Matched program element declarations (types, methods, fields, ...).
    pub matched_elements: Vec<GtEntry>,
    /// Matched statements and expressions.
    pub mappings: Vec<GtEntry>,
    /// Mappings moving between this file and others, grouped per file pair.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inter_file: Vec<GtGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BenchmarkMetadata>,
}

#[derive(Debug, thiserror::Error)]
pub enum GtError {
    #[error("ground-truth JSON: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("malformed info string at {section}[{index}]: {info:?}")]
    MalformedInfo {
        section: String,
        index: usize,
        info: String,
    },
    #[error("churn {0} outside [0, 1]")]
    ChurnRange(f64),
    #[error("unresolvable entry at {section}[{index}]: {reason}")]
    Unresolvable {
        section: String,
        index: usize,
        reason: String,
    },
}

/// Parses one `Label[start-end]` unit, returning the rest of the input.
fn parse_info_side(s: &str) -> Option<(&str, Span, &str)> {
    let lb = s.find('[')?;
    let label = &s[..lb];
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric()) {
        return None;
    }
    let rb = lb + s[lb..].find(']')?;
    let (a, b) = s[lb + 1..rb].split_once('-')?;
    if a.is_empty() || b.is_empty() || !a.bytes().all(|c| c.is_ascii_digit()) || !b.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let start: usize = a.parse().ok()?;
    let end: usize = b.parse().ok()?;
    if start > end {
        return None;
    }
    Some((label, Span::new(start, end), &s[rb + 1..]))
}

/// Parses `LeftASTType[Start-End]:RightASTType[Start-End]`.
pub fn parse_info(info: &str) -> Option<((String, Span), (String, Span))> {
    let (llabel, lspan, rest) = parse_info_side(info)?;
    let rest = rest.strip_prefix(':')?;
    let (rlabel, rspan, tail) = parse_info_side(rest)?;
    if !tail.is_empty() {
        return None;
    }
    Some(((llabel.to_string(), lspan), (rlabel.to_string(), rspan)))
}

/// Formats the bit-exact `info` string for a mapped pair.
pub fn format_info(left: &NodeRef, right: &NodeRef) -> String {
    format!(
        "{}[{}-{}]:{}[{}-{}]",
        left.label, left.span.start, left.span.end, right.label, right.span.start, right.span.end
    )
}

fn validate(gt: &GroundTruthFile) -> Result<(), GtError> {
    let check = |section: String, entries: &[GtEntry]| -> Result<(), GtError> {
        for (index, e) in entries.iter().enumerate() {
            if parse_info(&e.info).is_none() {
                return Err(GtError::MalformedInfo {
                    section,
                    index,
                    info: e.info.clone(),
                });
            }
        }
        Ok(())
    };
    check("matchedElements".into(), &gt.matched_elements)?;
    check("mappings".into(), &gt.mappings)?;
    for (k, g) in gt.inter_file.iter().enumerate() {
        check(format!("interFile[{k}].matchedElements"), &g.matched_elements)?;
        check(format!("interFile[{k}].mappings"), &g.mappings)?;
    }
    if let Some(meta) = &gt.metadata {
        for churn in [meta.left_churn, meta.right_churn] {
            if !(0.0..=1.0).contains(&churn) || churn.is_nan() {
                return Err(GtError::ChurnRange(churn));
            }
        }
    }
    Ok(())
}

pub fn load_ground_truth(bytes: &[u8]) -> Result<GroundTruthFile, GtError> {
    let gt: GroundTruthFile = serde_json::from_slice(bytes)?;
    validate(&gt)?;
    Ok(gt)
}

/// Canonical serialization: two-space-indented JSON plus a trailing newline.
/// `load_ground_truth(save_ground_truth(gt))` is the identity, and saving a
/// canonically formatted file reproduces its bytes exactly.
pub fn save_ground_truth(gt: &GroundTruthFile) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(gt).expect("ground truth serializes");
    bytes.push(b'\n');
    bytes
}

fn entry_pair(entry: &GtEntry, lfile: &str, rfile: &str) -> (NodeRef, NodeRef) {
    let ((llabel, lspan), (rlabel, rspan)) =
        parse_info(&entry.info).expect("entries of a loaded ground-truth file are well-formed");
    (
        NodeRef::new(lfile, llabel, lspan),
        NodeRef::new(rfile, rlabel, rspan),
    )
}

/// All matched program element pairs: the intra-file section plus every
/// inter-file group.
pub fn element_pairs(gt: &GroundTruthFile) -> BTreeSet<(NodeRef, NodeRef)> {
    let mut out = BTreeSet::new();
    for e in &gt.matched_elements {
        out.insert(entry_pair(e, &gt.file, &gt.file));
    }
    for g in &gt.inter_file {
        for e in &g.matched_elements {
            out.insert(entry_pair(e, &g.origin, &g.destination));
        }
    }
    out
}

/// Every blessed pair of the file: element pairs plus node mappings.
pub fn all_pairs(gt: &GroundTruthFile) -> BTreeSet<(NodeRef, NodeRef)> {
    let mut out = element_pairs(gt);
    for e in &gt.mappings {
        out.insert(entry_pair(e, &gt.file, &gt.file));
    }
    for g in &gt.inter_file {
        for e in &g.mappings {
            out.insert(entry_pair(e, &g.origin, &g.destination));
        }
    }
    out
}

fn tree_of<'a>(files: &'a [SourceFile], path: &str) -> Option<&'a AstTree> {
    files.iter().find(|f| f.path == path).map(|f| &f.tree)
}

fn resolve(files: &[SourceFile], r: &NodeRef) -> Option<(NodeId, usize)> {
    let (i, f) = files.iter().enumerate().find(|(_, f)| f.path == r.file)?;
    locate(&f.tree, &r.label, r.span).ok().map(|n| (n, i))
}

/// Checks that every entry addresses an actual node in the snapshots.
pub fn verify_resolvable(
    gt: &GroundTruthFile,
    left: &[SourceFile],
    right: &[SourceFile],
) -> Result<(), GtError> {
    let check = |section: String, entries: &[GtEntry], lpath: &str, rpath: &str| -> Result<(), GtError> {
        for (index, e) in entries.iter().enumerate() {
            let (l, r) = entry_pair(e, lpath, rpath);
            for (files, nref, side) in [(left, &l, "left"), (right, &r, "right")] {
                if tree_of(files, &nref.file).is_none() {
                    return Err(GtError::Unresolvable {
                        section,
                        index,
                        reason: format!("unknown {side} file {:?}", nref.file),
                    });
                }
                if resolve(files, nref).is_none() {
                    return Err(GtError::Unresolvable {
                        section,
                        index,
                        reason: format!("{side} node {nref} not found"),
                    });
                }
            }
        }
        Ok(())
    };
    check("matchedElements".into(), &gt.matched_elements, &gt.file, &gt.file)?;
    check("mappings".into(), &gt.mappings, &gt.file, &gt.file)?;
    for (k, g) in gt.inter_file.iter().enumerate() {
        check(format!("interFile[{k}].matchedElements"), &g.matched_elements, &g.origin, &g.destination)?;
        check(format!("interFile[{k}].mappings"), &g.mappings, &g.origin, &g.destination)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Which mappings enter the metric sets: statements and declarations only,
/// or every AST node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    Statement,
    Subexpression,
}

/// Counts per audited AST type of semantically incompatible mappings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IncompatibleCounts {
    pub block: usize,
    pub single_variable_declaration: usize,
    pub method_declaration: usize,
    pub modifier: usize,
    #[serde(rename = "type")]
    pub type_: usize,
    pub simple_name: usize,
}

impl IncompatibleCounts {
    pub fn total(&self) -> usize {
        self.block
            + self.single_variable_declaration
            + self.method_declaration
            + self.modifier
            + self.type_
            + self.simple_name
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
    /// True when the filtered tool set equals the filtered blessed set.
    pub perfect_diff: bool,
    pub incompatible: IncompatibleCounts,
    pub granularity: Granularity,
}

impl MetricsReport {
    /// Ratios from raw counts. When a denominator is zero the convention
    /// is: all three counts zero means a perfect empty diff (every ratio
    /// 1), otherwise the undefined ratio is 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, granularity: Granularity) -> MetricsReport {
        let ratio = |num: usize, denom: usize| {
            if denom == 0 {
                if tp + fp + fn_ == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                num as f64 / denom as f64
            }
        };
        MetricsReport {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
            fscore: ratio(2 * tp, 2 * tp + fp + fn_),
            perfect_diff: fp == 0 && fn_ == 0,
            incompatible: IncompatibleCounts::default(),
            granularity,
        }
    }
}

fn covers(outer: &NodeRef, inner: &NodeRef) -> bool {
    outer.file == inner.file && outer.span.start <= inner.span.start && inner.span.end <= outer.span.end
}

fn at_granularity(pair: &(NodeRef, NodeRef), g: Granularity) -> bool {
    match g {
        Granularity::Subexpression => true,
        Granularity::Statement => {
            tax::is_statement(&pair.0.label) || tax::is_declaration(&pair.0.label)
        }
    }
}

/// Drops pairs outside the granularity and pairs nested strictly under an
/// unchanged element pair (the element pair itself survives; everything
/// inside an untouched element is noise for accuracy purposes).
fn filter_pairs(
    set: &BTreeSet<(NodeRef, NodeRef)>,
    unchanged: &[(NodeRef, NodeRef)],
    g: Granularity,
) -> BTreeSet<(NodeRef, NodeRef)> {
    set.iter()
        .filter(|p| at_granularity(p, g))
        .filter(|(l, r)| {
            !unchanged
                .iter()
                .any(|(e1, e2)| covers(e1, l) && covers(e2, r) && !(e1 == l && e2 == r))
        })
        .cloned()
        .collect()
}

/// Precision/recall/F-score of two mapping sets after unchanged-element
/// filtering at the requested granularity. `unchanged` lists element pairs
/// whose subtrees did not change; mappings nested under them are excluded
/// from both sets.
pub fn metrics_over_sets(
    s_t: &BTreeSet<(NodeRef, NodeRef)>,
    s_b: &BTreeSet<(NodeRef, NodeRef)>,
    unchanged: &[(NodeRef, NodeRef)],
    granularity: Granularity,
) -> MetricsReport {
    let tf = filter_pairs(s_t, unchanged, granularity);
    let bf = filter_pairs(s_b, unchanged, granularity);
    let tp = tf.intersection(&bf).count();
    let fp = tf.difference(&bf).count();
    let fn_ = bf.difference(&tf).count();
    let mut report = MetricsReport::from_counts(tp, fp, fn_, granularity);
    report.perfect_diff = tf == bf;
    report
}

/// Scores a tool's mapping store against a ground-truth file.
///
/// `changed` lists the element pairs whose left/right subtrees actually
/// differ; every blessed element pair not in it counts as unchanged and
/// shields its interior from the metric sets on both sides.
pub fn compute_metrics(
    s_t: &MappingStore,
    s_b: &GroundTruthFile,
    changed: &BTreeSet<(NodeRef, NodeRef)>,
    granularity: Granularity,
) -> MetricsReport {
    let unchanged: Vec<(NodeRef, NodeRef)> = element_pairs(s_b)
        .into_iter()
        .filter(|p| !changed.contains(p))
        .collect();
    let t: BTreeSet<(NodeRef, NodeRef)> = s_t.iter().cloned().collect();
    metrics_over_sets(&t, &all_pairs(s_b), &unchanged, granularity)
}

/// Element pairs whose two subtrees are not value-isomorphic between the
/// snapshots. Pairs that do not resolve are kept (treated as changed).
pub fn changed_elements(
    elements: &BTreeSet<(NodeRef, NodeRef)>,
    left: &[SourceFile],
    right: &[SourceFile],
) -> BTreeSet<(NodeRef, NodeRef)> {
    elements
        .iter()
        .filter(|(l, r)| {
            let (Some((ln, li)), Some((rn, ri))) = (resolve(left, l), resolve(right, r)) else {
                return true;
            };
            !AstTree::isomorphic(&left[li].tree, ln, &right[ri].tree, rn, IsoMode::Value)
        })
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------------
// Semantic-compatibility audit
// ---------------------------------------------------------------------------

fn modifier_group(value: &str) -> Option<&'static str> {
    match value {
        "public" | "private" | "protected" => Some("access"),
        "final" | "sealed" | "non-sealed" => Some("seal"),
        _ => None,
    }
}

/// Access modifiers are interchangeable among themselves, as are the
/// sealing modifiers; every other modifier only matches itself.
fn compatible_modifiers(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    matches!((modifier_group(a), modifier_group(b)), (Some(x), Some(y)) if x == y)
}

/// Counts the tool's semantically incompatible mappings over six audited
/// AST types. A pair is incompatible when both nodes carry the audited
/// type, their parents' types differ (a different syntactic context), and
/// the pair is not blessed by `s_b`. Modifiers are judged by semantic
/// group instead of parent context, and method declarations by the
/// constructor/method distinction.
pub fn audit_incompatibility(
    s_t: &MappingStore,
    s_b: &BTreeSet<(NodeRef, NodeRef)>,
    left: &[SourceFile],
    right: &[SourceFile],
) -> IncompatibleCounts {
    let mut counts = IncompatibleCounts::default();
    for (l, r) in s_t.iter() {
        if s_b.contains(&(l.clone(), r.clone())) {
            continue;
        }
        let (Some((ln, li)), Some((rn, ri))) = (resolve(left, l), resolve(right, r)) else {
            continue;
        };
        let (lt, rt) = (&left[li].tree, &right[ri].tree);
        if l.label == tax::MODIFIER && r.label == tax::MODIFIER {
            if !compatible_modifiers(lt.value(ln), rt.value(rn)) {
                counts.modifier += 1;
            }
            continue;
        }
        if l.label == tax::METHOD_DECLARATION && r.label == tax::METHOD_DECLARATION {
            if lt.has_flag(ln, flags::CONSTRUCTOR) != rt.has_flag(rn, flags::CONSTRUCTOR) {
                counts.method_declaration += 1;
            }
            continue;
        }
        let (Some(pl), Some(pr)) = (lt.parent(ln), rt.parent(rn)) else {
            continue;
        };
        if lt.label(pl) == rt.label(pr) {
            continue;
        }
        if l.label == tax::BLOCK && r.label == tax::BLOCK {
            counts.block += 1;
        } else if l.label == tax::SINGLE_VARIABLE_DECLARATION && r.label == tax::SINGLE_VARIABLE_DECLARATION {
            counts.single_variable_declaration += 1;
        } else if tax::is_type_label(&l.label) && tax::is_type_label(&r.label) {
            counts.type_ += 1;
        } else if l.label == tax::SIMPLE_NAME && r.label == tax::SIMPLE_NAME {
            counts.simple_name += 1;
        }
    }
    counts
}

// ---------------------------------------------------------------------------
// Churn
// ---------------------------------------------------------------------------

/// (removed-run, added-run) lengths of each non-common region of a
/// line-level longest-common-subsequence diff.
fn line_diff_runs(l: &[&str], r: &[&str]) -> Vec<(usize, usize)> {
    let (n, m) = (l.len(), r.len());
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if l[i] == r[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut runs = Vec::new();
    let (mut i, mut j) = (0, 0);
    let (mut rem, mut add) = (0usize, 0usize);
    while i < n || j < m {
        if i < n && j < m && l[i] == r[j] {
            if rem + add > 0 {
                runs.push((rem, add));
                (rem, add) = (0, 0);
            }
            i += 1;
            j += 1;
        } else if j < m && (i == n || dp[i][j + 1] >= dp[i + 1][j]) {
            add += 1;
            j += 1;
        } else {
            rem += 1;
            i += 1;
        }
    }
    if rem + add > 0 {
        runs.push((rem, add));
    }
    runs
}

/// Line churn ratios of one file pair: left churn is
/// (removed + modified) / left total lines, right churn is
/// (added + modified) / right total lines. A removed line paired with an
/// added line in the same diff region counts as modified.
pub fn compute_churn(left_text: &str, right_text: &str) -> (f64, f64) {
    let l: Vec<&str> = left_text.lines().collect();
    let r: Vec<&str> = right_text.lines().collect();
    let (mut removed, mut added, mut modified) = (0usize, 0usize, 0usize);
    for (a, b) in line_diff_runs(&l, &r) {
        let paired = a.min(b);
        modified += paired;
        removed += a - paired;
        added += b - paired;
    }
    let ratio = |num: usize, total: usize| if total == 0 { 0.0 } else { num as f64 / total as f64 };
    (
        ratio(removed + modified, l.len()),
        ratio(added + modified, r.len()),
    )
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

/// Nanoseconds of one run of `run` on the monotonic clock, after `warmup`
/// unmeasured runs.
pub fn time_diff<F: FnMut()>(mut run: F, warmup: usize) -> u64 {
    for _ in 0..warmup {
        run();
    }
    let start = Instant::now();
    run();
    start.elapsed().as_nanos() as u64
}

/// `samples` measured runs (each after the shared warm-up), for variance
/// reporting.
pub fn time_diff_samples<F: FnMut()>(mut run: F, warmup: usize, samples: usize) -> Vec<u64> {
    for _ in 0..warmup {
        run();
    }
    (0..samples)
        .map(|_| {
            let start = Instant::now();
            run();
            start.elapsed().as_nanos() as u64
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

/// Aligned text table of labeled metric reports.
pub fn metrics_table(rows: &[(String, MetricsReport)]) -> String {
    let name_w = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<name_w$}  {:>6} {:>6} {:>6} {:>9} {:>9} {:>9} {:>8} {:>6}\n",
        "name", "TP", "FP", "FN", "precision", "recall", "fscore", "perfect", "incomp"
    );
    for (name, m) in rows {
        out.push_str(&format!(
            "{:<name_w$}  {:>6} {:>6} {:>6} {:>9.4} {:>9.4} {:>9.4} {:>8} {:>6}\n",
            name,
            m.true_positives,
            m.false_positives,
            m.false_negatives,
            m.precision,
            m.recall,
            m.fscore,
            m.perfect_diff,
            m.incompatible.total(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse_java;

    fn file(path: &str, src: &str) -> SourceFile {
        SourceFile {
            path: path.to_string(),
            tree: parse_java(src).expect("fixture parses").tree,
        }
    }

    fn entry(info: &str) -> GtEntry {
        GtEntry {
            left: "l".into(),
            right: "r".into(),
            info: info.into(),
        }
    }

    fn pair(file: &str, label: &str, ls: usize, le: usize, rs: usize, re: usize) -> (NodeRef, NodeRef) {
        (
            NodeRef::new(file, label, Span::new(ls, le)),
            NodeRef::new(file, label, Span::new(rs, re)),
        )
    }

    #[test]
    fn info_round_trips_through_parse_and_format() {
        let info = "MethodInvocation[10-25]:MethodInvocation[12-27]";
        let ((ll, ls), (rl, rs)) = parse_info(info).expect("well-formed");
        assert_eq!((ll.as_str(), ls), ("MethodInvocation", Span::new(10, 25)));
        assert_eq!((rl.as_str(), rs), ("MethodInvocation", Span::new(12, 27)));
        let l = NodeRef::new("A.java", "MethodInvocation", Span::new(10, 25));
        let r = NodeRef::new("A.java", "MethodInvocation", Span::new(12, 27));
        assert_eq!(format_info(&l, &r), info);
    }

    #[test]
    fn malformed_info_strings_are_rejected_with_entry_index() {
        for bad in [
            "MethodInvocation[10-25:MethodInvocation[12-27]",
            "MethodInvocation 10-25]:MethodInvocation[12-27]",
            "[10-25]:MethodInvocation[12-27]",
            "A[10-25]:B[12-27] ",
            "A[25-10]:B[12-27]",
            "A[10-25]B[12-27]",
            "A[10-25]:B[12--27]",
            "A[-3-5]:B[1-2]",
        ] {
            assert!(parse_info(bad).is_none(), "{bad:?} should not parse");
        }
        let gt = GroundTruthFile {
            file: "A.java".into(),
            matched_elements: vec![entry("TypeDeclaration[0-10]:TypeDeclaration[0-10]")],
            mappings: vec![entry("ok-not[")],
            inter_file: vec![],
            metadata: None,
        };
        let err = load_ground_truth(&save_ground_truth(&gt)).unwrap_err();
        match err {
            GtError::MalformedInfo { section, index, .. } => {
                assert_eq!((section.as_str(), index), ("mappings", 0));
            }
            other => panic!("expected MalformedInfo, got {other}"),
        }
    }

    #[test]
    fn ground_truth_round_trips_in_both_directions() {
        let gt = GroundTruthFile {
            file: "p/C.java".into(),
            matched_elements: vec![entry("MethodDeclaration[4-40]:MethodDeclaration[4-44]")],
            mappings: vec![entry("ExpressionStatement[10-20]:ExpressionStatement[12-22]")],
            inter_file: vec![GtGroup {
                origin: "p/C.java".into(),
                destination: "p/D.java".into(),
                matched_elements: vec![],
                mappings: vec![entry("ReturnStatement[30-39]:ReturnStatement[8-17]")],
            }],
            metadata: Some(BenchmarkMetadata {
                multi_mappings: true,
                left_churn: 0.25,
                right_churn: 0.5,
                challenge_level: ChallengeLevel::Medium,
                comments: "duplicated region consolidated".into(),
            }),
        };
        let bytes = save_ground_truth(&gt);
        let back = load_ground_truth(&bytes).expect("canonical bytes load");
        assert_eq!(back, gt);
        assert_eq!(save_ground_truth(&back), bytes, "save after load is byte-identical");
    }

    #[test]
    fn churn_outside_unit_interval_is_rejected() {
        let gt = GroundTruthFile {
            file: "A.java".into(),
            matched_elements: vec![],
            mappings: vec![],
            inter_file: vec![],
            metadata: Some(BenchmarkMetadata {
                multi_mappings: false,
                left_churn: 1.5,
                right_churn: 0.0,
                challenge_level: ChallengeLevel::Low,
                comments: String::new(),
            }),
        };
        assert!(matches!(
            load_ground_truth(&save_ground_truth(&gt)),
            Err(GtError::ChurnRange(_))
        ));
    }

    #[test]
    fn published_count_triples_reproduce_reported_ratios() {
        // Rounded (precision, recall) pairs computed independently from the
        // raw counts: P = TP/(TP+FP), R = TP/(TP+FN), rounded to 4 places.
        let cases = [
            ((1410, 4, 23), (0.9972, 0.9839)),
            ((1425, 0, 6), (1.0, 0.9958)),
            ((2277, 1, 1), (0.9996, 0.9996)),
            ((3979, 1, 4), (0.9997, 0.9990)),
        ];
        for ((tp, fp, fn_), (p, r)) in cases {
            let m = MetricsReport::from_counts(tp, fp, fn_, Granularity::Statement);
            assert!(
                ((m.precision * 1e4).round() / 1e4 - p).abs() < 1e-9,
                "P for ({tp},{fp},{fn_}): got {}",
                m.precision
            );
            assert!(
                ((m.recall * 1e4).round() / 1e4 - r).abs() < 1e-9,
                "R for ({tp},{fp},{fn_}): got {}",
                m.recall
            );
            let f = 2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64);
            assert!((m.fscore - f).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_denominator_conventions() {
        let empty = MetricsReport::from_counts(0, 0, 0, Granularity::Statement);
        assert_eq!((empty.precision, empty.recall, empty.fscore), (1.0, 1.0, 1.0));
        assert!(empty.perfect_diff);
        let all_missed = MetricsReport::from_counts(0, 0, 5, Granularity::Statement);
        assert_eq!((all_missed.precision, all_missed.recall), (0.0, 0.0));
        assert!(!all_missed.perfect_diff);
        let all_wrong = MetricsReport::from_counts(0, 7, 0, Granularity::Statement);
        assert_eq!((all_wrong.precision, all_wrong.recall), (0.0, 0.0));
    }

    #[test]
    fn swapping_tool_and_benchmark_swaps_precision_and_recall() {
        let t: BTreeSet<_> = [
            pair("A.java", "ReturnStatement", 0, 10, 0, 10),
            pair("A.java", "ExpressionStatement", 11, 20, 11, 20),
            pair("A.java", "ThrowStatement", 21, 30, 21, 32),
        ]
        .into_iter()
        .collect();
        let b: BTreeSet<_> = [
            pair("A.java", "ReturnStatement", 0, 10, 0, 10),
            pair("A.java", "BreakStatement", 40, 45, 40, 45),
        ]
        .into_iter()
        .collect();
        let m1 = metrics_over_sets(&t, &b, &[], Granularity::Subexpression);
        let m2 = metrics_over_sets(&b, &t, &[], Granularity::Subexpression);
        assert_eq!(m1.true_positives, m2.true_positives);
        assert_eq!(m1.false_positives, m2.false_negatives);
        assert_eq!(m1.false_negatives, m2.false_positives);
        assert_eq!(m1.precision, m2.recall);
        assert_eq!(m1.recall, m2.precision);
        assert_eq!(m1.fscore, m2.fscore);
    }

    #[test]
    fn mappings_under_unchanged_elements_do_not_move_metrics() {
        let unchanged_elem = pair("A.java", "MethodDeclaration", 100, 200, 100, 200);
        let visible = pair("A.java", "ExpressionStatement", 10, 30, 10, 35);
        let hidden = pair("A.java", "ExpressionStatement", 110, 130, 110, 130);
        let b: BTreeSet<_> = [unchanged_elem.clone(), visible.clone()].into_iter().collect();
        let t_bare: BTreeSet<_> = [unchanged_elem.clone(), visible.clone()].into_iter().collect();
        let mut t_noisy = t_bare.clone();
        t_noisy.insert(hidden);
        let unchanged = [unchanged_elem];
        let m_bare = metrics_over_sets(&t_bare, &b, &unchanged, Granularity::Statement);
        let m_noisy = metrics_over_sets(&t_noisy, &b, &unchanged, Granularity::Statement);
        assert_eq!(m_bare, m_noisy, "hidden mapping changes nothing");
        assert!(m_noisy.perfect_diff);
        // The unchanged element pair itself still counts.
        assert_eq!(m_noisy.true_positives, 2);
    }

    #[test]
    fn statement_granularity_drops_sub_expression_pairs() {
        let stmt = pair("A.java", "ReturnStatement", 0, 10, 0, 10);
        let leaf = pair("A.java", "SimpleName", 2, 5, 2, 5);
        let t: BTreeSet<_> = [stmt.clone(), leaf.clone()].into_iter().collect();
        let b: BTreeSet<_> = [stmt].into_iter().collect();
        let coarse = metrics_over_sets(&t, &b, &[], Granularity::Statement);
        assert!(coarse.perfect_diff);
        let fine = metrics_over_sets(&t, &b, &[], Granularity::Subexpression);
        assert_eq!(fine.false_positives, 1);
    }

    #[test]
    fn audit_counts_context_violations_and_spares_blessed_pairs() {
        let left = [file(
            "A.java",
            "class A { void m() { if (x) { run(); } } }",
        )];
        let right = [file(
            "A.java",
            "class A { void m() { if (x) { run(); } } }",
        )];
        let lt = &left[0].tree;
        let rt = &right[0].tree;
        let method_body = |t: &AstTree| {
            t.preorder()
                .find(|&n| {
                    t.label(n) == tax::BLOCK && t.parent(n).map(|p| t.label(p)) == Some(tax::METHOD_DECLARATION)
                })
                .unwrap()
        };
        let if_body = |t: &AstTree| {
            t.preorder()
                .find(|&n| {
                    t.label(n) == tax::BLOCK && t.parent(n).map(|p| t.label(p)) == Some(tax::IF_STATEMENT)
                })
                .unwrap()
        };
        let nref = |files: &[SourceFile], n: NodeId| {
            NodeRef::new(files[0].path.clone(), files[0].tree.label(n), files[0].tree.span(n))
        };
        let mut s_t = MappingStore::new();
        s_t.add(nref(&left, method_body(lt)), nref(&right, if_body(rt)));
        let counts = audit_incompatibility(&s_t, &BTreeSet::new(), &left, &right);
        assert_eq!(counts.block, 1);
        assert_eq!(counts.total(), 1);
        // The same pair blessed by the benchmark is not a violation.
        let blessed: BTreeSet<_> = s_t.iter().cloned().collect();
        let counts = audit_incompatibility(&s_t, &blessed, &left, &right);
        assert_eq!(counts.total(), 0);
    }

    #[test]
    fn audit_modifier_semantic_groups() {
        let left = [file("A.java", "public class A { public static int f; final int g; }")];
        let right = [file("A.java", "public class A { private volatile int f; final int g; }")];
        let modifier = |files: &[SourceFile], value: &str| {
            let t = &files[0].tree;
            let n = t
                .preorder()
                .find(|&n| t.label(n) == tax::MODIFIER && t.value(n) == value)
                .unwrap_or_else(|| panic!("modifier {value}"));
            NodeRef::new(files[0].path.clone(), t.label(n), t.span(n))
        };
        let mut s_t = MappingStore::new();
        // public -> private: both access, compatible.
        s_t.add(modifier(&left, "public"), modifier(&right, "private"));
        // static -> volatile: each its own group, incompatible.
        s_t.add(modifier(&left, "static"), modifier(&right, "volatile"));
        // final -> final: same value, compatible.
        s_t.add(modifier(&left, "final"), modifier(&right, "final"));
        let counts = audit_incompatibility(&s_t, &BTreeSet::new(), &left, &right);
        assert_eq!(counts.modifier, 1);
        assert_eq!(counts.total(), 1);
    }

    #[test]
    fn modifier_groups_cover_sealing_keywords() {
        // The sealing group is judged by value even though the parsed
        // subset has no sealed classes.
        for (a, b) in [("final", "sealed"), ("sealed", "non-sealed"), ("final", "non-sealed")] {
            assert!(compatible_modifiers(a, b), "{a} and {b} share the sealing group");
        }
        assert!(compatible_modifiers("public", "protected"));
        assert!(compatible_modifiers("strictfp", "strictfp"));
        for (a, b) in [("sealed", "static"), ("public", "static"), ("abstract", "final"), ("native", "volatile")] {
            assert!(!compatible_modifiers(a, b), "{a} and {b} are incompatible");
        }
    }

    #[test]
    fn audit_flags_constructor_matched_with_method() {
        let left = [file("A.java", "class A { A() { init(); } }")];
        let right = [file("A.java", "class A { void setup() { init(); } }")];
        let decl = |files: &[SourceFile]| {
            let t = &files[0].tree;
            let n = t.preorder().find(|&n| t.label(n) == tax::METHOD_DECLARATION).unwrap();
            NodeRef::new(files[0].path.clone(), t.label(n), t.span(n))
        };
        let mut s_t = MappingStore::new();
        s_t.add(decl(&left), decl(&right));
        let counts = audit_incompatibility(&s_t, &BTreeSet::new(), &left, &right);
        assert_eq!(counts.method_declaration, 1);
    }

    #[test]
    fn churn_ratios_match_line_diff() {
        assert_eq!(compute_churn("a\nb\nc\n", "a\nb\nc\n"), (0.0, 0.0));
        let ten = "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n";
        let other = "x1\nx2\nx3\nx4\nx5\nx6\nx7\nx8\nx9\nx10\n";
        assert_eq!(compute_churn(ten, other), (1.0, 1.0));
        let base: String = (0..20).map(|i| format!("line {i}\n")).collect();
        let edited = base.replace("line 3\n", "LINE 3\n").replace("line 11\n", "LINE 11\n");
        assert_eq!(compute_churn(&base, &edited), (0.1, 0.1));
        // Pure insertion: right churn only.
        let (lc, rc) = compute_churn("a\nb\n", "a\nnew\nb\n");
        assert_eq!(lc, 0.0);
        assert!((rc - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn timing_is_positive_and_excludes_warmup() {
        let mut calls = 0usize;
        let ns = time_diff(
            || {
                calls += 1;
                std::hint::black_box((0..100).sum::<u64>());
            },
            3,
        );
        assert!(ns > 0);
        assert_eq!(calls, 4, "three warm-up runs plus one measured run");
        let samples = time_diff_samples(
            || {
                std::hint::black_box(1 + 1);
            },
            1,
            5,
        );
        assert_eq!(samples.len(), 5);
    }

    #[test]
    fn resolvable_entries_verify_and_bad_spans_fail() {
        let left = [file("A.java", "class A { void m() { run(); } }")];
        let right = [file("A.java", "class A { void m() { run(); } }")];
        let t = &left[0].tree;
        let stmt = t.preorder().find(|&n| t.label(n) == tax::EXPRESSION_STATEMENT).unwrap();
        let span = t.span(stmt);
        let ok = GroundTruthFile {
            file: "A.java".into(),
            matched_elements: vec![],
            mappings: vec![entry(&format!(
                "ExpressionStatement[{}-{}]:ExpressionStatement[{}-{}]",
                span.start, span.end, span.start, span.end
            ))],
            inter_file: vec![],
            metadata: None,
        };
        verify_resolvable(&ok, &left, &right).expect("resolves");
        let bad = GroundTruthFile {
            mappings: vec![entry(&format!(
                "ExpressionStatement[{}-{}]:ExpressionStatement[{}-{}]",
                span.start + 1,
                span.end,
                span.start,
                span.end
            ))],
            ..ok
        };
        let err = verify_resolvable(&bad, &left, &right).unwrap_err();
        assert!(matches!(err, GtError::Unresolvable { index: 0, .. }));
    }

    #[test]
    fn changed_elements_excludes_identical_subtrees() {
        let left = [file("A.java", "class A { void same() { a(); } void edited() { b(); } }")];
        let right = [file("A.java", "class A { void same() { a(); } void edited() { c(); } }")];
        let decl_ref = |files: &[SourceFile], nth: usize| {
            let t = &files[0].tree;
            let n = t
                .preorder()
                .filter(|&n| t.label(n) == tax::METHOD_DECLARATION)
                .nth(nth)
                .unwrap();
            NodeRef::new(files[0].path.clone(), t.label(n), t.span(n))
        };
        let elements: BTreeSet<_> = [
            (decl_ref(&left, 0), decl_ref(&right, 0)),
            (decl_ref(&left, 1), decl_ref(&right, 1)),
        ]
        .into_iter()
        .collect();
        let changed = changed_elements(&elements, &left, &right);
        assert_eq!(changed.len(), 1);
        assert_eq!(changed.iter().next().unwrap().0, decl_ref(&left, 1));
    }

    #[test]
    fn metrics_table_is_aligned() {
        let rows = vec![
            ("semdiff".to_string(), MetricsReport::from_counts(10, 0, 0, Granularity::Statement)),
            ("greedy".to_string(), MetricsReport::from_counts(8, 3, 2, Granularity::Statement)),
        ];
        let table = metrics_table(&rows);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("precision"));
        assert!(lines[1].len() == lines[2].len(), "rows align");
    }
}
