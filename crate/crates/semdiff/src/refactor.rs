//! Refactoring records and refactoring-specific mapping contributions.
//!
//! A [`Refactoring`] couples a classification tag with the AST node mappings
//! that the refactoring explains (declaration pairs, kept-all multi-mappings,
//! moved statements, sub-expression pairs). Signature-level instances (renames
//! and moves of classes, methods, and fields) are produced by the declaration
//! matching phases in [`crate::decl`]; body-level instances (extract/inline
//! method and variable refactorings, merged catches, consolidated
//! conditionals) by the detectors in this module.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::decl::{ClassDiff, DeclKind, DeclMatcher, DeclarationPair, Loc, Member};
use crate::stmt::{
    identical_region_lefts, map_statements, optimize_duplicates, scope_by_call_sites,
    statements_in, CallSiteSide, DuplicateCandidate, MappingContext, MappingSet, ReplacementKind,
    StatementMapping,
};
use crate::taxonomy as tax;
use crate::tree::{invocation_name_index, pretty, AstTree, NodeId, PairStore};

/// Classification tags for detected refactorings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RefactoringType {
    RenameClass,
    MoveClass,
    MoveAndRenameClass,
    RenameMethod,
    AddParameter,
    RemoveParameter,
    ChangeReturnType,
    ChangeParameterType,
    RenameParameter,
    RenameField,
    MoveField,
    MoveAndRenameField,
    PullUpField,
    PushDownField,
    MoveMethod,
    MoveAndRenameMethod,
    PullUpMethod,
    PushDownMethod,
    ExtractMethod,
    ExtractAndMoveMethod,
    InlineMethod,
    MoveAndInlineMethod,
    ExtractVariable,
    InlineVariable,
    ExtractField,
    InlineField,
    RenameVariable,
    ChangeVariableType,
    ParameterizeVariable,
    MergeCatch,
    ConsolidateDuplicateConditionalFragments,
}

impl fmt::Display for RefactoringType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RefactoringType::RenameClass => "Rename Class",
            RefactoringType::MoveClass => "Move Class",
            RefactoringType::MoveAndRenameClass => "Move and Rename Class",
            RefactoringType::RenameMethod => "Rename Method",
            RefactoringType::AddParameter => "Add Parameter",
            RefactoringType::RemoveParameter => "Remove Parameter",
            RefactoringType::ChangeReturnType => "Change Return Type",
            RefactoringType::ChangeParameterType => "Change Parameter Type",
            RefactoringType::RenameParameter => "Rename Parameter",
            RefactoringType::RenameField => "Rename Field",
            RefactoringType::MoveField => "Move Field",
            RefactoringType::MoveAndRenameField => "Move and Rename Field",
            RefactoringType::PullUpField => "Pull Up Field",
            RefactoringType::PushDownField => "Push Down Field",
            RefactoringType::MoveMethod => "Move Method",
            RefactoringType::MoveAndRenameMethod => "Move and Rename Method",
            RefactoringType::PullUpMethod => "Pull Up Method",
            RefactoringType::PushDownMethod => "Push Down Method",
            RefactoringType::ExtractMethod => "Extract Method",
            RefactoringType::ExtractAndMoveMethod => "Extract and Move Method",
            RefactoringType::InlineMethod => "Inline Method",
            RefactoringType::MoveAndInlineMethod => "Move and Inline Method",
            RefactoringType::ExtractVariable => "Extract Variable",
            RefactoringType::InlineVariable => "Inline Variable",
            RefactoringType::ExtractField => "Extract Field",
            RefactoringType::InlineField => "Inline Field",
            RefactoringType::RenameVariable => "Rename Variable",
            RefactoringType::ChangeVariableType => "Change Variable Type",
            RefactoringType::ParameterizeVariable => "Parameterize Variable",
            RefactoringType::MergeCatch => "Merge Catch",
            RefactoringType::ConsolidateDuplicateConditionalFragments => {
                "Consolidate Duplicate Conditional Fragments"
            }
        };
        f.write_str(s)
    }
}

/// How a mapping contributed by a refactoring relates the two sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MappingKind {
    /// The two declarations the refactoring links.
    Declaration,
    /// Part of a kept-all one-to-many or many-to-one statement group.
    Multi,
    /// Statement moved within the same file.
    IntraFileMove,
    /// Statement moved across files.
    InterFileMove,
    /// Sub-expression pair (e.g. an argument and the expression a parameter
    /// replaced).
    SubExpression,
}

impl fmt::Display for MappingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MappingKind::Declaration => "declaration",
            MappingKind::Multi => "multi",
            MappingKind::IntraFileMove => "intra-file-move",
            MappingKind::InterFileMove => "inter-file-move",
            MappingKind::SubExpression => "sub-expression",
        };
        f.write_str(s)
    }
}

/// One AST node pair contributed or explained by a refactoring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MappingRecord {
    pub kind: MappingKind,
    pub left: Loc,
    pub right: Loc,
}

/// A detected refactoring instance.
#[derive(Clone, Debug)]
pub struct Refactoring {
    pub type_tag: RefactoringType,
    pub description: String,
    pub mappings: Vec<MappingRecord>,
}

impl Refactoring {
    pub fn new(type_tag: RefactoringType, description: String) -> Self {
        Refactoring { type_tag, description, mappings: Vec::new() }
    }

    pub fn with_declaration(mut self, left: Loc, right: Loc) -> Self {
        self.mappings.push(MappingRecord { kind: MappingKind::Declaration, left, right });
        self
    }
}

// ---------------------------------------------------------------------------
// Tree navigation helpers
// ---------------------------------------------------------------------------

fn body_of(tree: &AstTree, decl: NodeId) -> Option<NodeId> {
    tree.children(decl).iter().copied().find(|&c| tree.label(c) == tax::BLOCK)
}

fn enclosing_type_node(tree: &AstTree, id: NodeId) -> Option<NodeId> {
    let mut cur = tree.parent(id);
    while let Some(n) = cur {
        if matches!(tree.label(n), tax::TYPE_DECLARATION | tax::ENUM_DECLARATION) {
            return Some(n);
        }
        cur = tree.parent(n);
    }
    None
}

/// Formal parameters of a method declaration: `(name, declaration node)`.
fn params_of(tree: &AstTree, decl: NodeId) -> Vec<(String, NodeId)> {
    tree.children(decl)
        .iter()
        .copied()
        .filter(|&ch| tree.label(ch) == tax::SINGLE_VARIABLE_DECLARATION)
        .filter_map(|svd| {
            tree.children(svd)
                .iter()
                .copied()
                .find(|&n| tree.label(n) == tax::SIMPLE_NAME)
                .map(|n| (tree.value(n).to_string(), svd))
        })
        .collect()
}

/// Invocations of `name` anywhere under `scope`.
fn invocation_sites(tree: &AstTree, scope: NodeId, name: &str) -> Vec<NodeId> {
    tree.subtree(scope)
        .filter(|&n| {
            if !tax::is_invocation(tree.label(n)) {
                return false;
            }
            let cs = tree.children(n);
            !cs.is_empty() && tree.value(cs[invocation_name_index(tree, n)]) == name
        })
        .collect()
}

fn call_arguments(tree: &AstTree, inv: NodeId) -> Vec<NodeId> {
    let cs = tree.children(inv);
    if cs.is_empty() {
        return Vec::new();
    }
    cs[invocation_name_index(tree, inv) + 1..].to_vec()
}

/// The declaration node (fragment or single-variable declaration) of a local
/// named `name` under `scope`.
fn local_decl_node(tree: &AstTree, scope: NodeId, name: &str) -> Option<NodeId> {
    tree.subtree(scope).find(|&n| match tree.label(n) {
        tax::VARIABLE_DECLARATION_FRAGMENT => {
            let cs = tree.children(n);
            !cs.is_empty() && tree.value(cs[0]) == name
        }
        tax::SINGLE_VARIABLE_DECLARATION => tree
            .children(n)
            .iter()
            .any(|&ch| tree.label(ch) == tax::SIMPLE_NAME && tree.value(ch) == name),
        _ => false,
    })
}

/// A local declaration fragment of `name` with an initializer, as
/// `(fragment, initializer)`.
fn decl_with_init(tree: &AstTree, scope: NodeId, name: &str) -> Option<(NodeId, NodeId)> {
    tree.subtree(scope).find_map(|n| {
        if tree.label(n) != tax::VARIABLE_DECLARATION_FRAGMENT {
            return None;
        }
        let cs = tree.children(n);
        if cs.len() == 2 && tree.value(cs[0]) == name {
            Some((n, cs[1]))
        } else {
            None
        }
    })
}

/// An initialized field fragment named `name` declared directly on the type.
fn field_fragment_with_init(
    tree: &AstTree,
    type_node: NodeId,
    name: &str,
) -> Option<(NodeId, NodeId)> {
    for &fd in tree.children(type_node) {
        if tree.label(fd) != tax::FIELD_DECLARATION {
            continue;
        }
        for &fr in tree.children(fd) {
            if tree.label(fr) != tax::VARIABLE_DECLARATION_FRAGMENT {
                continue;
            }
            let cs = tree.children(fr);
            if cs.len() == 2 && tree.value(cs[0]) == name {
                return Some((fr, cs[1]));
            }
        }
    }
    None
}

fn field_named(tree: &AstTree, type_node: NodeId, name: &str) -> bool {
    tree.children(type_node).iter().any(|&fd| {
        tree.label(fd) == tax::FIELD_DECLARATION
            && tree.children(fd).iter().any(|&fr| {
                tree.label(fr) == tax::VARIABLE_DECLARATION_FRAGMENT
                    && tree.children(fr).first().is_some_and(|&n| tree.value(n) == name)
            })
    })
}

/// The variable declaration statement (or single-variable declaration) that
/// contains `id`, stopping at the scope root.
fn enclosing_var_decl(tree: &AstTree, scope: NodeId, id: NodeId) -> Option<NodeId> {
    let mut cur = Some(id);
    while let Some(n) = cur {
        if n == scope {
            return None;
        }
        if matches!(
            tree.label(n),
            tax::VARIABLE_DECLARATION_STATEMENT | tax::SINGLE_VARIABLE_DECLARATION
        ) {
            return Some(n);
        }
        cur = tree.parent(n);
    }
    None
}

fn declared_name(tree: &AstTree, decl: NodeId) -> String {
    match tree.label(decl) {
        tax::VARIABLE_DECLARATION_STATEMENT | tax::FIELD_DECLARATION => tree
            .children(decl)
            .iter()
            .copied()
            .find(|&n| tree.label(n) == tax::VARIABLE_DECLARATION_FRAGMENT)
            .and_then(|fr| tree.children(fr).first().copied())
            .map(|n| tree.value(n).to_string())
            .unwrap_or_default(),
        tax::SINGLE_VARIABLE_DECLARATION => tree
            .children(decl)
            .iter()
            .copied()
            .find(|&n| tree.label(n) == tax::SIMPLE_NAME)
            .map(|n| tree.value(n).to_string())
            .unwrap_or_default(),
        tax::VARIABLE_DECLARATION_FRAGMENT => {
            tree.children(decl).first().map(|&n| tree.value(n).to_string()).unwrap_or_default()
        }
        _ => String::new(),
    }
}

/// First non-Block composite statement above `id`, mirroring the depth and
/// parent definitions of the statement mapper.
fn first_composite_parent(tree: &AstTree, scope: NodeId, id: NodeId) -> Option<NodeId> {
    let mut cur = tree.parent(id);
    while let Some(n) = cur {
        if n == scope {
            return None;
        }
        let l = tree.label(n);
        if tax::is_composite_statement(l) && l != tax::BLOCK {
            return Some(n);
        }
        cur = tree.parent(n);
    }
    None
}

/// Right-side counterpart of [`identical_region_lefts`]: the right statements
/// covered by the span of the execution's identical mappings.
fn identical_region_rights(ctx: &MappingContext, set: &MappingSet) -> Vec<NodeId> {
    let identical: Vec<NodeId> =
        set.mappings.iter().filter(|m| m.edit_distance == 0).map(|m| m.right).collect();
    if identical.is_empty() {
        return Vec::new();
    }
    let start = identical.iter().map(|&r| ctx.rt.span(r).start).min().unwrap();
    let end = identical.iter().map(|&r| ctx.rt.span(r).end).max().unwrap();
    statements_in(ctx.rt, ctx.right_scope)
        .into_iter()
        .filter(|&s| {
            let sp = ctx.rt.span(s);
            sp.start >= start && sp.end <= end
        })
        .collect()
}

/// Display label for a member: qualified name plus the parameter list for
/// methods.
fn member_label(mem: &Member) -> String {
    match mem.signature.kind {
        DeclKind::Method => format!(
            "{}({})",
            mem.signature.qualified_name,
            mem.signature.parameter_types.join(", ")
        ),
        _ => mem.signature.qualified_name.clone(),
    }
}

// ---------------------------------------------------------------------------
// Extract / inline method instances
// ---------------------------------------------------------------------------

/// One admissible extraction or inlining: the origin declaration pair it was
/// detected against, the target method, the call site that anchored the
/// mapping execution, and the surviving statement mappings.
#[derive(Debug)]
struct OwnedInstance {
    tag: RefactoringType,
    is_extract: bool,
    origin_pair: usize,
    target_type: usize,
    target_member: usize,
    call_site: NodeId,
    maps: Vec<StatementMapping>,
}

/// Trees, files, and scope roots of one instance's mapping: the origin body
/// on one side and the target method body on the other.
struct InstTrees<'x> {
    lt: &'x AstTree,
    rt: &'x AstTree,
    lfile: usize,
    rfile: usize,
    lscope: NodeId,
    rscope: NodeId,
}

fn instance_trees<'x>(m: &'x DeclMatcher, inst: &OwnedInstance) -> Option<InstTrees<'x>> {
    let p = &m.pairs[inst.origin_pair];
    if inst.is_extract {
        let ex = &m.right_types[inst.target_type].methods[inst.target_member];
        let lt = m.ltree(p.left.file);
        Some(InstTrees {
            lt,
            rt: m.rtree(ex.loc.file),
            lfile: p.left.file,
            rfile: ex.loc.file,
            lscope: body_of(lt, p.left.node)?,
            rscope: ex.body?,
        })
    } else {
        let inl = &m.left_types[inst.target_type].methods[inst.target_member];
        let rt = m.rtree(p.right.file);
        Some(InstTrees {
            lt: m.ltree(inl.loc.file),
            rt,
            lfile: inl.loc.file,
            rfile: p.right.file,
            lscope: inl.body?,
            rscope: body_of(rt, p.right.node)?,
        })
    }
}

/// Unmatched methods with bodies, per snapshot side, as
/// `(type index, method index)`. These are the candidate targets of
/// extractions (right side) and inlinings (left side).
fn collect_targets(m: &DeclMatcher) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut right = Vec::new();
    for (ti, t) in m.right_types.iter().enumerate() {
        for (mi, mem) in t.methods.iter().enumerate() {
            if !mem.signature.is_constructor && mem.body.is_some() && !m.is_right_matched(mem.loc)
            {
                right.push((ti, mi));
            }
        }
    }
    let mut left = Vec::new();
    for (ti, t) in m.left_types.iter().enumerate() {
        for (mi, mem) in t.methods.iter().enumerate() {
            if !mem.signature.is_constructor && mem.body.is_some() && !m.is_left_matched(mem.loc) {
                left.push((ti, mi));
            }
        }
    }
    (right, left)
}

/// Admissibility threshold: more than half of the target method's statements
/// must participate in the mapping.
fn majority_mapped(mapped: usize, total: usize) -> bool {
    mapped > 0 && 2 * mapped > total
}

fn extract_instances(m: &DeclMatcher, pi: usize, targets: &[(usize, usize)]) -> Vec<OwnedInstance> {
    let p = &m.pairs[pi];
    let lt = m.ltree(p.left.file);
    let rt = m.rtree(p.right.file);
    let (Some(lb), Some(rb)) = (body_of(lt, p.left.node), body_of(rt, p.right.node)) else {
        return Vec::new();
    };
    // Only origins whose own mapping is inexact can have donated statements.
    let lstmts = statements_in(lt, lb);
    let mapped_lefts: BTreeSet<NodeId> = p.statement_mappings.iter().map(|mm| mm.left).collect();
    let inexact = lstmts.iter().any(|s| !mapped_lefts.contains(s))
        || p.statement_mappings.iter().any(|mm| !mm.replacements.is_empty());
    if !inexact {
        return Vec::new();
    }
    let origin_type = enclosing_type_node(rt, p.right.node);
    let parent_pairs: PairStore<NodeId> =
        p.statement_mappings.iter().map(|mm| (mm.left, mm.right)).collect();
    let mut out = Vec::new();
    for &(ti, mi) in targets {
        let ex = &m.right_types[ti].methods[mi];
        let ex_tree = m.rtree(ex.loc.file);
        let Some(exb) = ex.body else { continue };
        let ex_stmts = statements_in(ex_tree, exb);
        if ex_stmts.is_empty() {
            continue;
        }
        let sites = invocation_sites(rt, rb, &ex.signature.name);
        if sites.is_empty() {
            continue;
        }
        let same_type = ex.loc.file == p.right.file
            && origin_type.is_some()
            && origin_type == enclosing_type_node(rt, ex.loc.node);
        let tag = if same_type {
            RefactoringType::ExtractMethod
        } else {
            RefactoringType::ExtractAndMoveMethod
        };
        let execs = scope_by_call_sites(rt, rb, &sites, &parent_pairs, CallSiteSide::Right);
        let mut consumed: BTreeSet<NodeId> = BTreeSet::new();
        for exec in execs {
            let ctx = MappingContext::new(lt, lb, ex_tree, exb);
            let pool_l: Vec<NodeId> = match exec.counterpart_scope {
                Some(c) => statements_in(lt, c),
                None => lstmts.iter().copied().filter(|s| !consumed.contains(s)).collect(),
            };
            let set = map_statements(&ctx, &pool_l, &ex_stmts);
            let mapped: BTreeSet<NodeId> = set.mappings.iter().map(|mm| mm.right).collect();
            if !majority_mapped(mapped.len(), ex_stmts.len()) {
                continue;
            }
            if exec.counterpart_scope.is_none() {
                consumed.extend(identical_region_lefts(&ctx, &set));
            }
            out.push(OwnedInstance {
                tag,
                is_extract: true,
                origin_pair: pi,
                target_type: ti,
                target_member: mi,
                call_site: exec.call_site,
                maps: set.mappings,
            });
        }
    }
    out
}

fn inline_instances(m: &DeclMatcher, pi: usize, targets: &[(usize, usize)]) -> Vec<OwnedInstance> {
    let p = &m.pairs[pi];
    let lt = m.ltree(p.left.file);
    let rt = m.rtree(p.right.file);
    let (Some(lb), Some(rb)) = (body_of(lt, p.left.node), body_of(rt, p.right.node)) else {
        return Vec::new();
    };
    let rstmts = statements_in(rt, rb);
    let mapped_rights: BTreeSet<NodeId> = p.statement_mappings.iter().map(|mm| mm.right).collect();
    let inexact = rstmts.iter().any(|s| !mapped_rights.contains(s))
        || p.statement_mappings.iter().any(|mm| !mm.replacements.is_empty());
    if !inexact {
        return Vec::new();
    }
    let origin_type = enclosing_type_node(lt, p.left.node);
    let parent_pairs: PairStore<NodeId> =
        p.statement_mappings.iter().map(|mm| (mm.left, mm.right)).collect();
    let mut out = Vec::new();
    for &(ti, mi) in targets {
        let inl = &m.left_types[ti].methods[mi];
        let inl_tree = m.ltree(inl.loc.file);
        let Some(inlb) = inl.body else { continue };
        let inl_stmts = statements_in(inl_tree, inlb);
        if inl_stmts.is_empty() {
            continue;
        }
        let sites = invocation_sites(lt, lb, &inl.signature.name);
        if sites.is_empty() {
            continue;
        }
        let same_type = inl.loc.file == p.left.file
            && origin_type.is_some()
            && origin_type == enclosing_type_node(lt, inl.loc.node);
        let tag = if same_type {
            RefactoringType::InlineMethod
        } else {
            RefactoringType::MoveAndInlineMethod
        };
        let execs = scope_by_call_sites(lt, lb, &sites, &parent_pairs, CallSiteSide::Left);
        let mut consumed: BTreeSet<NodeId> = BTreeSet::new();
        for exec in execs {
            let ctx = MappingContext::new(inl_tree, inlb, rt, rb);
            let pool_r: Vec<NodeId> = match exec.counterpart_scope {
                Some(c) => statements_in(rt, c),
                None => rstmts.iter().copied().filter(|s| !consumed.contains(s)).collect(),
            };
            let set = map_statements(&ctx, &inl_stmts, &pool_r);
            let mapped: BTreeSet<NodeId> = set.mappings.iter().map(|mm| mm.left).collect();
            if !majority_mapped(mapped.len(), inl_stmts.len()) {
                continue;
            }
            if exec.counterpart_scope.is_none() {
                consumed.extend(identical_region_rights(&ctx, &set));
            }
            out.push(OwnedInstance {
                tag,
                is_extract: false,
                origin_pair: pi,
                target_type: ti,
                target_member: mi,
                call_site: exec.call_site,
                maps: set.mappings,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Duplicate resolution
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ItemId {
    /// `None` for the origin pair's own mapping, `Some(i)` for instance `i`.
    inst: Option<usize>,
    idx: usize,
}

struct FlatItem {
    id: ItemId,
    lkey: (usize, NodeId),
    rkey: (usize, NodeId),
    edit_distance: usize,
    calls_refactored: bool,
    parents_mapped: bool,
}

fn parents_mapped_in(
    lt: &AstTree,
    lscope: NodeId,
    rt: &AstTree,
    rscope: NodeId,
    maps: &[StatementMapping],
    mm: &StatementMapping,
) -> bool {
    let lp = first_composite_parent(lt, lscope, mm.left);
    let rp = first_composite_parent(rt, rscope, mm.right);
    match (lp, rp) {
        (None, None) => true,
        (Some(a), Some(b)) => maps.iter().any(|x| x.left == a && x.right == b),
        _ => false,
    }
}

/// Resolve statements claimed by several mappings: the origin pair's own
/// mapping competing with extraction or inlining executions. Instance
/// mappings that lose are removed in place (instances left without mappings
/// are dropped); the returned indexes are origin mappings that lost and must
/// be removed by the caller.
fn prune_duplicates(
    m: &DeclMatcher,
    pi: usize,
    instances: &mut Vec<OwnedInstance>,
) -> Vec<usize> {
    let p = &m.pairs[pi];
    let lt = m.ltree(p.left.file);
    let rt = m.rtree(p.right.file);
    let (Some(lb), Some(rb)) = (body_of(lt, p.left.node), body_of(rt, p.right.node)) else {
        return Vec::new();
    };
    let extract_sites: Vec<NodeId> =
        instances.iter().filter(|i| i.is_extract).map(|i| i.call_site).collect();
    let inline_sites: Vec<NodeId> =
        instances.iter().filter(|i| !i.is_extract).map(|i| i.call_site).collect();

    let mut items: Vec<FlatItem> = Vec::new();
    for (idx, mm) in p.statement_mappings.iter().enumerate() {
        items.push(FlatItem {
            id: ItemId { inst: None, idx },
            lkey: (p.left.file, mm.left),
            rkey: (p.right.file, mm.right),
            edit_distance: mm.edit_distance,
            calls_refactored: extract_sites.iter().any(|&s| rt.is_descendant_of(s, mm.right))
                || inline_sites.iter().any(|&s| lt.is_descendant_of(s, mm.left)),
            parents_mapped: parents_mapped_in(lt, lb, rt, rb, &p.statement_mappings, mm),
        });
    }
    for (i, inst) in instances.iter().enumerate() {
        let Some(t) = instance_trees(m, inst) else { continue };
        for (idx, mm) in inst.maps.iter().enumerate() {
            items.push(FlatItem {
                id: ItemId { inst: Some(i), idx },
                lkey: (t.lfile, mm.left),
                rkey: (t.rfile, mm.right),
                edit_distance: mm.edit_distance,
                calls_refactored: false,
                parents_mapped: parents_mapped_in(t.lt, t.lscope, t.rt, t.rscope, &inst.maps, mm),
            });
        }
    }

    let mut dead: BTreeSet<ItemId> = BTreeSet::new();
    for side in 0..2 {
        let mut groups: BTreeMap<(usize, NodeId), Vec<usize>> = BTreeMap::new();
        for (k, it) in items.iter().enumerate() {
            if dead.contains(&it.id) {
                continue;
            }
            groups.entry(if side == 0 { it.lkey } else { it.rkey }).or_default().push(k);
        }
        for idxs in groups.into_values() {
            if idxs.len() < 2 {
                continue;
            }
            // Only statements contended between the origin's own mapping and
            // at least one refactoring execution are resolved; statements
            // shared by refactoring executions alone are legitimate
            // multi-mappings.
            let sources: BTreeSet<Option<usize>> = idxs.iter().map(|&k| items[k].id.inst).collect();
            if sources.len() < 2 || !sources.contains(&None) {
                continue;
            }
            let group: Vec<DuplicateCandidate> = idxs
                .iter()
                .enumerate()
                .map(|(pos, &k)| DuplicateCandidate {
                    key: pos,
                    calls_refactored_method: items[k].calls_refactored,
                    parents_mapped: items[k].parents_mapped,
                    from_nested_refactoring: false,
                    identical: items[k].edit_distance == 0,
                    edit_distance: items[k].edit_distance,
                })
                .collect();
            let survivors: BTreeSet<usize> = optimize_duplicates(&group).into_iter().collect();
            for (pos, &k) in idxs.iter().enumerate() {
                if !survivors.contains(&pos) {
                    dead.insert(items[k].id);
                }
            }
        }
    }

    for (i, inst) in instances.iter_mut().enumerate() {
        let mut gone: Vec<usize> =
            dead.iter().filter(|d| d.inst == Some(i)).map(|d| d.idx).collect();
        gone.sort_unstable_by(|a, b| b.cmp(a));
        for idx in gone {
            inst.maps.remove(idx);
        }
    }
    instances.retain(|inst| !inst.maps.is_empty());
    dead.iter().filter(|d| d.inst.is_none()).map(|d| d.idx).collect()
}

// ---------------------------------------------------------------------------
// Instance records
// ---------------------------------------------------------------------------

/// Target statements claimed by two or more instances of the same target
/// method; their records are multi-mappings rather than moves.
fn shared_statements(instances: &[OwnedInstance]) -> BTreeSet<(bool, usize, usize, NodeId)> {
    let mut counts: BTreeMap<(bool, usize, usize, NodeId), usize> = BTreeMap::new();
    for inst in instances {
        let keys: BTreeSet<NodeId> = inst
            .maps
            .iter()
            .map(|mm| if inst.is_extract { mm.right } else { mm.left })
            .collect();
        for k in keys {
            *counts.entry((inst.is_extract, inst.target_type, inst.target_member, k)).or_insert(0) +=
                1;
        }
    }
    counts.into_iter().filter(|&(_, n)| n >= 2).map(|(k, _)| k).collect()
}

fn instance_description(m: &DeclMatcher, inst: &OwnedInstance) -> String {
    let p = &m.pairs[inst.origin_pair];
    if inst.is_extract {
        let ex = &m.right_types[inst.target_type].methods[inst.target_member];
        let origin = m.left_member(p.left).map(member_label).unwrap_or_default();
        format!("{} extracted from {}", member_label(ex), origin)
    } else {
        let inl = &m.left_types[inst.target_type].methods[inst.target_member];
        let origin = m.right_member(p.right).map(member_label).unwrap_or_default();
        format!("{} inlined into {}", member_label(inl), origin)
    }
}

fn instance_records(
    m: &DeclMatcher,
    inst: &OwnedInstance,
    shared: &BTreeSet<(bool, usize, usize, NodeId)>,
) -> Vec<MappingRecord> {
    let Some(t) = instance_trees(m, inst) else { return Vec::new() };
    inst.maps
        .iter()
        .map(|mm| {
            let key = if inst.is_extract { mm.right } else { mm.left };
            let kind = if shared.contains(&(
                inst.is_extract,
                inst.target_type,
                inst.target_member,
                key,
            )) {
                MappingKind::Multi
            } else if t.lfile == t.rfile {
                MappingKind::IntraFileMove
            } else {
                MappingKind::InterFileMove
            };
            MappingRecord {
                kind,
                left: Loc { file: t.lfile, node: mm.left },
                right: Loc { file: t.rfile, node: mm.right },
            }
        })
        .collect()
}

/// Arguments at the call site bound to parameters of the target method:
/// every replacement that rewrote an origin expression into a parameter name
/// (or vice versa) whose call-site argument renders identically.
fn instance_subexpressions(m: &DeclMatcher, inst: &OwnedInstance) -> Vec<MappingRecord> {
    let p = &m.pairs[inst.origin_pair];
    let mut out = Vec::new();
    let mut seen: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    if inst.is_extract {
        let ex = &m.right_types[inst.target_type].methods[inst.target_member];
        let ex_tree = m.rtree(ex.loc.file);
        let rt = m.rtree(p.right.file);
        let args = call_arguments(rt, inst.call_site);
        for (i, (pname, _)) in params_of(ex_tree, ex.loc.node).iter().enumerate() {
            let Some(&arg) = args.get(i) else { continue };
            let arg_text = pretty(rt, arg);
            for mm in &inst.maps {
                for rep in &mm.replacements {
                    if rep.right_text == *pname
                        && rep.left_text == arg_text
                        && seen.insert((rep.left, arg))
                    {
                        out.push(MappingRecord {
                            kind: MappingKind::SubExpression,
                            left: Loc { file: p.left.file, node: rep.left },
                            right: Loc { file: p.right.file, node: arg },
                        });
                    }
                }
            }
        }
    } else {
        let inl = &m.left_types[inst.target_type].methods[inst.target_member];
        let inl_tree = m.ltree(inl.loc.file);
        let lt = m.ltree(p.left.file);
        let args = call_arguments(lt, inst.call_site);
        for (i, (pname, _)) in params_of(inl_tree, inl.loc.node).iter().enumerate() {
            let Some(&arg) = args.get(i) else { continue };
            let arg_text = pretty(lt, arg);
            for mm in &inst.maps {
                for rep in &mm.replacements {
                    if rep.left_text == *pname
                        && rep.right_text == arg_text
                        && seen.insert((arg, rep.right))
                    {
                        out.push(MappingRecord {
                            kind: MappingKind::SubExpression,
                            left: Loc { file: p.left.file, node: arg },
                            right: Loc { file: p.right.file, node: rep.right },
                        });
                    }
                }
            }
        }
    }
    out
}

/// Origin locals that became parameters of the extracted method, either
/// through consistent renames to the parameter name or by keeping their name
/// while their declaration stayed behind. Returns the detections and the
/// claimed `(old name, parameter)` pairs, which are excluded from rename
/// detection inside the instance.
fn parameterize_instances(
    m: &DeclMatcher,
    inst: &OwnedInstance,
) -> (Vec<Refactoring>, BTreeSet<(String, String)>) {
    let mut out = Vec::new();
    let mut claims: BTreeSet<(String, String)> = BTreeSet::new();
    if !inst.is_extract {
        return (out, claims);
    }
    let p = &m.pairs[inst.origin_pair];
    let lt = m.ltree(p.left.file);
    let Some(lb) = body_of(lt, p.left.node) else { return (out, claims) };
    let rt = m.rtree(p.right.file);
    let rb = body_of(rt, p.right.node);
    let ex = &m.right_types[inst.target_type].methods[inst.target_member];
    let ex_tree = m.rtree(ex.loc.file);
    let ex_label = member_label(ex);
    for (pname, svd) in params_of(ex_tree, ex.loc.node) {
        // A local whose occurrences were renamed to the parameter.
        for mm in &inst.maps {
            for rep in &mm.replacements {
                if rep.kind != ReplacementKind::VariableRename
                    || rep.right_text != pname
                    || rep.left_text == pname
                {
                    continue;
                }
                let Some(ldecl) = local_decl_node(lt, lb, &rep.left_text) else { continue };
                if !claims.insert((rep.left_text.clone(), pname.clone())) {
                    continue;
                }
                let mut r = Refactoring::new(
                    RefactoringType::ParameterizeVariable,
                    format!(
                        "variable {} parameterized as {} in {}",
                        rep.left_text, pname, ex_label
                    ),
                );
                r.mappings.push(MappingRecord {
                    kind: MappingKind::Declaration,
                    left: Loc { file: p.left.file, node: ldecl },
                    right: Loc { file: ex.loc.file, node: svd },
                });
                for mm2 in &inst.maps {
                    for rep2 in &mm2.replacements {
                        if rep2.kind == ReplacementKind::VariableRename
                            && rep2.left_text == rep.left_text
                            && rep2.right_text == pname
                        {
                            r.mappings.push(MappingRecord {
                                kind: MappingKind::SubExpression,
                                left: Loc { file: p.left.file, node: rep2.left },
                                right: Loc { file: ex.loc.file, node: rep2.right },
                            });
                        }
                    }
                }
                out.push(r);
            }
        }
        // A local kept under its own name whose declaration did not survive
        // in the origin.
        if let Some(ldecl) = local_decl_node(lt, lb, &pname) {
            let survives_in_origin =
                rb.is_some_and(|rbb| local_decl_node(rt, rbb, &pname).is_some());
            let referenced = inst.maps.iter().any(|mm| {
                lt.subtree(mm.left)
                    .any(|n| lt.label(n) == tax::SIMPLE_NAME && lt.value(n) == pname)
            });
            if !survives_in_origin && referenced && claims.insert((pname.clone(), pname.clone())) {
                let mut r = Refactoring::new(
                    RefactoringType::ParameterizeVariable,
                    format!("variable {} parameterized as {} in {}", pname, pname, ex_label),
                );
                r.mappings.push(MappingRecord {
                    kind: MappingKind::Declaration,
                    left: Loc { file: p.left.file, node: ldecl },
                    right: Loc { file: ex.loc.file, node: svd },
                });
                out.push(r);
            }
        }
    }
    (out, claims)
}

// ---------------------------------------------------------------------------
// Variable-level detection
// ---------------------------------------------------------------------------

/// One scope pair searched for variable refactorings: a mapped declaration
/// pair's bodies, or the origin/target bodies of an extraction or inlining
/// instance.
struct VarContainer<'x> {
    lt: &'x AstTree,
    rt: &'x AstTree,
    lfile: usize,
    rfile: usize,
    lscope: NodeId,
    rscope: NodeId,
    ltype: Option<NodeId>,
    rtype: Option<NodeId>,
    lparams: Vec<(String, NodeId)>,
    rparams: Vec<(String, NodeId)>,
    owner: String,
    maps: Vec<StatementMapping>,
    /// Parameter renames are reported only for declaration pairs; inside an
    /// extraction the parameter binding is a Parameterize Variable concern.
    allow_param_renames: bool,
    /// `(old name, new name)` pairs already explained by another detection.
    claimed: BTreeSet<(String, String)>,
}

fn decl_container<'x>(m: &'x DeclMatcher, pi: usize) -> Option<VarContainer<'x>> {
    let p = &m.pairs[pi];
    if !matches!(p.kind, DeclKind::Method | DeclKind::Initializer)
        || p.statement_mappings.is_empty()
    {
        return None;
    }
    let lt = m.ltree(p.left.file);
    let rt = m.rtree(p.right.file);
    let lscope = body_of(lt, p.left.node)?;
    let rscope = body_of(rt, p.right.node)?;
    let owner = m
        .right_member(p.right)
        .or_else(|| m.left_member(p.left))
        .map(member_label)
        .unwrap_or_default();
    Some(VarContainer {
        lt,
        rt,
        lfile: p.left.file,
        rfile: p.right.file,
        lscope,
        rscope,
        ltype: enclosing_type_node(lt, p.left.node),
        rtype: enclosing_type_node(rt, p.right.node),
        lparams: params_of(lt, p.left.node),
        rparams: params_of(rt, p.right.node),
        owner,
        maps: p.statement_mappings.clone(),
        allow_param_renames: true,
        claimed: BTreeSet::new(),
    })
}

fn instance_container<'x>(
    m: &'x DeclMatcher,
    inst: &OwnedInstance,
    claimed: BTreeSet<(String, String)>,
) -> Option<VarContainer<'x>> {
    let t = instance_trees(m, inst)?;
    let p = &m.pairs[inst.origin_pair];
    let (owner, ltype, rtype, lparams, rparams) = if inst.is_extract {
        let ex = &m.right_types[inst.target_type].methods[inst.target_member];
        (
            member_label(ex),
            enclosing_type_node(t.lt, p.left.node),
            Some(m.right_types[inst.target_type].loc.node),
            params_of(t.lt, p.left.node),
            params_of(t.rt, ex.loc.node),
        )
    } else {
        let inl = &m.left_types[inst.target_type].methods[inst.target_member];
        (
            member_label(inl),
            Some(m.left_types[inst.target_type].loc.node),
            enclosing_type_node(t.rt, p.right.node),
            params_of(t.lt, inl.loc.node),
            params_of(t.rt, p.right.node),
        )
    };
    Some(VarContainer {
        lt: t.lt,
        rt: t.rt,
        lfile: t.lfile,
        rfile: t.rfile,
        lscope: t.lscope,
        rscope: t.rscope,
        ltype,
        rtype,
        lparams,
        rparams,
        owner,
        maps: inst.maps.clone(),
        allow_param_renames: false,
        claimed,
    })
}

fn sub_record(c: &VarContainer, left: NodeId, right: NodeId) -> MappingRecord {
    MappingRecord {
        kind: MappingKind::SubExpression,
        left: Loc { file: c.lfile, node: left },
        right: Loc { file: c.rfile, node: right },
    }
}

fn detect_in_container(c: &VarContainer) -> Vec<Refactoring> {
    let mut out = Vec::new();
    let claimed_pairs = c.claimed.clone();
    let mut claimed_left: BTreeSet<String> = BTreeSet::new();
    let mut claimed_right: BTreeSet<String> = BTreeSet::new();

    // Extract Variable / Extract Field: a right-side name stands in for a
    // left expression and is declared in the new body (or type) with that
    // very expression as its initializer.
    let mut seen_new: BTreeSet<(String, NodeId)> = BTreeSet::new();
    for mm in &c.maps {
        for rep in &mm.replacements {
            if c.rt.label(rep.right) != tax::SIMPLE_NAME || rep.left_text == rep.right_text {
                continue;
            }
            let name = rep.right_text.clone();
            let local = decl_with_init(c.rt, c.rscope, &name)
                .filter(|&(_, init)| pretty(c.rt, init) == rep.left_text);
            if let Some((_, init)) = local {
                let already_left = decl_with_init(c.lt, c.lscope, &name)
                    .is_some_and(|(_, li)| pretty(c.lt, li) == rep.left_text);
                if already_left {
                    continue;
                }
                claimed_left.insert(rep.left_text.clone());
                claimed_right.insert(name.clone());
                if seen_new.insert((name.clone(), init)) {
                    let mut r = Refactoring::new(
                        RefactoringType::ExtractVariable,
                        format!(
                            "variable {} extracted from {} in {}",
                            name, rep.left_text, c.owner
                        ),
                    );
                    r.mappings.push(sub_record(c, rep.left, init));
                    out.push(r);
                }
                continue;
            }
            let Some(rtype) = c.rtype else { continue };
            let field = field_fragment_with_init(c.rt, rtype, &name)
                .filter(|&(_, init)| pretty(c.rt, init) == rep.left_text);
            if let Some((_, init)) = field {
                if c.ltype.is_some_and(|lty| field_named(c.lt, lty, &name)) {
                    continue;
                }
                claimed_left.insert(rep.left_text.clone());
                claimed_right.insert(name.clone());
                if seen_new.insert((name.clone(), init)) {
                    let mut r = Refactoring::new(
                        RefactoringType::ExtractField,
                        format!("field {} extracted from {} in {}", name, rep.left_text, c.owner),
                    );
                    r.mappings.push(sub_record(c, rep.left, init));
                    out.push(r);
                }
            }
        }
    }

    // Inline Variable / Inline Field: mirrored.
    let mut seen_gone: BTreeSet<(String, NodeId)> = BTreeSet::new();
    for mm in &c.maps {
        for rep in &mm.replacements {
            if c.lt.label(rep.left) != tax::SIMPLE_NAME || rep.left_text == rep.right_text {
                continue;
            }
            let name = rep.left_text.clone();
            let local = decl_with_init(c.lt, c.lscope, &name)
                .filter(|&(_, init)| pretty(c.lt, init) == rep.right_text);
            if let Some((_, init)) = local {
                let already_right = decl_with_init(c.rt, c.rscope, &name)
                    .is_some_and(|(_, ri)| pretty(c.rt, ri) == rep.right_text);
                if already_right {
                    continue;
                }
                claimed_left.insert(name.clone());
                claimed_right.insert(rep.right_text.clone());
                if seen_gone.insert((name.clone(), init)) {
                    let mut r = Refactoring::new(
                        RefactoringType::InlineVariable,
                        format!(
                            "variable {} inlined into {} in {}",
                            name, rep.right_text, c.owner
                        ),
                    );
                    r.mappings.push(sub_record(c, init, rep.right));
                    out.push(r);
                }
                continue;
            }
            let Some(ltype) = c.ltype else { continue };
            let field = field_fragment_with_init(c.lt, ltype, &name)
                .filter(|&(_, init)| pretty(c.lt, init) == rep.right_text);
            if let Some((_, init)) = field {
                if c.rtype.is_some_and(|rty| field_named(c.rt, rty, &name)) {
                    continue;
                }
                claimed_left.insert(name.clone());
                claimed_right.insert(rep.right_text.clone());
                if seen_gone.insert((name.clone(), init)) {
                    let mut r = Refactoring::new(
                        RefactoringType::InlineField,
                        format!("field {} inlined into {} in {}", name, rep.right_text, c.owner),
                    );
                    r.mappings.push(sub_record(c, init, rep.right));
                    out.push(r);
                }
            }
        }
    }

    // Renames: a name substitution is a rename only with zero
    // counterexamples in the container scope (no occurrence maps the old
    // name to anything else, nothing else maps to the new name).
    let mut fwd: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut rev: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for mm in &c.maps {
        for rep in &mm.replacements {
            if rep.kind != ReplacementKind::VariableRename
                || c.lt.label(rep.left) != tax::SIMPLE_NAME
                || c.rt.label(rep.right) != tax::SIMPLE_NAME
                || rep.left_text == rep.right_text
            {
                continue;
            }
            if claimed_pairs.contains(&(rep.left_text.clone(), rep.right_text.clone()))
                || claimed_left.contains(&rep.left_text)
                || claimed_right.contains(&rep.right_text)
            {
                continue;
            }
            *fwd.entry(rep.left_text.clone())
                .or_default()
                .entry(rep.right_text.clone())
                .or_insert(0) += 1;
            *rev.entry(rep.right_text.clone())
                .or_default()
                .entry(rep.left_text.clone())
                .or_insert(0) += 1;
        }
    }
    for (a, targets) in &fwd {
        if targets.len() != 1 {
            continue;
        }
        let b = targets.keys().next().unwrap();
        if rev.get(b).map_or(0, |s| s.len()) != 1 {
            continue;
        }
        let lp = c.lparams.iter().find(|(n, _)| n == a);
        let rp = c.rparams.iter().find(|(n, _)| n == b);
        let (tag, noun, ldecl, rdecl) = match (lp, rp) {
            (Some(&(_, lsvd)), Some(&(_, rsvd))) => {
                if !c.allow_param_renames {
                    continue;
                }
                (RefactoringType::RenameParameter, "parameter", lsvd, rsvd)
            }
            (None, None) => {
                match (local_decl_node(c.lt, c.lscope, a), local_decl_node(c.rt, c.rscope, b)) {
                    (Some(ld), Some(rd)) => (RefactoringType::RenameVariable, "variable", ld, rd),
                    _ => continue,
                }
            }
            _ => continue,
        };
        let mut r = Refactoring::new(
            tag,
            format!("{} {} renamed to {} in {}", noun, a, b, c.owner),
        );
        r.mappings.push(MappingRecord {
            kind: MappingKind::Declaration,
            left: Loc { file: c.lfile, node: ldecl },
            right: Loc { file: c.rfile, node: rdecl },
        });
        for mm in &c.maps {
            for rep in &mm.replacements {
                if rep.kind == ReplacementKind::VariableRename
                    && rep.left_text == *a
                    && rep.right_text == *b
                {
                    r.mappings.push(sub_record(c, rep.left, rep.right));
                }
            }
        }
        out.push(r);
    }

    // Change Variable Type from type-change replacements. Union types are
    // excluded: they belong to merged catch blocks.
    let mut seen_types: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for mm in &c.maps {
        for rep in &mm.replacements {
            if rep.kind != ReplacementKind::TypeChange
                || c.rt.label(rep.right) == tax::UNION_TYPE
                || c.lt.label(rep.left) == tax::UNION_TYPE
            {
                continue;
            }
            let Some(ld) = enclosing_var_decl(c.lt, c.lscope, rep.left) else { continue };
            let Some(rd) = enclosing_var_decl(c.rt, c.rscope, rep.right) else { continue };
            if !seen_types.insert((ld, rd)) {
                continue;
            }
            let name = declared_name(c.rt, rd);
            let mut r = Refactoring::new(
                RefactoringType::ChangeVariableType,
                format!(
                    "type of {} changed from {} to {} in {}",
                    name, rep.left_text, rep.right_text, c.owner
                ),
            );
            r.mappings.push(MappingRecord {
                kind: MappingKind::Declaration,
                left: Loc { file: c.lfile, node: ld },
                right: Loc { file: c.rfile, node: rd },
            });
            r.mappings.push(sub_record(c, rep.left, rep.right));
            out.push(r);
        }
    }
    out
}

/// Merged catch blocks and consolidated conditional fragments inside one
/// declaration pair's mapping.
fn structural_in_container(c: &VarContainer) -> Vec<Refactoring> {
    let mut out = Vec::new();
    for mm in &c.maps {
        if c.lt.label(mm.left) == tax::TRY_STATEMENT && c.rt.label(mm.right) == tax::TRY_STATEMENT
        {
            if let Some(r) = merge_catch_for_try(c, mm.left, mm.right) {
                out.push(r);
            }
        }
    }
    let mut groups: BTreeMap<u32, Vec<&StatementMapping>> = BTreeMap::new();
    for mm in &c.maps {
        if let Some(g) = mm.multi_group {
            groups.entry(g).or_default().push(mm);
        }
    }
    for group in groups.into_values() {
        if group.len() < 2 {
            continue;
        }
        let mut r = Refactoring::new(
            RefactoringType::ConsolidateDuplicateConditionalFragments,
            format!("duplicate conditional fragments consolidated in {}", c.owner),
        );
        for mm in group {
            r.mappings.push(MappingRecord {
                kind: MappingKind::Multi,
                left: Loc { file: c.lfile, node: mm.left },
                right: Loc { file: c.rfile, node: mm.right },
            });
        }
        out.push(r);
    }
    out
}

/// Several left catch clauses folded into one right clause with a union
/// type. Every left exception type must find its member in the union;
/// otherwise the try pair is not a merge.
fn merge_catch_for_try(c: &VarContainer, l_try: NodeId, r_try: NodeId) -> Option<Refactoring> {
    let lcatches: Vec<NodeId> = c
        .lt
        .children(l_try)
        .iter()
        .copied()
        .filter(|&n| c.lt.label(n) == tax::CATCH_CLAUSE)
        .collect();
    let rcatches: Vec<NodeId> = c
        .rt
        .children(r_try)
        .iter()
        .copied()
        .filter(|&n| c.rt.label(n) == tax::CATCH_CLAUSE)
        .collect();
    if lcatches.len() < 2 || rcatches.len() != 1 {
        return None;
    }
    let rc = rcatches[0];
    let rsvd = c
        .rt
        .children(rc)
        .iter()
        .copied()
        .find(|&n| c.rt.label(n) == tax::SINGLE_VARIABLE_DECLARATION)?;
    let union = c
        .rt
        .children(rsvd)
        .iter()
        .copied()
        .find(|&n| c.rt.label(n) == tax::UNION_TYPE)?;
    let members: Vec<NodeId> = c.rt.children(union).to_vec();
    let rbody = c.rt.children(rc).iter().copied().find(|&n| c.rt.label(n) == tax::BLOCK)?;
    let mut recs = Vec::new();
    for &lc in &lcatches {
        let lsvd = c
            .lt
            .children(lc)
            .iter()
            .copied()
            .find(|&n| c.lt.label(n) == tax::SINGLE_VARIABLE_DECLARATION)?;
        let lty =
            c.lt.children(lsvd).iter().copied().find(|&n| tax::is_type_label(c.lt.label(n)))?;
        let lty_text = pretty(c.lt, lty);
        let member = members.iter().copied().find(|&u| pretty(c.rt, u) == lty_text)?;
        recs.push(sub_record(c, lty, member));
        recs.push(MappingRecord {
            kind: MappingKind::Multi,
            left: Loc { file: c.lfile, node: lc },
            right: Loc { file: c.rfile, node: rc },
        });
        let lbody = c.lt.children(lc).iter().copied().find(|&n| c.lt.label(n) == tax::BLOCK)?;
        let ctx = MappingContext::new(c.lt, lbody, c.rt, rbody);
        let set = map_statements(&ctx, &statements_in(c.lt, lbody), &statements_in(c.rt, rbody));
        for mm in &set.mappings {
            recs.push(MappingRecord {
                kind: MappingKind::Multi,
                left: Loc { file: c.lfile, node: mm.left },
                right: Loc { file: c.rfile, node: mm.right },
            });
        }
    }
    let mut r = Refactoring::new(
        RefactoringType::MergeCatch,
        format!("{} catch clauses merged in {}", lcatches.len(), c.owner),
    );
    r.mappings = recs;
    Some(r)
}

/// Paired fields of one class diff whose declared types render differently.
fn field_type_changes(m: &DeclMatcher, d: &ClassDiff) -> Vec<Refactoring> {
    let lt = m.ltree(d.left_type.file);
    let rt = m.rtree(d.right_type.file);
    let mut out = Vec::new();
    for p in &m.pairs {
        if p.kind != DeclKind::Field {
            continue;
        }
        if p.left.file != d.left_type.file
            || !lt.is_descendant_of(p.left.node, d.left_type.node)
            || p.right.file != d.right_type.file
            || !rt.is_descendant_of(p.right.node, d.right_type.node)
        {
            continue;
        }
        let Some(lty) =
            lt.children(p.left.node).iter().copied().find(|&n| tax::is_type_label(lt.label(n)))
        else {
            continue;
        };
        let Some(rty) =
            rt.children(p.right.node).iter().copied().find(|&n| tax::is_type_label(rt.label(n)))
        else {
            continue;
        };
        let (ltxt, rtxt) = (pretty(lt, lty), pretty(rt, rty));
        if ltxt == rtxt {
            continue;
        }
        let name = m
            .right_member(p.right)
            .map(|mem| mem.signature.qualified_name.clone())
            .unwrap_or_default();
        let mut r = Refactoring::new(
            RefactoringType::ChangeVariableType,
            format!("type of field {} changed from {} to {}", name, ltxt, rtxt),
        );
        r.mappings.push(MappingRecord {
            kind: MappingKind::Declaration,
            left: p.left,
            right: p.right,
        });
        r.mappings.push(MappingRecord {
            kind: MappingKind::SubExpression,
            left: Loc { file: p.left.file, node: lty },
            right: Loc { file: p.right.file, node: rty },
        });
        out.push(r);
    }
    out
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

fn finalize(mut out: Vec<Refactoring>) -> Vec<Refactoring> {
    out.sort_by(|a, b| {
        a.type_tag
            .cmp(&b.type_tag)
            .then_with(|| {
                let al = a.mappings.first().map(|r| (r.left, r.right));
                let bl = b.mappings.first().map(|r| (r.left, r.right));
                al.cmp(&bl)
            })
            .then_with(|| a.description.cmp(&b.description))
    });
    out.dedup_by(|a, b| {
        a.type_tag == b.type_tag && a.description == b.description && a.mappings == b.mappings
    });
    out
}

/// Runs the statement-level detection suite over a matched commit:
/// extract/inline method instances with duplicate resolution, parameterized,
/// extracted, inlined, and renamed variables, variable and field type
/// changes, merged catch blocks, and consolidated conditional fragments.
/// Origin mappings that lose duplicated statements to an extraction or
/// inlining are removed from the declaration pairs in place.
pub fn detect_operations(m: &mut DeclMatcher) -> Vec<Refactoring> {
    let mut instances: Vec<OwnedInstance> = Vec::new();
    let mut origin_prunes: Vec<(usize, Vec<usize>)> = Vec::new();
    {
        let mr: &DeclMatcher = m;
        let (rtargets, ltargets) = collect_targets(mr);
        for pi in 0..mr.pairs.len() {
            if !matches!(mr.pairs[pi].kind, DeclKind::Method | DeclKind::Initializer) {
                continue;
            }
            let mut batch = extract_instances(mr, pi, &rtargets);
            batch.extend(inline_instances(mr, pi, &ltargets));
            if batch.is_empty() {
                continue;
            }
            let dead = prune_duplicates(mr, pi, &mut batch);
            if !dead.is_empty() {
                origin_prunes.push((pi, dead));
            }
            instances.extend(batch);
        }
    }
    for (pi, mut dead) in origin_prunes {
        dead.sort_unstable_by(|x, y| y.cmp(x));
        for idx in dead {
            m.pairs[pi].statement_mappings.remove(idx);
        }
    }

    let mr: &DeclMatcher = m;
    let mut out: Vec<Refactoring> = Vec::new();
    let shared = shared_statements(&instances);
    let mut instance_claims: Vec<BTreeSet<(String, String)>> = Vec::new();
    for inst in &instances {
        let mut r = Refactoring::new(inst.tag, instance_description(mr, inst));
        r.mappings = instance_records(mr, inst, &shared);
        r.mappings.extend(instance_subexpressions(mr, inst));
        out.push(r);
        let (pvs, claims) = parameterize_instances(mr, inst);
        out.extend(pvs);
        instance_claims.push(claims);
    }
    for d in &mr.class_diffs {
        out.extend(field_type_changes(mr, d));
    }
    for pi in 0..mr.pairs.len() {
        if let Some(c) = decl_container(mr, pi) {
            out.extend(detect_in_container(&c));
            out.extend(structural_in_container(&c));
        }
    }
    for (inst, claims) in instances.iter().zip(instance_claims) {
        if let Some(c) = instance_container(mr, inst, claims) {
            out.extend(detect_in_container(&c));
        }
    }
    finalize(out)
}

fn detect_for_origin(m: &DeclMatcher, origin: &DeclarationPair, extract: bool) -> Vec<Refactoring> {
    let Some(pi) =
        m.pairs.iter().position(|p| p.left == origin.left && p.right == origin.right)
    else {
        return Vec::new();
    };
    let (rtargets, ltargets) = collect_targets(m);
    let mut batch = if extract {
        extract_instances(m, pi, &rtargets)
    } else {
        inline_instances(m, pi, &ltargets)
    };
    prune_duplicates(m, pi, &mut batch);
    let shared = shared_statements(&batch);
    let mut out = Vec::new();
    for inst in &batch {
        let mut r = Refactoring::new(inst.tag, instance_description(m, inst));
        r.mappings = instance_records(m, inst, &shared);
        r.mappings.extend(instance_subexpressions(m, inst));
        out.push(r);
        out.extend(parameterize_instances(m, inst).0);
    }
    finalize(out)
}

/// Extract Method (and Extract and Move Method) instances whose origin is
/// the given declaration pair, with per-instance Parameterize Variable
/// detections. Does not modify the matcher; use [`detect_operations`] for
/// commit-wide detection with duplicate pruning applied to the pairs.
pub fn detect_extract_method(m: &DeclMatcher, origin: &DeclarationPair) -> Vec<Refactoring> {
    detect_for_origin(m, origin, true)
}

/// Inline Method (and Move and Inline Method) instances whose origin is the
/// given declaration pair.
pub fn detect_inline_method(m: &DeclMatcher, origin: &DeclarationPair) -> Vec<Refactoring> {
    detect_for_origin(m, origin, false)
}

/// Variable refactorings for one matched class: extracted, inlined, and
/// renamed variables and parameters, variable type changes inside mapped
/// method bodies, and field type changes.
pub fn detect_variable_refactorings(m: &DeclMatcher, diff: &ClassDiff) -> Vec<Refactoring> {
    let mut out = field_type_changes(m, diff);
    let lt = m.ltree(diff.left_type.file);
    let rt = m.rtree(diff.right_type.file);
    for (pi, p) in m.pairs.iter().enumerate() {
        if !matches!(p.kind, DeclKind::Method | DeclKind::Initializer) {
            continue;
        }
        if p.left.file != diff.left_type.file
            || !lt.is_descendant_of(p.left.node, diff.left_type.node)
            || p.right.file != diff.right_type.file
            || !rt.is_descendant_of(p.right.node, diff.right_type.node)
        {
            continue;
        }
        if let Some(c) = decl_container(m, pi) {
            out.extend(detect_in_container(&c));
        }
    }
    finalize(out)
}

/// Merge Catch instances inside one declaration pair's statement mapping.
pub fn detect_merge_catch(m: &DeclMatcher, origin: &DeclarationPair) -> Vec<Refactoring> {
    let Some(pi) =
        m.pairs.iter().position(|p| p.left == origin.left && p.right == origin.right)
    else {
        return Vec::new();
    };
    let Some(c) = decl_container(m, pi) else { return Vec::new() };
    let mut out = Vec::new();
    for mm in &c.maps {
        if c.lt.label(mm.left) == tax::TRY_STATEMENT && c.rt.label(mm.right) == tax::TRY_STATEMENT
        {
            if let Some(r) = merge_catch_for_try(&c, mm.left, mm.right) {
                out.push(r);
            }
        }
    }
    out
}

/// The sub-expression node pairs contributed by a refactoring (extracted or
/// inlined initializers, renamed occurrences, arguments bound to
/// parameters, exception types in a merged catch).
pub fn subexpression_mappings(r: &Refactoring) -> Vec<(Loc, Loc)> {
    r.mappings
        .iter()
        .filter(|rec| rec.kind == MappingKind::SubExpression)
        .map(|rec| (rec.left, rec.right))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_render_with_spaces() {
        assert_eq!(RefactoringType::RenameMethod.to_string(), "Rename Method");
        assert_eq!(RefactoringType::MoveAndRenameClass.to_string(), "Move and Rename Class");
        assert_eq!(RefactoringType::PullUpMethod.to_string(), "Pull Up Method");
        assert_eq!(
            RefactoringType::ConsolidateDuplicateConditionalFragments.to_string(),
            "Consolidate Duplicate Conditional Fragments"
        );
        assert_eq!(MappingKind::InterFileMove.to_string(), "inter-file-move");
    }

    use crate::decl::SourceFile;
    use crate::java::parse_java;

    fn file(path: &str, src: &str) -> SourceFile {
        SourceFile { path: path.to_string(), tree: parse_java(src).expect("fixture parses").tree }
    }

    fn matched<'a>(left: &'a [SourceFile], right: &'a [SourceFile]) -> DeclMatcher<'a> {
        let mut m = DeclMatcher::new(left, right);
        m.phase1_identical();
        m.phase2_changed_signatures();
        m.phase3_types();
        m.phase4_moved_members();
        m
    }

    fn tags(ops: &[Refactoring]) -> Vec<RefactoringType> {
        ops.iter().map(|r| r.type_tag).collect()
    }

    fn kinds(r: &Refactoring) -> Vec<MappingKind> {
        r.mappings.iter().map(|rec| rec.kind).collect()
    }

    fn method_pair<'m>(m: &'m DeclMatcher, name: &str) -> &'m DeclarationPair {
        m.pairs
            .iter()
            .find(|p| {
                p.kind == DeclKind::Method
                    && m.left_member(p.left).is_some_and(|mem| mem.signature.name == name)
            })
            .expect("method pair exists")
    }

    #[test]
    fn extract_method_single_call_site() {
        let left = [file(
            "W.java",
            "class W { void run() { start(); int v = load(); store(v); finish(); } }",
        )];
        let right = [file(
            "W.java",
            "class W { void run() { start(); helper(); finish(); } \
             void helper() { int v = load(); store(v); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::ExtractMethod]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::IntraFileMove, MappingKind::IntraFileMove]);
        assert_eq!(ops[0].description, "W.helper() extracted from W.run()");
        // The origin keeps its own surviving mappings: start and finish.
        assert_eq!(method_pair(&m, "run").statement_mappings.len(), 2);
    }

    #[test]
    fn extract_called_twice_forms_multi_mappings() {
        let left = [file(
            "B.java",
            "class B { void job(int k) { prep(); log(k); save(k); mid(); log(k); save(k); done(); } }",
        )];
        let right = [file(
            "B.java",
            "class B { void job(int k) { prep(); flush(); mid(); flush(); done(); } \
             void flush() { log(k); save(k); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(
            tags(&ops),
            vec![RefactoringType::ExtractMethod, RefactoringType::ExtractMethod]
        );
        for op in &ops {
            assert_eq!(kinds(op), vec![MappingKind::Multi, MappingKind::Multi]);
        }
        assert_eq!(method_pair(&m, "job").statement_mappings.len(), 3);
    }

    #[test]
    fn extracted_method_moved_to_other_class() {
        let left =
            [file("A.java", "class A { void m() { read(); int n = calc(); write(n); } }")];
        let right = [
            file("A.java", "class A { void m() { read(); util.work(); } }"),
            file("U.java", "class U { void work() { int n = calc(); write(n); } }"),
        ];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::ExtractAndMoveMethod]);
        assert_eq!(
            kinds(&ops[0]),
            vec![MappingKind::InterFileMove, MappingKind::InterFileMove]
        );
        assert_eq!(ops[0].description, "U.work() extracted from A.m()");
    }

    #[test]
    fn inline_method_restores_statements() {
        let left = [file(
            "W.java",
            "class W { void run() { start(); helper(); finish(); } \
             void helper() { int v = load(); store(v); } }",
        )];
        let right = [file(
            "W.java",
            "class W { void run() { start(); int v = load(); store(v); finish(); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::InlineMethod]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::IntraFileMove, MappingKind::IntraFileMove]);
        assert_eq!(ops[0].description, "W.helper() inlined into W.run()");
        // The origin's replacement-based mapping of the call statement onto
        // store(v) loses the duplicate against the inlined statements.
        assert_eq!(method_pair(&m, "run").statement_mappings.len(), 2);
    }

    #[test]
    fn argument_bound_to_parameter_yields_subexpression() {
        let left = [file("D.java", "class D { void m() { handle(dir.get()); } }")];
        let right = [file(
            "D.java",
            "class D { void m() { handleDir(dir.get()); } \
             void handleDir(File dir) { handle(dir); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::ExtractMethod]);
        assert_eq!(
            kinds(&ops[0]),
            vec![MappingKind::IntraFileMove, MappingKind::SubExpression]
        );
        assert_eq!(subexpression_mappings(&ops[0]).len(), 1);
        // The rename-only origin mapping loses to the extraction instance.
        assert!(method_pair(&m, "m").statement_mappings.is_empty());
    }

    #[test]
    fn parameterize_variable_when_local_becomes_parameter() {
        let left = [file(
            "P.java",
            "class P { void m() { File f = root.resolve(); load(f); done(); } }",
        )];
        let right = [file(
            "P.java",
            "class P { void m() { doLoad(root.resolve()); done(); } \
             void doLoad(File f) { load(f); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(
            tags(&ops),
            vec![RefactoringType::ExtractMethod, RefactoringType::ParameterizeVariable]
        );
        let pv = &ops[1];
        assert_eq!(kinds(pv), vec![MappingKind::Declaration]);
        let rec = pv.mappings[0];
        let (lt, rt) = (m.ltree(rec.left.file), m.rtree(rec.right.file));
        assert_eq!(lt.label(rec.left.node), tax::VARIABLE_DECLARATION_FRAGMENT);
        assert_eq!(rt.label(rec.right.node), tax::SINGLE_VARIABLE_DECLARATION);
    }

    #[test]
    fn rename_variable_needs_consistent_replacements() {
        let left = [file(
            "R.java",
            "class R { void m() { int obj = get(); use(obj); log(obj); } }",
        )];
        let right = [file(
            "R.java",
            "class R { void m() { int item = get(); use(item); log(item); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::RenameVariable]);
        assert_eq!(
            kinds(&ops[0]),
            vec![
                MappingKind::Declaration,
                MappingKind::SubExpression,
                MappingKind::SubExpression,
                MappingKind::SubExpression
            ]
        );
        assert_eq!(ops[0].description, "variable obj renamed to item in R.m()");
    }

    #[test]
    fn rename_with_counterexample_is_suppressed() {
        let left = [file(
            "R.java",
            "class R { void m() { int obj = 0; a = obj; b = obj; } }",
        )];
        let right = [file(
            "R.java",
            "class R { void m() { int item = 0; a = item; b = other; } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert!(
            !tags(&ops).contains(&RefactoringType::RenameVariable),
            "obj maps to both item and other: {:?}",
            tags(&ops)
        );
    }

    #[test]
    fn rename_parameter_pairs_declarations() {
        let left = [file("N.java", "class N { void m(int count) { use(count); } }")];
        let right = [file("N.java", "class N { void m(int total) { use(total); } }")];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::RenameParameter]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::Declaration, MappingKind::SubExpression]);
        let rec = ops[0].mappings[0];
        assert_eq!(m.ltree(0).label(rec.left.node), tax::SINGLE_VARIABLE_DECLARATION);
        assert_eq!(m.rtree(0).label(rec.right.node), tax::SINGLE_VARIABLE_DECLARATION);
    }

    #[test]
    fn extract_variable_records_initializer() {
        let left = [file("E.java", "class E { void m() { send(buildKey(id)); } }")];
        let right = [file(
            "E.java",
            "class E { void m() { String key = buildKey(id); send(key); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::ExtractVariable]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::SubExpression]);
        let (l, r) = subexpression_mappings(&ops[0])[0];
        assert_eq!(pretty(m.ltree(0), l.node), "buildKey(id)");
        assert_eq!(pretty(m.rtree(0), r.node), "buildKey(id)");
        assert_eq!(ops[0].description, "variable key extracted from buildKey(id) in E.m()");
    }

    #[test]
    fn inline_variable_records_initializer() {
        let left = [file(
            "E.java",
            "class E { void m() { String key = buildKey(id); send(key); } }",
        )];
        let right = [file("E.java", "class E { void m() { send(buildKey(id)); } }")];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::InlineVariable]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::SubExpression]);
        let (l, r) = subexpression_mappings(&ops[0])[0];
        assert_eq!(pretty(m.ltree(0), l.node), "buildKey(id)");
        assert_eq!(pretty(m.rtree(0), r.node), "buildKey(id)");
    }

    #[test]
    fn change_variable_type_pairs_declarations() {
        let left = [file("T.java", "class T { void m() { int x = f(); use(x); } }")];
        let right = [file("T.java", "class T { void m() { long x = f(); use(x); } }")];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::ChangeVariableType]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::Declaration, MappingKind::SubExpression]);
        let rec = ops[0].mappings[0];
        assert_eq!(m.ltree(0).label(rec.left.node), tax::VARIABLE_DECLARATION_STATEMENT);
        assert_eq!(ops[0].description, "type of x changed from int to long in T.m()");
    }

    #[test]
    fn field_type_change_reported_from_class_diff() {
        let left = [file("C.java", "class C { Map options; }")];
        let right = [file("C.java", "class C { Set options; }")];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::ChangeVariableType]);
        assert_eq!(kinds(&ops[0]), vec![MappingKind::Declaration, MappingKind::SubExpression]);
        assert_eq!(ops[0].description, "type of field C.options changed from Map to Set");
    }

    #[test]
    fn merge_catch_builds_union_multi_mappings() {
        let left = [file(
            "M.java",
            "class M { void m() { try { op(); } catch (IOException e) { log(e); } \
             catch (SQLException e) { log(e); } } }",
        )];
        let right = [file(
            "M.java",
            "class M { void m() { try { op(); } catch (IOException | SQLException e) { log(e); } } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(tags(&ops), vec![RefactoringType::MergeCatch]);
        let ks = kinds(&ops[0]);
        assert_eq!(ks.iter().filter(|&&k| k == MappingKind::SubExpression).count(), 2);
        assert_eq!(ks.iter().filter(|&&k| k == MappingKind::Multi).count(), 4);
        assert_eq!(ops[0].description, "2 catch clauses merged in M.m()");
        // Both union members are pinned to the left exception types.
        let subs = subexpression_mappings(&ops[0]);
        let texts: Vec<String> =
            subs.iter().map(|&(l, _)| pretty(m.ltree(0), l.node)).collect();
        assert_eq!(texts, vec!["IOException", "SQLException"]);
    }

    #[test]
    fn consolidate_duplicate_conditional_fragments() {
        let left = [file(
            "F.java",
            "class F { void m() { if (flag) { update(); } else { update(); } done(); } }",
        )];
        let right = [file("F.java", "class F { void m() { update(); done(); } }")];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(
            tags(&ops),
            vec![RefactoringType::ConsolidateDuplicateConditionalFragments]
        );
        assert_eq!(kinds(&ops[0]), vec![MappingKind::Multi, MappingKind::Multi]);
        let pair = method_pair(&m, "m");
        let grouped: Vec<_> =
            pair.statement_mappings.iter().filter(|mm| mm.multi_group.is_some()).collect();
        assert_eq!(grouped.len(), 2);
        assert!(grouped.iter().all(|mm| mm.multi_size == 3));
    }

    #[test]
    fn rename_detected_inside_extracted_method() {
        let left = [file(
            "L.java",
            "class L { void m(List<Item> list) { for (Item obj : list) { use(obj); } end(); } }",
        )];
        let right = [file(
            "L.java",
            "class L { void m(List<Item> list) { iterate(list); end(); } \
             void iterate(List<Item> list) { for (Item item : list) { use(item); } } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert_eq!(
            tags(&ops),
            vec![RefactoringType::ExtractMethod, RefactoringType::RenameVariable]
        );
        let rename = &ops[1];
        assert_eq!(rename.description, "variable obj renamed to item in L.iterate(List<Item>)");
        assert_eq!(
            kinds(rename),
            vec![MappingKind::Declaration, MappingKind::SubExpression, MappingKind::SubExpression]
        );
        let rec = rename.mappings[0];
        assert_eq!(m.ltree(0).label(rec.left.node), tax::SINGLE_VARIABLE_DECLARATION);
        assert_eq!(m.rtree(0).label(rec.right.node), tax::SINGLE_VARIABLE_DECLARATION);
    }

    #[test]
    fn partial_match_is_not_an_extraction() {
        let left = [file("Q.java", "class Q { void m() { start(x); log(a); end(y); } }")];
        let right = [file(
            "Q.java",
            "class Q { void m() { start(x); helper(); end(y); } \
             void helper() { log(a); audit(b); flush(c); } }",
        )];
        let mut m = matched(&left, &right);
        let ops = detect_operations(&mut m);
        assert!(
            !tags(&ops).contains(&RefactoringType::ExtractMethod),
            "one of three statements matching is below the majority threshold: {:?}",
            tags(&ops)
        );
    }

    #[test]
    fn per_origin_entry_points_match_full_detection() {
        let left = [file(
            "W.java",
            "class W { void run() { start(); int v = load(); store(v); finish(); } }",
        )];
        let right = [file(
            "W.java",
            "class W { void run() { start(); helper(); finish(); } \
             void helper() { int v = load(); store(v); } }",
        )];
        let m = matched(&left, &right);
        let origin = method_pair(&m, "run");
        let extracts = detect_extract_method(&m, origin);
        assert_eq!(tags(&extracts), vec![RefactoringType::ExtractMethod]);
        assert!(detect_inline_method(&m, origin).is_empty());
        assert!(detect_merge_catch(&m, origin).is_empty());
        assert!(subexpression_mappings(&extracts[0]).is_empty());

        let lrn = [file(
            "R.java",
            "class R { void m() { int obj = get(); use(obj); } }",
        )];
        let rrn = [file(
            "R.java",
            "class R { void m() { int item = get(); use(item); } }",
        )];
        let m2 = matched(&lrn, &rrn);
        let diff = &m2.class_diffs[0];
        let vars = detect_variable_refactorings(&m2, diff);
        assert_eq!(tags(&vars), vec![RefactoringType::RenameVariable]);
    }
}
