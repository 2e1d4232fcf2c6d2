//! Refactoring-aware AST differencing for a Java subset.
//!
//! The crate computes commit-level AST node mappings that stay accurate in the
//! presence of refactorings: statements moved between methods and files,
//! duplicated fragments consolidated into one location, renamed elements, and
//! sub-expressions migrating into extracted variables or call-site arguments.
//! Matching is driven by textual statement comparison under a closed set of
//! replacement kinds rather than by tree topology alone, so mappings can be
//! one-to-many or many-to-one where the code genuinely flowed that way.
//!
//! Alongside the full engine ([`engine::Engine::SemDiff`]) the crate ships
//! classic top-down/bottom-up tree matchers ([`gumtree`]) in greedy and simple
//! variants, optional fine-grained leaf relabeling, and a staged cross-file
//! phase, plus a benchmark harness ([`bench`]) that loads hand-made ground
//! truth, scores tool output (precision/recall/F-score over mapping sets), and
//! audits mappings for language-semantics violations.
//!
//! The `examples/` directory is the front door: each example is a small
//! runnable scenario (extract-method multi-mappings, conditional
//! consolidation, import grouping, cross-file moves, baseline comparisons,
//! edit-script replay, metric evaluation, HTML reports). A thin `semdiff`
//! binary exposes the same capabilities as `diff`, `eval`, `parse`, and
//! `report` subcommands.

pub mod bench;
pub mod cli;
pub mod compose;
pub mod decl;
pub mod engine;
pub mod gumtree;
pub mod html;
pub mod java;
pub mod refactor;
pub mod stmt;
pub mod taxonomy;
pub mod tree;
