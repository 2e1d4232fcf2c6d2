//! Static side-by-side HTML reports of a commit diff.
//!
//! One self-contained document per commit: each touched file renders as two
//! aligned source panes where every mapped region carries an anchor (`id`)
//! and the ids of its counterparts (`data-peer`), so clicking a region
//! highlights its partner(s). Regions participating in one-to-many or
//! many-to-one mappings and regions moving between files get extra classes.
//! Only mapped nodes are referenced; deleted and added code stays plain
//! text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::decl::SourceFile;
use crate::engine::{CommitDiff, CommitSource};
use crate::tree::{AstTree, NodeId, NodeRef};

fn escape_into(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
}

fn escaped(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    escape_into(&mut out, s);
    out
}

/// Display state of one mapped node in a pane.
#[derive(Default)]
struct Anchor {
    dom_id: String,
    peers: Vec<String>,
    multi: bool,
    inter: bool,
}

type SideIndex = BTreeMap<NodeRef, (usize, NodeId)>;
type AnchorMap = BTreeMap<(usize, NodeId), Anchor>;

fn side_index(files: &[SourceFile]) -> SideIndex {
    let mut map = SideIndex::new();
    for (fi, f) in files.iter().enumerate() {
        for n in f.tree.preorder() {
            map.insert(
                NodeRef::new(&f.path, f.tree.label(n), f.tree.span(n)),
                (fi, n),
            );
        }
    }
    map
}

fn dom_id(side: char, file: usize, node: NodeId) -> String {
    format!("{side}{file}-{}", node.index())
}

fn build_anchors(diff: &CommitDiff, lindex: &SideIndex, rindex: &SideIndex) -> (AnchorMap, AnchorMap) {
    let mut left = AnchorMap::new();
    let mut right = AnchorMap::new();
    for (l, r) in diff.store.iter() {
        let (Some(&(lf, ln)), Some(&(rf, rn))) = (lindex.get(l), rindex.get(r)) else {
            continue;
        };
        let multi = diff.store.rights_of(l).count() > 1 || diff.store.lefts_of(r).count() > 1;
        let inter = l.file != r.file;
        let la = left.entry((lf, ln)).or_insert_with(|| Anchor {
            dom_id: dom_id('L', lf, ln),
            ..Anchor::default()
        });
        la.peers.push(dom_id('R', rf, rn));
        la.multi |= multi;
        la.inter |= inter;
        let ra = right.entry((rf, rn)).or_insert_with(|| Anchor {
            dom_id: dom_id('R', rf, rn),
            ..Anchor::default()
        });
        ra.peers.push(dom_id('L', lf, ln));
        ra.multi |= multi;
        ra.inter |= inter;
    }
    (left, right)
}

fn emit_text(out: &mut String, text: &str, from: usize, to: usize) {
    if to > from {
        if let Some(s) = text.get(from..to) {
            escape_into(out, s);
        }
    }
}

fn emit_node(
    out: &mut String,
    tree: &AstTree,
    n: NodeId,
    text: &str,
    file: usize,
    anchors: &AnchorMap,
    cursor: &mut usize,
) {
    let span = tree.span(n);
    if span.start > *cursor {
        emit_text(out, text, *cursor, span.start);
        *cursor = span.start;
    }
    let anchor = anchors.get(&(file, n));
    if let Some(a) = anchor {
        let mut class = String::from("m");
        if a.multi {
            class.push_str(" multi");
        }
        if a.inter {
            class.push_str(" inter");
        }
        let _ = write!(
            out,
            "<span id=\"{}\" class=\"{}\" data-peer=\"{}\">",
            a.dom_id,
            class,
            a.peers.join(" ")
        );
    }
    for &c in tree.children(n) {
        emit_node(out, tree, c, text, file, anchors, cursor);
    }
    let end = span.end.min(text.len());
    if end > *cursor {
        emit_text(out, text, *cursor, end);
        *cursor = end;
    }
    if anchor.is_some() {
        out.push_str("</span>");
    }
}

fn emit_pane(out: &mut String, side: &CommitSource, file: usize, anchors: &AnchorMap) {
    let tree = &side.files[file].tree;
    let text = &side.texts[file];
    out.push_str("<pre class=\"pane\">");
    let mut cursor = 0usize;
    emit_node(out, tree, tree.root(), text, file, anchors, &mut cursor);
    emit_text(out, text, cursor, text.len());
    out.push_str("</pre>");
}

const STYLE: &str = "\
body { font-family: -apple-system, 'Segoe UI', sans-serif; margin: 1.5rem; color: #212121; }
h1 { font-size: 1.4rem; }
h2 { font-size: 1.05rem; border-bottom: 1px solid #ddd; padding-bottom: .2rem; margin-top: 2rem; }
.summary td, .summary th { padding: .1rem .6rem .1rem 0; text-align: left; }
.refactorings li { margin: .15rem 0; }
.panes { display: flex; gap: 1rem; align-items: flex-start; }
.pane { flex: 1; min-width: 0; overflow-x: auto; background: #f7f7f7; padding: .75rem;
        border-radius: 6px; font-size: 13px; line-height: 1.5; }
.pane.missing { background: none; color: #999; font-style: italic; }
.m { background: rgba(46, 125, 50, .10); border-radius: 2px; }
.m.multi { background: rgba(255, 152, 0, .28); }
.m.inter { outline: 1px dashed #7b1fa2; }
.m.sel { background: rgba(25, 118, 210, .40); }
.m.peer-sel { background: rgba(25, 118, 210, .22); }
.legend span { margin-right: 1rem; padding: 0 .35rem; }
";

const SCRIPT: &str = "\
document.addEventListener('click', function (e) {
  var hits = document.querySelectorAll('.sel, .peer-sel');
  for (var i = 0; i < hits.length; i++) hits[i].classList.remove('sel', 'peer-sel');
  var t = e.target.closest ? e.target.closest('.m') : null;
  if (!t) return;
  t.classList.add('sel');
  var peers = (t.getAttribute('data-peer') || '').split(' ');
  for (var j = 0; j < peers.length; j++) {
    var p = peers[j] && document.getElementById(peers[j]);
    if (p) p.classList.add('peer-sel');
  }
});
";

/// Renders the whole commit as one self-contained HTML document. Every
/// anchor and peer reference in the output corresponds to a pair of
/// `diff.store`; files without any mapping are omitted.
pub fn render_report(diff: &CommitDiff, left: &CommitSource, right: &CommitSource) -> String {
    let lindex = side_index(&left.files);
    let rindex = side_index(&right.files);
    let (lanchors, ranchors) = build_anchors(diff, &lindex, &rindex);

    // Files worth a section: everything touched by some group.
    let mut paths: BTreeSet<&str> = BTreeSet::new();
    for g in diff.intra_file.iter().chain(&diff.inter_file) {
        paths.insert(&g.origin);
        paths.insert(&g.destination);
    }

    let multi_pairs = diff
        .store
        .iter()
        .filter(|(l, r)| diff.store.rights_of(l).count() > 1 || diff.store.lefts_of(r).count() > 1)
        .count();
    let inter_pairs: usize = diff.inter_file.iter().map(|g| g.matched_elements.len() + g.mappings.len()).sum();

    let mut out = String::new();
    out.push_str("<!doctype html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = write!(out, "<title>{} diff report</title>\n", escaped(&diff.engine.to_string()));
    let _ = write!(out, "<style>\n{STYLE}</style>\n</head>\n<body>\n");
    let _ = write!(out, "<h1>Commit diff &mdash; engine <code>{}</code></h1>\n", escaped(&diff.engine.to_string()));

    out.push_str("<table class=\"summary\">\n");
    let rows = [
        ("files with mappings", paths.len().to_string()),
        ("node mappings", diff.store.len().to_string()),
        ("multi-mapped pairs", multi_pairs.to_string()),
        ("inter-file pairs", inter_pairs.to_string()),
        ("refactorings", diff.refactorings.len().to_string()),
    ];
    for (k, v) in rows {
        let _ = write!(out, "<tr><th>{k}</th><td>{v}</td></tr>\n");
    }
    out.push_str("</table>\n");
    out.push_str(
        "<p class=\"legend\"><span class=\"m\">mapped</span>\
         <span class=\"m multi\">multi-mapped</span>\
         <span class=\"m inter\">moved across files</span> \
         &mdash; click a region to highlight its counterpart</p>\n",
    );

    if !diff.refactorings.is_empty() {
        out.push_str("<h2>Refactorings</h2>\n<ul class=\"refactorings\">\n");
        for r in &diff.refactorings {
            let _ = write!(out, "<li>{}</li>\n", escaped(&r.description));
        }
        out.push_str("</ul>\n");
    }

    for path in paths {
        let lf = left.files.iter().position(|f| f.path == path);
        let rf = right.files.iter().position(|f| f.path == path);
        let _ = write!(out, "<h2><code>{}</code></h2>\n<div class=\"panes\">\n", escaped(path));
        match lf {
            Some(i) => emit_pane(&mut out, left, i, &lanchors),
            None => out.push_str("<pre class=\"pane missing\">(not present before)</pre>"),
        }
        out.push('\n');
        match rf {
            Some(i) => emit_pane(&mut out, right, i, &ranchors),
            None => out.push_str("<pre class=\"pane missing\">(not present after)</pre>"),
        }
        out.push_str("\n</div>\n");
    }

    let _ = write!(out, "<script>\n{SCRIPT}</script>\n</body>\n</html>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_commit, CommitSource, Engine};
    use crate::gumtree::MatcherConfig;

    fn commit(sources: &[(&str, &str)]) -> CommitSource {
        CommitSource::from_sources(sources).expect("fixture parses")
    }

    /// Every `attr="..."` value of the named attribute, in document order.
    fn attr_values<'a>(html: &'a str, attr: &str) -> Vec<&'a str> {
        let needle = format!("{attr}=\"");
        let mut out = Vec::new();
        let mut rest = html;
        while let Some(i) = rest.find(&needle) {
            rest = &rest[i + needle.len()..];
            let end = rest.find('"').expect("attribute closes");
            out.push(&rest[..end]);
            rest = &rest[end..];
        }
        out
    }

    fn report(left: &[(&str, &str)], right: &[(&str, &str)], engine: Engine) -> (String, usize) {
        let l = commit(left);
        let r = commit(right);
        let diff = run_commit(&l, &r, engine, &engine.matcher_config(None));
        let html = render_report(&diff, &l, &r);
        (html, diff.store.len())
    }

    #[test]
    fn every_peer_reference_resolves_to_an_anchor() {
        let (html, pairs) = report(
            &[("A.java", "class A { void m(int x) { if (x > 0) { run(x); } } }")],
            &[("A.java", "class A { void m(int x) { while (x > 0) { run(x); x = x - 1; } } }")],
            Engine::Semdiff,
        );
        assert!(pairs > 0);
        let ids: BTreeSet<&str> = attr_values(&html, "id").into_iter().collect();
        let peer_lists = attr_values(&html, "data-peer");
        assert!(!peer_lists.is_empty());
        for list in peer_lists {
            for peer in list.split(' ').filter(|p| !p.is_empty()) {
                assert!(ids.contains(peer), "dangling peer reference {peer}");
            }
        }
    }

    #[test]
    fn anchor_count_matches_the_mapped_node_count() {
        let (html, _) = report(
            &[("A.java", "class A { int f; void m() { f = 1; } }")],
            &[("A.java", "class A { int f; void m() { f = 2; } }")],
            Engine::Greedy,
        );
        let ids = attr_values(&html, "id");
        let lefts = ids.iter().filter(|i| i.starts_with('L')).count();
        let rights = ids.iter().filter(|i| i.starts_with('R')).count();
        assert!(lefts > 0);
        // One-to-one store: as many left anchors as right anchors.
        assert_eq!(lefts, rights);
    }

    #[test]
    fn multi_mapped_regions_carry_the_multi_class() {
        // Duplicated extraction: both left statements map onto one right.
        let (html, _) = report(
            &[(
                "A.java",
                "class A { void a() { count += 1; log(count); } void b() { count += 1; warn(count); } }",
            )],
            &[(
                "A.java",
                "class A { void a() { bump(); log(count); } void b() { bump(); warn(count); } void bump() { count += 1; } }",
            )],
            Engine::Semdiff,
        );
        assert!(html.contains("class=\"m multi\""), "expected a multi-tagged region");
    }

    #[test]
    fn cross_file_moves_carry_the_inter_class_and_both_panes_render() {
        let (html, _) = report(
            &[
                ("A.java", "class A { void gone() { total = total + 1; log(total); } void keep() { } }"),
                ("B.java", "class B { }"),
            ],
            &[
                ("A.java", "class A { void keep() { } }"),
                ("B.java", "class B { void gone() { total = total + 1; log(total); } }"),
            ],
            Engine::Semdiff,
        );
        assert!(html.contains(" inter"), "expected inter-tagged regions");
        assert!(html.contains("<code>A.java</code>"));
        assert!(html.contains("<code>B.java</code>"));
    }

    #[test]
    fn source_text_is_escaped() {
        let (html, _) = report(
            &[("A.java", "class A { void m() { if (a < b) { s = \"x&y\"; } } }")],
            &[("A.java", "class A { void m() { if (a < b) { s = \"x&y\"; } } }")],
            Engine::Greedy,
        );
        assert!(html.contains("a &lt; b"));
        assert!(html.contains("&quot;x&amp;y&quot;"));
        // No raw source '<' leaks outside tags: every '<' begins a tag.
        for part in html.split('<').skip(1) {
            let c = part.chars().next().unwrap_or(' ');
            assert!(
                c.is_ascii_alphabetic() || c == '/' || c == '!',
                "raw '<' leaked into text near {:?}",
                &part[..part.len().min(30)]
            );
        }
    }

    #[test]
    fn files_without_mappings_are_omitted() {
        let (html, _) = report(
            &[
                ("A.java", "class A { void m() { a = 1; } }"),
                ("Z.java", "class Z { }"),
            ],
            &[
                ("A.java", "class A { void m() { a = 2; } }"),
                ("Y.java", "class Y { }"),
            ],
            Engine::Greedy,
        );
        assert!(html.contains("<code>A.java</code>"));
        assert!(!html.contains("Z.java"), "unmapped left-only file is omitted");
        assert!(!html.contains("Y.java"), "unmapped right-only file is omitted");
    }
}
