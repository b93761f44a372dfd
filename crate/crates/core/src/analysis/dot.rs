use std::fmt::{Display, Write};

use crate::observe::Observer;
use crate::tree::{Dir, Tree};

/// Graphviz rendering: one line per node (labelled `key` and `weight`), then
/// one line per edge.
pub fn to_dot<K: Ord + Display, O: Observer>(tree: &Tree<K, O>) -> String {
    let mut out = String::from("digraph gcbtree {\n  node [shape=circle];\n");
    let mut ids = Vec::new();
    let mut stack: Vec<_> = tree.root().into_iter().collect();
    while let Some(id) = stack.pop() {
        ids.push(id);
        for dir in [Dir::Right, Dir::Left] {
            if let Some(c) = tree.child(id, dir) {
                stack.push(c);
            }
        }
    }
    for &id in &ids {
        let _ = writeln!(
            out,
            "  n{} [label=\"{}\\n{}\"];",
            id.index(),
            tree.key(id),
            tree.node_weight(Some(id))
        );
    }
    for &id in &ids {
        for (dir, tag) in [(Dir::Left, "L"), (Dir::Right, "R")] {
            if let Some(c) = tree.child(id, dir) {
                let _ = writeln!(out, "  n{} -> n{} [taillabel=\"{tag}\"];", id.index(), c.index());
            }
        }
    }
    out.push_str("}\n");
    out
}
