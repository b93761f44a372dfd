use serde::{Deserialize, Serialize};

use crate::observe::Observer;
use crate::tree::{Dir, NodeId, Tree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub n_nodes: u64,
    /// Depth of the deepest node; -1 for the empty tree.
    pub height: i64,
    pub internal_path_length: u64,
    pub external_path_length: u64,
    /// Current potential when a tracker is attached, 0 otherwise.
    pub potential_sum: f64,
    pub rotations_simple: u64,
    pub rotations_double: u64,
}

/// Shape statistics in one traversal. The external path length is the sum of
/// all node weights.
pub fn tree_stats<K: Ord, O: Observer>(tree: &Tree<K, O>) -> TreeStats {
    let mut stats = TreeStats { height: -1, ..TreeStats::default() };
    let mut stack: Vec<(NodeId, i64)> = tree.root().map(|r| (r, 0)).into_iter().collect();
    while let Some((id, depth)) = stack.pop() {
        stats.n_nodes += 1;
        stats.height = stats.height.max(depth);
        stats.external_path_length += tree.node_weight(Some(id));
        for dir in [Dir::Left, Dir::Right] {
            if let Some(c) = tree.child(id, dir) {
                stack.push((c, depth + 1));
            }
        }
    }
    if stats.n_nodes > 0 {
        stats.internal_path_length = stats.external_path_length - 2 * stats.n_nodes;
    }
    stats.potential_sum = tree.observer().potential().unwrap_or(0.0);
    let counters = tree.counters();
    stats.rotations_simple = counters.simple;
    stats.rotations_double = counters.double;
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BalanceParams;

    /// Direct depth summation: (internal, external).
    fn depth_sums(t: &Tree<i64>, id: Option<NodeId>, depth: u64) -> (u64, u64) {
        match id {
            None => (0, depth),
            Some(id) => {
                let (li, le) = depth_sums(t, t.child(id, Dir::Left), depth + 1);
                let (ri, re) = depth_sums(t, t.child(id, Dir::Right), depth + 1);
                (depth + li + ri, le + re)
            }
        }
    }

    #[test]
    fn small_examples() {
        let p = BalanceParams::default();
        let empty: Tree<i64> = Tree::new(p);
        let s = tree_stats(&empty);
        assert_eq!((s.n_nodes, s.height, s.internal_path_length, s.external_path_length), (0, -1, 0, 0));

        let leaf = Tree::from_sorted_keys(p, vec![1]);
        let s = tree_stats(&leaf);
        assert_eq!((s.height, s.internal_path_length, s.external_path_length), (0, 0, 2));

        let seven = Tree::from_sorted_keys(p, (1..=7).collect());
        let s = tree_stats(&seven);
        assert_eq!((s.height, s.internal_path_length, s.external_path_length), (2, 10, 24));
    }

    #[test]
    fn matches_depth_summation() {
        let p = BalanceParams::default();
        let mut t = Tree::new(p);
        for k in 0..777 {
            t.insert_bu((k * 7919) % 1000).unwrap();
            if k % 50 == 0 {
                let s = tree_stats(&t);
                let (int, ext) = depth_sums(&t, t.root(), 0);
                assert_eq!(s.internal_path_length, int);
                assert_eq!(s.external_path_length, ext);
                assert_eq!(s.internal_path_length, s.external_path_length - 2 * s.n_nodes);
            }
        }
    }
}
