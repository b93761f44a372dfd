//! Arena-backed binary search tree substrate: nodes with cached weights,
//! search, rotations and perfect rebuilding.

use std::cmp::Ordering;

use serde::Serialize;
use slab::Slab;

use crate::balance::Diagnostics;
use crate::balance::RebalanceEvent;
use crate::error::{Result, TreeError};
use crate::observe::{NoObserver, Observer};
use crate::params::BalanceParams;

/// Insertions are refused once the root weight reaches this value.
pub const WEIGHT_CAP: u64 = 1 << 50;

/// Handle to a node of a [`Tree`]. Handles are invalidated when the node is
/// removed and may later be reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Node<K> {
    pub(crate) key: K,
    pub(crate) weight: u64,
    pub(crate) left: Option<NodeId>,
    pub(crate) right: Option<NodeId>,
}

impl<K> Node<K> {
    fn leaf(key: K) -> Self {
        Node {
            key,
            weight: 2,
            left: None,
            right: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RotationCounters {
    pub simple: u64,
    pub double: u64,
    /// Perfect rebuilds of base-case subtrees.
    pub rebuilds: u64,
}

impl RotationCounters {
    /// Restructuring events: a double rotation counts as two.
    pub fn restructurings(&self) -> u64 {
        self.simple + 2 * self.double
    }
}

/// Shape of a binary tree, used to build trees with a prescribed structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Empty,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn leaf() -> Shape {
        Shape::node(Shape::Empty, Shape::Empty)
    }

    pub fn node(left: Shape, right: Shape) -> Shape {
        Shape::Node(Box::new(left), Box::new(right))
    }

    /// Chain of `n` nodes where each node hangs on the `dir` side of its parent.
    pub fn spine(n: usize, dir: Dir) -> Shape {
        (0..n).fold(Shape::Empty, |below, _| match dir {
            Dir::Left => Shape::node(below, Shape::Empty),
            Dir::Right => Shape::node(Shape::Empty, below),
        })
    }

    /// Perfectly balanced shape of the given weight (heavier half on the left).
    pub fn perfect(weight: u64) -> Shape {
        assert!(weight >= 1);
        if weight == 1 {
            return Shape::Empty;
        }
        Shape::node(Shape::perfect(weight.div_ceil(2)), Shape::perfect(weight / 2))
    }

    pub fn weight(&self) -> u64 {
        match self {
            Shape::Empty => 1,
            Shape::Node(l, r) => l.weight() + r.weight(),
        }
    }
}

/// A grandchildren-balanced search tree over keys of type `K`.
///
/// Weights are cached in every node: the weight of a subtree is its number of
/// empty subtrees, i.e. node count plus one. Public updates keep every node
/// `(alpha, beta)`-balanced; the low-level rotation and construction methods
/// do not, and exist for tests and analysis.
pub struct Tree<K, O = NoObserver> {
    pub(crate) nodes: Slab<Node<K>>,
    pub(crate) root: Option<NodeId>,
    pub(crate) params: BalanceParams,
    pub(crate) counters: RotationCounters,
    pub(crate) diagnostics: Diagnostics,
    pub(crate) observer: O,
    pub(crate) events: Vec<RebalanceEvent>,
    pub(crate) visited: u64,
}

impl<K: Ord> Tree<K> {
    pub fn new(params: BalanceParams) -> Self {
        Tree::with_observer(params, NoObserver)
    }

    /// Perfectly balanced tree on a strictly increasing key sequence.
    pub fn from_sorted_keys(params: BalanceParams, keys: Vec<K>) -> Self {
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "keys must be strictly increasing");
        let mut tree = Tree::new(params);
        let ids: Vec<NodeId> = keys
            .into_iter()
            .map(|k| NodeId(tree.nodes.insert(Node::leaf(k))))
            .collect();
        tree.root = tree.link_perfect(&ids);
        tree
    }

    /// Tree with the given shape, keys taken in order from `keys`.
    ///
    /// Panics if `keys` runs out or is not strictly increasing.
    pub fn from_shape_keys(
        params: BalanceParams,
        shape: &Shape,
        keys: impl IntoIterator<Item = K>,
    ) -> Self {
        let mut tree = Tree::new(params);
        let mut keys = keys.into_iter();
        tree.root = tree.build_shape(shape, &mut keys);
        let sorted: Vec<&K> = tree.iter().collect();
        assert!(sorted.windows(2).all(|w| w[0] < w[1]), "keys must be strictly increasing");
        tree
    }

    fn build_shape(&mut self, shape: &Shape, keys: &mut impl Iterator<Item = K>) -> Option<NodeId> {
        match shape {
            Shape::Empty => None,
            Shape::Node(l, r) => {
                let left = self.build_shape(l, keys);
                let key = keys.next().expect("not enough keys for shape");
                let right = self.build_shape(r, keys);
                let weight = self.weight_of(left) + self.weight_of(right);
                Some(NodeId(self.nodes.insert(Node {
                    key,
                    weight,
                    left,
                    right,
                })))
            }
        }
    }
}

impl Tree<i64> {
    /// Tree with the given shape and keys `1, 2, ...` in order.
    pub fn from_shape(params: BalanceParams, shape: &Shape) -> Self {
        Tree::from_shape_keys(params, shape, 1..)
    }
}

impl<K: Ord, O: Observer> Tree<K, O> {
    pub fn with_observer(params: BalanceParams, observer: O) -> Self {
        Tree {
            nodes: Slab::new(),
            root: None,
            params,
            counters: RotationCounters::default(),
            diagnostics: Diagnostics::default(),
            observer,
            events: Vec::new(),
            visited: 0,
        }
    }

    pub fn params(&self) -> &BalanceParams {
        &self.params
    }

    pub fn observer(&self) -> &O {
        &self.observer
    }

    pub fn observer_mut(&mut self) -> &mut O {
        &mut self.observer
    }

    pub fn counters(&self) -> RotationCounters {
        self.counters
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn set_root(&mut self, root: Option<NodeId>) {
        self.root = root;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// Weight of the whole tree (1 when empty).
    pub fn weight(&self) -> u64 {
        self.weight_of(self.root)
    }

    /// Cached weight of a subtree; 1 for an absent one.
    pub fn node_weight(&self, subtree: Option<NodeId>) -> u64 {
        self.weight_of(subtree)
    }

    #[inline]
    pub(crate) fn weight_of(&self, id: Option<NodeId>) -> u64 {
        id.map_or(1, |id| self.nodes[id.0].weight)
    }

    pub fn key(&self, id: NodeId) -> &K {
        &self.nodes[id.0].key
    }

    #[inline]
    pub fn child(&self, id: NodeId, dir: Dir) -> Option<NodeId> {
        let n = &self.nodes[id.0];
        match dir {
            Dir::Left => n.left,
            Dir::Right => n.right,
        }
    }

    #[inline]
    pub fn set_child(&mut self, id: NodeId, dir: Dir, child: Option<NodeId>) {
        let n = &mut self.nodes[id.0];
        match dir {
            Dir::Left => n.left = child,
            Dir::Right => n.right = child,
        }
    }

    /// Weight of a grandchild slot. A grandchild below an absent child is a
    /// phantom of weight 1/2.
    #[inline]
    pub(crate) fn grandchild_weight(&self, id: NodeId, first: Dir, second: Dir) -> f64 {
        match self.child(id, first) {
            Some(c) => self.weight_of(self.child(c, second)) as f64,
            None => 0.5,
        }
    }

    pub(crate) fn max_child_weight(&self, id: NodeId) -> u64 {
        let n = &self.nodes[id.0];
        self.weight_of(n.left).max(self.weight_of(n.right))
    }

    pub(crate) fn max_grandchild_weight(&self, id: NodeId) -> f64 {
        use Dir::*;
        [(Left, Left), (Left, Right), (Right, Left), (Right, Right)]
            .into_iter()
            .map(|(a, b)| self.grandchild_weight(id, a, b))
            .fold(0.0, f64::max)
    }

    pub(crate) fn recompute_weight(&mut self, id: NodeId) {
        let n = &self.nodes[id.0];
        let w = self.weight_of(n.left) + self.weight_of(n.right);
        self.nodes[id.0].weight = w;
    }

    /// Child and grandchild balance of a node, with the phantom convention for
    /// empty subtrees (an empty subtree of weight 1 has children of weight 1/2).
    pub fn balances(&self, id: NodeId) -> (f64, f64) {
        let w = self.nodes[id.0].weight as f64;
        (
            self.max_child_weight(id) as f64 / w,
            self.max_grandchild_weight(id) / w,
        )
    }

    pub fn find(&self, key: &K) -> bool {
        let mut cur = self.root;
        while let Some(id) = cur {
            let n = &self.nodes[id.0];
            cur = match key.cmp(&n.key) {
                Ordering::Less => n.left,
                Ordering::Greater => n.right,
                Ordering::Equal => return true,
            };
        }
        false
    }

    /// Keys in increasing order.
    pub fn iter(&self) -> Iter<'_, K, O> {
        let mut it = Iter {
            tree: self,
            stack: Vec::new(),
        };
        it.push_left(self.root);
        it
    }

    pub fn in_order_keys(&self) -> Vec<K>
    where
        K: Clone,
    {
        self.iter().cloned().collect()
    }

    /// Node handles of a subtree in key order.
    pub(crate) fn collect_in_order(&self, root: Option<NodeId>, out: &mut Vec<NodeId>) {
        let mut stack = Vec::new();
        let mut cur = root;
        loop {
            while let Some(id) = cur {
                stack.push(id);
                cur = self.nodes[id.0].left;
            }
            match stack.pop() {
                Some(id) => {
                    out.push(id);
                    cur = self.nodes[id.0].right;
                }
                None => break,
            }
        }
    }

    /// Simple rotation of the subtree rooted at `n`. `Dir::Right` promotes the
    /// left child, `Dir::Left` the right child. Returns the new subtree root.
    ///
    /// If `n` was the tree root the root is updated; otherwise the caller
    /// relinks the parent with [`Tree::set_child`].
    pub fn rotate_simple(&mut self, n: NodeId, dir: Dir) -> Result<NodeId> {
        let new_root = self.rotate_simple_raw(n, dir)?;
        if self.root == Some(n) {
            self.root = Some(new_root);
        }
        Ok(new_root)
    }

    /// Double rotation of the subtree rooted at `n`: `Dir::Right` promotes the
    /// right child of the left child. Root handling as in [`Tree::rotate_simple`].
    pub fn rotate_double(&mut self, n: NodeId, dir: Dir) -> Result<NodeId> {
        let new_root = self.rotate_double_raw(n, dir)?;
        if self.root == Some(n) {
            self.root = Some(new_root);
        }
        Ok(new_root)
    }

    pub(crate) fn rotate_simple_raw(&mut self, n: NodeId, dir: Dir) -> Result<NodeId> {
        let heavy = dir.flip();
        let n1 = self
            .child(n, heavy)
            .ok_or(TreeError::DegenerateStructure("child"))?;
        let inner = self.child(n1, dir);
        let total = self.nodes[n.0].weight;
        self.set_child(n, heavy, inner);
        self.set_child(n1, dir, Some(n));
        self.recompute_weight(n);
        self.nodes[n1.0].weight = total;
        self.counters.simple += 1;
        self.visited += 2;
        self.observer.node_affected(n);
        self.observer.node_affected(n1);
        Ok(n1)
    }

    pub(crate) fn rotate_double_raw(&mut self, n: NodeId, dir: Dir) -> Result<NodeId> {
        let heavy = dir.flip();
        let n1 = self
            .child(n, heavy)
            .ok_or(TreeError::DegenerateStructure("child"))?;
        let n12 = self
            .child(n1, dir)
            .ok_or(TreeError::DegenerateStructure("inner grandchild"))?;
        let outer_part = self.child(n12, heavy);
        let inner_part = self.child(n12, dir);
        let total = self.nodes[n.0].weight;
        self.set_child(n1, dir, outer_part);
        self.set_child(n, heavy, inner_part);
        self.set_child(n12, heavy, Some(n1));
        self.set_child(n12, dir, Some(n));
        self.recompute_weight(n1);
        self.recompute_weight(n);
        self.nodes[n12.0].weight = total;
        self.counters.double += 1;
        self.visited += 3;
        self.observer.node_affected(n);
        self.observer.node_affected(n1);
        self.observer.node_affected(n12);
        Ok(n12)
    }

    /// Rebuilds the subtree rooted at `subtree` so that sibling weights differ
    /// by at most one, heavier half on the left. Returns the new root; the
    /// tree root is updated when `subtree` was the root.
    pub fn rebuild_perfect(&mut self, subtree: NodeId) -> NodeId {
        let mut ids = Vec::new();
        self.collect_in_order(Some(subtree), &mut ids);
        let new_root = self.link_perfect(&ids).expect("non-empty subtree");
        if self.root == Some(subtree) {
            self.root = Some(new_root);
        }
        new_root
    }

    /// Links the nodes `ids` (already in key order) into a perfectly balanced
    /// tree and returns its root.
    pub(crate) fn link_perfect(&mut self, ids: &[NodeId]) -> Option<NodeId> {
        if ids.is_empty() {
            return None;
        }
        let mid = ids.len() / 2;
        let left = self.link_perfect(&ids[..mid]);
        let right = self.link_perfect(&ids[mid + 1..]);
        let id = ids[mid];
        let weight = self.weight_of(left) + self.weight_of(right);
        let n = &mut self.nodes[id.0];
        n.left = left;
        n.right = right;
        n.weight = weight;
        Some(id)
    }

    pub(crate) fn alloc(&mut self, key: K) -> NodeId {
        let id = NodeId(self.nodes.insert(Node::leaf(key)));
        self.observer.node_created(id);
        id
    }

    pub(crate) fn free(&mut self, id: NodeId) -> K {
        self.observer.node_removed(id);
        self.nodes.remove(id.0).key
    }
}

/// In-order iterator over the keys of a [`Tree`].
pub struct Iter<'a, K, O> {
    tree: &'a Tree<K, O>,
    stack: Vec<NodeId>,
}

impl<K, O> Iter<'_, K, O> {
    fn push_left(&mut self, mut cur: Option<NodeId>) {
        while let Some(id) = cur {
            self.stack.push(id);
            cur = self.tree.nodes[id.0].left;
        }
    }
}

impl<'a, K, O> Iterator for Iter<'a, K, O> {
    type Item = &'a K;

    fn next(&mut self) -> Option<&'a K> {
        let id = self.stack.pop()?;
        let node = &self.tree.nodes[id.0];
        self.push_left(node.right);
        Some(&node.key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BalanceParams {
        BalanceParams::default()
    }

    fn check_weights<K: Ord>(t: &Tree<K>, id: Option<NodeId>) -> u64 {
        match id {
            None => 1,
            Some(id) => {
                let l = check_weights(t, t.child(id, Dir::Left));
                let r = check_weights(t, t.child(id, Dir::Right));
                assert_eq!(t.node_weight(Some(id)), l + r);
                l + r
            }
        }
    }

    #[test]
    fn node_weight_examples() {
        let t = Tree::<i64>::new(params());
        assert_eq!(t.node_weight(None), 1);
        assert_eq!(t.weight(), 1);
        let t = Tree::from_shape(params(), &Shape::leaf());
        assert_eq!(t.weight(), 2);
    }

    #[test]
    fn balances_of_small_nodes() {
        let t = Tree::from_shape(params(), &Shape::leaf());
        assert_eq!(t.balances(t.root().unwrap()), (0.5, 0.25));
        let t = Tree::from_shape(params(), &Shape::node(Shape::leaf(), Shape::leaf()));
        assert_eq!(t.balances(t.root().unwrap()), (0.5, 0.25));
        let t = Tree::from_shape(params(), &Shape::node(Shape::Empty, Shape::leaf()));
        assert_eq!(t.balances(t.root().unwrap()), (2.0 / 3.0, 1.0 / 3.0));
    }

    #[test]
    fn rotate_left_on_right_chain() {
        let mut t = Tree::from_shape(params(), &Shape::spine(3, Dir::Right));
        assert_eq!(*t.key(t.root().unwrap()), 1);
        let r = t.rotate_simple(t.root().unwrap(), Dir::Left).unwrap();
        assert_eq!(t.root(), Some(r));
        assert_eq!(*t.key(r), 2);
        assert_eq!(t.node_weight(Some(r)), 4);
        assert_eq!(t.in_order_keys(), vec![1, 2, 3]);
        check_weights(&t, t.root());
        assert_eq!(t.counters().simple, 1);
    }

    #[test]
    fn double_rotation_on_zigzag() {
        // 3 at the root, 1 on its left, 2 right of 1.
        let shape = Shape::node(Shape::node(Shape::Empty, Shape::leaf()), Shape::Empty);
        let mut t = Tree::from_shape(params(), &shape);
        let r = t.rotate_double(t.root().unwrap(), Dir::Right).unwrap();
        assert_eq!(*t.key(r), 2);
        assert_eq!(*t.key(t.child(r, Dir::Left).unwrap()), 1);
        assert_eq!(*t.key(t.child(r, Dir::Right).unwrap()), 3);
        check_weights(&t, t.root());
        assert_eq!(t.counters().double, 1);
        assert_eq!(t.counters().restructurings(), 2);
    }

    #[test]
    fn rotation_requires_materialized_nodes() {
        let mut t = Tree::from_shape(params(), &Shape::leaf());
        let r = t.root().unwrap();
        assert!(matches!(
            t.rotate_simple(r, Dir::Right),
            Err(TreeError::DegenerateStructure(_))
        ));
        let mut t = Tree::from_shape(params(), &Shape::node(Shape::leaf(), Shape::Empty));
        let r = t.root().unwrap();
        assert!(t.rotate_double(r, Dir::Right).is_err());
    }

    #[test]
    fn rotate_t6_left_recomputes_weights() {
        // T(6): left weight 2, right weight 4 with children 2 and 2.
        let shape = Shape::node(Shape::leaf(), Shape::node(Shape::leaf(), Shape::leaf()));
        let mut t = Tree::from_shape(params(), &shape);
        let r = t.rotate_simple(t.root().unwrap(), Dir::Left).unwrap();
        assert_eq!(t.node_weight(Some(r)), 6);
        let l = t.child(r, Dir::Left);
        // old root now holds the leaf 1 and the leaf 3: 2 + 2.
        assert_eq!(t.node_weight(l), 4);
        assert_eq!(t.node_weight(t.child(r, Dir::Right)), 2);
        check_weights(&t, t.root());
    }

    #[test]
    fn simple_rotation_and_inverse_restore_shape() {
        let shape = Shape::node(
            Shape::node(Shape::leaf(), Shape::perfect(4)),
            Shape::perfect(3),
        );
        let mut t = Tree::from_shape(params(), &shape);
        let before: Vec<(i64, u64)> = snapshot(&t);
        let r = t.rotate_simple(t.root().unwrap(), Dir::Right).unwrap();
        t.rotate_simple(r, Dir::Left).unwrap();
        assert_eq!(snapshot(&t), before);
    }

    fn snapshot(t: &Tree<i64>) -> Vec<(i64, u64)> {
        let mut ids = Vec::new();
        t.collect_in_order(t.root(), &mut ids);
        // pre-order keys with weights pins down the shape
        let mut out = Vec::new();
        let mut stack = vec![t.root()];
        while let Some(cur) = stack.pop() {
            if let Some(id) = cur {
                out.push((*t.key(id), t.node_weight(Some(id))));
                stack.push(t.child(id, Dir::Right));
                stack.push(t.child(id, Dir::Left));
            }
        }
        out
    }

    #[test]
    fn rebuild_perfect_small_and_eleven() {
        let t = Tree::from_sorted_keys(params(), vec![1]);
        assert_eq!(t.weight(), 2);
        let t = Tree::from_sorted_keys(params(), vec![1, 2, 3]);
        let r = t.root().unwrap();
        assert_eq!(*t.key(r), 2);
        assert_eq!(t.node_weight(t.child(r, Dir::Left)), 2);
        assert_eq!(t.node_weight(t.child(r, Dir::Right)), 2);

        let mut t = Tree::from_shape(params(), &Shape::spine(11, Dir::Left));
        let r = t.rebuild_perfect(t.root().unwrap());
        assert_eq!(t.root(), Some(r));
        assert_eq!(t.in_order_keys(), (1..=11).collect::<Vec<_>>());
        let mut ids = Vec::new();
        t.collect_in_order(t.root(), &mut ids);
        for id in ids {
            let l = t.node_weight(t.child(id, Dir::Left));
            let rw = t.node_weight(t.child(id, Dir::Right));
            assert!(l >= rw && l - rw <= 1);
        }
        assert_eq!(height(&t, t.root()), 3);
        check_weights(&t, t.root());
    }

    fn height(t: &Tree<i64>, id: Option<NodeId>) -> i64 {
        match id {
            None => -1,
            Some(id) => 1 + height(t, t.child(id, Dir::Left)).max(height(t, t.child(id, Dir::Right))),
        }
    }

    #[test]
    fn find_and_iter() {
        let t = Tree::<i64>::new(params());
        assert!(!t.find(&5));
        assert!(t.in_order_keys().is_empty());
        let t = Tree::from_sorted_keys(params(), (1..=10).collect());
        assert!(t.find(&7));
        assert!(!t.find(&11));
        assert_eq!(t.iter().count(), 10);
    }

    #[test]
    fn perfect_shape_weights() {
        for w in 1..40 {
            assert_eq!(Shape::perfect(w).weight(), w);
        }
    }
}
