//! Hook through which the tree reports structural events to instrumentation.
//!
//! Every method has a no-op default; [`NoObserver`] is the zero-cost choice
//! used when nothing is attached.

use crate::balance::{RebalanceEvent, Routine};
use crate::tree::NodeId;

pub trait Observer {
    /// A public update is starting.
    fn update_begin(&mut self) {}
    /// The public update finished.
    fn update_end(&mut self) {}
    fn node_created(&mut self, _id: NodeId) {}
    fn node_removed(&mut self, _id: NodeId) {}
    /// `id` lies above the leaf being inserted or deleted; `weight_before` is
    /// its weight in the tree before the update. Buffered until
    /// [`Observer::path_commit`] or [`Observer::path_discard`].
    fn path_node(&mut self, _id: NodeId, _weight_before: u64) {}
    /// The update turned out non-redundant: buffered path nodes are final.
    fn path_commit(&mut self) {}
    /// The update turned out redundant: forget buffered path nodes.
    fn path_discard(&mut self) {}
    /// The children list of `id` changed (rotation or perfect rebuild).
    fn node_affected(&mut self, _id: NodeId) {}
    fn call_enter(&mut self, _routine: Routine, _subtree_weight: u64) {}
    fn call_exit(&mut self, _routine: Routine, _rotated: bool) {}
    fn event(&mut self, _event: &RebalanceEvent) {}
    /// Current potential sum, when the observer tracks one.
    fn potential(&self) -> Option<f64> {
        None
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoObserver;

impl Observer for NoObserver {}

impl<T: Observer + ?Sized> Observer for Box<T> {
    fn update_begin(&mut self) {
        (**self).update_begin()
    }
    fn update_end(&mut self) {
        (**self).update_end()
    }
    fn node_created(&mut self, id: NodeId) {
        (**self).node_created(id)
    }
    fn node_removed(&mut self, id: NodeId) {
        (**self).node_removed(id)
    }
    fn path_node(&mut self, id: NodeId, weight_before: u64) {
        (**self).path_node(id, weight_before)
    }
    fn path_commit(&mut self) {
        (**self).path_commit()
    }
    fn path_discard(&mut self) {
        (**self).path_discard()
    }
    fn node_affected(&mut self, id: NodeId) {
        (**self).node_affected(id)
    }
    fn call_enter(&mut self, routine: Routine, subtree_weight: u64) {
        (**self).call_enter(routine, subtree_weight)
    }
    fn call_exit(&mut self, routine: Routine, rotated: bool) {
        (**self).call_exit(routine, rotated)
    }
    fn event(&mut self, event: &RebalanceEvent) {
        (**self).event(event)
    }
    fn potential(&self) -> Option<f64> {
        (**self).potential()
    }
}
