//! Grandchildren-balanced binary search trees.
//!
//! A node is balanced when no child carries more than an `alpha` fraction of
//! its weight and no grandchild more than a `beta` fraction, where the weight
//! of a subtree is its node count plus one. Trees are updated either
//! bottom-up ([`Tree::insert_bu`], [`Tree::delete_bu`]) or in a single
//! top-down pass ([`Tree::insert_td`], [`Tree::delete_td`]).
//!
//! ```
//! use gcbtree::{BalanceParams, Tree, analysis::validate};
//!
//! let mut tree = Tree::new(BalanceParams::default());
//! for k in 0..1000 {
//!     tree.insert_td(k).unwrap();
//! }
//! tree.delete_bu(&500).unwrap();
//! assert!(validate(&tree).is_ok());
//! assert_eq!(tree.len(), 999);
//! ```

pub mod analysis;
pub mod balance;
pub mod error;
pub mod observe;
pub mod params;
pub mod tree;
pub mod update;

pub use balance::{Diagnostics, RebalanceEvent, Rotation, Routine};
pub use error::{Result, TreeError};
pub use observe::{NoObserver, Observer};
pub use params::{domain_check, theoretical_bounds, BalanceParams, Bounds, DomainMembership};
pub use tree::{Dir, Iter, NodeId, RotationCounters, Shape, Tree, WEIGHT_CAP};
pub use update::{Algorithm, Effect, UpdateKind, UpdateOutcome};
