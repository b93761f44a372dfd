use thiserror::Error;

/// Errors surfaced by tree construction, rebalancing and updates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("parameters (alpha={alpha}, beta={beta}) lie outside {region}")]
    Domain {
        alpha: f64,
        beta: f64,
        region: &'static str,
    },
    #[error("tree weight would exceed the cap of 2^50")]
    Capacity,
    #[error("rotation requires a {0} node that is absent")]
    DegenerateStructure(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = TreeError> = std::result::Result<T, E>;
