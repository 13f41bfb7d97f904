//! Boundary nodes `(G, L, K)` in finite dimensions.
//!
//! Columns of every operator are ordered as state coordinates first and
//! auxiliary boundary traces last. `L` has one evolution row per state
//! coordinate; the square system for a boundary operator `B` is
//! `[λ[I 0] - L; essential; B]`.

mod error;
mod feedback;
mod node;
mod verify;

pub use error::NodeError;
pub use feedback::{feedback_boundary, swap_node, verify_feedback_formulas, verify_swap, FeedbackReport, FeedbackSpec, SwapReport};
pub use node::{kernel_projector, DiscreteBoundaryNode, NodeParts, NodeSolver, TransferSample};
pub use verify::{
    check_passivity, min_re_transfer, restricted_resolvent, transfer, verify_node_identities,
    verify_resolvent_identity, verify_square_estimates, IdentityReport, PassivityReport, SquareEstimateReport,
};

pub type Result<T> = std::result::Result<T, NodeError>;
