//! Private subgraph counting with wedge shuffling.
//!
//! Graph storage and exact counts live in [`graph`] and [`exact`]; the
//! randomizers and amplification bound in [`privacy`]; the per-pair wedge
//! protocol in [`wedge`]; whole-graph estimators in [`estimators`]; error
//! bounds in [`bounds`]; repeated runs and CSV output in [`harness`].

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod privacy;
pub mod rng;
pub mod wedge;

pub use error::{Error, Result};
pub use estimators::{Algorithm, EstimateRecord, RunOptions, VrParams, WedgeBudgets};
pub use graph::{Adjacency, Graph};
pub use privacy::{DpGuarantee, PrivacyLedger, TrustModel};
pub use wedge::{PairBudgets, ReportMode};
