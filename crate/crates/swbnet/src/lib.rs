//! Simulation of a round-based public goods game on a dynamic social
//! network, with two experimental conditions that differ in whether
//! connected peers' self-rated well-being is shown next to their
//! reputation and wealth.
//!
//! The crate is organized in five layers:
//!
//! * [`graph`]: undirected dynamic graph over dense player indices.
//! * [`engine`]: the round state machine: cooperation decisions, payoffs,
//!   well-being ratings, tie rewiring, and payout, recorded in a
//!   replayable event log.
//! * [`agents`]: behavioral policies calibrated from measured decision
//!   frequencies.
//! * [`metrics`]: per-network statistics: transitivity, Louvain
//!   communities, eigenvector centrality, Gini, cooperator triangles.
//! * [`stats`]: inference: permutation tests, Welch's t, logistic
//!   regression by IRLS, and bootstrap mediation analysis.
//!
//! Everything downstream of a seed is deterministic; independent generator
//! streams are derived with [`seeds`].

pub mod agents;
pub mod engine;
pub mod graph;
pub mod metrics;
pub mod seeds;
pub mod stats;

pub use engine::{Action, Condition, EventLog, SessionConfig};
pub use graph::Network;
