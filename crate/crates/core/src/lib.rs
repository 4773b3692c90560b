//! Simulation and analysis toolkit for two-sender/two-receiver
//! interference channels assisted by shared correlations.
//!
//! The crate compares three classes of sender resources on two small
//! channels — no shared resource, shared entanglement (modeled at the
//! statistics and measurement-operator levels), and the maximally
//! non-local non-signaling box — through four routes:
//!
//! - [`channels`]: the channels as dense conditional tables with exact
//!   mutual-information computation for product inputs.
//! - [`boxes`] and [`coding`]: correlation boxes and Monte Carlo coding
//!   experiments driven by them.
//! - [`optimizer`]: sum-rate maximization over product input
//!   distributions by gradient descent on two unit spheres.
//! - [`bounds`] and [`povm`]: closed-form capacity bounds and the
//!   measurement-level argument that no perfect entanglement-assisted
//!   code exists for the noiseless channel.
//!
//! Every randomized routine takes a seed and derives per-shard RNG
//! substreams from it, so results are reproducible and independent of
//! thread scheduling. The `parallel` feature (on by default) shards
//! Monte Carlo trials and optimizer restarts across threads via rayon;
//! disabling it yields a dependency-free sequential build with identical
//! outputs.

pub mod bounds;
pub mod boxes;
pub mod channels;
pub mod coding;
pub mod error;
pub mod optimizer;
pub mod povm;

pub use channels::{LogBase, RateReport};
pub use error::{Error, Result};
