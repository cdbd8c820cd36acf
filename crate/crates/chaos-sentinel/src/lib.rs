//! Chaos-based sleep/wake scheduling for wireless video sensor networks.
//!
//! The crate is organized around the machinery of chaotic iterations on
//! Boolean vectors and the surveillance protocol built on top of them:
//!
//! - [`ci_core`] — chaotic iterations, the vectorial negation, the phase
//!   space maps.
//! - [`chaos_metrics`] — the phase-space distance and desk-scale sensitivity
//!   and reachability experiments.
//! - [`ci_primitives`] — key expansion, the base and CI(X,Y) generators,
//!   exact-uniform index drawing, and the avalanche hash.
//! - [`scheduler`] — the node lifecycle: wake-up orders, listening-time
//!   bookkeeping, digest reseeding, next-node selection policies.
//! - [`field_sim`] — deployment geometry, directional sensing, intruder
//!   mobility, energy accounting and the run metrics.
//! - [`adversary`] — blind-path attackers, the observing predictor and the
//!   chosen-key uniformity experiment.
//! - [`experiment`] — presets, batch running and CSV/NDJSON emission.
//! - [`verify`] — the self-check suite behind `chaos-sentinel verify`.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability, and the crate README for the CLI surface.

pub mod adversary;
pub mod chaos_metrics;
pub mod ci_core;
pub mod ci_primitives;
pub mod error;
pub mod experiment;
pub mod field_sim;
pub mod scheduler;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
