//! Sample-based characterization of continuous black-box optimization
//! landscapes.
//!
//! The crate turns small evaluated samples of benchmark problems into three
//! interchangeable representations and evaluates how well each one predicts
//! expert-assigned landscape properties:
//!
//! - **fitness maps** — 2D grayscale rasters built through four
//!   dimensionality-reduction schemes ([`fitmap`]),
//! - **fitness clouds** — per-point neighborhood embeddings of the sample
//!   ([`fitcloud`]),
//! - **landscape features** — a fixed vector of classical numerical
//!   descriptors ([`ela`]).
//!
//! [`problems`] supplies seeded benchmark instances with known optima and
//! property labels, [`sampling`] the Latin Hypercube designs and
//! normalizations, [`dataset`] the reproducible corpus builder with its
//! train/validation/test protocol, and [`evaluation`] the multilabel
//! classification harness with macro-F1 reporting.
//!
//! Everything is deterministic: each artifact is a pure function of its
//! configuration and a 64-bit seed.

pub mod dataset;
pub mod ela;
pub mod error;
pub mod evaluation;
pub mod fitcloud;
pub mod fitmap;
pub mod problems;
pub mod sampling;
pub mod seeds;

mod stats;

pub use error::{Error, Result};
pub use problems::{
    labels, make_problem, Bounds, FunctionId, Funnel, GlobalStructure, Multimodality,
    ProblemInstance, Property, PropertyLabels,
};
pub use sampling::{
    draw_sample, draw_sample_rep, lhs_sample, normalize_design, normalize_fitness, ProblemRef,
    Sample,
};
