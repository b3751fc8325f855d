//! Vertex partitions of planar graphs without 4- and 6-cycles into a
//! disjoint union of paths and a forest.
//!
//! The crate verifies partitions against class specifications, solves for
//! them exactly, constructs them by peeling reducible configurations, and
//! audits the discharging argument on concrete embedded graphs.

pub mod charge;
pub mod cli;
pub mod constructor;
pub mod corpus;
pub mod cycles;
pub mod discharging;
pub mod dsu;
pub mod embedding;
pub mod graph;
pub mod io;
pub mod partition;
pub mod solver;
pub mod structure;
pub mod suite;

pub use embedding::{build_embedding, delete_vertices, Embedding, Face, FaceId};
pub use graph::Graph;
pub use partition::{f2_f, verify, ClassSpec, Partition, Verdict};
pub use solver::{solve, Outcome, SolveOptions, SolveResult};
