//! Distributional limits of bounded-valence graph sequences: combinatorial
//! maps and genus, triangulation extension, spectral cuts, discrete potential
//! theory, rooted-ball sampling, supported points, and the experiment suites
//! tying them together.

pub mod bslimit;
pub mod config;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod genfam;
pub mod graph;
pub mod pointsupport;
pub mod potential;
pub mod spectral;
pub mod svg;

pub use error::{Error, Result};
pub use graph::{Graph, RootedSubgraph};
