//! Random k-lifts of graphs and reversible Markov chains.
//!
//! The crate builds lifts from seeded matchings, splits the spectrum of a lift
//! into the eigenvalues inherited from the base and the "new" ones, measures
//! the operator-norm deviation from the expected lift, and evaluates the
//! concentration bounds those deviations are compared against. The
//! [`experiment`] module wraps all of it in reproducible Monte Carlo runs.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod lift;
pub mod linalg;
pub mod markov;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{generate, DegreeProfile, Graph, GraphKind};
pub use lift::{iterated_lift, realize, sample_lift, LiftSpec, LiftedGraph, Matching, Sampler};
pub use linalg::{DenseMatrix, Spectrum, SymmetricMatrix};
pub use markov::{LiftedChain, ReversibleChain};
pub use spectral::{analyze, BoundReport, DeviationReport};
