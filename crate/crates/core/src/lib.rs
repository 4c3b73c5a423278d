//! Spectral decomposition of hypergraph matrices driven by vertex symmetries.
//!
//! The pipeline is: parse a [`hypergraph::Hypergraph`], build a vertex-indexed
//! matrix with [`builders::build_matrix`], validate a symmetry
//! ([`symmetry`] for automorphisms, [`unit_symmetry`] for unit-automorphisms),
//! split the spectrum into small blocks ([`spectral`]) and check the result
//! against a dense solve ([`oracle`]).

pub mod builders;
pub mod dynamics;
pub mod eigen;
pub mod generators;
pub mod hypergraph;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod spectral;
pub mod symmetry;
pub mod unit_symmetry;

pub use num_complex::Complex64;
