//! Numerical laboratory for the multi-particle Anderson model with
//! flat-tiling alloy disorder and sub-exponentially decaying two-body
//! interaction.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] configurations, cubes, symmetrized/Hausdorff distances,
//!   weak/strong interaction, weak separation certificates;
//! * [`model`] disorder sampling, alloy potential, interaction and the
//!   finite-volume Hamiltonian `-1/2 Δ + U + g V` on lattice boxes;
//! * [`spectral`] eigensolves, Green functions, center-to-boundary decay,
//!   NS/NR/CNR classification, eigenfunction correlators, GRI constants;
//! * [`evc`] eigenvalue-concentration Monte Carlo and the exact
//!   eigenvalue-shift identity behind the two-volume bound;
//! * [`msa`] scale parameters, singularity statistics, bad/good cubes,
//!   dominated decay on graphs, weakly interactive tensor checks, energy
//!   sweeps and correlator decay;
//! * [`harness`] JSON experiment configs, reproducible runs, CSV output
//!   and reports.

pub mod error;
pub mod evc;
pub mod geometry;
pub mod harness;
pub mod model;
pub mod msa;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{Configuration, Cube, LatticeBox};
pub use model::{DisorderSample, HamiltonianMatrix, ModelSpec};
pub use spectral::SpectralData;
