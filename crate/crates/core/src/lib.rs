//! Bayesian energy discriminant classification with orthogonal projections.
//!
//! Classes are modeled by complementary projectors `P₁ + P₂ = I`; a pattern's
//! membership in class `i` is the energy `⟨P_i x, x⟩` that `P_i` passes. The
//! projector pair maximizing the expected energy of correct recognition comes
//! from the spectrum of the prior-weighted correlation difference
//! `p₁K₁ − p₂K₂`.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The aliases
//! below fix the scalar to `f64`, which is what the CLI and the model file
//! format use.
//!
//! - [`spectral`]: symmetric matrices, Jacobi eigensolver, projectors
//! - [`moments`]: mean, correlation and covariance operators
//! - [`quantum_logic`]: membership, meet, join, complement and order on projectors
//! - [`classifier`]: fitting, decisions, energy and quality functionals
//! - [`datasets`]: seeded generators and CSV I/O
//! - [`model`]: text persistence of fitted classifiers
//! - [`cli`]: the `qenergy` command line

pub mod classifier;
pub mod cli;
pub mod datasets;
pub mod error;
pub mod model;
pub mod moments;
pub mod quantum_logic;
pub mod scalar;
pub mod spectral;

pub use classifier::{
    accuracy, decide, empirical_quality, energy_report, fit, indicator_quality,
    projector_energy_report, quality_with, region_energy, snr, EmpiricalEnergy, Estimate,
    NormalizationMode,
};
pub use datasets::{gen_example1, gen_example2, load_csv, save_csv, ClassLabel, SeededGenerator};
pub use error::{Error, Result};
pub use model::{load_model, parse_model, save_model, to_model_string};
pub use moments::{analytic_moments, estimate_moments, expected_quadratic};
pub use quantum_logic::{join, leq, meet, membership};
pub use scalar::Real;
pub use spectral::{complement, projector_from_basis, sym_eig};

pub type SymMatrix = spectral::SymMatrix<f64>;
pub type EigenDecomposition = spectral::EigenDecomposition<f64>;
pub type Projector = spectral::Projector<f64>;
pub type MomentSummary = moments::MomentSummary<f64>;
pub type FuzzyProposition = quantum_logic::FuzzyProposition<f64>;
pub type ClassSpec = classifier::ClassSpec<f64>;
pub type EnergyClassifier = classifier::EnergyClassifier<f64>;
pub type EnergyReport = classifier::EnergyReport<f64>;
pub type Dataset = datasets::LabeledDataset<f64>;
