//! Bound-state energies of the spherical anharmonic oscillator from the
//! ℏ-expansion of logarithmic perturbation theory.
//!
//! * [`engine`]: the Laurent-coefficient recursion and the energy corrections.
//! * [`renorm`]: frequency-renormalized series and optimization of the trial
//!   frequency.
//! * [`numerov`]: an independent radial Schrödinger eigenvalue solver.
//! * [`reference`]: closed-form corrections used as test oracles.
//! * [`table`] and [`verify`]: the published-table reproduction and the
//!   cross-oracle verification suite.

pub mod engine;
pub mod error;
pub mod numerov;
pub mod parallel;
pub mod potential;
pub mod reference;
pub mod renorm;
pub mod scalar;
pub mod table;
pub mod verify;

pub use engine::{
    build_table, c0_coefficients, energy_corrections, raw_energy, EnergySeries, LaurentTable,
};
pub use error::{Error, Result};
pub use numerov::{solve_eigenvalue, Eigenvalue, GridConfig};
pub use parallel::Execution;
pub use potential::{
    parse_config, parse_potential, Backend, Param, PotentialSpec, QuantumState, RunConfig,
    ScalarConfig,
};
pub use renorm::{
    optimize_omega0, optimize_sequence, partial_sum_function, renorm_corrections, DifferenceTarget,
    RenormConfig, RenormResult, Scheme,
};
pub use scalar::{BigFloat, Dual2, Precision, Rational, Scalar};
pub use table::{compute_table, TableConfig, TableReport};
pub use verify::{Check, Suite};
