//! Function families the Bohr inequalities quantify over.
//!
//! Everything here is either a closed-form model (Möbius maps, the convex
//! half-plane map, Koebe-type starlike maps) or a seeded random generator
//! whose output is contractive by construction.

mod models;
mod polyanalytic;
mod schur;

pub use models::{convex_model, mobius, mobius_extremal, starlike_from_q, CaratheodoryScalar};
pub use polyanalytic::{build_polyanalytic, PolyanalyticFn};
pub use schur::{
    blaschke_series, contraction_from_blaschke, gen_omega, gen_quasi_factor, gen_schur_matrix,
    gen_schur_matrix_seeded, random_blaschke, random_disk_point, random_phase, random_self_map, random_unitary,
    BlaschkeSpec,
    SchurOptions, MAX_RANDOM_ZERO_MODULUS,
};
