//! Bohr operator `M_r(f) = Σ ‖A_n‖ r^n` on operator-valued analytic and
//! polyanalytic power series.
//!
//! Operators are modelled by dense complex matrices ([`opmat`]), functions by
//! truncated power series carrying a certificate for the discarded tail
//! ([`series`]). [`zoo`] generates the function classes the Bohr-type
//! inequalities are stated for, [`radii`] solves the radius equations, and
//! [`harness`] runs seeded verification campaigns over random instances.

pub mod error;
pub mod harness;
pub mod opmat;
pub mod radii;
pub mod series;
pub mod zoo;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use opmat::CMatrix;
pub use radii::{
    bohr_radius_cap, lambda_bound, solve_radius, DEFAULT_TOL, Binding, Domain, FamilyKind, FamilyParams, PolyOrder, RadiusFamily, RootResult,
};
pub use series::{BohrSum, Majorant, MatrixSeries, RInterval, ScalarSeries, TailBound, DEFAULT_DEGREE};
pub use zoo::{build_polyanalytic, PolyanalyticFn};
