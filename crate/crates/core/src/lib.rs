//! Brandt matrices, theta series and Hecke spectra for the definite
//! quaternion algebra ramified at a prime `N` and ∞.
//!
//! The pipeline runs bottom-up:
//!
//! * [`quaternion`] builds the algebra and a maximal order `R`;
//! * [`ideals`] enumerates the left ideal classes of `R` (certified by the
//!   mass formula);
//! * [`brandt`] counts vectors in the lattices `I_j⁻¹ I_i` to get `B(m)`;
//! * [`spectral`] diagonalizes the Hecke action under the monodromy pairing;
//! * [`theta`] compares the numeric supports `Σ(i)` with exact ranks of the
//!   theta spaces;
//! * [`supersingular`] cross-checks class counts against supersingular
//!   j-invariants found by point counting.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod brandt;
pub mod error;
pub mod ideals;
pub mod ledger;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod quaternion;
pub mod record;
pub mod shortvec;
pub mod spectral;
pub mod supersingular;
pub mod theta;

pub use brandt::{BrandtCollection, ThetaSeries};
pub use error::{Error, Result};
pub use ideals::{ClassList, LeftIdeal};
pub use lattice::QuatLattice;
pub use ledger::{Check, Ledger};
pub use linalg::IntMatrix;
pub use quaternion::{QuatElement, QuatOrder, QuaternionAlgebra};
pub use record::{analyze, AnalysisOptions, AnalysisRecord};
pub use spectral::{MonodromyModule, SpectralData};
pub use supersingular::SupersingularSet;
pub use theta::{FieldVerdict, ThetaReport};
