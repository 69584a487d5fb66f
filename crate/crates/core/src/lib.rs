//! Numerical toolkit for finite Blaschke products and interpolation in the
//! model spaces `K_B = H² ⊖ B H²`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: pseudohyperbolic / hyperbolic metrics, Möbius maps and the
//!   conversion of pseudohyperbolic disks into Euclidean ones.
//! - [`blaschke`]: zero sequences and finite Blaschke products with stable
//!   factor-wise evaluation, derivatives, cofactors and Carleson quantities.
//! - [`sequences`]: named sequence generators, interlacing and seeded
//!   pseudohyperbolic perturbation sampling.
//! - [`criteria`]: Frostman, Cohn, Dyakonov, Vasyunin, cross-modulus,
//!   separation/nearness and the perturbation inequality report.
//! - [`interpolation`]: the closed-form `K_B` interpolant, Lebesgue constants,
//!   union interpolation in `K_{BC}`, the nearby-sequence iteration and
//!   Frostman-shift zeros.
//!
//! Every computation works on finite truncations, where `K_B` is
//! finite-dimensional and interpolants are unique.

pub mod blaschke;
pub mod criteria;
pub mod error;
pub mod geometry;
pub mod interpolation;
pub mod sequences;

pub use num_complex::Complex64;

pub use blaschke::{BlaschkeProduct, CarlesonReport, ZeroSequence};
pub use criteria::{CircleGrid, CriterionName, CriterionReport, PerturbationReport, Witness};
pub use error::{Error, Result};
pub use geometry::{CirclePoint, DiskPoint, EuclideanDisk};
pub use interpolation::{InterpolantRep, IterationTrace, TargetVector, UnionConstruction};
pub use sequences::{PairedSequences, RngSeed};
