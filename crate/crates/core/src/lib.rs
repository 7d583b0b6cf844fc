//! Growth theory for regular homeomorphic solutions of the nonlinear Beltrami
//! equation with a Jacobian term,
//!
//! ```text
//! f_z̄ - ((z - z0)/conj(z - z0)) f_z = K(z) |J_f|^{1/2},
//! ```
//!
//! evaluated numerically: dilatation functionals, isoperimetric area
//! inequalities, growth envelopes, extremal radial solutions and PDE residuals.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

// `!(x > 0)` is used throughout on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex_polar;
pub mod dilatation;
pub mod error;
pub mod format;
pub mod growth;
pub mod mappings;
pub mod quadrature;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::CircleQuadrature;
pub use scalar::{Cplx, Real};

pub type PlanePoint = complex_polar::PlanePoint<f64>;
pub type PolarOffset = complex_polar::PolarOffset<f64>;
pub type WirtingerPair = complex_polar::WirtingerPair<f64>;
pub type PolarDerivPair = complex_polar::PolarDerivPair<f64>;
pub type MappingSpec = mappings::MappingSpec<f64>;
pub type RadialTable = mappings::RadialTable<f64>;
pub type CoefficientField = dilatation::CoefficientField<f64>;
pub type SigmaField = dilatation::SigmaField<f64>;
pub type FieldKind = dilatation::FieldKind<f64>;
pub type GridTable = dilatation::GridTable<f64>;
pub type DerivativeMode = dilatation::DerivativeMode<f64>;
pub type KappaProfile = growth::KappaProfile<f64>;
pub type RadiusLadder = growth::RadiusLadder<f64>;
pub type GrowthExponent = growth::GrowthExponent<f64>;
pub type ExtremalSolution = verify::ExtremalSolution<f64>;
pub type Annulus = verify::Annulus<f64>;
pub type SharpnessExample = verify::SharpnessExample<f64>;
