//! Counting automorphic forms of bounded analytic conductor.
//!
//! The crate covers the computable side of the counting law `N(Q) ~ C Q^2`:
//! exact arithmetic functions on ideals ([`multiplicative`]), conductors
//! ([`conductor`]), local and regularized global Plancherel masses
//! ([`plancherel`]), an independent empirical count built from newform
//! dimensions ([`modforms`]) and the convergence of local Plancherel densities
//! to the semicircle ([`sato_tate`]).
//!
//! Real-valued code is generic over [`Real`] (`f32` or `f64`); exact local
//! factors also accept `Ratio<i128>`. The aliases below fix `f64`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conductor;
pub mod error;
pub mod field;
pub mod fit;
pub mod lattice;
pub mod modforms;
pub mod multiplicative;
pub mod plancherel;
pub mod primes;
pub mod quadrature;
pub mod sato_tate;
pub mod scalar;

pub use conductor::{ConductorConvention, Parity};
pub use error::{Error, Result};
pub use field::{IdealFactorization, NumberFieldSpec, PrimeIdeal};
pub use lattice::IdealLattice;
pub use modforms::DimensionTable;
pub use multiplicative::MultiplicativeFunction;
pub use scalar::{ExactField, Real};

/// Exact rational scalar for local factors at integer exponents.
pub type Rational = num_rational::Ratio<i128>;

pub type LocalRepData = conductor::LocalRepData<f64>;
pub type GlobalRepShape = conductor::GlobalRepShape<f64>;
pub type Conductor = conductor::Conductor<f64>;
pub type ArchNormalization = plancherel::ArchNormalization<f64>;
pub type MassReport = plancherel::MassReport<f64>;
pub type GlobalMassConfig = plancherel::GlobalMassConfig<f64>;
pub type MeasureOnInterval = sato_tate::MeasureOnInterval<f64>;
pub type QuadratureConfig = quadrature::QuadratureConfig<f64>;
