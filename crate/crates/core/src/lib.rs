//! Continuous shearlet systems on the plane: admissible generators, the
//! continuous shearlet transform of analytic test distributions and sampled
//! fields, decay-exponent classification of singularities, and numerical
//! certification of the structural identities (admissibility, energy
//! identity, localization bounds).

pub mod analysis;
pub mod error;
pub mod generator;
pub mod quad;
pub mod spectra;
pub mod transform;
pub mod validation;

pub use error::{Error, Result};
pub use generator::{
    BumpParams, FrequencyRegion, GeneratorProfile, ShearletIndex, Side, Sided, Variant,
};
pub use spectra::AnalyticDistribution;
pub use transform::QuadratureSpec;
