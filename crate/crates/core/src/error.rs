use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid generator parameters: {0}")]
    InvalidProfile(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("line measures have no pointwise spectrum; use the transform's closed-form path")]
    NoPointwiseSpectrum,

    #[error("negative argument to J1: {0}")]
    NegativeBesselArgument(f64),

    #[error("malformed PGM: {0}")]
    MalformedPgm(String),

    #[error("oscillation budget exceeded: needs {required} nodes on the {axis} axis (cap {cap})")]
    OscillationBudget {
        axis: &'static str,
        required: usize,
        cap: usize,
    },

    #[error("oscillation budget exceeded at scale {scale}: {source}")]
    ScanFailure {
        scale: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("invalid scale ladder: {0}")]
    InvalidScales(String),

    #[error("frequency grid point ({0}, {1}) lies outside the cone C")]
    OutsideCone(f64, f64),

    #[error("invalid analysis grid: {0}")]
    InvalidGrid(String),

    #[error("energy capture check failed: box holds {captured:.6} of the reference energy (need {required:.6})")]
    EnergyCapture { captured: f64, required: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
