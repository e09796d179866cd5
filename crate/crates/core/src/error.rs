use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },

    #[error("wavevector {k} and wavelength {lambda} are inconsistent: k·λ = {product}, expected 2π")]
    InconsistentWavelength { k: f64, lambda: f64, product: f64 },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("energy {energy} lies within {distance:e} of the pole at n = {n} ({frame} frame)")]
    PoleProximity {
        energy: f64,
        n: usize,
        frame: &'static str,
        distance: f64,
    },

    #[error(
        "series did not converge at energy {energy} after {terms} terms \
         (tail {tail:e} vs scale {scale:e})"
    )]
    Convergence {
        energy: f64,
        terms: usize,
        tail: f64,
        scale: f64,
    },

    #[error("eigensolver failed on a {dim}x{dim} matrix (max |H| = {max_abs:e}, asymmetry {asymmetry:e})")]
    Eigensolver {
        dim: usize,
        max_abs: f64,
        asymmetry: f64,
    },

    #[error("dependency not satisfied: {0}")]
    Dependency(String),

    #[error(
        "time step {dt} too coarse: fastest relevant transition {omega_max} needs dt <= {limit}"
    )]
    NyquistGuard { dt: f64, omega_max: f64, limit: f64 },
}
