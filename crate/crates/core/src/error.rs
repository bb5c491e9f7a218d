use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Green's function evaluated too close to a lattice point.
    #[error("Green's function singularity at ({x}, {y})")]
    Singularity { x: f64, y: f64 },

    #[error("vortices {first} and {second} are within {distance:e} of each other")]
    NearCollision {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// Co-tree edges of the phase reconstruction failed to close modulo 2π.
    #[error("phase closure defect {defect:e} exceeds tolerance (inconsistent momentum branch?)")]
    PhaseClosure { defect: f64 },

    #[error("grid of {grid} points cannot resolve cores of size {eps} (need eps * grid >= 8)")]
    Resolution { eps: f64, grid: usize },

    #[error("field blew up at t = {t}: max |u| = {max_modulus}")]
    BlowUp { t: f64, max_modulus: f64 },

    #[error("tracking failed at frame {frame}: {reason}")]
    Tracking { frame: usize, reason: String },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
