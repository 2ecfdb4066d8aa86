use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (zero inverse, indefinite sqrt, non-normal input).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A point sits on (or too close to) the S-spectrum.
    #[error("singular: distance {distance:e} to the spectrum is below {threshold:e} (condition estimate {condition:e})")]
    Singular {
        distance: f64,
        threshold: f64,
        condition: f64,
    },

    /// Sphere sets that cannot be separated by a contour.
    #[error("separation error: gap {gap:e} is below {required:e}")]
    Separation { gap: f64, required: f64 },

    /// A partition that does not match the spectrum.
    #[error("partition error: {0}")]
    Partition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
