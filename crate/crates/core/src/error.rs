use std::fmt;

/// A single violated parameter constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    /// Human-readable constraint, e.g. `"n_emitters ≥ 1"`.
    pub constraint: &'static str,
}

impl Violation {
    pub fn new(field: &'static str, constraint: &'static str) -> Self {
        Self { field, constraint }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.constraint)
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter(s): {}", join(.0))]
    InvalidParameter(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coupling matrices are not circulant (deviation {deviation:e})")]
    NonCirculantInput { deviation: f64 },

    #[error("thermal transition rates diverge at infinite temperature (beta = 0)")]
    InfiniteTemperatureRate,

    #[error("series did not converge within {cap} terms")]
    SlowConvergence { cap: usize },

    #[error("a populated mode has no outflow (gamma_t = 0): steady-state population is unbounded")]
    DegenerateSink,

    #[error("balance matrix is numerically singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("quadrature did not reach the requested tolerance (estimate {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },
}

impl Error {
    /// True for failures of a numerical method rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::SlowConvergence { .. }
                | Error::DegenerateSink
                | Error::InfiniteTemperatureRate
                | Error::NonCirculantInput { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check(violations: Vec<Violation>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(violations))
    }
}
