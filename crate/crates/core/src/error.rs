use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {estimate:e}, error estimate {error:e})"
    )]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// A quantity that is positive in exact arithmetic came out non-positive.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    /// The finite-blocklength slack has no real solution at this operating point.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("matrix decomposition failed: {0}")]
    Decomposition(String),

    #[error("trial {index}: {source}")]
    Trial {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    /// Constrained-input diagnostics hit trials whose variance radicand is not positive.
    #[error("{}", describe_trials(.0))]
    NonPositiveVariance(Vec<usize>),
}

fn describe_trials(trials: &[usize]) -> String {
    let shown = &trials[..trials.len().min(8)];
    let more = if trials.len() > shown.len() {
        ", ..."
    } else {
        ""
    };
    format!(
        "non-positive variance radicand in {} trial(s): {:?}{more}",
        trials.len(),
        shown
    )
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
