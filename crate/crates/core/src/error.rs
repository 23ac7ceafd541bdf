use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("mode {0} out of range")]
    Mode(usize),

    #[error(
        "truncation N_c={dim} keeps population {population:.9} (need at least {required:.9})"
    )]
    Truncation {
        dim: usize,
        population: f64,
        required: f64,
    },

    /// A numerical check on a constructed object failed.
    #[error("{module}: {check} failed (defect {defect:.3e}, tolerance {tolerance:.3e})")]
    Check {
        module: &'static str,
        check: &'static str,
        defect: f64,
        tolerance: f64,
    },

    #[error("resource is displaced (largest first moment {0:.3e})")]
    Displaced(f64),

    #[error("state is not pure (purity {0:.12})")]
    NotPure(f64),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn check(module: &'static str, check: &'static str, defect: f64, tolerance: f64) -> Self {
        Error::Check {
            module,
            check,
            defect,
            tolerance,
        }
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// Module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Dimension(_) | Error::Mode(_) | Error::Truncation { .. } => "fock-core",
            Error::Check { module, .. } => module,
            Error::Displaced(_) => "teleport",
            Error::NotPure(_) | Error::Parse { .. } => "states-lib",
            Error::Unsupported(_) => "gaussian-core",
        }
    }

    /// Short machine-readable name of the failed check.
    pub fn check_name(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Mode(_) => "mode-range",
            Error::Truncation { .. } => "truncation-population",
            Error::Check { check, .. } => check,
            Error::Displaced(_) => "undisplaced-resource",
            Error::NotPure(_) => "purity",
            Error::Parse { .. } => "parse",
            Error::Unsupported(_) => "unsupported",
        }
    }

    /// `(defect, tolerance)` when the error carries them.
    pub fn defect_and_tolerance(&self) -> (Option<f64>, Option<f64>) {
        match self {
            Error::Truncation {
                population,
                required,
                ..
            } => (Some(1.0 - population), Some(1.0 - required)),
            Error::Check {
                defect, tolerance, ..
            } => (Some(*defect), Some(*tolerance)),
            Error::Displaced(d) => (Some(*d), Some(crate::teleport::DISPLACEMENT_TOL)),
            Error::NotPure(p) => (Some(1.0 - p), Some(crate::states::PURITY_TOL)),
            _ => (None, None),
        }
    }
}
