use thiserror::Error;

/// Errors raised while building models or running estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{what} = {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("trial {index} failed: {source}")]
    Trial {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            constraint: constraint.into(),
        }
    }

    /// True for failures of the numerical kind, including those wrapped in a trial error.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
