use std::fmt;

use thiserror::Error;

/// Pipeline stage a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Continuity,
    Momentum,
    Plate,
    Lift,
    Bogovskii,
    Grid,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Continuity => "continuity",
            Stage::Momentum => "momentum",
            Stage::Plate => "plate",
            Stage::Lift => "lift",
            Stage::Bogovskii => "bogovskii",
            Stage::Grid => "grid",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("linear solve failed in {context}: {reason}")]
    LinearSolve {
        context: &'static str,
        reason: String,
    },

    #[error("{context} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("divergence guard tripped: max |w| = {0:.3e} exceeds 10")]
    Blowout(f64),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
