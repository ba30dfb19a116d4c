//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong across the measure, model, and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Two grid measures with different grid specifications were combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A translation would push more than the tolerated interior mass off the
    /// grid window.
    #[error("translation by {shift} would lose {lost:.3e} interior mass (tol {tol:.3e})")]
    WindowOverflow { shift: f64, lost: f64, tol: f64 },

    /// Empirical constructor got an empty sample.
    #[error("empty sample")]
    EmptySample,

    /// A cut-off below the grid window would degenerate to a point mass.
    #[error("cut-off {0} lies below the grid window")]
    DegenerateCutoff(f64),

    /// An iteration hit its budget before reaching the requested tolerance.
    #[error("no convergence after {iters} iterations (last residual {residual:.3e}, tol {tol:.3e})")]
    NotConverged {
        iters: usize,
        residual: f64,
        tol: f64,
    },

    /// A size guard tripped (cascade explicit construction, tree storage).
    #[error("size bound exceeded: {0}")]
    TooLarge(String),

    /// Bisection bracket did not straddle the transition.
    #[error("bad bracket: {0}")]
    BadBracket(String),

    /// A parameter search (b-ladder, block certification) ran out of ladder.
    #[error("search failed: {0}")]
    SearchFailed(String),

    /// Adapted-class contraction certification exhausted its ladders.
    #[error("certification failed: {0}")]
    CertificationFailed(String),

    /// The cavity integrability proxy failed: applying the operator would
    /// collapse the measure to a point at infinity.
    #[error("tail integrability lost: the push-forward collapses (step parity {parity})")]
    Collapse { parity: u8 },

    /// An argument fell outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A measure fell outside the model's admissible set.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// A tree evaluation asked for levels the schedule does not define.
    #[error("schedule too short: needs {needed} levels, has {have}")]
    ScheduleTooShort { needed: usize, have: usize },

    /// Configuration file or override problem (CLI exit code 2).
    #[error("config error: {0}")]
    Config(String),

    /// Graph file failed structural validation.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that mean "the numerics did not certify", as opposed
    /// to configuration mistakes; the CLI maps these to exit code 1.
    pub fn is_numeric(&self) -> bool {
        !matches!(self, Error::Config(_) | Error::Io(_) | Error::InvalidGraph(_))
    }
}
