//! Error classes mapped to process exit codes.

use levelcross::bounds::BoundsError;
use levelcross::diagnostics::DiagnosticsError;
use levelcross::simulate::SimulateError;

#[derive(Debug)]
pub enum CliError {
    /// Exit 1: bad flags, bad config, bad inputs.
    Config(String),
    /// Exit 2: a feasibility condition is violated; the message names the
    /// inequality.
    Infeasible(String),
    /// Exit 3: a numeric budget was exhausted.
    Numeric(String),
    /// Exit 1: filesystem trouble.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Infeasible(m)
            | CliError::Numeric(m)
            | CliError::Io(m) => m,
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> CliError {
        match e {
            BoundsError::NoFeasibleP { .. }
            | BoundsError::EmptyAlphaWindow { .. }
            | BoundsError::AlphaOutsideWindow { .. }
            | BoundsError::Divergent { .. } => CliError::Infeasible(e.to_string()),
            BoundsError::Budget { .. } => CliError::Numeric(e.to_string()),
            BoundsError::InvalidParam(_) | BoundsError::InfiniteM => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<SimulateError> for CliError {
    fn from(e: SimulateError) -> CliError {
        match e {
            SimulateError::NonIntegrableEnvelope { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> CliError {
        match e {
            DiagnosticsError::TooFewSamples { .. } => CliError::Config(e.to_string()),
            DiagnosticsError::Inapplicable(_) => CliError::Infeasible(e.to_string()),
            DiagnosticsError::Simulate(inner) => inner.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}
