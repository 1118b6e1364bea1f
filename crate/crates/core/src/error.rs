use std::fmt;

use thiserror::Error;

use crate::grid::Axis;

/// Conserved or primitive quantity named in positivity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Density,
    Pressure,
    InternalEnergy,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Density => "density",
            Field::Pressure => "pressure",
            Field::InternalEnergy => "internal energy",
        })
    }
}

/// Everything that can go wrong while building, stepping, or auditing a run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive {field}: {value:e}")]
    Positivity { field: Field, value: f64 },

    #[error("non-positive {field} ({value:e}) at strip cell {cell}")]
    PositivityAt {
        cell: usize,
        field: Field,
        value: f64,
    },

    #[error("invalid gas model: {0}")]
    GasModel(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("strip length mismatch: expected {expected} interior cells, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible decomposition: {0}")]
    Decomposition(String),

    #[error("subdomain ({i}, {j}) has no {axis} neighbor")]
    NoNeighbor { i: usize, j: usize, axis: Axis },

    #[error("subdomain ({i}, {j}) needs its {side} interface for the {axis} sweep")]
    MissingInterface {
        i: usize,
        j: usize,
        axis: Axis,
        side: &'static str,
    },

    #[error("progress protocol violation: worker {worker} published {published} after {previous}")]
    Protocol {
        worker: usize,
        previous: usize,
        published: usize,
    },

    #[error("neighbor wait timed out: {0}")]
    Deadlock(String),

    #[error("task graph cannot make progress: {0}")]
    UnsatisfiableGraph(String),

    #[error("Riemann data generates vacuum (critical velocity {critical:e} <= {jump:e})")]
    Vacuum { critical: f64, jump: f64 },

    #[error("root finder did not converge: {0}")]
    NoConvergence(String),

    #[error("step {step}, {axis} sweep, strip {strip}: {source}")]
    Sweep {
        step: usize,
        axis: Axis,
        strip: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("subdomain ({i}, {j}): {source}")]
    Subdomain {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("checksum mismatch: {0}")]
    Checksum(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-parsable category used by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Positivity { .. } | Error::PositivityAt { .. } => "positivity",
            Error::GasModel(_) | Error::Config(_) => "config",
            Error::Index(_) | Error::LengthMismatch { .. } | Error::Domain(_) => "domain",
            Error::Decomposition(_) | Error::NoNeighbor { .. } | Error::MissingInterface { .. } => {
                "decomposition"
            }
            Error::Protocol { .. } | Error::Deadlock(_) => "protocol",
            Error::UnsatisfiableGraph(_) => "task-graph",
            Error::Vacuum { .. } | Error::NoConvergence(_) => "oracle",
            Error::Sweep { source, .. } | Error::Subdomain { source, .. } => source.category(),
            Error::Checksum(_) => "checksum",
            Error::Validation(_) => "validation",
            Error::Io(_) | Error::Csv(_) => "io",
        }
    }

    pub(crate) fn in_sweep(self, step: usize, axis: Axis, strip: usize) -> Error {
        Error::Sweep {
            step,
            axis,
            strip,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_subdomain(self, i: usize, j: usize) -> Error {
        Error::Subdomain {
            i,
            j,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
