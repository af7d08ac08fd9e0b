//! Command-line workbench for the time-dependent SU(2) Gross-Neveu model.
//!
//! Wraps `tdgn-core` with typed per-command parameters, JSON/CSV emission and a
//! golden-corpus replay harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod corpus;
pub mod output;
pub mod params;

/// Version of the JSON envelope written by every command.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] tdgn_core::Error),
    #[error("io: {0}")]
    Io(String),
}

impl RunError {
    /// 1 usage, 2 tolerance or formula failure, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        use tdgn_core::Error as E;
        match self {
            RunError::Usage(_) | RunError::Io(_) => 1,
            RunError::Numeric(E::Domain(_) | E::Capacity(_)) => 1,
            RunError::Numeric(E::FormulaDiscrepancy(_)) => 2,
            RunError::Numeric(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        use tdgn_core::Error as E;
        match self {
            RunError::Usage(_) => "usage",
            RunError::Io(_) => "io",
            RunError::Numeric(e) => match e {
                E::Domain(_) => "domain",
                E::Singularity(_) => "singularity",
                E::Capacity(_) => "capacity",
                E::NoConvergence { .. } => "no_convergence",
                E::IllConditioned { .. } => "ill_conditioned",
                E::Degenerate(_) => "degenerate",
                E::FormulaDiscrepancy(_) => "formula_discrepancy",
            },
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}
