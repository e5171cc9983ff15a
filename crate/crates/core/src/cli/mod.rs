//! Configuration, result tables and the experiment runner used by the binary.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::{load_config, parse_config, validate_config, Diagnostic, ExperimentConfig, EXPERIMENTS};
pub use experiments::{run_and_write, run_experiment};
pub use table::{Cell, ResultTable};

use crate::error::Error;

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Precondition(_)
        | Error::Size(_)
        | Error::Dimension { .. }
        | Error::SlotOutOfRange { .. }
        | Error::Io(_) => 2,
        Error::NonConvergence { .. } | Error::ScfNotConverged { .. } | Error::Quadrature { .. } => 3,
        Error::NotHermitian { .. } | Error::Invariant(_) | Error::Csv(_) => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_separate_input_numerics_and_bugs() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Precondition("x".into())), 2);
        assert_eq!(exit_code(&Error::ScfNotConverged { iterations: 3, history: vec![] }), 3);
        assert_eq!(exit_code(&Error::Quadrature { tol: 1e-9, estimate: 1.0 }), 3);
        assert_eq!(exit_code(&Error::Invariant("x".into())), 4);
        assert_eq!(exit_code(&Error::NotHermitian { row: 0, col: 1 }), 4);
    }
}
