//! Command-line front end for `cv-triparty`: parameter sweeps of the three
//! models written as self-describing CSV tables, and SVG plots of them.

pub mod commands;
pub mod config;
pub mod plot;
pub mod table;

pub use commands::{run, run_asym_tw, run_cavity, run_symmetric, Cli};
pub use plot::render_plot;
pub use table::{format_number, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or input files.
    #[error("{0}")]
    Usage(String),
    /// Parameters outside the regime a model describes.
    #[error("{0}")]
    Physical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<cv_triparty::Error> for CliError {
    fn from(e: cv_triparty::Error) -> Self {
        use cv_triparty::Error as E;
        match e {
            E::InvalidArgument(_) | E::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            E::Degenerate(_) | E::Unphysical { .. } | E::NoThreshold(_) | E::AboveThreshold { .. } => {
                CliError::Physical(e.to_string())
            }
        }
    }
}

impl CliError {
    /// 2 for argument and input problems, 3 for regime failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Csv(e) if !e.is_io_error() => 2,
            CliError::Physical(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
