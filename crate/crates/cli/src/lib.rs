//! Front end for `ncf2fd`: turns flags and config files into a sweep over
//! SNR and antenna count, runs it, and writes CSV or JSON.

// `!(x > y)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{parse_config, Format, Mode, SweepSpec};
pub use output::{emit, emit_csv, emit_json, parse_csv, write_csv, write_json, HEADER};
pub use sweep::{run_sweep, ResultRow, SweepOutput};

use std::ffi::OsString;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

/// Runs the whole program. Per-point failures still produce output but
/// make the run end with a runtime error.
pub fn run<I, T>(args: I) -> Result<SweepOutput, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = parse_config(args)?;
    let out = run_sweep(&spec);
    emit(&spec, &out.rows)?;
    let failed = out.rows.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        return Err(CliError::Runtime(format!(
            "{failed} of {} rows failed:\n  {}",
            out.rows.len(),
            out.warnings.join("\n  ")
        )));
    }
    Ok(out)
}
