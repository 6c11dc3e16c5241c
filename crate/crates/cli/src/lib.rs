//! Command-line front end for the `mono3d-core` pipeline: lifting 2D
//! detections to cuboids, evaluating prediction sets, importing Omni3D
//! annotations and running oracle self-tests.

pub mod cli;
pub mod commands;
pub mod oracle;
pub mod synth;

use std::ffi::OsString;

use clap::Parser;

pub use commands::{cmd_convert_omni3d, cmd_eval, cmd_lift, cmd_selftest, LiftSummary, SelftestSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("self-test failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Selftest(_) => EXIT_SELFTEST,
        }
    }
}

impl From<mono3d_core::io::IoError> for CliError {
    fn from(e: mono3d_core::io::IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Progress reporting on stdout, silenced by `--quiet`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ui {
    pub quiet: bool,
}

impl Ui {
    pub fn progress(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(parsed) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(c: cli::Cli) -> Result<(), CliError> {
    let ui = Ui { quiet: c.quiet };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = c.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &c.command {
        cli::Command::Lift(a) => cmd_lift(a, ui).map(|s| {
            ui.progress(format!("lifted {}/{} detections -> {}", s.lifted, s.total, a.output.display()))
        }),
        cli::Command::Eval(a) => cmd_eval(a, ui).map(|r| {
            ui.progress(format!(
                "AP3D {:.2}  AR3D {:.2}  AP2D {:.2}  ({} categories) -> {}",
                100.0 * r.ap3d,
                100.0 * r.ar3d,
                100.0 * r.ap2d,
                r.categories.len(),
                a.out_dir.display()
            ))
        }),
        cli::Command::ConvertOmni3d(a) => cmd_convert_omni3d(a, ui).map(|_| ()),
        cli::Command::Selftest(a) => {
            let summary = cmd_selftest(a);
            print!("{summary}");
            if summary.passed() {
                Ok(())
            } else {
                Err(CliError::Selftest(summary.failed_suites().join(", ")))
            }
        }
    })
}
