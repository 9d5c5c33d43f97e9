//! `mfl`: generate reference signals, measures and pyramids, analyse them with wavelet
//! leaders, and run the verification suites.
//!
//! Exit codes: 0 on success, 1 on a validation or I/O error, 2 when a verification fails.

pub mod commands;
pub mod config;
pub mod format;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },
    #[error(transparent)]
    Core(#[from] mfleaders::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mfl", version, about = "Wavelet-leader multifractal analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a reference signal, pyramid or measure with its ground-truth sidecar.
    Generate {
        /// davenport, weierstrass, prescribed, two-exponent, transference, multinomial or cascade.
        construction: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Leaders, structure function, scaling function and Legendre spectrum of an input.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Pointwise exponent estimates at the configured points.
    Pointwise {
        input: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a verification suite by name or number, or `all`.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        flags: Flags,
    },
}

/// Flags mirror the config file keys and override them.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(short = 'J', long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub wavelet: Option<String>,
    /// Regression window `j1:j2`.
    #[arg(long)]
    pub fit: Option<String>,
    /// Moment grid `lo:hi:n`.
    #[arg(long)]
    pub pgrid: Option<String>,
    #[arg(long)]
    pub hgrid: Option<String>,
    #[arg(long)]
    pub qgrid: Option<String>,
    /// Depth window `n1:n2` for measure exponents.
    #[arg(long)]
    pub depths: Option<String>,
    /// Comma-separated points in [0, 1).
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// mfs1 or csv.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// Hölder profile: a number, `affine:a,b`, `sinusoid:m,a`, `piecewise:t/h;...` or `table:h;...`.
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub h_lo: Option<String>,
    #[arg(long)]
    pub h_hi: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub terms: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub weights: Option<String>,
    /// Cascade weight law: `lognormal:σ`, `two-point:v1,v2[,p]` or `uniform:s`.
    #[arg(long)]
    pub law: Option<String>,
    #[arg(long)]
    pub depth: Option<String>,
    #[arg(long)]
    pub s0: Option<String>,
    #[arg(long)]
    pub p0: Option<String>,
    /// Analyse the input as a measure through its partition function.
    #[arg(long)]
    pub tau: bool,
    /// Irregularity certificate parameters `alpha:beta`.
    #[arg(long)]
    pub certificate: Option<String>,
    /// Cross-check pointwise estimates with the oscillation oracle.
    #[arg(long)]
    pub oscillation: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let opts = [
            ("levels", &self.levels),
            ("wavelet", &self.wavelet),
            ("fit", &self.fit),
            ("pgrid", &self.pgrid),
            ("hgrid", &self.hgrid),
            ("qgrid", &self.qgrid),
            ("depths", &self.depths),
            ("points", &self.points),
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
            ("beta", &self.beta),
            ("h", &self.h),
            ("h-lo", &self.h_lo),
            ("h-hi", &self.h_hi),
            ("lambda", &self.lambda),
            ("terms", &self.terms),
            ("b", &self.b),
            ("weights", &self.weights),
            ("law", &self.law),
            ("depth", &self.depth),
            ("s0", &self.s0),
            ("p0", &self.p0),
            ("certificate", &self.certificate),
        ];
        let mut v: Vec<_> = opts.into_iter().filter_map(|(k, o)| o.clone().map(|s| (k, s))).collect();
        if self.tau {
            v.push(("tau", "true".into()));
        }
        if self.oscillation {
            v.push(("oscillation", "true".into()));
        }
        v
    }

    pub fn resolve(&self, extra: &[(&'static str, String)]) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
            None => None,
        };
        let mut pairs = extra.to_vec();
        pairs.extend(self.pairs());
        ExperimentConfig::resolve(file.as_deref(), &pairs)
    }
}

/// Caps the global thread pool at `MF_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MF_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Validation(format!("MF_THREADS: expected a positive integer, found {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("MF_THREADS: {e}")))?;
    }
    Ok(())
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Generate { construction, flags } => {
            let c = flags.resolve(&[("construction", construction.clone())])?;
            commands::generate(&c).map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
                true
            })
        }
        Command::Analyze { input, flags } => {
            let c = flags.resolve(&[])?;
            commands::analyze(input, &c).map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
                true
            })
        }
        Command::Pointwise { input, flags } => {
            let c = flags.resolve(&[])?;
            commands::pointwise(input, &c).map(|f| {
                println!("{}", f.display());
                true
            })
        }
        Command::Verify { suite, flags } => {
            let c = flags.resolve(&[])?;
            commands::verify(suite, &c)
        }
    });
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
