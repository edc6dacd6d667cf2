//! Command-line runner: `holoframe <subcommand> [flags]`.
//!
//! Settings are resolved from built-in defaults, then an optional
//! `--config` file of `key = value` lines, then flags. Exit status is 0 on
//! success, 1 on a solver error (its name goes to stderr) and 2 on a
//! configuration error.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::run;
pub use config::{parse_config_text, CommandKind, RunConfig};
pub use output::{pgm_bytes, Artifacts, FIXED_CONSTANTS};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(
    name = "holoframe",
    version,
    about = "Connection dbar experiments on the unit disc"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Grid nodes per axis (odd, at least 33).
    #[arg(long)]
    n: Option<String>,
    /// Fiber dimension.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Threshold for the Hodge condition.
    #[arg(long)]
    eps: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// File of `key = value` settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "tol-coulomb")]
    tol_coulomb: Option<String>,
    #[arg(long = "tol-fp")]
    tol_fp: Option<String>,
    #[arg(long = "tol-hm")]
    tol_hm: Option<String>,
    #[arg(long = "tol-input")]
    tol_input: Option<String>,
    #[arg(long = "tol-conf")]
    tol_conf: Option<String>,
    #[arg(long = "tol-wente")]
    tol_wente: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hodge decomposition of a connection form.
    Hodge {
        #[command(flatten)]
        common: Common,
        /// random | zero
        #[arg(long)]
        field: Option<String>,
        /// L2 norm of the random form.
        #[arg(long)]
        l2: Option<String>,
    },
    /// Wente problem and its sup-norm ratio.
    Wente {
        #[command(flatten)]
        common: Common,
        /// analytic | random
        #[arg(long)]
        case: Option<String>,
    },
    /// Lebesgue, Lorentz and Hardy norms of a field.
    Norms {
        #[command(flatten)]
        common: Common,
        /// random | inverse-radius
        #[arg(long)]
        field: Option<String>,
        /// Read the field from a GFLD dump instead.
        #[arg(long)]
        input: Option<String>,
    },
    /// Coulomb gauge by energy descent.
    Coulomb {
        #[command(flatten)]
        common: Common,
        /// random | zero
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        l2: Option<String>,
    },
    /// Holomorphic frame S = P Q.
    Frame {
        #[command(flatten)]
        common: Common,
        /// zero | random | harmonic
        #[arg(long)]
        omega: Option<String>,
        #[arg(long)]
        l2: Option<String>,
        /// Dilation of the stereographic map behind `harmonic`.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Holomorphic representative of a closed section.
    Regularity {
        #[command(flatten)]
        common: Common,
        /// zero | harmonic
        #[arg(long)]
        omega: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Harmonic map relaxation into the unit sphere.
    Harmonic {
        #[command(flatten)]
        common: Common,
        /// stereographic | perturbed | constant
        #[arg(long)]
        boundary: Option<String>,
        /// tangent | flow
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        /// Amplitude of the `perturbed` boundary term.
        #[arg(long)]
        perturbation: Option<String>,
    },
    /// Prescribed-mean-curvature identities on a conformal patch.
    Pmc {
        #[command(flatten)]
        common: Common,
        /// sphere | plane
        #[arg(long)]
        patch: Option<String>,
        /// Factor applied to the mean curvature vector.
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<String>,
    },
    /// Resolution scan of the singular connection.
    Counterexample {
        #[command(flatten)]
        common: Common,
        /// Comma-separated odd grid sizes, increasing.
        #[arg(long)]
        resolutions: Option<String>,
    },
}

type Flags = Vec<(&'static str, String)>;

fn push(flags: &mut Flags, key: &'static str, v: Option<String>) {
    if let Some(v) = v {
        flags.push((key, v));
    }
}

impl Common {
    fn into_flags(self, flags: &mut Flags) -> Option<PathBuf> {
        push(flags, "n", self.n);
        push(flags, "m", self.m);
        push(flags, "seed", self.seed);
        push(flags, "eps", self.eps);
        push(flags, "out", self.out);
        push(flags, "tol-coulomb", self.tol_coulomb);
        push(flags, "tol-fp", self.tol_fp);
        push(flags, "tol-hm", self.tol_hm);
        push(flags, "tol-input", self.tol_input);
        push(flags, "tol-conf", self.tol_conf);
        push(flags, "tol-wente", self.tol_wente);
        self.config
    }
}

impl Command {
    fn split(self) -> (CommandKind, Option<PathBuf>, Flags) {
        let mut f = Flags::new();
        let (kind, config) = match self {
            Command::Hodge { common, field, l2 } => {
                push(&mut f, "field", field);
                push(&mut f, "l2", l2);
                (CommandKind::Hodge, common.into_flags(&mut f))
            }
            Command::Coulomb { common, field, l2 } => {
                push(&mut f, "field", field);
                push(&mut f, "l2", l2);
                (CommandKind::Coulomb, common.into_flags(&mut f))
            }
            Command::Wente { common, case } => {
                push(&mut f, "case", case);
                (CommandKind::Wente, common.into_flags(&mut f))
            }
            Command::Norms {
                common,
                field,
                input,
            } => {
                push(&mut f, "field", field);
                push(&mut f, "input", input);
                (CommandKind::Norms, common.into_flags(&mut f))
            }
            Command::Frame {
                common,
                omega,
                l2,
                lambda,
            } => {
                push(&mut f, "omega", omega);
                push(&mut f, "l2", l2);
                push(&mut f, "lambda", lambda);
                (CommandKind::Frame, common.into_flags(&mut f))
            }
            Command::Regularity {
                common,
                omega,
                lambda,
            } => {
                push(&mut f, "omega", omega);
                push(&mut f, "lambda", lambda);
                (CommandKind::Regularity, common.into_flags(&mut f))
            }
            Command::Harmonic {
                common,
                boundary,
                method,
                lambda,
                perturbation,
            } => {
                push(&mut f, "boundary", boundary);
                push(&mut f, "method", method);
                push(&mut f, "lambda", lambda);
                push(&mut f, "perturbation", perturbation);
                (CommandKind::Harmonic, common.into_flags(&mut f))
            }
            Command::Pmc {
                common,
                patch,
                sign,
            } => {
                push(&mut f, "patch", patch);
                push(&mut f, "sign", sign);
                (CommandKind::Pmc, common.into_flags(&mut f))
            }
            Command::Counterexample {
                common,
                resolutions,
            } => {
                push(&mut f, "resolutions", resolutions);
                (CommandKind::Counterexample, common.into_flags(&mut f))
            }
        };
        (kind, config, f)
    }
}

/// Parse arguments into a validated run configuration.
pub fn configure<I, T>(args: I) -> std::result::Result<RunConfig, ConfigFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ConfigFailure::Clap)?;
    let (kind, config, flags) = cli.command.split();
    let file = config
        .map(|p| {
            let text = fs::read_to_string(&p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_config_text(&text)
        })
        .transpose()
        .map_err(ConfigFailure::Invalid)?;
    RunConfig::resolve(kind, file, flags).map_err(ConfigFailure::Invalid)
}

#[derive(Debug)]
pub enum ConfigFailure {
    /// Argument syntax error, or a `--help` / `--version` request.
    Clap(clap::Error),
    Invalid(Error),
}

/// Run the command line and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match configure(args) {
        Ok(cfg) => cfg,
        Err(ConfigFailure::Clap(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(ConfigFailure::Invalid(e)) => {
            eprintln!("Config: {e}");
            return 2;
        }
    };
    match run(&cfg) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("Config: {e}");
            2
        }
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coulomb_keeps_its_own_kind() {
        let cfg = configure(["holoframe", "coulomb", "--n", "33"]).unwrap();
        assert_eq!(cfg.command, CommandKind::Coulomb);
        let cfg = configure(["holoframe", "hodge", "--n", "33"]).unwrap();
        assert_eq!(cfg.command, CommandKind::Hodge);
    }

    #[test]
    fn config_errors_exit_with_two() {
        assert_eq!(main_with_args(["holoframe", "hodge", "--n", "64"]), 2);
        assert_eq!(main_with_args(["holoframe", "hodge", "--bogus"]), 2);
        assert_eq!(main_with_args(["holoframe", "harmonic", "--m", "2"]), 2);
    }
}
