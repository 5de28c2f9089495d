//! The `cms` command: extremal-function profiles, verification suites and
//! SVG figures for a weight on `[-1, 1]`.
//!
//! Exit codes: 0 on success, 1 when a gating check fails, 2 for invalid
//! input (weight file, flags, suite names, preconditions), 3 for numerical
//! failures.

pub mod plot;
pub mod svg;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cms_core::canonical::CanonicalSystem;
use cms_core::extremal::{profile, read_samples, ExtremalSample};
use cms_core::verify::{default_suites, run_suite, write_reports_csv, write_reports_text, Suite, SuiteConfig};
use cms_core::weightfn::{presets, read_file, Weight};
use cms_core::{Error, Result};

pub use plot::PlotKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cms", version, about = "Extremal functions of the moment problem on [-1, 1]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Write the profile CSV (x, pi, pi_lower, lambda, pi_prime, w, excluded).
    Compute(Common),
    /// Run verification suites; exit 1 if a gating check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suite names; defaults to those fitting the weight.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Comma-separated degrees replacing each suite's own list.
        #[arg(long, value_delimiter = ',')]
        ns: Vec<usize>,
        /// Accuracy sought in the discontinuous case.
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        /// Perturb every measured quantity past its tolerance.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Write one SVG figure.
    Plot {
        #[command(flatten)]
        common: Common,
        /// pi-family, lambda, pi-prime-minus-w, phi-psi or qx.
        #[arg(long)]
        plot: String,
        /// The point of q_x.
        #[arg(long, default_value_t = 0.2)]
        x0: f64,
        /// Profile CSV to plot instead of recomputing the samples.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Weight spec JSON, or a preset name (constant, ramp, step, sqrt-ramp, reciprocal).
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Points of the uniform grid on [-1, 1]; the endpoints are not sampled.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Compute,
    Verify {
        /// `None` selects the suites fitting the weight's regularity.
        suites: Option<Vec<Suite>>,
        ns: Option<Vec<usize>>,
        eps: f64,
        inject_fault: bool,
    },
    Plot {
        kind: PlotKind,
        x0: f64,
        profile: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub weight: String,
    pub n: usize,
    pub grid: usize,
    pub out: Option<PathBuf>,
    pub command: Command,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (common, command) = match cli.command {
            CliCommand::Compute(common) => (common, Command::Compute),
            CliCommand::Verify {
                common,
                suite,
                ns,
                eps,
                inject_fault,
            } => {
                let suites = if suite.is_empty() || suite == ["default"] {
                    None
                } else {
                    Some(suite.iter().map(|s| s.trim().parse()).collect::<Result<Vec<Suite>>>()?)
                };
                let ns = (!ns.is_empty()).then_some(ns);
                (
                    common,
                    Command::Verify {
                        suites,
                        ns,
                        eps,
                        inject_fault,
                    },
                )
            }
            CliCommand::Plot {
                common,
                plot,
                x0,
                profile,
            } => (
                common,
                Command::Plot {
                    kind: plot.parse()?,
                    x0,
                    profile,
                },
            ),
        };
        let config = RunConfig {
            weight: common.weight,
            n: common.n,
            grid: common.grid,
            out: common.out,
            command,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Domain {
                what: "n",
                value: self.n as f64,
                domain: ">= 1",
            });
        }
        if self.grid < 2 {
            return Err(Error::Domain {
                what: "grid size",
                value: self.grid as f64,
                domain: ">= 2",
            });
        }
        if let Command::Verify { ns: Some(ns), eps, .. } = &self.command {
            if ns.contains(&0) {
                return Err(Error::Domain {
                    what: "n",
                    value: 0.0,
                    domain: ">= 1",
                });
            }
            if !(*eps > 0.0) {
                return Err(Error::Domain {
                    what: "eps",
                    value: *eps,
                    domain: "> 0",
                });
            }
        }
        Ok(())
    }

    /// Reads the weight file; a missing file named like a preset selects the preset.
    pub fn load_weight(&self) -> Result<Weight> {
        let path = Path::new(&self.weight);
        if !path.exists() {
            if let Some(w) = presets::by_name(&self.weight) {
                return Ok(w);
            }
        }
        read_file(path).map_err(|e| match e {
            Error::Io(io) => Error::Format(format!("cannot read weight file {}: {io}", path.display())),
            other => other,
        })
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Structural { .. }
        | Error::Invalid(_)
        | Error::Format(_)
        | Error::Misuse(_)
        | Error::Precondition(_)
        | Error::Domain { .. }
        | Error::DegreeCap { .. }
        | Error::Io(_) => EXIT_INPUT,
        _ => EXIT_NUMERICAL,
    }
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn cmd_compute(config: &RunConfig) -> Result<()> {
    let weight = config.load_weight()?;
    let p = profile(&weight, config.n, config.grid)?;
    if let Some(s) = p.failures().next() {
        return Err(Error::Inconsistency(format!(
            "sample at x = {} failed: {}",
            s.x,
            s.error.as_deref().unwrap_or("unknown error")
        )));
    }
    let mut buf = Vec::new();
    p.write_csv(&mut buf)?;
    write_out(config.out.as_deref(), &buf)
}

/// Runs the suites and writes the reports: text to `--out` (or standard
/// output) and, with `--out`, CSV next to it. Returns whether every gating
/// check passed.
pub fn cmd_verify(config: &RunConfig) -> Result<bool> {
    let Command::Verify {
        suites,
        ns,
        eps,
        inject_fault,
    } = &config.command
    else {
        return Err(Error::Misuse("cmd_verify needs a verify configuration".into()));
    };
    let weight = config.load_weight()?;
    let suites = suites.clone().unwrap_or_else(|| default_suites(&weight.regularity));
    let suite_config = SuiteConfig {
        n: config.n,
        grid: config.grid,
        ns: ns.clone(),
        eps: *eps,
        fault: *inject_fault,
    };
    let reports = run_suite(&weight, &suites, &suite_config)?;
    let mut text = Vec::new();
    write_reports_text(&reports, &mut text)?;
    let mut csv = Vec::new();
    write_reports_csv(&reports, &mut csv)?;
    match config.out.as_deref() {
        Some(path) if path.extension().is_some_and(|e| e == "csv") => {
            write_out(Some(path), &csv)?;
            write_out(Some(&path.with_extension("txt")), &text)?;
        }
        Some(path) => {
            write_out(Some(path), &text)?;
            write_out(Some(&path.with_extension("csv")), &csv)?;
        }
        None => write_out(None, &text)?,
    }
    Ok(reports.iter().all(|r| !r.failed_gate()))
}

fn samples_for(config: &RunConfig, system: &CanonicalSystem, csv: Option<&Path>) -> Result<Vec<ExtremalSample>> {
    match csv {
        Some(path) => {
            let file = File::open(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
            read_samples(io::BufReader::new(file))
        }
        None => Ok(cms_core::extremal::profile_with(system, config.grid)?.samples),
    }
}

/// Builds the figure; profile kinds read their samples from `--profile`
/// when given.
pub fn build_figure(config: &RunConfig) -> Result<svg::Figure> {
    let Command::Plot { kind, x0, profile } = &config.command else {
        return Err(Error::Misuse("build_figure needs a plot configuration".into()));
    };
    let system = CanonicalSystem::new(config.load_weight()?, config.n)?;
    Ok(match kind {
        PlotKind::PiFamily => plot::pi_family(&system, &samples_for(config, &system, profile.as_deref())?)?,
        PlotKind::Lambda => plot::lambda(&system, &samples_for(config, &system, profile.as_deref())?),
        PlotKind::PiPrimeMinusW => plot::pi_prime_minus_w(&system, &samples_for(config, &system, profile.as_deref())?),
        PlotKind::PhiPsi => plot::phi_psi(&system, config.grid),
        PlotKind::Qx => plot::qx(&system, config.grid, *x0)?,
    })
}

pub fn cmd_plot(config: &RunConfig) -> Result<()> {
    let svg = build_figure(config)?.render();
    write_out(config.out.as_deref(), svg.as_bytes())
}

/// Runs the command, reporting errors on standard error; returns the exit status.
pub fn run(config: &RunConfig) -> i32 {
    let result = match config.command {
        Command::Compute => cmd_compute(config).map(|()| true),
        Command::Verify { .. } => cmd_verify(config),
        Command::Plot { .. } => cmd_plot(config).map(|()| true),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("cms: a gating check failed");
            EXIT_GATE
        }
        Err(e) => {
            eprintln!("cms: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        let mut all = vec!["cms"];
        all.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(all).expect("flags parse"))
    }

    #[test]
    fn verify_flags() {
        let c = parse(&[
            "verify",
            "--weight",
            "ramp",
            "--suite",
            "cms,qx",
            "--ns",
            "4,8",
            "--inject-fault",
        ])
        .unwrap();
        assert_eq!(
            c.command,
            Command::Verify {
                suites: Some(vec![Suite::Cms, Suite::Qx]),
                ns: Some(vec![4, 8]),
                eps: 0.2,
                inject_fault: true
            }
        );
        let c = parse(&["verify", "--weight", "ramp", "--suite", "default"]).unwrap();
        assert!(matches!(c.command, Command::Verify { suites: None, .. }));
    }

    #[test]
    fn bad_input_maps_to_exit_2() {
        let e = parse(&["verify", "--weight", "ramp", "--suite", "nope"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_INPUT);
        let e = parse(&["compute", "--weight", "ramp", "--n", "0"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_INPUT);
        let e = parse(&["plot", "--weight", "ramp", "--plot", "pie"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_INPUT);
        let c = parse(&["compute", "--weight", "/nonexistent/w.json"]).unwrap();
        assert_eq!(exit_code(&c.load_weight().unwrap_err()), EXIT_INPUT);
    }

    #[test]
    fn numerical_errors_map_to_exit_3() {
        assert_eq!(exit_code(&Error::Construction("x".into())), EXIT_NUMERICAL);
        assert_eq!(
            exit_code(&Error::IllConditioned {
                k: 3,
                reason: "r".into()
            }),
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn presets_resolve_by_name() {
        let c = parse(&["plot", "--weight", "sqrt-ramp", "--plot", "qx", "--x0", "0.5"]).unwrap();
        assert_eq!(c.load_weight().unwrap(), presets::sqrt_ramp());
    }
}
