//! Command-line front end. [`run`] returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::heat_kernel::{k0, k1, k1_upper_bound_terms, KernelPoint};
use crate::invariants::{CoveringKind, Mode};
use crate::numerics::QuadratureSpec;
use crate::scenario::{evaluate, report_json, ScenarioFile};
use crate::verify::{self, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

pub const SWEEP_PARAMS: [&str; 6] = [
    "base.systole",
    "base.lambda1",
    "cover.genus",
    "cover.lambda1",
    "r0",
    "R0",
];

#[derive(Debug, Parser)]
#[command(
    name = "deltabound",
    version,
    about = "Effective upper bounds for Faltings's delta invariant"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the bound for a scenario file and print a JSON report.
    Bound {
        file: PathBuf,
        /// paper, paper_faithful or tight; defaults to the file's mode.
        #[arg(long)]
        mode: Option<String>,
        /// Use the rounded statement constants.
        #[arg(long)]
        rounded: bool,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
    /// Evaluate the bound along one parameter and print CSV.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        rounded: bool,
    },
    /// Tabulate the heat kernels and the weight-one upper bound terms.
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
    },
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Config(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Convergence { .. } => EXIT_DOMAIN,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Bound { file, mode, rounded } => cmd_bound(&file, mode.as_deref(), rounded, out),
        Command::Verify { suite } => cmd_verify(suite.as_deref(), out),
        Command::Sweep {
            file,
            param,
            values,
            mode,
            rounded,
        } => cmd_sweep(&file, &param, &values, mode.as_deref(), rounded, out),
        Command::Kernel { t, rho } => cmd_kernel(t, &rho, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("i/o error: {e}"))
}

fn load(path: &Path) -> crate::Result<ScenarioFile> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ScenarioFile::parse(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_mode(mode: Option<&str>) -> crate::Result<Option<Mode>> {
    mode.map(str::parse).transpose()
}

fn cmd_bound(path: &Path, mode: Option<&str>, rounded: bool, out: &mut dyn Write) -> crate::Result<i32> {
    let mode = parse_mode(mode)?;
    let file = load(path)?;
    let ev = file.evaluation(mode, rounded);
    let outcome = evaluate(&file, &ev)?;
    out.write_all(report_json(&file, &outcome).as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_verify(suite: Option<&str>, out: &mut dyn Write) -> crate::Result<i32> {
    let report = verify::run(suite)?;
    for s in &report.suites {
        for c in &s.checks {
            let tag = match c.outcome {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
                Outcome::Inconclusive => "INCONCLUSIVE",
            };
            writeln!(out, "{tag} [{}] {} (margin {:.3e})", s.name, c.name, c.margin).map_err(io_err)?;
        }
    }
    writeln!(out, "suite,checks_run,failures,inconclusive,worst_margin").map_err(io_err)?;
    for s in &report.suites {
        writeln!(
            out,
            "{},{},{},{},{:.6e}",
            s.name,
            s.checks_run(),
            s.failures(),
            s.inconclusive(),
            s.worst_margin()
        )
        .map_err(io_err)?;
    }
    writeln!(out, "exit_code_hint,{}", report.exit_code_hint()).map_err(io_err)?;
    Ok(if report.exit_code_hint() == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn parse_list(values: &str) -> crate::Result<Vec<f64>> {
    values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::Usage(format!("not a number: {v:?}")))
        })
        .collect()
}

/// Returns a copy of `file` with one parameter replaced.
pub fn with_param(file: &ScenarioFile, param: &str, value: f64) -> crate::Result<ScenarioFile> {
    let mut f = file.clone();
    let scn = &mut f.scenario;
    let trivial = scn.kind == CoveringKind::Trivial;
    let genus = |v: f64| -> crate::Result<u64> {
        if v.fract() == 0.0 && v >= 0.0 && v < u64::MAX as f64 {
            Ok(v as u64)
        } else {
            Err(Error::Usage(format!("cover.genus takes integers, got {v}")))
        }
    };
    match param {
        "base.systole" => scn.base.systole = value,
        "base.lambda1" => scn.base.lambda1 = value,
        "cover.genus" | "cover.lambda1" => {
            let g = if param == "cover.genus" {
                Some(genus(value)?)
            } else {
                None
            };
            let target = if trivial {
                &mut scn.base
            } else {
                scn.cover.get_or_insert_with(|| file.scenario.base.clone())
            };
            match g {
                Some(g) => target.genus = g,
                None => target.lambda1 = value,
            }
        }
        "r0" | "R0" => match &mut scn.kind {
            CoveringKind::Ramified { r0, big_r0 } => {
                if param == "r0" {
                    *r0 = value;
                } else {
                    *big_r0 = value;
                }
            }
            other => {
                return Err(Error::Usage(format!(
                    "{param} only applies to ramified scenarios, not {}",
                    other.name()
                )))
            }
        },
        other => {
            return Err(Error::Usage(format!(
                "unknown sweep parameter {other:?}; expected one of {}",
                SWEEP_PARAMS.join(", ")
            )))
        }
    }
    if trivial {
        if let Some(c) = &mut scn.cover {
            *c = scn.base.clone();
        }
    }
    Ok(f)
}

fn cmd_sweep(
    path: &Path,
    param: &str,
    values: &str,
    mode: Option<&str>,
    rounded: bool,
    out: &mut dyn Write,
) -> crate::Result<i32> {
    if !SWEEP_PARAMS.contains(&param) {
        return Err(Error::Usage(format!(
            "unknown sweep parameter {param:?}; expected one of {}",
            SWEEP_PARAMS.join(", ")
        )));
    }
    let mode = parse_mode(mode)?;
    let values = parse_list(values)?;
    let file = load(path)?;
    writeln!(out, "param,value,log10_bound,decimal").map_err(io_err)?;
    for v in values {
        let f = with_param(&file, param, v)?;
        f.scenario.validate()?;
        let outcome = evaluate(&f, &f.evaluation(mode, rounded))?;
        let r = &outcome.main;
        writeln!(out, "{param},{v},{:.12e},{}", r.log10(), r.decimal()).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn cmd_kernel(t: f64, rho: &str, out: &mut dyn Write) -> crate::Result<i32> {
    let rhos = parse_list(rho)?;
    let spec = QuadratureSpec::default();
    // validate everything before printing anything
    for &r in &rhos {
        KernelPoint::new(t, r)?;
    }
    if rhos.is_empty() {
        KernelPoint::new(t, 0.0)?;
    }
    writeln!(out, "rho,k0,k0_err,k1,k1_err,a1,a2,a3,upper_sum,dominance").map_err(io_err)?;
    for r in rhos {
        let p = KernelPoint::new(t, r)?;
        let a = k0(p, &spec)?;
        let b = k1(p, &spec)?;
        let upper = if r > 0.0 {
            let u = k1_upper_bound_terms(p)?;
            let flag = b.value - b.error_estimate <= u.sum();
            format!("{:.12e},{:.12e},{:.12e},{:.12e},{flag}", u.a1, u.a2, u.a3, u.sum())
        } else {
            ",,,,".to_string()
        };
        writeln!(
            out,
            "{r},{:.12e},{:.3e},{:.12e},{:.3e},{upper}",
            a.value, a.error_estimate, b.value, b.error_estimate
        )
        .map_err(io_err)?;
    }
    Ok(EXIT_OK)
}
