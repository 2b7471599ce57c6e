use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use piestab_core::analysis::{self, AnalysisConfig, AnalysisError, Outputs, SolverChoice, SweepSpec};
use piestab_core::polyalg::{parse_poly, Params};
use piestab_core::simulate::{self, SimConfig};

/// Stability analysis of coupled PDE-ODE systems.
#[derive(Debug, Parser)]
#[command(name = "piestab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a Lyapunov certificate of exponential stability.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        /// Write the SDP in SDPA sparse format.
        #[arg(long, value_name = "PATH")]
        dump_sdp: Option<PathBuf>,
        /// Write the certificate when the verdict is stable-certified.
        #[arg(long, value_name = "PATH")]
        cert: Option<PathBuf>,
    },
    /// Bisect on a parameter for the largest certified value.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        param: String,
        /// Search range as LO,HI.
        #[arg(long, value_name = "LO,HI")]
        range: String,
        #[arg(long, default_value_t = analysis::DEFAULT_SWEEP_TOL)]
        tol: f64,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Finite-difference simulation; prints a JSON summary.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 10.0)]
        tfinal: f64,
        /// Time step; defaults to 1e-3 (b - a)^2.
        #[arg(long)]
        dt: Option<f64>,
        /// Write the energy trace as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Override a declared parameter.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Ipm,
    Clarabel,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 1)]
    d1: u32,
    #[arg(long, default_value_t = 1)]
    d2: u32,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    /// Margin on the Lyapunov operator; defaults to --eps.
    #[arg(long, allow_negative_numbers = true)]
    eps_pos: Option<f64>,
    /// Margin on the derivative; defaults to --eps.
    #[arg(long, allow_negative_numbers = true)]
    eps_neg: Option<f64>,
    /// Raise both degrees after an infeasible attempt.
    #[arg(long)]
    auto_degree: bool,
    #[arg(long, default_value_t = analysis::DEFAULT_MAX_DEGREE)]
    max_degree: u32,
    #[arg(long, value_enum, default_value_t = SolverArg::Ipm)]
    solver: SolverArg,
    /// Seconds per solve.
    #[arg(long)]
    timeout: Option<f64>,
    /// Negativity-basis degrees as D1,D2 instead of the covering rule.
    #[arg(long, value_name = "D1,D2")]
    neg_degrees: Option<String>,
    /// Extra bivariate degree added by the covering rule.
    #[arg(long, default_value_t = 0)]
    neg_margin: u32,
    /// Override a declared parameter.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

fn overrides(pairs: &[String]) -> anyhow::Result<Params> {
    let mut out = Params::new();
    for pair in pairs {
        let Some((name, value)) = pair.split_once('=') else {
            bail!("expected NAME=VALUE, got '{pair}'");
        };
        let p = parse_poly(value.trim(), &Params::new()).with_context(|| format!("value of '{name}'"))?;
        if !p.is_constant() {
            bail!("value of '{name}' must be a number");
        }
        out.insert(name.trim().to_string(), p.constant_term());
    }
    Ok(out)
}

impl SolveArgs {
    fn config(&self) -> anyhow::Result<AnalysisConfig> {
        Ok(AnalysisConfig {
            d1: self.d1,
            d2: self.d2,
            eps_pos: self.eps_pos.unwrap_or(self.eps),
            eps_neg: self.eps_neg.unwrap_or(self.eps),
            auto_degree: self.auto_degree,
            max_degree: self.max_degree,
            solver: match self.solver {
                SolverArg::Ipm => SolverChoice::InteriorPoint,
                SolverArg::Clarabel => SolverChoice::Clarabel,
            },
            timeout: self.timeout,
            neg_margin: self.neg_margin,
            neg_degrees: self.neg_degrees.as_deref().map(parse_degrees).transpose()?,
            overrides: overrides(&self.set)?,
            ..Default::default()
        })
    }
}

fn parse_degrees(text: &str) -> anyhow::Result<(u32, u32)> {
    let (a, b) = text.split_once(',').context("degrees must be D1,D2")?;
    Ok((a.trim().parse().context("first degree")?, b.trim().parse().context("second degree")?))
}

fn parse_range(text: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = text.split_once(',').context("range must be LO,HI")?;
    Ok((lo.trim().parse().context("range lower end")?, hi.trim().parse().context("range upper end")?))
}

fn print_report(report: &analysis::Report, json: bool) {
    if json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
}

/// Exit code and message for a failed command.
fn failure(err: anyhow::Error) -> (i32, String) {
    let code = if let Some(e) = err.downcast_ref::<AnalysisError>() {
        e.exit_code()
    } else if let Some(e) = err.downcast_ref::<simulate::SimError>() {
        e.exit_code()
    } else {
        3
    };
    (code, format!("{err:#}"))
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Analyze { file, solve, dump_sdp, cert } => {
            let config = solve.config()?;
            let wants_cert = cert.is_some();
            let a = analysis::analyze(&file, &config, &Outputs { dump_sdp, certificate: cert })?;
            print_report(&a.report, solve.json);
            if wants_cert && a.report.certificate.is_none() {
                eprintln!("no certificate written: verdict is {}", a.verdict.status.as_str());
            }
            Ok(a.report.exit_code)
        }
        Command::Sweep { file, param, range, tol, solve } => {
            let (lower, upper) = parse_range(&range)?;
            let config = AnalysisConfig { sweep: Some(SweepSpec { param, lower, upper, tol }), ..solve.config()? };
            let report = analysis::sweep(&file, &config)?;
            print_report(&report, solve.json);
            Ok(report.exit_code)
        }
        Command::Simulate { file, grid, tfinal, dt, csv, set } => {
            let sys = analysis::load_system(&file, &overrides(&set)?)?;
            let sim = simulate::simulate(&sys, &SimConfig { grid, t_final: tfinal, dt })?;
            if let Some(path) = csv {
                std::fs::write(&path, sim.trace.to_csv())
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            println!("{}", serde_json::to_string_pretty(&sim.summary)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let (code, msg) = failure(err);
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
