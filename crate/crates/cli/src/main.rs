use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use su11_qfi::fock::{evolve, OracleOptions};
use su11_qfi::sweep::{sweep_eta, sweep_nin};
use su11_qfi::verify::{self, Grid, VerifyOptions};
use su11_qfi::{
    apply_nbs, closed_form, prepare_input, qcrb, qfi_from_state, ComplexAmplitude, Error,
    InputFamily, InputSpec, NbsParams, PhaseConfiguration, SqueezeParams,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

/// QFI and quantum Cramér–Rao bounds of an SU(1,1) interferometer.
#[derive(Parser)]
#[command(name = "su11", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the QFI at one parameter point (JSON on stdout).
    Point(PointArgs),
    /// QCRB of the three phase configurations against the photon fraction η.
    SweepEta(SweepEtaArgs),
    /// Optimal QFIs and the Hofmann ⟨N²⟩ against the total photon number.
    SweepNin(SweepNinArgs),
    /// Cross-check closed forms, Gaussian moments and the Fock oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    TwoCoherent,
    CoherentSqueezed,
}

impl From<Family> for InputFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::TwoCoherent => InputFamily::TwoCoherent,
            Family::CoherentSqueezed => InputFamily::CoherentSqueezed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ConfigArg {
    Upper,
    Lower,
    TwoArm,
    All,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PathArg {
    Closed,
    Gaussian,
    Oracle,
    All,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, value_enum)]
    input: Family,
    /// Mean photon number of the coherent input in mode a.
    #[arg(long, default_value_t = 0.0)]
    n_alpha: f64,
    /// Mean photon number of the coherent input in mode b (two-coherent).
    #[arg(long)]
    n_beta: Option<f64>,
    /// Squeezing parameter of the mode-b squeezed vacuum (coherent-squeezed).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta_alpha: f64,
    /// Defaults to the optimum θ_β = π + θ_g − θ_α.
    #[arg(long, allow_hyphen_values = true)]
    theta_beta: Option<f64>,
    /// Defaults to the optimum θ_ς = π − 2θ_α + 2θ_g.
    #[arg(long, allow_hyphen_values = true)]
    theta_varsigma: Option<f64>,
    /// Gain of the two-mode squeezer.
    #[arg(long)]
    g: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta_g: f64,
    #[arg(long, value_enum, default_value = "two-arm")]
    config: ConfigArg,
    /// The closed-form single-arm values assume optimal input phases.
    #[arg(long, value_enum, default_value = "closed")]
    path: PathArg,
    /// Per-mode Fock cutoff cap for the oracle path.
    #[arg(long, default_value_t = OracleOptions::default().max_cutoff)]
    max_cutoff: usize,
}

#[derive(Args)]
struct SweepEtaArgs {
    #[arg(long, value_enum)]
    input: Family,
    #[arg(long, default_value_t = 200.0, allow_hyphen_values = true)]
    n_in: f64,
    #[arg(long, default_value_t = 1.5)]
    g: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepNinArgs {
    #[arg(long, default_value_t = 1.5)]
    g: f64,
    #[arg(long, default_value_t = 200.0, allow_hyphen_values = true)]
    n_max: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "full")]
    grid: GridArg,
    /// Per-mode Fock cutoff cap.
    #[arg(long, default_value_t = OracleOptions::default().max_cutoff)]
    max_cutoff: usize,
    /// Feed -θ_g to the state-based paths (mutation check).
    #[cfg(debug_assertions)]
    #[arg(long, hide = true)]
    flip_theta_g: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Small,
    Full,
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Verify,
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Infeasible(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn configs(arg: ConfigArg) -> Vec<PhaseConfiguration> {
    match arg {
        ConfigArg::Upper => vec![PhaseConfiguration::UpperArm],
        ConfigArg::Lower => vec![PhaseConfiguration::LowerArm],
        ConfigArg::TwoArm => vec![PhaseConfiguration::TwoArm],
        ConfigArg::All => PhaseConfiguration::ALL.to_vec(),
    }
}

fn build_spec(args: &PointArgs) -> Result<InputSpec, Failure> {
    let alpha = ComplexAmplitude::from_mean_photons(args.n_alpha, args.theta_alpha)?;
    match args.input {
        Family::TwoCoherent => {
            if args.r.is_some() || args.theta_varsigma.is_some() {
                return Err(Failure::Usage(
                    "--r/--theta-varsigma apply to --input coherent-squeezed".into(),
                ));
            }
            let n_beta = args
                .n_beta
                .ok_or_else(|| Failure::Usage("--n-beta is required for two-coherent".into()))?;
            let theta_beta = args
                .theta_beta
                .unwrap_or(std::f64::consts::PI + args.theta_g - args.theta_alpha);
            Ok(InputSpec::TwoCoherent {
                alpha,
                beta: ComplexAmplitude::from_mean_photons(n_beta, theta_beta)?,
            })
        }
        Family::CoherentSqueezed => {
            if args.n_beta.is_some() || args.theta_beta.is_some() {
                return Err(Failure::Usage(
                    "--n-beta/--theta-beta apply to --input two-coherent".into(),
                ));
            }
            let r = args
                .r
                .ok_or_else(|| Failure::Usage("--r is required for coherent-squeezed".into()))?;
            let theta = args
                .theta_varsigma
                .unwrap_or(std::f64::consts::PI - 2.0 * args.theta_alpha + 2.0 * args.theta_g);
            Ok(InputSpec::CoherentSqueezed {
                alpha,
                squeeze: SqueezeParams::new(r, theta)?,
            })
        }
    }
}

fn point(args: &PointArgs) -> Result<Value, Failure> {
    let spec = build_spec(args)?;
    let params = NbsParams::new(args.g, args.theta_g)?;
    let configs = configs(args.config);
    let paths = match args.path {
        PathArg::Closed => vec![PathArg::Closed],
        PathArg::Gaussian => vec![PathArg::Gaussian],
        PathArg::Oracle => vec![PathArg::Oracle],
        PathArg::All => vec![PathArg::Closed, PathArg::Gaussian, PathArg::Oracle],
    };

    let mut results = Vec::new();
    for path in paths {
        let fishers: Vec<(PhaseConfiguration, f64, &str)> = match path {
            PathArg::Closed => configs
                .iter()
                .map(|&c| Ok((c, closed_form(&spec, &params, c)?.fisher, "closed")))
                .collect::<Result<_, Error>>()?,
            PathArg::Gaussian => {
                let state = apply_nbs(&prepare_input(&spec), &params);
                configs
                    .iter()
                    .map(|&c| Ok((c, qfi_from_state(&state, c)?.fisher, "gaussian")))
                    .collect::<Result<_, Error>>()?
            }
            PathArg::Oracle => {
                if args.max_cutoff < 2 {
                    return Err(Failure::Usage("--max-cutoff must be at least 2".into()));
                }
                let opts = OracleOptions {
                    max_cutoff: args.max_cutoff,
                    ..OracleOptions::default()
                };
                let state = evolve(&spec, &params, &opts)?;
                configs
                    .iter()
                    .map(|&c| (c, state.qfi(c), "oracle"))
                    .collect()
            }
            PathArg::All => unreachable!(),
        };
        for (config, fisher, path) in fishers {
            // F = 0 (no photons and no gain) has no finite bound
            let bound = qcrb(fisher).ok();
            results.push(json!({
                "config": config.as_str(),
                "path": path,
                "fisher": fisher,
                "qcrb": bound,
            }));
        }
    }

    Ok(json!({
        "schema": 1,
        "input": spec,
        "nbs": { "g": params.gain(), "theta_g": params.pump_phase() },
        "results": results,
    }))
}

fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv(out: &Option<PathBuf>, header: &str, rows: &[[f64; 4]]) -> Result<(), Failure> {
    let mut w = open_output(out)?;
    writeln!(w, "{header}")?;
    for row in rows {
        let fields: Vec<String> = row.iter().map(|&x| csv_float(x)).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep_eta(args: &SweepEtaArgs) -> Result<(), Failure> {
    let rows = sweep_eta(args.input.into(), args.n_in, args.g, args.points)?;
    let rows: Vec<[f64; 4]> = rows
        .iter()
        .map(|r| [r.eta, r.qcrb_upper, r.qcrb_lower, r.qcrb_two_arm])
        .collect();
    write_csv(&args.out, "eta,qcrb_upper,qcrb_lower,qcrb_two_arm", &rows)
}

fn cmd_sweep_nin(args: &SweepNinArgs) -> Result<(), Failure> {
    let rows = sweep_nin(args.g, args.n_max, args.points)?;
    let rows: Vec<[f64; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.n_in,
                r.qfi_opt_two_coherent,
                r.qfi_opt_coherent_squeezed,
                r.hofmann_n2,
            ]
        })
        .collect();
    write_csv(
        &args.out,
        "n_in,qfi_opt_two_coherent,qfi_opt_coherent_squeezed,hofmann_n2",
        &rows,
    )
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    if args.max_cutoff < 2 {
        return Err(Failure::Usage("--max-cutoff must be at least 2".into()));
    }
    let opts = VerifyOptions {
        grid: match args.grid {
            GridArg::Small => Grid::Small,
            GridArg::Full => Grid::Full,
        },
        max_cutoff: args.max_cutoff,
        #[cfg(debug_assertions)]
        flip_theta_g: args.flip_theta_g,
        #[cfg(not(debug_assertions))]
        flip_theta_g: false,
    };
    let report = verify::run(&opts)?;
    let mut out = io::stdout().lock();
    for check in &report.checks {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{status}  {:>5}  {}", check.evaluated, check.name)?;
        for failure in check.failures.iter().take(20) {
            writeln!(out, "        {failure}")?;
        }
        if check.failures.len() > 20 {
            writeln!(out, "        ... and {} more", check.failures.len() - 20)?;
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Point(args) => {
            let doc = point(args)?;
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &doc).map_err(io::Error::from)?;
            writeln!(out)?;
            Ok(())
        }
        Command::SweepEta(args) => cmd_sweep_eta(args),
        Command::SweepNin(args) => cmd_sweep_nin(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own usage errors
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
