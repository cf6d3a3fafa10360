//! Subcommand dispatch for the `diamond` binary.
//!
//! [`run`] takes the argument list and the two output streams, so the whole
//! command surface can be exercised in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use diamond_core::{
    build_liouvillian, closed_form_eigenvalues, closure_complete, dark_classification, detect_gain,
    detect_windows, dressed_spectrum, evolve, parse_config, preset, run_sweep, steady_state,
    write_csv, write_csv_to, write_states, DensityMatrix, Error, EvolveOptions, Level, Observable,
    OutputOptions, Scenario, SweepResult, SweepSpec, PRESET_NAMES,
};

const THRESHOLD_FRACTION: f64 = diamond_core::sweep::DEFAULT_THRESHOLD_FRACTION;

#[derive(Debug, Parser)]
#[command(
    name = "diamond",
    version,
    about = "Four-level diamond atom: dressed states, steady states and probe sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the probe detuning and write the steady-state table as CSV.
    Sweep(SweepArgs),
    /// Solve for the steady state at one probe detuning.
    Steady(SteadyArgs),
    /// Integrate the master equation from the ground state.
    Evolve(EvolveArgs),
    /// Print the dressed-state spectrum and dark-state census.
    Dressed(DressedArgs),
    /// List the built-in presets and their parameters.
    Presets,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in parameter set (see `diamond presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// CSV destination; defaults to the config's out_path, then stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "DELTA", allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, value_name = "DELTA", allow_negative_numbers = true)]
    max: Option<f64>,
    #[arg(long, value_name = "N")]
    points: Option<usize>,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Debug, Args)]
struct SteadyArgs {
    #[command(flatten)]
    source: Source,
    /// Probe detuning; defaults to the scenario's delta_c2.
    #[arg(long, value_name = "DELTA", allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Write the state as a one-row CSV instead of text.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_name = "DELTA", allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, value_name = "T", default_value_t = diamond_core::lindblad::DEFAULT_T_FINAL)]
    t_final: f64,
    #[arg(long, value_name = "DT", default_value_t = diamond_core::lindblad::DEFAULT_DT)]
    dt: f64,
    /// Number of evenly spaced samples to record.
    #[arg(long, value_name = "N", default_value_t = 0)]
    samples: usize,
    /// Write the sampled trajectory as CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DressedArgs {
    #[command(flatten)]
    source: Source,
    /// Write eigenvalues and eigenvectors as CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Compute { error: Error, parameters: String },
}

impl Failure {
    fn compute(error: Error, scenario: &Scenario) -> Self {
        Failure::Compute {
            error,
            parameters: describe(scenario),
        }
    }
}

struct Loaded {
    scenario: Scenario,
    sweep: SweepSpec,
    output: OutputOptions,
}

fn load(source: &Source) -> Result<Loaded, Failure> {
    if let Some(name) = &source.preset {
        let p = preset(name).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok(Loaded {
            scenario: p.scenario,
            sweep: p.sweep,
            output: OutputOptions {
                observables: p.observables,
                out_path: None,
            },
        });
    }
    let path = source.config.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path).map_err(|source| Failure::Compute {
        error: Error::Io {
            path: path.clone(),
            source,
        },
        parameters: "(none loaded)".into(),
    })?;
    let config =
        parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Loaded {
        scenario: config.scenario,
        sweep: config.sweep,
        output: config.output,
    })
}

fn describe(s: &Scenario) -> String {
    format!(
        "omega_a1={} omega_a2={} omega_c1={} omega_c2={} delta_a1={} delta_a2={} delta_c1={} delta_c2={} \
         gamma1={} gamma2={} gamma3={} gamma4={} closure_target={}",
        s.omega_a1, s.omega_a2, s.omega_c1, s.omega_c2, s.delta_a1, s.delta_a2, s.delta_c1, s.delta_c2,
        s.gamma1, s.gamma2, s.gamma3, s.gamma4, s.closure_target
    )
}

fn print_state(out: &mut String, rho: &DensityMatrix) {
    let pops = rho.populations();
    writeln!(
        out,
        "populations: a={:.10e} b={:.10e} c={:.10e} d={:.10e}",
        pops[0], pops[1], pops[2], pops[3]
    )
    .unwrap();
    for key in Observable::COHERENCES {
        let v = diamond_core::extract_observable(rho, key);
        writeln!(out, "rho_{key:<2} = {:>+.10e} {:>+.10e}i", v.re, v.im).unwrap();
    }
}

fn at_delta(scenario: &Scenario, delta: Option<f64>) -> Result<Scenario, Failure> {
    let shifted = Scenario {
        delta_c2: delta.unwrap_or(scenario.delta_c2),
        ..*scenario
    };
    closure_complete(&shifted).map_err(|e| Failure::compute(e, &shifted))
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<String, Failure> {
    let loaded = load(&args.source)?;
    let mut spec = loaded.sweep;
    spec.delta_min = args.min.unwrap_or(spec.delta_min);
    spec.delta_max = args.max.unwrap_or(spec.delta_max);
    spec.points = args.points.unwrap_or(spec.points);
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let result: SweepResult = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.into())
            .build()
            .map_err(|e| Failure::Usage(format!("cannot start {n} worker threads: {e}")))?
            .install(|| run_sweep(&spec)),
        None => run_sweep(&spec),
    }
    .map_err(|e| Failure::compute(e, &spec.base))?;

    let mut report = String::new();
    match args.out.or(loaded.output.out_path) {
        Some(path) => {
            write_csv(&result, &path).map_err(|e| Failure::compute(e, &spec.base))?;
            writeln!(
                report,
                "wrote {} rows to {}",
                result.rows.len(),
                path.display()
            )
            .unwrap();
        }
        None => {
            write_csv_to(&result, stdout).map_err(|source| {
                Failure::compute(
                    Error::Io {
                        path: "<stdout>".into(),
                        source,
                    },
                    &spec.base,
                )
            })?;
            return Ok(String::new());
        }
    }
    for key in &loaded.output.observables {
        if !key.is_coherence() {
            continue;
        }
        let windows = detect_windows(&result, *key, THRESHOLD_FRACTION)
            .map_err(|e| Failure::compute(e, &spec.base))?;
        let gain = detect_gain(&result, *key).map_err(|e| Failure::compute(e, &spec.base))?;
        writeln!(
            report,
            "Im rho_{key}: {} window(s), {} gain interval(s)",
            windows.len(),
            gain.len()
        )
        .unwrap();
        for w in windows {
            writeln!(
                report,
                "  window at delta={:+.4} half_width={:.4} depth={:.4e} threshold={:.4e}",
                w.center, w.half_width, w.depth, w.threshold
            )
            .unwrap();
        }
        for (lo, hi) in gain {
            writeln!(report, "  gain on [{lo:+.4}, {hi:+.4}]").unwrap();
        }
    }
    Ok(report)
}

fn cmd_steady(args: SteadyArgs) -> Result<String, Failure> {
    let loaded = load(&args.source)?;
    let scenario = at_delta(&loaded.scenario, args.delta)?;
    let rho =
        steady_state(&build_liouvillian(&scenario)).map_err(|e| Failure::compute(e, &scenario))?;
    let mut report = String::new();
    if let Some(path) = args.out {
        write_states("delta", [(scenario.delta_c2, &rho)], &path)
            .map_err(|e| Failure::compute(e, &scenario))?;
        writeln!(report, "wrote steady state to {}", path.display()).unwrap();
    } else {
        writeln!(report, "steady state at delta={}", scenario.delta_c2).unwrap();
        print_state(&mut report, &rho);
    }
    Ok(report)
}

fn cmd_evolve(args: EvolveArgs) -> Result<String, Failure> {
    let loaded = load(&args.source)?;
    let scenario = at_delta(&loaded.scenario, args.delta)?;
    let options = EvolveOptions {
        t_final: args.t_final,
        dt: args.dt,
        samples: args.samples,
    };
    let trajectory =
        evolve(&scenario, &DensityMatrix::pure(Level::B), options).map_err(|e| match e {
            Error::StepTooLarge { .. } | Error::InvalidEvolution(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::compute(other, &scenario),
        })?;
    let mut report = String::new();
    if let Some(path) = args.out {
        let rows: Vec<(f64, &DensityMatrix)> = if trajectory.samples.is_empty() {
            vec![(args.t_final, &trajectory.final_state)]
        } else {
            trajectory
                .samples
                .iter()
                .map(|(t, rho)| (*t, rho))
                .collect()
        };
        write_states("t", rows, &path).map_err(|e| Failure::compute(e, &scenario))?;
        writeln!(report, "wrote trajectory to {}", path.display()).unwrap();
    } else {
        writeln!(
            report,
            "state at t={} after {} steps",
            args.t_final, trajectory.steps
        )
        .unwrap();
        print_state(&mut report, &trajectory.final_state);
    }
    Ok(report)
}

fn cmd_dressed(args: DressedArgs) -> Result<String, Failure> {
    let loaded = load(&args.source)?;
    let s = loaded.scenario;
    let spectrum = dressed_spectrum(&s).map_err(|e| Failure::compute(e, &s))?;
    let census = dark_classification(&spectrum);

    let mut report = String::new();
    writeln!(
        report,
        "{:>5}  {:>22}  {:>5}  {:>12}",
        "state", "eigenvalue", "group", "|c amp|"
    )
    .unwrap();
    let group_of = |k: usize| {
        spectrum
            .groups
            .iter()
            .position(|g| g.contains(&k))
            .expect("grouped")
    };
    for (k, value) in spectrum.eigenvalues.iter().enumerate() {
        let c_amp = spectrum.eigenvectors[(Level::C.index(), k)].norm();
        writeln!(
            report,
            "{k:>5}  {value:>+22.15e}  {:>5}  {c_amp:>12.3e}",
            group_of(k)
        )
        .unwrap();
    }
    writeln!(report, "dark per group: {:?}", census.per_group).unwrap();
    writeln!(report, "total dark: {}", census.total_dark).unwrap();
    writeln!(report, "degenerate: {}", census.degenerate).unwrap();
    if let Ok(closed) = closed_form_eigenvalues(&s) {
        writeln!(report, "closed form: {:?}", closed.eigenvalues).unwrap();
    }

    if let Some(path) = args.out {
        let mut csv = String::from(
            "index,eigenvalue,group,dark_in_group,re_a,im_a,re_b,im_b,re_c,im_c,re_d,im_d\n",
        );
        for (k, value) in spectrum.eigenvalues.iter().enumerate() {
            let g = group_of(k);
            write!(csv, "{k},{value:.16e},{g},{}", census.per_group[g]).unwrap();
            for level in Level::ALL {
                let amp = spectrum.eigenvectors[(level.index(), k)];
                write!(csv, ",{:.16e},{:.16e}", amp.re, amp.im).unwrap();
            }
            csv.push('\n');
        }
        std::fs::write(&path, csv).map_err(|source| {
            Failure::compute(
                Error::Io {
                    path: path.clone(),
                    source,
                },
                &s,
            )
        })?;
        writeln!(report, "wrote dressed states to {}", path.display()).unwrap();
    }
    Ok(report)
}

fn cmd_presets() -> String {
    let mut out = String::new();
    for name in PRESET_NAMES {
        let p = preset(name).expect("listed preset");
        let s = p.scenario;
        let keys: Vec<String> = p.observables.iter().map(|o| o.key()).collect();
        writeln!(
            out,
            "{name:<12} omega_a1={} omega_a2={} omega_c1={} omega_c2={} gamma=({}, {}, {}, {}) closure_target={} sweep=[{}, {}]x{} observables={}",
            s.omega_a1, s.omega_a2, s.omega_c1, s.omega_c2, s.gamma1, s.gamma2, s.gamma3, s.gamma4,
            s.closure_target, p.sweep.delta_min, p.sweep.delta_max, p.sweep.points, keys.join(",")
        )
        .unwrap();
    }
    out
}

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status for bad arguments, unknown presets and malformed configs.
pub const EXIT_USAGE: u8 = 1;
/// Exit status for failed computations and I/O errors.
pub const EXIT_COMPUTE: u8 = 2;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Steady(args) => cmd_steady(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Dressed(args) => cmd_dressed(args),
        Command::Presets => Ok(cmd_presets()),
    };
    match outcome {
        Ok(report) => {
            let _ = stdout.write_all(report.as_bytes());
            EXIT_OK
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Compute { error, parameters }) => {
            let _ = writeln!(stderr, "error: {error}");
            let _ = writeln!(stderr, "parameters: {parameters}");
            EXIT_COMPUTE
        }
    }
}
