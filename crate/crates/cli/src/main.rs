//! Command-line front end: single-shot metrics, parameter sweeps, screen
//! simulations, and the randomized identity check.
//!
//! Exit codes: 0 success, 1 validation failure (bad arguments, bad scenario
//! file, dead detector branch), 2 numerical contract violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use eraser_core::model::Detector;
use eraser_core::run::{run_check, run_metrics, run_screen, run_sweep, sweep_csv};
use eraser_core::scenario::{parse_scenario, render_diagnostics, Scenario};
use eraser_core::{Error, TrialityReport};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "ERASER_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "eraser",
    about = "Two-site interferometer with polarization tagging: metrics, sweeps, screen simulations",
    version
)]
struct Cli {
    /// Output directory for CSV files (overrides ERASER_OUT_DIR; default ".")
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate both metric routes for one detector branch
    Metrics {
        /// Scenario file
        file: PathBuf,
        /// Detector branch: D1, D2, D3 or D4
        #[arg(long)]
        detector: String,
    },
    /// Sweep the scenario's parameter and emit one CSV row per grid point
    Sweep {
        /// Scenario file (or use --preset)
        file: Option<PathBuf>,
        /// Built-in preset: fig4a, fig4b, fig4c or fig4d
        #[arg(long)]
        preset: Option<String>,
        /// Detector branch: D1, D2, D3 or D4
        #[arg(long)]
        detector: String,
    },
    /// Sample the screen distribution behind a detector (or unconditioned)
    Screen {
        /// Scenario file
        file: PathBuf,
        /// Detector branch; omit for the unconditioned ensemble
        #[arg(long)]
        detector: Option<String>,
    },
    /// Run the identity suite on seeded random configurations
    Check {
        /// Number of random configurations
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// RNG seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance applied to every identity residual
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not failures.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Contract(_) | Error::Dimension(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|diags| {
        Error::Config(format!(
            "{} has {} problem(s):\n{}",
            path.display(),
            diags.len(),
            render_diagnostics(&diags).trim_end()
        ))
    })
}

fn parse_detector(s: &str) -> Result<Detector, Error> {
    Detector::from_str(s)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

fn report_line(label: &str, r: &TrialityReport) -> String {
    format!(
        "{label:<12} {:<12.10} {:<12.10} {:<12.10} {:<12.10} {:<12.10}",
        r.p, r.v, r.c, r.d, r.purity
    )
}

fn run(cli: Cli) -> Result<(), Error> {
    let dir = out_dir(&cli.out);
    match cli.command {
        Command::Metrics { file, detector } => {
            let scenario = load_scenario(&file)?;
            let det = parse_detector(&detector)?;
            let run = run_metrics(&scenario, det)?;
            println!("scenario: {}", file.display());
            println!("detector: {det}   click probability: {}", run.probability);
            println!();
            println!(
                "{:<12} {:<12} {:<12} {:<12} {:<12} {:<12}",
                "route", "P", "V", "C", "D", "purity"
            );
            println!("{}", report_line("evolved", &run.evolved));
            println!("{}", report_line("closed-form", &run.closed_form));
            println!();
            println!("max cross-route discrepancy: {:.3e}", run.max_discrepancy);
            for (label, r) in [("evolved", &run.evolved), ("closed-form", &run.closed_form)] {
                println!(
                    "residuals ({label}): triality {:.3e}, duality-purity {:.3e}, distinguishability {:.3e}",
                    r.residual_triality, r.residual_duality_purity, r.residual_distinguishability
                );
            }
            Ok(())
        }
        Command::Sweep {
            file,
            preset,
            detector,
        } => {
            let det = parse_detector(&detector)?;
            let (scenario, name) = match (&file, &preset) {
                (Some(path), None) => (load_scenario(path)?, stem(path)),
                (None, Some(p)) => (
                    Scenario::preset(p).ok_or_else(|| {
                        Error::Config(format!(
                            "unknown preset {p:?} (expected fig4a, fig4b, fig4c or fig4d)"
                        ))
                    })?,
                    p.clone(),
                ),
                _ => {
                    return Err(Error::Config(
                        "provide exactly one of a scenario file or --preset".into(),
                    ))
                }
            };
            let rows = run_sweep(&scenario, det)?;
            let dead = rows.iter().filter(|r| r.p_detector == 0.0).count();
            let path = write_file(&dir, &format!("{name}_sweep_{det}.csv"), &sweep_csv(&rows))?;
            println!(
                "swept {} over [{}, {}] in {} steps (detector {det})",
                scenario.sweep.parameter,
                scenario.sweep.from,
                scenario.sweep.to,
                scenario.sweep.steps
            );
            if dead > 0 {
                println!(
                    "note: {dead} grid point(s) have zero click probability (NaN sentinel rows)"
                );
            }
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Screen { file, detector } => {
            let scenario = load_scenario(&file)?;
            let det = detector.as_deref().map(parse_detector).transpose()?;
            let run = run_screen(&scenario, det)?;
            let tag = det
                .map(|d| d.to_string())
                .unwrap_or_else(|| "ensemble".into());
            let name = stem(&file);
            let profile_path = write_file(
                &dir,
                &format!("{name}_screen_{tag}_profile.csv"),
                &run.profile.to_csv(),
            )?;
            let hist_path = write_file(
                &dir,
                &format!("{name}_screen_{tag}_hist.csv"),
                &run.samples.histogram_csv(),
            )?;
            match det {
                Some(d) => println!("detector: {d}   click probability: {}", run.probability),
                None => println!("unconditioned ensemble (no detector selected)"),
            }
            println!(
                "samples: {}   seed: {}   bins: {}",
                scenario.screen.samples, scenario.screen.seed, scenario.screen.bins
            );
            println!(
                "analytic V: {:.6}   offset: {:.6} rad",
                run.profile.analytic_v, run.profile.analytic_offset
            );
            println!(
                "estimated V: {:.6} ± {:.6}   offset: {:.6} rad",
                run.samples.estimated_v, run.samples.estimated_v_stderr, run.estimated_offset
            );
            println!(
                "3σ agreement: {}",
                if run.agrees_3sigma { "yes" } else { "NO" }
            );
            println!("wrote {}", profile_path.display());
            println!("wrote {}", hist_path.display());
            Ok(())
        }
        Command::Check { n, seed, tol } => {
            let summary = run_check(n, seed, 1e-6)?;
            println!(
                "checked {} random configurations ({} conditioned branches, seed {seed})",
                summary.configs, summary.branches
            );
            println!("{:<36} {:<12} bound", "identity", "max residual");
            let mut ok = true;
            for (label, value) in summary.identity_maxima() {
                let fine = value <= tol;
                ok &= fine;
                println!(
                    "{label:<36} {value:<12.3e} {tol:.1e} {}",
                    if fine { "ok" } else { "VIOLATED" }
                );
            }
            let vis = summary.max_visibility_excess;
            let fine = vis <= tol;
            ok &= fine;
            println!(
                "{:<36} {vis:<12.3e} {tol:.1e} {}",
                "visibility bound V <= |q|",
                if fine { "ok" } else { "VIOLATED" }
            );
            if ok {
                println!("all identities hold at {tol:.1e}");
                Ok(())
            } else {
                Err(Error::Contract(format!(
                    "identity residuals exceed {tol:.1e}"
                )))
            }
        }
    }
}
